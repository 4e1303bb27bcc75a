"""Concurrency-agnostic wire layer: catalog, codecs, symbols, applicability."""
