"""Breakpoint store, stepping engine, suspension controller, trace recorder."""
