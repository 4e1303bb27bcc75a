"""Front end for the .pd mini-language: lexer, parser, tagged AST."""

from polydbg.lang.ast import Program, SourceUnit, TaggedLocation, collect_tagged_locations
from polydbg.lang.parser import ParseError, parse

__all__ = [
    "ParseError",
    "Program",
    "SourceUnit",
    "TaggedLocation",
    "collect_tagged_locations",
    "parse",
]
