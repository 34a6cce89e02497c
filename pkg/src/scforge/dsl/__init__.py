"""Textual network format: tokenizer, parser, canonical printer, validator."""

from .lexer import Diagnostic, tokenize
from .parser import parse_expr, parse_network
from .printer import print_network
from .validate import validate

__all__ = ["Diagnostic", "tokenize", "parse_expr", "parse_network", "print_network", "validate"]
