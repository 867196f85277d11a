"""The IMP toy language: syntax, embedding into module semantics, and memory."""
from .ast import Module
from .embed import embed
from .mem import mem_impl, mem_preabs, MemState, EMPTY_MEM
from .syntax import ParseError, parse, parse_expr, render

__all__ = ["Module", "embed", "mem_impl", "mem_preabs", "MemState", "EMPTY_MEM", "ParseError", "parse",
           "parse_expr", "render", "load_module"]


def load_module(src: str, overrides=None):
    return embed(parse(src), overrides)
