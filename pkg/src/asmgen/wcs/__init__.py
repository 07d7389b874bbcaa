"""The workcell script (WCS) language: parsing, checking and formatting."""
from .checker import ApiCatalog, check, default_catalog
from .errors import ScriptError
from .extract import extract_code_block
from .formatter import format_script
from .nodes import Script, Span
from .parser import parse

__all__ = [
    "ApiCatalog", "Script", "ScriptError", "Span", "check", "default_catalog",
    "extract_code_block", "format_script", "parse",
]
