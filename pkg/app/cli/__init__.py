"""
Interface de linha de comando.

`cli.build_parser` agrega um módulo por subcomando (`app/cli/commands/`).
"""
from app.cli.cli import build_parser

__all__ = ["build_parser"]
