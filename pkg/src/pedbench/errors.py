"""Exception types shared across the toolkit."""

from __future__ import annotations


class PedbenchError(Exception):
    """Base error. `category` is a short machine-parsable tag used by the CLI."""

    category = "error"


class ParseError(PedbenchError):
    """Malformed input file. Carries the file path and 1-based line number."""

    category = "parse"

    def __init__(self, path, line: int, reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class EvalError(PedbenchError):
    """Evaluation cannot proceed (e.g. empty positive set, unreachable recall)."""

    category = "eval"


class ConfigError(PedbenchError):
    """Invalid configuration or command-line arguments."""

    category = "config"
