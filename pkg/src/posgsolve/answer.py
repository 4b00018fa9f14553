from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .transducer import Transducer

WIN, LOSE, UNKNOWN = "win", "lose", "unknown-within-bound"
MODES = ("almost-sure", "positive")


class BudgetExceeded(RuntimeError):
    """A configured node/enumeration budget ran out."""


class ScopeError(ValueError):
    """The game's side-information shape is outside what a procedure handles."""


@dataclass
class QualitativeAnswer:
    verdict: str
    witness: Transducer | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (WIN, LOSE, UNKNOWN):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict != WIN and self.witness is not None:
            raise ValueError("only a win carries a witness")

    @property
    def win(self) -> bool:
        return self.verdict == WIN


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    return mode
