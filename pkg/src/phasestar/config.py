"""Run configuration shared by the CLI and the verification suites."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .numeval import DEFAULT_SEED


@dataclass(frozen=True)
class RunConfig:
    order: int = 10  # derivative truncation order D
    inv_order: int = 4  # local inversion order K
    jet_order: int = 3  # jet order k
    tol: float = 1e-9
    samples: int = 1000
    seed: int = DEFAULT_SEED
    format: str = "text"

    def __post_init__(self):
        for name in ("order", "inv_order", "jet_order"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.samples <= 0:
            raise ValueError("samples must be > 0")
        if self.format not in ("text", "json"):
            raise ValueError("format must be 'text' or 'json'")

    def as_dict(self) -> dict:
        return asdict(self)
