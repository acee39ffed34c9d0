"""Plane-wave symbols amplitude * exp(E) * exp[i (phi q + xi p) / hbar] and their Moyal products."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .bidiff import BiDiffOp
from .scalars import HBAR, I, ONE, ZERO, ParamScalar, S


@dataclass(frozen=True)
class PlaneWave:
    amplitude: ParamScalar
    exponent: ParamScalar
    phi: ParamScalar
    xi: ParamScalar

    @classmethod
    def make(cls, phi="phi", xi="xi", amplitude=1, exponent=0) -> PlaneWave:
        return cls(S(amplitude), S(exponent), S(phi), S(xi))

    def __mul__(self, other: PlaneWave) -> PlaneWave:
        """Pointwise product (phases add)."""
        return PlaneWave(
            self.amplitude * other.amplitude,
            self.exponent + other.exponent,
            self.phi + other.phi,
            self.xi + other.xi,
        )

    def scale(self, c) -> PlaneWave:
        return PlaneWave(self.amplitude * S(c), self.exponent, self.phi, self.xi)

    def __str__(self):
        from .parsefmt import format_scalar

        parts = []
        if self.amplitude != ONE:
            parts.append(f"({format_scalar(self.amplitude)})")
        if self.exponent:
            parts.append(f"exp({format_scalar(self.exponent)})")
        phi, xi = (_wrap(format_scalar(x)) for x in (self.phi, self.xi))
        parts.append(f"exp(i*({phi}*q + {xi}*p)/hbar)")
        return "*".join(parts)


def _wrap(s: str) -> str:
    return s if s.replace("_", "").isalnum() else f"({s})"


def commutator_phase(u: PlaneWave, v: PlaneWave) -> ParamScalar:
    """-i (phi xi' - xi phi') / (2 hbar)."""
    return -I * (u.phi * v.xi - u.xi * v.phi) / (2 * HBAR)


def moyal_pw(u: PlaneWave, v: PlaneWave) -> PlaneWave:
    """Closed-form Moyal product: derivatives act on plane waves as multiplication."""
    w = u * v
    return PlaneWave(w.amplitude, w.exponent + commutator_phase(u, v), w.phi, w.xi)


def commutes(u: PlaneWave, v: PlaneWave) -> bool:
    return moyal_pw(u, v) == moyal_pw(v, u)


def bidiff_on_plane_waves(star: BiDiffOp, u: PlaneWave, v: PlaneWave, order: int) -> ParamScalar:
    """Sum of the star's terms with lq -> i phi/hbar, lp -> i xi/hbar, rq, rp likewise.

    Only terms of total derivative order <= ``order`` contribute; the result is
    the multiplier of u*v at that order in the wave parameters.
    """
    a = (I * u.phi / HBAR, I * u.xi / HBAR, I * v.phi / HBAR, I * v.xi / HBAR)
    out = ZERO
    for k, c in star.terms.items():
        if sum(k) > order:
            continue
        term = c
        for base, e in zip(a, k):
            if e:
                term = term * base ** e
        out = out + term
    return out


def phase_series(E: ParamScalar, terms: int) -> ParamScalar:
    """sum_{j < terms} E^j / j!."""
    out = ZERO
    power = ONE
    for j in range(terms):
        out = out + power / factorial(j)
        power = power * E
    return out
