"""Smooth dyadic cutoffs and frequency-annulus projections.

The plateau cutoff equals 1 on [-1, 1], vanishes outside [-2, 2] and glues
the two levels with the standard exp(-1/x) bump, so all derivatives vanish
at |s| = 1 and |s| = 2.  The annulus bump rho(s) = chi(s) - chi(2s) is
supported on 1/2 <= |s| <= 2 and its dyadic dilates telescope to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectral import GridSpec, SpectralField, freq_norm

__all__ = [
    "DyadicScale",
    "CutoffSpec",
    "DEFAULT_CUTOFF",
    "smooth_cutoff",
    "annulus_bump",
    "project",
    "random_annulus_field",
    "scale_value",
]


@dataclass(frozen=True)
class DyadicScale:
    """A scale lam = 2^j for integer j (exact powers of two only)."""

    j: int

    @property
    def value(self) -> float:
        return math.ldexp(1.0, self.j)

    @classmethod
    def from_value(cls, lam: float) -> "DyadicScale":
        if lam <= 0:
            raise ValueError("scale must be positive")
        mantissa, exp = math.frexp(lam)
        if mantissa != 0.5:
            raise ValueError(f"{lam!r} is not an exact power of two")
        return cls(exp - 1)


def scale_value(scale) -> float:
    """Accept a DyadicScale or a bare power-of-two float."""
    if isinstance(scale, DyadicScale):
        return scale.value
    return DyadicScale.from_value(float(scale)).value


def _exp_glue(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """Transition profile used on 1 < |s| < 2; must vanish flatly at 0."""

    glue: Callable[[np.ndarray], np.ndarray] = field(default=_exp_glue)
    tol: float = 1e-12


DEFAULT_CUTOFF = CutoffSpec()


def smooth_cutoff(s, spec: CutoffSpec = DEFAULT_CUTOFF):
    """Even plateau cutoff: 1 on [-1, 1], 0 outside [-2, 2], smooth glue between."""
    arr = np.asarray(s, dtype=float)
    scalar = arr.ndim == 0
    a = np.abs(np.atleast_1d(arr))
    out = np.ones_like(a)
    out[a >= 2.0] = 0.0
    mid = (a > 1.0) & (a < 2.0)
    if mid.any():
        g_top = spec.glue(2.0 - a[mid])
        g_bot = spec.glue(a[mid] - 1.0)
        out[mid] = g_top / (g_top + g_bot)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def annulus_bump(s, spec: CutoffSpec = DEFAULT_CUTOFF):
    """Bump chi(s) - chi(2s), supported on 1/2 <= |s| <= 2 with value 1 at |s| = 1."""
    return smooth_cutoff(s, spec) - smooth_cutoff(2.0 * np.asarray(s, dtype=float), spec)


def project(field_in: SpectralField, scale, spec: CutoffSpec = DEFAULT_CUTOFF) -> SpectralField:
    """Restrict a field to the dyadic annulus |xi| ~ lam via the smooth bump."""
    lam = scale_value(scale)
    mult = annulus_bump(freq_norm(field_in.grid) / lam, spec)
    return SpectralField(field_in.grid, field_in.coeffs * mult)


def random_annulus_field(grid: GridSpec, scale, rng: np.random.Generator,
                         ncomp: int | None = None) -> SpectralField:
    """Complex Gaussian coefficients restricted to the annulus |xi| ~ lam."""
    shape = grid.shape if ncomp is None else (ncomp,) + grid.shape
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return project(SpectralField(grid, raw), scale)
