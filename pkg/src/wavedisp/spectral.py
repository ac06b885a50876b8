"""Spectral fields on a periodic box and Fourier-multiplier machinery.

Fields live on the uniform grid of the torus [0, L)^d with d in {1, 2} and a
power-of-two number n of points per axis.  The coefficient convention is

    u(x_j) = sum_k  coeffs[k] * exp(i xi_k . x_j),   xi_k = 2 pi k / L,

i.e. coeffs = fftn(values) / n^d, so that the discrete Plancherel identity
reads ||u||_{L^2}^2 = L^d * sum |coeffs|^2.  A vector field stores its
components along a leading axis of the coefficient array.

The named multipliers are the ones of the water-wave system: the dispersion
relation omega, the phase speed, the smoothing kernel tanh|xi|/|xi| and its
square root, |xi|, Sobolev brackets and Riesz components i*xi_j/|xi|.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .dispersion import SymbolParams, omega

__all__ = [
    "GridSpec",
    "SpectralField",
    "MixedNormSpec",
    "freq_axes",
    "freq_components",
    "freq_norm",
    "field_from_values",
    "field_values",
    "zero_field",
    "multiplier_values",
    "apply_multiplier",
    "propagate",
    "riesz_vector",
    "riesz_divergence",
    "l2_norm",
    "lr_norm",
    "hs_norm",
    "mixed_norm",
    "conjugate_symmetry_defect",
    "tail_mass",
    "save_field",
    "load_field",
    "MULTIPLIER_NAMES",
]

MULTIPLIER_NAMES = (
    "omega", "phase_speed", "whitham", "sqrt_whitham",
    "abs_freq", "sobolev", "riesz",
)


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: d in {1, 2}, n points per axis, box length."""

    d: int
    n: int
    length: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError("points per axis must be a power of two >= 8")
        if not self.length > 0:
            raise ValueError("box length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def cell_volume(self) -> float:
        return (self.length / self.n) ** self.d

    @property
    def nyquist(self) -> float:
        return math.pi * self.n / self.length


@lru_cache(maxsize=None)
def freq_axes(grid: GridSpec):
    ax = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=grid.spacing)
    ax.flags.writeable = False
    return (ax,) * grid.d


@lru_cache(maxsize=None)
def freq_components(grid: GridSpec):
    axes = freq_axes(grid)
    if grid.d == 1:
        comps = (axes[0],)
    else:
        comps = tuple(np.meshgrid(*axes, indexing="ij"))
    for c in comps:
        c.flags.writeable = False
    return comps


@lru_cache(maxsize=None)
def freq_norm(grid: GridSpec):
    comps = freq_components(grid)
    out = np.sqrt(sum(c * c for c in comps))
    out.flags.writeable = False
    return out


@dataclass
class SpectralField:
    """Fourier coefficients of a scalar or component-stacked vector field."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        shape = self.coeffs.shape
        if shape[-self.grid.d:] != self.grid.shape or self.coeffs.ndim > self.grid.d + 1:
            raise ValueError(
                f"coefficient shape {shape} does not match grid {self.grid.shape}"
            )

    @property
    def ncomp(self) -> int | None:
        return None if self.coeffs.ndim == self.grid.d else self.coeffs.shape[0]

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())


def _fft_axes(grid: GridSpec):
    return tuple(range(-grid.d, 0))


def field_from_values(grid: GridSpec, values) -> SpectralField:
    values = np.asarray(values)
    coeffs = np.fft.fftn(values, axes=_fft_axes(grid)) / grid.n ** grid.d
    return SpectralField(grid, coeffs)


def field_values(field: SpectralField) -> np.ndarray:
    n_total = field.grid.n ** field.grid.d
    return np.fft.ifftn(field.coeffs, axes=_fft_axes(field.grid)) * n_total


def zero_field(grid: GridSpec, ncomp: int | None = None) -> SpectralField:
    shape = grid.shape if ncomp is None else (ncomp,) + grid.shape
    return SpectralField(grid, np.zeros(shape, dtype=complex))


# ----------------------------------------------------------------------
# Multipliers and the propagator.
# ----------------------------------------------------------------------

def multiplier_values(grid: GridSpec, name: str, *, beta: int = 0,
                      s: float | None = None, component: int | None = None) -> np.ndarray:
    """Symbol values on the frequency lattice for one named multiplier.

    Zero-frequency conventions: whitham/phase_speed/sqrt_whitham -> 1 (their
    limits), omega/abs_freq -> 0, riesz components -> 0.
    """
    xi = freq_norm(grid)
    if name == "omega":
        return omega(SymbolParams(beta), xi)
    if name == "whitham":
        out = np.ones_like(xi)
        nz = xi > 0
        out[nz] = np.tanh(xi[nz]) / xi[nz]
        return out
    if name == "phase_speed":
        kv = multiplier_values(grid, "whitham")
        return np.sqrt((1.0 + beta * xi * xi) * kv)
    if name == "sqrt_whitham":
        return np.sqrt(multiplier_values(grid, "whitham"))
    if name == "abs_freq":
        return xi.copy()
    if name == "sobolev":
        if s is None:
            raise ValueError("'sobolev' needs the exponent s")
        return (1.0 + xi * xi) ** (0.5 * s)
    if name == "riesz":
        if component is None or not 0 <= component < grid.d:
            raise ValueError("'riesz' needs a component index in range(d)")
        comp = freq_components(grid)[component]
        out = np.zeros(grid.shape, dtype=complex)
        nz = xi > 0
        out[nz] = 1j * comp[nz] / xi[nz]
        return out
    raise ValueError(f"unknown multiplier {name!r}; choose from {MULTIPLIER_NAMES}")


def apply_multiplier(field: SpectralField, name: str, **kwargs) -> SpectralField:
    vals = multiplier_values(field.grid, name, **kwargs)
    return SpectralField(field.grid, field.coeffs * vals)


def propagate(field: SpectralField, beta: int, t: float, sign: int = 1) -> SpectralField:
    """Free evolution by exp(-i * sign * t * omega(|xi|)).

    sign=+1 gives the forward propagator of i u_t - omega(D) u = 0; the two
    diagonalized water-wave modes use sign=+1 and sign=-1.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    phase = np.exp(-1j * sign * t * multiplier_values(field.grid, "omega", beta=beta))
    return SpectralField(field.grid, field.coeffs * phase)


def riesz_vector(field: SpectralField) -> SpectralField:
    """Apply the Riesz components to a scalar field, stacking d components."""
    if field.ncomp is not None:
        raise ValueError("riesz_vector expects a scalar field")
    grid = field.grid
    stacked = np.stack([
        multiplier_values(grid, "riesz", component=j) * field.coeffs
        for j in range(grid.d)
    ])
    return SpectralField(grid, stacked)


def riesz_divergence(field: SpectralField) -> SpectralField:
    """Riesz dot product of a vector field: sum_j R_j applied to component j."""
    if field.ncomp is None:
        raise ValueError("riesz_divergence expects a vector field")
    grid = field.grid
    acc = np.zeros(grid.shape, dtype=complex)
    for j in range(field.ncomp):
        acc += multiplier_values(grid, "riesz", component=j) * field.coeffs[j]
    return SpectralField(grid, acc)


# ----------------------------------------------------------------------
# Norms.
# ----------------------------------------------------------------------

def l2_norm(field: SpectralField) -> float:
    return math.sqrt(float(np.sum(np.abs(field.coeffs) ** 2)) * field.grid.length ** field.grid.d)


def _pointwise_magnitude(field: SpectralField) -> np.ndarray:
    vals = field_values(field)
    if field.ncomp is None:
        return np.abs(vals)
    return np.sqrt(np.sum(np.abs(vals) ** 2, axis=0))


def lr_norm(field: SpectralField, r: float) -> float:
    """Spatial L^r norm via the grid quadrature weight (max for r = inf)."""
    mag = _pointwise_magnitude(field)
    if math.isinf(r):
        return float(mag.max())
    if r < 1:
        raise ValueError("Lebesgue exponent must be >= 1")
    return float((np.sum(mag ** r) * field.grid.cell_volume) ** (1.0 / r))


def hs_norm(field: SpectralField, s: float) -> float:
    """Sobolev H^s norm; vector fields sum component squares."""
    w = multiplier_values(field.grid, "sobolev", s=s)
    total = float(np.sum(w * w * np.abs(field.coeffs) ** 2))
    return math.sqrt(total * field.grid.length ** field.grid.d)


@dataclass(frozen=True)
class MixedNormSpec:
    """Space-time norm L^q_t L^r_x on [0, horizon] from n_t uniform samples."""

    q: float
    r: float
    horizon: float
    n_t: int

    def __post_init__(self):
        if self.horizon <= 0 or self.n_t < 2:
            raise ValueError("need horizon > 0 and at least two time samples")

    def is_admissible(self, d: int) -> bool:
        from .strichartz import admissible
        return admissible(d, self.q, self.r)


def mixed_norm(trajectory: Sequence[SpectralField], spec: MixedNormSpec) -> float:
    """Mixed L^q_T L^r_x norm of fields sampled uniformly on [0, horizon]."""
    if len(trajectory) != spec.n_t:
        raise ValueError(f"expected {spec.n_t} samples, got {len(trajectory)}")
    grid = trajectory[0].grid
    if any(f.grid != grid for f in trajectory):
        raise ValueError("all samples must share one grid")
    g = np.array([lr_norm(f, spec.r) for f in trajectory])
    if math.isinf(spec.q):
        return float(g.max())
    dt = spec.horizon / (spec.n_t - 1)
    return float(np.trapezoid(g ** spec.q, dx=dt) ** (1.0 / spec.q))


# ----------------------------------------------------------------------
# Diagnostics and serialization.
# ----------------------------------------------------------------------

def conjugate_symmetry_defect(field: SpectralField) -> float:
    """Relative deviation from coeffs(-k) = conj(coeffs(k)) (0 for real fields)."""
    c = field.coeffs
    rev = c
    for ax in _fft_axes(field.grid):
        rev = np.roll(np.flip(rev, axis=ax), 1, axis=ax)
    top = float(np.max(np.abs(rev - np.conj(c))))
    scale = float(np.max(np.abs(c)))
    return top / scale if scale > 0 else 0.0


def tail_mass(field: SpectralField, octaves: int = 3) -> float:
    """Fraction of squared mass at frequencies within `octaves` of Nyquist."""
    cutoff = field.grid.nyquist / 2 ** octaves
    xi = freq_norm(field.grid)
    power = np.abs(field.coeffs) ** 2
    if field.ncomp is not None:
        power = power.sum(axis=0)
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    return float(power[xi >= cutoff].sum()) / total


def _k_indices(grid: GridSpec):
    k = np.fft.fftfreq(grid.n, d=1.0 / grid.n).astype(int)
    if grid.d == 1:
        return (k,)
    return tuple(np.meshgrid(k, k, indexing="ij"))


_BIN_MAGIC = b"SPF1"
_BIN_HEADER = "<4sIIdI"  # magic, d, n, length, ncomp (0 for scalar)


def save_field(field: SpectralField, path) -> None:
    """Write a field to .csv (k indices, re, im) or .bin (little-endian).

    Binary layout: header struct '<4sIIdI' = magic b'SPF1', uint32 d, uint32
    n, float64 length, uint32 ncomp (0 for scalar), followed by the raw
    C-order complex128 little-endian coefficient array.
    """
    path = Path(path)
    ncomp = field.ncomp or 0
    if path.suffix == ".bin":
        with open(path, "wb") as fh:
            fh.write(struct.pack(_BIN_HEADER, _BIN_MAGIC, field.grid.d,
                                 field.grid.n, field.grid.length, ncomp))
            fh.write(np.ascontiguousarray(field.coeffs.astype("<c16")).tobytes())
        return
    if path.suffix == ".csv":
        ks = _k_indices(field.grid)
        comp_range = range(ncomp) if ncomp else (None,)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "# wavedisp-field", f"d={field.grid.d}", f"n={field.grid.n}",
                f"length={field.grid.length!r}", f"ncomp={ncomp}",
            ])
            for comp in comp_range:
                block = field.coeffs if comp is None else field.coeffs[comp]
                for idx in np.ndindex(field.grid.shape):
                    row = [0 if comp is None else comp]
                    row += [int(ks[ax][idx]) for ax in range(field.grid.d)]
                    row += [format(block[idx].real, ".17g"), format(block[idx].imag, ".17g")]
                    writer.writerow(row)
        return
    raise ValueError("field path must end in .csv or .bin")


def load_field(path) -> SpectralField:
    path = Path(path)
    if path.suffix == ".bin":
        with open(path, "rb") as fh:
            head = fh.read(struct.calcsize(_BIN_HEADER))
            magic, d, n, length, ncomp = struct.unpack(_BIN_HEADER, head)
            if magic != _BIN_MAGIC:
                raise ValueError(f"not a wavedisp field file: {path}")
            grid = GridSpec(d, n, length)
            shape = grid.shape if ncomp == 0 else (ncomp,) + grid.shape
            data = np.frombuffer(fh.read(), dtype="<c16").reshape(shape)
        return SpectralField(grid, data.astype(complex))
    if path.suffix == ".csv":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            meta = dict(item.split("=", 1) for item in header[1:])
            grid = GridSpec(int(meta["d"]), int(meta["n"]), float(meta["length"]))
            ncomp = int(meta["ncomp"])
            shape = grid.shape if ncomp == 0 else (ncomp,) + grid.shape
            coeffs = np.zeros(shape, dtype=complex)
            for row in reader:
                comp = int(row[0])
                ks = tuple(int(v) % grid.n for v in row[1:1 + grid.d])
                val = complex(float(row[-2]), float(row[-1]))
                if ncomp == 0:
                    coeffs[ks] = val
                else:
                    coeffs[(comp,) + ks] = val
        return SpectralField(grid, coeffs)
    raise ValueError("field path must end in .csv or .bin")
