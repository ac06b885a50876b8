"""Pseudo-spectral solver for the gravity Whitham-Boussinesq system.

The physical system couples surface elevation eta and a curl-free velocity v:

    eta_t + div v            = -K div(eta v),
    v_t   + K grad eta       = -K grad(|v|^2 / 2),

with the smoothing multiplier K = tanh|D| / |D| (so the linearized phase
speed is sqrt(K) and the dispersion relation is w(|xi|) = |xi| sqrt(K)).
The change of variables

    u_pm = eta / 2  -+  i (R . v) / (2 sqrt(K)),        R = |D|^(-1) grad,

diagonalizes the linear part into i d/dt u_pm = +- w(D) u_pm + B_pm, where
the quadratic terms (derived by substituting eta = u_+ + u_-,
v = -i sqrt(K) R (u_+ - u_-) into the system) are

    B_pm = -(i/2) K div(eta v)  +-  (1/4) |D| sqrt(K) (v . v).

Both products are computed pointwise in physical space with optional 2/3-rule
dealiasing.  Time stepping removes the stiff linear phase with an integrating
factor and applies classical RK4 to what remains (Lawson's scheme), so the
free flow is reproduced exactly; a Strang splitting is available as a
cross-check.  Blow-up (overflow or a norm explosion) stops the run and is
reported with the last valid time, which the existence-time experiment uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .spectral import (
    GridSpec,
    SpectralField,
    conjugate_symmetry_defect,
    field_from_values,
    field_values,
    freq_components,
    freq_norm,
    hs_norm,
    l2_norm,
    multiplier_values,
    tail_mass,
    zero_field,
)

__all__ = [
    "PhysicalState",
    "SolverState",
    "SolverConfig",
    "FrameDiagnostics",
    "RunResult",
    "BlowUpError",
    "to_diagonal",
    "from_diagonal",
    "curl_defect",
    "nonlinearity",
    "TimeStepper",
    "run",
    "initial_data",
    "validity_horizon",
    "DATA_GENERATORS",
]

INTEGRATORS = ("lawson_rk4", "strang")
DATA_GENERATORS = ("zero", "single_mode", "gaussian_bump", "random_smooth")


class BlowUpError(RuntimeError):
    """Raised internally when a step leaves the valid range."""


@dataclass
class PhysicalState:
    """Surface elevation and curl-free, mean-zero velocity at one time."""

    t: float
    eta: SpectralField
    vel: SpectralField

    def __post_init__(self):
        grid = self.eta.grid
        if self.eta.ncomp is not None:
            raise ValueError("eta must be a scalar field")
        if self.vel.grid != grid or self.vel.ncomp != grid.d:
            raise ValueError("velocity must have one component per dimension")


@dataclass
class SolverState:
    """Diagonalized pair (u_+, u_-) at one time."""

    t: float
    u_plus: SpectralField
    u_minus: SpectralField

    def __post_init__(self):
        if self.u_plus.grid != self.u_minus.grid:
            raise ValueError("mismatched grids")
        if self.u_plus.ncomp is not None or self.u_minus.ncomp is not None:
            raise ValueError("diagonal variables are scalar fields")


@dataclass
class SolverConfig:
    grid: GridSpec
    dt: float
    horizon: float
    integrator: str = "lawson_rk4"
    dealias: bool = True
    nonlinear: bool = True
    sobolev_s: float = 1.0
    out_every: int = 10
    keep_frames: str = "ends"  # "ends" or "all"
    blowup_factor: float = 1e6

    def __post_init__(self):
        if self.dt <= 0 or self.horizon < self.dt:
            raise ValueError("need dt > 0 and horizon >= dt")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if self.keep_frames not in ("ends", "all"):
            raise ValueError("keep_frames must be 'ends' or 'all'")
        if self.out_every < 1:
            raise ValueError("out_every must be >= 1")


@dataclass
class FrameDiagnostics:
    t: float
    eta_hs: float
    vel_hs: float
    total_hs: float
    tail_mass: float
    reality_defect: float
    curl_defect: float
    eta_mean: float
    l2_plus: float
    l2_minus: float


@dataclass
class RunResult:
    frames: list
    diagnostics: list
    blowup: bool = False
    blowup_time: float | None = None

    @property
    def final(self) -> SolverState:
        return self.frames[-1]


# ----------------------------------------------------------------------
# Diagonalizing transform.
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _tools(grid: GridSpec):
    xi = freq_norm(grid)
    comps = freq_components(grid)
    units = []
    for c in comps:
        u = np.zeros_like(xi)
        nz = xi > 0
        u[nz] = c[nz] / xi[nz]
        u.flags.writeable = False
        units.append(u)
    kval = multiplier_values(grid, "whitham")
    sqrtk = np.sqrt(kval)
    k_idx = np.fft.fftfreq(grid.n, d=1.0 / grid.n).astype(int)
    keep = np.abs(k_idx) <= grid.n // 3
    if grid.d == 1:
        mask = keep.astype(float)
    else:
        mask = (keep[:, None] & keep[None, :]).astype(float)
    for a in (kval, sqrtk, mask):
        a.flags.writeable = False
    return {"xi": xi, "units": tuple(units), "K": kval, "sqrtK": sqrtk,
            "dealias": mask}


def curl_defect(vel: SpectralField) -> float:
    """Relative size of the discrete curl of a vector field (0 in 1d)."""
    grid = vel.grid
    if grid.d == 1:
        return 0.0
    comps = freq_components(grid)
    curl = 1j * (comps[0] * vel.coeffs[1] - comps[1] * vel.coeffs[0])
    scale = float(np.sqrt(np.sum((freq_norm(grid) * np.abs(vel.coeffs)) ** 2)))
    if scale == 0.0:
        return 0.0
    return float(np.sqrt(np.sum(np.abs(curl) ** 2))) / scale


def to_diagonal(state: PhysicalState, tol: float = 1e-8) -> SolverState:
    """Map (eta, v) to (u_+, u_-); rejects velocities that are not curl-free
    and mean-zero beyond tol."""
    grid = state.eta.grid
    if curl_defect(state.vel) > tol:
        raise ValueError("velocity field is not curl-free")
    mean = float(np.max(np.abs(state.vel.coeffs[(slice(None),) + (0,) * grid.d])))
    vscale = float(np.max(np.abs(state.vel.coeffs)))
    if vscale > 0 and mean > tol * vscale:
        raise ValueError("velocity field must be mean-zero")
    tools = _tools(grid)
    rv = np.zeros(grid.shape, dtype=complex)
    for j in range(grid.d):
        rv += 1j * tools["units"][j] * state.vel.coeffs[j]
    half = 0.5 * state.eta.coeffs
    shift = 0.5j * rv / tools["sqrtK"]
    return SolverState(
        t=state.t,
        u_plus=SpectralField(grid, half - shift),
        u_minus=SpectralField(grid, half + shift),
    )


def from_diagonal(state: SolverState) -> PhysicalState:
    """Reconstruct (eta, v) = (u_+ + u_-, -i sqrt(K) R (u_+ - u_-))."""
    grid = state.u_plus.grid
    tools = _tools(grid)
    eta = state.u_plus.coeffs + state.u_minus.coeffs
    diff = state.u_plus.coeffs - state.u_minus.coeffs
    vel = np.stack([tools["sqrtK"] * tools["units"][j] * diff
                    for j in range(grid.d)])
    return PhysicalState(t=state.t, eta=SpectralField(grid, eta),
                         vel=SpectralField(grid, vel))


# ----------------------------------------------------------------------
# Nonlinearity.
# ----------------------------------------------------------------------

def _nonlinear_coeffs(grid: GridSpec, cp: np.ndarray, cm: np.ndarray,
                      dealias: bool):
    tools = _tools(grid)
    n_total = grid.n ** grid.d
    axes = tuple(range(-grid.d, 0))
    eta_c = cp + cm
    diff = cp - cm
    eta_x = np.fft.ifftn(eta_c, axes=axes) * n_total
    v_x = [np.fft.ifftn(tools["sqrtK"] * u * diff, axes=axes) * n_total
           for u in tools["units"]]
    mom_c = [np.fft.fftn(eta_x * vj, axes=axes) / n_total for vj in v_x]
    sq_c = np.fft.fftn(sum(vj * vj for vj in v_x), axes=axes) / n_total
    if dealias:
        mask = tools["dealias"]
        mom_c = [mask * mc for mc in mom_c]
        sq_c = mask * sq_c
    div_mom = sum(1j * comp * mc
                  for comp, mc in zip(freq_components(grid), mom_c))
    common = -0.5j * tools["K"] * div_mom
    quad = 0.25 * tools["xi"] * tools["sqrtK"] * sq_c
    return common + quad, common - quad


def nonlinearity(state: SolverState, dealias: bool = True):
    """Quadratic forcing pair (B_+, B_-) of the diagonalized system."""
    grid = state.u_plus.grid
    bp, bm = _nonlinear_coeffs(grid, state.u_plus.coeffs,
                               state.u_minus.coeffs, dealias)
    return SpectralField(grid, bp), SpectralField(grid, bm)


# ----------------------------------------------------------------------
# Time stepping.
# ----------------------------------------------------------------------

class TimeStepper:
    """Advances the diagonalized pair by a fixed step dt."""

    def __init__(self, cfg: SolverConfig):
        self.cfg = cfg
        grid = cfg.grid
        w = multiplier_values(grid, "omega", beta=0)
        h = cfg.dt
        # ph(tau) = exp(-i tau w) is the linear factor of u_+; u_- uses its
        # conjugate.  Lawson stages need tau = h/2 and tau = h.
        self._ph_half = np.exp(-0.5j * h * w)
        self._ph_full = self._ph_half * self._ph_half

    def _rhs(self, cp, cm):
        return _nonlinear_coeffs(self.cfg.grid, cp, cm, self.cfg.dealias)

    def _lawson_step(self, cp, cm):
        h = self.cfg.dt

        def gauge(ph, wp, wm):
            bp, bm = self._rhs(ph * wp, np.conj(ph) * wm)
            return -1j * np.conj(ph) * bp, -1j * ph * bm

        k1p, k1m = gauge(1.0, cp, cm)
        k2p, k2m = gauge(self._ph_half, cp + 0.5 * h * k1p, cm + 0.5 * h * k1m)
        k3p, k3m = gauge(self._ph_half, cp + 0.5 * h * k2p, cm + 0.5 * h * k2m)
        k4p, k4m = gauge(self._ph_full, cp + h * k3p, cm + h * k3m)
        wp = cp + h / 6.0 * (k1p + 2.0 * (k2p + k3p) + k4p)
        wm = cm + h / 6.0 * (k1m + 2.0 * (k2m + k3m) + k4m)
        return self._ph_full * wp, np.conj(self._ph_full) * wm

    def _strang_step(self, cp, cm):
        h = self.cfg.dt
        cp = self._ph_half * cp
        cm = np.conj(self._ph_half) * cm
        k1p, k1m = self._rhs(cp, cm)
        k2p, k2m = self._rhs(cp - 0.5j * h * k1p, cm - 0.5j * h * k1m)
        k3p, k3m = self._rhs(cp - 0.5j * h * k2p, cm - 0.5j * h * k2m)
        k4p, k4m = self._rhs(cp - 1j * h * k3p, cm - 1j * h * k3m)
        cp = cp - 1j * h / 6.0 * (k1p + 2.0 * (k2p + k3p) + k4p)
        cm = cm - 1j * h / 6.0 * (k1m + 2.0 * (k2m + k3m) + k4m)
        return self._ph_half * cp, np.conj(self._ph_half) * cm

    def step(self, state: SolverState) -> SolverState:
        grid = self.cfg.grid
        cp, cm = state.u_plus.coeffs, state.u_minus.coeffs
        if not self.cfg.nonlinear:
            cp, cm = self._ph_full * cp, np.conj(self._ph_full) * cm
        elif self.cfg.integrator == "lawson_rk4":
            cp, cm = self._lawson_step(cp, cm)
        else:
            cp, cm = self._strang_step(cp, cm)
        return SolverState(t=state.t + self.cfg.dt,
                           u_plus=SpectralField(grid, cp),
                           u_minus=SpectralField(grid, cm))


def diagnose(state: SolverState, s: float) -> FrameDiagnostics:
    phys = from_diagonal(state)
    eta_hs = hs_norm(phys.eta, s)
    vel_hs = hs_norm(phys.vel, s + 0.5)
    return FrameDiagnostics(
        t=state.t,
        eta_hs=eta_hs,
        vel_hs=vel_hs,
        total_hs=eta_hs + vel_hs,
        tail_mass=max(tail_mass(state.u_plus), tail_mass(state.u_minus)),
        reality_defect=max(conjugate_symmetry_defect(phys.eta),
                           conjugate_symmetry_defect(
                               SpectralField(phys.eta.grid, phys.vel.coeffs[0]))),
        curl_defect=curl_defect(phys.vel),
        eta_mean=float(phys.eta.coeffs[(0,) * phys.eta.grid.d].real),
        l2_plus=l2_norm(state.u_plus),
        l2_minus=l2_norm(state.u_minus),
    )


def run(initial, cfg: SolverConfig) -> RunResult:
    """Integrate to the horizon (or blow-up), collecting frame diagnostics.

    `initial` may be a PhysicalState (converted through the diagonalizing
    transform) or a SolverState.  Diagnostics are recorded every
    cfg.out_every steps; frames are kept per cfg.keep_frames.
    """
    if isinstance(initial, PhysicalState):
        state = to_diagonal(initial)
    elif isinstance(initial, SolverState):
        state = initial
    else:
        raise TypeError("initial must be a PhysicalState or SolverState")
    if state.u_plus.grid != cfg.grid:
        raise ValueError("initial state grid does not match the config grid")

    stepper = TimeStepper(cfg)
    n_steps = max(1, round(cfg.horizon / cfg.dt))
    d0 = diagnose(state, cfg.sobolev_s)
    frames = [state]
    diags = [d0]
    base = max(d0.total_hs, 1e-300)
    blowup = False

    for i in range(1, n_steps + 1):
        state = stepper.step(state)
        record = (i % cfg.out_every == 0) or (i == n_steps)
        if not record:
            continue
        if not np.all(np.isfinite(state.u_plus.coeffs)) or \
           not np.all(np.isfinite(state.u_minus.coeffs)):
            blowup = True
            break
        dg = diagnose(state, cfg.sobolev_s)
        if not math.isfinite(dg.total_hs) or dg.total_hs > cfg.blowup_factor * base:
            blowup = True
            break
        if cfg.keep_frames == "all":
            frames.append(state)
        else:
            frames = [frames[0], state]
        diags.append(dg)

    return RunResult(frames=frames, diagnostics=diags, blowup=blowup,
                     blowup_time=diags[-1].t if blowup else None)


# ----------------------------------------------------------------------
# Initial data and the existence-time experiment.
# ----------------------------------------------------------------------

def _grid_points(grid: GridSpec):
    ax = np.arange(grid.n) * grid.spacing
    if grid.d == 1:
        return (ax,)
    return tuple(np.meshgrid(ax, ax, indexing="ij"))


def _riesz_of_scalar(scalar: SpectralField) -> SpectralField:
    grid = scalar.grid
    tools = _tools(grid)
    vel = np.stack([1j * u * scalar.coeffs for u in tools["units"]])
    return SpectralField(grid, vel)


def initial_data(grid: GridSpec, name: str, *, seed: int = 0, size: float = 1.0,
                 s: float = 1.0, mode=None) -> PhysicalState:
    """Named curl-free initial states, rescaled to a prescribed data size.

    size is the target of ||eta||_{H^s} + ||v||_{H^(s+1/2)}; the "zero"
    generator ignores it.
    """
    if name not in DATA_GENERATORS:
        raise ValueError(f"unknown data generator {name!r}")
    if name == "zero":
        return PhysicalState(0.0, zero_field(grid), zero_field(grid, ncomp=grid.d))

    if name == "single_mode":
        k = mode if mode is not None else (1,) * grid.d
        coeffs = np.zeros(grid.shape, dtype=complex)
        idx = tuple(int(ki) % grid.n for ki in k)
        neg = tuple((-int(ki)) % grid.n for ki in k)
        coeffs[idx] = 0.5
        coeffs[neg] += 0.5
        eta = SpectralField(grid, coeffs)
        vel = zero_field(grid, ncomp=grid.d)
    elif name == "gaussian_bump":
        pts = _grid_points(grid)
        sigma = grid.length / 16.0
        sq = sum((p - 0.5 * grid.length) ** 2 for p in pts)
        eta = field_from_values(grid, np.exp(-0.5 * sq / sigma ** 2))
        stream = field_from_values(
            grid, np.exp(-0.5 * sum((p - 0.375 * grid.length) ** 2 for p in pts)
                         / sigma ** 2))
        vel = _riesz_of_scalar(stream)
    else:  # random_smooth
        rng = np.random.default_rng(seed)
        xi0 = grid.nyquist / 6.0
        envelope = np.exp(-((freq_norm(grid) / xi0) ** 2))
        eta_c = envelope * np.fft.fftn(rng.standard_normal(grid.shape),
                                       axes=tuple(range(-grid.d, 0))) / grid.n ** grid.d
        eta_c[(0,) * grid.d] = 0.0
        eta = SpectralField(grid, eta_c)
        g_c = envelope * np.fft.fftn(rng.standard_normal(grid.shape),
                                     axes=tuple(range(-grid.d, 0))) / grid.n ** grid.d
        vel = _riesz_of_scalar(SpectralField(grid, g_c))

    data_norm = hs_norm(eta, s) + hs_norm(vel, s + 0.5)
    if data_norm == 0.0:
        raise ValueError("degenerate initial data")
    factor = size / data_norm
    return PhysicalState(0.0, SpectralField(grid, eta.coeffs * factor),
                         SpectralField(grid, vel.coeffs * factor))


def validity_horizon(result: RunResult, factor: float = 2.0) -> float | None:
    """First time the data norm ||eta||_{H^s} + ||v||_{H^(s+1/2)} grows by
    `factor` (linear interpolation between frames); blow-up time if the run
    ended early, None if the norm never got there."""
    totals = np.array([dg.total_hs for dg in result.diagnostics])
    times = np.array([dg.t for dg in result.diagnostics])
    target = factor * totals[0]
    above = np.nonzero(totals >= target)[0]
    if above.size == 0:
        return result.blowup_time if result.blowup else None
    i = int(above[0])
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    y0, y1 = totals[i - 1], totals[i]
    if y1 == y0:
        return float(t1)
    return float(t0 + (t1 - t0) * (target - y0) / (y1 - y0))
