"""Space-time estimate probes for the localized free evolution.

The homogeneous bound under test reads

    || S(t) f_lam ||_{L^q_T L^r_x}  <=  C * c(d, beta, lam)^(2/(q d)) * ||f_lam||_{L^2}

for admissible pairs 2/q + d/r = d/2 (q > 2), with c the localized decay
constant.  The module measures the ratio of the two sides over ensembles of
random annulus-localized fields, and probes the bilinear convolution bounds
used by the quadratic water-wave nonlinearity, including the support
constraint that the dyadic interaction (lam0, lam1, lam2) vanishes unless
the two largest scales are comparable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dispersion import SymbolParams, decay_constant, jbracket
from .dyadic import project, scale_value
from .spectral import (
    MixedNormSpec,
    SpectralField,
    apply_multiplier,
    field_from_values,
    field_values,
    l2_norm,
    mixed_norm,
    propagate,
    riesz_divergence,
    riesz_vector,
)

__all__ = [
    "admissible",
    "strichartz_prefactor",
    "strichartz_ratio",
    "xnorm_space_exponent",
    "xnorm_surrogate",
    "in_interaction_set",
    "bilinear_product",
    "bilinear_ratio",
    "projected_product_ratio",
    "INTERACTION_BAND",
]

# "comparable" for dyadic triples: ratio of the two largest scales in [1/4, 4].
INTERACTION_BAND = 4.0


def admissible(d: int, q, r) -> bool:
    """Exact check of q > 2, r >= 2 and 2/q + d/r = d/2."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    q_inf = math.isinf(q)
    r_inf = math.isinf(r)
    if not q_inf and q <= 2:
        return False
    if not r_inf and r < 2:
        return False
    lhs = Fraction(0)
    if not q_inf:
        lhs += Fraction(2) / Fraction(q).limit_denominator(10 ** 9)
    if not r_inf:
        lhs += Fraction(d) / Fraction(r).limit_denominator(10 ** 9)
    return lhs == Fraction(d, 2)


def strichartz_prefactor(d: int, beta: int, scale, q: float) -> float:
    """c(d, beta, lam)^(2/(q d)), the scale weight of the homogeneous bound."""
    lam = scale_value(scale)
    return decay_constant(SymbolParams(beta), d, lam) ** (2.0 / (q * d))


def strichartz_ratio(d: int, beta: int, scale, q: float, r: float,
                     horizon: float, samples: Sequence[SpectralField],
                     n_t: int = 33) -> float:
    """Max over samples of the measured/allowed ratio of the homogeneous bound.

    Each sample is projected onto the annulus of `scale` first; samples whose
    projection vanishes are skipped.  The trajectory is sampled at n_t uniform
    times on [0, horizon].
    """
    if not admissible(d, q, r):
        raise ValueError(f"(q, r) = ({q}, {r}) is not admissible in dimension {d}")
    if not samples:
        raise ValueError("need at least one sample field")
    lam = scale_value(scale)
    pref = strichartz_prefactor(d, beta, lam, q)
    spec = MixedNormSpec(q=q, r=r, horizon=horizon, n_t=n_t)
    times = np.linspace(0.0, horizon, n_t)
    best = 0.0
    for f in samples:
        if f.grid.d != d:
            raise ValueError("sample grid dimension does not match d")
        floc = project(f, lam)
        denom = l2_norm(floc)
        if denom == 0.0:
            continue
        trajectory = [propagate(floc, beta, float(t), sign=1) for t in times]
        best = max(best, mixed_norm(trajectory, spec) / (pref * denom))
    if best == 0.0:
        raise ValueError("all samples project to zero on the requested annulus")
    return best


# ----------------------------------------------------------------------
# Bilinear probes.
# ----------------------------------------------------------------------

def xnorm_space_exponent(d: int, q: float) -> float:
    """Space exponent r = 2qd / (qd - 4) paired with q in the iteration norm."""
    if q * d <= 4:
        raise ValueError("need q*d > 4 for the paired space exponent")
    return 2.0 * q * d / (q * d - 4.0)


def xnorm_surrogate(trajectory: Sequence[SpectralField], scale, q: float,
                    horizon: float) -> float:
    """Computable stand-in for the dyadic iteration norm of a trajectory.

    Takes the larger of sup_t ||P_lam u||_{L^2} and the weighted space-time
    norm <lam>^(-3/(2q)) ||P_lam u||_{L^q_T L^r} with the paired exponent r.
    """
    lam = scale_value(scale)
    d = trajectory[0].grid.d
    r = xnorm_space_exponent(d, q)
    loc = [project(f, lam) for f in trajectory]
    sup_l2 = max(l2_norm(f) for f in loc)
    spec = MixedNormSpec(q=q, r=r, horizon=horizon, n_t=len(loc))
    weighted = jbracket(lam) ** (-1.5 / q) * mixed_norm(loc, spec)
    return max(sup_l2, weighted)


def in_interaction_set(scale0, scale1, scale2) -> bool:
    """True when the two largest of the three scales are within a factor 4."""
    lams = sorted(scale_value(s) for s in (scale0, scale1, scale2))
    return lams[2] / lams[1] <= INTERACTION_BAND


def _pointwise_product(a: SpectralField, b: SpectralField) -> SpectralField:
    """Bilinear physical-space product; vector inputs contract componentwise."""
    if a.grid != b.grid:
        raise ValueError("mismatched grids")
    va = field_values(a)
    vb = field_values(b)
    if a.ncomp is None and b.ncomp is None:
        prod = va * vb
    elif a.ncomp is not None and b.ncomp is not None:
        prod = np.sum(va * vb, axis=0)
    else:
        prod = va * vb  # scalar broadcasts over the stacked components
    return field_from_values(a.grid, prod)


def bilinear_product(variant: int, u: SpectralField, v: SpectralField,
                     scale0) -> SpectralField:
    """One dyadic block of the quadratic nonlinearity at a single time.

    variant 1:  |D| K  P_lam0  R . ( u  R sqrt(K) v )
    variant 2:  |D| sqrt(K)  P_lam0 ( R sqrt(K) u  .  R sqrt(K) v )

    Inputs are scalar fields already localized to their own annuli.
    """
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    if variant == 1:
        w = riesz_vector(apply_multiplier(v, "sqrt_whitham"))
        mixed = _pointwise_product(u, w)
        scalar = riesz_divergence(project(mixed, scale0))
        return apply_multiplier(apply_multiplier(scalar, "whitham"), "abs_freq")
    a = riesz_vector(apply_multiplier(u, "sqrt_whitham"))
    b = riesz_vector(apply_multiplier(v, "sqrt_whitham"))
    scalar = project(_pointwise_product(a, b), scale0)
    return apply_multiplier(apply_multiplier(scalar, "sqrt_whitham"), "abs_freq")


def projected_product_ratio(variant: int, u: SpectralField, v: SpectralField,
                            scale0, scale1, scale2) -> float:
    """||P_lam0 (block)|| / ||block|| for the support-vanishing check."""
    u1 = project(u, scale1)
    v2 = project(v, scale2)
    if variant == 1:
        w = riesz_vector(apply_multiplier(v2, "sqrt_whitham"))
        raw = _pointwise_product(u1, w)
        raw = riesz_divergence(raw)
    else:
        raw = _pointwise_product(
            riesz_vector(apply_multiplier(u1, "sqrt_whitham")),
            riesz_vector(apply_multiplier(v2, "sqrt_whitham")),
        )
    denom = l2_norm(raw)
    if denom == 0.0:
        return 0.0
    return l2_norm(project(raw, scale0)) / denom


def bilinear_ratio(variant: int, d: int, scale0, scale1, scale2, q: float,
                   horizon: float, u_samples: Sequence[SpectralField],
                   v_samples: Sequence[SpectralField], n_t: int = 17) -> float:
    """Max measured/allowed ratio of the dyadic bilinear bound.

    The allowed size is

      variant 1:  T^(1-1/q) min(<l1>, <l2>)^(d/2 - 1/(2q)) / <l2>^(1/2) * X1 * X2
      variant 2:  T^(1-1/q) <l0>^(1/2) min(<l1>, <l2>)^(d/2 - 1/(2q))
                             / (<l1>^(1/2) <l2>^(1/2)) * X1 * X2

    with X1, X2 the iteration-norm surrogates of the freely evolved inputs.
    Triples with the two largest scales separated by more than a factor 4
    are rejected, since the block vanishes identically there.
    """
    if not in_interaction_set(scale0, scale1, scale2):
        raise ValueError("scale triple lies outside the interaction set")
    if len(u_samples) != len(v_samples) or not u_samples:
        raise ValueError("need matching nonempty sample lists")
    l0, l1, l2 = (scale_value(s) for s in (scale0, scale1, scale2))
    times = np.linspace(0.0, horizon, n_t)
    dt = horizon / (n_t - 1)
    min_br = min(jbracket(l1), jbracket(l2)) ** (0.5 * d - 0.5 / q)
    if variant == 1:
        allowed_scale = min_br / math.sqrt(jbracket(l2))
    else:
        allowed_scale = (math.sqrt(jbracket(l0)) * min_br
                         / math.sqrt(jbracket(l1) * jbracket(l2)))
    allowed_scale *= horizon ** (1.0 - 1.0 / q)

    best = 0.0
    for u0, v0 in zip(u_samples, v_samples):
        u_loc = project(u0, l1)
        v_loc = project(v0, l2)
        if l2_norm(u_loc) == 0.0 or l2_norm(v_loc) == 0.0:
            continue
        u_traj = [propagate(u_loc, 0, float(t), sign=1) for t in times]
        v_traj = [propagate(v_loc, 0, float(t), sign=1) for t in times]
        lhs_t = np.array([
            l2_norm(bilinear_product(variant, ut, vt, l0))
            for ut, vt in zip(u_traj, v_traj)
        ])
        lhs = float(np.trapezoid(lhs_t, dx=dt))
        x1 = xnorm_surrogate(u_traj, l1, q, horizon)
        x2 = xnorm_surrogate(v_traj, l2, q, horizon)
        best = max(best, lhs / (allowed_scale * x1 * x2))
    if best == 0.0:
        raise ValueError("all sample pairs vanish on the requested annuli")
    return best
