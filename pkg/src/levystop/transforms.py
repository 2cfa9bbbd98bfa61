"""Jump-mark transforms: E[e^{-sZ}], E[(1-Z)^k], E[Z], E[ln(1-Z)].

Closed forms where the law admits one, adaptive quadrature (relative
tolerance 1e-10) otherwise:

  Laplace   Gamma(a, b): (b/(b+s))^a      Exponential(rho): rho/(rho+s)
            PointMass(z): e^{-sz}         Tabulated: sum w_i e^{-s z_i}
  Power     Beta(c, d):  B(c, d+k)/B(c, d), evaluated in log-gamma
            PointMass(z): (1-z)^k         Tabulated: sum w_i (1-z_i)^k

The power and log transforms are defined only for marks inside [0, 1)
(geometric-family laws); asking for them on wider support is a contract
violation, not a numerical failure.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special, stats

from .errors import BadSupport, DivergentTransform
from .model import (
    BetaJumps,
    ExponentialJumps,
    GammaJumps,
    JumpDist,
    PointMassJumps,
    TabulatedJumps,
)

__all__ = ["laplace_transform", "power_transform", "mean_jump", "log_one_minus_mean"]

_QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-10, limit=200)


def _quad(fn, lo: float, hi: float, weight_pdf) -> float:
    out = integrate.quad(lambda z: fn(z) * weight_pdf(z), lo, hi,
                         full_output=True, **_QUAD_OPTS)
    val, abserr = out[0], out[1]
    if len(out) > 3 or not math.isfinite(val):
        raise DivergentTransform("transform quadrature did not converge")
    if abserr > 1e-8 * max(1.0, abs(val)):
        raise DivergentTransform("transform quadrature above tolerance")
    return val


def _unit_support(dist: JumpDist, what: str) -> None:
    if dist.support[0] < 0 or not dist.unit_marks():
        raise BadSupport(f"{what} needs jump support inside [0, 1)")


def laplace_transform(dist: JumpDist, s: float) -> float:
    """E[e^{-sZ}]. Finite for all s >= 0; divergent past the analytic strip."""
    if isinstance(dist, GammaJumps):
        if s <= -dist.rate:
            raise DivergentTransform(f"gamma Laplace transform diverges at s = {s}")
        return (dist.rate / (dist.rate + s)) ** dist.shape
    if isinstance(dist, ExponentialJumps):
        if s <= -dist.rate:
            raise DivergentTransform(f"exponential Laplace transform diverges at s = {s}")
        return dist.rate / (dist.rate + s)
    if isinstance(dist, PointMassJumps):
        return math.exp(-s * dist.z)
    if isinstance(dist, TabulatedJumps):
        return float(np.dot(dist.weights, np.exp(-s * np.asarray(dist.nodes))))
    # Beta has no elementary Laplace transform; integrate against the density
    pdf = stats.beta(dist.c, dist.d).pdf
    return _quad(lambda z: math.exp(-s * z), 0.0, 1.0, pdf)


def power_transform(dist: JumpDist, k: float) -> float:
    """E[(1-Z)^k] for marks in [0, 1)."""
    _unit_support(dist, "power transform")
    if isinstance(dist, BetaJumps):
        if dist.d + k <= 0:
            raise DivergentTransform(f"beta power transform diverges at k = {k}")
        return math.exp(special.betaln(dist.c, dist.d + k) - special.betaln(dist.c, dist.d))
    if isinstance(dist, PointMassJumps):
        return (1.0 - dist.z) ** k
    if isinstance(dist, TabulatedJumps):
        return float(np.dot(dist.weights, (1.0 - np.asarray(dist.nodes)) ** k))
    raise TypeError(f"unregistered jump distribution {type(dist).__name__}")


def mean_jump(dist: JumpDist) -> float:
    """mbar = E[Z]."""
    return dist.mean()


def log_one_minus_mean(dist: JumpDist) -> float:
    """E[ln(1-Z)] for marks in [0, 1); Beta(c, d) gives digamma(d) - digamma(c+d)."""
    _unit_support(dist, "log transform")
    if isinstance(dist, BetaJumps):
        return float(special.digamma(dist.d) - special.digamma(dist.c + dist.d))
    if isinstance(dist, PointMassJumps):
        return math.log1p(-dist.z)
    if isinstance(dist, TabulatedJumps):
        return float(np.dot(dist.weights, np.log1p(-np.asarray(dist.nodes))))
    raise TypeError(f"unregistered jump distribution {type(dist).__name__}")
