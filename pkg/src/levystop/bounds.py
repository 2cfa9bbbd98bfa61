"""Diffusion sandwich bounds and jump-risk-adjusted quantities.

Replacing the jumps by their compensator leaves a continuous diffusion
with the same compensated drift; discounting it at r overprices the
claim and discounting at r + lambda underprices it:

    V~_{r+lambda}(x) <= V_lambda(x) <= V~_r(x)

with thresholds ordered the same way. Three scalar adjustments each
collapse the jump model onto a continuous one that shares k1:

  theta* = r + lambda (1 - E[transform at k1])   adjusted discount
  mu~    = drift + (lambda/k1) E[transform at k1]  adjusted drift
           (continuous root at r + lambda reproduces k1)
  mu^    = r/k1 per unit state: the growth rate of the deterministic
           flow whose optimally timed payoff reproduces V exactly,
           stopped after t* = (1/r) ln(psi(x*)/psi(x)).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .errors import DomainError, SolverError
from .model import Family, Model, Payoff, break_even
from .roots import continuous_root, solve_k1
from .stopping import ThresholdSolution, solve_threshold, value_fn
from .transforms import laplace_transform, power_transform

__all__ = [
    "SandwichReport",
    "sandwich",
    "adjusted_discount",
    "adjusted_drift",
    "certainty_growth",
    "certainty_time",
]


@dataclass(frozen=True)
class SandwichReport:
    """Jump solution plus its two continuous-diffusion envelopes."""

    k1: float
    k_low: float            # quadratic root at theta = r (smallest exponent)
    k_high: float           # quadratic root at theta = r + lambda
    x_star: float
    x_star_low: float       # threshold of the r + lambda comparison problem
    x_star_high: float      # threshold of the r comparison problem
    theta_star: float
    mu_tilde: float
    grid: np.ndarray
    v_low: np.ndarray
    v: np.ndarray
    v_high: np.ndarray

    solution: ThresholdSolution


def _transform_at_root(model: Model, k1: float) -> float:
    if model.jump_intensity == 0.0 or model.jump_dist is None:
        return 1.0
    if model.family is Family.ARITHMETIC:
        return laplace_transform(model.jump_dist, model.jump_scale * k1)
    return power_transform(model.jump_dist, k1)


def adjusted_discount(model: Model, k1: float) -> float:
    """theta* in (r, r + lambda]: the discount a continuous diffusion with the
    compensated drift must carry to share the exponent k1."""
    lam = model.jump_intensity
    return model.discount + lam * (1.0 - _transform_at_root(model, k1))


def adjusted_drift(model: Model, k1: float) -> float:
    """Compensated drift enlarged so the root at r + lambda is k1.

    Arithmetic: mu + gamma lambda mbar + (lambda/k1) E[e^{-gamma k1 Z}].
    Geometric: the same correction applied to alpha + lambda mbar (the
    per-unit drift coefficient).
    """
    lam = model.jump_intensity
    if lam == 0.0:
        return model.compensated_drift
    return model.compensated_drift + (lam / k1) * _transform_at_root(model, k1)


def certainty_growth(model: Model, k1: float, x: float | None = None) -> float:
    """mu^ = r/k1 (arithmetic) or r x/k1 (geometric at state x)."""
    model.require_positive_discount()
    if k1 <= 0:
        raise SolverError("certainty growth needs k1 > 0")
    rate = model.discount / k1
    if model.family is Family.ARITHMETIC:
        return rate
    if x is None:
        raise DomainError("geometric certainty growth is state-dependent; pass x")
    if x <= 0:
        raise DomainError("geometric state must be positive")
    return rate * x


def certainty_time(model: Model, k1: float, x: float, x_star: float) -> float:
    """t* = (1/r) ln(psi(x*)/psi(x))^+: deterministic ride time to the threshold."""
    model.require_positive_discount()
    if x >= x_star:
        return 0.0
    if model.family is Family.ARITHMETIC:
        gap = k1 * (x_star - x)
    else:
        if x <= 0:
            raise DomainError("geometric state must be positive")
        gap = k1 * log(x_star / x)
    return gap / model.discount


def _default_grid(model: Model, payoff: Payoff, x_star_high: float, n: int) -> np.ndarray:
    x0 = break_even(payoff)
    if model.family is Family.ARITHMETIC:
        lo = x0 - 5.0
    else:
        lo = 0.5 * x0
    return np.linspace(lo, 1.5 * x_star_high, n)


def sandwich(model: Model, payoff: Payoff, grid: np.ndarray | None = None,
             n: int = 200) -> SandwichReport:
    """Solve the jump problem and its two continuous envelopes on a grid.

    The ordering v_low <= v <= v_high and the threshold ordering are
    asserted pointwise to 1e-10; a violation means a solver bug, not a
    statistical excursion, so it raises.
    """
    root = solve_k1(model)
    sol = solve_threshold(model, payoff, root)
    k_low, k_high = root.bracket_low, root.bracket_high
    sol_high = solve_threshold(model, payoff, k_low)    # discount r: upper value
    sol_low = solve_threshold(model, payoff, k_high)    # discount r + lambda: lower value

    if not (sol_low.x_star <= sol.x_star + 1e-9 and sol.x_star <= sol_high.x_star + 1e-9):
        raise SolverError("sandwich threshold ordering violated")

    if grid is None:
        grid = _default_grid(model, payoff, sol_high.x_star, n)
    grid = np.asarray(grid, dtype=float)
    if model.family is Family.GEOMETRIC:
        grid = grid[grid >= 0.0]

    v = np.atleast_1d(value_fn(sol, grid))
    v_low = np.atleast_1d(value_fn(sol_low, grid))
    v_high = np.atleast_1d(value_fn(sol_high, grid))
    worst = float(np.max(np.maximum(v_low - v, v - v_high), initial=-np.inf))
    if worst > 1e-10:
        raise SolverError(f"sandwich ordering violated by {worst:.3g}")

    return SandwichReport(
        k1=root.k1,
        k_low=k_low,
        k_high=k_high,
        x_star=sol.x_star,
        x_star_low=sol_low.x_star,
        x_star_high=sol_high.x_star,
        theta_star=adjusted_discount(model, root.k1),
        mu_tilde=adjusted_drift(model, root.k1),
        grid=grid,
        v_low=v_low,
        v=v,
        v_high=v_high,
        solution=sol,
    )
