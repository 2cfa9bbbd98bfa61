"""Monte Carlo first-passage oracle, independent of the analytic route.

The skeleton is exact: between jump epochs (Poisson(lambda), sampled
exactly) the path is Brownian with the compensated drift, so each step
draws the true Gaussian increment over the step, in log space for the
geometric family. What a discrete skeleton misses is a crossing inside
a step that ends below the barrier; conditional on the endpoints that
happens with the Brownian bridge probability

    p = exp(-2 (y - x_t)(y - x_{t+h}) / (sigma^2 h))

and the engine flips a uniform against p on every step, so detection
of upward passage is exact and only the recorded crossing time carries
O(step) error (linear interpolation for overshoot, midpoint for a
bridge hit). Downward jumps cannot cross the barrier, which is the
spectral-negativity fact the whole analytic route rests on; crossings
from below are continuous and g(X_tau) = g(y) exactly.

Far from the barrier the step stretches: H solves
d = c_+ H + 7 sigma sqrt(H) for distance d, so a coarse step still has
~7 sigma of headroom and the bridge test keeps whatever tail remains.
Near the barrier the step floors at `step` (default 1e-2).

Determinism: paths are simulated in fixed chunks of 65536, each chunk
driven by its own Philox stream keyed (seed, chunk index), and chunk
results are aggregated in index order. Replays are bit-identical for a
given seed regardless of how chunks might be scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isfinite, log, sqrt

import numpy as np

from .errors import DomainError, InvalidModel
from .model import Family, Model, Payoff, payoff_eval

__all__ = [
    "MCEstimate",
    "PathResult",
    "GridSearchResult",
    "default_horizon",
    "simulate_to_threshold",
    "first_passage_times",
    "estimate_laplace",
    "policy_value",
    "threshold_grid_search",
]

CHUNK = 1 << 16
TERMINAL_DISCOUNT = 1e-4  # default horizon T solves e^{-rT} = this


@dataclass(frozen=True)
class MCEstimate:
    """Discounted first-passage estimate with its statistical contract."""

    mean: float
    stderr: float
    n_paths: int
    horizon: float
    truncation_bound: float
    seed: int


@dataclass(frozen=True)
class PathResult:
    """One simulated path: did it reach y, when, and where it ended."""

    hit: bool
    tau: float
    x_at_tau: float


@dataclass(frozen=True)
class GridSearchResult:
    thresholds: tuple[float, ...]
    estimates: tuple[MCEstimate, ...]
    best_y: float


def default_horizon(model: Model) -> float:
    """T with e^{-rT} = 1e-4; r = 0 has no finite default, pass one explicitly."""
    if model.discount <= 0:
        raise InvalidModel("r = 0 needs an explicit simulation horizon")
    return log(1.0 / TERMINAL_DISCOUNT) / model.discount


def _engine_setup(model: Model, x0: float, levels: np.ndarray):
    """Map state and barriers into engine space (identity or log)."""
    if model.family is Family.GEOMETRIC:
        if x0 <= 0 or np.any(levels <= 0):
            raise DomainError("geometric states and barriers must be positive")
        start = log(x0)
        elevels = np.log(levels)
        drift = model.drift - 0.5 * model.volatility ** 2 \
            + model.jump_intensity * model.mean_jump
    else:
        start = x0
        elevels = np.asarray(levels, dtype=float)
        drift = model.compensated_drift
    return start, elevels, drift


def _jump_shift(model: Model, gen: np.random.Generator, size: int) -> np.ndarray:
    z = model.jump_dist.sample(gen, size)
    if model.family is Family.GEOMETRIC:
        return np.log1p(-z)
    return -model.jump_scale * z


def _chunk_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=[seed, index])))


def _simulate_chunk(model: Model, gen: np.random.Generator, n: int, start: float,
                    levels: np.ndarray, drift: float, horizon: float,
                    step: float) -> tuple[np.ndarray, np.ndarray]:
    """tau matrix (n, len(levels)) plus terminal engine-space positions."""
    m = len(levels)
    sigma = model.volatility
    s2 = sigma * sigma
    lam = model.jump_intensity
    cpos = max(drift, 0.0)

    pos = np.full(n, start)
    t = np.zeros(n)
    ptr = np.zeros(n, dtype=np.int64)
    tau = np.full((n, m), np.inf)
    if lam > 0:
        next_jump = np.maximum(gen.exponential(1.0 / lam, n), 1e-300)
    else:
        next_jump = np.full(n, np.inf)

    hit0 = int(np.searchsorted(levels, start, side="right"))
    if hit0:
        tau[:, :hit0] = 0.0
        ptr[:] = hit0
    alive = np.full(n, hit0 < m)
    act = np.flatnonzero(alive)

    while act.size:
        p = pos[act]
        tt = t[act]
        lev = levels[ptr[act]]
        d = lev - p
        if cpos > 0:
            root = (np.sqrt(49.0 * s2 + 4.0 * cpos * d) - 7.0 * sigma) / (2.0 * cpos)
            H = root * root
        else:
            H = (d / (7.0 * sigma)) ** 2
        H = np.maximum(H, step)
        dt_jump = next_jump[act] - tt
        H = np.minimum(H, np.minimum(dt_jump, horizon - tt))
        jump_now = H >= dt_jump

        z = gen.standard_normal(act.size)
        u = gen.random(act.size)
        pnew = p + drift * H + sigma * np.sqrt(H) * z

        direct = pnew >= lev
        with np.errstate(divide="ignore"):
            crossed = direct | (np.log(u) < (-2.0 * d * (lev - pnew)) / (s2 * H))
        if np.any(crossed):
            sel = np.flatnonzero(crossed)
            gidx = act[sel]
            frac = np.where(direct[sel],
                            d[sel] / np.maximum(pnew[sel] - p[sel], 1e-300), 0.5)
            tau[gidx, ptr[gidx]] = tt[sel] + np.clip(frac, 0.0, 1.0) * H[sel]
            ptr[gidx] += 1
            # one wide step may overshoot several barriers
            sub = sel[direct[sel]]
            while sub.size:
                g2 = act[sub]
                ok = ptr[g2] < m
                sub, g2 = sub[ok], g2[ok]
                if not sub.size:
                    break
                lev2 = levels[ptr[g2]]
                over = pnew[sub] >= lev2
                sub, g2, lev2 = sub[over], g2[over], lev2[over]
                if not sub.size:
                    break
                frac2 = (lev2 - p[sub]) / np.maximum(pnew[sub] - p[sub], 1e-300)
                tau[g2, ptr[g2]] = tt[sub] + np.clip(frac2, 0.0, 1.0) * H[sub]
                ptr[g2] += 1

        if lam > 0 and np.any(jump_now):
            jsel = np.flatnonzero(jump_now)
            jidx = act[jsel]
            pnew[jsel] += _jump_shift(model, gen, jsel.size)
            next_jump[jidx] += np.maximum(gen.exponential(1.0 / lam, jsel.size), 1e-300)

        pos[act] = pnew
        t[act] = tt + H
        finished = (ptr[act] >= m) | (t[act] >= horizon * (1.0 - 1e-12))
        if np.any(finished):
            alive[act[finished]] = False
            act = np.flatnonzero(alive)

    return tau, pos


def first_passage_times(model: Model, x0: float, levels, n: int, seed: int,
                        horizon: float | None = None, step: float = 1e-2) -> np.ndarray:
    """First-passage times over each ascending barrier; inf where not reached.

    One shared path set serves every barrier (common random numbers), and
    tau is nondecreasing along each row by construction.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if np.any(np.diff(levels) <= 0):
        raise ValueError("barriers must be strictly increasing")
    if n <= 1:
        raise ValueError("need at least 2 paths")
    if horizon is None:
        horizon = default_horizon(model)
    start, elevels, drift = _engine_setup(model, x0, levels)
    chunks = []
    for index, lo in enumerate(range(0, n, CHUNK)):
        size = min(CHUNK, n - lo)
        gen = _chunk_stream(seed, index)
        tau, _ = _simulate_chunk(model, gen, size, start, elevels, drift, horizon, step)
        chunks.append(tau)
    return np.concatenate(chunks, axis=0)


def simulate_to_threshold(model: Model, x0: float, y: float, horizon: float,
                          rng: np.random.Generator, step: float = 1e-2) -> PathResult:
    """One path, caller-supplied stream. Crossing position is y exactly."""
    start, elevels, drift = _engine_setup(model, x0, np.asarray([y], dtype=float))
    tau, end = _simulate_chunk(model, rng, 1, start, elevels, drift, horizon, step)
    hit = isfinite(tau[0, 0])
    if hit:
        return PathResult(True, float(tau[0, 0]), float(y))
    x_end = float(np.exp(end[0])) if model.family is Family.GEOMETRIC else float(end[0])
    return PathResult(False, float("inf"), x_end)


def _estimate(values: np.ndarray, misses: np.ndarray, model: Model, horizon: float,
              seed: int, scale: float) -> MCEstimate:
    n = len(values)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / sqrt(n))
    trunc = float(np.exp(-model.discount * horizon) * misses.mean() * abs(scale))
    return MCEstimate(mean=mean, stderr=stderr, n_paths=n, horizon=horizon,
                      truncation_bound=trunc, seed=seed)


def estimate_laplace(model: Model, x: float, y: float, n: int, seed: int,
                     horizon: float | None = None, step: float = 1e-2) -> MCEstimate:
    """E[e^{-r tau_y}] from x; the analytic value is psi(x)/psi(y)."""
    if horizon is None:
        horizon = default_horizon(model)
    if x >= y:
        return MCEstimate(1.0, 0.0, n, horizon, 0.0, seed)
    tau = first_passage_times(model, x, [y], n, seed, horizon, step)[:, 0]
    miss = ~np.isfinite(tau)
    disc = np.where(miss, 0.0, np.exp(-model.discount * np.where(miss, 0.0, tau)))
    return _estimate(disc, miss, model, horizon, seed, 1.0)


def policy_value(model: Model, payoff: Payoff, x: float, y: float, n: int, seed: int,
                 horizon: float | None = None, step: float = 1e-2) -> MCEstimate:
    """Value of the stop-at-y policy: E[e^{-r tau_y} g(X_tau)] = g(y) E[e^{-r tau_y}].

    The factorization holds path by path: jumps are downward, so the
    barrier is crossed continuously and X_tau = y on every hit.
    """
    g = float(payoff_eval(payoff, y))
    if x >= y:
        h = horizon if horizon is not None else default_horizon(model)
        return MCEstimate(float(payoff_eval(payoff, x)), 0.0, n, h, 0.0, seed)
    base = estimate_laplace(model, x, y, n, seed, horizon, step)
    return MCEstimate(mean=g * base.mean, stderr=abs(g) * base.stderr,
                      n_paths=base.n_paths, horizon=base.horizon,
                      truncation_bound=abs(g) * base.truncation_bound, seed=seed)


def threshold_grid_search(model: Model, payoff: Payoff, x: float, thresholds, n: int,
                          seed: int, horizon: float | None = None,
                          step: float = 1e-2) -> GridSearchResult:
    """Estimate the stop-at-y value on a barrier grid with shared paths.

    Shared paths make neighboring estimates strongly positively
    correlated, so the argmax is far more stable than independent runs
    at the same n. Ties break toward the largest barrier.
    """
    thresholds = np.atleast_1d(np.asarray(thresholds, dtype=float))
    if horizon is None:
        horizon = default_horizon(model)
    tau = first_passage_times(model, x, thresholds, n, seed, horizon, step)
    gvals = np.atleast_1d(np.asarray(payoff_eval(payoff, thresholds), dtype=float))
    estimates = []
    for j, (y, g) in enumerate(zip(thresholds, gvals)):
        if x >= y:
            estimates.append(MCEstimate(g, 0.0, n, horizon, 0.0, seed))
            continue
        miss = ~np.isfinite(tau[:, j])
        disc = np.where(miss, 0.0, np.exp(-model.discount * np.where(miss, 0.0, tau[:, j])))
        estimates.append(_estimate(g * disc, miss, model, horizon, seed, g))
    means = np.array([e.mean for e in estimates])
    best = len(means) - 1 - int(np.argmax(means[::-1]))
    return GridSearchResult(thresholds=tuple(float(v) for v in thresholds),
                            estimates=tuple(estimates), best_y=float(thresholds[best]))
