"""Model and payoff types for spectrally negative jump diffusions.

Two parametric families share one interface. State X_t, jump marks
Z_i >= 0 iid with law m, jump epochs Poisson(lambda), W a Brownian
motion independent of the jumps:

  arithmetic   X_t = x + (mu + gamma*lambda*mbar) t + sigma W_t
                     - gamma * sum_{i<=N_t} Z_i
  geometric    X_t = x * exp((alpha - sigma^2/2 + lambda*mbar) t
                     + sigma W_t) * prod_{i<=N_t} (1 - Z_i)

with mbar = E[Z]. The compensated drift keeps E[X_t] growing at rate
mu (resp. alpha): downward jumps are paid for by a higher drift
between jumps. All jumps move the state down (spectrally negative),
which is what makes first passage upward continuous.

Payoffs g are nonnegative, nondecreasing, with a unique break-even
point x0 (g > 0 strictly above x0, g <= 0 at or below). Perpetual
claims pay g(X_tau) at a stopping time tau, discounted at rate r.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    BadJumpSupport,
    BadPayoff,
    InvalidModel,
    KinkPoint,
    NoBreakEven,
    NonPositiveVolatility,
    ZeroDiscountForThreshold,
)

__all__ = [
    "Family",
    "GammaJumps",
    "ExponentialJumps",
    "BetaJumps",
    "PointMassJumps",
    "TabulatedJumps",
    "JumpDist",
    "CappedCall",
    "PowerCall",
    "TabulatedPayoff",
    "Payoff",
    "Model",
    "validate",
    "payoff_eval",
    "payoff_deriv",
    "payoff_kinks",
    "break_even",
    "model_from_config",
    "model_to_config",
]

MAX_BREAKPOINTS = 64


class Family(str, enum.Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"


# ---------------------------------------------------------------------------
# jump mark distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaJumps:
    """Gamma(shape, rate) marks on (0, inf)."""

    shape: float
    rate: float

    def __post_init__(self) -> None:
        if not (self.shape > 0 and self.rate > 0):
            raise InvalidModel("gamma jump law needs shape > 0 and rate > 0")

    support = (0.0, np.inf)

    def unit_marks(self) -> bool:
        return False

    def mean(self) -> float:
        return self.shape / self.rate

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return gen.gamma(self.shape, 1.0 / self.rate, size)


@dataclass(frozen=True)
class ExponentialJumps:
    """Exponential(rate) marks, the shape = 1 gamma special case."""

    rate: float

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise InvalidModel("exponential jump law needs rate > 0")

    support = (0.0, np.inf)

    def unit_marks(self) -> bool:
        return False

    def mean(self) -> float:
        return 1.0 / self.rate

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return gen.exponential(1.0 / self.rate, size)


@dataclass(frozen=True)
class BetaJumps:
    """Beta(c, d) relative marks on (0, 1)."""

    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and self.d > 0):
            raise InvalidModel("beta jump law needs c > 0 and d > 0")

    support = (0.0, 1.0)

    def unit_marks(self) -> bool:
        # no atom at 1: every power moment is finite
        return True

    def mean(self) -> float:
        return self.c / (self.c + self.d)

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return gen.beta(self.c, self.d, size)


@dataclass(frozen=True)
class PointMassJumps:
    """Deterministic mark of size z."""

    z: float

    def __post_init__(self) -> None:
        if not self.z >= 0:
            raise InvalidModel("point mass mark must be nonnegative")

    @property
    def support(self) -> tuple[float, float]:
        return (self.z, self.z)

    def unit_marks(self) -> bool:
        return self.z < 1.0

    def mean(self) -> float:
        return self.z

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.z)


@dataclass(frozen=True)
class TabulatedJumps:
    """Finite discrete mark law: P[Z = nodes[i]] = weights[i]."""

    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        nodes = tuple(float(v) for v in self.nodes)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if len(nodes) == 0 or len(nodes) != len(weights):
            raise InvalidModel("tabulated jump law needs matching nonempty nodes/weights")
        if any(v < 0 for v in nodes):
            raise InvalidModel("tabulated jump nodes must be nonnegative")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
            raise InvalidModel("tabulated jump weights must be nonnegative and sum to 1")

    @property
    def support(self) -> tuple[float, float]:
        return (min(self.nodes), max(self.nodes))

    def unit_marks(self) -> bool:
        return max(self.nodes) < 1.0

    def mean(self) -> float:
        return float(np.dot(self.nodes, self.weights))

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        # inverse-CDF on the cumulative weights
        cdf = np.cumsum(self.weights)
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, gen.random(size), side="right")
        return np.asarray(self.nodes)[np.minimum(idx, len(self.nodes) - 1)]


JumpDist = GammaJumps | ExponentialJumps | BetaJumps | PointMassJumps | TabulatedJumps


# ---------------------------------------------------------------------------
# payoffs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CappedCall:
    """g(x) = (min(x, K) - I)^+ : a call on x struck at I, capped at K."""

    K: float
    I: float

    def __post_init__(self) -> None:
        if not (self.K > self.I):
            raise BadPayoff("capped call needs K > I")


@dataclass(frozen=True)
class PowerCall:
    """g(x) = (a x^b - K)^+ for x >= 0. Concave for b < 1, convex for b > 1."""

    a: float
    b: float
    K: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0 and self.K > 0):
            raise BadPayoff("power call needs a, b, K > 0")


@dataclass(frozen=True)
class TabulatedPayoff:
    """Monotone piecewise cubic through (breakpoints, values).

    PCHIP interpolation preserves monotonicity between the nodes. Below
    the first breakpoint the payoff is held constant at values[0], above
    the last it continues linearly with the terminal slope. At most 64
    breakpoints; values must be nondecreasing and cross zero so a unique
    break-even point exists.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    _spline: PchipInterpolator = field(init=False, repr=False, compare=False)
    _end_slope: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        bp = tuple(float(v) for v in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(bp) < 2 or len(bp) != len(vals):
            raise BadPayoff("tabulated payoff needs matching breakpoints/values, at least 2")
        if len(bp) > MAX_BREAKPOINTS:
            raise BadPayoff(f"tabulated payoff capped at {MAX_BREAKPOINTS} breakpoints")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise BadPayoff("breakpoints must be strictly increasing")
        if any(v2 < v1 for v1, v2 in zip(vals, vals[1:])):
            raise BadPayoff("tabulated payoff values must be nondecreasing")
        if vals[0] > 0:
            raise BadPayoff("tabulated payoff is positive everywhere: no break-even point")
        if vals[-1] <= 0:
            raise BadPayoff("tabulated payoff never becomes positive")
        spline = PchipInterpolator(np.asarray(bp), np.asarray(vals), extrapolate=False)
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_end_slope", float(spline.derivative()(bp[-1])))


Payoff = CappedCall | PowerCall | TabulatedPayoff


def payoff_eval(payoff: Payoff, x):
    """g(x), vectorized over x."""
    x = np.asarray(x, dtype=float)
    if isinstance(payoff, CappedCall):
        out = np.maximum(np.minimum(x, payoff.K) - payoff.I, 0.0)
    elif isinstance(payoff, PowerCall):
        out = np.maximum(payoff.a * np.power(np.maximum(x, 0.0), payoff.b) - payoff.K, 0.0)
    else:
        bp = payoff.breakpoints
        clipped = np.clip(x, bp[0], bp[-1])
        out = np.asarray(payoff._spline(clipped), dtype=float)
        out = np.where(x > bp[-1], payoff.values[-1] + payoff._end_slope * (x - bp[-1]), out)
    return out if out.ndim else float(out)


def payoff_kinks(payoff: Payoff) -> tuple[float, ...]:
    """Points where the one-sided derivatives of g differ."""
    if isinstance(payoff, CappedCall):
        return (payoff.I, payoff.K)
    if isinstance(payoff, PowerCall):
        x0 = break_even(payoff)
        # b = 1 joins with slope a on both sides only if K = 0; K > 0 always kinks
        return (x0,)
    kinks = []
    d = payoff._spline.derivative()
    if abs(float(d(payoff.breakpoints[0]))) > 1e-12:
        kinks.append(payoff.breakpoints[0])
    return tuple(kinks)


def payoff_deriv(payoff: Payoff, x: float, side: str = "right") -> float:
    """One-sided derivative g'(x). side is "left" or "right"."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    right = side == "right"
    if isinstance(payoff, CappedCall):
        if x < payoff.I or x > payoff.K:
            return 0.0
        if x == payoff.I:
            return 1.0 if right else 0.0
        if x == payoff.K:
            return 0.0 if right else 1.0
        return 1.0
    if isinstance(payoff, PowerCall):
        x0 = break_even(payoff)
        if x < x0 or (x == x0 and not right):
            return 0.0
        return payoff.a * payoff.b * x ** (payoff.b - 1.0)
    bp = payoff.breakpoints
    if x < bp[0] or (x == bp[0] and not right):
        return 0.0
    if x >= bp[-1]:
        return payoff._end_slope
    return float(payoff._spline.derivative()(x))


def break_even(payoff: Payoff) -> float:
    """The unique x0 with g > 0 strictly above and g <= 0 at or below."""
    if isinstance(payoff, CappedCall):
        return payoff.I
    if isinstance(payoff, PowerCall):
        return (payoff.K / payoff.a) ** (1.0 / payoff.b)
    bp, vals = payoff.breakpoints, payoff.values
    if vals[0] == 0.0:
        # flat-zero foot: break-even is the last zero of g
        idx = max(i for i, v in enumerate(vals) if v <= 0.0)
        lo, hi = bp[idx], bp[min(idx + 1, len(bp) - 1)]
    else:
        idx = max(i for i, v in enumerate(vals) if v <= 0.0)
        if idx == len(bp) - 1:
            raise NoBreakEven("tabulated payoff never becomes positive")
        lo, hi = bp[idx], bp[idx + 1]
    g = payoff._spline
    # bisection to 1e-12 on the containing segment
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Model:
    """Validated dynamics + discounting.

    drift is mu (arithmetic) or alpha (geometric); jump_scale is the
    arithmetic gamma >= 0 and is pinned to 1 for geometric dynamics,
    where the jump map is fixed at x -> x(1 - Z).
    """

    family: Family
    drift: float
    volatility: float
    jump_intensity: float
    jump_dist: JumpDist | None
    discount: float
    jump_scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if not self.volatility > 0:
            raise NonPositiveVolatility("volatility must be strictly positive")
        if self.jump_intensity < 0:
            raise InvalidModel("jump intensity must be nonnegative")
        if self.discount < 0:
            raise InvalidModel("discount rate must be nonnegative")
        if self.jump_intensity > 0 and self.jump_dist is None:
            raise InvalidModel("positive jump intensity needs a jump distribution")
        if self.family is Family.GEOMETRIC:
            object.__setattr__(self, "jump_scale", 1.0)
            if self.jump_dist is not None:
                if self.jump_dist.support[0] < 0 or not self.jump_dist.unit_marks():
                    raise BadJumpSupport(
                        "geometric dynamics need relative jumps inside [0, 1)"
                    )
        else:
            if self.jump_scale < 0:
                raise InvalidModel("jump scale must be nonnegative")
            if self.jump_dist is not None and self.jump_dist.support[0] < 0:
                raise BadJumpSupport("arithmetic jump marks must be nonnegative")

    @property
    def mean_jump(self) -> float:
        """mbar = E[Z], zero when there are no jumps."""
        return 0.0 if self.jump_dist is None else self.jump_dist.mean()

    @property
    def compensated_drift(self) -> float:
        """Drift between jumps: mu + gamma*lambda*mbar, or alpha + lambda*mbar."""
        if self.family is Family.ARITHMETIC:
            return self.drift + self.jump_scale * self.jump_intensity * self.mean_jump
        return self.drift + self.jump_intensity * self.mean_jump

    def require_positive_discount(self) -> None:
        if not self.discount > 0:
            raise ZeroDiscountForThreshold(
                "r = 0 only prices hitting events; thresholds need r > 0"
            )


def validate(model: Model, payoff: Payoff | None = None) -> Model:
    """Check cross-object invariants; returns the model unchanged.

    Model-only invariants already hold by construction. The extra check
    here is payoff/family pairing: fractional powers need a positive
    state, so PowerCall is geometric-only.
    """
    if payoff is not None:
        if isinstance(payoff, PowerCall) and model.family is Family.ARITHMETIC:
            raise BadPayoff("power payoffs require geometric dynamics (x > 0)")
        if model.family is Family.GEOMETRIC and break_even(payoff) <= 0:
            raise BadPayoff("geometric dynamics need a positive break-even point")
    return model


# ---------------------------------------------------------------------------
# JSON config wire format
# ---------------------------------------------------------------------------

_JUMP_KINDS = {
    "gamma": (GammaJumps, ("shape", "rate")),
    "exponential": (ExponentialJumps, ("rate",)),
    "beta": (BetaJumps, ("c", "d")),
    "point_mass": (PointMassJumps, ("z",)),
    "tabulated": (TabulatedJumps, ("nodes", "weights")),
}

_PAYOFF_KINDS = {
    "capped_call": (CappedCall, ("K", "I")),
    "power_call": (PowerCall, ("a", "b", "K")),
    "tabulated": (TabulatedPayoff, ("breakpoints", "values")),
}


def _build(kind: str, params: dict, table: dict, what: str):
    if kind not in table:
        raise InvalidModel(f"unknown {what} kind {kind!r}; expected one of {sorted(table)}")
    cls, names = table[kind]
    missing = [n for n in names if n not in params]
    extra = [n for n in params if n not in names]
    if missing or extra:
        raise InvalidModel(f"{what} {kind!r} params: missing {missing}, unexpected {extra}")
    return cls(**params)


def model_from_config(cfg: dict) -> tuple[Model, Payoff | None]:
    """Parse the JSON config dict into a validated (model, payoff) pair."""
    if not isinstance(cfg, dict):
        raise InvalidModel("config must be a JSON object")
    known = {"family", "drift", "volatility", "jump_scale", "lambda", "jump_dist", "r", "payoff"}
    extra = set(cfg) - known
    if extra:
        raise InvalidModel(f"unknown config keys: {sorted(extra)}")
    for key in ("family", "drift", "volatility", "r"):
        if key not in cfg:
            raise InvalidModel(f"config missing required key {key!r}")
    try:
        family = Family(cfg["family"])
    except ValueError:
        raise InvalidModel(f"unknown family {cfg['family']!r}") from None
    lam = float(cfg.get("lambda", 0.0))
    dist = None
    if cfg.get("jump_dist") is not None:
        jd = cfg["jump_dist"]
        dist = _build(jd.get("kind"), jd.get("params", {}), _JUMP_KINDS, "jump_dist")
    payoff = None
    if cfg.get("payoff") is not None:
        p = cfg["payoff"]
        payoff = _build(p.get("kind"), p.get("params", {}), _PAYOFF_KINDS, "payoff")
    model = Model(
        family=family,
        drift=float(cfg["drift"]),
        volatility=float(cfg["volatility"]),
        jump_intensity=lam,
        jump_dist=dist,
        discount=float(cfg["r"]),
        jump_scale=float(cfg.get("jump_scale", 1.0)),
    )
    return validate(model, payoff), payoff


def _dist_config(dist: JumpDist) -> dict:
    for kind, (cls, names) in _JUMP_KINDS.items():
        if type(dist) is cls:
            return {"kind": kind, "params": {n: getattr(dist, n) for n in names}}
    raise TypeError(f"unregistered jump distribution {type(dist).__name__}")


def _payoff_config(payoff: Payoff) -> dict:
    for kind, (cls, names) in _PAYOFF_KINDS.items():
        if type(payoff) is cls:
            return {"kind": kind, "params": {n: getattr(payoff, n) for n in names}}
    raise TypeError(f"unregistered payoff {type(payoff).__name__}")


def model_to_config(model: Model, payoff: Payoff | None = None) -> dict:
    """Normalized config echo: every key explicit, defaults filled in."""
    cfg = {
        "family": model.family.value,
        "drift": model.drift,
        "volatility": model.volatility,
        "jump_scale": model.jump_scale,
        "lambda": model.jump_intensity,
        "jump_dist": None if model.jump_dist is None else _dist_config(model.jump_dist),
        "r": model.discount,
        "payoff": None if payoff is None else _payoff_config(payoff),
    }
    return cfg
