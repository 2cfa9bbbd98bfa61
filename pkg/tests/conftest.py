"""Shared model fixtures for the reference parameterizations."""
from __future__ import annotations

import pytest

from levystop import (
    BetaJumps,
    CappedCall,
    Family,
    GammaJumps,
    Model,
    PowerCall,
)


def table1_model(sigma: float = 0.05, lam: float = 0.1) -> Model:
    """Arithmetic reference: mu = 0.04, r = 0.05, gamma = 1, Gamma(1,1) marks."""
    return Model(Family.ARITHMETIC, drift=0.04, volatility=sigma, jump_intensity=lam,
                 jump_dist=GammaJumps(1.0, 1.0), discount=0.05, jump_scale=1.0)


def table2_model(sigma: float = 0.05, lam: float = 0.1) -> Model:
    """Geometric convex regime: alpha = 0.03, r = 0.05, Beta(1.25, 5) marks."""
    return Model(Family.GEOMETRIC, drift=0.03, volatility=sigma, jump_intensity=lam,
                 jump_dist=BetaJumps(1.25, 5.0), discount=0.05)


def table3_model(sigma: float = 0.05, lam: float = 0.1) -> Model:
    """Geometric concave regime: alpha = 0.05, r = 0.03."""
    return Model(Family.GEOMETRIC, drift=0.05, volatility=sigma, jump_intensity=lam,
                 jump_dist=BetaJumps(1.25, 5.0), discount=0.03)


def fig2_model() -> Model:
    """Geometric: alpha = 0.025, sigma = 0.1, lambda = 0.02, r = 0.05."""
    return Model(Family.GEOMETRIC, drift=0.025, volatility=0.1, jump_intensity=0.02,
                 jump_dist=BetaJumps(1.25, 5.0), discount=0.05)


def fig3_model(sigma: float = 0.25) -> Model:
    """Geometric concave-figure setup: alpha = 0.04, r = 0.02, Beta(1.25, 2)."""
    return Model(Family.GEOMETRIC, drift=0.04, volatility=sigma, jump_intensity=0.01,
                 jump_dist=BetaJumps(1.25, 2.0), discount=0.02)


@pytest.fixture
def fig2():
    return fig2_model()


@pytest.fixture
def fig2_payoff():
    return PowerCall(1.0, 1.0, 1.0)


@pytest.fixture
def capped():
    return CappedCall(K=2.0, I=1.0)


# frozen roots, solved here once; values pinned by the independent
# bisection oracle in test_roots
FIG2_K1 = 1.7201413317334953
TABLE1_K1 = 0.6295591279614878  # sigma = 0.05, lambda = 0.1
