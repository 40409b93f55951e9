"""Reduced transport model: smoothed potential, position-dependent mass,
energy-dependent reduced potential and the tunneling threshold.

The reduction replaces the momentum-dependent smoothing by two space-only
profiles, a Gaussian-smoothed potential V(q) with width
sigma = sqrt(beta hbar^2 / (4 m)) and an inverse mass

    1/M(q) = 1/m - (beta^2 hbar^2 / (12 m^2)) V''(q),

where V'' is the second derivative of the smoothed potential. For the square
barrier both have closed error-function forms; for general potentials they
are computed as position-space convolutions with the Gaussian kernel and its
second derivative. The model is only meaningful while M(q) stays positive,
which is checked on a dense grid at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf

from .errors import DomainError, NonPositiveMass
from .physical import PhysicalParams
from .potential import (
    ClassicalPotential,
    SquareBarrier,
    asymptotic_level,
    classical_max,
    eval_classical,
    support_interval,
)
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_adaptive

SCAN_POINTS = 2001
CONVOLUTION_TAILS = 8.0  # Gaussian tail cut for convolution windows


@dataclass(frozen=True)
class LowMomentumModel:
    """Evaluator bundle for one (parameters, potential) pair.

    Construction verifies mass positivity on the evaluation domain and fails
    with NonPositiveMass otherwise, so downstream code can assume M(q) > 0.
    """

    params: PhysicalParams
    pot: ClassicalPotential
    smoothing_sigma: float = 0.0

    def __post_init__(self):
        sigma = math.sqrt(self.params.beta / (4.0 * self.params.m)) * self.params.hbar
        object.__setattr__(self, "smoothing_sigma", sigma)
        if self.params.hbar > 0:
            lo, hi = evaluation_domain(self)
            qs = np.linspace(lo, hi, SCAN_POINTS)
            for q in qs:
                val = _inverse_mass_unchecked(self, float(q))
                if val <= 0:
                    raise NonPositiveMass(
                        f"inverse mass {val:.4g} at q = {q:.4g}; "
                        "the reduced model is invalid at these parameters"
                    )


def evaluation_domain(model: LowMomentumModel):
    """Interval on which profiles are scanned; beyond it everything is
    within Gaussian-tail distance of its asymptotic value."""
    a, b = support_interval(model.pot)
    width = b - a
    pad = width + 6.0 * model.smoothing_sigma
    return a - pad, b + pad


def _gauss(s: float, sigma: float) -> float:
    return math.exp(-s * s / (2.0 * sigma * sigma)) / (math.sqrt(2.0 * math.pi) * sigma)


def _convolve(model: LowMomentumModel, q: float, kernel, cfg: QuadratureConfig) -> float:
    """Integral of kernel(q - q') * (V(q') - base) over the potential support."""
    sigma = model.smoothing_sigma
    a, b = support_interval(model.pot)
    lo = max(a, q - CONVOLUTION_TAILS * sigma)
    hi = min(b, q + CONVOLUTION_TAILS * sigma)
    if lo >= hi:
        return 0.0
    base = asymptotic_level(model.pot)

    def f(x: float) -> float:
        return kernel(q - x, sigma) * (eval_classical(model.pot, x) - base)

    return integrate_adaptive(f, lo, hi, cfg)


def smoothed_potential(model: LowMomentumModel, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Gaussian-smoothed potential V(q); the bare potential when hbar = 0."""
    params, pot = model.params, model.pot
    if params.hbar == 0:
        return eval_classical(pot, q)
    if isinstance(pot, SquareBarrier):
        s = math.sqrt(params.beta) * params.hbar
        c = math.sqrt(2.0 * params.m) / s
        return 0.5 * pot.v0 * (erf(c * (pot.l + q)) + erf(c * (pot.l - q)))
    return asymptotic_level(pot) + _convolve(model, q, _gauss, cfg)


def smoothed_gradient(model: LowMomentumModel, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """dV/dq; closed form for the square barrier, centered differences otherwise."""
    params, pot = model.params, model.pot
    if params.hbar == 0:
        raise DomainError("the bare potential is discontinuous; no gradient at hbar = 0")
    sigma = model.smoothing_sigma
    if isinstance(pot, SquareBarrier):
        w = 1.0 / (2.0 * sigma * sigma)
        c = pot.v0 / (math.sqrt(2.0 * math.pi) * sigma)
        return c * (math.exp(-w * (pot.l + q) ** 2) - math.exp(-w * (pot.l - q) ** 2))
    h = sigma / 100.0
    return (smoothed_potential(model, q + h, cfg) - smoothed_potential(model, q - h, cfg)) / (2.0 * h)


def _inverse_mass_unchecked(model: LowMomentumModel, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    params, pot = model.params, model.pot
    m = params.m
    if params.hbar == 0:
        return 1.0 / m
    if isinstance(pot, SquareBarrier):
        # two-Gaussian form of the closed expression; immune to cosh overflow
        w = 2.0 * m / (params.beta * params.hbar * params.hbar)
        c = (pot.v0 / (3.0 * params.hbar)) * math.sqrt(2.0 * params.beta / (math.pi * m))
        lp, lm = pot.l + q, pot.l - q
        return 1.0 / m + c * (lm * math.exp(-w * lm * lm) + lp * math.exp(-w * lp * lp))
    curvature = _convolve(model, q, _gauss_second_derivative, cfg)
    return 1.0 / m - params.beta**2 * params.hbar**2 / (12.0 * m * m) * curvature


def _gauss_second_derivative(s: float, sigma: float) -> float:
    s2 = sigma * sigma
    return (s * s - s2) / (s2 * s2) * _gauss(s, sigma)


def inverse_mass(model: LowMomentumModel, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """1/M(q). Raises NonPositiveMass when the reduced model breaks down."""
    val = _inverse_mass_unchecked(model, q, cfg)
    if val <= 0:
        raise NonPositiveMass(f"inverse mass {val:.4g} at q = {q:.4g}")
    return val


def mass(model: LowMomentumModel, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Position-dependent mass M(q) > 0."""
    return 1.0 / inverse_mass(model, q, cfg)


def inverse_mass_gradient(model: LowMomentumModel, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """d(1/M)/dq; closed form for the square barrier, centered differences otherwise."""
    params, pot = model.params, model.pot
    if params.hbar == 0:
        return 0.0
    sigma = model.smoothing_sigma
    if isinstance(pot, SquareBarrier):
        w = 1.0 / (2.0 * sigma * sigma)
        c = (pot.v0 / (3.0 * params.hbar)) * math.sqrt(2.0 * params.beta / (math.pi * params.m))
        lp, lm = pot.l + q, pot.l - q
        return c * (
            math.exp(-w * lm * lm) * (2.0 * w * lm * lm - 1.0)
            + math.exp(-w * lp * lp) * (1.0 - 2.0 * w * lp * lp)
        )
    h = sigma / 100.0
    return (
        _inverse_mass_unchecked(model, q + h, cfg) - _inverse_mass_unchecked(model, q - h, cfg)
    ) / (2.0 * h)


def vq_potential(model: LowMomentumModel, q: float, eps: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Reduced potential for Newtonian motion at conserved energy eps:
    (m/M(q)) (V(q) - eps) + eps. Equals the bare potential when hbar = 0."""
    m_inv = inverse_mass(model, q, cfg)
    v = smoothed_potential(model, q, cfg)
    return model.params.m * m_inv * (v - eps) + eps


def vq_gradient(model: LowMomentumModel, q: float, eps: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Spatial derivative of the reduced potential at fixed eps."""
    m = model.params.m
    m_inv = inverse_mass(model, q, cfg)
    v = smoothed_potential(model, q, cfg)
    return m * (smoothed_gradient(model, q, cfg) * m_inv + (v - eps) * inverse_mass_gradient(model, q, cfg))


def _grid_golden_max(f, lo: float, hi: float, n: int = SCAN_POINTS):
    """Dense grid argmax refined by golden-section search; returns (argmax, max)."""
    qs = np.linspace(lo, hi, n)
    vals = np.array([f(float(q)) for q in qs])
    i = int(vals.argmax())
    if i == 0 or i == n - 1:
        return float(qs[i]), float(vals[i])
    try:
        res = minimize_scalar(
            lambda x: -f(float(x)),
            bracket=(float(qs[i - 1]), float(qs[i]), float(qs[i + 1])),
            method="golden",
            options={"xtol": 1e-12},
        )
        if -res.fun >= vals[i]:
            return float(res.x), float(-res.fun)
    except ValueError:
        pass  # degenerate bracket (flat top); fall back to the grid point
    return float(qs[i]), float(vals[i])


class VqMax(NamedTuple):
    value: float        # closed-form barrier top of the reduced potential
    numeric_max: float  # grid plus golden-section maximum
    argmax: float       # location of the numeric maximum
    displaced: bool     # True when the maximum left the barrier center


def vq_max_square(model: LowMomentumModel, eps: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> VqMax:
    """Maximum of the reduced potential for a square barrier.

    The closed form evaluates the reduced potential at the barrier center.
    A numerical maximization runs alongside; the displaced flag trips when
    its argmax leaves the center by more than the scan resolution, which is
    the regime where the closed form stops being the true maximum.
    """
    pot = model.pot
    if not isinstance(pot, SquareBarrier):
        raise DomainError("closed-form barrier maximum applies to square barriers only")
    params = model.params
    if params.hbar == 0:
        return VqMax(value=pot.v0, numeric_max=pot.v0, argmax=0.0, displaced=False)
    center_mass_ratio = params.m * _inverse_mass_unchecked(model, 0.0)
    value = center_mass_ratio * (smoothed_potential(model, 0.0, cfg) - eps) + eps
    lo, hi = evaluation_domain(model)
    argmax, numeric_max = _grid_golden_max(lambda q: vq_potential(model, q, eps, cfg), lo, hi)
    resolution = (hi - lo) / (SCAN_POINTS - 1)
    return VqMax(value=value, numeric_max=numeric_max, argmax=argmax, displaced=abs(argmax) > resolution)


def tunneling_threshold(model: LowMomentumModel, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Smallest energy at which the reduced barrier no longer reflects.

    An energy eps clears the reduced potential everywhere exactly when it
    clears the smoothed potential everywhere (the mass factor scales the
    difference V - eps without changing its sign), so the threshold is the
    maximum of the smoothed potential. For the square barrier that is
    v0 erf(sqrt(2m) l / (sqrt(beta) hbar)); hbar = 0 gives back the bare
    barrier height.
    """
    params, pot = model.params, model.pot
    if params.hbar == 0:
        return classical_max(pot)
    if isinstance(pot, SquareBarrier):
        return pot.v0 * erf(math.sqrt(2.0 * params.m) * pot.l / (math.sqrt(params.beta) * params.hbar))
    lo, hi = evaluation_domain(model)
    _, peak = _grid_golden_max(lambda q: smoothed_potential(model, q, cfg), lo, hi)
    return peak
