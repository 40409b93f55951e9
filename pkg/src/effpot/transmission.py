"""Transmission and reflection coefficients, effective and exact quantum.

The effective coefficients are threshold-based: a uniform beam of energies
between the asymptotic level and the barrier top either surpasses the
smoothed barrier or does not, so t is the surviving fraction of that beam.
They are analogs of the quantum coefficients, not amplitudes; the two sides
are compared through the dimensionless parameters H and Q.

The quantum side carries three independent routes that must agree:

- the closed sub-barrier transmission for one eigenstate, written in the
  manifestly positive form 4 k^2 kappa^2 / (4 k^2 kappa^2 + k0^4 sinh^2(2 kappa l));
- a transfer-matrix scattering solve over piecewise-constant segments;
- the mixture average, both as the dimensionless x-integral in Q and as the
  k-space average of the single-state coefficient against the ensemble
  density rho(k) = hbar^2 k / (m v0) on [0, k0].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import DomainError
from .lowmomentum import LowMomentumModel, tunneling_threshold
from .physical import PhysicalParams, dimensionless
from .potential import (
    PiecewiseConstantPotential,
    SquareBarrier,
    asymptotic_level,
    classical_max,
)
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_adaptive

SINH_OVERFLOW = 350.0  # beyond this, sinh^2 is replaced by its leading exponential


@dataclass(frozen=True)
class CoefficientPair:
    """Transmission/reflection pair with r stored as 1 - t."""

    t: float
    r: float

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0 and np.isfinite(self.t)):
            raise ValueError(f"transmission coefficient {self.t!r} outside [0, 1]")
        if self.r != 1.0 - self.t:
            raise ValueError("reflection coefficient must be stored as 1 - t")

    @classmethod
    def from_transmission(cls, t: float) -> "CoefficientPair":
        return cls(t=float(t), r=1.0 - float(t))


@dataclass(frozen=True)
class MixtureEnsemble:
    """Incoming-state ensemble with k-density rho(k) on [0, k0]."""

    v0: float
    k0: float
    density: Callable[[float], float]

    def __post_init__(self):
        if not (self.v0 > 0 and self.k0 > 0):
            raise ValueError("ensemble needs positive barrier height and cutoff")
        norm = integrate_adaptive(self.density, 0.0, self.k0)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"ensemble density integrates to {norm:.15g}, not 1")

    @classmethod
    def from_params(cls, barrier: SquareBarrier, params: PhysicalParams) -> "MixtureEnsemble":
        if params.hbar <= 0:
            raise DomainError("the mixture ensemble needs hbar > 0")
        k0 = math.sqrt(2.0 * params.m * barrier.v0) / params.hbar
        coeff = params.hbar**2 / (params.m * barrier.v0)

        def density(k: float) -> float:
            return coeff * k if 0.0 <= k <= k0 else 0.0

        return cls(v0=barrier.v0, k0=k0, density=density)


def effective_t_of_H(H: float) -> float:
    """Surviving beam fraction 1 - erf(sqrt(2)/H) for the smoothed square barrier."""
    if H < 0:
        raise DomainError("H must be nonnegative")
    if H == 0:
        return 0.0
    return 1.0 - math.erf(math.sqrt(2.0) / H)


def effective_coefficients(
    model: LowMomentumModel, barrier=None
) -> CoefficientPair:
    """Threshold-based coefficients for a uniform beam on (base, max V).

    For the square barrier this is the closed form t = 1 - erf(sqrt(2)/H);
    for other admissible potentials the beam fraction above the tunneling
    threshold, measured from the asymptotic level.
    """
    if barrier is not None and barrier is not model.pot:
        model = LowMomentumModel(model.params, barrier)
    pot = model.pot
    if model.params.hbar == 0:
        return CoefficientPair.from_transmission(0.0)
    if isinstance(pot, SquareBarrier):
        H = dimensionless(model.params, pot).H
        return CoefficientPair.from_transmission(effective_t_of_H(H))
    base = asymptotic_level(pot)
    top = classical_max(pot)
    if top <= base:
        raise DomainError("potential has no barrier above its asymptotic level")
    threshold = tunneling_threshold(model)
    t = max(0.0, 1.0 - (threshold - base) / (top - base))
    return CoefficientPair.from_transmission(min(1.0, t))


# ------------------------------------------------------------- quantum routes


def quantum_t_single(barrier: SquareBarrier, params: PhysicalParams, k: float) -> float:
    """Sub-barrier transmission of one eigenstate with wavenumber k.

    Positive rewriting of the textbook result; the printed negative-over-
    negative form has both numerator and denominator < 0 below the barrier.
    """
    if params.hbar <= 0:
        raise DomainError("quantum transmission needs hbar > 0")
    k0 = math.sqrt(2.0 * params.m * barrier.v0) / params.hbar
    if k <= 0 or k > k0:
        raise DomainError(f"wavenumber {k:g} outside the sub-barrier range (0, {k0:g}]")
    if k == k0:
        k0l = k0 * barrier.l
        return 1.0 / (1.0 + k0l * k0l)
    kappa = math.sqrt(k0 * k0 - k * k)
    arg = 2.0 * kappa * barrier.l
    num = 4.0 * k * k * kappa * kappa
    if arg > SINH_OVERFLOW:
        # sinh^2 dominates; keep the ratio in floating range
        return 4.0 * num * math.exp(-2.0 * arg) / k0**4
    s = math.sinh(arg)
    return num / (num + k0**4 * s * s)


def quantum_t_mixture(Q: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Mixture-averaged transmission as a function of Q alone.

    t = 2 * integral_0^1 x^3 (x^2 - 1) / [x^4 - x^2 - sinh^2(2 sqrt(1-x^2)/Q)/4] dx,
    with the analytic endpoint value Q^2/(Q^2+1) at x = 1.
    """
    if Q <= 0:
        raise DomainError("Q must be positive")

    def integrand(x: float) -> float:
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return Q * Q / (Q * Q + 1.0)
        s = math.sqrt(1.0 - x * x)
        arg = 2.0 * s / Q
        if arg > SINH_OVERFLOW:
            return 0.0
        sh = math.sinh(arg)
        x2 = x * x
        return x2 * x * (x2 - 1.0) / (x2 * x2 - x2 - 0.25 * sh * sh)

    return 2.0 * integrate_adaptive(integrand, 0.0, 1.0, cfg)


def mixture_average(
    barrier: SquareBarrier, params: PhysicalParams, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """k-space route to the mixture coefficient: average of quantum_t_single."""
    ens = MixtureEnsemble.from_params(barrier, params)

    def integrand(k: float) -> float:
        if k <= 0.0 or k > ens.k0:
            return 0.0
        return quantum_t_single(barrier, params, k) * ens.density(k)

    return integrate_adaptive(integrand, 0.0, ens.k0, cfg)


class TransferMatrixResult(NamedTuple):
    t: float
    underflow: bool


def transfer_matrix_transmission(
    pot: Union[PiecewiseConstantPotential, SquareBarrier],
    params: PhysicalParams,
    E: float,
) -> TransferMatrixResult:
    """Exact scattering transmission through piecewise-constant segments.

    Independent of the closed forms above: plane-wave amplitudes are matched
    across every step by 2x2 complex interface matrices. Extremely opaque
    barriers overflow the matrix product; those return t = 0 with the
    underflow flag set instead of raising.
    """
    if isinstance(pot, SquareBarrier):
        breaks = [-pot.l, pot.l]
        levels = [0.0, pot.v0, 0.0]
    elif isinstance(pot, PiecewiseConstantPotential):
        breaks = list(pot.breakpoints)
        levels = list(pot.values)
    else:
        raise DomainError("transfer matrix needs a piecewise-constant potential")
    if params.hbar <= 0:
        raise DomainError("scattering needs hbar > 0")
    if E <= levels[0]:
        raise DomainError("energy must exceed the asymptotic level for an incident wave")
    scale = max(1.0, abs(E), max(abs(v) for v in levels))
    if any(E == v for v in levels):
        E = E + 1e-12 * scale  # degenerate dispersion at a segment level

    two_m = 2.0 * params.m
    ks = [np.sqrt(complex(two_m * (E - v))) / params.hbar for v in levels]

    M = np.eye(2, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for x, k1, k2 in zip(breaks, ks[:-1], ks[1:]):
            r = k1 / k2
            plus, minus = 0.5 * (1.0 + r), 0.5 * (1.0 - r)
            interface = np.array(
                [
                    [plus * np.exp(1j * (k1 - k2) * x), minus * np.exp(-1j * (k1 + k2) * x)],
                    [minus * np.exp(1j * (k1 + k2) * x), plus * np.exp(-1j * (k1 - k2) * x)],
                ],
                dtype=complex,
            )
            M = interface @ M
        m22 = M[1, 1]
        if not np.isfinite(m22.real) or not np.isfinite(m22.imag) or m22 == 0:
            return TransferMatrixResult(t=0.0, underflow=True)
        # transmitted amplitude is det(M)/M22 with det(M) = k_in/k_out
        t = float((ks[0] / ks[-1]).real / abs(m22) ** 2)
    if not np.isfinite(t):
        return TransferMatrixResult(t=0.0, underflow=True)
    return TransferMatrixResult(t=min(max(t, 0.0), 1.0), underflow=False)


# --------------------------------------------------------------------- curves


@dataclass(frozen=True, eq=False)
class TransmissionCurve:
    which: str
    param: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)


def coefficient_curve(which: str, param_range, n_points: int) -> TransmissionCurve:
    """Sample t and r = 1 - t on a uniform grid of H or Q."""
    if which not in ("effective", "quantum"):
        raise ValueError("curve kind must be 'effective' or 'quantum'")
    if n_points < 2:
        raise ValueError("need at least 2 grid points")
    lo, hi = float(param_range[0]), float(param_range[1])
    if not (0.0 < lo < hi):
        raise ValueError("parameter range must be positive and increasing")
    grid = np.linspace(lo, hi, n_points)
    fn = effective_t_of_H if which == "effective" else quantum_t_mixture
    t = np.array([fn(float(x)) for x in grid])
    return TransmissionCurve(which=which, param=grid, t=t, r=1.0 - t)


def write_curve_csv(curve: TransmissionCurve, path, metadata=None) -> None:
    label = "H" if curve.which == "effective" else "Q"
    with open(path, "w", newline="\n") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write(f"{label},t,r\n")
        for row in zip(curve.param, curve.t, curve.r):
            fh.write(",".join(f"{x:.12g}" for x in row) + "\n")


# ---------------------------------------------------------- trajectory oracle


def surpass_fraction(
    model: LowMomentumModel,
    n: int,
    rng=None,
    stratified: bool = False,
) -> float:
    """Fraction of a uniform-energy beam that surpasses the barrier.

    Runs n actual trajectories with energies on (base, max V); this is the
    simulated-transport route to the effective transmission coefficient.
    """
    from .dynamics import SURPASSED, classify_traversal

    if n < 1:
        raise ValueError("need at least one trajectory")
    lo = asymptotic_level(model.pot)
    hi = classical_max(model.pot)
    if stratified:
        energies = lo + (np.arange(n) + 0.5) / n * (hi - lo)
    else:
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        energies = gen.uniform(lo, hi, size=n)
    hits = sum(1 for eps in energies if classify_traversal(model, float(eps)) == SURPASSED)
    return hits / n
