"""Coefficient routes: threshold-based effective, closed quantum, scattering."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effpot.errors import DomainError
from effpot.lowmomentum import LowMomentumModel, tunneling_threshold
from effpot.physical import PhysicalParams, dimensionless
from effpot.potential import PiecewiseConstantPotential, SquareBarrier, TabulatedPotential
from effpot.transmission import (
    CoefficientPair,
    MixtureEnsemble,
    coefficient_curve,
    effective_coefficients,
    effective_t_of_H,
    mixture_average,
    quantum_t_mixture,
    quantum_t_single,
    surpass_fraction,
    transfer_matrix_transmission,
    write_curve_csv,
)

BARRIER = SquareBarrier(v0=1.0, l=0.5)


def test_coefficient_pair_validation():
    pair = CoefficientPair.from_transmission(0.3)
    assert pair.r == 0.7
    with pytest.raises(ValueError):
        CoefficientPair(t=0.3, r=0.6)
    with pytest.raises(ValueError):
        CoefficientPair(t=1.2, r=-0.2)
    with pytest.raises(ValueError):
        CoefficientPair(t=-0.1, r=1.1)
    with pytest.raises(ValueError):
        CoefficientPair(t=float("nan"), r=float("nan"))


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_coefficient_pair_sum(t):
    pair = CoefficientPair.from_transmission(t)
    assert pair.t + pair.r == 1.0


def test_effective_t_of_h():
    with pytest.raises(DomainError):
        effective_t_of_H(-0.1)
    assert effective_t_of_H(0.0) == 0.0
    assert abs(effective_t_of_H(2.97) - 0.5) < 0.005
    # below H ~ 0.25 the erf saturates to 1 in double precision and t is 0
    assert effective_t_of_H(0.1) == 0.0
    grid = np.linspace(0.35, 20.0, 200)
    vals = [effective_t_of_H(float(h)) for h in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(0.0 < v < 1.0 for v in vals)


def test_effective_coefficients_square():
    params = PhysicalParams(m=1.0, beta=0.125, hbar=3.0)
    model = LowMomentumModel(params, BARRIER)
    pair = effective_coefficients(model)
    H = dimensionless(params, BARRIER).H
    assert pair.t == effective_t_of_H(H)


def test_effective_coefficients_classical_zero():
    model = LowMomentumModel(PhysicalParams(1.0, 0.125, 0.0), BARRIER)
    pair = effective_coefficients(model)
    assert pair.t == 0.0 and pair.r == 1.0


def test_effective_coefficients_threshold_route():
    # the beam-fraction route on an equivalent piecewise barrier must land on
    # the closed erf form
    params = PhysicalParams(m=1.0, beta=0.125, hbar=3.0)
    pw = PiecewiseConstantPotential((-0.5, 0.5), (0.0, 1.0, 0.0))
    t_pw = effective_coefficients(LowMomentumModel(params, pw)).t
    t_sq = effective_coefficients(LowMomentumModel(params, BARRIER)).t
    assert abs(t_pw - t_sq) < 1e-12


def test_effective_coefficients_flat_potential_rejected():
    params = PhysicalParams(m=1.0, beta=0.125, hbar=3.0)
    flat = PiecewiseConstantPotential((-1.0, 1.0), (0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        effective_coefficients(LowMomentumModel(params, flat))


# -------------------------------------------------------------- single state


def _params(hbar):
    return PhysicalParams(m=1.0, beta=0.125, hbar=hbar)


def test_quantum_t_single_domain():
    params = _params(0.875)
    k0 = math.sqrt(2.0) / 0.875
    with pytest.raises(DomainError):
        quantum_t_single(BARRIER, params, 0.0)
    with pytest.raises(DomainError):
        quantum_t_single(BARRIER, params, k0 * 1.0001)
    with pytest.raises(DomainError):
        quantum_t_single(BARRIER, _params(0.0), 0.5)


def test_quantum_t_single_at_cutoff():
    # k0 l = 1/1.75 gives the closed value 49/65
    hbar = 1.75 * math.sqrt(2.0) * 0.5
    params = _params(hbar)
    k0 = math.sqrt(2.0 * params.m * BARRIER.v0) / hbar
    assert abs(quantum_t_single(BARRIER, params, k0) - 49.0 / 65.0) < 1e-12


def test_quantum_t_single_monotone_in_k():
    params = _params(0.875)
    k0 = math.sqrt(2.0) / 0.875
    ks = np.linspace(0.01, 1.0, 80) * k0
    ts = [quantum_t_single(BARRIER, params, float(k)) for k in ks]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert 0.0 < ts[0] < ts[-1] <= 1.0


def test_quantum_t_single_matches_textbook_form():
    # the same result written with both numerator and denominator negative
    params = _params(0.875)
    k0 = math.sqrt(2.0) / 0.875
    for frac in (0.2, 0.5, 0.9):
        k = frac * k0
        kappa = math.sqrt(k0 * k0 - k * k)
        num = 4.0 * k * k * (k * k - k0 * k0)
        den = num - k0**4 * math.sinh(2.0 * kappa * BARRIER.l) ** 2
        assert abs(quantum_t_single(BARRIER, params, k) - num / den) < 1e-12


def test_quantum_t_single_opaque_limit():
    # deep sub-barrier at tiny hbar: the sinh overflow branch must stay finite
    params = _params(0.002)
    k0 = math.sqrt(2.0) / 0.002
    t = quantum_t_single(BARRIER, params, 0.5 * k0)
    assert t >= 0.0 and np.isfinite(t)
    assert t < 1e-200


# ------------------------------------------------------------------- mixture


def test_quantum_t_mixture_domain():
    with pytest.raises(DomainError):
        quantum_t_mixture(0.0)
    with pytest.raises(DomainError):
        quantum_t_mixture(-1.0)


def test_quantum_t_mixture_frozen_values():
    frozen = {
        0.5: 0.037522673295764,
        1.0: 0.224456184201472,
        2.0: 0.564134088317560,
        4.0: 0.816717124300398,
    }
    for Q, want in frozen.items():
        assert abs(quantum_t_mixture(Q) - want) < 1e-9


def test_quantum_t_mixture_half_transmission_point():
    assert abs(quantum_t_mixture(1.75) - 0.5) < 0.01


def test_quantum_t_mixture_low_q_quartic():
    # leading behavior ~ 0.9015 Q^4 once tunneling is strongly suppressed
    Q = 0.02
    ratio = quantum_t_mixture(Q) / Q**4
    assert abs(ratio - 0.901543) < 0.01 * 0.901543


def test_mixture_ensemble_from_params():
    params = _params(0.875)
    ens = MixtureEnsemble.from_params(BARRIER, params)
    assert abs(ens.k0 - math.sqrt(2.0) / 0.875) < 1e-15
    assert ens.density(-0.1) == 0.0
    assert ens.density(ens.k0 * 1.01) == 0.0
    assert ens.density(ens.k0) > 0.0
    with pytest.raises(DomainError):
        MixtureEnsemble.from_params(BARRIER, _params(0.0))


def test_mixture_ensemble_requires_normalization():
    with pytest.raises(ValueError):
        MixtureEnsemble(v0=1.0, k0=1.6, density=lambda k: k)


@pytest.mark.parametrize("Q", [0.5, 1.0, 2.0, 4.0])
def test_mixture_routes_agree(Q):
    # dimensionless x-integral vs k-space average of the single-state result
    hbar = math.sqrt(2.0) * 0.5 * Q
    assert abs(quantum_t_mixture(Q) - mixture_average(BARRIER, _params(hbar))) < 1e-8


# ---------------------------------------------------------- transfer matrix


def test_transfer_matrix_free_particle():
    flat = PiecewiseConstantPotential((-1.0, 1.0), (0.0, 0.0, 0.0))
    res = transfer_matrix_transmission(flat, _params(1.0), 0.5)
    assert res.t == 1.0
    assert not res.underflow


def test_transfer_matrix_domain():
    with pytest.raises(DomainError):
        transfer_matrix_transmission(BARRIER, _params(1.0), 0.0)
    with pytest.raises(DomainError):
        transfer_matrix_transmission(BARRIER, _params(1.0), -0.5)
    with pytest.raises(DomainError):
        transfer_matrix_transmission(BARRIER, _params(0.0), 0.5)
    tab = TabulatedPotential((-1.0, 0.0, 1.0), (0.0, 1.0, 0.0))
    with pytest.raises(DomainError):
        transfer_matrix_transmission(tab, _params(1.0), 0.5)


def test_transfer_matrix_degenerate_energy():
    # E exactly at the barrier top hits the k = 0 dispersion degeneracy; the
    # nudged solve must land on the closed k -> k0 limit
    params = _params(0.875)
    k0 = math.sqrt(2.0) / 0.875
    res = transfer_matrix_transmission(BARRIER, params, 1.0)
    want = 1.0 / (1.0 + (k0 * BARRIER.l) ** 2)
    assert not res.underflow
    assert abs(res.t - want) < 1e-9


def test_transfer_matrix_over_barrier():
    res = transfer_matrix_transmission(BARRIER, _params(1.0), 2.0)
    assert 0.0 < res.t <= 1.0
    assert not res.underflow


def test_transfer_matrix_square_equals_piecewise():
    pw = PiecewiseConstantPotential((-0.5, 0.5), (0.0, 1.0, 0.0))
    for E in (0.2, 0.7, 1.5):
        a = transfer_matrix_transmission(BARRIER, _params(1.0), E)
        b = transfer_matrix_transmission(pw, _params(1.0), E)
        assert a.t == b.t


def test_transfer_matrix_opaque_underflow():
    res = transfer_matrix_transmission(BARRIER, _params(0.001), 0.5)
    assert res.t == 0.0
    assert res.underflow


def test_transfer_matrix_agrees_with_closed_form():
    params = _params(0.875)
    k0 = math.sqrt(2.0) / 0.875
    worst = 0.0
    for k in np.linspace(0.02, 0.98, 50) * k0:
        E = (params.hbar * k) ** 2 / (2.0 * params.m)
        closed = quantum_t_single(BARRIER, params, float(k))
        scattered = transfer_matrix_transmission(BARRIER, params, E).t
        worst = max(worst, abs(closed - scattered))
    assert worst <= 1e-10


def test_transfer_matrix_double_barrier_resonance():
    # two barriers host sharp resonances the closed single-barrier form
    # cannot produce; the scan must find near-unity transmission both on the
    # grid and, below the barrier top, after local refinement
    from scipy.optimize import minimize_scalar

    dbl = PiecewiseConstantPotential(
        (-1.0, -0.6, 0.6, 1.0), (0.0, 2.0, 0.0, 2.0, 0.0)
    )
    params = _params(1.0)
    es = np.linspace(0.05, 4.95, 2001)
    ts = np.array([transfer_matrix_transmission(dbl, params, float(e)).t for e in es])
    assert ts.max() > 0.99
    low = es < 1.9
    j = int(np.argmax(ts[low]))
    assert 0 < j < low.sum() - 1
    res = minimize_scalar(
        lambda e: -transfer_matrix_transmission(dbl, params, float(e)).t,
        bracket=(float(es[j - 1]), float(es[j]), float(es[j + 1])),
        method="golden",
        options={"xtol": 1e-12},
    )
    assert -res.fun > 0.9999
    assert res.x < 2.0  # the resonance sits below the barrier top


# -------------------------------------------------------------------- curves


def test_coefficient_curve_validation():
    with pytest.raises(ValueError):
        coefficient_curve("bogus", (0.1, 1.0), 10)
    with pytest.raises(ValueError):
        coefficient_curve("effective", (0.1, 1.0), 1)
    with pytest.raises(ValueError):
        coefficient_curve("effective", (0.0, 1.0), 10)
    with pytest.raises(ValueError):
        coefficient_curve("effective", (2.0, 1.0), 10)


def test_coefficient_curve_values():
    curve = coefficient_curve("effective", (0.5, 5.0), 10)
    assert curve.which == "effective"
    assert len(curve.param) == 10
    for x, t, r in zip(curve.param, curve.t, curve.r):
        assert t == effective_t_of_H(float(x))
        assert r == 1.0 - t
    qc = coefficient_curve("quantum", (0.5, 2.0), 4)
    assert abs(qc.t[0] - quantum_t_mixture(0.5)) < 1e-12


def test_write_curve_csv_labels(tmp_path):
    eff = coefficient_curve("effective", (0.5, 5.0), 5)
    qua = coefficient_curve("quantum", (0.5, 2.0), 5)
    pe, pq = tmp_path / "eff.csv", tmp_path / "qua.csv"
    write_curve_csv(eff, pe, metadata={"model": "demo"})
    write_curve_csv(qua, pq)
    eff_lines = pe.read_text().splitlines()
    assert eff_lines[0] == "# model=demo"
    assert eff_lines[1] == "H,t,r"
    assert len(eff_lines) == 2 + 5
    assert pq.read_text().splitlines()[0] == "Q,t,r"


# -------------------------------------------------------- simulated transport


def test_surpass_fraction_validation():
    model = LowMomentumModel(_params(3.0), BARRIER)
    with pytest.raises(ValueError):
        surpass_fraction(model, 0)


def test_surpass_fraction_seeded_reproducibility():
    model = LowMomentumModel(_params(3.0), BARRIER)
    a = surpass_fraction(model, 12, rng=7)
    b = surpass_fraction(model, 12, rng=7)
    assert a == b


def test_surpass_fraction_stratified_matches_closed_form():
    model = LowMomentumModel(_params(3.0), BARRIER)
    frac = surpass_fraction(model, 40, stratified=True)
    t = effective_coefficients(model).t
    # midpoint stratification can miss by at most one stratum
    assert abs(frac - t) <= 1.0 / 40 + 1e-12
