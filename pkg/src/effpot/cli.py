"""Command-line front end.

Subcommands:
  veff        sample the momentum-dependent effective potential on a (q, p) grid
  model       emit smoothed potential, mass, and reduced-potential profiles
  trajectory  integrate one trajectory and export its samples
  coeff       print effective and quantum transmission/reflection coefficients
  figures     regenerate the four reference data sets
  validate    run the built-in cross-checks and report PASS/FAIL

Numerical options resolve in three layers: built-in defaults, then a JSON
config file given with --config, then explicit flags. Exit codes: 0 success,
1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    REFLECTED,
    SURPASSED,
    classify_traversal,
    hamiltonian,
    integrate_hamiltonian,
    integrate_newtonian,
    launch_state,
    write_trajectory_csv,
)
from .errors import EffpotError
from .figures import emit_all
from .kernel import effective_potential
from .lowmomentum import (
    LowMomentumModel,
    inverse_mass,
    mass,
    smoothed_potential,
    vq_potential,
)
from .physical import PhysicalParams, dimensionless
from .potential import PiecewiseConstantPotential, SquareBarrier, load_tabulated_csv
from .quadrature import QuadratureConfig
from .transmission import (
    effective_coefficients,
    mixture_average,
    quantum_t_mixture,
    quantum_t_single,
    transfer_matrix_transmission,
)

DEFAULTS = {
    "m": 1.0,
    "beta": 0.125,
    "hbar": 3.0,
    "L": 0.5,
    "V0": 1.0,
    "eps": 0.25,
    "rel_tol": 1e-10,
    "abs_tol": 1e-14,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    m: float
    beta: float
    hbar: float
    L: float
    V0: float
    eps: float
    rel_tol: float
    abs_tol: float

    def params(self) -> PhysicalParams:
        return PhysicalParams(m=self.m, beta=self.beta, hbar=self.hbar)

    def barrier(self) -> SquareBarrier:
        return SquareBarrier(v0=self.V0, l=self.L)

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def model(self, pot=None) -> LowMomentumModel:
        return LowMomentumModel(self.params(), pot if pot is not None else self.barrier())


def _build_config(args) -> RunConfig:
    merged = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(loaded)
    for key in DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    try:
        return RunConfig(**{k: float(v) for k, v in merged.items()})
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad parameter value: {exc}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with parameter overrides")
    parser.add_argument("--m", type=float, help=f"particle mass (default {DEFAULTS['m']})")
    parser.add_argument("--beta", type=float, help=f"inverse temperature (default {DEFAULTS['beta']})")
    parser.add_argument("--hbar", type=float, help=f"quantum strength (default {DEFAULTS['hbar']})")
    parser.add_argument("--L", type=float, help=f"barrier half-width (default {DEFAULTS['L']})")
    parser.add_argument("--V0", type=float, help=f"barrier height (default {DEFAULTS['V0']})")
    parser.add_argument("--eps", type=float, help=f"trajectory energy (default {DEFAULTS['eps']})")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float,
                        help=f"quadrature relative tolerance (default {DEFAULTS['rel_tol']})")
    parser.add_argument("--abs-tol", dest="abs_tol", type=float,
                        help=f"quadrature absolute tolerance (default {DEFAULTS['abs_tol']})")


def _open_out(args):
    out = getattr(args, "out", None)
    if out:
        return open(out, "w", newline="\n"), True
    return sys.stdout, False


def _write_metadata(fh, cfg: RunConfig, extra=None) -> None:
    for key in ("m", "beta", "hbar", "L", "V0"):
        fh.write(f"# {key}={getattr(cfg, key):.12g}\n")
    for key, value in (extra or {}).items():
        fh.write(f"# {key}={value}\n")


# ------------------------------------------------------------------- commands


def _cmd_veff(args) -> int:
    cfg = _build_config(args)
    if cfg.hbar <= 0:
        raise UsageError("veff needs hbar > 0")
    params, barrier = cfg.params(), cfg.barrier()
    qcfg = cfg.quadrature()
    qs = np.linspace(args.qmin, args.qmax, args.nq)
    ps = np.linspace(args.pmin, args.pmax, args.np_)
    fh, close = _open_out(args)
    try:
        _write_metadata(fh, cfg)
        fh.write("q,p,veff\n")
        for q in qs:
            for p in ps:
                v = effective_potential(params, barrier, float(q), float(p), qcfg)
                fh.write(f"{q:.12g},{p:.12g},{v:.12g}\n")
    finally:
        if close:
            fh.close()
    return 0


def _load_pot(args, cfg: RunConfig):
    path = getattr(args, "potential_csv", None)
    if path:
        return load_tabulated_csv(path)
    return cfg.barrier()


def _cmd_model(args) -> int:
    cfg = _build_config(args)
    model = cfg.model(_load_pot(args, cfg))
    qs = np.linspace(args.qmin, args.qmax, args.n)
    fh, close = _open_out(args)
    try:
        _write_metadata(fh, cfg, {"eps": f"{cfg.eps:.12g}"})
        fh.write("q,V,M,VQ\n")
        for q in qs:
            q = float(q)
            fh.write(
                f"{q:.12g},{smoothed_potential(model, q):.12g},"
                f"{mass(model, q):.12g},{vq_potential(model, q, cfg.eps):.12g}\n"
            )
    finally:
        if close:
            fh.close()
    return 0


def _cmd_trajectory(args) -> int:
    cfg = _build_config(args)
    model = cfg.model(_load_pot(args, cfg))
    if args.q0 is not None and args.p0 is not None:
        q0, p0 = args.q0, args.p0
    elif args.q0 is None and args.p0 is None:
        q0, p0 = launch_state(model, cfg.eps)
    else:
        raise UsageError("give both --q0 and --p0, or neither")
    t_end = args.t_end
    t_eval = None
    if args.samples is not None:
        if args.samples < 2:
            raise UsageError("--samples must be at least 2")
        if t_end is None:
            raise UsageError("--samples needs an explicit --t-end")
        t_eval = np.linspace(0.0, t_end, args.samples)
    if args.form == "hamiltonian":
        traj = integrate_hamiltonian(model, q0, p0, t_end=t_end, t_eval=t_eval)
    else:
        v0 = p0 * inverse_mass(model, q0)
        eps = hamiltonian(model, q0, p0)
        traj = integrate_newtonian(model, q0, v0, eps, t_end=t_end, t_eval=t_eval)
    fh, close = _open_out(args)
    try:
        meta = {"form": args.form, "q0": f"{q0:.12g}", "p0": f"{p0:.12g}"}
        write_trajectory_csv(traj, fh, metadata={
            **{k: f"{getattr(cfg, k):.12g}" for k in ("m", "beta", "hbar", "L", "V0")},
            **meta,
        })
    finally:
        if close:
            fh.close()
    return 0


def _cmd_coeff(args) -> int:
    cfg = _build_config(args)
    model = cfg.model()
    dims = dimensionless(cfg.params(), cfg.barrier())
    fh, close = _open_out(args)
    try:
        _write_metadata(fh, cfg, {"H": f"{dims.H:.12g}", "Q": f"{dims.Q:.12g}"})
        eff = effective_coefficients(model)
        fh.write(f"t_effective={eff.t:.12g}\n")
        fh.write(f"r_effective={eff.r:.12g}\n")
        if cfg.hbar > 0:
            tq = quantum_t_mixture(dims.Q, cfg.quadrature())
            fh.write(f"t_quantum_mixture={tq:.12g}\n")
            fh.write(f"r_quantum_mixture={1.0 - tq:.12g}\n")
    finally:
        if close:
            fh.close()
    return 0


def _cmd_figures(args) -> int:
    paths = emit_all(args.out)
    for p in paths:
        print(p)
    return 0


def _cmd_validate(args) -> int:
    _build_config(args)  # surface usage errors in config/flags before running
    checks = []

    def check(name, fn):
        checks.append((name, fn))

    params = PhysicalParams(m=1.0, beta=0.125, hbar=3.0)
    barrier = SquareBarrier(v0=1.0, l=0.5)
    model = LowMomentumModel(params, barrier)

    def smoothing_agreement():
        # the closed erf form against the convolution route on an identical
        # piecewise-constant barrier
        pw = PiecewiseConstantPotential((-0.5, 0.5), (0.0, 1.0, 0.0))
        pw_model = LowMomentumModel(params, pw)
        worst = max(
            abs(smoothed_potential(model, q) - smoothed_potential(pw_model, q))
            for q in (-1.5, -0.4, 0.0, 0.7, 2.0)
        )
        return worst < 1e-8, f"max diff {worst:.3e}"

    def mass_curvature():
        # closed inverse mass against a finite-difference curvature of the
        # smoothed potential
        coeff = params.beta**2 * params.hbar**2 / (12.0 * params.m**2)
        h = 1e-3
        worst = 0.0
        for q in (-1.0, 0.0, 0.6, 1.4):
            vpp = (
                smoothed_potential(model, q + h)
                - 2.0 * smoothed_potential(model, q)
                + smoothed_potential(model, q - h)
            ) / (h * h)
            worst = max(worst, abs(inverse_mass(model, q) - (1.0 / params.m - coeff * vpp)))
        return worst < 1e-6, f"max diff {worst:.3e}"

    def zero_momentum_reduction():
        worst = max(
            abs(effective_potential(params, barrier, q, 0.0) - smoothed_potential(model, q))
            for q in (-1.0, 0.0, 0.8)
        )
        return worst < 1e-8, f"max diff {worst:.3e}"

    def oracle_pairing():
        qp = PhysicalParams(m=1.0, beta=0.125, hbar=0.875)
        k0 = math.sqrt(2.0 * qp.m * barrier.v0) / qp.hbar
        worst = 0.0
        for k in np.linspace(0.05 * k0, 0.999 * k0, 10):
            closed = quantum_t_single(barrier, qp, float(k))
            oracle = transfer_matrix_transmission(barrier, qp, (qp.hbar * k) ** 2 / (2 * qp.m)).t
            worst = max(worst, abs(closed - oracle))
        return worst < 1e-10, f"max diff {worst:.3e}"

    def mixture_routes():
        Q = 1.0
        qp = PhysicalParams(m=1.0, beta=0.125, hbar=math.sqrt(2.0) * 0.5 * Q)
        direct = quantum_t_mixture(Q)
        averaged = mixture_average(barrier, qp)
        return abs(direct - averaged) < 1e-8, f"diff {abs(direct - averaged):.3e}"

    def effective_point():
        from .transmission import effective_t_of_H

        t = effective_t_of_H(2.97)
        return abs(t - 0.5) < 0.005, f"t(H=2.97)={t:.6f}"

    def mixture_point():
        t = quantum_t_mixture(1.75)
        return abs(t - 0.5) < 0.01, f"t(Q=1.75)={t:.6f}"

    def conservation():
        q0, p0 = launch_state(model, 0.9)
        traj = integrate_hamiltonian(model, q0, p0)
        ok = traj.max_energy_drift < 1e-9 and traj.outcome in (SURPASSED, REFLECTED)
        return ok, f"drift {traj.max_energy_drift:.3e}, outcome {traj.outcome}"

    def classical_limit():
        cl = LowMomentumModel(PhysicalParams(m=1.0, beta=0.125, hbar=0.0), barrier)
        below = classify_traversal(cl, 0.5)
        above = classify_traversal(cl, 1.5)
        eff = effective_coefficients(cl)
        ok = below == REFLECTED and above == SURPASSED and eff.t == 0.0
        return ok, f"below={below}, above={above}, t={eff.t:g}"

    check("smoothed potential: closed form vs convolution", smoothing_agreement)
    check("inverse mass vs smoothed-potential curvature", mass_curvature)
    check("effective potential at p=0 equals smoothed potential", zero_momentum_reduction)
    check("single-state transmission vs transfer matrix", oracle_pairing)
    check("mixture integral vs k-space average", mixture_routes)
    check("effective coefficient at H=2.97", effective_point)
    check("mixture coefficient at Q=1.75", mixture_point)
    check("trajectory energy conservation", conservation)
    check("classical limit at hbar=0", classical_limit)

    failures = 0
    for name, fn in checks:
        try:
            ok, detail = fn()
        except EffpotError as exc:
            ok, detail = False, f"error: {exc}"
        line = "PASS" if ok else "FAIL"
        print(f"{line}  {name}  ({detail})")
        if not ok:
            failures += 1
    if failures:
        print(f"{failures} of {len(checks)} checks failed")
        return 1
    print(f"all {len(checks)} checks passed")
    return 0


# --------------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effpot",
        description="effective-potential transport model: profiles, trajectories, coefficients",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("veff", help="sample the momentum-dependent effective potential")
    _add_common(p)
    p.add_argument("--qmin", type=float, default=-2.0)
    p.add_argument("--qmax", type=float, default=2.0)
    p.add_argument("--nq", type=int, default=41)
    p.add_argument("--pmin", type=float, default=0.0)
    p.add_argument("--pmax", type=float, default=2.0)
    p.add_argument("--np", dest="np_", type=int, default=5)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_veff)

    p = sub.add_parser("model", help="emit V, M, and V^Q profiles")
    _add_common(p)
    p.add_argument("--qmin", type=float, default=-4.0)
    p.add_argument("--qmax", type=float, default=4.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--potential-csv", help="tabulated potential (two CSV columns: q, V)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("trajectory", help="integrate one trajectory and export samples")
    _add_common(p)
    p.add_argument("--q0", type=float, help="initial position (default: asymptotic launch)")
    p.add_argument("--p0", type=float, help="initial momentum")
    p.add_argument("--t-end", dest="t_end", type=float, help="time budget")
    p.add_argument("--samples", type=int, help="resample onto this many uniform times")
    p.add_argument("--form", choices=("hamiltonian", "newtonian"), default="hamiltonian")
    p.add_argument("--potential-csv", help="tabulated potential (two CSV columns: q, V)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("coeff", help="print transmission/reflection coefficients")
    _add_common(p)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_coeff)

    p = sub.add_parser("figures", help="regenerate the reference data sets")
    p.add_argument("--out", default="figs", help="output directory (default: ./figs)")
    p.set_defaults(func=_cmd_figures)

    p = sub.add_parser("validate", help="run built-in cross-checks")
    _add_common(p)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # parameter validation from the domain types: bad input, not a bug
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except EffpotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
