"""Reference data sets behind the four standard plots.

Each figure is emitted as a CSV file (the reproducible artifact, 12
significant digits, no timestamps so regeneration is byte-identical) plus a
small script for a command-driven plotting tool. The parameter sets are
fixed: m = 1, half-width 0.5, height 1, beta = 1/8, with the quantum
strength varied per series.

- fig1: position-dependent mass M(q) at hbar 10 and 30
- fig2: reduced potential V^Q(q) at energy 0.25 for hbar 0, 3, 6
- fig3: effective transmission/reflection against H
- fig4: mixture transmission/reflection against Q
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Tuple

import numpy as np

from .lowmomentum import LowMomentumModel, mass, vq_potential
from .physical import PhysicalParams
from .potential import SquareBarrier
from .transmission import coefficient_curve

FIG_PARAMS = PhysicalParams(m=1.0, beta=0.125, hbar=3.0)
FIG_BARRIER = SquareBarrier(v0=1.0, l=0.5)
FIG2_EPS = 0.25
PROFILE_GRID = np.linspace(-4.0, 4.0, 801)
CURVE_GRID = (0.02, 10.0, 500)  # uniform grid on (0, 10]


@dataclass(frozen=True)
class FigureSpec:
    id: int
    barrier: SquareBarrier
    params: PhysicalParams
    header: Tuple[str, ...]
    series: Tuple[float, ...]  # hbar values (figs 1-2); unused for curve figures

    def __post_init__(self):
        if self.id not in (1, 2, 3, 4):
            raise ValueError("figure id must be 1..4")


def default_figure_specs():
    return [
        FigureSpec(1, FIG_BARRIER, FIG_PARAMS, ("q", "M_hbar10", "M_hbar30"), (10.0, 30.0)),
        FigureSpec(2, FIG_BARRIER, FIG_PARAMS, ("q", "VQ_h0", "VQ_h3", "VQ_h6"), (0.0, 3.0, 6.0)),
        FigureSpec(3, FIG_BARRIER, FIG_PARAMS, ("H", "t", "r"), ()),
        FigureSpec(4, FIG_BARRIER, FIG_PARAMS, ("Q", "tQ", "rQ"), ()),
    ]


def _series_models(spec: FigureSpec):
    return [
        LowMomentumModel(replace(spec.params, hbar=h), spec.barrier) for h in spec.series
    ]


def _figure_table(spec: FigureSpec) -> np.ndarray:
    if spec.id == 1:
        models = _series_models(spec)
        cols = [PROFILE_GRID] + [
            np.array([mass(mod, float(q)) for q in PROFILE_GRID]) for mod in models
        ]
    elif spec.id == 2:
        models = _series_models(spec)
        cols = [PROFILE_GRID] + [
            np.array([vq_potential(mod, float(q), FIG2_EPS) for q in PROFILE_GRID])
            for mod in models
        ]
    else:
        which = "effective" if spec.id == 3 else "quantum"
        lo, hi, n = CURVE_GRID
        curve = coefficient_curve(which, (lo, hi), n)
        cols = [curve.param, curve.t, curve.r]
    return np.column_stack(cols)


def _metadata_lines(spec: FigureSpec):
    lines = [
        f"# figure={spec.id}",
        f"# m={spec.params.m:.12g}",
        f"# beta={spec.params.beta:.12g}",
        f"# V0={spec.barrier.v0:.12g}",
        f"# L={spec.barrier.l:.12g}",
    ]
    if spec.id == 1:
        lines.append("# series=hbar " + ",".join(f"{h:g}" for h in spec.series))
    elif spec.id == 2:
        lines.append(f"# eps={FIG2_EPS:.12g}")
        lines.append("# series=hbar " + ",".join(f"{h:g}" for h in spec.series))
    return lines


_PLOT_LABELS = {
    1: ("q", "M(q)"),
    2: ("q", "V^Q(q)"),
    3: ("H", "coefficient"),
    4: ("Q", "coefficient"),
}


def _plot_script(spec: FigureSpec) -> str:
    xlabel, ylabel = _PLOT_LABELS[spec.id]
    n_series = len(spec.header) - 1
    plots = ", ".join(
        f"'fig{spec.id}.csv' using 1:{i + 2} with lines" for i in range(n_series)
    )
    return "\n".join(
        [
            "set datafile separator ','",
            "set key autotitle columnhead",
            f"set xlabel '{xlabel}'",
            f"set ylabel '{ylabel}'",
            f"plot {plots}",
            "",
        ]
    )


def emit_figure(spec: FigureSpec, out_dir) -> list:
    """Write fig<N>.csv and fig<N>.gp into out_dir; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        table = _figure_table(spec)
        csv_path = out / f"fig{spec.id}.csv"
        with open(csv_path, "w", newline="\n") as fh:
            for line in _metadata_lines(spec):
                fh.write(line + "\n")
            fh.write(",".join(spec.header) + "\n")
            for row in table:
                fh.write(",".join(f"{x:.12g}" for x in row) + "\n")
        gp_path = out / f"fig{spec.id}.gp"
        with open(gp_path, "w", newline="\n") as fh:
            fh.write(_plot_script(spec))
    except OSError as exc:
        raise OSError(f"cannot write figure {spec.id} under {out}: {exc}") from exc
    return [csv_path, gp_path]


def emit_all(out_dir) -> list:
    paths = []
    for spec in default_figure_specs():
        paths.extend(emit_figure(spec, out_dir))
    return paths
