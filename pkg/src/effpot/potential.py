"""Classical 1-D potentials and their Fourier form factors.

All potentials must approach equal constant levels on both sides; only the
deviation from that asymptotic level is ever smoothed or Fourier transformed,
which is what makes the smoothing integrals converge. Potentials with unequal
left/right asymptotes are rejected.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class SquareBarrier:
    """Rectangular barrier of height v0 on (-l, l), zero outside.

    At the jump points q = +-l the value is v0/2 (midpoint convention), which
    is also the pointwise limit of the Gaussian-smoothed barrier as the
    smoothing width goes to zero.
    """

    v0: float
    l: float

    def __post_init__(self):
        if not self.v0 > 0:
            raise ValueError(f"barrier height must be positive, got {self.v0}")
        if not self.l > 0:
            raise ValueError(f"barrier half-width must be positive, got {self.l}")


@dataclass(frozen=True)
class PiecewiseConstantPotential:
    """Constant segments separated by jumps at strictly increasing breakpoints.

    values has one more entry than breakpoints; the first and last values are
    the asymptotic levels and must be equal.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(bp) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if len(bp) < 1:
            raise ValueError("need at least one breakpoint")
        if any(b >= a for a, b in zip(bp[1:], bp[:-1])):
            raise ValueError("breakpoints must be strictly increasing")
        if vals[0] != vals[-1]:
            raise ValueError("unequal left/right asymptotic levels are not supported")


@dataclass(frozen=True)
class TabulatedPotential:
    """Sampled potential, linearly interpolated inside the grid.

    Outside the grid the boundary sample extends as a constant, so the first
    and last samples are the asymptotic levels and must agree.
    """

    grid: tuple
    values: tuple

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", tuple(g))
        object.__setattr__(self, "values", tuple(v))
        if g.size != v.size:
            raise ValueError("grid and values must have the same length")
        if g.size < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid positions must be strictly increasing")
        scale = max(1.0, float(np.max(np.abs(v))))
        if abs(v[0] - v[-1]) > 1e-12 * scale:
            raise ValueError("unequal left/right asymptotic levels are not supported")


ClassicalPotential = Union[SquareBarrier, PiecewiseConstantPotential, TabulatedPotential]


def asymptotic_level(pot: ClassicalPotential) -> float:
    """Common potential level far from the structure."""
    if isinstance(pot, SquareBarrier):
        return 0.0
    if isinstance(pot, PiecewiseConstantPotential):
        return pot.values[0]
    return pot.values[0]


def support_interval(pot: ClassicalPotential):
    """Interval [a, b] outside which the potential equals its asymptotic level."""
    if isinstance(pot, SquareBarrier):
        return -pot.l, pot.l
    if isinstance(pot, PiecewiseConstantPotential):
        return pot.breakpoints[0], pot.breakpoints[-1]
    return pot.grid[0], pot.grid[-1]


def eval_classical(pot: ClassicalPotential, q: float) -> float:
    """Value of the bare potential at q, midpoint convention at jumps."""
    if isinstance(pot, SquareBarrier):
        aq = abs(q)
        if aq < pot.l:
            return pot.v0
        if aq == pot.l:
            return 0.5 * pot.v0
        return 0.0
    if isinstance(pot, PiecewiseConstantPotential):
        bp, vals = pot.breakpoints, pot.values
        for i, b in enumerate(bp):
            if q < b:
                return vals[i]
            if q == b:
                return 0.5 * (vals[i] + vals[i + 1])
        return vals[-1]
    g = np.asarray(pot.grid)
    v = np.asarray(pot.values)
    if q <= g[0]:
        return float(v[0])
    if q >= g[-1]:
        return float(v[-1])
    return float(np.interp(q, g, v))


def classical_max(pot: ClassicalPotential) -> float:
    """Largest value the bare potential takes."""
    if isinstance(pot, SquareBarrier):
        return pot.v0
    if isinstance(pot, PiecewiseConstantPotential):
        return max(pot.values)
    return float(np.max(np.asarray(pot.values)))


def form_factor(pot: ClassicalPotential, k: float) -> complex:
    """Fourier transform of the potential's deviation from its asymptotic level.

    Returns the integral of (V(q') - V_inf) e^{-i k q'} dq'. For the centered
    square barrier this is 2 v0 sin(k l)/k with small-k limit 2 v0 l; symmetric
    potentials give a real, even function of k.
    """
    if isinstance(pot, SquareBarrier):
        if k == 0.0:
            return complex(2.0 * pot.v0 * pot.l)
        return complex(2.0 * pot.v0 * math.sin(k * pot.l) / k)
    if isinstance(pot, PiecewiseConstantPotential):
        base = asymptotic_level(pot)
        total = 0.0 + 0.0j
        bp, vals = pot.breakpoints, pot.values
        for i in range(len(bp) - 1):
            dv = vals[i + 1] - base
            if dv == 0.0:
                continue
            a, b = bp[i], bp[i + 1]
            if k == 0.0:
                total += dv * (b - a)
            else:
                total += dv * (np.exp(-1j * k * a) - np.exp(-1j * k * b)) / (1j * k)
        return complex(total)
    g = np.asarray(pot.grid)
    dev = np.asarray(pot.values) - asymptotic_level(pot)
    # trapezoid Fourier sum; accuracy is the caller's responsibility via grid density
    return complex(np.trapezoid(dev * np.exp(-1j * k * g), g))


def load_tabulated_csv(path) -> TabulatedPotential:
    """Read a two-column CSV of (position, value); a single header row is allowed."""
    positions, values = [], []
    with open(path, newline="") as fh:
        for row_num, row in enumerate(csv.reader(fh)):
            cells = [c.strip() for c in row if c.strip() != ""]
            if not cells:
                continue
            if len(cells) != 2:
                raise ValueError(f"{path}: row {row_num + 1}: expected two columns, got {len(cells)}")
            try:
                x, v = float(cells[0]), float(cells[1])
            except ValueError:
                if row_num == 0:
                    continue  # header row
                raise ValueError(f"{path}: row {row_num + 1}: non-numeric data") from None
            positions.append(x)
            values.append(v)
    if len(positions) < 2:
        raise ValueError(f"{path}: need at least two data rows")
    return TabulatedPotential(grid=tuple(positions), values=tuple(values))
