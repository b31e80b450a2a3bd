"""Exact solution of the wave-type pseudo-differential equation and its
dispersive decay at desk scale.

The solution of (Hu)(x,t) = 0, u(x,0) = f0 with symbol |tau - phi(xi)|_K is

    u(x, t) = int Psi(t phi(xi) + [x, xi]) (F f0)(xi) |dxi|,

a finite sum over frequency cells because F f0 is a finite combination of
modulated ball indicators.  Truncated L^sigma norms over growing boxes stand
in for the full space-time norms; their increments decide convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceCapError
from .padic import (
    Ball,
    DEFAULT_ENUMERATION_CAP,
    PadicRational,
    character,
    split_p_part,
)
from .polynomials import SparsePolynomial
from .schwartz import (
    ModulatedSBFn,
    SchwartzBruhatFn,
    fourier_sb,
    l2_norm,
)

_GRID_LIMIT = 1 << 26


@dataclass(frozen=True)
class SolutionSpec:
    """Initial data, symbol polynomial, and the exact spectrum F f0.

    freq_bound e: supp(F f0) lies in ||xi|| <= p^e, so u(., t) is locally
    constant at scale p^-e.  phase_bound e': |phi(xi)| <= p^e' on the
    spectrum, so u(x, .) is locally constant at scale p^-e'.
    """

    f0: SchwartzBruhatFn
    phi: SparsePolynomial
    spectrum: ModulatedSBFn
    freq_bound: int
    phase_bound: int

    @classmethod
    def build(cls, f0: SchwartzBruhatFn, phi: SparsePolynomial) -> "SolutionSpec":
        if phi.nvars != f0.n:
            raise DomainError("phi arity must match the spatial dimension")
        if phi.constant_term != 0:
            raise DomainError("phi(0) = 0 required")
        spectrum = fourier_sb(f0, -1)
        e = spectrum.support_bound
        ep = max(
            -split_p_part(c, f0.prime)[1] + e * sum(exps)
            for exps, c in phi.terms
        )
        return cls(f0, phi, spectrum, e, ep)

    @property
    def prime(self) -> int:
        return self.f0.prime

    @property
    def n(self) -> int:
        return self.f0.n


def _freq_cells(
    spec: SolutionSpec, level: int, cap: int
) -> list[tuple[tuple[Fraction, ...], complex]]:
    """Centers and spectrum values of the cells of radius p^-level tiling the
    spectrum support ball; zero-valued cells are dropped."""
    p, n, e = spec.prime, spec.n, spec.freq_bound
    width = p ** (e + level)
    if width**n > cap:
        raise ResourceCapError(width**n, cap, what="frequency cells")
    step = Fraction(1, p**e) if e >= 0 else Fraction(p**-e)
    cells = []
    for k in product(range(width), repeat=n):
        center = tuple(step * ki for ki in k)
        value = spec.spectrum.value_at(center)
        if value != 0:
            cells.append((center, value))
    return cells


def _cell_level(
    spec: SolutionSpec,
    x: Sequence[Fraction],
    t: Fraction,
    extra_level: int,
) -> int:
    d = spec.phi.total_degree()
    e = spec.freq_bound
    level = max(0, e, spec.spectrum.resolution_level)
    for xi in x:
        if xi != 0:
            level = max(level, -split_p_part(xi, spec.prime)[1])
    if t != 0:
        level = max(
            level, -split_p_part(t, spec.prime)[1] + (d - 1) * max(e, 0)
        )
    return level + extra_level


def solve_u(
    spec: SolutionSpec,
    x: Sequence,
    t,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
    extra_level: int = 0,
) -> complex:
    """u(x, t) as the exact finite sum over frequency cells.

    The cell level makes the integrand constant per cell, so the value is
    independent of any further refinement; u(x, 0) = f0(x) exactly.
    """
    p = spec.prime
    x = tuple(
        xi.as_fraction() if isinstance(xi, PadicRational) else Fraction(xi)
        for xi in x
    )
    if len(x) != spec.n:
        raise DomainError("x has wrong dimension")
    t = t.as_fraction() if isinstance(t, PadicRational) else Fraction(t)
    level = _cell_level(spec, x, t, extra_level)
    vol = Fraction(1, p ** (spec.n * level))
    total = 0j
    for center, value in _freq_cells(spec, level, cap):
        phase = t * spec.phi.evaluate(center) + sum(
            (a * b for a, b in zip(x, center)), Fraction(0)
        )
        total += value * character(phase, p).complex_value
    return total * float(vol)


def windowed_spectrum(
    spec: SolutionSpec,
    xi: Sequence,
    tau,
    R: int,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
    extra_level: int = 0,
) -> complex:
    """W_R(xi, tau) = int_{||x||<=p^R} int_{|t|<=p^R} u Psi(-t tau - [x, xi]).

    In closed form this is p^(R(n+1)) times the sum of cell contributions
    whose centers satisfy both |phi(c) - tau| <= p^-R and ||c - xi|| <= p^-R;
    it vanishes exactly when every cell fails one of the two conditions,
    which is the finite-window witness that F u lives on tau = phi(xi).
    """
    if R < 0:
        raise DomainError("window exponent R must be >= 0")
    p = spec.prime
    xi = tuple(
        c.as_fraction() if isinstance(c, PadicRational) else Fraction(c)
        for c in xi
    )
    if len(xi) != spec.n:
        raise DomainError("xi has wrong dimension")
    tau = tau.as_fraction() if isinstance(tau, PadicRational) else Fraction(tau)
    d = spec.phi.total_degree()
    e = spec.freq_bound
    level = (
        max(0, e, spec.spectrum.resolution_level, R, R + (d - 1) * max(e, 0))
        + extra_level
    )
    vol = Fraction(1, p ** (spec.n * level))
    window = Fraction(p ** (R * (spec.n + 1)))
    total = 0j
    for center, value in _freq_cells(spec, level, cap):
        if not _val_at_least(spec.phi.evaluate(center) - tau, p, R):
            continue
        if not all(_val_at_least(c - z, p, R) for c, z in zip(center, xi)):
            continue
        total += value
    return total * float(vol * window)


def _val_at_least(x: Fraction, p: int, k: int) -> bool:
    return x == 0 or split_p_part(x, p)[1] >= k


# -- truncated Strichartz norms ------------------------------------------------


@dataclass(frozen=True)
class SolutionGrid:
    """u sampled on the local-constancy grid of a box ||x||, |t| <= p^R.

    x points run over the n-fold product of x_axis in lexicographic order;
    values has shape (len(t_reps), len(x_axis)**n).
    """

    R: int
    n: int
    prime: int
    x_axis: tuple[Fraction, ...]
    t_reps: tuple[Fraction, ...]
    values: np.ndarray
    x_cell_vol: float  # volume of one full n-dimensional x cell
    t_cell_vol: float


def solution_grid(
    spec: SolutionSpec,
    R: int,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> SolutionGrid:
    """Evaluate u on every constancy cell of the box; exact up to the final
    complex arithmetic.  One spatial dimension is vectorised; higher
    dimensions fall back to pointwise summation."""
    if R < 0:
        raise DomainError("R must be >= 0")
    p, n = spec.prime, spec.n
    e, ep, d = spec.freq_bound, spec.phase_bound, spec.phi.total_degree()
    nx_exp = max(0, R + e)
    nt_exp = max(0, R + ep)
    level = max(0, e, spec.spectrum.resolution_level, R, R + (d - 1) * max(e, 0))
    n_cells = p ** (n * (e + level))
    if (p**nx_exp) ** n * p**nt_exp > cap or n_cells > cap:
        raise ResourceCapError(
            max((p**nx_exp) ** n * p**nt_exp, n_cells), cap, what="grid samples"
        )
    x_step = Fraction(1, p**R)
    xs = [x_step * j for j in range(p**nx_exp)]
    ts = [x_step * j for j in range(p**nt_exp)]
    axis_vol = float(Fraction(p) ** R) / len(xs)
    t_vol = float(Fraction(p) ** R) / len(ts)
    if n == 1:
        values = _grid_values_1d(spec, R, level, xs, ts, cap)
    else:
        cells = _freq_cells(spec, level, cap)
        vol = float(Fraction(1, p ** (n * level)))
        x_points = list(product(xs, repeat=n))
        values = np.empty((len(ts), len(x_points)), dtype=complex)
        for j, t in enumerate(ts):
            for i, xpt in enumerate(x_points):
                total = 0j
                for center, value in cells:
                    phase = t * spec.phi.evaluate(center) + sum(
                        (a * b for a, b in zip(xpt, center)), Fraction(0)
                    )
                    total += value * character(phase, p).complex_value
                values[j, i] = total * vol
    return SolutionGrid(
        R, n, p, tuple(xs), tuple(ts), values, axis_vol**n, t_vol
    )


def _grid_values_1d(
    spec: SolutionSpec,
    R: int,
    level: int,
    xs: list[Fraction],
    ts: list[Fraction],
    cap: int,
) -> np.ndarray:
    p = spec.prime
    cells = _freq_cells(spec, level, cap)
    nc, nt, nx = len(cells), len(ts), len(xs)
    if nc * nt + nc * nx > _GRID_LIMIT:
        raise ResourceCapError(nc * (nt + nx), _GRID_LIMIT, what="grid phases")
    vol = float(Fraction(1, p ** (spec.n * level)))
    # Phase of t_j * phi(cell_k): t_j = j p^-R, phi(cell_k) = unit p^val.
    A = np.empty((nt, nc), dtype=complex)
    j_arr = np.arange(nt, dtype=np.int64)
    for k, (center, value) in enumerate(cells):
        ph = Fraction(spec.phi.evaluate(center))
        if ph == 0:
            A[:, k] = value * vol
            continue
        unit, val = split_p_part(ph, p)
        if val >= R:
            A[:, k] = value * vol
            continue
        modulus = p ** (R - val)
        if modulus > 1 << 31:
            raise ResourceCapError(modulus, 1 << 31, what="phase denominator")
        a = unit % modulus
        phases = (j_arr % modulus) * a % modulus
        A[:, k] = value * vol * np.exp(2j * np.pi * phases / modulus)
    # Phase of x_i * cell_k: x_i = i p^-R, cell_k = k p^-e.
    e = spec.freq_bound
    B = np.empty((nc, nx), dtype=complex)
    i_arr = np.arange(nx, dtype=np.int64)
    if R + e <= 0:
        B[:, :] = 1.0
    else:
        modulus = p ** (R + e)
        if modulus > 1 << 31:
            raise ResourceCapError(modulus, 1 << 31, what="phase denominator")
        for k in range(nc):
            B[k, :] = np.exp(
                2j * np.pi * ((i_arr % modulus) * (k % modulus) % modulus) / modulus
            )
    return A @ B


def strichartz_truncated(
    spec: SolutionSpec,
    sigma: float,
    R: int,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Exact L^sigma norm of u over the box ||x|| <= p^R, |t| <= p^R."""
    grid = solution_grid(spec, R, cap=cap)
    return _masked_norm(grid, sigma, R)


def _masked_norm(grid: SolutionGrid, sigma: float, R: int) -> float:
    """Norm over the sub-box ||x||, |t| <= p^R of a grid computed at grid.R.

    Reps are j p^-grid.R, so the sub-box keeps indices divisible by
    p^(grid.R - R); u is refinement-stable, so the restriction is exact.
    """
    steps = grid.R - R
    if steps < 0:
        raise DomainError("R exceeds the grid box")
    p = grid.prime
    tmask = _valuation_mask(len(grid.t_reps), p, steps)
    axis = _valuation_mask(len(grid.x_axis), p, steps)
    xmask = axis
    for _ in range(grid.n - 1):
        xmask = np.logical_and.outer(xmask, axis).ravel()
    sub = grid.values[np.ix_(tmask, xmask)]
    if sigma == math.inf:
        return float(np.max(np.abs(sub))) if sub.size else 0.0
    weights = grid.x_cell_vol * grid.t_cell_vol
    total = float(np.sum(np.abs(sub) ** sigma) * weights)
    return total ** (1.0 / sigma)


def _valuation_mask(count: int, p: int, steps: int) -> np.ndarray:
    if steps <= 0 or count == 1:
        return np.ones(count, dtype=bool)
    return np.arange(count) % p**steps == 0


@dataclass(frozen=True)
class StrichartzReport:
    sigma: float
    rows: tuple[tuple[int, float, float], ...]  # (R, norm, norm / ||f0||_2)
    increments: tuple[float, ...]  # norm(R)^sigma - norm(R-1)^sigma
    converged: bool
    diverged: bool
    constant: float  # final ratio


def strichartz_report(
    spec: SolutionSpec,
    sigma: float,
    R_max: int,
    *,
    shrink_threshold: float = 0.9,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> StrichartzReport:
    """Truncated-norm series R = 0..R_max with a convergence diagnosis.

    Converging means the increments norm(R+1)^sigma - norm(R)^sigma are
    non-increasing over the tail; the divergence flag fires when they fail
    to shrink over the last three steps (the sigma-too-small regime).
    """
    if R_max < 1:
        raise DomainError("R_max must be >= 1")
    grid = solution_grid(spec, R_max, cap=cap)
    base = l2_norm(spec.f0)
    norms = [_masked_norm(grid, sigma, R) for R in range(R_max + 1)]
    rows = tuple(
        (R, norms[R], norms[R] / base) for R in range(R_max + 1)
    )
    increments = tuple(
        norms[R] ** sigma - norms[R - 1] ** sigma for R in range(1, R_max + 1)
    )
    converged = all(
        increments[i + 1] <= increments[i] * (1 + 1e-9) + 1e-300
        for i in range(len(increments) - 1)
    )
    tail = increments[-3:]
    ratios = [
        tail[i + 1] / tail[i] if tail[i] > 0 else 1.0
        for i in range(len(tail) - 1)
    ]
    diverged = bool(ratios) and min(ratios) >= shrink_threshold
    return StrichartzReport(
        sigma, rows, increments, converged, diverged, rows[-1][2]
    )
