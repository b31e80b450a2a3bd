import math
import random
from fractions import Fraction

import numpy as np
import pytest

from helpers import random_sb
from padic_dispersion.errors import DomainError, ResourceCapError
from padic_dispersion.padic import Ball, split_p_part
from padic_dispersion.polynomials import parse_polynomial
from padic_dispersion.schwartz import SchwartzBruhatFn, l2_norm, l2_norm_modulated
from padic_dispersion.wave import (
    SolutionSpec,
    solution_grid,
    solve_u,
    strichartz_report,
    strichartz_truncated,
    windowed_spectrum,
)

GAUSS = SolutionSpec.build(
    SchwartzBruhatFn.indicator(Ball.of(3, [0], 0)), parse_polynomial("x^2")
)


def seeded_strichartz_data(rng: random.Random, p: int):
    """Radius-exponent-0 balls with p^-1-grid centers: disjoint but cheap."""
    terms = []
    for _ in range(rng.randint(1, 3)):
        center = (Fraction(rng.randint(0, p - 1), p),)
        ball = Ball.of(p, center, 0)
        if any(not ball.is_disjoint(b) for b, _ in terms):
            continue
        terms.append((ball, complex(rng.uniform(-2, 2), rng.uniform(-2, 2))))
    return SchwartzBruhatFn.of(p, terms)


class TestSolutionSpec:
    def test_bounds_for_unit_data(self):
        assert GAUSS.freq_bound == 0 and GAUSS.phase_bound == 0

    def test_bounds_for_small_ball(self):
        spec = SolutionSpec.build(
            SchwartzBruhatFn.indicator(Ball.of(3, [0], 1)), parse_polynomial("x^3")
        )
        assert spec.freq_bound == 1 and spec.phase_bound == 3

    def test_plancherel(self):
        rng = random.Random(77)
        for p in (2, 3, 5):
            g = random_sb(rng, p, 1)
            spec = SolutionSpec.build(g, parse_polynomial("x^2"))
            assert abs(l2_norm(g) - l2_norm_modulated(spec.spectrum)) < 1e-12

    def test_arity_validation(self):
        with pytest.raises(DomainError):
            SolutionSpec.build(
                SchwartzBruhatFn.indicator(Ball.of(3, [0], 0)),
                parse_polynomial("x1^2+x2^2"),
            )


class TestSolveU:
    def test_initial_condition_exact(self):
        rng = random.Random(15)
        for p in (2, 3):
            for _ in range(4):
                f0 = random_sb(rng, p, 1)
                spec = SolutionSpec.build(f0, parse_polynomial("x^2"))
                for _ in range(8):
                    x = Fraction(rng.randint(-p**2, p**2), p ** rng.randint(0, 2))
                    got = solve_u(spec, (x,), 0)
                    assert abs(got - f0.value_at((x,))) < 1e-12

    def test_constant_region(self):
        assert abs(solve_u(GAUSS, (2,), 1) - 1.0) < 1e-12

    def test_gauss_decay_in_time(self):
        for m in range(1, 6):
            u = solve_u(GAUSS, (0,), Fraction(1, 3**m))
            assert abs(abs(u) - 3 ** (-m / 2)) < 1e-9

    def test_vanishes_outside_light_cone(self):
        assert abs(solve_u(GAUSS, (Fraction(1, 3),), 1)) < 1e-12

    def test_local_constancy(self):
        # f0 = 1_{3Z_3}: spectrum fills ||xi|| <= 3, so e = 1 and, for
        # phi = x^2, e' = 2.  u must be invariant under x-shifts with
        # ||h|| <= 3^-1 and t-shifts with |s| <= 3^-2, exhaustively at
        # one scale below those thresholds.
        spec = SolutionSpec.build(
            SchwartzBruhatFn.indicator(Ball.of(3, [0], 1)), parse_polynomial("x^2")
        )
        assert (spec.freq_bound, spec.phase_bound) == (1, 2)
        t = Fraction(1, 9)
        for x in (Fraction(0), Fraction(1), Fraction(1, 3), Fraction(2, 9)):
            base = solve_u(spec, (x,), t)
            for h in (Fraction(3), Fraction(6), Fraction(9)):
                assert abs(solve_u(spec, (x + h,), t) - base) < 1e-12
            for s in (Fraction(9), Fraction(18)):
                assert abs(solve_u(spec, (x,), t + s) - base) < 1e-12

    def test_refinement_stability(self):
        rng = random.Random(21)
        for _ in range(5):
            f0 = random_sb(rng, 3, 1)
            spec = SolutionSpec.build(f0, parse_polynomial("x^3 - x"))
            x = (Fraction(rng.randint(-9, 9), 3 ** rng.randint(0, 1)),)
            t = Fraction(rng.randint(-9, 9), 3 ** rng.randint(0, 2))
            a = solve_u(spec, x, t)
            b = solve_u(spec, x, t, extra_level=1)
            assert abs(a - b) < 1e-12

    def test_two_dimensional(self):
        f0 = SchwartzBruhatFn.indicator(Ball.of(3, [0, 0], 0))
        spec = SolutionSpec.build(f0, parse_polynomial("x1^2+x2^2"))
        assert abs(solve_u(spec, (0, 0), 0) - 1.0) < 1e-12
        u = solve_u(spec, (0, 0), Fraction(1, 3))
        assert abs(abs(u) - 1 / 3) < 1e-9  # product of two Gauss factors


class TestWindowedSpectrum:
    def test_off_surface_vanishes(self):
        assert windowed_spectrum(GAUSS, (0,), Fraction(1, 3), 1) == 0j

    def test_on_surface_nonzero(self):
        assert abs(windowed_spectrum(GAUSS, (0,), 0, 0)) > 0.1

    def test_far_frequency_vanishes(self):
        # ||xi|| = 9 lies outside the spectrum ball ||xi|| <= 1
        assert windowed_spectrum(GAUSS, (Fraction(1, 9),), 0, 1) == 0j

    def test_off_surface_grid(self):
        for j in (1, 2, 4, 5, 7):
            for xi in (0, 1, 2, Fraction(1, 3), Fraction(2, 3)):
                W = windowed_spectrum(GAUSS, (Fraction(xi),), Fraction(j, 3), 1)
                assert abs(W) < 1e-12

    def test_window_growth_keeps_support(self):
        # tau = phi(xi) on the parabola: stays nonzero as R grows
        for R in (0, 1, 2):
            W = windowed_spectrum(GAUSS, (1,), 1, R)
            assert abs(W) > 1e-6

    @pytest.mark.parametrize(
        "xi,tau", [(1, 1), (0, 0), (2, 1), (Fraction(1, 3), Fraction(1, 9))]
    )
    def test_closed_form_matches_direct_integration(self, xi, tau):
        # oracle: Riemann sum of u(x,t) Psi(-t tau - x xi) over the box,
        # sampled where both u (scale p^0 here) and the kernel are constant
        import cmath

        R, p = 1, 3
        xi, tau = Fraction(xi), Fraction(tau)
        s = 0
        for c in (xi, tau):
            if c != 0:
                s = max(s, -split_p_part(c, p)[1])
        reps = [Fraction(a, p**R) for a in range(p ** (R + s))]
        cell = (float(p) ** -s) ** 2
        total = 0j
        for x in reps:
            for t in reps:
                phase = -(t * tau) - (x * xi)
                phase -= math.floor(phase)
                total += (
                    solve_u(GAUSS, (x,), t)
                    * cmath.exp(2j * math.pi * float(phase))
                    * cell
                )
        want = windowed_spectrum(GAUSS, (xi,), tau, R)
        assert abs(total - want) < 1e-9


class TestSolutionGrid:
    def test_grid_column_equals_exponential_sum(self):
        # for f0 = 1_{Z_p}, u(0, t) = int_{Z_p} Psi(t phi(xi)) dxi = E(t, phi):
        # the wave grid and the histogram engine must agree exactly
        from padic_dispersion.expsums import exp_sum

        phi = parse_polynomial("x^3")
        spec = SolutionSpec.build(
            SchwartzBruhatFn.indicator(Ball.of(5, [0], 0)), phi
        )
        grid = solution_grid(spec, 2)
        ball = Ball.of(5, [0], 0)
        for j, t in enumerate(grid.t_reps):
            if t == 0:
                continue
            want = exp_sum(phi, t, ball).value
            assert abs(grid.values[j, 0] - want) < 1e-12

    def test_grid_matches_pointwise(self):
        rng = random.Random(33)
        for p, phi in ((3, "x^2"), (5, "x^3")):
            f0 = seeded_strichartz_data(rng, p)
            spec = SolutionSpec.build(f0, parse_polynomial(phi))
            grid = solution_grid(spec, 2)
            for _ in range(10):
                i = rng.randrange(len(grid.x_axis))
                j = rng.randrange(len(grid.t_reps))
                want = solve_u(spec, (grid.x_axis[i],), grid.t_reps[j])
                assert abs(grid.values[j, i] - want) < 1e-12

    def test_grid_matches_pointwise_2d(self):
        f0 = SchwartzBruhatFn.indicator(Ball.of(3, [0, 0], 0))
        spec = SolutionSpec.build(f0, parse_polynomial("x1^2+x2^2"))
        grid = solution_grid(spec, 1)
        from itertools import product as iproduct

        points = list(iproduct(grid.x_axis, repeat=2))
        for idx in (0, 3, 7, len(points) - 1):
            want = solve_u(spec, points[idx], grid.t_reps[1])
            assert abs(grid.values[1, idx] - want) < 1e-12


class TestStrichartz:
    def test_unit_window_norm_one(self):
        assert abs(strichartz_truncated(GAUSS, 6.0, 0) - 1.0) < 1e-12

    def test_scaling_homogeneity(self):
        f0 = SchwartzBruhatFn.indicator(Ball.of(3, [0], 0))
        for c in (2.0, 0.5 - 1.0j):
            spec_c = SolutionSpec.build(f0.scaled(c), parse_polynomial("x^2"))
            a = strichartz_truncated(spec_c, 6.0, 2)
            b = strichartz_truncated(GAUSS, 6.0, 2)
            assert abs(a - abs(c) * b) < 1e-12

    def test_monotone_in_R(self):
        norms = [strichartz_truncated(GAUSS, 6.0, R) for R in range(4)]
        assert all(b >= a - 1e-15 for a, b in zip(norms, norms[1:]))

    def test_gauss_sigma_6_converges(self):
        rep = strichartz_report(GAUSS, 6.0, 4)
        assert rep.converged and not rep.diverged
        assert all(b <= a + 1e-12 for a, b in zip(rep.increments, rep.increments[1:]))
        assert rep.constant == rep.rows[-1][2]

    def test_airy_sigma_8_converges(self):
        spec = SolutionSpec.build(
            SchwartzBruhatFn.indicator(Ball.of(5, [0], 0)), parse_polynomial("x^3")
        )
        rep = strichartz_report(spec, 8.0, 4)
        assert rep.converged and not rep.diverged

    def test_sigma_2_diverges(self):
        rep = strichartz_report(GAUSS, 2.0, 4)
        assert rep.diverged

    def test_ratio_invariant_under_scaling(self):
        f0 = SchwartzBruhatFn.indicator(Ball.of(3, [0], 0))
        base = strichartz_report(GAUSS, 6.0, 3).constant
        for c in (3.0, -0.7 + 0.7j):
            spec_c = SolutionSpec.build(f0.scaled(c), parse_polynomial("x^2"))
            assert abs(strichartz_report(spec_c, 6.0, 3).constant - base) < 1e-12

    def test_infinite_sigma(self):
        assert strichartz_truncated(GAUSS, math.inf, 1) <= 1.0 + 1e-12

    def test_cap(self):
        with pytest.raises(ResourceCapError):
            solution_grid(GAUSS, 9, cap=1000)
