"""Schwartz-Bruhat functions on Q_p^n and their exact Fourier transforms.

A Schwartz-Bruhat function is a finite combination of disjoint ball
indicators.  Its transform is a finite combination of *modulated* ball
indicators coeff * Psi(-[b, xi]) * 1_Ball(xi), and that class is closed under
both transform signs term by term:

    int Psi(sign [x, xi]) Psi(-[b, xi]) 1_{a + (p^r Z)^n}(xi) dxi
        = Psi(-[b, a]) p^(-n r) Psi(sign [x, a]) 1_{sign b + (p^{-r} Z)^n}(x)

The forward transform uses Psi(-[x, xi]) (sign = -1), the inverse
Psi(+[x, xi]).  Outputs are canonicalised to pairwise-disjoint balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import DomainError, ResourceCapError
from .padic import Ball, PadicRational, character, split_p_part

_COSET_CAP = 10**6

Vector = tuple[PadicRational, ...]


def _as_padic_vector(prime: int, v: Sequence) -> Vector:
    return tuple(
        x if isinstance(x, PadicRational) else PadicRational(prime, x) for x in v
    )


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def _lev(b: Sequence[PadicRational]) -> int:
    """Smallest L with Psi(-[b, .]) constant on cosets of (p^L Z_p)^n."""
    worst = 0
    for x in b:
        if not x.is_zero:
            worst = max(worst, -x._val)
    return worst


def _coset_rep(x: Fraction, p: int, s: int) -> Fraction:
    """Canonical representative of x mod p^s Z_p in [0, p^s)."""
    unit, val = split_p_part(x, p)
    if unit == 0 or val >= s:
        return Fraction(0)
    if val >= 0:
        return Fraction(unit * p**val % p**s)
    return Fraction(unit % p ** (s - val), p**-val)


def _ball_cosets(ball: Ball, scale: int, cap: int = _COSET_CAP) -> list[Vector]:
    """Centers of the cosets of (p^scale Z_p)^n partitioning the ball."""
    p, n, e = ball.prime, ball.dim, ball.radius_exp
    if scale < e:
        raise DomainError("coset scale must refine the ball")
    width = p ** (scale - e)
    if width**n > cap:
        raise ResourceCapError(width**n, cap, what="cosets")
    step = Fraction(p) ** e
    centers = ball.center_fractions()
    out = []
    for t in product(range(width), repeat=n):
        out.append(
            _as_padic_vector(
                p, tuple(c + step * ti for c, ti in zip(centers, t))
            )
        )
    return out


@dataclass(frozen=True)
class SchwartzBruhatFn:
    """Finite complex combination of pairwise disjoint ball indicators."""

    n: int
    prime: int
    terms: tuple[tuple[Ball, complex], ...]

    def __post_init__(self):
        balls = [b for b, _ in self.terms]
        for b in balls:
            if b.dim != self.n or b.prime != self.prime:
                raise DomainError("ball shape mismatch")
        for i in range(len(balls)):
            for j in range(i + 1, len(balls)):
                if not balls[i].is_disjoint(balls[j]):
                    raise DomainError(
                        f"balls {i} and {j} overlap; terms must be disjoint"
                    )

    @classmethod
    def of(cls, prime: int, terms: Sequence[tuple[Ball, complex]]) -> "SchwartzBruhatFn":
        if not terms:
            raise DomainError("empty Schwartz-Bruhat function")
        n = terms[0][0].dim
        return cls(n, prime, tuple((b, complex(c)) for b, c in terms))

    @classmethod
    def indicator(cls, ball: Ball, coeff: complex = 1.0) -> "SchwartzBruhatFn":
        return cls(ball.dim, ball.prime, ((ball, complex(coeff)),))

    def value_at(self, point: Sequence[Fraction | int]) -> complex:
        point = tuple(Fraction(x) for x in point)
        total = 0j
        for ball, coeff in self.terms:
            if ball.contains_point(point):
                total += coeff
        return total

    def scaled(self, factor: complex) -> "SchwartzBruhatFn":
        return SchwartzBruhatFn(
            self.n, self.prime, tuple((b, factor * c) for b, c in self.terms)
        )

    def translated(self, shift: Sequence) -> "SchwartzBruhatFn":
        """g(x - shift): every ball center moves by shift."""
        shift = _as_padic_vector(self.prime, shift)
        terms = []
        for ball, coeff in self.terms:
            center = tuple(c + s for c, s in zip(ball.center, shift))
            terms.append((Ball(self.prime, center, ball.radius_exp), coeff))
        return SchwartzBruhatFn(self.n, self.prime, tuple(terms))


@dataclass(frozen=True)
class ModulatedSBFn:
    """Finite sum of terms coeff * Psi(-[b, xi]) * 1_Ball(xi), disjoint balls."""

    n: int
    prime: int
    terms: tuple[tuple[Ball, Vector, complex], ...]

    def __post_init__(self):
        balls = [b for b, _, _ in self.terms]
        for b, mod, _ in self.terms:
            if b.dim != self.n or len(mod) != self.n:
                raise DomainError("term shape mismatch")
        for i in range(len(balls)):
            for j in range(i + 1, len(balls)):
                if not balls[i].is_disjoint(balls[j]):
                    raise DomainError("modulated terms must live on disjoint balls")

    def value_at(self, point: Sequence[Fraction | int]) -> complex:
        point = tuple(Fraction(x) for x in point)
        total = 0j
        for ball, mod, coeff in self.terms:
            if ball.contains_point(point):
                phase = character(
                    PadicRational(
                        self.prime,
                        -_dot([m.as_fraction() for m in mod], point),
                    )
                )
                total += coeff * phase.complex_value
        return total

    @property
    def support_bound(self) -> int:
        """Smallest E with support contained in ||xi|| <= p^E."""
        worst = None
        for ball, _, _ in self.terms:
            e = -ball.radius_exp
            for c in ball.center:
                if not c.is_zero:
                    e = max(e, -c._val)
            worst = e if worst is None else max(worst, e)
        if worst is None:
            raise DomainError("empty spectrum")
        return worst

    @property
    def resolution_level(self) -> int:
        """Cells of radius p^-M with M at least this resolve every term."""
        level = 0
        for ball, mod, _ in self.terms:
            level = max(level, ball.radius_exp, _lev(mod))
        return level


def _trusted_modulated(
    n: int, prime: int, terms: tuple[tuple[Ball, Vector, complex], ...]
) -> ModulatedSBFn:
    """Construct without the O(k^2) disjointness re-check; callers guarantee
    the terms came out of the canonicaliser."""
    obj = object.__new__(ModulatedSBFn)
    object.__setattr__(obj, "n", n)
    object.__setattr__(obj, "prime", prime)
    object.__setattr__(obj, "terms", terms)
    return obj


def _trusted_schwartz(
    n: int, prime: int, terms: tuple[tuple[Ball, complex], ...]
) -> SchwartzBruhatFn:
    obj = object.__new__(SchwartzBruhatFn)
    object.__setattr__(obj, "n", n)
    object.__setattr__(obj, "prime", prime)
    object.__setattr__(obj, "terms", terms)
    return obj


def _term_transform(
    prime: int,
    ball: Ball,
    mod: Vector,
    coeff: complex,
    sign: int,
) -> tuple[Ball, Vector, complex]:
    """Exact transform of one modulated indicator (see module docstring)."""
    n = ball.dim
    r = ball.radius_exp
    a0 = ball.center_fractions()
    b = [m.as_fraction() for m in mod]
    phase = character(PadicRational(prime, -_dot(b, a0)))
    volume = Fraction(1, prime ** (n * r)) if r >= 0 else Fraction(prime ** (-n * r))
    out_center = _as_padic_vector(prime, tuple(sign * x for x in b))
    out_mod = _as_padic_vector(prime, tuple(-sign * x for x in a0))
    out_coeff = coeff * phase.complex_value * float(volume)
    return Ball(prime, out_center, -r), out_mod, out_coeff


def _disjointify(
    prime: int,
    n: int,
    raw: list[tuple[Ball, Vector, complex]],
    cap: int = _COSET_CAP,
) -> list[tuple[Ball, Vector, complex]]:
    """Rewrite overlapping modulated terms over pairwise disjoint balls.

    Balls in an ultrametric space are nested or disjoint, so the distinct
    balls form a containment forest.  Each ball's region (itself minus its
    children) is tiled by cosets; where several terms cover a coset their
    modulations are folded into a plain coefficient at a scale fine enough
    for all of them to be constant.
    """
    merged: dict[tuple[Ball, Vector], complex] = {}
    for ball, mod, coeff in raw:
        key = (ball, mod)
        merged[key] = merged.get(key, 0j) + coeff
    terms = [(b, m, c) for (b, m), c in merged.items() if c != 0]
    if not terms:
        return []
    balls = sorted({b for b, _, _ in terms}, key=lambda b: b.radius_exp)
    parent: dict[Ball, Ball | None] = {}
    for b in balls:
        best = None
        for other in balls:
            if other is b or other == b:
                continue
            if other.contains_ball(b) and (
                best is None or other.radius_exp > best.radius_exp
            ):
                best = other
        parent[b] = best
    children: dict[Ball, list[Ball]] = {b: [] for b in balls}
    for b, par in parent.items():
        if par is not None:
            children[par].append(b)
    by_ball: dict[Ball, list[tuple[Vector, complex]]] = {b: [] for b in balls}
    for ball, mod, coeff in terms:
        by_ball[ball].append((mod, coeff))

    out: list[tuple[Ball, Vector, complex]] = []
    for ball in balls:
        covering: list[tuple[Vector, complex]] = []
        anc: Ball | None = ball
        while anc is not None:
            covering.extend(by_ball[anc])
            anc = parent[anc]
        kids = children[ball]
        if not kids and len(covering) == 1:
            mod, coeff = covering[0]
            out.append((ball, mod, coeff))
            continue
        scale = max(
            [ball.radius_exp]
            + [k.radius_exp for k in kids]
            + ([max(_lev(m) for m, _ in covering)] if len(covering) > 1 else [])
        )
        for center in _ball_cosets(ball, scale, cap):
            point = tuple(c.as_fraction() for c in center)
            if any(k.contains_point(point) for k in kids):
                continue
            coset = Ball(prime, center, scale)
            if len(covering) == 1:
                mod, coeff = covering[0]
                out.append((coset, mod, coeff))
            else:
                total = 0j
                for mod, coeff in covering:
                    phase = character(
                        PadicRational(
                            prime,
                            -_dot([m.as_fraction() for m in mod], point),
                        )
                    )
                    total += coeff * phase.complex_value
                if total != 0:
                    out.append((coset, _as_padic_vector(prime, (0,) * n), total))
    return out


def fourier_modulated(G: ModulatedSBFn, sign: int) -> ModulatedSBFn:
    if sign not in (-1, 1):
        raise DomainError("sign must be -1 (forward) or +1 (inverse)")
    raw = [
        _term_transform(G.prime, ball, mod, coeff, sign)
        for ball, mod, coeff in G.terms
    ]
    return _trusted_modulated(G.n, G.prime, tuple(_disjointify(G.prime, G.n, raw)))


def embed(g: SchwartzBruhatFn) -> ModulatedSBFn:
    zero = _as_padic_vector(g.prime, (0,) * g.n)
    return ModulatedSBFn(
        g.n, g.prime, tuple((ball, zero, coeff) for ball, coeff in g.terms)
    )


def to_schwartz(G: ModulatedSBFn) -> SchwartzBruhatFn:
    """Fold modulations into locally constant coefficients."""
    plain: list[tuple[Ball, complex]] = []
    for ball, mod, coeff in G.terms:
        lev = _lev(mod)
        if lev <= ball.radius_exp:
            phase = character(
                PadicRational(
                    G.prime,
                    -_dot(
                        [m.as_fraction() for m in mod], ball.center_fractions()
                    ),
                )
            )
            plain.append((ball, coeff * phase.complex_value))
            continue
        for center in _ball_cosets(ball, lev):
            phase = character(
                PadicRational(
                    G.prime,
                    -_dot(
                        [m.as_fraction() for m in mod],
                        [c.as_fraction() for c in center],
                    ),
                )
            )
            plain.append((Ball(G.prime, center, lev), coeff * phase.complex_value))
    return _trusted_schwartz(G.n, G.prime, tuple(plain))


def fourier_sb(g: SchwartzBruhatFn, sign: int = -1) -> ModulatedSBFn:
    """Exact Fourier transform of a Schwartz-Bruhat function.

    sign = -1 is the forward convention Psi(-[x, xi]); sign = +1 the inverse.
    """
    return fourier_modulated(embed(g), sign)


def inverse_fourier_sb(G: ModulatedSBFn, sign: int = 1) -> SchwartzBruhatFn:
    return to_schwartz(fourier_modulated(G, sign))


# -- norms and comparisons ----------------------------------------------------


def lp_norm(g: SchwartzBruhatFn, rho: float) -> float:
    """||g||_rho, exact thanks to disjointness; rho = inf gives max |coeff|."""
    if rho != math.inf and rho < 1:
        raise DomainError("rho must be >= 1 or infinity")
    if rho == math.inf:
        return max(abs(c) for _, c in g.terms)
    total = sum(abs(c) ** rho * float(ball.volume) for ball, c in g.terms)
    return total ** (1.0 / rho)


def l2_norm(g: SchwartzBruhatFn) -> float:
    return lp_norm(g, 2)


def l2_norm_modulated(G: ModulatedSBFn) -> float:
    total = sum(abs(c) ** 2 * float(ball.volume) for ball, _, c in G.terms)
    return math.sqrt(total)


def sb_allclose(g1: SchwartzBruhatFn, g2: SchwartzBruhatFn, tol: float = 1e-12) -> bool:
    """Coefficientwise comparison after resampling to a common coset scale."""
    scale = max(
        [b.radius_exp for b, _ in g1.terms] + [b.radius_exp for b, _ in g2.terms]
    )

    def tabulate(g: SchwartzBruhatFn) -> dict[tuple[Fraction, ...], complex]:
        table: dict[tuple[Fraction, ...], complex] = {}
        for ball, coeff in g.terms:
            for center in _ball_cosets(ball, scale):
                key = tuple(
                    _coset_rep(c.as_fraction(), g.prime, scale) for c in center
                )
                table[key] = table.get(key, 0j) + coeff
        return table

    t1, t2 = tabulate(g1), tabulate(g2)
    for key in set(t1) | set(t2):
        if abs(t1.get(key, 0j) - t2.get(key, 0j)) > tol:
            return False
    return True
