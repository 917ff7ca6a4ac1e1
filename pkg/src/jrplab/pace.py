"""Shipping paces, the LPS scaling density, and the ratio bookkeeping.

A :class:`PaceSpec` is a piecewise polynomial on ``[0, 1]``. Coefficients may be
floats or Fractions; with Fraction parameters every integral and every
piece-endpoint evaluation is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_P = 0.822599
DEFAULT_C = 0.342538
DEFAULT_B = 0.136366
DEFAULT_LAMBDA = 1.574


def _peval(coeffs, z):
    acc = 0 * z
    for a in reversed(coeffs):
        acc = acc * z + a
    return acc


def _pint(coeffs):
    """Antiderivative with zero constant term."""
    return (0,) + tuple(a / (i + 1) for i, a in enumerate(coeffs))


def _padd(p, q):
    n = max(len(p), len(q))
    p = tuple(p) + (0,) * (n - len(p))
    q = tuple(q) + (0,) * (n - len(q))
    return tuple(a + b for a, b in zip(p, q))


def _pscale(p, s):
    return tuple(a * s for a in p)


@dataclass(frozen=True)
class Piece:
    lo: object
    hi: object
    coeffs: tuple  # ascending powers of z


@dataclass(frozen=True)
class PaceSpec:
    """Piecewise polynomial on ``[0, 1]``; zero outside its pieces.

    Pieces are half-open ``[lo, hi)`` except that a piece ending at 1 also
    covers ``z = 1``."""

    pieces: tuple

    def __call__(self, z):
        for p in self.pieces:
            if p.lo <= z < p.hi or (z == p.hi == 1):
                return _peval(p.coeffs, z)
        return 0 * z

    def integral(self, lo=0, hi=1):
        total = 0
        for p in self.pieces:
            a, b = max(lo, p.lo), min(hi, p.hi)
            if a < b:
                anti = _pint(p.coeffs)
                total = total + _peval(anti, b) - _peval(anti, a)
        return total

    def sup(self):
        """Supremum over ``[0, 1]`` (of the closure of each piece)."""
        best = 0
        for p in self.pieces:
            cands = [p.lo, p.hi]
            deriv = [a * i for i, a in enumerate(p.coeffs)][1:]
            cands += _real_roots(deriv, p.lo, p.hi)
            best = max([best] + [_peval(p.coeffs, z) for z in cands])
        return best

    def breakpoints(self) -> list:
        pts = set()
        for p in self.pieces:
            pts.update((p.lo, p.hi))
        return sorted(pts)

    def __add__(self, other: "PaceSpec") -> "PaceSpec":
        cuts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        pieces = []
        for a, b in zip(cuts, cuts[1:]):
            coeffs = _padd(_coeffs_on(self, a, b), _coeffs_on(other, a, b))
            pieces.append(Piece(a, b, coeffs))
        return PaceSpec(tuple(pieces))

    def scaled(self, s) -> "PaceSpec":
        return PaceSpec(tuple(Piece(p.lo, p.hi, _pscale(p.coeffs, s)) for p in self.pieces))


def _coeffs_on(pace: PaceSpec, a, b):
    for p in pace.pieces:
        if p.lo <= a and b <= p.hi:
            return p.coeffs
    return (0,)


def _real_roots(coeffs: Sequence, lo, hi) -> list:
    """Real roots strictly inside ``(lo, hi)`` of an ascending-coefficient polynomial."""
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) <= 1:
        return []
    if len(cs) == 2:
        roots = [-cs[0] / cs[1]]
    elif len(cs) == 3:
        c0, c1, c2 = (float(v) for v in cs)
        disc = c1 * c1 - 4 * c2 * c0
        if disc < 0:
            return []
        s = math.sqrt(disc)
        roots = [(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)]
    else:
        roots = [r.real for r in np.roots([float(v) for v in reversed(cs)]) if abs(r.imag) < 1e-12]
    return [r for r in roots if lo < r < hi]


# -- the concrete paces ------------------------------------------------------

def pace_1srp(c) -> PaceSpec:
    """Trapezoid: rises on ``[0, c)``, flat at ``1/(1-c)`` on ``[c, 1-c)``, falls on ``[1-c, 1]``."""
    if not 0 < c <= Fraction(1, 2):
        raise ValueError("1SRP shift span c must lie in (0, 1/2]")
    one = c / c
    k = one / (1 - c)
    pieces = [Piece(0 * c, c, (0 * c, k / c))]
    if c < 1 - c:
        pieces.append(Piece(c, 1 - c, (k,)))
    pieces.append(Piece(1 - c, one, (k / c, -k / c)))
    return PaceSpec(tuple(pieces))


@dataclass(frozen=True)
class MixtureParams:
    c: float = DEFAULT_C
    p: float = DEFAULT_P
    b: float = DEFAULT_B
    lam: float = DEFAULT_LAMBDA
    q_override: float | None = None

    def __post_init__(self):
        if not 0 < self.c <= 0.5:
            raise ValueError("c must lie in (0, 1/2]")
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        if not 0 < self.b <= self.c:
            raise ValueError("b must lie in (0, c]")
        if self.lam < 1:
            raise ValueError("lambda must be at least 1")
        if self.q_override is not None and not 0 <= self.q_override <= 1:
            raise ValueError("q must lie in [0, 1]")

    @property
    def slope(self):
        """Slope of the LPS density, chosen to cancel the 1SRP trapezoid's fall."""
        if self.p == 1:
            raise ValueError("density slope is undefined for p = 1")
        return self.p / ((1 - self.p) * self.c * (1 - self.c))

    @property
    def q(self):
        if self.q_override is not None:
            return self.q_override
        rep = ratio_report(self)
        return (rep.R1 - rep.R2) / (rep.R1 - rep.R2 + 1)


def density_D(params: MixtureParams) -> PaceSpec:
    al, b = params.slope, params.b
    return PaceSpec((Piece(1 - b, b / b, (1 / b + al * b / 2 - al, al)),))


def density_cdf(params: MixtureParams, z):
    al, b = params.slope, params.b
    lo = 1 - b
    if z <= lo:
        return 0.0
    if z >= 1:
        return 1.0
    k = 1 / b + al * b / 2 - al
    return al / 2 * (z * z - lo * lo) + k * (z - lo)


def xi(params: MixtureParams):
    """Expected inverse scaling factor, ``E[1/zeta]`` under the density."""
    al, b = params.slope, params.b
    return al * b - (1 / b + al * b / 2 - al) * math.log(1 - b)


def xi_numeric(params: MixtureParams, tol: float = 1e-12) -> float:
    """``E[1/zeta]`` by adaptive Simpson quadrature of ``D(z)/z``; cross-checks :func:`xi`."""
    d = density_D(params)

    def f(z):
        return float(d(z)) / z

    def simpson(a, b, fa, fm, fb):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, eps, depth):
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = f(lm), f(rm)
        left, right = simpson(a, m, fa, flm, fm), simpson(m, b, fm, frm, fb)
        if depth <= 0 or abs(left + right - whole) <= 15 * eps:
            return left + right + (left + right - whole) / 15
        return rec(a, m, fa, flm, fm, left, eps / 2, depth - 1) + rec(m, b, fm, frm, fb, right, eps / 2, depth - 1)

    a, b = 1 - params.b, 1.0
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50)


def pace_combined(params: MixtureParams) -> PaceSpec:
    g = pace_1srp(params.c).scaled(params.p)
    if params.p == 1:
        return g
    return g + density_D(params).scaled(1 - params.p)


def waiting_supremand(pace: PaceSpec, w):
    """``(1/(1-w)) * integral of the pace over [w, 1]``."""
    return pace.integral(w, 1) / (1 - w)


def waiting_ratio(pace: PaceSpec):
    """Supremum over ``w in [0, 1)`` of :func:`waiting_supremand`.

    Candidates are piece endpoints, interior stationary points (roots of
    ``F(w) - G(w)(1-w)`` with ``F(w) = int_w^1 G``) and the limit ``G(1-)`` as
    ``w -> 1``."""
    best = None
    for p in pace.pieces:
        cands = [p.lo] if p.lo < 1 else []
        # on this piece F(w) = F(hi) + A(hi) - A(w), with A the antiderivative
        anti = _pint(p.coeffs)
        const = pace.integral(p.hi, 1) + _peval(anti, p.hi)
        # N(w) = const - A(w) - G(w) + w G(w)
        N = _padd(_padd((const,), _pscale(anti, -1)), _padd(_pscale(p.coeffs, -1), (0,) + tuple(p.coeffs)))
        cands += _real_roots(N, p.lo, p.hi)
        for w in cands:
            if w < 1:
                v = waiting_supremand(pace, w)
                best = v if best is None or v > best else best
    last = max(pace.pieces, key=lambda p: p.hi)
    limit = _peval(last.coeffs, last.hi) if last.hi == 1 else 0
    if best is None or limit > best:
        best = limit
    return best


@dataclass(frozen=True)
class RatioReport:
    r1: float
    r2: float
    r3: float
    R1: float
    R2: float
    R: float
    xi: float
    q: float

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def ratio_report(params: MixtureParams) -> RatioReport:
    p, c, lam = params.p, params.c, params.lam
    if p == 1:
        x = 1.0
        r1, r2 = 1 / c, 1 / (1 - c)
    else:
        x = xi(params)
        r1 = p / c + (1 - p) * lam * x
        r2 = p / (1 - c) + (1 - p) * lam * x
    r3 = pace_combined(params).sup()
    R1, R2 = r1, max(r2, r3)
    R = (2 * R1 - R2) / (R1 - R2 + 1)
    q = (R1 - R2) / (R1 - R2 + 1)
    return RatioReport(r1, r2, r3, R1, R2, R, x, q)


def solve_lower_bound_constants():
    """Real root c of c^3 + c^2 = 1 by bisection, plus the derived thresholds.

    Returns ``(c, sigma0, sigma, R)`` with ``sigma0 = c^2``, ``sigma = c^4`` and
    ``R = 2 + c``. Bisection runs to float resolution."""
    lo, hi = 0.0, 1.0
    while True:
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if mid ** 3 + mid ** 2 - 1 < 0:
            lo = mid
        else:
            hi = mid
    c = (lo + hi) / 2
    return c, c ** 2, c ** 4, 2 + c


def pace_table(params: MixtureParams, step: float = 0.01) -> list[tuple]:
    """Rows ``(z, G_1SRP, D, G_combined)`` on a uniform grid of ``[0, 1]``."""
    g1, d, gc = pace_1srp(params.c), density_D(params), pace_combined(params)
    n = int(round(1 / step))
    rows = []
    for i in range(n + 1):
        z = i / n
        rows.append((z, float(g1(z)), float(d(z)), float(gc(z))))
    return rows
