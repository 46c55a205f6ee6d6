"""High-precision real arithmetic, root isolation, quadrature, line fits.

Floating values are ``mpmath.mpf`` at an explicit working precision in
decimal digits: callers either pass ``dps=`` or run inside
``mp.workdps(...)``.  Rational inputs convert with correct rounding at the
target precision.  Root-finding separates concerns the way the rest of the
package needs them: existence and ordering of real roots are decided with
exact rational sign evaluations, and only the final refinement uses
floating arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Rational as _RationalABC

import mpmath
from mpmath import mp, mpf
from mpmath.libmp import from_rational, round_nearest

from .trig_series import Rational

BigReal = mpf


class QuadratureError(ArithmeticError):
    """Requested quadrature tolerance not reached within budget."""


class RootIsolationError(ArithmeticError):
    """Sign-change count failed to stabilize while bracketing."""


def to_mpf(x, dps: int | None = None) -> mpf:
    """Convert to mpf at ``dps`` (or context) digits, correctly rounded.

    Rationals of any size convert exactly-then-round; decimal strings are
    parsed at the target precision; floats are taken at their binary value.
    """
    ctx_dps = dps or mp.dps
    with mp.workdps(ctx_dps):
        if isinstance(x, _RationalABC) and not isinstance(x, int):
            return +mpf(from_rational(int(x.numerator), int(x.denominator), mp.prec, round_nearest))
        if isinstance(x, (int, float, mpf)):
            return +mpf(x)
        if isinstance(x, str):
            return mpf(x.strip())
        # gmpy2.mpq does not register under numbers.Rational on all versions
        if hasattr(x, "numerator") and hasattr(x, "denominator"):
            return +mpf(from_rational(int(x.numerator), int(x.denominator), mp.prec, round_nearest))
    raise TypeError(f"cannot convert {type(x).__name__} to mpf")


def agm(a, b, dps: int | None = None) -> mpf:
    """Common limit of the arithmetic-geometric mean iteration.

    Quadratically convergent; terminates when the two legs agree to the
    ulp scale of the working precision.  Inputs must be positive.
    """
    with mp.workdps((dps or mp.dps) + 5):
        a = to_mpf(a)
        b = to_mpf(b)
        if a <= 0 or b <= 0:
            raise ValueError("agm requires positive arguments")
        eps = mpf(2) ** (4 - mp.prec)
        while abs(a - b) > eps * abs(a):
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
        result = (a + b) / 2
    with mp.workdps(dps or mp.dps):
        return +result


def adaptive_quadrature(f, a, b, tol, max_refinements: int = 10) -> mpf:
    """Integrate ``f`` over ``[a, b]`` to within ``tol`` (estimated).

    Backed by tanh-sinh quadrature with degree escalation; raises
    :class:`QuadratureError` if the error estimate never drops below
    ``tol``.  Test-oracle quality: estimated, not certified.
    """
    tol = to_mpf(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    # work with enough digits that tol is resolvable
    digits = max(mp.dps, int(-mpmath.log10(tol)) + 10)
    with mp.workdps(digits):
        for degree in range(3, 3 + max_refinements):
            value, err = mpmath.quad([f, [to_mpf(a), to_mpf(b)]], error=True, maxdegree=degree)
            if err <= tol:
                break
        else:
            raise QuadratureError(f"error estimate {err} above tolerance {tol}")
    with mp.workdps(mp.dps):
        return +value


def fit_line(points):
    """Ordinary least squares line through ``(x, y)`` pairs.

    Returns ``(alpha, beta, residual)`` for the model ``y = alpha + beta*x``
    with residual the root-mean-square deviation.  Needs at least two
    points with distinct abscissae.
    """
    pts = [(to_mpf(x), to_mpf(y)) for x, y in points]
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    sx = mpmath.fsum(x for x, _ in pts)
    sy = mpmath.fsum(y for _, y in pts)
    sxx = mpmath.fsum(x * x for x, _ in pts)
    sxy = mpmath.fsum(x * y for x, y in pts)
    denom = n * sxx - sx * sx
    if denom == 0:
        raise ValueError("degenerate abscissae: all x equal")
    beta = (n * sxy - sx * sy) / denom
    alpha = (sy - beta * sx) / n
    residual = mpmath.sqrt(
        mpmath.fsum((y - alpha - beta * x) ** 2 for x, y in pts) / n
    )
    return alpha, beta, residual


# ---------------------------------------------------------------------------
# Exact polynomials and real-root isolation
# ---------------------------------------------------------------------------


class PolynomialR:
    """Univariate polynomial with exact rational coefficients, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Rational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, PolynomialR) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"PolynomialR({list(self.coeffs)!r})"

    def evaluate_exact(self, x) -> Rational:
        x = Rational(x)
        acc = Rational(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        v = self.evaluate_exact(x)
        return (v > 0) - (v < 0)

    def evaluate_mpf(self, x, dps: int | None = None) -> mpf:
        with mp.workdps(dps or mp.dps):
            cs = [to_mpf(c) for c in self.coeffs]
            x = to_mpf(x)
            acc = mpf(0)
            for c in reversed(cs):
                acc = acc * x + c
            return acc

    def derivative(self) -> "PolynomialR":
        return PolynomialR([i * c for i, c in enumerate(self.coeffs)][1:])

    def scaled(self, factor) -> "PolynomialR":
        return PolynomialR([Rational(factor) * c for c in self.coeffs])

    def positive_root_bound(self) -> Rational:
        """Exact power-of-two upper bound on all positive real roots.

        Zassenhaus-style: every root has magnitude below
        ``2 * max_i |a_i / a_n|^(1/(n-i))``; the bound is rounded up to a
        power of two using integer bit lengths only.
        """
        if self.degree < 1:
            raise ValueError("root bound requires degree >= 1")
        n = self.degree
        an = self.coeffs[n]
        log_an = _floor_log2_abs(an)
        exp = -1  # bound at least 2**0
        for i, ai in enumerate(self.coeffs[:n]):
            if not ai:
                continue
            # ceil of (log2|ai/an| + 1) / (n - i), using floor/ceil bit bounds
            num = _ceil_log2_abs(ai) - log_an + 1
            e = -(-num // (n - i))
            exp = max(exp, e)
        return Rational(2) ** (exp + 1)


def _floor_log2_abs(q) -> int:
    num, den = abs(int(q.numerator)), int(q.denominator)
    return (num.bit_length() - 1) - den.bit_length()


def _ceil_log2_abs(q) -> int:
    num, den = abs(int(q.numerator)), int(q.denominator)
    return num.bit_length() - (den.bit_length() - 1)


@dataclass(frozen=True)
class PolyRoot:
    """A located real root; ``even_multiplicity`` flags sign-preserving roots
    detected through the derivative rather than a sign change."""

    value: mpf
    bracket: tuple
    even_multiplicity: bool = False


def real_roots(
    p: PolynomialR,
    lo,
    hi,
    dps: int | None = None,
    max_doublings: int = 16,
    detect_even_multiplicity: bool = True,
):
    """All real roots of ``p`` in ``(lo, hi]``, refined to working precision.

    Bracketing walks a uniform dyadic probe grid (64 intervals, doubling
    until the sign-change count is unchanged across two refinements) with
    polynomial signs computed in exact rational arithmetic, so existence and
    ordering decisions cannot be corrupted by rounding.  Brackets are then
    narrowed by floating bisection.  Roots of even multiplicity produce no
    sign change; they are searched for among the derivative's roots where
    the polynomial itself is indistinguishable from zero, and returned
    flagged.
    """
    lo, hi = Rational(lo), Rational(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    dps = dps or mp.dps
    if p.is_zero():
        raise ValueError("zero polynomial has no isolated roots")
    if p.degree == 0:
        return []

    exact_hits, brackets = _stable_brackets(p, lo, hi, max_doublings)

    roots = [
        PolyRoot(to_mpf(x, dps), (x, x)) for x in exact_hits
    ]
    for a, b in brackets:
        roots.append(PolyRoot(_bisect(p, a, b, dps), (a, b)))

    if detect_even_multiplicity and p.degree >= 2:
        covered = [r.bracket for r in roots]
        dp = p.derivative()
        d_hits, d_brackets = _stable_brackets(dp, lo, hi, max_doublings)
        candidates = [to_mpf(x, dps) for x in d_hits]
        candidates += [_bisect(dp, a, b, dps) for a, b in d_brackets]
        for r in candidates:
            if any(to_mpf(a, dps) <= r <= to_mpf(b, dps) for a, b in covered):
                continue  # already found via a sign change
            if _indistinguishable_from_zero(p, r, dps):
                roots.append(PolyRoot(r, (None, None), even_multiplicity=True))

    roots.sort(key=lambda r: r.value)
    return roots


def _stable_brackets(p: PolynomialR, lo, hi, max_doublings: int):
    """Exact-sign probe sweep; returns (exact node roots, sign-change brackets).

    Doubles the grid until the count of root evidences is identical across
    two successive refinements.
    """
    history = []
    m = 64
    for _ in range(max_doublings):
        step = (hi - lo) / m
        exact_hits = []
        brackets = []
        prev_x, prev_s = lo, p.sign_at(lo)
        for i in range(1, m + 1):
            x = lo + step * i
            s = p.sign_at(x)
            if s == 0:
                exact_hits.append(x)
            elif prev_s and s != prev_s:
                brackets.append((prev_x, x))
            if s != 0:
                prev_x, prev_s = x, s
        # drop an exact hit at the open endpoint lo
        exact_hits = [x for x in exact_hits if x > lo]
        history.append((len(exact_hits) + len(brackets), exact_hits, brackets))
        if len(history) >= 3 and history[-1][0] == history[-2][0] == history[-3][0]:
            return exact_hits, brackets
        m *= 2
    raise RootIsolationError(
        f"sign-change count did not stabilize after {max_doublings} doublings"
    )


def _bisect(p: PolynomialR, a, b, dps: int) -> mpf:
    """Bisection refinement inside an exact bracket (sign(a) != sign(b))."""
    sa = p.sign_at(a)
    with mp.workdps(dps + 10):
        cs = [to_mpf(c) for c in p.coeffs]

        def horner(x):
            acc = mpf(0)
            for c in reversed(cs):
                acc = acc * x + c
            return acc

        fa, fb = to_mpf(a), to_mpf(b)
        target = mpf(10) ** (-dps)
        max_iter = int(mp.prec * 1.5) + 64
        for _ in range(max_iter):
            if fb - fa <= target * max(mpf(1), abs(fa)):
                break
            mid = (fa + fb) / 2
            v = horner(mid)
            if v == 0:
                fa = fb = mid
                break
            if ((v > 0) - (v < 0)) == sa:
                fa = mid
            else:
                fb = mid
        result = (fa + fb) / 2
    with mp.workdps(dps):
        return +result


def _indistinguishable_from_zero(p: PolynomialR, x: mpf, dps: int) -> bool:
    """True when |p(x)| is below the evaluation round-off scale at x."""
    with mp.workdps(dps + 10):
        cs = [to_mpf(c) for c in p.coeffs]
        acc = mpf(0)
        mag = mpf(0)
        ax = abs(x)
        for c in reversed(cs):
            acc = acc * x + c
            mag = mag * ax + abs(c)
        noise = mag * mpf(2) ** (8 - mp.prec)
        return abs(acc) <= noise
