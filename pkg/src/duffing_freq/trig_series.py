"""Exact arithmetic on finite cosine polynomials.

The objects here carry the perturbation recursion for the anharmonic
oscillator: every quantity is a finite sum ``sum_k c_k cos(k*xi)`` with
exact rational coefficients ``c_k``.  Because the initial data are even
(``q'(0) = 0``), sine terms never arise and the representation omits them
by construction.

``Rational`` is ``gmpy2.mpq`` when available (an order of magnitude faster
on the large numerators the recursion produces) and ``fractions.Fraction``
otherwise.  Both store fractions in lowest terms with a positive
denominator and interoperate freely.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

try:
    from gmpy2 import mpq as Rational

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Rational = Fraction
    HAVE_GMPY2 = False

RATIONAL_ZERO = Rational(0)
RATIONAL_ONE = Rational(1)
RATIONAL_HALF = Rational(1, 2)


def rational(numerator, denominator=None) -> Rational:
    """Build a Rational from ints, strings like ``"3/8"``, or another rational."""
    if denominator is None:
        return Rational(numerator)
    return Rational(numerator, denominator)


def format_rational(q) -> str:
    """Render a rational as the exact decimal-free string ``num/den``."""
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Rational:
    """Inverse of :func:`format_rational`; also accepts plain integers."""
    return Rational(text.strip())


def is_rational(x) -> bool:
    return isinstance(x, _RationalABC)


class TrigPoly:
    """Finite cosine series ``sum_k coeffs[k] * cos(k*xi)`` over the rationals.

    Canonical form: zero coefficients are never stored, harmonic indices are
    non-negative integers, and harmonic 0 is the constant term.  Two
    polynomials are equal iff their canonical coefficient maps are equal.
    Instances are immutable values; all operations return new objects.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in coeffs.items() if hasattr(coeffs, "items") else coeffs:
                if k < 0 or k != int(k):
                    raise ValueError(f"harmonic index must be a non-negative integer, got {k!r}")
                v = Rational(v)
                if v:
                    k = int(k)
                    c[k] = c[k] + v if k in c else v
                    if not c[k]:
                        del c[k]
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls()

    @classmethod
    def constant(cls, value) -> "TrigPoly":
        return cls({0: value})

    @classmethod
    def cosine(cls, k: int, coeff=1) -> "TrigPoly":
        """The single term ``coeff * cos(k*xi)``."""
        return cls({k: coeff})

    # -- queries -----------------------------------------------------------

    def coefficient(self, k: int) -> Rational:
        """Coefficient of ``cos(k*xi)``; exact zero for absent harmonics."""
        if k < 0:
            raise ValueError(f"harmonic index must be non-negative, got {k}")
        return self._c.get(int(k), RATIONAL_ZERO)

    def harmonics(self) -> tuple:
        return tuple(sorted(self._c))

    def items(self):
        return self._c.items()

    def is_zero(self) -> bool:
        return not self._c

    def max_harmonic(self) -> int:
        """Highest stored harmonic (-1 for the zero polynomial)."""
        return max(self._c) if self._c else -1

    def value_at_zero(self) -> Rational:
        """Exact value at ``xi = 0``, i.e. the sum of all coefficients."""
        return sum(self._c.values(), RATIONAL_ZERO)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, RATIONAL_ZERO) + v
            if s:
                c[k] = s
            elif k in c:
                del c[k]
        return _raw(c)

    def __sub__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return _raw({k: -v for k, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return _raw(_mul_maps(self._c, other._c))
        if is_rational(other) or isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, factor) -> "TrigPoly":
        factor = Rational(factor)
        if not factor:
            return TrigPoly.zero()
        return _raw({k: v * factor for k, v in self._c.items()})

    def second_derivative(self) -> "TrigPoly":
        """d^2/dxi^2: harmonic k picks up a factor -k^2 (constants vanish)."""
        return _raw({k: -(k * k) * v for k, v in self._c.items() if k})

    # -- value semantics ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._c == other._c

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __bool__(self):
        return bool(self._c)

    def __len__(self):
        return len(self._c)

    def __repr__(self):
        if not self._c:
            return "TrigPoly(0)"
        parts = []
        for k in sorted(self._c):
            c = self._c[k]
            parts.append(f"({c})" if k == 0 else f"({c})cos({k}x)")
        return "TrigPoly(" + " + ".join(parts) + ")"


def _raw(cmap: dict) -> TrigPoly:
    """Wrap an already-canonical coefficient map without re-validation."""
    p = TrigPoly.__new__(TrigPoly)
    object.__setattr__(p, "_c", cmap)
    return p


def _mul_maps(a: dict, b: dict) -> dict:
    """Product of two coefficient maps using
    cos(j)cos(k) = (1/2)cos(|j-k|) + (1/2)cos(j+k)."""
    out = {}
    for j, ca in a.items():
        for k, cb in b.items():
            c = ca * cb * RATIONAL_HALF
            for h in (abs(j - k), j + k):
                s = out.get(h, RATIONAL_ZERO) + c
                if s:
                    out[h] = s
                elif h in out:
                    del out[h]
    return out


def accumulate(acc: dict, poly: TrigPoly, scale=RATIONAL_ONE) -> None:
    """Add ``scale * poly`` into a mutable coefficient map (recursion hot path)."""
    for k, v in poly.items():
        s = acc.get(k, RATIONAL_ZERO) + scale * v
        if s:
            acc[k] = s
        elif k in acc:
            del acc[k]


def from_map(cmap: dict) -> TrigPoly:
    """Build a TrigPoly from a mutable accumulator map, dropping zeros."""
    return _raw({k: v for k, v in cmap.items() if v})
