"""Order-by-order construction of the weak-coupling frequency series.

Rescaling time by the unknown frequency turns the oscillator equation into
a recursive chain of driven harmonic problems

    q_n'' + q_n = f_n(xi),    q_n(0) = q_n'(0) = 0,

where the driving term f_n collects products of all lower orders.  A
resonant cos(xi) component in f_n would grow linearly in time and destroy
periodicity; demanding that it vanish fixes the frequency coefficient w_n
uniquely at each order.  Everything here is exact rational arithmetic;
floating evaluation happens only in :func:`frequency_partial_sum`.

The recursion is dimensionless (harmonic frequency scaled to 1); the
physical frequency is restored at evaluation time as
``sum_n w_n * omega0**(1-2n) * g**n``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from mpmath import mp

from .trig_series import (
    RATIONAL_ZERO,
    Rational,
    TrigPoly,
    accumulate,
    format_rational,
    from_map,
    parse_rational,
)

Q0 = TrigPoly.cosine(1)
#: multiplier of the unknown w_n inside f_n: -2*w_n*q0'' = (2 cos xi) * w_n
WN_MULTIPLIER = TrigPoly.cosine(1, 2)


class LindstedtError(RuntimeError):
    """Internal invariant of the recursion violated."""


@dataclass(frozen=True)
class WeakSeries:
    """Frequency coefficients w_0..w_N and solution harmonics q_0..q_N.

    Invariants: ``w_0 = 1``, ``q_0 = cos(xi)``; every ``q_n`` holds only odd
    harmonics ``1, 3, ..., 2n+1``; and ``q_n(0) = 0`` for ``n >= 1`` so the
    full solution satisfies the initial conditions order by order.
    """

    omega_coeffs: tuple
    solution_coeffs: tuple

    def __post_init__(self):
        if len(self.omega_coeffs) != len(self.solution_coeffs):
            raise ValueError("coefficient lists must have equal length")
        if not self.omega_coeffs:
            raise ValueError("series must contain at least order 0")
        if self.omega_coeffs[0] != 1 or self.solution_coeffs[0] != Q0:
            raise ValueError("order 0 must be w_0 = 1, q_0 = cos(xi)")
        for n, q in enumerate(self.solution_coeffs):
            if any(k % 2 == 0 or k > 2 * n + 1 for k in q.harmonics()):
                raise ValueError(f"q_{n} contains harmonics outside 1,3,...,{2 * n + 1}")
            if n >= 1 and q.value_at_zero() != 0:
                raise ValueError(f"q_{n}(0) != 0")

    @property
    def order(self) -> int:
        return len(self.omega_coeffs) - 1

    def omega(self, n: int) -> Rational:
        return self.omega_coeffs[n]

    def solution(self, n: int) -> TrigPoly:
        return self.solution_coeffs[n]

    def truncated(self, N: int) -> "WeakSeries":
        if not 0 <= N <= self.order:
            raise ValueError(f"order {N} outside 0..{self.order}")
        return WeakSeries(self.omega_coeffs[: N + 1], self.solution_coeffs[: N + 1])

    def to_json_obj(self) -> list:
        return [
            {
                "n": n,
                "w": format_rational(self.omega_coeffs[n]),
                "q": [
                    {"k": k, "c": format_rational(q.coefficient(k))}
                    for k in q.harmonics()
                ],
            }
            for n, q in enumerate(self.solution_coeffs)
        ]

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_json_obj(), indent=indent)

    @classmethod
    def from_json_obj(cls, obj) -> "WeakSeries":
        entries = sorted(obj, key=lambda e: e["n"])
        if [e["n"] for e in entries] != list(range(len(entries))):
            raise ValueError("orders must be contiguous from 0")
        w = tuple(parse_rational(e["w"]) for e in entries)
        q = tuple(
            TrigPoly({int(t["k"]): parse_rational(t["c"]) for t in e["q"]})
            for e in entries
        )
        return cls(w, q)

    @classmethod
    def from_json(cls, text: str) -> "WeakSeries":
        return cls.from_json_obj(json.loads(text))


class RecursionState:
    """Mutable builder holding all orders below the one about to be solved.

    Caches the second derivatives of every q (reused O(n^2) times by the
    driving-term sums) and the order-resolved square of the solution series,
    so the cubic term costs O(n) polynomial products per order instead of
    O(n^2).
    """

    def __init__(self):
        self.w = [Rational(1)]
        self.q = [Q0]
        self.d2q = [Q0.second_derivative()]
        self._square = [Q0 * Q0]  # q^2 contribution at total order s
        self._w_pair = [RATIONAL_ZERO, RATIONAL_ZERO]  # sum w_i w_j, i+j=s, i,j>=1

    @property
    def n(self) -> int:
        """Order about to be solved (all lower orders are complete)."""
        return len(self.w)

    def _square_at(self, s: int) -> TrigPoly:
        # lazily extend: (q^2)_s needs q_0..q_s, all available once n > s
        while len(self._square) <= s:
            t = len(self._square)
            acc = {}
            for i in range(t // 2 + 1):
                j = t - i
                accumulate(acc, self.q[i] * self.q[j], Rational(2 if i != j else 1))
            self._square.append(from_map(acc))
        return self._square[s]

    def _append(self, w_n, q_n: TrigPoly) -> None:
        n = self.n
        self.w.append(w_n)
        self.q.append(q_n)
        self.d2q.append(q_n.second_derivative())
        self._w_pair.append(RATIONAL_ZERO)
        for i in range(1, n + 1):
            s = i + n
            while len(self._w_pair) <= s:
                self._w_pair.append(RATIONAL_ZERO)
            self._w_pair[s] += (2 if i != n else 1) * self.w[i] * w_n

    def series(self) -> WeakSeries:
        return WeakSeries(tuple(self.w), tuple(self.q))


def inhomogeneity_parts(state: RecursionState):
    """Driving term of the current order, with the unknown w_n isolated.

    Returns ``(known, multiplier)`` such that ``f_n = known + w_n * multiplier``
    where ``multiplier = -2 q_0'' = 2 cos(xi)``.  The known part gathers the
    three lower-order sums: frequency-pair times second derivatives, single
    frequency coefficients times second derivatives, and the cubic term.
    """
    n = state.n
    acc = {}
    for l in range(1, n):
        accumulate(acc, state.d2q[n - l], -2 * state.w[l])
    for s in range(2, n + 1):
        ws = state._w_pair[s]
        if ws:
            accumulate(acc, state.d2q[n - s], -ws)
    for m in range(n):
        accumulate(acc, state.q[m] * state._square_at(n - 1 - m), Rational(-1))
    return from_map(acc), WN_MULTIPLIER


def inhomogeneity(state: RecursionState, w_n) -> TrigPoly:
    """The full driving term f_n once a value for w_n is supplied."""
    known, multiplier = inhomogeneity_parts(state)
    return known + multiplier.scale(w_n)


def solve_order(state: RecursionState):
    """Advance the recursion by one order; returns the new ``(w_n, q_n)``.

    w_n is the unique rational zeroing the resonant cos(xi) component of the
    driving term; q_n then follows in closed form from the non-resonant
    harmonics.  The exact postconditions q_n(0) = 0 and q_n'' + q_n = f_n
    are verified before the state is extended.
    """
    known, multiplier = inhomogeneity_parts(state)
    m1 = multiplier.coefficient(1)
    if not m1:
        raise LindstedtError("resonant multiplier vanished; cannot solve for w_n")
    w_n = -known.coefficient(1) / m1
    f_n = known + multiplier.scale(w_n)
    if f_n.coefficient(1) != 0:
        raise LindstedtError("resonant component survived the secular condition")

    acc = {}
    hom = RATIONAL_ZERO
    for k, c in f_n.items():
        if k == 1:
            continue
        acc[k] = c / (1 - k * k)
        hom += c / (k * k - 1)
    if hom:
        acc[1] = acc.get(1, RATIONAL_ZERO) + hom
    q_n = from_map(acc)

    if q_n.value_at_zero() != 0:
        raise LindstedtError(f"q_{state.n}(0) != 0")
    if q_n.second_derivative() + q_n != f_n:
        raise LindstedtError(f"q_{state.n} does not solve its driven equation")
    state._append(w_n, q_n)
    return w_n, q_n


def weak_series(N: int) -> WeakSeries:
    """Run the recursion through order N and return the exact series."""
    if N < 0:
        raise ValueError(f"order must be non-negative, got {N}")
    state = RecursionState()
    while state.n <= N:
        solve_order(state)
    return state.series()


def frequency_partial_sum(series: WeakSeries, N: int, g, omega0, dps: int | None = None):
    """Evaluate ``sum_{n<=N} w_n omega0^(1-2n) g^n`` at working precision."""
    from .numerics import to_mpf

    if N > series.order:
        raise ValueError(f"partial sum order {N} exceeds series order {series.order}")
    with mp.workdps(dps or mp.dps):
        g = to_mpf(g)
        omega0 = to_mpf(omega0)
        if omega0 <= 0:
            raise ValueError("omega0 must be positive")
        x = g / omega0**2
        total = mp.mpf(0)
        for n in range(N, -1, -1):
            total = total * x + to_mpf(series.omega_coeffs[n])
        return total * omega0
