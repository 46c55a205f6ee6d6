"""Exact oscillator frequency and its strong-coupling behaviour.

Energy conservation reduces the period of the oscillator
``x'' + omega0^2 x + g x^3 = 0`` with ``x(0)=1, x'(0)=0`` to a complete
elliptic integral, giving the closed form

    omega = pi * sqrt(omega0^2 + g) / (2 K(m)),   m = g / (2 (omega0^2 + g)),

where ``K`` is computed here through the arithmetic-geometric mean.  The
same module extracts the strong-coupling coefficients of
``omega = sqrt(g) (b_0 + b_1 omega0^2/g + ...)`` numerically, provides an
independent period oracle by direct adaptive integration of the equation
of motion, and tabulates exact/weak/strong curves over a coupling grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp, mpf
from scipy.integrate import solve_ivp

from .lindstedt import WeakSeries, frequency_partial_sum
from .numerics import agm, to_mpf

#: largest strong-coupling order extracted numerically; beyond this the
#: extrapolation error cannot be bounded honestly.
MAX_STRONG_ORDER = 4


class IntegrationError(ArithmeticError):
    """Adaptive integration of the equation of motion failed."""


@dataclass(frozen=True)
class ExactFrequency:
    g: mpf
    omega0: mpf
    omega: mpf
    modulus_sq: mpf


@dataclass(frozen=True)
class StrongCoefficients:
    """Coefficients b_0..b_M of the expansion in inverse powers of the coupling."""

    b: tuple

    @property
    def order(self) -> int:
        return len(self.b) - 1


def elliptic_K(k_sq, dps: int | None = None) -> mpf:
    """Complete elliptic integral of the first kind, parameter ``k_sq = k^2``.

    Computed as ``pi / (2 agm(1, sqrt(1 - k_sq)))``, converged to working
    precision.  Requires ``0 <= k_sq < 1``.
    """
    dps = dps or mp.dps
    with mp.workdps(dps + 5):
        m = to_mpf(k_sq)
        if m < 0 or m >= 1:
            raise ValueError(f"k_sq must lie in [0, 1), got {k_sq}")
        result = mpmath.pi / (2 * agm(mpf(1), mpmath.sqrt(1 - m)))
    with mp.workdps(dps):
        return +result


def omega_exact(g, omega0, dps: int | None = None) -> ExactFrequency:
    """Exact frequency via the elliptic-integral closed form."""
    dps = dps or mp.dps
    with mp.workdps(dps + 5):
        g = to_mpf(g)
        omega0 = to_mpf(omega0)
        if g < 0:
            raise ValueError("coupling g must be non-negative")
        if omega0 <= 0:
            raise ValueError("omega0 must be positive")
        m = g / (2 * (omega0**2 + g))
        omega = mpmath.pi * mpmath.sqrt(omega0**2 + g) / (2 * elliptic_K(m))
    with mp.workdps(dps):
        result = ExactFrequency(+g, +omega0, +omega, +m)
    if result.omega < result.omega0:
        raise ArithmeticError("frequency fell below omega0 for hardening coupling")
    return result


def leading_strong_coefficient(dps: int | None = None) -> mpf:
    """The closed-form limit of ``omega/sqrt(g)``: ``pi / (2 K(1/2))``."""
    dps = dps or mp.dps
    with mp.workdps(dps + 5):
        b0 = mpmath.pi / (2 * elliptic_K(mpf(1) / 2))
    with mp.workdps(dps):
        return +b0


def _omega_over_sqrt_g(eps: mpf) -> mpf:
    """``omega/sqrt(g)`` as a function of ``eps = omega0^2/g`` (omega0 = 1)."""
    m = 1 / (2 * (1 + eps))
    return mpmath.sqrt(1 + eps) * mpmath.pi / (2 * elliptic_K(m))


def _richardson_limit(values, ratio: int = 2) -> mpf:
    """Neville/Richardson limit of ``f(eps_j)`` for ``eps_j = eps_0/ratio^j``."""
    t = list(values)
    n = len(t)
    for k in range(1, n):
        fk = mpf(ratio) ** k
        for j in range(n - 1, k - 1, -1):
            t[j] = (fk * t[j] - t[j - 1]) / (fk - 1)
    return t[-1]


def strong_coefficients(M: int, dps: int = 30) -> StrongCoefficients:
    """Strong-coupling coefficients b_0..b_M at ``dps`` digits.

    b_0 comes from its closed form; the higher coefficients are peeled off
    ``omega/sqrt(g)`` sampled at geometrically increasing coupling, each
    residual extrapolated to the limit by a Richardson ladder.
    """
    if not 0 <= M <= MAX_STRONG_ORDER:
        raise ValueError(f"strong order must lie in 0..{MAX_STRONG_ORDER}, got {M}")
    samples = 14
    with mp.workdps(dps + 40):
        eps = [mpf(1) / 32 / 2**j for j in range(samples)]
        b = [leading_strong_coefficient()]
        seq = [_omega_over_sqrt_g(e) for e in eps]
        for m in range(1, M + 1):
            seq = [(s - b[m - 1]) / e for s, e in zip(seq, eps)]
            b.append(_richardson_limit(seq))
    with mp.workdps(dps):
        return StrongCoefficients(tuple(+x for x in b))


def _strong_coefficients_by_fit(M: int, dps: int = 30) -> StrongCoefficients:
    """Cross-check scheme: exact polynomial fit on a different sample set.

    Interpolates ``omega/sqrt(g)`` by a degree-(M+4) polynomial at nodes
    ``eps_i = 1e-3 / 3^i`` and reads off the low-order coefficients.  Kept
    independent of the Richardson ladder on purpose.
    """
    if not 0 <= M <= MAX_STRONG_ORDER:
        raise ValueError(f"strong order must lie in 0..{MAX_STRONG_ORDER}, got {M}")
    degree = M + 4
    with mp.workdps(dps + 60):
        nodes = [mpf(10) ** -3 / 3**i for i in range(degree + 1)]
        rhs = mpmath.matrix([_omega_over_sqrt_g(e) for e in nodes])
        van = mpmath.matrix(degree + 1, degree + 1)
        for i, e in enumerate(nodes):
            for j in range(degree + 1):
                van[i, j] = e**j
        coeffs = mpmath.lu_solve(van, rhs)
    with mp.workdps(dps):
        return StrongCoefficients(tuple(+coeffs[m] for m in range(M + 1)))


def strong_partial_sum(coeffs: StrongCoefficients, M: int, g, omega0) -> mpf:
    """``sqrt(g) * sum_{m<=M} b_m (omega0^2/g)^m`` at context precision."""
    if M > coeffs.order:
        raise ValueError(f"partial sum order {M} exceeds available order {coeffs.order}")
    g = to_mpf(g)
    omega0 = to_mpf(omega0)
    x = omega0**2 / g
    total = mpf(0)
    for m in range(M, -1, -1):
        total = total * x + coeffs.b[m]
    return mpmath.sqrt(g) * total


# ---------------------------------------------------------------------------
# Independent oracle: direct integration of the equation of motion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodSolution:
    """Result of one adaptive integration over (slightly more than) a period."""

    omega: float
    period: float
    tol: float
    t_steps: np.ndarray
    y_steps: np.ndarray
    energy_drift: float  # max relative deviation of the energy integral


def ode_period_solution(g, omega0, tol) -> PeriodSolution:
    """Integrate the oscillator from ``(1, 0)`` and locate the full period.

    Uses an embedded adaptive Runge-Kutta pair (DOP853) with dense output;
    the period is the first root of ``x' = 0`` with ``x > 0`` after leaving
    the initial point, located by root finding on the dense interpolant.
    Works in double precision, so ``tol`` below 1e-13 is not honoured.
    """
    g = float(g)
    omega0 = float(omega0)
    tol = float(tol)
    if g < 0 or omega0 <= 0:
        raise ValueError("need g >= 0 and omega0 > 0")
    if not 1e-13 <= tol < 1:
        raise ValueError("tol must lie in [1e-13, 1) for double-precision integration")

    w0sq = omega0 * omega0

    def rhs(t, y):
        return (y[1], -w0sq * y[0] - g * y[0] ** 3)

    def turning(t, y):
        return y[1]

    turning.direction = -1

    # elementary bounds keep the horizon and the event filter honest:
    # omega >= omega0 (hardening), and the time to cross unit distance at the
    # peak speed caps a quarter period from below.
    v_max = math.sqrt(w0sq + 0.5 * g)
    t_skip = 1.0 / v_max
    horizon = 1.05 * 2.0 * math.pi / omega0

    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        (1.0, 0.0),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
        dense_output=True,
        events=turning,
    )
    if sol.status == -1:
        raise IntegrationError(f"integration failed: {sol.message}")
    times = [t for t in sol.t_events[0] if t >= t_skip and sol.sol(t)[0] > 0]
    if not times:
        raise IntegrationError("no full-period return located within the horizon")
    period = float(times[0])

    mask = sol.t <= period
    x, v = sol.y[0][mask], sol.y[1][mask]
    e0 = 0.5 * w0sq + 0.25 * g
    energy = 0.5 * v**2 + 0.5 * w0sq * x**2 + 0.25 * g * x**4
    drift = float(np.max(np.abs(energy - e0)) / e0)

    return PeriodSolution(
        omega=2.0 * math.pi / period,
        period=period,
        tol=tol,
        t_steps=sol.t[mask],
        y_steps=sol.y[:, mask],
        energy_drift=drift,
    )


def ode_period_oracle(g, omega0, tol) -> mpf:
    """Frequency ``2 pi / period`` from direct integration (see above)."""
    return to_mpf(ode_period_solution(g, omega0, tol).omega)


# ---------------------------------------------------------------------------
# Coupling-grid tabulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeTable:
    header: tuple
    rows: tuple  # tuples of mpf, aligned with header

    def to_csv(self, digits: int = 17) -> str:
        lines = [",".join(self.header)]
        for row in self.rows:
            lines.append(",".join(mpmath.nstr(v, digits) for v in row))
        return "\n".join(lines) + "\n"


def envelope_data(
    gmin,
    gmax,
    samples: int,
    weak_orders,
    strong_orders,
    series: WeakSeries,
    omega0=1,
    dps: int | None = None,
) -> EnvelopeTable:
    """Exact, weak-series and strong-series frequencies over a log grid in g."""
    weak_orders = sorted(set(int(n) for n in weak_orders))
    strong_orders = sorted(set(int(m) for m in strong_orders))
    if weak_orders and weak_orders[0] < 0:
        raise ValueError("weak orders must be non-negative")
    if weak_orders and weak_orders[-1] > series.order:
        raise ValueError(
            f"weak order {weak_orders[-1]} exceeds series order {series.order}"
        )
    if strong_orders and not 0 <= strong_orders[-1] <= MAX_STRONG_ORDER:
        raise ValueError(
            f"strong orders above {MAX_STRONG_ORDER} are not available: "
            "only the leading coefficient has a closed form and the "
            "numerical extrapolation is validated through order 4"
        )
    if samples < 1:
        raise ValueError("need at least one sample")

    dps = dps or mp.dps
    with mp.workdps(dps + 5):
        gmin = to_mpf(gmin)
        gmax = to_mpf(gmax)
        if not 0 < gmin <= gmax:
            raise ValueError("need 0 < gmin <= gmax")
        omega0 = to_mpf(omega0)
        strong = strong_coefficients(strong_orders[-1], dps + 5) if strong_orders else None

        if samples == 1:
            gs = [gmin]
        else:
            ratio = (gmax / gmin) ** (mpf(1) / (samples - 1))
            gs = [gmin * ratio**i for i in range(samples)]
            gs[-1] = gmax

        header = (
            ["g", "omega_exact"]
            + [f"weak_{n}" for n in weak_orders]
            + [f"strong_{m}" for m in strong_orders]
        )
        rows = []
        for g in gs:
            row = [g, omega_exact(g, omega0).omega]
            for n in weak_orders:
                row.append(frequency_partial_sum(series, n, g, omega0))
            for m in strong_orders:
                row.append(strong_partial_sum(strong, m, g, omega0))
            rows.append(row)

    with mp.workdps(dps):
        rows = tuple(tuple(+v for v in row) for row in rows)
    return EnvelopeTable(tuple(header), rows)
