"""Variational resummation of the weak-coupling frequency series.

The truncated series is made stationary in an artificial frequency
parameter: substituting ``omega0 = Omega sqrt(1 + g r)`` with
``r = (omega0^2/Omega^2 - 1)/g`` and re-expanding each binomial factor to
the truncation order produces

    omega_N(g, Omega) = sum_n w_n Omega^(1-2n)
                        [ sum_{k<=N-n} C(1/2-n, k) (omega0^2/Omega^2 - 1)^k ] g^n,

which depends on Omega only through the truncation.  Omega is then fixed
where the approximation is least sensitive to it: at a zero of the first
Omega-derivative, else the second, escalating until a positive real zero
exists.  The same construction applied to the large-coupling limit yields
order-N approximations to the leading strong-coupling coefficient, whose
error falls exponentially with N.

All stationarity conditions are solved in the variable ``u = Omega^(-2)``:
clearing the half-integer power turns every condition into an ordinary
polynomial with exact rational coefficients.  Writing
``omega_N = u^(-1/2) P(u)``, the Omega-derivative chain is

    d/dOmega   -> -2 D(u),                D = u P' - P/2,
    next level -> (level-1)/2 * G + u G'  (positive-u zeros preserved),

so every derivative level is an exact polynomial root problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import mpmath
from mpmath import mp, mpf

from .lindstedt import WeakSeries
from .numerics import PolynomialR, real_roots, to_mpf
from .trig_series import Rational

RATIONAL_HALF = Rational(1, 2)


class OptimizationError(RuntimeError):
    """No usable stationary point found; never silently fallen back on."""


def generalized_binomial(alpha, k: int) -> Rational:
    """Binomial coefficient ``C(alpha, k)`` for rational ``alpha``.

    Falling factorial ``alpha (alpha-1) ... (alpha-k+1) / k!``; this is the
    form that reproduces the closed-form low-order resummations.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    alpha = Rational(alpha)
    num = Rational(1)
    for i in range(k):
        num *= alpha - i
    den = Rational(1)
    for i in range(2, k + 1):
        den *= i
    return num / den


def default_study_dps(N: int) -> int:
    """Working precision for an order-N computation: the error being
    measured shrinks like e^(-1.11 N), so precision must outrun it."""
    return 30 + 2 * N


@dataclass(frozen=True)
class VariationalPolynomial:
    """Re-expanded coefficient table ``c[n][k] = w_n * C(1/2-n, k)``.

    Evaluation recipe:
    ``omega(g, Omega) = sum_n sum_k c[n][k] Omega^(1-2n) (omega0^2/Omega^2 - 1)^k g^n``.
    At ``Omega = omega0`` every k>0 term vanishes and the plain truncated
    weak series is recovered exactly.
    """

    order: int
    table: tuple  # table[n][k], 0 <= n <= N, 0 <= k <= N-n

    def evaluate_exact(self, g, omega0, Omega) -> Rational:
        """Exact rational evaluation (all arguments rational, Omega > 0)."""
        g = Rational(g)
        omega0 = Rational(omega0)
        Omega = Rational(Omega)
        u = 1 / (Omega * Omega)
        return Omega * self.u_polynomial(g, omega0 * omega0).evaluate_exact(u)

    def evaluate(self, g, omega0, Omega, dps: int | None = None) -> mpf:
        """Floating evaluation at working precision."""
        with mp.workdps(dps or mp.dps):
            g = to_mpf(g)
            omega0 = to_mpf(omega0)
            Omega = to_mpf(Omega)
            x = omega0**2 / Omega**2 - 1
            total = mpf(0)
            for n in range(self.order, -1, -1):
                inner = mpf(0)
                for k in range(self.order - n, -1, -1):
                    inner = inner * x + to_mpf(self.table[n][k])
                total = total * (g / Omega**2) + inner
            return total * Omega

    def u_polynomial(self, g, omega0_sq) -> PolynomialR:
        """``P`` with ``omega(g, Omega) = u^(-1/2) P(u)`` and ``u = Omega^(-2)``.

        ``Omega^(1-2n) x^k g^n = u^(n-1/2) (omega0^2 u - 1)^k g^n`` makes P an
        ordinary polynomial of degree <= N with rational coefficients
        whenever g and omega0^2 are rational.
        """
        g = Rational(g)
        w0sq = Rational(omega0_sq)
        N = self.order
        coeffs = [Rational(0)] * (N + 1)
        for n in range(N + 1):
            gn = g**n
            if not gn and n:
                continue
            for k in range(N - n + 1):
                c = self.table[n][k] * gn
                if not c:
                    continue
                # (w0sq*u - 1)^k contributes to degrees n..n+k
                for j in range(k + 1):
                    coeffs[n + j] += c * comb(k, j) * w0sq**j * (-1) ** (k - j)
        return PolynomialR(coeffs)


def reexpand(series: WeakSeries, N: int) -> VariationalPolynomial:
    """Build the order-N re-expanded coefficient table from the weak series."""
    if N > series.order:
        raise ValueError(f"order {N} exceeds series order {series.order}")
    table = tuple(
        tuple(
            series.omega_coeffs[n] * generalized_binomial(RATIONAL_HALF - n, k)
            for k in range(N - n + 1)
        )
        for n in range(N + 1)
    )
    return VariationalPolynomial(order=N, table=table)


@dataclass(frozen=True)
class VariationalRecord:
    """One optimized order: the stationary parameter, the value there, the
    smallest derivative level that admitted a positive real zero, and the
    relative error against an exact reference when one is available."""

    N: int
    omega_opt: mpf
    value: mpf
    derivative_level: int
    rel_error: mpf | None = None
    precision_dps: int | None = None

    @property
    def expected_level(self) -> int:
        """Observed parity pattern: extremum at odd N, saddle at even N."""
        return 1 if self.N % 2 else 2

    @property
    def level_escalated(self) -> bool:
        return self.derivative_level != self.expected_level


@dataclass(frozen=True)
class ConvergenceFit:
    """Least-squares line ln(rel_error) = alpha + beta*N over fitted_range."""

    alpha: mpf
    beta: mpf
    fitted_range: tuple
    residual: mpf


def _stationarity_polynomial(P: PolynomialR, level: int) -> PolynomialR:
    """Polynomial whose positive-u zeros are the level-th Omega-derivative zeros."""
    G = PolynomialR(
        [c * (n - RATIONAL_HALF) for n, c in enumerate(P.coeffs)]
    )  # u P' - P/2
    for lev in range(1, level):
        G = PolynomialR(
            [c * (Rational(lev - 1, 2) + n) for n, c in enumerate(G.coeffs)]
        )
    return G


def _positive_stationary_points(P: PolynomialR, level: int, dps: int):
    """All positive real zeros of the level-th derivative, as mpf values of u."""
    G = _stationarity_polynomial(P, level)
    # strip the trivial root at u = 0 so the root bound sees real content
    cs = list(G.coeffs)
    while cs and not cs[0]:
        cs.pop(0)
    G = PolynomialR(cs)
    if G.degree < 1:
        return []
    bound = G.positive_root_bound()
    roots = real_roots(G, 0, bound, dps=dps)
    return [r.value for r in roots if not r.even_multiplicity and r.value > 0]


def _optimize(P: PolynomialR, N: int, prev, dps: int, max_level: int):
    """Shared minimal-sensitivity engine in u-space.

    Escalates the derivative level until positive real zeros exist, maps
    back ``Omega = u^(-1/2)``, and picks the candidate closest to ``prev``
    (the previous order's optimum).
    """
    with mp.workdps(dps):
        for level in range(1, max_level + 1):
            us = _positive_stationary_points(P, level, dps)
            if not us:
                continue
            omegas = [1 / mpmath.sqrt(u) for u in us]
            if prev is None:
                if len(omegas) > 1 and N > 1:
                    raise OptimizationError(
                        f"order {N}: {len(omegas)} stationary points but no "
                        "continuation seed; pass prev from the previous order"
                    )
                pick = min(range(len(omegas)), key=lambda i: omegas[i])
            else:
                prev_v = to_mpf(prev)
                pick = min(range(len(omegas)), key=lambda i: abs(omegas[i] - prev_v))
            u_star = us[pick]
            value = P.evaluate_mpf(u_star) / mpmath.sqrt(u_star)
            return omegas[pick], +value, level
    raise OptimizationError(
        f"order {N}: no positive real stationary point at any derivative "
        f"level up to {max_level}"
    )


def optimize_omega(
    poly: VariationalPolynomial,
    g,
    omega0,
    prev=None,
    dps: int | None = None,
) -> VariationalRecord:
    """Minimal-sensitivity frequency at finite coupling.

    ``g`` and ``omega0`` are taken as exact rationals (decimal strings and
    floats convert exactly) so that every stationarity condition is an
    exact polynomial problem.  Returns the optimized record; raises
    :class:`OptimizationError` when no derivative level up to the
    polynomial order admits a positive real zero.
    """
    dps = dps or mp.dps
    g = Rational(g)
    omega0 = Rational(omega0)
    if g < 0 or omega0 <= 0:
        raise ValueError("need g >= 0 and omega0 > 0")
    if g == 0:
        # the truncated binomial series is stationary at Omega = omega0 exactly
        w0 = to_mpf(omega0, dps)
        return VariationalRecord(poly.order, w0, w0, 1, precision_dps=dps)
    P = poly.u_polynomial(g, omega0 * omega0)
    if prev is None and poly.order > 1:
        # continuation seed: the unique first-order optimum
        prev = to_mpf(omega0, dps) * mpmath.sqrt(1 + 3 * to_mpf(g, dps) / (4 * to_mpf(omega0, dps) ** 2))
    omega_opt, value, level = _optimize(P, poly.order, prev, dps, max(P.degree, 2))
    return VariationalRecord(poly.order, omega_opt, value, level, precision_dps=dps)


def b0_polynomial(series: WeakSeries, N: int):
    """Coefficients d_n of the order-N strong-coupling optimand.

    ``b0_N(Omega0) = sum_n d_n Omega0^(1-2n)`` with
    ``d_n = (-1)^(N-n) C(-1/2-n, N-n) w_n``: the closed form of the inner
    alternating binomial sum of the re-expansion in the infinite-coupling
    limit.
    """
    if N > series.order:
        raise ValueError(f"order {N} exceeds series order {series.order}")
    return [
        (-1) ** (N - n)
        * generalized_binomial(-RATIONAL_HALF - n, N - n)
        * series.omega_coeffs[n]
        for n in range(N + 1)
    ]


def b0_polynomial_term_sum(series: WeakSeries, N: int):
    """Same coefficients by the unreduced double sum (verification route)."""
    if N > series.order:
        raise ValueError(f"order {N} exceeds series order {series.order}")
    return [
        series.omega_coeffs[n]
        * sum(
            generalized_binomial(RATIONAL_HALF - n, k) * (-1) ** k
            for k in range(N - n + 1)
        )
        for n in range(N + 1)
    ]


def optimize_b0(
    series: WeakSeries,
    N: int,
    prev=None,
    dps: int | None = None,
    reference: mpf | None = None,
) -> VariationalRecord:
    """Order-N variational approximation to the leading strong-coupling
    coefficient.

    The derivative level starts at 1 and escalates, so the recorded level is
    genuinely the smallest that admits a positive real zero (extrema show up
    at odd N, saddles at even N; any departure is visible as
    ``level_escalated``).  ``reference`` fills ``rel_error`` when given.
    """
    if N < 1:
        raise ValueError("order must be at least 1")
    dps = dps or default_study_dps(N)
    P = PolynomialR(b0_polynomial(series, N))
    omega_opt, value, level = _optimize(P, N, prev, dps, max(P.degree, 2))
    rel = None
    if reference is not None:
        with mp.workdps(dps):
            rel = +abs((value - reference) / reference)
    return VariationalRecord(N, omega_opt, value, level, rel_error=rel, precision_dps=dps)


@dataclass(frozen=True)
class ConvergenceStudy:
    records: tuple  # VariationalRecord per successful order
    failures: tuple  # (N, message) pairs
    fit: ConvergenceFit | None
    reference: mpf
    reference_dps: int

    def to_csv(self, digits: int = 25) -> str:
        lines = ["N,omega0_opt,b0_N,rel_error,ln_rel_error,derivative_level"]
        by_order = {r.N: r for r in self.records}
        failed = dict(self.failures)
        for N in sorted(set(by_order) | set(failed)):
            if N in by_order:
                r = by_order[N]
                with mp.workdps(r.precision_dps or mp.dps):
                    ln_err = mpmath.log(r.rel_error)
                lines.append(
                    ",".join(
                        [
                            str(N),
                            mpmath.nstr(r.omega_opt, digits),
                            mpmath.nstr(r.value, digits),
                            mpmath.nstr(r.rel_error, 10),
                            mpmath.nstr(ln_err, 10),
                            str(r.derivative_level),
                        ]
                    )
                )
            else:
                lines.append(f"{N},failed,failed,failed,failed,failed")
        return "\n".join(lines) + "\n"

    def fit_json_obj(self) -> dict | None:
        if self.fit is None:
            return None
        return {
            "alpha": float(self.fit.alpha),
            "beta": float(self.fit.beta),
            "range": [int(self.fit.fitted_range[0]), int(self.fit.fitted_range[1])],
            "residual": float(self.fit.residual),
            "reference_dps": self.reference_dps,
        }


def convergence_study(
    series: WeakSeries,
    maxN: int,
    fit_last: int = 10,
    dps_policy=default_study_dps,
    fixed_dps: int | None = None,
) -> ConvergenceStudy:
    """b0_N for N = 1..maxN with continuation, plus the error-decay line fit.

    Per-order failures are recorded and skipped, never fatal.  The exact
    reference value is recomputed from the elliptic closed form at full
    working precision so the study is self-contained at any precision.
    """
    from .exact_freq import leading_strong_coefficient

    if maxN > series.order:
        raise ValueError(f"maxN {maxN} exceeds series order {series.order}")
    ref_dps = (fixed_dps or dps_policy(maxN)) + 10
    reference = leading_strong_coefficient(ref_dps)

    records = []
    failures = []
    prev = None
    for N in range(1, maxN + 1):
        dps = fixed_dps or dps_policy(N)
        try:
            rec = optimize_b0(series, N, prev=prev, dps=dps, reference=reference)
        except OptimizationError as exc:
            failures.append((N, str(exc)))
            continue
        records.append(rec)
        prev = rec.omega_opt

    fit = None
    tail = records[-fit_last:]
    if len(tail) >= 2:
        with mp.workdps(ref_dps):
            points = [(mpf(r.N), mpmath.log(r.rel_error)) for r in tail]
            from .numerics import fit_line

            alpha, beta, residual = fit_line(points)
            fit = ConvergenceFit(
                alpha=+alpha,
                beta=+beta,
                fitted_range=(tail[0].N, tail[-1].N),
                residual=+residual,
            )
    return ConvergenceStudy(
        records=tuple(records),
        failures=tuple(failures),
        fit=fit,
        reference=reference,
        reference_dps=ref_dps,
    )
