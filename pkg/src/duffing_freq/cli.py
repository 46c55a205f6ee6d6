"""Command-line front end for every pipeline stage.

Subcommands: ``coeffs`` (exact series coefficients), ``freq`` (frequency by
any of the four methods), ``b0`` (variational strong-coupling coefficient
at one order), ``convergence`` (order-by-order error study with line fit),
``envelope`` (exact/weak/strong curves over a coupling grid) and
``selftest`` (embedded verification matrix).

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 selftest
failure.  Output is deterministic: identical configurations produce
byte-identical files.  Rationals print as exact ``num/den`` strings,
decimals at the requested number of significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace

import mpmath
from mpmath import mp

from . import reference
from .exact_freq import (
    IntegrationError,
    envelope_data,
    leading_strong_coefficient,
    ode_period_oracle,
    omega_exact,
)
from .lindstedt import WeakSeries, frequency_partial_sum, weak_series
from .numerics import QuadratureError, RootIsolationError, to_mpf
from .trig_series import Rational, format_rational
from .variational import (
    OptimizationError,
    convergence_study,
    default_study_dps,
    optimize_b0,
    optimize_omega,
    reexpand,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_SELFTEST = 3

MAX_ORDER = 120
ORACLE_TOL = 1e-12
NUMERICAL_ERRORS = (
    OptimizationError,
    IntegrationError,
    QuadratureError,
    RootIsolationError,
    ArithmeticError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    order: int = 20
    g: str = "1"
    omega0: str = "1"
    digits: int = 30
    fmt: str = "csv"
    out: str | None = None
    methods: tuple = ("exact", "weak", "variational")
    fit_last: int = 10
    full: bool = False
    gmin: str = "0.01"
    gmax: str = "100"
    samples: int = 20
    weak_orders: tuple = (1, 3, 5, 7, 9)
    strong_orders: tuple = (0, 1, 2)
    corrupt: bool = False
    digits_given: bool = False

    def validate(self):
        if self.digits < 15:
            raise UsageError("--digits must be at least 15")
        if self.order < 0:
            raise UsageError("order must be non-negative")
        if self.order > MAX_ORDER:
            raise UsageError(f"order must not exceed {MAX_ORDER}")
        if _to_float(self.g) < 0:
            raise UsageError("-g must be non-negative")
        if _to_float(self.omega0) <= 0:
            raise UsageError("--omega0 must be positive")


def _to_float(s) -> float:
    try:
        return float(s)
    except (TypeError, ValueError):
        raise UsageError(f"not a number: {s!r}")


def rational_from_decimal(text: str) -> Rational:
    """Exact rational from a decimal or fraction string."""
    try:
        return Rational(text)
    except (ValueError, TypeError):
        from fractions import Fraction

        return Rational(Fraction(text))


def _int_list(text: str):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}")


def build_parser() -> _Parser:
    p = _Parser(prog="duffing-freq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, order_default=20, order_help="series order N"):
        sp.add_argument("-N", "--order", type=int, default=order_default, help=order_help)
        sp.add_argument("--digits", type=int, default=None, help="significant digits (default 30)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json", "pretty"), default="csv")
        sp.add_argument("-o", "--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("coeffs", help="exact weak-coupling coefficients w_0..w_N")
    common(sp)
    sp.add_argument("--full", action="store_true", help="include the solution harmonics q_n")

    sp = sub.add_parser("freq", help="frequency at one coupling, by method")
    common(sp, order_default=5)
    sp.add_argument("-g", default="1", help="coupling constant (decimal, taken exactly)")
    sp.add_argument("--omega0", default="1", help="harmonic frequency (decimal, taken exactly)")
    sp.add_argument(
        "--methods",
        default="exact,weak,variational",
        help="comma list from exact,weak,variational,oracle",
    )

    sp = sub.add_parser("b0", help="variational strong-coupling coefficient at order N")
    common(sp)

    sp = sub.add_parser("convergence", help="error study of the variational sequence")
    common(sp, order_help="maximum order of the study")
    sp.add_argument("--fit-last", dest="fit_last", type=int, default=10, help="points in the line fit")

    sp = sub.add_parser("envelope", help="exact/weak/strong curves over a log grid in g")
    common(sp, order_default=9, order_help="weak series order reserve")
    sp.add_argument("--gmin", default="0.01")
    sp.add_argument("--gmax", default="100")
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--weak-orders", default="1,3,5,7,9", help="comma list of weak orders")
    sp.add_argument("--strong-orders", default="0,1,2", help="comma list of strong orders (max 4)")

    sp = sub.add_parser("selftest", help="run the embedded verification matrix")
    sp.add_argument("--corrupt-coefficient", dest="corrupt", action="store_true", help=argparse.SUPPRESS)

    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.digits_given = getattr(args, "digits", None) is not None
    for name in ("order", "fmt", "out", "fit_last", "full", "g", "omega0", "gmin", "gmax", "samples", "corrupt"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if cfg.digits_given:
        cfg.digits = args.digits
    if hasattr(args, "methods"):
        cfg.methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if hasattr(args, "weak_orders"):
        cfg.weak_orders = _int_list(args.weak_orders)
    if hasattr(args, "strong_orders"):
        cfg.strong_orders = _int_list(args.strong_orders)
    cfg.validate()
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _nstr(x, digits: int) -> str:
    return mpmath.nstr(x, digits)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_coeffs(cfg: RunConfig) -> int:
    series = weak_series(cfg.order)
    if cfg.fmt == "json":
        if cfg.full:
            text = json.dumps(series.to_json_obj(), indent=2) + "\n"
        else:
            rows = [{"n": n, "w": format_rational(w)} for n, w in enumerate(series.omega_coeffs)]
            text = json.dumps(rows, indent=2) + "\n"
    else:
        lines = []
        header = "n,w,q" if cfg.full else "n,w"
        if cfg.fmt == "csv":
            lines.append(header)
        for n in range(cfg.order + 1):
            w = format_rational(series.omega_coeffs[n])
            if cfg.full:
                q = series.solution_coeffs[n]
                qs = ";".join(f"{k}:{format_rational(q.coefficient(k))}" for k in q.harmonics())
                row = [str(n), w, qs]
            else:
                row = [str(n), w]
            if cfg.fmt == "csv":
                lines.append(",".join(row))
            else:
                lines.append("  ".join(f"{c:<24}" for c in row).rstrip())
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def _variational_chain(series: WeakSeries, N: int, g, omega0, dps: int):
    """Continuation pass: optimize orders 1..N, seeding each from the last."""
    prev = None
    rec = None
    for k in range(1, N + 1):
        rec = optimize_omega(reexpand(series, k), g, omega0, prev=prev, dps=dps)
        prev = rec.omega_opt
    return rec


def cmd_freq(cfg: RunConfig) -> int:
    digits = cfg.digits
    N = cfg.order
    unknown = [m for m in cfg.methods if m not in ("exact", "weak", "variational", "oracle")]
    if unknown:
        raise UsageError(f"unknown methods: {', '.join(unknown)}")
    series = weak_series(N) if ("weak" in cfg.methods or "variational" in cfg.methods) else None

    with mp.workdps(digits + 10):
        exact_value = None
        if "exact" in cfg.methods:
            exact_value = omega_exact(cfg.g, cfg.omega0, digits + 10).omega

        rows = []
        flagged = False
        for method in cfg.methods:
            note = ""
            if method == "exact":
                value = exact_value
            elif method == "weak":
                value = frequency_partial_sum(series, N, cfg.g, cfg.omega0, digits + 10)
            elif method == "variational":
                try:
                    rec = _variational_chain(
                        series, N, rational_from_decimal(cfg.g), rational_from_decimal(cfg.omega0), digits + 10
                    )
                    value = rec.value
                    if rec.level_escalated:
                        note = f"derivative_level={rec.derivative_level}"
                except OptimizationError as exc:
                    rows.append((method, None, None, f"failed: {exc}"))
                    flagged = True
                    continue
            else:
                value = to_mpf(float(ode_period_oracle(cfg.g, cfg.omega0, ORACLE_TOL)))
                note = f"tol={ORACLE_TOL:g}"
            dev = None
            if exact_value is not None and method != "exact" and value is not None:
                dev = abs(value - exact_value) / exact_value
            rows.append((method, value, dev, note))

    lines = []
    if cfg.fmt == "json":
        obj = [
            {
                "method": m,
                "value": _nstr(v, digits) if v is not None else None,
                "rel_deviation": _nstr(d, 6) if d is not None else None,
                "note": note or None,
            }
            for m, v, d, note in rows
        ]
        text = json.dumps(obj, indent=2) + "\n"
    else:
        if cfg.fmt == "csv":
            lines.append("method,value,rel_deviation,note")
        for m, v, d, note in rows:
            cells = [
                m,
                _nstr(v, digits) if v is not None else "failed",
                _nstr(d, 6) if d is not None else "",
                note,
            ]
            lines.append(",".join(cells) if cfg.fmt == "csv" else "  ".join(f"{c:<28}" for c in cells).rstrip())
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK if not flagged else EXIT_OK  # flagged rows are still a soft success


def cmd_b0(cfg: RunConfig) -> int:
    N = cfg.order
    if N < 1:
        raise UsageError("b0 requires an order of at least 1")
    dps = cfg.digits if cfg.digits_given else default_study_dps(N)
    series = weak_series(N)
    reference_value = leading_strong_coefficient(dps + 10)
    prev = None
    rec = None
    for k in range(1, N + 1):
        rec = optimize_b0(series, k, prev=prev, dps=dps, reference=reference_value)
        prev = rec.omega_opt
    row = {
        "N": N,
        "omega0_opt": _nstr(rec.omega_opt, cfg.digits),
        "b0_N": _nstr(rec.value, cfg.digits),
        "rel_error": _nstr(rec.rel_error, 10),
        "derivative_level": rec.derivative_level,
    }
    if cfg.fmt == "json":
        text = json.dumps(row, indent=2) + "\n"
    elif cfg.fmt == "csv":
        text = (
            "N,omega0_opt,b0_N,rel_error,derivative_level\n"
            + f"{row['N']},{row['omega0_opt']},{row['b0_N']},{row['rel_error']},{row['derivative_level']}\n"
        )
    else:
        text = "\n".join(f"{k:<18} {v}" for k, v in row.items()) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_convergence(cfg: RunConfig) -> int:
    maxN = cfg.order
    if maxN < 1:
        raise UsageError("convergence requires a maximum order of at least 1")
    series = weak_series(maxN)
    study = convergence_study(
        series,
        maxN,
        fit_last=cfg.fit_last,
        fixed_dps=cfg.digits if cfg.digits_given else None,
    )
    csv_text = study.to_csv(digits=max(cfg.digits, 25))
    fit_obj = study.fit_json_obj()
    if cfg.fmt == "json":
        obj = {
            "records": [
                {
                    "N": r.N,
                    "omega0_opt": _nstr(r.omega_opt, cfg.digits),
                    "b0_N": _nstr(r.value, max(cfg.digits, 25)),
                    "rel_error": _nstr(r.rel_error, 10),
                    "derivative_level": r.derivative_level,
                    "precision_dps": r.precision_dps,
                }
                for r in study.records
            ],
            "failures": [{"N": n, "message": m} for n, m in study.failures],
            "fit": fit_obj,
        }
        _emit(json.dumps(obj, indent=2) + "\n", cfg.out)
        return EXIT_OK
    if cfg.out:
        _emit(csv_text, cfg.out)
        if fit_obj is not None:
            with open(cfg.out + ".fit.json", "w", newline="") as fh:
                fh.write(json.dumps(fit_obj, indent=2) + "\n")
    else:
        text = csv_text
        if fit_obj is not None:
            text += "\n" + json.dumps(fit_obj) + "\n"
        _emit(text, None)
    return EXIT_OK


def cmd_envelope(cfg: RunConfig) -> int:
    if any(m > 4 for m in cfg.strong_orders):
        raise UsageError(
            "strong orders above 4 are rejected: only the leading coefficient "
            "has a closed form, and the numerical extrapolation of the higher "
            "ones is validated through order 4 only"
        )
    if any(m < 0 for m in cfg.strong_orders) or any(n < 0 for n in cfg.weak_orders):
        raise UsageError("orders must be non-negative")
    if cfg.samples < 1:
        raise UsageError("--samples must be at least 1")
    order_needed = max([cfg.order, *cfg.weak_orders]) if cfg.weak_orders else cfg.order
    series = weak_series(order_needed)
    table = envelope_data(
        cfg.gmin,
        cfg.gmax,
        cfg.samples,
        cfg.weak_orders,
        cfg.strong_orders,
        series,
        omega0=cfg.omega0,
        dps=cfg.digits + 5,
    )
    if cfg.fmt == "json":
        obj = {
            "header": list(table.header),
            "rows": [[_nstr(v, cfg.digits) for v in row] for row in table.rows],
        }
        text = json.dumps(obj, indent=2) + "\n"
    elif cfg.fmt == "pretty":
        widths = [max(len(h), cfg.digits + 8) for h in table.header]
        lines = ["  ".join(h.ljust(w) for h, w in zip(table.header, widths))]
        for row in table.rows:
            lines.append("  ".join(_nstr(v, cfg.digits).ljust(w) for v, w in zip(row, widths)).rstrip())
        text = "\n".join(lines) + "\n"
    else:
        text = table.to_csv(cfg.digits)
    _emit(text, cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def _selftest_checks(corrupt: bool = False):
    series = weak_series(20)
    if corrupt:
        w = list(series.omega_coeffs)
        w[5] += Rational(1, 1024)  # deliberate corruption hook for testing
        series = WeakSeries(tuple(w), series.solution_coeffs)

    def table1():
        for n in range(1, 21):
            if series.omega_coeffs[n] != reference.reference_weak_coefficient(n):
                return False, f"w_{n} mismatch"
        return True, "w_1..w_20 exact"

    def solution_coefficients():
        q1 = {k: series.solution_coeffs[1].coefficient(k) for k in series.solution_coeffs[1].harmonics()}
        q2 = {k: series.solution_coeffs[2].coefficient(k) for k in series.solution_coeffs[2].harmonics()}
        ok = q1 == reference.REFERENCE_SOLUTION_ORDER_1 and q2 == reference.REFERENCE_SOLUTION_ORDER_2
        return ok, "q_1, q_2 exact" if ok else "solution harmonics mismatch"

    def b0_closed_form():
        b0 = leading_strong_coefficient(30)
        target = to_mpf(reference.REFERENCE_B0, 30)
        ok = abs(b0 - target) < to_mpf("1e-19", 30)
        return ok, f"b0 = {_nstr(b0, 20)}"

    def b0_low_orders():
        with mp.workdps(40):
            ref = leading_strong_coefficient(40)
            r1 = optimize_b0(series, 1, dps=40, reference=ref)
            r2 = optimize_b0(series, 2, prev=r1.omega_opt, dps=40, reference=ref)
            ok1 = abs(r1.value - mpmath.sqrt(3) / 2) < mpf_eps(35)
            ok2 = abs(r2.value - 51 * mpmath.sqrt(14) / 224) < mpf_eps(35)
            ok3 = abs(r1.rel_error - to_mpf("0.022")) < to_mpf("0.0005")
            ok4 = abs(r2.rel_error - to_mpf("0.0055")) < to_mpf("0.0005")
        ok = ok1 and ok2 and ok3 and ok4
        return ok, "closed forms and 2.2%/0.55% errors" if ok else "low-order closed forms failed"

    def table2_prefix():
        ref = leading_strong_coefficient(60)
        prev = None
        for N in range(1, 9):
            rec = optimize_b0(series, N, prev=prev, dps=default_study_dps(N), reference=ref)
            prev = rec.omega_opt
            target = to_mpf(reference.REFERENCE_B0_BY_ORDER[N], 40)
            if abs(rec.value - target) > to_mpf("1e-19", 40):
                return False, f"order {N} deviates from the reference table"
        return True, "orders 1..8 match to 1e-19"

    def oracle_agreement():
        with mp.workdps(30):
            exact = omega_exact(1, 1, 30).omega
            oracle = ode_period_oracle(1, 1, ORACLE_TOL)
            ok = abs(oracle - exact) / exact < to_mpf("1e-10")
        return ok, f"exact vs oracle at g=1: {_nstr(abs(oracle - exact) / exact, 3)}"

    def determinism():
        a = envelope_data("0.1", "10", 5, (1, 3), (0,), series, dps=30).to_csv(20)
        b = envelope_data("0.1", "10", 5, (1, 3), (0,), series, dps=30).to_csv(20)
        return a == b, "repeated runs byte-identical"

    def small_g_weak():
        with mp.workdps(30):
            exact = omega_exact("0.001", 1, 30).omega
            w1 = frequency_partial_sum(series, 1, "0.001", 1, 30)
            ok = abs(w1 - exact) / exact < to_mpf("1e-4")
        return ok, "weak order 1 tracks exact at small g"

    return [
        ("table1_exact", table1),
        ("solution_coefficients", solution_coefficients),
        ("b0_closed_form", b0_closed_form),
        ("b0_low_orders", b0_low_orders),
        ("table2_prefix", table2_prefix),
        ("oracle_agreement", oracle_agreement),
        ("determinism", determinism),
        ("small_g_weak", small_g_weak),
    ]


def mpf_eps(dps: int):
    return to_mpf(f"1e-{dps}")


def cmd_selftest(cfg: RunConfig) -> int:
    checks = _selftest_checks(corrupt=cfg.corrupt)
    failures = 0
    for name, check in checks:
        try:
            ok, message = check()
        except Exception as exc:  # a crashed check is a failed check
            ok, message = False, f"raised {type(exc).__name__}: {exc}"
        print(f"{'PASS' if ok else 'FAIL'}  {name:<24} {message}")
        failures += 0 if ok else 1
    if failures:
        print(f"FAILED: {failures} of {len(checks)} checks failed")
    else:
        print("OK: all checks passed")
    return EXIT_OK if not failures else EXIT_SELFTEST


COMMANDS = {
    "coeffs": cmd_coeffs,
    "freq": cmd_freq,
    "b0": cmd_b0,
    "convergence": cmd_convergence,
    "envelope": cmd_envelope,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
