"""
Command-line front end.

    cesaro-lab apply COEFFS --kernel cesaro,c1 --t 0.5 --degree 64
    cesaro-lab norms --t 0,0.5,0.9 --p 1,2,inf
    cesaro-lab spectrum --t 0,0.5 --degree 512
    cesaro-lab ergodic --t 0.5 --format csv --out ergodic.csv
    cesaro-lab all

Exit status: 0 when every assertion holds, 1 when one fails, 2 on usage or
input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, _kernels
from .analysis import (
    INF,
    bound_comparison,
    h2_opnorm,
    opnorm_lower,
    parse_p,
    upper_bound_ct,
)
from .core import DomainError, TaylorSeries, make_series, max_degree, one
from .operators import Kind, OperatorKernel, apply, apply_tg, apply_vg, cesaro_symbol, finite_section
from .spectral import (
    RESIDUAL_BUFFER,
    diagonal_spectrum,
    eigen_residual,
    ergodic_certificate,
    ergodic_limit_error,
    orbit_containment_st,
    power_norms,
)

log = logging.getLogger("cesaro_lab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COMMANDS = ("apply", "norms", "spectrum", "ergodic", "all")
CSV_COLUMNS = ("section", "t", "p", "n", "value", "lower", "upper", "lhs", "rhs", "tol", "pass")
DEFAULT_DEGREE = 1024
MIN_DEGREE = 16
ERGODIC_STEPS = (16, 32, 64, 128, 256)


class ParseError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


@dataclass
class RunConfig:
    command: str
    t_values: list
    p_values: list
    degree: int
    output_path: str = "-"
    format: str = "json"
    seed: int = 42
    kernels: list = field(default_factory=list)
    input_path: str | None = None
    g_path: str | None = None

    def echo(self):
        d = {
            "command": self.command,
            "t_values": self.t_values,
            "p_values": [_p_label(p) for p in self.p_values],
            "degree": self.degree,
            "seed": self.seed,
            "format": self.format,
            "max_degree": max_degree(),
            "backend": _kernels.BACKEND,
        }
        if self.command == "apply":
            d.update(kernels=self.kernels, input=self.input_path, g=self.g_path)
        return d


class Report:
    """Rows of results; rows carrying a check record both sides and the tolerance."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.rows = []

    def add(self, section, t=None, p=None, n=None, value=None, lower=None, upper=None):
        self.rows.append(dict(section=section, t=t, p=_p_label(p), n=n, value=value,
                              lower=lower, upper=upper, lhs=None, rhs=None, tol=None,
                              relation=None, **{"pass": None}))

    def check(self, section, lhs, rhs, tol=0.0, relation="<=", t=None, p=None, n=None,
              value=None):
        lhs, rhs = float(lhs), float(rhs)
        if relation == "<=":
            ok = lhs <= rhs + tol
        elif relation == "<":
            ok = lhs < rhs
        elif relation == "==":
            ok = abs(lhs - rhs) <= tol
        else:  # pragma: no cover
            raise ValueError(relation)
        self.rows.append(dict(section=section, t=t, p=_p_label(p), n=n,
                              value=lhs if value is None else value,
                              lower=None, upper=None, lhs=lhs, rhs=rhs, tol=tol,
                              relation=relation, **{"pass": bool(ok)}))
        return ok

    @property
    def failures(self):
        return [r for r in self.rows if r["pass"] is False]

    def to_dict(self):
        return {
            "tool": "cesaro-lab",
            "version": __version__,
            "config": self.config.echo(),
            "rows": self.rows,
            "failed": len(self.failures),
            "passed": not self.failures,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }

    def render(self, fmt):
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2) + "\n"
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: ("" if r.get(k) is None else r[k]) for k in CSV_COLUMNS})
        return buf.getvalue()


def _p_label(p):
    if p is None:
        return None
    return "inf" if p == INF else float(p)


# ---------------------------------------------------------------------------
# coefficient files
# ---------------------------------------------------------------------------

def parse_coeffs(text: str) -> TaylorSeries:
    """One coefficient per line as ``re im`` (or ``re``); ``#`` starts a comment."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.replace(",", " ").split()
        if len(parts) > 2:
            raise ParseError(f"expected 're im', got {len(parts)} fields", lineno)
        try:
            re_, im_ = float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0
        except ValueError:
            raise ParseError(f"not a number: {body!r}", lineno)
        if not (math.isfinite(re_) and math.isfinite(im_)):
            raise ParseError(f"non-finite coefficient: {body!r}", lineno)
        values.append(complex(re_, im_))
    if not values:
        raise ParseError("no coefficients found")
    return make_series(values)


def read_coeffs(path: str) -> TaylorSeries:
    if path == "-":
        return parse_coeffs(sys.stdin.read())
    try:
        with open(path) as fh:
            return parse_coeffs(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}")


def coeffs_to_pairs(f: TaylorSeries):
    return [[float(c.real), float(c.imag)] for c in f.coeffs]


def pairs_to_series(pairs) -> TaylorSeries:
    return make_series([complex(a, b) for a, b in pairs])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_KERNEL_NAMES = {k.value: k for k in Kind}
_T_KERNELS = {Kind.CESARO_T, Kind.MULT_HT, Kind.ST}


def cmd_apply(config: RunConfig) -> str:
    """Transform the input coefficients with each requested kernel.

    Inputs are padded to the configured degree.  ``tg``/``vg`` use the
    symbol from ``--g`` when given, else the log kernel for each t.
    """
    f = read_coeffs(config.input_path)
    N = max(config.degree, f.degree)
    f = f.padded(N)
    g = read_coeffs(config.g_path) if config.g_path else None
    results = []
    for name in config.kernels:
        kind = _KERNEL_NAMES[name]
        if kind in _T_KERNELS or (kind in (Kind.VOLTERRA_TG, Kind.VOLTERRA_VG) and g is None):
            ts = config.t_values
        else:
            ts = [None]
        for t in ts:
            if kind in (Kind.VOLTERRA_TG, Kind.VOLTERRA_VG):
                volterra = apply_tg if kind is Kind.VOLTERRA_TG else apply_vg
                if g is None:
                    # T_g = S C_t and V_g = C_t on indices 0..N
                    y = volterra(cesaro_symbol(t, N + 1), f, degree=N)
                else:
                    y = volterra(g, f)
            else:
                y = apply(OperatorKernel(kind, t=t), f)
            results.append({"kernel": name, "t": t, "degree": y.degree,
                            "truncated": y.truncated, "coeffs": coeffs_to_pairs(y)})
    if config.format == "json":
        doc = {"tool": "cesaro-lab", "version": __version__, "config": config.echo(),
               "results": results}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kernel", "t", "n", "re", "im"])
    for res in results:
        for n, (a, b) in enumerate(res["coeffs"]):
            w.writerow([res["kernel"], "" if res["t"] is None else res["t"], n, a, b])
    return buf.getvalue()


def _random_polys(rng, count, degree=16):
    out = []
    for _ in range(count):
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        out.append(TaylorSeries(c))
    return out


def run_norms(config: RunConfig, report: Report):
    rng = np.random.default_rng(config.seed)
    testset = _random_polys(rng, 20)
    N = config.degree
    for t in config.t_values:
        for p in config.p_values:
            b = upper_bound_ct(t, p)
            lo = opnorm_lower(t, p, testset, degree=N)
            report.add("opnorm", t=t, p=p, value=lo, lower=lo, upper=b.value)
            report.check("sandwich", lo, b.value, tol=1e-9 * b.value, t=t, p=p)
            if p == INF:
                # the constant 1 attains the norm on the disc algebra
                report.check("attained", lo, b.value, tol=1e-6 * b.value, relation="==", t=t, p=p)
            if t == 0.0:
                report.check("c0_norm_one", lo, 1.0, tol=1e-12, relation="==", t=t, p=p)
            if p == 2.0:
                Ns = min(N, 2048)
                s = h2_opnorm(finite_section(OperatorKernel(Kind.CESARO_T, t), Ns))
                report.check("h2_section_low", 1.0, s, tol=1e-8, t=t, p=p, n=Ns, value=s)
                report.check("h2_section_high", s, b.value, tol=1e-8, t=t, p=p, n=Ns, value=s)
    ts = [t for t in config.t_values if t > 0.0]
    ps = [p for p in config.p_values if p != INF]
    if ts and ps:
        for row in bound_comparison(ts, ps).rows:
            report.add("bound", t=row.t, p=row.p, value=row.upper, lower=row.lower, upper=row.coarse)
            report.check("refined_lt_coarse", row.upper, row.coarse, relation="<", t=row.t, p=row.p)
            if row.gamma is not None:
                report.check("gamma_negative", row.gamma, 0.0, relation="<", t=row.t, p=row.p)


def run_spectrum(config: RunConfig, report: Report):
    N = config.degree
    eig = diagonal_spectrum(min(N, 10))
    for m, lam in enumerate(eig):
        report.add("eigenvalue", n=m, value=float(lam))
    report.check("eigenvalue_leading", float(eig[0]), 1.0, relation="==", n=0)
    buffer = min(RESIDUAL_BUFFER, N // 4)
    for t in config.t_values:
        for m in range(min(10, N - buffer) + 1):
            res = eigen_residual(t, m, 2, N, buffer=buffer)
            report.check("eigen_residual", res, 1e-10, t=t, p=2.0, n=m)
        Ns = min(N, 1024)
        st = OperatorKernel(Kind.ST, t)
        roots = {n: v ** (1.0 / n) if v > 0 else 0.0 for n, v in power_norms(st, 64, Ns)}
        for n, v in roots.items():
            report.add("st_root_norm", t=t, p=2.0, n=n, value=v)
        report.check("st_radius_decay", roots[64], roots[8], relation="<", t=t, p=2.0, n=64)
        Nz = min(N, 256)
        A = finite_section(st, Nz).entries
        zero = float(np.abs(np.linalg.matrix_power(A, Nz + 2)).max())
        report.check("st_nilpotent", zero, 0.0, relation="==", t=t, n=Nz + 2)
        cert = ergodic_certificate(t, 2, min(N, 256), seed=config.seed)
        for flag in ("spectrum_in_disc", "one_on_circle", "ker_im_trivial"):
            report.check(f"certificate_{flag}", float(getattr(cert, flag)), 1.0, relation="==", t=t)
        report.add("certificate_delta", t=t, value=cert.delta)
        orbit = orbit_containment_st(t, one(), 16)
        report.check("st_orbit_in_h0", float(orbit), 1.0, relation="==", t=t, n=16)


def run_ergodic(config: RunConfig, report: Report):
    N = config.degree
    Np = min(N, 512)
    for t in config.t_values:
        norms = power_norms(OperatorKernel(Kind.CESARO_T, t), 256, Np)
        for n, v in norms:
            report.add("ct_power_norm", t=t, p=2.0, n=n, value=v)
        early = max(v for n, v in norms if n <= 32)
        late = max(v for n, v in norms)
        report.check("ct_power_bounded", late, 1.05 * early, t=t, p=2.0, n=256)
        if t == 0.0:
            for n, v in norms:
                report.check("c0_power_norm_one", v, 1.0, tol=1e-9, relation="==", t=t, n=n)
        st = {n: v for n, v in power_norms(OperatorKernel(Kind.ST, t), 64, Np)}
        for n, v in st.items():
            report.add("st_power_norm", t=t, p=2.0, n=n, value=v)
        report.check("st_power_decay", st[64], st[8], relation="<", t=t, p=2.0, n=64)
        for p in config.p_values:
            errs = [ergodic_limit_error(t, one(), n, p, degree=N) for n in ERGODIC_STEPS]
            for n, e in zip(ERGODIC_STEPS, errs):
                report.add("ergodic_error", t=t, p=p, n=n, value=e)
            for (n0, e0), (n1, e1) in zip(zip(ERGODIC_STEPS, errs), zip(ERGODIC_STEPS[1:], errs[1:])):
                report.check("ergodic_error_decreasing", e1, e0, tol=1e-15, t=t, p=p, n=n1)


_RUNNERS = {"norms": (run_norms,), "spectrum": (run_spectrum,), "ergodic": (run_ergodic,),
            "all": (run_norms, run_spectrum, run_ergodic)}


def cmd_report(config: RunConfig) -> Report:
    report = Report(config)
    for runner in _RUNNERS[config.command]:
        runner(config, report)
    return report


def _with_command(config, command):
    if config.command != command:
        raise ValueError(f"config is for {config.command!r}, not {command!r}")
    return cmd_report(config)


def cmd_norms(config: RunConfig) -> Report:
    return _with_command(config, "norms")


def cmd_spectrum(config: RunConfig) -> Report:
    return _with_command(config, "spectrum")


def cmd_ergodic(config: RunConfig) -> Report:
    return _with_command(config, "ergodic")


def cmd_all(config: RunConfig) -> Report:
    return _with_command(config, "all")


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of numbers, got {text!r}")


def _p_list(text):
    try:
        return [parse_p(x) for x in text.split(",") if x.strip()]
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--t", type=_float_list, default=[0.0, 0.5],
                        help="comma list of t values in [0, 1)")
    common.add_argument("--p", type=_p_list, default=[1.0, 2.0, INF],
                        help="comma list of exponents >= 1; 'inf' allowed")
    common.add_argument("--degree", type=int, default=DEFAULT_DEGREE,
                        help="truncation degree N (capped by CESARO_LAB_MAX_DEGREE)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cesaro-lab", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    ap = sub.add_parser("apply", parents=[common], help="apply kernels to a coefficient file")
    ap.add_argument("input", help="coefficient file, one 're im' per line ('-' for stdin)")
    ap.add_argument("--kernel", default="cesaro",
                    help="comma list of: " + ", ".join(sorted(_KERNEL_NAMES)))
    ap.add_argument("--g", dest="g_path", help="symbol coefficients for tg/vg")
    for name, text in (("norms", "operator-norm sandwiches and bound comparison"),
                       ("spectrum", "eigenvalues, residuals, S_t decay, certificate"),
                       ("ergodic", "power norms and Cesaro-mean convergence"),
                       ("all", "norms, spectrum and ergodic together")):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _config_from_args(args) -> RunConfig:
    if not args.t or not args.p:
        raise DomainError("--t and --p must be nonempty")
    for t in args.t:
        if not (0.0 <= t < 1.0):
            raise DomainError(f"--t values must lie in [0, 1), got {t}")
    if args.degree < MIN_DEGREE:
        raise DomainError(f"--degree must be >= {MIN_DEGREE}, got {args.degree}")
    degree = args.degree
    cap = max_degree()
    if degree > cap:
        log.warning("degree %d capped to CESARO_LAB_MAX_DEGREE=%d", degree, cap)
        degree = cap
    kernels = []
    if args.command == "apply":
        kernels = [k.strip() for k in args.kernel.split(",") if k.strip()]
        unknown = [k for k in kernels if k not in _KERNEL_NAMES]
        if unknown or not kernels:
            raise DomainError(f"unknown kernel(s): {unknown or args.kernel!r}")
    return RunConfig(command=args.command, t_values=list(args.t), p_values=list(args.p),
                     degree=degree, output_path=args.out, format=args.format, seed=args.seed,
                     kernels=kernels, input_path=getattr(args, "input", None),
                     g_path=getattr(args, "g_path", None))


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _config_from_args(args)
        if config.command == "apply":
            _write(config.output_path, cmd_apply(config))
            return EXIT_OK
        report = cmd_report(config)
    except (ParseError, DomainError) as exc:
        print(f"cesaro-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(config.output_path, report.render(config.format))
    for r in report.failures:
        log.error("failed %s t=%s p=%s n=%s: %s %s %s (tol %s)", r["section"], r["t"], r["p"],
                  r["n"], r["lhs"], r["relation"], r["rhs"], r["tol"])
    return EXIT_FAIL if report.failures else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
