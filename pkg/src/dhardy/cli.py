"""Command-line experiments: ``dhardy <command> ...``.

Exit status is 0 on success, 1 when a run produces a negative finding (an
envelope or line bound violated, a figure claim not reproduced, a
non-monotone error sequence) and 2 on usage or domain errors.  Files go to
``--out-dir``, else ``$DHARDY_OUTPUT_DIR``, else the working directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic, bessel, continuum, hardy, lattice
from .errors import DomainError
from .evolution import EQUATIONS, METHODS, EvolutionSpec, evolve

OUTPUT_ENV = "DHARDY_OUTPUT_DIR"
EXIT_OK, EXIT_FINDING, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    h: float | None = None
    window: int | None = None
    t: float | None = None
    tolerances: dict = field(default_factory=dict)
    output_path: Path | None = None
    format: str = "csv"

    def write(self, text):
        if self.output_path is None:
            sys.stdout.write(text)
            return
        self.output_path.parent.mkdir(parents=True, exist_ok=True)
        self.output_path.write_text(text)
        print(f"wrote {self.output_path}", file=sys.stderr)


def _out_dir(args):
    if args.out_dir is not None:
        return Path(args.out_dir)
    return Path(os.environ.get(OUTPUT_ENV, "."))


def _config(args, default_name, fmt="csv", **kw):
    if getattr(args, "out", None) == "-":
        path = None
    elif getattr(args, "out", None):
        path = Path(args.out)
    elif default_name is None:
        path = None
    else:
        path = _out_dir(args) / default_name
    return RunConfig(args.command, output_path=path, format=fmt, **kw)


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_bessel(args):
    z = complex(args.re, args.im)
    value = bessel.bessel_i_scaled(args.k, z)
    out = {
        "k": args.k,
        "z": [z.real, z.imag],
        "log_mag": value.log_mag,
        "phase": value.phase,
        "scaled": [value.to_complex().real, value.to_complex().imag],
    }
    status = EXIT_OK
    try:
        oracle, scale = bessel.quadrature_with_scale(args.k, z, rtol=args.rtol)
    except DomainError as exc:
        out["oracle"] = None
        out["oracle_note"] = str(exc)
    else:
        scaled_oracle = oracle * math.exp(-z.real)
        err = abs(value.to_complex() - scaled_oracle) / max(abs(scaled_oracle), scale * math.exp(-z.real))
        out["oracle"] = [scaled_oracle.real, scaled_oracle.imag]
        out["relative_error"] = err
        if err > args.agree_tol:
            status = EXIT_FINDING
    print(json.dumps(out, indent=2))
    return status


def cmd_evolve(args):
    signal = lattice.from_csv(Path(args.input))
    spec = EvolutionSpec(args.eq, args.t, method=args.method, tail_tol=args.tail_tol, modes=args.modes)
    cfg = _config(args, "evolved.csv", t=args.t, h=signal.h, tolerances={"tail_tol": args.tail_tol})
    cfg.write(lattice.to_csv(evolve(signal, spec)))
    return EXIT_OK


def cmd_figure1(args):
    cfg = _config(args, "fig1.csv", h=args.h, window=args.kmax)
    rows = hardy.figure1_rows(args.h, args.kmax)
    cfg.write(hardy.rows_to_csv(["k", "value", "parity"], rows))
    return EXIT_OK


def cmd_figure2(args):
    cfg = _config(args, "fig2.csv", h=args.h)
    rows = hardy.figure2_rows(args.h, args.klo, args.khi)
    cfg.write(hardy.rows_to_csv(["k", "abs_g1", "bound_beta5", "bound_beta4_9"], rows))
    holds = all(b5 >= g for _, g, b5, _ in rows)
    fails = any(b49 < g for _, g, _, b49 in rows)
    print(f"beta=5 bound holds on every row: {holds}; beta=4.9 bound fails somewhere: {fails}", file=sys.stderr)
    return EXIT_OK if holds and fails else EXIT_FINDING


def cmd_gate(args):
    f0, f1 = hardy.make_example(args.example, args.h)
    equation = hardy.example_equation(args.example)
    report = hardy.hardy_gate(f0, f1, args.alpha, args.beta, args.c, equation, tol=args.tol)
    cfg = _config(args, None, fmt="json", h=args.h)
    cfg.write(report.to_json() + "\n")
    ok = report.envelope_ok_t0 and report.envelope_ok_t1 and report.consistent
    return EXIT_OK if ok else EXIT_FINDING


def cmd_lines(args):
    spec = analytic.PRESETS[args.preset](args.r, args.delta, args.s)
    if args.source == "explicit":
        evaluator = analytic.explicit_form(spec.u, args.h, spec.b, args.c)
    else:
        coeffs = analytic.explicit_form_coefficients(spec.u, args.h, spec.b)
        coeffs = coeffs.with_values(coeffs.values * args.c * math.sqrt(2.0 * math.pi) / args.h)
        evaluator = analytic.signal_evaluator(coeffs)
    ys = analytic.default_y_grid(args.h, args.points, args.yh_max)
    report = analytic.check_theorem21_lines(
        evaluator, spec, args.h, ys, args.c, skip_uncertified=args.source == "signal"
    )
    if report.skipped:
        print(f"skipped {report.skipped} samples the series could not certify", file=sys.stderr)
    if not report.rows:
        raise DomainError("no sample could be certified")
    cfg = _config(args, f"lines_{args.preset}.csv", h=args.h, tolerances={"margin": args.margin_tol})
    cfg.write(report.to_csv())
    print(f"max margin: {report.max_margin!r}", file=sys.stderr)
    return EXIT_OK if report.max_margin <= args.margin_tol else EXIT_FINDING


def cmd_converge(args):
    cfg_cmp = continuum.ComparisonConfig(args.sobolev_s, args.mu, args.h_list, args.t)
    report = continuum.convergence_experiment(cfg_cmp, args.eps, args.eq)
    cfg = _config(args, f"converge_{args.eq}.csv", t=args.t)
    cfg.write(report.to_csv())
    print(f"slope: {report.slope!r}; monotone: {report.monotone}", file=sys.stderr)
    return EXIT_OK if report.monotone else EXIT_FINDING


def limit_table(alpha, jmax, points=64, x_max=4.0):
    xs = np.linspace(-x_max, x_max, points)
    js = [j for j in (4 * 2**i for i in range(64)) if j <= jmax]
    return [(j, bessel.gaussian_limit_error(alpha, j, xs)) for j in js]


def cmd_limit(args):
    if args.jmax < 4:
        raise DomainError("jmax must be at least 4")
    rows = limit_table(args.alpha, args.jmax, args.points, args.x_max)
    cfg = _config(args, "limit.csv")
    cfg.write(hardy.rows_to_csv(["j", "error"], rows))
    errs = [e for _, e in rows]
    return EXIT_OK if all(b < a for a, b in zip(errs, errs[1:])) else EXIT_FINDING


def build_parser():
    p = argparse.ArgumentParser(prog="dhardy", description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--out", default=None, help="output file ('-' for stdout)")
        sp.add_argument("--out-dir", default=argparse.SUPPRESS, help="output directory")
        return sp

    sp = add("bessel", cmd_bessel, "scaled I_k(z) with a quadrature cross-check")
    sp.add_argument("k", type=int)
    sp.add_argument("re", type=float)
    sp.add_argument("im", type=float)
    sp.add_argument("--rtol", type=float, default=1e-12)
    sp.add_argument("--agree-tol", type=float, default=1e-9)

    sp = add("evolve", cmd_evolve, "evolve a signal CSV")
    sp.add_argument("--eq", choices=EQUATIONS, default="schrodinger")
    sp.add_argument("--method", choices=METHODS, default="kernel")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tail-tol", type=float, default=1e-12)
    sp.add_argument("--modes", type=int, default=None)

    sp = add("figure1", cmd_figure1, "initial datum of the alternating example (fig1.csv)")
    sp.add_argument("--h", type=float, default=1.0 / 20)
    sp.add_argument("--kmax", type=int, default=50)

    sp = add("figure2", cmd_figure2, "time-1 modulus vs the beta=5 and beta=4.9 bounds (fig2.csv)")
    sp.add_argument("--h", type=float, default=1.0 / 20)
    sp.add_argument("--klo", type=int, default=200)
    sp.add_argument("--khi", type=int, default=250)

    sp = add("gate", cmd_gate, "Hardy gate report (JSON) for a named example")
    # heat_sharp pairs a datum with a continuum reference, not its evolution
    sp.add_argument("--example", choices=[e for e in hardy.EXAMPLES if e != "heat_sharp"], required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--h", type=float, default=0.25)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("lines", cmd_lines, "line-bound margins (CSV)")
    sp.add_argument("--preset", choices=sorted(analytic.PRESETS), required=True)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--delta", type=float, default=math.pi / 4)
    sp.add_argument("--h", type=float, default=0.25)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--source", choices=("explicit", "signal"), default="explicit")
    sp.add_argument("--points", type=int, default=41)
    sp.add_argument("--yh-max", type=float, default=6.0)
    sp.add_argument("--margin-tol", type=float, default=1e-8)

    sp = add("converge", cmd_converge, "discrete-to-continuum error rates (CSV)")
    sp.add_argument("--eq", choices=EQUATIONS, default="schrodinger")
    sp.add_argument("--eps", type=float, default=1.0)
    sp.add_argument("--h-list", type=_floats, default=(0.2, 0.1, 0.05, 0.025))
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--sobolev-s", type=float, default=1.0)
    sp.add_argument("--mu", type=float, default=1.0)

    sp = add("limit", cmd_limit, "Bessel-quotient to Gaussian limit errors (CSV)")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--jmax", type=int, default=32)
    sp.add_argument("--points", type=int, default=64)
    sp.add_argument("--x-max", type=float, default=4.0)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
