"""Command-line front end.

Every run writes its fully resolved configuration into the output header (a
``# config:`` comment line for CSV, a ``config`` key for JSON), so an output
file alone is enough to reproduce it. Exit status: 0 on success, 2 on a
validation error, 1 on a numerical failure (an Inconclusive verdict under
``--strict``, or a Monte Carlo error ceiling breach).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .eigenspace import EigenFunctionHandle, SphereDensity, laplacian_residual
from .groups import classification_json, transitive_groups
from .models import model_from_string
from .positivity import GramError, bochner_test
from .spherical import (
    Verdict,
    boundedness_classify,
    phi_asymptotic,
    phi_eval,
    psi_monte_carlo,
    radial_quadrature,
)

COMMANDS = ("eval-phi", "asym-compare", "sweep-bounded", "bochner", "eigen-check",
            "classify-groups", "psi-mc")


class ConfigError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """``"re,im"`` (or a bare real) to a complex number."""
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"malformed complex literal {text!r}; expected 're,im'")


def parse_lambda(text: str) -> list[complex]:
    """Components separated by ``;``, each ``re,im``."""
    return [parse_complex(part) for part in str(text).split(";") if part.strip()]


def parse_grid(text: str) -> list[float]:
    """``start:stop:count:{lin|geom}``, a comma list, or a single number."""
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 4 or parts[3] not in ("lin", "geom"):
            raise ConfigError(f"malformed grid {text!r}; expected start:stop:count:{{lin|geom}}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"malformed grid {text!r}") from None
        if count < 1 or (parts[3] == "geom" and (start <= 0 or stop <= 0)):
            raise ConfigError(f"invalid grid {text!r}")
        space = np.linspace if parts[3] == "lin" else np.geomspace
        return [float(v) for v in space(start, stop, count)]
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"malformed grid {text!r}") from None


def _finite(obj):
    # strict JSON has no NaN; non-finite floats become null
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _num(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return x


class Output:
    def __init__(self, config: dict, columns: list[str]):
        self.config = config
        self.columns = columns
        self.rows: list[dict] = []
        self.extra: dict = {}

    def add(self, **row):
        self.rows.append(row)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = _finite({"config": self.config, **self.extra, "records": self.rows})
            return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(self.config, sort_keys=True, ensure_ascii=False) + "\n")
        for key, value in self.extra.items():
            buf.write(f"# {key}: " + json.dumps(_finite(value), sort_keys=True, ensure_ascii=False) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_num(row[c]) for c in self.columns])
        return buf.getvalue()


# -- commands -------------------------------------------------------------------


def cmd_eval_phi(args, config):
    s = parse_complex(args.s)
    out = Output(config, ["n", "re_s", "im_s", "r", "log_mag", "phase", "re_value", "im_value",
                          "branch", "err_est"])
    for r in parse_grid(args.r):
        res = radial_quadrature(args.n, s, r, args.nodes) if args.nodes else phi_eval(args.n, s, r)
        try:
            value = res.value.to_complex()
        except OverflowError:
            c, d = math.cos(res.value.phase), math.sin(res.value.phase)
            value = complex(math.copysign(math.inf, c) if c else 0.0,
                            math.copysign(math.inf, d) if d else 0.0)
        out.add(n=args.n, re_s=s.real, im_s=s.imag, r=r, log_mag=res.value.log_magnitude,
                phase=res.value.phase, re_value=value.real, im_value=value.imag,
                branch=res.branch, err_est=res.err_est)
    return out, 0


def cmd_asym_compare(args, config):
    s = parse_complex(args.s)
    if not s.real > 0:
        raise ConfigError("asym-compare needs Re s > 0")
    out = Output(config, ["n", "re_s", "im_s", "r", "log_mag_quad", "phase_quad",
                          "log_mag_asym", "phase_asym", "rel_diff", "err_est"])
    for r in parse_grid(args.r):
        if not r > 0:
            raise ConfigError("asym-compare needs r > 0")
        quad = radial_quadrature(args.n, s, r, args.nodes)
        asym = phi_asymptotic(args.n, s, r)
        out.add(n=args.n, re_s=s.real, im_s=s.imag, r=r,
                log_mag_quad=quad.value.log_magnitude, phase_quad=quad.value.phase,
                log_mag_asym=asym.log_magnitude, phase_asym=asym.phase,
                rel_diff=quad.value.relative_difference(asym), err_est=quad.err_est)
    return out, 0


def _verdict_status(verdict, strict):
    return 1 if strict and verdict == Verdict.INCONCLUSIVE else 0


def cmd_sweep_bounded(args, config):
    model = model_from_string(args.model)
    lam = parse_lambda(args.lam)
    grid = parse_grid(args.grid)
    result = boundedness_classify(model, lam, grid, args.threshold, args.samples, args.seed,
                                  args.tol if args.tol is not None else 0.1)
    out = Output(config, ["direction", "t", "log_abs_psi", "abs_psi", "std_error", "exceeds"])
    for rec in result.records:
        out.add(**rec)
    out.extra = {"verdict": str(result.verdict), "witness": result.witness}
    return out, _verdict_status(result.verdict, args.strict)


def cmd_bochner(args, config):
    model = model_from_string(args.model)
    lam = parse_lambda(args.lam)
    result = bochner_test(model, lam, args.trials, args.m, args.seed, args.samples)
    out = Output(config, ["trial", "min_eigenvalue", "max_eigenvalue", "psd", "tolerance_used",
                          "verdict"])
    for i, rep in enumerate(result.reports):
        out.add(trial=i, min_eigenvalue=rep.min_eigenvalue, max_eigenvalue=rep.max_eigenvalue,
                psd=rep.psd, tolerance_used=rep.tolerance_used, verdict=rep.verdict)
    out.extra = {"verdict": str(result.verdict), "witness": result.witness,
                 "worst": result.worst.to_dict()}
    return out, _verdict_status(result.verdict, args.strict)


def cmd_eigen_check(args, config):
    lam = parse_complex(args.lam)
    if args.density:
        with open(args.density, encoding="utf-8") as fh:
            density = SphereDensity.from_json(fh.read())
    else:
        density = SphereDensity.random(args.n, args.seed)
    handle = EigenFunctionHandle(lam, density)
    rng = np.random.default_rng(args.seed)
    tol = args.tol if args.tol is not None else 1e-4
    cols = [f"x{i}" for i in range(density.n)]
    out = Output(config, [*cols, "re_f", "im_f", "h", "residual", "rel_residual", "err_est", "ok"])
    failed = False
    for _ in range(args.points):
        x = rng.uniform(-args.radius, args.radius, density.n)
        f = handle(x)
        res = laplacian_residual(handle, x, args.h)
        coarse = laplacian_residual(handle, x, 2 * args.h)
        rel = res / abs(lam**2 * f) if f != 0 and lam != 0 else res
        ok = rel <= tol or abs(f) < 0.1
        failed |= not ok
        out.add(**dict(zip(cols, map(float, x))), re_f=f.real, im_f=f.imag, h=args.h,
                residual=res, rel_residual=rel, err_est=abs(coarse - res), ok=ok)
    return out, 1 if args.strict and failed else 0


def cmd_classify_groups(args, config):
    entries = transitive_groups(args.n)
    out = Output(config, ["case", "n_predicate", "K0", "extensions", "groups", "sampler"])
    for entry in entries:
        d = entry.to_dict()
        out.add(**d)
    if args.format == "json":
        # the table itself is the artifact; config travels alongside
        out.render = lambda fmt: json.dumps(
            {"config": config, "entries": json.loads(classification_json(args.n))},
            indent=2, ensure_ascii=False) + "\n"
    else:
        for row in out.rows:
            row["extensions"] = "|".join(row["extensions"])
            row["groups"] = "|".join(row["groups"])
    return out, 0


def cmd_psi_mc(args, config):
    model = model_from_string(args.model)
    lam = parse_lambda(args.lam)
    Y = [float(v) for v in args.Y.split(",")]
    if len(Y) != model.dim_p:
        raise ConfigError(f"Y needs {model.dim_p} coordinates for {model.name}")
    est = psi_monte_carlo(model, lam, Y, args.samples, args.seed)
    log_value = est.to_log()
    scale = math.exp(est.log_scale) if est.log_scale < 700 else math.inf
    value = est.value * scale if scale < math.inf else complex(math.inf, math.inf)
    out = Output(config, ["re_psi", "im_psi", "log_abs_psi", "phase", "std_error", "samples"])
    out.add(re_psi=value.real, im_psi=value.imag, log_abs_psi=log_value.log_magnitude,
            phase=log_value.phase, std_error=est.std_error * scale, samples=est.samples)
    return out, 0


HANDLERS = {
    "eval-phi": cmd_eval_phi,
    "asym-compare": cmd_asym_compare,
    "sweep-bounded": cmd_sweep_bounded,
    "bochner": cmd_bochner,
    "eigen-check": cmd_eigen_check,
    "classify-groups": cmd_classify_groups,
    "psi-mc": cmd_psi_mc,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=20000)
    common.add_argument("--nodes", type=int, default=None,
                        help="fixed quadrature node count (default: adaptive)")
    common.add_argument("--tol", type=float, default=None,
                        help="command tolerance: MC error ceiling (sweep-bounded), "
                             "relative residual (eigen-check)")
    common.add_argument("--strict", action="store_true",
                        help="exit 1 on Inconclusive verdicts or failed checks")

    parser = argparse.ArgumentParser(prog="cartan-motion", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-phi", parents=[common], help="radial spherical function phi(r, s)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", required=True, help="complex 're,im'")
    p.add_argument("--r", required=True, help="radius or grid start:stop:count:{lin|geom}")

    p = sub.add_parser("asym-compare", parents=[common], help="quadrature vs asymptotic law")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--r", required=True)

    p = sub.add_parser("sweep-bounded", parents=[common], help="boundedness classifier")
    p.add_argument("--model", required=True, help="rank1:<n>[:<group>] or sl:<n>")
    p.add_argument("--lambda", dest="lam", required=True, help="components 're,im' joined by ';'")
    p.add_argument("--grid", default="1:1024:11:geom")
    p.add_argument("--threshold", type=float, default=1.05)

    p = sub.add_parser("bochner", parents=[common], help="positive-definiteness test")
    p.add_argument("--model", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--m", type=int, default=8)

    p = sub.add_parser("eigen-check", parents=[common], help="Laplacian residual of a synthesized eigenfunction")
    p.add_argument("--n", type=int, choices=(2, 3), default=2)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--density", help="SphereDensity JSON file (default: seeded random)")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--radius", type=float, default=3.0)
    p.add_argument("--h", type=float, default=1e-3)

    p = sub.add_parser("classify-groups", parents=[common], help="sphere-transitive groups of O(n)")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("psi-mc", parents=[common], help="Monte Carlo psi_lambda(Y)")
    p.add_argument("--model", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--Y", required=True, help="coordinates of Y, comma separated")
    return parser


def _validate(args):
    if args.samples < 2:
        raise ConfigError("--samples must be >= 2")
    if args.nodes is not None and args.nodes < 8:
        raise ConfigError("--nodes must be >= 8")
    if args.out:
        folder = os.path.dirname(os.path.abspath(args.out))
        if not os.path.isdir(folder) or not os.access(folder, os.W_OK):
            raise ConfigError(f"cannot write to {args.out!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in sorted(vars(args).items())}
    config["version"] = __version__
    try:
        _validate(args)
        out, status = HANDLERS[args.command](args, config)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GramError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    text = out.render(args.format)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return status


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
