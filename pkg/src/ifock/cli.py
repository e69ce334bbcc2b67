"""Command-line front end: ``ifock <command> --measure <spec> ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 the measure itself is invalid.  All output is deterministic JSON (CSV for
``verify-all --format csv``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

from . import __version__
from .bargmann import make_kernel, sb_series, sb_transform
from .errors import IfockError, MeasureError
from .fock import TruncatedFock, build_ladders, ladders_to_json
from .measures import RAW, parse_measure
from .orthopoly import (
    IllConditionedWarning,
    PolynomialFamily,
    check_condition_star,
    from_p_basis,
    jacobi_from_measure,
    jacobi_to_json,
)
from .verify import CMEASURE_CHECKS, ConfigError, RunConfig, Verifier

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_MEASURE = 3

SEED_ENV = "IFOCK_SEED"


def _emit(text: str, output: str | None = None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj, output: str | None = None):
    _emit(json.dumps(obj, indent=2) + "\n", output)


def parse_z(text: str) -> complex:
    """``re,im`` or ``re`` as a complex number."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"--z expects 're,im', got {text!r}")


def parse_poly(text: str) -> tuple[str, object]:
    """``family:n`` -> ("family", n); ``c0,c1,...`` or a JSON array -> ("coeffs", list)."""
    text = text.strip()
    if text.startswith("family:"):
        try:
            n = int(text.partition(":")[2])
        except ValueError:
            raise ConfigError(f"bad family index in {text!r}") from None
        if n < 0:
            raise ConfigError("family index must be non-negative")
        return "family", n
    try:
        values = json.loads(text) if text.startswith("[") else [float(v) for v in text.split(",")]
    except (ValueError, json.JSONDecodeError):
        raise ConfigError(f"--poly expects 'family:n' or comma-separated coefficients, got {text!r}") from None
    if not values or not all(isinstance(v, (int, float)) for v in values):
        raise ConfigError(f"--poly coefficients must be numbers, got {text!r}")
    return "coeffs", [float(v) for v in values]


def parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol value for {name} is not a number") from None
    return out


def load_config(args) -> RunConfig:
    """Merge defaults, the ``--config`` file, ``IFOCK_SEED`` and explicit flags (in that order)."""
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    if os.environ.get(SEED_ENV):
        try:
            data["seed"] = int(os.environ[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer") from None
    for key in ("measure", "depth", "max_degree", "seed", "format", "output"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    tolerances = dict(data.get("tolerances", {}))
    tolerances.update(parse_tol(getattr(args, "tol", None)))
    if tolerances:
        data["tolerances"] = tolerances
    if "measure" not in data:
        raise ConfigError("--measure is required (or a config file with 'measure')")
    return RunConfig.from_dict(data)


def _family_depth(spec, degree: int) -> int:
    return max(degree + 1, 2)


def _default_depth(spec, requested, default: int) -> int:
    """``requested`` if given; otherwise ``default``, capped by the raw moments on hand."""
    if requested is not None:
        return requested
    if spec.kind == RAW:
        return min(default, len(spec.moments) // 2)
    return default


def cmd_jacobi(args) -> int:
    spec = parse_measure(args.measure)
    depth = _default_depth(spec, args.depth, 20)
    if depth < 1:
        raise ConfigError("--depth must be >= 1")
    j = jacobi_from_measure(spec, depth)
    report = check_condition_star(j.lam)
    out = {"measure": spec.to_text()}
    out.update(jacobi_to_json(j, report))
    _dump(out, args.output)
    return EXIT_OK


def cmd_fock_dump(args) -> int:
    spec = parse_measure(args.measure)
    depth = _default_depth(spec, args.depth, 8)
    if depth < 1:
        raise ConfigError("--depth must be >= 1")
    f = TruncatedFock(jacobi_from_measure(spec, depth))
    out = {"measure": spec.to_text()}
    out.update(ladders_to_json(build_ladders(f)))
    _dump(out, args.output)
    return EXIT_OK


def _poly_family(spec, kind, value):
    """Family deep enough for the polynomial, plus its monomial coefficients."""
    degree = value if kind == "family" else len(value) - 1
    depth = _family_depth(spec, degree)
    if spec.kind == RAW:
        depth = min(depth, len(spec.moments) // 2)
    fam = PolynomialFamily.from_jacobi(jacobi_from_measure(spec, depth))
    if kind == "family":
        if value > fam.max_degree:
            raise ConfigError(f"P_{value} needs {2 * (value + 1)} moments")
        e = [0] * (value + 1)
        e[value] = 1
        mono = [float(c) for c in from_p_basis(fam, e)]
    else:
        mono = value
    return fam, mono


def cmd_sb(args) -> int:
    spec = parse_measure(args.measure)
    kind, value = parse_poly(args.poly)
    fam, mono = _poly_family(spec, kind, value)
    series = sb_series(fam, mono)
    if args.action == "series":
        _dump(series.to_json(), args.output)
        return EXIT_OK
    if args.z is None:
        raise ConfigError("sb eval needs --z")
    z = parse_z(args.z)
    if args.method == "quadrature":
        kernel = make_kernel(spec) if spec.kind != RAW else make_kernel(spec, len(spec.moments) // 2)
        value = sb_transform(spec, mono, z, kernel=kernel)
    else:
        value = complex(series(z))
    _dump({"value": [value.real, value.imag]}, args.output)
    return EXIT_OK


def cmd_cmeasure(args) -> int:
    config = load_config(args)
    spec = config.spec()
    if not spec.is_named:
        raise ConfigError("cmeasure verify needs a Gaussian or Poisson measure")
    verifier = Verifier(config, gamma_order=config.max_degree)
    report = verifier.run(CMEASURE_CHECKS)
    out = {
        "tool": "ifock",
        "version": __version__,
        "measure": spec.to_text(),
        "max_degree": config.max_degree,
        "seed": config.seed,
        "gamma_diagonal": verifier.gamma_diagonal(),
        "checks": [r.to_json(key="check") for r in report.records],
        "pass": report.passed,
    }
    _dump(out, config.output)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_verify_all(args) -> int:
    config = load_config(args)
    report = Verifier(config).run()
    _emit(report.dumps(config.format), config.output)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _add_run_flags(p, max_degree_default: int | None = None):
    p.add_argument("--measure", help="gaussian:m=<f>,var=<f> | poisson:a=<f> | raw:[m0,m1,...]")
    p.add_argument("--max-degree", dest="max_degree", type=int, default=max_degree_default)
    p.add_argument("--seed", type=int, help=f"random seed (overrides ${SEED_ENV} and the config file)")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override one check tolerance")
    p.add_argument("--config", help="JSON file mirroring the run configuration")
    p.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifock", description="Interacting Fock spaces and the Segal-Bargmann transform."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jacobi", help="Jacobi parameters, lambda sequence and condition-star witness")
    p.add_argument("--measure", required=True)
    p.add_argument("--depth", type=int, help="number of alpha_n to compute (default 20)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_jacobi)

    p = sub.add_parser("fock", help="truncated Fock space matrices")
    p.add_argument("action", choices=["dump"])
    p.add_argument("--measure", required=True)
    p.add_argument("--depth", type=int, help="dimension of the truncated space (default 8)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_fock_dump)

    p = sub.add_parser("sb", help="Segal-Bargmann transform of a polynomial")
    p.add_argument("action", nargs="?", choices=["eval", "series"], default="eval")
    p.add_argument("--measure", required=True)
    p.add_argument("--poly", required=True, help="family:n or monomial coefficients c0,c1,...")
    p.add_argument("--z", help="complex point as re,im (use --z=-1,0 for a leading minus)")
    p.add_argument("--method", choices=["series", "quadrature"], default="series")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sb)

    p = sub.add_parser("cmeasure", help="representing measure checks")
    p.add_argument("action", choices=["verify"])
    _add_run_flags(p, max_degree_default=None)
    p.set_defaults(func=cmd_cmeasure, cmeasure=True)

    p = sub.add_parser("verify-all", help="run every check and print a report")
    _add_run_flags(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--format", choices=["json", "csv"])
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cmeasure", False) and args.max_degree is None:
        args.max_degree = 6
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IllConditionedWarning)
            return args.func(args)
    except MeasureError as exc:
        print(f"ifock: invalid measure: {exc}", file=sys.stderr)
        return EXIT_MEASURE
    except (IfockError, ValueError) as exc:
        print(f"ifock: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
