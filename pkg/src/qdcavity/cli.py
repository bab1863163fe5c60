"""Command-line driver: ``qdcavity run | sweep | verify``.

Exit codes: 0 success, 1 failed check or point, 2 invalid configuration,
3 I/O failure, 4 Fock cutoff too small.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import checks
from .errors import ConfigurationError, CutoffTooSmallError
from .observables import ObservableKind
from .runner import (SWEEP_AXES, RunParams, RunRequest, SolverKind, SweepRequest, figure_sweep,
                     run, sweep)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_IO, EXIT_CUTOFF = 0, 1, 2, 3, 4

# flag name -> RunParams field
_PARAM_KEYS = {
    "state": "state", "q": "q", "m": "m", "alpha_sq": "alpha_sq", "nmax": "n_max",
    "tmax": "t_max", "steps": "steps", "solver": "solver", "observables": "observables",
    "omega": "omega", "omega1": "omega1", "omega2": "omega2", "lambda": "lam",
}


def parse_q(text):
    text = str(text).strip().lower()
    if text in ("none", "", "1", "1.0"):
        return None
    return float(text)


def parse_observables(text):
    names = [t.strip() for t in str(text).split(",") if t.strip()]
    if names == ["populations"]:
        names = ["pop_ee", "pop_eg", "pop_ge", "pop_gg"]
    try:
        return tuple(ObservableKind(n) for n in names)
    except ValueError as exc:
        raise ConfigurationError(f"unknown observable in {text!r}") from exc


_CONVERT = {
    "q": parse_q, "m": int, "alpha_sq": float, "n_max": int, "t_max": float, "steps": int,
    "solver": SolverKind, "observables": parse_observables, "omega": float, "omega1": float,
    "omega2": float, "lam": float, "state": str,
}


def read_config_file(path):
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def build_params(args):
    raw = read_config_file(args.config) if args.config else {}
    for key in _PARAM_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    kwargs = {}
    for key, value in raw.items():
        if key == "out":
            continue
        if key not in _PARAM_KEYS:
            raise ConfigurationError(f"unknown configuration key {key!r}")
        field_name = _PARAM_KEYS[key]
        try:
            kwargs[field_name] = _CONVERT[field_name](value)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key}: {value!r}") from exc
    return RunParams(**kwargs), raw.get("out")


def _add_physics_flags(p):
    p.add_argument("--config", help="key=value configuration file; flags override it")
    p.add_argument("--state", choices=["psi", "phi"])
    p.add_argument("--q", help="deformation parameter in (0,1), or 'none'")
    p.add_argument("--m", help="photon multiplicity")
    p.add_argument("--alpha-sq", dest="alpha_sq", help="mean photon number |alpha|^2")
    p.add_argument("--nmax", help="Fock cutoff (default: automatic)")
    p.add_argument("--tmax", help="final scaled time lambda*t")
    p.add_argument("--steps", help="number of time samples")
    p.add_argument("--solver", choices=[s.value for s in SolverKind])
    p.add_argument("--observables", help="comma list of " + ",".join(k.value for k in ObservableKind)
                   + " (or 'populations')")
    p.add_argument("--omega", help="field frequency (units of lambda)")
    p.add_argument("--omega1", help="atom 1 transition frequency (default m*omega)")
    p.add_argument("--omega2", help="atom 2 transition frequency (default m*omega)")
    p.add_argument("--lambda", dest="lambda", help="coupling constant")


def make_parser():
    parser = argparse.ArgumentParser(prog="qdcavity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one configuration and write a CSV")
    _add_physics_flags(p_run)
    p_run.add_argument("--out", help="output CSV path")

    p_sweep = sub.add_parser("sweep", help="run a parameter grid or a figure preset")
    _add_physics_flags(p_sweep)
    p_sweep.add_argument("--figure", type=int, help="figure preset 1-7")
    p_sweep.add_argument("--axis", action="append", default=[],
                         help="NAME=v1,v2,... with NAME in " + ",".join(SWEEP_AXES))
    p_sweep.add_argument("--out-dir", default=".", help="directory for CSVs and manifest.tsv")
    p_sweep.add_argument("--workers", type=int, help="worker processes (env QDCAVITY_WORKERS)")
    p_sweep.add_argument("--cap", type=int, default=10_000, help="maximum grid size")

    p_verify = sub.add_parser("verify", help="run the solver and conservation check battery")
    p_verify.add_argument("--alpha-sq", dest="alpha_sq", type=float, default=10.0)
    p_verify.add_argument("--nmax", type=int)
    p_verify.add_argument("--tmax", type=float, default=50.0)
    p_verify.add_argument("--steps", type=int, default=400)
    return parser


def parse_axis(text):
    if "=" not in text:
        raise ConfigurationError(f"axis must be NAME=v1,v2,..., got {text!r}")
    name, values = text.split("=", 1)
    name = name.strip().replace("-", "_")
    convert = {"q": parse_q, "m": int, "alpha_sq": float, "state": str}.get(name)
    if convert is None:
        raise ConfigurationError(f"unknown sweep axis {name!r}; expected one of {SWEEP_AXES}")
    try:
        return name, [convert(v.strip()) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad value on axis {name}: {values!r}") from exc


def _cmd_run(args):
    params, out = build_params(args)
    out = args.out or out
    if not out:
        raise ConfigurationError("run needs --out")
    result = run(RunRequest(params, Path(out)))
    for line in result.summary_lines():
        print(line)
    return EXIT_OK


def _cmd_sweep(args):
    params, _ = build_params(args)
    if args.figure is not None:
        if args.axis:
            raise ConfigurationError("--figure and --axis are exclusive")
        req = figure_sweep(args.figure, params)
        req = replace(req, cap=args.cap)
    else:
        req = SweepRequest(params, [parse_axis(a) for a in args.axis], cap=args.cap)
    outcomes = sweep(req, args.out_dir, workers=args.workers)
    status = EXIT_OK
    for o in outcomes:
        if o.error is None:
            print(f"ok    {o.filename}")
        else:
            print(f"FAIL  {o.filename}: {o.error}", file=sys.stderr)
            status = status or o.exit_code
    print(f"{sum(o.error is None for o in outcomes)}/{len(outcomes)} points written to {args.out_dir}")
    return status


def _cmd_verify(args):
    results = checks.run_battery(alpha_sq=args.alpha_sq, n_max=args.nmax, t_max=args.tmax,
                                 steps=args.steps)
    print(checks.format_table(results))
    failed = [r for r in results if r.counted and not r.passed]
    documented = [r for r in results if not r.counted and not r.passed]
    print(f"{len(results) - len(failed) - len(documented)} passed, {len(failed)} failed, "
          f"{len(documented)} documented discrepancies")
    for r in failed:
        print(f"failed: {r.name} [{r.config}] measured {r.measured:.3e}", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "verify": _cmd_verify}[args.command]
    try:
        return handler(args)
    except CutoffTooSmallError as exc:
        print(f"error: {exc} (required n_max: {exc.required_n_max})", file=sys.stderr)
        return EXIT_CUTOFF
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
