"""Single runs, parameter sweeps and CSV/manifest output."""

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, CutoffTooSmallError, QDCavityError
from .model import InitialStateSpec, SystemConfig, build_hamiltonian, build_initial_state
from .observables import ObservableKind, observable_series
from .solvers import TypoPolicy, decompose_blocks, evolve_analytic, propagate_block, propagate_reference

WORKERS_ENV = "QDCAVITY_WORKERS"
DEFAULT_SWEEP_CAP = 10_000
BOUNDED_SLACK = 1e-9
SWEEP_AXES = ("q", "m", "alpha_sq", "state")


class SolverKind(Enum):
    REFERENCE = "reference"
    BLOCK = "block"
    ANALYTIC_AS_PRINTED = "analytic-as-printed"
    ANALYTIC_CORRECTED = "analytic-corrected"


@dataclass(frozen=True)
class RunParams:
    """Plain parameters of one run; picklable and easy to vary in a sweep."""

    state: str = "psi"
    q: float | None = None
    m: int = 1
    alpha_sq: float = 10.0
    n_max: int | None = None
    omega: float = 0.0
    omega1: float | None = None
    omega2: float | None = None
    lam: float = 1.0
    t_max: float = 50.0
    steps: int = 2000
    solver: SolverKind = SolverKind.BLOCK
    observables: tuple = (ObservableKind.PURITY,)

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigurationError(f"steps must be at least 2, got {self.steps}")
        if not self.t_max > 0:
            raise ConfigurationError(f"t_max must be positive, got {self.t_max}")
        if not self.observables:
            raise ConfigurationError("no observables requested")

    def config(self):
        return SystemConfig.build(m=self.m, q=self.q, alpha_sq=self.alpha_sq, n_max=self.n_max,
                                  omega=self.omega, omega1=self.omega1, omega2=self.omega2,
                                  lam=self.lam)

    def initial(self):
        return InitialStateSpec.named(self.state)

    def times(self):
        return np.linspace(0.0, self.t_max, self.steps)

    def assignments(self):
        q = "none" if self.q is None else f"{self.q:g}"
        return {"state": self.state, "m": str(self.m), "q": q, "alpha_sq": f"{self.alpha_sq:g}"}


@dataclass
class RunRequest:
    params: RunParams
    output_path: Path

    @property
    def config(self):
        return self.params.config()


@dataclass
class RunResult:
    times: np.ndarray
    series: dict
    output_path: Path | None = None
    norm_defects: np.ndarray | None = None

    def summary_lines(self):
        lines = []
        for kind, s in self.series.items():
            v = s.values
            lines.append(f"{kind.value}: min={v.min():.6g} max={v.max():.6g} final={v[-1]:.6g}")
        return lines


def propagate(params, cfg=None):
    """State amplitudes ``(steps, dim)`` on the run's time grid."""
    cfg = cfg or params.config()
    spec = params.initial()
    times = params.times()
    # the grid is scaled time lambda*t; solvers take physical time
    phys = times / params.lam if params.lam > 0 else times
    if params.solver is SolverKind.ANALYTIC_AS_PRINTED or params.solver is SolverKind.ANALYTIC_CORRECTED:
        policy = (TypoPolicy.AS_PRINTED if params.solver is SolverKind.ANALYTIC_AS_PRINTED
                  else TypoPolicy.CORRECTED)
        states = evolve_analytic(cfg, spec, phys, policy)
        return times, np.array([s.amplitudes for s in states]), np.array([s.norm_defect for s in states])
    psi0 = build_initial_state(spec, cfg).amplitudes
    H = build_hamiltonian(cfg)
    if params.solver is SolverKind.REFERENCE:
        amps = propagate_reference(H, psi0, phys)
    else:
        amps = propagate_block(decompose_blocks(H, cfg), psi0, phys)
    amps[0] = psi0
    return times, amps, None


def simulate(params):
    cfg = params.config()
    times, amps, defects = propagate(params, cfg)
    series = observable_series(amps, times, params.observables, params.initial().amplitudes)
    return RunResult(times, series, norm_defects=defects)


def _bounded(values, kind):
    lo, hi = values.min(), values.max()
    if lo < -BOUNDED_SLACK or hi > 1.0 + BOUNDED_SLACK:
        raise ValueError(f"{kind.value} left [0, 1]: range [{lo!r}, {hi!r}]")
    return np.clip(values, 0.0, 1.0)


def format_csv(result):
    kinds = list(result.series)
    cols = [_bounded(result.series[k].values, k) for k in kinds]
    lines = [",".join(["lambda_t"] + [k.value for k in kinds])]
    for i, t in enumerate(result.times):
        lines.append(",".join(["%.15g" % t] + ["%.15g" % c[i] for c in cols]))
    return "\n".join(lines) + "\n"


def write_csv(result, path):
    path = Path(path)
    text = format_csv(result)
    path.write_text(text, encoding="utf-8", newline="\n")
    result.output_path = path
    return path


def run(request):
    """Simulate one request and write its CSV; returns the :class:`RunResult`."""
    result = simulate(request.params)
    write_csv(result, request.output_path)
    return result


@dataclass
class SweepRequest:
    base: RunParams
    axes: list = field(default_factory=list)
    cap: int = DEFAULT_SWEEP_CAP
    prefix: str = "run"

    def __post_init__(self):
        for name, values in self.axes:
            if name not in SWEEP_AXES:
                raise ConfigurationError(f"unknown sweep axis {name!r}; expected one of {SWEEP_AXES}")
            if not values:
                raise ConfigurationError(f"sweep axis {name!r} has no values")
        if self.size > self.cap:
            raise ConfigurationError(f"sweep has {self.size} points, cap is {self.cap}")

    @property
    def size(self):
        return math.prod(len(v) for _, v in self.axes)

    def points(self):
        names = [n for n, _ in self.axes]
        for combo in itertools.product(*(v for _, v in self.axes)):
            overrides = dict(zip(names, combo))
            params = replace(self.base, **overrides)
            yield params, point_filename(self.prefix, names, params)


def point_filename(prefix, names, params):
    tags = params.assignments()
    parts = [prefix] + [f"{n}-{tags[n]}" for n in names]
    return "_".join(parts) + ".csv"


@dataclass
class PointOutcome:
    params: RunParams
    filename: str
    error: str | None = None
    exit_code: int = 0


def _run_point(args):
    params, path = args
    try:
        run(RunRequest(params, Path(path)))
    except CutoffTooSmallError as exc:
        return str(exc), 4
    except ConfigurationError as exc:
        return str(exc), 2
    except OSError as exc:
        return str(exc), 3
    except (QDCavityError, ValueError) as exc:
        return str(exc), 1
    return None, 0


def default_workers():
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(request, out_dir, workers=None):
    """Run every grid point, write one CSV each plus ``manifest.tsv``.

    Points may run in parallel; results are collected in grid order so the
    output does not depend on scheduling.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = list(request.points())
    jobs = [(p, str(out_dir / name)) for p, name in points]
    workers = default_workers() if workers is None else max(1, workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    outcomes = [PointOutcome(p, name, err, code)
                for (p, name), (err, code) in zip(points, results)]
    write_manifest(out_dir / "manifest.tsv", [o for o in outcomes if o.error is None])
    return outcomes


def write_manifest(path, outcomes):
    lines = []
    for o in outcomes:
        assigns = ";".join(f"{k}={v}" for k, v in o.params.assignments().items())
        lines.append(f"{assigns}\t{o.filename}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")


_PURITY = (ObservableKind.PURITY,)
_FIDELITY = (ObservableKind.FIDELITY,)
_POPS = (ObservableKind.POP_EE, ObservableKind.POP_EG, ObservableKind.POP_GE, ObservableKind.POP_GG)
_ALL_Q = [None, 0.1, 0.5, 0.9]
_DEFORMED_Q = [0.1, 0.5, 0.9]

# figure number -> (state, observables, axes)
FIGURE_PRESETS = {
    1: ("psi", _PURITY, [("m", [1, 2]), ("q", _ALL_Q)]),
    2: ("phi", _PURITY, [("m", [1, 2]), ("q", _DEFORMED_Q)]),
    3: ("psi", _FIDELITY, [("m", [1, 2]), ("q", _ALL_Q)]),
    4: ("phi", _FIDELITY, [("m", [1, 2]), ("q", _ALL_Q)]),
    5: ("psi", _POPS, [("m", [1, 2]), ("q", [None])]),
    6: ("psi", _POPS, [("m", [1, 2]), ("q", [0.5, 0.9])]),
    7: ("phi", _POPS, [("m", [1, 2]), ("q", [0.5])]),
}


def figure_sweep(number, base=None):
    """Sweep reproducing the data behind one of the figures (mean photon number 10)."""
    try:
        state, kinds, axes = FIGURE_PRESETS[number]
    except KeyError:
        raise ConfigurationError(f"no preset for figure {number}; choose 1-7") from None
    base = base or RunParams()
    base = replace(base, state=state, observables=kinds, alpha_sq=10.0)
    return SweepRequest(base, [(n, list(v)) for n, v in axes], prefix=f"fig{number}")
