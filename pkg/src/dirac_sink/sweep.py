"""Grid sweeps over model/noise parameters with CSV + manifest output.

A sweep is a list of at most two axes over a task-specific parameter set;
every cell echoes its resolved inputs next to the task outputs, one row
per cell in grid order.  Cell failures are flagged in an `error` column
instead of aborting the run.  Identical configuration always produces a
byte-identical CSV.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import csvio
from .analytic import coefficients
from .dynamics import IntegratorConfig, propagate
from .errors import InvalidGrid, SingularDenominator, UnknownFigure
from .noise import NoiseParams, propagate_noisy
from .params import ModelParams
from .spectral import spectrum

TASKS = ("spectrum", "efficiency", "eta0", "noisy-efficiency")

#: parameters a sweep axis may range over
AXIS_NAMES = (
    "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "d", "gamma_noise",
)

_NOISE_KEYS = ("d", "gamma_noise")
_DYNAMICS_KEYS = ("init", "t_final")

_INPUT_COLUMNS = {
    "spectrum": ("eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im"),
    "eta0": ("eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im"),
    "efficiency": (
        "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "init", "t_final",
    ),
    "noisy-efficiency": (
        "eps", "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "init",
        "d", "gamma_noise", "t_final",
    ),
}

_OUTPUT_COLUMNS = {
    "spectrum": ("E1", "E2", "Y1", "Y2", "omega_re", "omega_im", "spacing", "width_sum"),
    "eta0": ("eta0", "valid"),
    "efficiency": ("eta1", "eta2", "trace_final", "budget_err"),
    "noisy-efficiency": ("eta1", "eta2", "trace_final", "budget_err"),
}


@dataclass(frozen=True)
class GridAxis:
    name: str
    values: tuple[float, ...]
    spacing: str

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidGrid(f"unknown axis parameter {self.name!r}")
        if len(self.values) < 2:
            raise InvalidGrid(f"axis {self.name!r} needs at least 2 points")

    @classmethod
    def linear(cls, name: str, lo: float, hi: float, count: int) -> "GridAxis":
        if count < 2:
            raise InvalidGrid(f"axis {name!r} needs count >= 2, got {count}")
        return cls(name, tuple(np.linspace(lo, hi, count)), "linear")

    @classmethod
    def log(cls, name: str, lo: float, hi: float, count: int) -> "GridAxis":
        if count < 2:
            raise InvalidGrid(f"axis {name!r} needs count >= 2, got {count}")
        if not (lo > 0 and hi > 0):
            raise InvalidGrid(f"log axis {name!r} needs positive bounds")
        return cls(name, tuple(np.geomspace(lo, hi, count)), "log")

    @classmethod
    def explicit(cls, name: str, values) -> "GridAxis":
        return cls(name, tuple(float(v) for v in values), "explicit")

    def describe(self) -> dict:
        return {"name": self.name, "count": len(self.values),
                "spacing": self.spacing, "values": list(self.values)}


def _resolve_eps(cell: dict) -> tuple[float, float]:
    has_split = "eps1" in cell or "eps2" in cell
    if "eps" in cell and has_split:
        raise InvalidGrid("give either eps or (eps1, eps2), not both")
    if "eps" in cell:
        e = float(cell["eps"])
        return 0.5 * e, -0.5 * e
    if "eps1" in cell and "eps2" in cell:
        return float(cell["eps1"]), float(cell["eps2"])
    raise InvalidGrid("missing eps (or the eps1/eps2 pair)")


def _resolve_model(cell: dict) -> ModelParams:
    eps1, eps2 = _resolve_eps(cell)
    missing = [k for k in ("gamma1", "gamma2", "v_re") if k not in cell]
    if missing:
        raise InvalidGrid(f"missing required parameters: {missing}")
    v = complex(float(cell["v_re"]), float(cell.get("v_im", 0.0)))
    return ModelParams(eps1, eps2, float(cell["gamma1"]), float(cell["gamma2"]), v)


@dataclass(frozen=True)
class SweepGrid:
    """Axes (at most two), the task, and the remaining fixed parameters."""

    axes: tuple[GridAxis, ...]
    task: str
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in TASKS:
            raise InvalidGrid(f"unknown task {self.task!r}; expected one of {TASKS}")
        if len(self.axes) > 2:
            raise InvalidGrid("at most 2 sweep axes are supported")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise InvalidGrid(f"duplicate axis parameter in {names}")
        for name in names:
            if name in self.fixed:
                raise InvalidGrid(f"{name!r} is both an axis and a fixed parameter")
        if self.task == "noisy-efficiency":
            for key in _NOISE_KEYS:
                if key not in names and key not in self.fixed:
                    raise InvalidGrid(f"noisy-efficiency needs {key!r}")
        if self.task in ("efficiency", "noisy-efficiency"):
            if "init" not in self.fixed:
                raise InvalidGrid(f"{self.task} needs a fixed 'init' state")
        # validate the fixed model parameters once, with a dummy axis value
        probe = dict(self.fixed)
        for a in self.axes:
            probe[a.name] = a.values[0]
        _resolve_model(probe)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.values) for a in self.axes)

    def n_cells(self) -> int:
        out = 1
        for a in self.axes:
            out *= len(a.values)
        return out

    def cells(self):
        """Cell parameter dicts in grid order (first axis outermost)."""
        if not self.axes:
            yield dict(self.fixed)
            return
        if len(self.axes) == 1:
            for v in self.axes[0].values:
                cell = dict(self.fixed)
                cell[self.axes[0].name] = v
                yield cell
            return
        for v0 in self.axes[0].values:
            for v1 in self.axes[1].values:
                cell = dict(self.fixed)
                cell[self.axes[0].name] = v0
                cell[self.axes[1].name] = v1
                yield cell

    def describe(self) -> dict:
        return {
            "task": self.task,
            "axes": [a.describe() for a in self.axes],
            "fixed": {k: v for k, v in sorted(self.fixed.items())},
        }


def _integrator_for(cell: dict) -> IntegratorConfig:
    return IntegratorConfig(t_final=float(cell.get("t_final", 10.0)))


def _compute_cell(task: str, cell: dict) -> dict:
    p = _resolve_model(cell)
    if task == "spectrum":
        cs = spectrum(p)
        return {
            "E1": cs.e1, "E2": cs.e2, "Y1": cs.y1, "Y2": cs.y2,
            "omega_re": cs.omega.real, "omega_im": cs.omega.imag,
            "spacing": cs.spacing, "width_sum": cs.width_sum,
        }
    if task == "eta0":
        try:
            c = coefficients(p)
        except SingularDenominator:
            return {"eta0": float("nan"), "valid": False}
        return {"eta0": c.eta0, "valid": True}
    cfg = _integrator_for(cell)
    if task == "efficiency":
        rec = propagate(p, str(cell["init"]), cfg)
    else:
        noise = NoiseParams.symmetric(float(cell["d"]), float(cell["gamma_noise"]))
        rec = propagate_noisy(p, noise, str(cell["init"]), cfg)
    return {
        "eta1": rec.eta1[-1], "eta2": rec.eta2[-1],
        "trace_final": rec.trace[-1], "budget_err": rec.budget_error.max(),
    }


def _cell_row(args) -> list:
    task, cell = args
    p_err = None
    nan = float("nan")
    try:
        p = _resolve_model(cell)
        echo = {
            "eps": p.eps, "eps1": p.eps1, "eps2": p.eps2,
            "gamma1": p.gamma1, "gamma2": p.gamma2,
            "v_re": p.v.real, "v_im": p.v.imag,
        }
    except Exception as exc:
        # echo the raw cell so the flagged row still identifies itself
        e1, e2 = cell.get("eps1", nan), cell.get("eps2", nan)
        if "eps" in cell:
            e1, e2 = 0.5 * cell["eps"], -0.5 * cell["eps"]
        echo = {
            "eps": cell.get("eps", e1 - e2), "eps1": e1, "eps2": e2,
            "gamma1": cell.get("gamma1", nan), "gamma2": cell.get("gamma2", nan),
            "v_re": cell.get("v_re", nan), "v_im": cell.get("v_im", 0.0),
        }
        p_err = type(exc).__name__
    echo.update({
        "init": cell.get("init", ""), "d": cell.get("d", nan),
        "gamma_noise": cell.get("gamma_noise", nan),
        "t_final": float(cell.get("t_final", 10.0)),
    })
    if p_err is None:
        try:
            outputs = _compute_cell(task, cell)
        except Exception as exc:  # per-cell failures become flagged rows
            p_err = type(exc).__name__
    if p_err is not None:
        outputs = {k: nan for k in _OUTPUT_COLUMNS[task]}
        if task == "eta0":
            outputs["valid"] = False
    row = [echo[k] for k in _INPUT_COLUMNS[task]]
    row += [outputs[k] for k in _OUTPUT_COLUMNS[task]]
    row.append(p_err or "")
    return row


def resolve_workers(workers: int | None = None) -> int:
    cap = os.environ.get("DIRAC_SINK_THREADS")
    if workers is None:
        workers = int(cap) if cap else 1
    elif cap:
        workers = min(workers, int(cap))
    return max(1, workers)


def sweep_header(task: str) -> list[str]:
    return list(_INPUT_COLUMNS[task]) + list(_OUTPUT_COLUMNS[task]) + ["error"]


@dataclass
class SweepResult:
    header: list[str]
    rows: list[list]
    manifest: dict

    def to_csv(self, target) -> None:
        csvio.write_csv(target, self.header, self.rows)

    def write_manifest(self, target) -> None:
        Path(target).write_text(json.dumps(self.manifest, indent=2) + "\n")


def run_sweep(
    grid: SweepGrid,
    seed: int | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate every cell, in grid order, optionally on a process pool."""
    return _run_grids([grid], grid.describe(), seed, workers)


def _run_grids(grids, config: dict, seed, workers) -> SweepResult:
    from . import __version__

    tasks = {g.task for g in grids}
    if len(tasks) != 1:
        raise InvalidGrid("all grids in one run must share a task")
    task = tasks.pop()
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    jobs = [(task, cell) for g in grids for cell in g.cells()]
    n_workers = resolve_workers(workers)
    if n_workers > 1 and len(jobs) > 1:
        chunk = max(1, len(jobs) // (4 * n_workers))
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(_cell_row, jobs, chunksize=chunk))
    else:
        rows = [_cell_row(j) for j in jobs]
    manifest = {
        "config": config,
        "seed": seed,
        "version": __version__,
        "started_at": started.isoformat(),
        "elapsed_s": time.perf_counter() - t0,
    }
    return SweepResult(header=sweep_header(task), rows=rows, manifest=manifest)


# --- preconfigured figure datasets --------------------------------------------

@dataclass(frozen=True)
class FigureDataset:
    """The sweep family whose CSV regenerates one figure of the study."""

    figure_id: int
    grids: tuple[SweepGrid, ...]
    description: str

    def run(self, seed: int | None = None, workers: int | None = None) -> SweepResult:
        config = {
            "figure": self.figure_id,
            "description": self.description,
            "grids": [g.describe() for g in self.grids],
        }
        return _run_grids(list(self.grids), config, seed, workers)


def _with_points(axis: GridAxis, points: int | None) -> GridAxis:
    if points is None or axis.spacing == "explicit":
        return axis
    ctor = GridAxis.log if axis.spacing == "log" else GridAxis.linear
    return ctor(axis.name, axis.values[0], axis.values[-1], points)


def figure_dataset(figure_id: int, points: int | None = None) -> FigureDataset:
    """Grid + fixed parameters encoding one figure's caption.

    `points` overrides the per-axis resolution of the non-explicit axes
    (useful for quick runs); default resolutions are >= 200 points for
    line plots and 101 x 101 for surfaces.
    """
    v_fixed = {"v_re": 2.0, "v_im": 0.0}
    if figure_id == 3:
        grids = tuple(
            SweepGrid(
                axes=(
                    _with_points(GridAxis.linear("gamma1", 0.0, 6.0, 101), points),
                    _with_points(GridAxis.linear("gamma2", 0.0, 6.0, 101), points),
                ),
                task="spectrum",
                fixed={"eps": eps, **v_fixed},
            )
            for eps in (0.0, 2.0)
        )
        return FigureDataset(3, grids, "decay widths vs (Gamma1, Gamma2) for eps in {0, 2}")
    if figure_id == 4:
        grid = SweepGrid(
            axes=(
                GridAxis.explicit("eps", (0.0, 0.1, 0.5, 2.0, 4.0)),
                _with_points(GridAxis.linear("gamma1", 0.0, 12.0, 401), points),
            ),
            task="spectrum",
            fixed={"gamma2": 0.0, **v_fixed},
        )
        return FigureDataset(4, (grid,), "widths, spacing, and width sum vs Gamma1 at Gamma2=0")
    if figure_id == 5:
        grids = tuple(
            SweepGrid(
                axes=(
                    _with_points(GridAxis.linear("v_re", -2.0, 2.0, 101), points),
                    _with_points(GridAxis.linear("v_im", -2.0, 2.0, 101), points),
                ),
                task="spectrum",
                fixed={"eps": eps, "gamma1": 2.0, "gamma2": 0.0},
            )
            for eps in (0.0, 0.25)
        )
        return FigureDataset(5, grids, "eigenvalue sheets over (X, Y) at Gamma=1, eps in {0, 0.25}")
    if figure_id == 6:
        grids = tuple(
            SweepGrid(
                axes=(_with_points(GridAxis.linear("gamma1", 0.1, 20.0, 200), points),),
                task="efficiency",
                fixed={"eps": 0.1, "gamma2": 1.0, "init": init, "t_final": 10.0, **v_fixed},
            )
            for init in ("siteB", "siteA", "plus", "minus")
        )
        return FigureDataset(6, grids, "sink efficiencies vs Gamma1 per initial state, tau=10")
    if figure_id == 7:
        grid = SweepGrid(
            axes=(
                _with_points(GridAxis.linear("gamma1", 0.0, 10.0, 101), points),
                _with_points(GridAxis.linear("gamma2", 0.0, 10.0, 101), points),
            ),
            task="efficiency",
            fixed={"eps": 0.1, "init": "siteB", "t_final": 10.0, **v_fixed},
        )
        return FigureDataset(7, (grid,), "efficiencies vs (Gamma1, Gamma2), SiteB start, tau=10")
    if figure_id == 8:
        grid = SweepGrid(
            axes=(
                _with_points(GridAxis.linear("gamma1", 0.05, 10.0, 101), points),
                _with_points(GridAxis.linear("eps", -2.0, 2.0, 101), points),
            ),
            task="eta0",
            fixed={"gamma2": 1.0, **v_fixed},
        )
        return FigureDataset(8, (grid,), "asymptotic eta0 over (Gamma1, eps) at Gamma2=1")
    if figure_id == 9:
        grid = SweepGrid(
            axes=(
                GridAxis.explicit("d", (0.0, 5.0, 10.0, 20.0)),
                _with_points(GridAxis.linear("gamma1", 0.1, 20.0, 200), points),
            ),
            task="noisy-efficiency",
            fixed={
                "eps": 0.0, "gamma2": 1.0, "gamma_noise": 10.0,
                "init": "siteB", "t_final": 10.0, **v_fixed,
            },
        )
        return FigureDataset(9, (grid,), "noisy efficiencies vs Gamma1 for d in {0, 5, 10, 20}")
    raise UnknownFigure(f"no preconfigured dataset for figure {figure_id!r}")
