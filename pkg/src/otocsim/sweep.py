"""Parameter-grid phase diagrams: parallel evaluation and transition location.

The work unit is one grid point (one Hamiltonian build, one decomposition,
one series); the dominant cost is the cubic-in-dimension decomposition, so
point-level parallelism saturates cores without shared state. Results land in
pre-sized slots by point index, which makes 1-worker and K-worker grids
bit-identical. An axis named "t" samples O(t) itself along that direction, so
a whole row shares one decomposition.
"""

from __future__ import annotations

import copy
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import pipeline
from .config import fingerprint


class SweepError(RuntimeError):
    """A grid point failed; the message identifies the point."""


@dataclass
class SweepAxis:
    name: str
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ValueError("axis needs at least one value")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("axis values must be finite")


@dataclass
class SweepResult:
    axis1: SweepAxis
    axis2: SweepAxis | None
    grid: np.ndarray
    observable: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = (self.axis1.values.size,)
        if self.axis2 is not None:
            expected += (self.axis2.values.size,)
        if self.grid.shape != expected:
            raise ValueError(f"grid shape {self.grid.shape} does not match axes {expected}")


def _assigned(cfg: dict, name: str, value: float) -> dict:
    out = copy.deepcopy(cfg)
    if name == "d":
        out["disorder"]["d1"] = float(value) / 2.0
        out["disorder"]["d2"] = float(value)
    else:
        out["params"][name] = float(value)
    return out


def _point_scalar(args):
    cfg, observable = args
    dis = cfg.get("disorder")
    if dis is not None and "n_configs" in dis:
        from .ensemble import ensemble_average
        res = ensemble_average(cfg, n_configs=dis["n_configs"],
                               seed0=dis["seed0"], observable=observable)
        return res.mean
    return pipeline.run_point(cfg, observable=observable)


def _point_series(args):
    cfg, times = args
    dis = cfg.get("disorder")
    if dis is not None and "n_configs" in dis:
        acc = None
        for i in range(dis["n_configs"]):
            vals = pipeline.run_series_at(cfg, times, seed=dis["seed0"] + i).values
            acc = vals if acc is None else acc + vals
        return acc / dis["n_configs"]
    return pipeline.run_series_at(cfg, times).values


def _run_points(worker, jobs, labels, workers: int):
    results = [None] * len(jobs)
    if workers <= 1:
        for i, job in enumerate(jobs):
            try:
                results[i] = worker(job)
            except Exception as exc:
                raise SweepError(f"grid point {labels[i]} failed: {exc}") from exc
        return results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker, job) for job in jobs]
        for i, fut in enumerate(futures):
            try:
                results[i] = fut.result()
            except Exception as exc:
                raise SweepError(f"grid point {labels[i]} failed: {exc}") from exc
    return results


def sweep(cfg: dict, workers: int = 1) -> SweepResult:
    """Evaluate the configured observable over the sweep axes."""
    spec = cfg.get("sweep")
    if spec is None:
        raise ValueError("config has no sweep section")
    ax1 = SweepAxis(spec["axis1"]["name"], spec["axis1"]["values"])
    ax2 = None
    if spec.get("axis2") is not None:
        ax2 = SweepAxis(spec["axis2"]["name"], spec["axis2"]["values"])
    observable = cfg.get("observable", {}).get("name", "long_time_limit")
    meta = {"fingerprint": fingerprint(cfg), "model": cfg["model"],
            "params": cfg["params"]}
    if cfg.get("disorder") is not None:
        meta["disorder"] = cfg["disorder"]

    t_axes = [ax for ax in (ax1, ax2) if ax is not None and ax.name == "t"]
    if len(t_axes) > 1:
        raise ValueError("at most one axis may be 't'")
    if t_axes:
        t_ax = t_axes[0]
        p_ax = ax2 if t_ax is ax1 else ax1
        observable = "otoc"
        if p_ax is None:
            vals = _point_series((cfg, t_ax.values))
            return SweepResult(axis1=ax1, axis2=None, grid=np.asarray(vals),
                               observable=observable, metadata=meta)
        jobs = [(_assigned(cfg, p_ax.name, v), t_ax.values) for v in p_ax.values]
        labels = [f"({p_ax.name}={v:g})" for v in p_ax.values]
        rows = _run_points(_point_series, jobs, labels, workers)
        grid = np.asarray(rows)      # (param, t)
        if t_ax is ax1:
            grid = grid.T            # (t, param)
        return SweepResult(axis1=ax1, axis2=ax2, grid=grid,
                           observable=observable, metadata=meta)

    if observable == "full_series":
        raise ValueError("full_series grids need a 't' axis")
    if ax2 is None:
        jobs = [(_assigned(cfg, ax1.name, v), observable) for v in ax1.values]
        labels = [f"({ax1.name}={v:g})" for v in ax1.values]
        vals = _run_points(_point_scalar, jobs, labels, workers)
        return SweepResult(axis1=ax1, axis2=None,
                           grid=np.asarray(vals, dtype=float),
                           observable=observable, metadata=meta)
    jobs, labels = [], []
    for v1 in ax1.values:
        base = _assigned(cfg, ax1.name, v1)
        for v2 in ax2.values:
            jobs.append((_assigned(base, ax2.name, v2), observable))
            labels.append(f"({ax1.name}={v1:g}, {ax2.name}={v2:g})")
    vals = _run_points(_point_scalar, jobs, labels, workers)
    grid = np.asarray(vals, dtype=float).reshape(ax1.values.size, ax2.values.size)
    return SweepResult(axis1=ax1, axis2=ax2, grid=grid,
                       observable=observable, metadata=meta)


def detect_transition(result: SweepResult, threshold: float | None = None) -> list:
    """Axis positions where a 1D sweep crosses the threshold, located by
    linear interpolation between adjacent grid values. Default threshold is
    5% of the grid maximum. Empty and constant grids yield no crossings."""
    if result.axis2 is not None:
        raise ValueError("detect_transition needs a 1D sweep")
    g = np.asarray(result.grid, dtype=float)
    x = result.axis1.values
    if g.size == 0 or np.all(g == g.flat[0]):
        return []
    if threshold is None:
        threshold = 0.05 * float(g.max())
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    crossings = []
    rel = g - threshold
    for i in range(g.size - 1):
        a, b = rel[i], rel[i + 1]
        if a == 0.0 and b != 0.0:
            crossings.append(float(x[i]))
        elif a * b < 0.0:
            crossings.append(float(x[i] + (x[i + 1] - x[i]) * (-a) / (b - a)))
    return crossings


def estimate_transition_powerlaw(result: SweepResult, power: int = 6,
                                 fit_window: tuple | None = None) -> float:
    """Transition estimate for observables vanishing like (x_c^2 - x^2)^power:
    fit grid^(1/power) linearly against x^2 inside fit_window and return the
    positive root of the fitted line. Used where the plateau sinks into the
    dephasing floor before the crossing point itself is resolvable. The
    default exponent matches the measured vanishing rate of corner-probe
    plateaus on the four-component square lattice at accessible sizes."""
    if result.axis2 is not None:
        raise ValueError("estimate_transition_powerlaw needs a 1D sweep")
    x = result.axis1.values
    g = np.asarray(result.grid, dtype=float)
    if fit_window is not None:
        lo, hi = fit_window
        keep = (x >= lo) & (x <= hi)
        x, g = x[keep], g[keep]
    if x.size < 2:
        raise ValueError("fit window keeps fewer than two points")
    if np.any(g < 0):
        raise ValueError("grid values must be nonnegative")
    y = g ** (1.0 / power)
    slope, intercept = np.polyfit(x ** 2, y, 1)
    if slope >= 0 or intercept <= 0:
        raise ValueError("no decaying power-law trend in the fit window")
    return float(np.sqrt(-intercept / slope))
