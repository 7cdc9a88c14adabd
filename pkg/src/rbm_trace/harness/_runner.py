import hashlib
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pydantic

from rbm_trace.common.exc import ExperimentError, RbmTraceError, ResolutionError
from rbm_trace.common.rng import derive_seed
from rbm_trace.common.serialization import canonical_json
from rbm_trace.common.utils import harness_log
from rbm_trace.fracdim import (
    PROXY_NOTE,
    CantorSpec,
    DimensionEstimate,
    cantor_timeset,
    fit_loglog,
    image_dimension,
    occupation_dimension,
    trace_dimension,
)
from rbm_trace.fracdim._boxcount import MAX_KEY_BITS, TIME_CUTOFF_CELLS
from rbm_trace.fracdim._estimate import DROPPED_FINEST
from rbm_trace.geometry import DomainSpec, box_bounds, domain_id, domain_to_dict, interior_point
from rbm_trace.sim import (
    PathSample,
    TimeSet,
    boundary_hit_times,
    cube_hit_counts,
    default_eps,
    holder_exponent,
    simulate_rbm,
    trace_points,
)
from rbm_trace.subordination import (
    driving_dt,
    sample_subordinator,
    subordinate_folded,
    subordinate_with_horizon,
    subordinated_step,
)

from ._config import ExperimentConfig
from ._presets import Preset, build_domain, get_preset

MAX_FAILURE_FRACTION = 0.10
# Time boxes longer than (0.05 * width) ** index see a saturated set, shorter than (10 * eps) ** index the fattening.
COARSE_SPACE_FRACTION = 0.05
FATTENING_MARGIN = 10.0
# Cubes narrower than four fattening widths fill in around 3-D and subordinated traces.
TRACE_FATTENING_CELLS = 4.0
TREND_SLACK = 0.05
SEED_CHECK_MIN_PATHS = 32
MAX_LAG1 = 0.3

X_STREAM = 0
XI_STREAM = 1


class PathResult(pydantic.BaseModel):
    index: int
    seed: int
    setting: Optional[float] = None
    value: Optional[float] = None
    estimate: Optional[DimensionEstimate] = None
    empty: bool = False
    window_fallback: bool = False
    n_steps: int = 0
    reflection_fallbacks: int = 0
    error: Optional[str] = None


class Aggregate(pydantic.BaseModel):
    n: int
    mean: float
    std: float
    stderr: float
    lag1_autocorrelation: Optional[float] = None
    seed_independent: Optional[bool] = None


class SweepPoint(pydantic.BaseModel):
    width_exponent: float
    aggregate: Aggregate


class Timing(pydantic.BaseModel):
    started: str
    finished: str
    wall_seconds: float


class ExperimentReport(pydantic.BaseModel):
    """Per-path estimates of one preset, their aggregate, and the comparison with the predicted dimension.

    Everything except ``timing`` is a pure function of the configuration.
    """

    preset: str
    quantity: str
    config: Dict[str, Any]
    domain: Dict[str, Any]
    domain_id: str
    predicted: Optional[float]
    citation: str
    comparison: str
    tolerance_below: float
    tolerance_above: float
    aggregate: Optional[Aggregate] = None
    passed: Optional[bool] = None
    failures: int = 0
    paths: List[PathResult] = []
    sweep: Optional[List[SweepPoint]] = None
    trend_non_increasing: Optional[bool] = None
    total_steps: int = 0
    proxy: str = PROXY_NOTE
    timing: Optional[Timing] = None


def report_fingerprint(report: ExperimentReport) -> str:
    """Hash of the report without its timing block; equal for repeated runs of the same configuration."""
    doc = canonical_json(report.model_dump(exclude={"timing"}))
    return hashlib.blake2b(doc.encode("utf-8"), digest_size=16).hexdigest()


def aggregate(values: List[float]) -> Aggregate:
    """Mean, sample standard deviation, standard error and lag-1 autocorrelation (in path-index order).

    With at least 32 values and a defined autocorrelation, ``seed_independent`` records whether ``|rho| < 0.3``.
    """
    v = np.asarray(values, dtype=np.float64)
    n = int(v.shape[0])
    if n == 0:
        raise ExperimentError("No successful paths to aggregate.")
    std = float(v.std(ddof=1)) if n > 1 else 0.0
    lag1 = None
    if n >= 3 and np.ptp(v[:-1]) > 0.0 and np.ptp(v[1:]) > 0.0:
        lag1 = float(np.corrcoef(v[:-1], v[1:])[0, 1])
    independent = None
    if lag1 is not None and n >= SEED_CHECK_MIN_PATHS:
        independent = bool(abs(lag1) < MAX_LAG1)
    return Aggregate(
        n=n,
        mean=float(v.mean()),
        std=std,
        stderr=std / math.sqrt(n),
        lag1_autocorrelation=lag1,
        seed_independent=independent,
    )


# === Scale windows ===


def _domain_side(domain: DomainSpec) -> float:
    box = domain.bounding_box
    return float(np.max(box[:, 1] - box[:, 0]))


def _domain_width(domain: DomainSpec) -> float:
    box = domain.bounding_box
    return float(np.min(box[:, 1] - box[:, 0]))


def _floor_log2(x: float) -> int:
    return int(math.floor(math.log2(x) + 1e-9))


def time_window(
    cfg: ExperimentConfig, T: float, dt: float, width: float, eps: float, index: float = 2.0
) -> Tuple[int, int]:
    """Dyadic time levels ``T 2^-k`` between the saturation and fattening scales of a process of index ``index``.

    A time box of length ``h`` is explored to the spatial scale ``h ** (1 / index)``. The coarsest default level keeps
    that scale below ``0.05 * width`` (``width`` is the narrowest extent of the domain); the finest keeps it above
    ``10 * eps`` and at least four grid cells. The window is widened at the coarse end until ``min_window`` scales
    survive the two dropped finest ones.

    Raises:
        ResolutionError: ``k_max`` finer than four grid cells, or an empty window.
    """
    k_grid = _floor_log2(T / (TIME_CUTOFF_CELLS * dt))
    if cfg.k_max is not None:
        k_max = cfg.k_max
        if k_max > k_grid:
            raise ResolutionError(f"k_max={k_max} is finer than four grid cells (at most {k_grid} for T={T}, dt={dt}).")
    else:
        k_max = min(k_grid, _floor_log2(T / (FATTENING_MARGIN * eps) ** index))
    k_min = cfg.k_min
    if k_min is None:
        k_min = max(0, int(math.ceil(math.log2(T / (COARSE_SPACE_FRACTION * width) ** index) - 1e-9)))
        k_min = max(0, min(k_min, k_max - (cfg.min_window + DROPPED_FINEST - 1)))
    if k_min >= k_max:
        raise ResolutionError(f"Empty time window k_min={k_min}, k_max={k_max} for T={T}, dt={dt}, eps={eps:.4g}.")
    return k_min, k_max


def space_window(
    cfg: ExperimentConfig, step: float, side: float, dim: int, finest: Optional[float] = None
) -> Tuple[int, int]:
    """Dyadic space levels ``side 2^-k`` from halves of the domain down to half the path's step ``step``.

    ``finest`` is an extra lower bound on the default cube side (a fattening width or the size of the smallest
    structure the data can show); an explicit ``k_max`` is only held to the half-step limit.

    Raises:
        ResolutionError: ``k_max`` below half a step, or an empty window.
    """
    k_max_limit = min(_floor_log2(side / (0.5 * step)), MAX_KEY_BITS // dim)
    if cfg.k_max is not None:
        k_max = cfg.k_max
        if k_max > k_max_limit:
            raise ResolutionError(
                f"k_max={k_max} resolves below half a step (at most {k_max_limit} for step {step:.4g})."
            )
    else:
        k_max = k_max_limit if finest is None else min(k_max_limit, _floor_log2(side / finest))
    k_min = cfg.k_min if cfg.k_min is not None else 1
    if k_min >= k_max:
        raise ResolutionError(f"Empty space window k_min={k_min}, k_max={k_max} for step {step:.4g}.")
    return k_min, k_max


# === Per-path estimation ===


def _fit_with_fallback(fit: Any, cfg: ExperimentConfig) -> Tuple[DimensionEstimate, bool]:
    """Fit with the configured window; a sparse set with too few usable scales is refitted on the full window."""
    try:
        return fit(cfg.auto_window), False
    except ResolutionError as e:
        if not cfg.auto_window:
            raise
        warnings.warn(f"Automatic window failed ({e}); fitting all scales instead.")
        return fit(False), True


class _Plan:
    """Everything shared by the paths of one domain setting."""

    def __init__(self, cfg: ExperimentConfig, preset: Preset, domain: DomainSpec):
        self.cfg = cfg
        self.preset = preset
        self.domain = domain
        self.x0 = np.asarray(cfg.start, dtype=np.float64) if cfg.start is not None else interior_point(domain)
        self.box = domain.bounding_box
        self.s = cfg.s if cfg.s is not None else 0.9
        self.dt_sub = cfg.dt_sub if cfg.dt_sub is not None else cfg.dt
        # Box domains are time-changed by folding free Brownian motion; other domains need a driving walk.
        self.folded = preset.subordinated and box_bounds(domain) is not None
        if preset.subordinated:
            self.dt_x: Optional[float] = None if self.folded else driving_dt(cfg.T, self.s, cfg.dt)
            step = subordinated_step(self.s, self.dt_sub, self.dt_x)
            self.eps = cfg.eps_factor * step
            obs_dt, index = self.dt_sub, 2.0 * self.s
        else:
            self.dt_x = cfg.dt
            step = math.sqrt(cfg.dt)
            self.eps = default_eps(cfg.dt, cfg.eps_factor)
            obs_dt, index = cfg.dt, 2.0
        side = _domain_side(domain)
        q = preset.quantity
        cantor: Optional[CantorSpec] = None
        if q == "image" and cfg.cantor is not None:
            cantor = CantorSpec(
                m=int(cfg.cantor.get("m", 2)),
                r=float(cfg.cantor.get("r", 1.0 / 3.0)),
                depth=int(cfg.cantor.get("depth", 10)),
                T=cfg.T,
            )
        if q == "occupation":
            self.window = time_window(cfg, cfg.T, obs_dt, _domain_width(domain), self.eps, index)
        elif q == "trace":
            fattened = domain.ambient_dim > 2 or preset.subordinated
            finest = TRACE_FATTENING_CELLS * self.eps if fattened else None
            self.window = space_window(cfg, step, side, domain.ambient_dim, finest)
        elif q == "image":
            # Below the spread of the finest Cantor pieces the image is a union of Brownian blobs.
            finest = math.sqrt(cantor.r**cantor.depth * cantor.T) if cantor is not None else None
            self.window = space_window(cfg, step, side, domain.ambient_dim, finest)
        elif q == "range":
            self.window = (cfg.k_min if cfg.k_min is not None else 3, cfg.k_max if cfg.k_max is not None else 8)
        else:
            self.window = (0, 0)
        self.time_set: Optional[TimeSet] = None
        if q == "image":
            self.time_set = cantor_timeset(cantor, cfg.dt) if cantor is not None else TimeSet.full(cfg.T, cfg.dt)

    def _paths(self, index: int) -> Tuple[PathSample, PathSample]:
        cfg = self.cfg
        seed = derive_seed(cfg.master_seed, index, X_STREAM)
        if not self.preset.subordinated:
            x = simulate_rbm(self.domain, self.x0, cfg.T, cfg.dt, seed)
            return x, x
        xi = sample_subordinator(self.s, cfg.T, self.dt_sub, derive_seed(cfg.master_seed, index, XI_STREAM))
        if self.folded:
            z = subordinate_folded(self.domain, self.x0, xi, seed)
            return z, z
        assert self.dt_x is not None
        return subordinate_with_horizon(self.domain, self.x0, xi, self.dt_x, seed)

    def run_path(self, index: int, setting: Optional[float]) -> PathResult:
        cfg = self.cfg
        k_min, k_max = self.window
        res = PathResult(index=index, seed=derive_seed(cfg.master_seed, index, X_STREAM), setting=setting)
        try:
            z, x = self._paths(index)
            res.n_steps = x.n_steps
            res.reflection_fallbacks = x.reflection_fallbacks
            q = self.preset.quantity
            est: Optional[DimensionEstimate] = None
            if q == "occupation":
                ts = boundary_hit_times(z, self.eps)
                if ts.is_empty:
                    res.empty = True
                else:
                    est, res.window_fallback = _fit_with_fallback(
                        lambda auto: occupation_dimension(ts, k_min, k_max, auto, cfg.min_window), cfg
                    )
            elif q == "trace":
                pts = trace_points(z, self.eps, self.domain)
                if pts.shape[0] == 0:
                    res.empty = True
                else:
                    est, res.window_fallback = _fit_with_fallback(
                        lambda auto: trace_dimension(pts, k_min, k_max, auto, cfg.min_window, box=self.box), cfg
                    )
            elif q == "image":
                assert self.time_set is not None
                e = self.time_set
                est, res.window_fallback = _fit_with_fallback(
                    lambda auto: image_dimension(x, e, k_min, k_max, auto, cfg.min_window, box=self.box), cfg
                )
            elif q == "range":
                sides, counts = cube_hit_counts(x, k_min, k_max)
                est, res.window_fallback = _fit_with_fallback(
                    lambda auto: fit_loglog(sides, counts, auto, cfg.min_window), cfg
                )
            else:
                res.value = holder_exponent(x)
            if res.empty:
                warnings.warn(f"Path {index}: the measured set is empty; dimension reported as 0.")
                res.value = 0.0
            elif est is not None:
                res.estimate = est
                res.value = est.slope
        except (RbmTraceError, ValueError, FloatingPointError) as e:
            res.error = f"{type(e).__name__}: {e}"
            harness_log(f"Path {index} failed: {res.error}")
        return res


def _domain_header(d: Dict[str, Any]) -> Dict[str, Any]:
    out = {k: v for k, v in d.items() if k != "vertices"}
    if "planar" in out:
        out["planar"] = _domain_header(out["planar"])
    return out


def _run_setting(plan: _Plan, setting: Optional[float], pool: ThreadPoolExecutor) -> List[PathResult]:
    futures = [pool.submit(plan.run_path, i, setting) for i in range(plan.cfg.paths)]
    results = []
    for done, fut in enumerate(as_completed(futures), start=1):
        results.append(fut.result())
        if done % max(1, plan.cfg.paths // 8) == 0 or done == plan.cfg.paths:
            harness_log(f"{plan.preset.name}: {done}/{plan.cfg.paths} paths done.")
    return sorted(results, key=lambda r: r.index)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Simulate ``cfg.paths`` independent paths, estimate the preset's dimension on each, aggregate and compare.

    Paths run on a pool of ``cfg.workers`` threads; each is a pure function of ``(master_seed, index)`` so the report
    does not depend on the pool size.

    Raises:
        RbmTraceConfigurationError: Unknown preset.
        ResolutionError: The scale window does not fit the time step or horizon.
        ExperimentError: More than 10% of the paths failed.
    """
    preset = get_preset(cfg.preset)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    settings: List[Optional[float]] = list(cfg.sweep) if cfg.sweep else [None]
    plans = []
    for w in settings:
        params = dict(cfg.domain) if w is None else {**cfg.domain, "width_exponent": w}
        plans.append(_Plan(cfg, preset, build_domain(params)))
    harness_log(
        f"Running {preset.name}: {cfg.paths} path(s) x {len(plans)} setting(s), T={cfg.T}, dt={cfg.dt}, "
        f"workers={cfg.workers}."
    )

    rows: List[PathResult] = []
    sweep: List[SweepPoint] = []
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for w, plan in zip(settings, plans):
            results = _run_setting(plan, w, pool)
            rows.extend(results)
            ok = [r.value for r in results if r.error is None and r.value is not None]
            if w is not None and ok:
                sweep.append(SweepPoint(width_exponent=w, aggregate=aggregate(ok)))

    failures = sum(1 for r in rows if r.error is not None)
    if failures > MAX_FAILURE_FRACTION * len(rows):
        raise ExperimentError(
            f"{failures} of {len(rows)} paths failed (more than {MAX_FAILURE_FRACTION:.0%}); first error: "
            f"{next(r.error for r in rows if r.error is not None)}"
        )
    values = [r.value for r in rows if r.error is None and r.value is not None]
    agg = aggregate(values)
    if agg.seed_independent is False:
        harness_log(
            f"{preset.name}: lag-1 autocorrelation of per-path values is {agg.lag1_autocorrelation:.3f} "
            f"(|rho| >= {MAX_LAG1}); the path seeds may not be independent."
        )
    predicted = preset.predict(cfg)
    below, above = preset.tolerance(predicted)
    trend = None
    if sweep:
        means = [p.aggregate.mean for p in sweep]
        trend = all(b <= a + TREND_SLACK for a, b in zip(means, means[1:]))

    finished = datetime.now(timezone.utc)
    report = ExperimentReport(
        preset=preset.name,
        quantity=preset.quantity,
        config=cfg.report_fields(),
        domain=_domain_header(domain_to_dict(plans[0].domain)),
        domain_id=domain_id(plans[0].domain),
        predicted=predicted,
        citation=preset.citation,
        comparison=preset.comparison,
        tolerance_below=below,
        tolerance_above=above,
        aggregate=agg,
        passed=preset.passes(agg.mean, predicted),
        failures=failures,
        paths=rows,
        sweep=sweep or None,
        trend_non_increasing=trend,
        total_steps=sum(r.n_steps for r in rows),
        timing=Timing(
            started=started.isoformat(),
            finished=finished.isoformat(),
            wall_seconds=time.perf_counter() - t0,
        ),
    )
    harness_log(
        f"{preset.name}: mean={agg.mean:.4f} +- {agg.stderr:.4f} (n={agg.n}), predicted={predicted}, "
        f"passed={report.passed}."
    )
    return report
