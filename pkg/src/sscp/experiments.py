"""Parameter sweeps, scalar optimizers and the hover-position grid.

A sweep is a Cartesian product of axes.  One axis may move several keys in
lock step (``K+Q`` or ``omega+nu1``); each key still gets its own CSV column.
Every grid point is validated on its own, so a bad point produces an error
row instead of aborting the run.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .analytic import sscp_analytic
from .montecarlo import McConfig, estimate_sscp
from .refintegral import ToleranceNotMet, sscp_ref
from .sysmodel import (
    ConfigError,
    ScenarioConfig,
    coerce_value,
    is_config_key,
    load_config,
    validate_config,
)

__all__ = [
    "Axis",
    "GridResult",
    "SweepRow",
    "SweepSpec",
    "TriangleReport",
    "figure_config",
    "figure_sweep",
    "grid_from_rows",
    "grid_position",
    "position_spec",
    "optimize_scalar",
    "point_seed",
    "run_sweep",
    "triangle_check",
    "write_csv",
]

METHODS = ("analytic", "reference", "monte-carlo")
FIGURES = (3, 4, 5, 6, 7)


@dataclass(frozen=True)
class Axis:
    """Swept keys and the value tuple each grid step assigns to them."""

    keys: tuple[str, ...]
    values: tuple[tuple, ...]

    def __post_init__(self):
        if not self.keys:
            raise ConfigError("empty-sweep", "axis", "axis has no keys")
        if not self.values:
            raise ConfigError("empty-sweep", "+".join(self.keys), "axis has no values")
        for v in self.values:
            if len(v) != len(self.keys):
                raise ConfigError("bad-axis", "+".join(self.keys),
                                  f"value {v!r} does not match keys {self.keys}")

    @classmethod
    def single(cls, key: str, values: Sequence) -> "Axis":
        return cls((key,), tuple((v,) for v in values))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``key=lo:hi:step``, ``key=v1,v2,...`` or ``k1+k2=a/b,c/d,...``.

        A plain value on a multi-key axis is assigned to every key.
        """
        lhs, sep, rhs = text.partition("=")
        if not sep or not lhs.strip() or not rhs.strip():
            raise ConfigError("bad-axis", text, "expected key=lo:hi:step or key=v1,v2")
        keys = tuple(k.strip() for k in lhs.split("+"))
        if rhs.count(":") == 2 and "," not in rhs:
            lo, hi, step = (float(p) for p in rhs.split(":"))
            items = [(v,) * len(keys) for v in inclusive_range(lo, hi, step)]
        else:
            items = []
            for item in rhs.split(","):
                parts = item.strip().split("/")
                if len(parts) == 1:
                    parts = parts * len(keys)
                items.append(tuple(parts))
        if any(len(item) != len(keys) for item in items):
            raise ConfigError("bad-axis", text, "tuple length does not match keys")
        values = tuple(tuple(coerce_value(k, v) for k, v in zip(keys, item)) for item in items)
        return cls(keys, values)


def inclusive_range(lo: float, hi: float, step: float) -> list[float]:
    """``lo, lo+step, ...`` up to ``hi`` inclusive (with a little slack)."""
    if not step > 0:
        raise ConfigError("bad-axis", "step", "step must be > 0")
    if hi < lo:
        raise ConfigError("empty-range", "range", f"{lo} > {hi}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    axes: tuple[Axis, ...]
    methods: tuple[str, ...] = ("analytic",)
    trials: int = 100_000
    seed: int = 0
    workers: int = 1
    batch: int = 1 << 16

    def __post_init__(self):
        if not self.axes:
            raise ConfigError("empty-sweep", "axes", "no swept axis given")
        if not self.methods:
            raise ConfigError("no-method", "methods", "at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError("unknown-method", "methods", m)
        seen = set()
        for ax in self.axes:
            for k in ax.keys:
                if not is_config_key(k):
                    raise ConfigError("unknown-key", k, "not a configuration key")
                if k in seen:
                    raise ConfigError("bad-axis", k, "key swept twice")
                seen.add(k)

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(k for ax in self.axes for k in ax.keys)

    def points(self) -> list[tuple]:
        """Grid points in row-major order (first axis outermost)."""
        return [sum(combo, ()) for combo in itertools.product(*(ax.values for ax in self.axes))]


@dataclass
class SweepRow:
    values: tuple
    sscp_ana: float | None = None
    sscp_ref: float | None = None
    sscp_mc: float | None = None
    mc_stderr: float | None = None
    mc_trials: int | None = None
    seed: int | None = None
    err: str = ""
    seconds: dict = field(default_factory=dict)


def point_seed(seed: int, index: int) -> int:
    """Per-point Monte-Carlo seed, a hash of the sweep seed and the point index."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), index])
    return int(ss.generate_state(1, np.uint64)[0])


def _eval_point(spec: SweepSpec, index: int, values: tuple) -> SweepRow:
    row = SweepRow(values=values)
    try:
        cfg = spec.base.replace(**dict(zip(spec.columns, values)))
        validate_config(cfg, analytic="analytic" in spec.methods)
    except ConfigError as exc:
        row.err = exc.code
        return row
    errors = []
    if "analytic" in spec.methods:
        t0 = time.perf_counter()
        row.sscp_ana = sscp_analytic(cfg).value
        row.seconds["analytic"] = time.perf_counter() - t0
    if "reference" in spec.methods:
        t0 = time.perf_counter()
        try:
            row.sscp_ref = sscp_ref(cfg).value
        except ToleranceNotMet as exc:
            row.sscp_ref = exc.estimate
            errors.append("tolerance-not-met")
        row.seconds["reference"] = time.perf_counter() - t0
    if "monte-carlo" in spec.methods:
        t0 = time.perf_counter()
        row.seed = point_seed(spec.seed, index)
        est = estimate_sscp(cfg, McConfig(trials=spec.trials, seed=row.seed, batch=spec.batch))
        row.sscp_mc, row.mc_stderr, row.mc_trials = est.value, est.stderr, est.trials
        row.seconds["monte-carlo"] = time.perf_counter() - t0
    row.err = ";".join(errors)
    return row


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    points = spec.points()
    jobs = list(enumerate(points))
    if spec.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            return list(pool.map(lambda j: _eval_point(spec, *j), jobs))
    return [_eval_point(spec, *j) for j in jobs]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".9g")


def write_csv(spec: SweepSpec, rows: Sequence[SweepRow], out=None) -> str:
    """Render ``rows`` as CSV text; also write it to ``out`` (path or file) if given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*spec.columns, "sscp_ana", "sscp_ref", "sscp_mc", "mc_stderr",
                "mc_trials", "seed", "err"])
    for r in rows:
        w.writerow([*(_fmt(v) for v in r.values), _fmt(r.sscp_ana), _fmt(r.sscp_ref),
                    _fmt(r.sscp_mc), _fmt(r.mc_stderr), _fmt(r.mc_trials),
                    _fmt(r.seed), r.err])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text


# --------------------------------------------------------------------------
# optimizers

Objective = Callable[[ScenarioConfig], float]


def _analytic_value(cfg: ScenarioConfig) -> float:
    return sscp_analytic(cfg).value


def optimize_scalar(cfg: ScenarioConfig, key: str, bounds: tuple[float, float],
                    budget: int = 40, objective: Objective = _analytic_value
                    ) -> tuple[float, float]:
    """Maximize the SSCP over one scalar key.

    Half of ``budget`` goes to an even coarse grid over ``bounds``; the rest
    refines the best coarse bracket by golden-section search.  Unimodality
    is not assumed, the coarse grid just picks the bracket.  Among equal
    values the smallest argument wins.
    """
    lo, hi = (float(b) for b in bounds)
    if not lo < hi:
        raise ConfigError("degenerate-bounds", key, f"need lo < hi, got {lo}, {hi}")
    if key not in ("h_u", "eta"):
        raise ConfigError("unknown-key", key, "optimizer supports h_u and eta")
    n_coarse = max(3, budget // 2)
    seen: dict[float, float] = {}

    def f(x: float) -> float:
        if x not in seen:
            seen[x] = objective(cfg.replace(**{key: x}))
        return seen[x]

    grid = np.linspace(lo, hi, n_coarse)
    vals = [f(float(x)) for x in grid]
    i = int(np.argmax(vals))
    a, b = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, n_coarse - 1)])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max(0, budget - n_coarse - 2)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    best = max(seen.values())
    x_best = min(x for x, v in seen.items() if v == best)
    return x_best, best


@dataclass(frozen=True)
class GridResult:
    xs: np.ndarray
    ys: np.ndarray
    sscp: np.ndarray  # indexed [ix, iy]
    argmax: tuple[int, int]

    @property
    def best(self) -> tuple[float, float, float]:
        ix, iy = self.argmax
        return float(self.xs[ix]), float(self.ys[iy]), float(self.sscp[ix, iy])

    @property
    def interior(self) -> bool:
        ix, iy = self.argmax
        return 0 < ix < len(self.xs) - 1 and 0 < iy < len(self.ys) - 1


def position_spec(cfg: ScenarioConfig, x_range: tuple[float, float],
                  y_range: tuple[float, float], step: float, workers: int = 1) -> SweepSpec:
    xs = inclusive_range(*x_range, step)
    ys = inclusive_range(*y_range, step)
    return SweepSpec(cfg, (Axis.single("x_u", xs), Axis.single("y_u", ys)),
                     methods=("analytic",), workers=workers)


def grid_position(cfg: ScenarioConfig, x_range: tuple[float, float] = (-150.0, 150.0),
                  y_range: tuple[float, float] = (-150.0, 150.0), step: float = 10.0,
                  workers: int = 1) -> GridResult:
    """Analytic SSCP over a grid of hover positions and the best cell.

    Ties go to the first cell in ``x``-major order.
    """
    spec = position_spec(cfg, x_range, y_range, step, workers)
    return grid_from_rows(spec, run_sweep(spec))


def grid_from_rows(spec: SweepSpec, rows: Sequence[SweepRow]) -> GridResult:
    """Reshape the rows of a :func:`position_spec` sweep into a :class:`GridResult`."""
    for r in rows:
        if r.err:
            raise ConfigError(r.err, "x_u,y_u", f"grid point {r.values} is invalid")
    xs = np.array(spec.axes[0].values, dtype=float)[:, 0]
    ys = np.array(spec.axes[1].values, dtype=float)[:, 0]
    mat = np.array([r.sscp_ana for r in rows]).reshape(len(xs), len(ys))
    ix, iy = np.unravel_index(int(np.argmax(mat)), mat.shape)
    return GridResult(xs, ys, mat, (int(ix), int(iy)))


# --------------------------------------------------------------------------
# figure fixtures


def figure_config(n: int, overrides=None) -> ScenarioConfig:
    if n not in FIGURES:
        raise ConfigError("unknown-figure", "figure", f"no fixture for figure {n}")
    path = resources.files("sscp") / "figures" / f"fig{n}.cfg"
    with resources.as_file(path) as p:
        return load_config(p, overrides)


def figure_axes(n: int, position_step: float = 30.0) -> tuple[Axis, ...]:
    gammas = inclusive_range(0.0, 40.0, 5.0)
    sizes = Axis(("K", "Q"), ((1, 1), (2, 2), (3, 3)))
    if n == 3:
        return sizes, Axis.single("gamma_u_db", gammas)
    if n == 4:
        return (Axis(("omega", "nu1"), ((0.0, 0.0), (3.0, 0.0), (3.0, 0.4))),
                Axis.single("gamma_u_db", gammas))
    if n == 5:
        return sizes, Axis.single("h_u", inclusive_range(50.0, 300.0, 10.0))
    if n == 6:
        return sizes, Axis.single("eta", [round(v, 10) for v in inclusive_range(0.05, 0.95, 0.05)])
    if n == 7:
        xs = inclusive_range(-150.0, 150.0, position_step)
        return Axis.single("x_u", xs), Axis.single("y_u", xs)
    raise ConfigError("unknown-figure", "figure", f"no fixture for figure {n}")


def figure_sweep(n: int, methods: tuple[str, ...] = METHODS, trials: int = 1_000_000,
                 seed: int = 0, workers: int = 1, overrides=None,
                 position_step: float = 30.0) -> SweepSpec:
    return SweepSpec(figure_config(n, overrides), figure_axes(n, position_step),
                     methods=methods, trials=trials, seed=seed, workers=workers)


# --------------------------------------------------------------------------
# three-way agreement


@dataclass(frozen=True)
class TriangleReport:
    points: int
    errors: int
    ref_breaches: int  # |ana - ref| > ref_tol
    mc_within_3: int  # |ana - mc| <= 3 se + 0.01
    mc_within_4: int  # |ana - mc| <= 4 se + 0.02
    max_ref_gap: float

    @property
    def ok(self) -> bool:
        n = self.points - self.errors
        return (self.errors == 0 and self.ref_breaches == 0
                and self.mc_within_3 >= 0.95 * n and self.mc_within_4 == n)


def triangle_check(rows: Sequence[SweepRow], ref_tol: float = 1e-3) -> TriangleReport:
    """Score analytic vs reference and analytic vs Monte-Carlo columns.

    Missing columns count as agreement, so an analytic+MC sweep is scored on
    the MC rule alone.
    """
    errors = ref_bad = w3 = w4 = 0
    max_gap = 0.0
    for r in rows:
        if r.err or r.sscp_ana is None:
            errors += 1
            continue
        if r.sscp_ref is not None:
            gap = abs(r.sscp_ana - r.sscp_ref)
            max_gap = max(max_gap, gap)
            ref_bad += gap > ref_tol
        if r.sscp_mc is None:
            w3 += 1
            w4 += 1
            continue
        d = abs(r.sscp_ana - r.sscp_mc)
        w3 += d <= 3 * r.mc_stderr + 0.01
        w4 += d <= 4 * r.mc_stderr + 0.02
    return TriangleReport(len(rows), errors, ref_bad, w3, w4, max_gap)
