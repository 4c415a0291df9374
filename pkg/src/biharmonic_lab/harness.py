"""Grid sampling, classification reports, formula cross-checks and parameter scans."""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .catalog import Fixture, get_entry
from .errors import BiharmonicError, EmptyGrid, ParameterError
from .fields import Rect
from .geometry import Metric2, conformal
from .map_calculus import SmoothMap2, biharmonic_residual
from .policy import DEFAULT_TOLERANCES, PROPER_MARGIN, Tolerances, decide

#: points per vectorized evaluation call
CHUNK = 4096


def worker_count() -> int:
    """Thread cap from ``BIHARMONIC_LAB_THREADS`` (default 1)."""
    raw = os.environ.get("BIHARMONIC_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class GridSpec:
    """Regular ``nx x ny`` grid; points closer than ``margin`` to a finite
    edge of either validity rectangle, or hit by an exclusion predicate,
    are dropped."""

    rect: Rect | None = None
    nx: int = 21
    ny: int = 21
    exclusions: tuple = ()
    margin: float = 0.1

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise EmptyGrid(f"grid needs nx, ny >= 2, got {self.nx} x {self.ny}")

    def with_rect(self, rect: Rect) -> GridSpec:
        return GridSpec(rect, self.nx, self.ny, self.exclusions, self.margin)

    def raw_points(self, rect: Rect | None = None) -> tuple[np.ndarray, np.ndarray]:
        r = self.rect or rect
        if r is None:
            raise EmptyGrid("grid has no rectangle")
        if not all(math.isfinite(v) for v in r.as_tuple()):
            raise EmptyGrid("grid rectangle must be bounded")
        xs = np.linspace(r.x0, r.x1, self.nx)
        ys = np.linspace(r.y0, r.y1, self.ny)
        X, Y = np.meshgrid(xs, ys)          # row-major: y outer, x inner
        return X.ravel(), Y.ravel()

    def points(self, fmap: SmoothMap2 | None = None, gM: Metric2 | None = None,
               gN: Metric2 | None = None, rect: Rect | None = None) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.raw_points(rect)
        keep = np.ones(x.shape, dtype=bool)
        if gM is not None:
            keep &= _inside(gM.rect, x, y, self.margin)
        for pred in self.exclusions:
            keep &= ~np.asarray(pred(x, y), dtype=bool)
        if fmap is not None and gN is not None and _bounded(gN.rect):
            with np.errstate(all="ignore"):
                u, v = fmap(x, y)
            keep &= np.isfinite(u) & np.isfinite(v) & _inside(gN.rect, u, v, self.margin)
        if not keep.any():
            raise EmptyGrid("no grid point survives the validity and exclusion filters")
        return x[keep], y[keep]


def _bounded(r: Rect) -> bool:
    return any(math.isfinite(v) for v in r.as_tuple())


def _inside(r: Rect, x, y, margin) -> np.ndarray:
    def side(lo, hi, t):
        ok = np.ones(np.shape(t), dtype=bool)
        if math.isfinite(lo):
            ok &= t >= lo + margin
        if math.isfinite(hi):
            ok &= t <= hi - margin
        return ok
    return side(r.x0, r.x1, x) & side(r.y0, r.y1, y)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------
POINT_FIELDS = ("x", "y", "tau1", "tau2", "tau_norm", "bitau1", "bitau2", "bitau_norm",
                "fd_err", "tau_tol", "bitau_tol", "class", "error")


def _f(v):
    """JSON-safe float (None for non-finite)."""
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass
class ResidualReport:
    """Per-point residuals, aggregates, verdict and provenance."""

    points: list                       # list of dicts with POINT_FIELDS keys
    aggregates: dict
    verdict: str
    config: dict
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"meta": self.meta, "config": self.config, "points": self.points,
                "aggregates": self.aggregates, "verdict": self.verdict}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> ResidualReport:
        return cls(points=d["points"], aggregates=d["aggregates"], verdict=d["verdict"],
                   config=d["config"], meta=d.get("meta", {}))

    @classmethod
    def from_json(cls, text: str) -> ResidualReport:
        return cls.from_dict(json.loads(text))

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if p[name] is None else p[name] for p in self.points], dtype=float)


def _evaluate(fmap, gM, gN, x, y, method, tol):
    """Vectorized evaluation with per-point fallback; returns column arrays."""
    n = x.size
    cols = {k: np.full(n, np.nan) for k in ("tau1", "tau2", "tau_norm", "bitau1", "bitau2",
                                             "bitau_norm", "fd_err", "tau_tol", "bitau_tol", "gap")}
    errors = [None] * n

    def fill(sl, r):
        cols["tau1"][sl] = r.tension[..., 0]
        cols["tau2"][sl] = r.tension[..., 1]
        cols["tau_norm"][sl] = r.tension_norm
        cols["bitau1"][sl] = r.bitension[..., 0]
        cols["bitau2"][sl] = r.bitension[..., 1]
        cols["bitau_norm"][sl] = r.bitension_norm
        cols["fd_err"][sl] = r.fd_err
        cols["tau_tol"][sl] = r.tension_tol
        cols["bitau_tol"][sl] = r.bitension_tol
        if r.gap is not None:
            cols["gap"][sl] = r.gap

    def run(start):
        sl = slice(start, min(start + CHUNK, n))
        try:
            with np.errstate(all="raise"):
                return sl, biharmonic_residual(fmap, gM, gN, (x[sl], y[sl]), method, tol), None
        except (BiharmonicError, ArithmeticError, ValueError) as exc:
            return sl, None, exc

    starts = range(0, n, CHUNK)
    workers = min(worker_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]
    for sl, r, _ in results:
        if r is not None:
            fill(sl, r)
            continue
        for i in range(sl.start, sl.stop):
            try:
                with np.errstate(all="raise"):
                    fill(slice(i, i + 1), biharmonic_residual(fmap, gM, gN, (x[i:i + 1], y[i:i + 1]),
                                                              method, tol))
            except (BiharmonicError, ArithmeticError, ValueError) as exc:
                errors[i] = f"{type(exc).__name__}: {exc}"
    return cols, errors


def classify(fmap: SmoothMap2, gM: Metric2, gN: Metric2, grid: GridSpec | None = None,
             method: str = "general", tolerances: Tolerances = DEFAULT_TOLERANCES,
             catalog_id: str | None = None, params: dict | None = None,
             rect: Rect | None = None) -> ResidualReport:
    """Classify a map as Harmonic, ProperBiharmonic, NotBiharmonic or Inconclusive on a grid."""
    grid = grid or GridSpec()
    x, y = grid.points(fmap, gM, gN, rect)
    cols, errors = _evaluate(fmap, gM, gN, x, y, method, tolerances)
    ok = np.array([e is None for e in errors])
    if not ok.any():
        raise BiharmonicError(f"every grid point failed; first error: {errors[0]}")
    verdict = str(decide(cols["tau_norm"][ok], cols["tau_tol"][ok], cols["bitau_norm"][ok],
                         cols["bitau_tol"][ok], cols["fd_err"][ok])[()])
    point_cls = np.full(x.size, "", dtype=object)
    point_cls[ok] = decide(cols["tau_norm"][ok, None], cols["tau_tol"][ok, None],
                           cols["bitau_norm"][ok, None], cols["bitau_tol"][ok, None],
                           cols["fd_err"][ok, None])
    points = []
    for i in range(x.size):
        rec = {"x": _f(x[i]), "y": _f(y[i])}
        for k in ("tau1", "tau2", "tau_norm", "bitau1", "bitau2", "bitau_norm", "fd_err",
                  "tau_tol", "bitau_tol"):
            rec[k] = _f(cols[k][i]) if ok[i] else None
        if method == "both":
            rec["gap"] = _f(cols["gap"][i]) if ok[i] else None
        rec["class"] = point_cls[i] or None
        rec["error"] = errors[i]
        points.append(rec)
    aggregates = _aggregates(x, y, cols, ok, method)
    config = {
        "method": method,
        "tolerances": tolerances.as_dict(),
        "proper_margin": PROPER_MARGIN,
        "grid": {"rect": list((grid.rect or rect).as_tuple()), "nx": grid.nx, "ny": grid.ny,
                 "margin": grid.margin, "exclusions": len(grid.exclusions)},
        "catalog_id": catalog_id,
        "params": dict(params or {}),
        "map": fmap.name,
        "domain_metric": getattr(gM, "name", gM.form),
        "target_metric": getattr(gN, "name", gN.form),
        "analytic": bool(fmap.analytic and gM.analytic and gN.analytic),
    }
    meta = {"tool": "biharmonic-lab", "version": __version__, "schema": 1}
    return ResidualReport(points, aggregates, verdict, config, meta)


def _aggregates(x, y, cols, ok, method) -> dict:
    def argmax(name):
        v = np.where(ok, cols[name], -np.inf)
        i = int(np.argmax(v))
        return i, [_f(x[i]), _f(y[i])]

    it, pt = argmax("tau_norm")
    ib, pb = argmax("bitau_norm")
    tn = cols["tau_norm"][ok]
    out = {
        "n_points": int(x.size),
        "n_errors": int((~ok).sum()),
        "max_tau_norm": _f(cols["tau_norm"][it]),
        "argmax_tau": pt,
        "tau_tol_at_argmax": _f(cols["tau_tol"][it]),
        "min_tau_norm": _f(tn.min()),
        "max_bitau_norm": _f(cols["bitau_norm"][ib]),
        "argmax_bitau": pb,
        "bitau_tol_at_argmax": _f(cols["bitau_tol"][ib]),
        "max_fd_err": _f(cols["fd_err"][ok].max()),
    }
    if method == "both":
        out["max_gap"] = _f(np.nanmax(cols["gap"][ok]))
    return out


# ---------------------------------------------------------------------------
# formula cross-check
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CrossCheck:
    """Gap between the complex and the coordinate bitension over a grid.

    The relative gap at a point is ``|gap| / (1 + max(|complex|, |coordinate|))``.
    """

    max_abs_gap: float
    max_rel_gap: float
    worst_point: tuple
    n_points: int
    max_bitension: float


def cross_check(fmap: SmoothMap2, rho, sigma, grid: GridSpec | None = None,
                domain_rect: Rect | None = None, target_rect: Rect | None = None) -> CrossCheck:
    """Compare the two bitension formulas for conformal metrics ``rho^2|dz|^2 -> sigma^2|dw|^2``."""
    gM = rho if isinstance(rho, Metric2) else conformal(rho, domain_rect or Rect.everywhere())
    gN = sigma if isinstance(sigma, Metric2) else conformal(sigma, target_rect or Rect.everywhere())
    grid = grid or GridSpec(domain_rect)
    x, y = grid.points(fmap, gM, gN)
    abs_gap = np.empty(x.size)
    rel_gap = np.empty(x.size)
    size = np.empty(x.size)
    for start in range(0, x.size, CHUNK):
        sl = slice(start, start + CHUNK)
        r = biharmonic_residual(fmap, gM, gN, (x[sl], y[sl]), "both")
        gen = np.abs(r.bitension[..., 0] + 1j * r.bitension[..., 1])
        mag = np.maximum(gen, np.abs(r.bitension_conformal))
        abs_gap[sl] = r.gap
        rel_gap[sl] = r.gap / (1 + mag)
        size[sl] = mag
    i = int(np.argmax(rel_gap))
    return CrossCheck(float(abs_gap.max()), float(rel_gap[i]), (float(x[i]), float(y[i])),
                      int(x.size), float(size.max()))


def fixture_cross_check(fix: Fixture, grid: GridSpec | None = None) -> CrossCheck:
    grid = (grid or GridSpec())
    if grid.rect is None:
        grid = grid.with_rect(fix.rect)
    return cross_check(fix.map, fix.domain, fix.target, grid)


# ---------------------------------------------------------------------------
# catalog-driven runs
# ---------------------------------------------------------------------------
def classify_entry(family_id: str, params: dict | None = None, grid: GridSpec | None = None,
                   method: str = "general", tolerances: Tolerances = DEFAULT_TOLERANCES) -> ResidualReport:
    entry = get_entry(family_id)
    full = entry.params(params)
    fix = entry.build(full)
    grid = grid or GridSpec()
    rect = grid.rect or fix.rect
    return classify(fix.map, fix.domain, fix.target, grid, method, tolerances,
                    catalog_id=family_id, params=full, rect=rect)


@dataclass(frozen=True)
class ScanRow:
    params: dict
    verdict: str
    expected: str
    max_tau_norm: float
    max_bitau_norm: float
    max_fd_err: float

    def as_dict(self) -> dict:
        return {"params": self.params, "verdict": self.verdict, "expected": self.expected,
                "max_tau_norm": self.max_tau_norm, "max_bitau_norm": self.max_bitau_norm,
                "max_fd_err": self.max_fd_err}


@dataclass
class ScanTable:
    family: str
    rows: list

    def __len__(self) -> int:
        return len(self.rows)

    def verdicts(self) -> list:
        return [r.verdict for r in self.rows]

    def to_dict(self) -> dict:
        return {"family": self.family, "rows": [r.as_dict() for r in self.rows]}


#: families whose maps accept array-valued (a, b, c, d) with shared metrics
BATCHABLE = ("sphere-linear", "hyperbolic-linear")
#: lattice points per batched call (times the grid size stays near CHUNK * 5)
BATCH_POINTS = 20000


def lattice(entry_defaults: dict, ranges: dict, tied: dict | None = None) -> list[dict]:
    """Cartesian product of ``ranges`` in the entry's parameter order."""
    tied = dict(tied or {})
    for name in list(ranges) + list(tied):
        if name not in entry_defaults:
            raise ParameterError(f"unknown parameter {name!r}")
    for dst, src in tied.items():
        if src not in entry_defaults:
            raise ParameterError(f"cannot tie {dst!r} to unknown parameter {src!r}")
    names = [k for k in entry_defaults if k in ranges and k not in tied]
    values = [[float(v) for v in ranges[k]] for k in names]
    rows = []
    for combo in itertools.product(*values):
        p = dict(entry_defaults)
        p.update(zip(names, combo))
        for dst, src in tied.items():
            p[dst] = p[src]
        rows.append(p)
    return rows


def parameter_scan(family_id: str, ranges: dict, grid: GridSpec | None = None,
                   method: str = "general", tolerances: Tolerances = DEFAULT_TOLERANCES,
                   tied: dict | None = None) -> ScanTable:
    """One classified row per lattice point, in lattice order."""
    entry = get_entry(family_id)
    return scan_rows(family_id, lattice(entry.defaults, ranges, tied), grid, method, tolerances)


def scan_rows(family_id: str, rows_params: Sequence[dict], grid: GridSpec | None = None,
              method: str = "general", tolerances: Tolerances = DEFAULT_TOLERANCES) -> ScanTable:
    """Classify an explicit list of parameter dicts (missing keys take defaults)."""
    entry = get_entry(family_id)
    rows_params = [entry.params(p) for p in rows_params]
    grid = grid or GridSpec()
    if not rows_params:
        return ScanTable(family_id, [])
    if family_id in BATCHABLE:
        return ScanTable(family_id, _batch_scan(entry, rows_params, grid, method, tolerances))
    rows = []
    for p in rows_params:
        rep = classify_entry(family_id, p, grid, method, tolerances)
        agg = rep.aggregates
        rows.append(ScanRow(p, rep.verdict, entry.expected_verdict(p), agg["max_tau_norm"],
                            agg["max_bitau_norm"], agg["max_fd_err"]))
    return ScanTable(family_id, rows)


def _batch_scan(entry, rows_params, grid, method, tol) -> list:
    fix0 = entry.build(rows_params[0])
    x, y = grid.points(None, fix0.domain, None, grid.rect or fix0.rect)
    coeffs = np.array([[p[k] for k in "abcd"] for p in rows_params], dtype=float)
    per = max(1, BATCH_POINTS // x.size)
    rows = []
    for start in range(0, len(rows_params), per):
        block = coeffs[start:start + per]
        a, b, c, d = (block[:, k:k + 1] for k in range(4))
        fix = entry.builder(dict(rows_params[0], a=a, b=b, c=c, d=d))
        r = biharmonic_residual(fix.map, fix.domain, fix.target, (x[None, :], y[None, :]), method, tol)
        shape = r.tension_norm.shape
        tt, bt, fd = (np.broadcast_to(v, shape) for v in (r.tension_tol, r.bitension_tol, r.fd_err))
        verdicts = decide(r.tension_norm, tt, r.bitension_norm, bt, fd)
        for k, p in enumerate(rows_params[start:start + per]):
            rows.append(ScanRow(p, str(verdicts[k]), entry.expected_verdict(p),
                                float(r.tension_norm[k].max()), float(r.bitension_norm[k].max()),
                                float(fd[k].max())))
    return rows


def verify_entry(family_id: str, params: dict | None = None, grid: GridSpec | None = None,
                 method: str = "general", tolerances: Tolerances = DEFAULT_TOLERANCES):
    """Classify a catalog entry and compare with its expected verdict."""
    entry = get_entry(family_id)
    rep = classify_entry(family_id, params, grid, method, tolerances)
    expected = entry.expected_verdict(params)
    rep.config["expected_verdict"] = expected
    return rep, expected
