"""Parameter scans over the catalog families: triplet existence maps, symmetry checks, CSV and PGM output."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import catalog
from .analysis import Triplet, extend_triplet, search, third_bases
from .catalog import FamilyId
from .linalg import hadamard_basis
from .solver import SolverConfig

log = logging.getLogger(__name__)

HALF_PI = np.pi / 2

# fundamental domain per family: one list of closed/half-open intervals per parameter
DOMAINS = {
    FamilyId.FOURIER6: [[(0.0, 2 * np.pi)], [(0.0, 2 * np.pi)]],
    FamilyId.DITA6: [[catalog.DITA_RANGE]],
    FamilyId.BJORCK6: [[(-np.pi, -catalog.BJORCK_EDGE), (catalog.BJORCK_EDGE, np.pi)]],
    FamilyId.MATOLCSI6: [list(catalog.MATOLCSI_DOMAIN)],
    FamilyId.KARLSSON2: [[(-HALF_PI, HALF_PI)], [(-HALF_PI, HALF_PI)]],
    FamilyId.KARLSSON3: [[(0.0, np.pi)]] * 3,
}


@dataclass(frozen=True)
class SweepSpec:
    family: FamilyId
    mode: str = "grid"
    resolution: int = 64
    seeds_per_point: int = 200
    solver: SolverConfig = field(default_factory=SolverConfig)
    fixed_params: tuple = ()
    reduced: bool = False
    extend_seeds: int = 200
    existence_only: bool = True

    def __post_init__(self):
        fam = FamilyId.parse(self.family) if isinstance(self.family, str) else self.family
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "fixed_params", tuple(tuple(p) for p in self.fixed_params))
        if self.mode not in ("grid", "random"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        if fam not in DOMAINS:
            raise ValueError(f"family {fam.value} has no parameters to sweep")
        if self.resolution < 1 or self.seeds_per_point < 1:
            raise ValueError("resolution and seeds_per_point must be positive")
        arity = fam.arity
        for k, _ in self.fixed_params:
            if not 0 <= k < arity:
                raise ValueError(f"fixed parameter index {k} out of range for {fam.value}")
        if self.reduced and fam is not FamilyId.KARLSSON2:
            raise ValueError("the reduced triangle exists only for K2")

    @property
    def free_axes(self) -> list[int]:
        fixed = {k for k, _ in self.fixed_params}
        return [k for k in range(self.family.arity) if k not in fixed]


@dataclass
class ScanRecord:
    params: tuple
    n_vectors: int = 0
    n_third_bases: int = 0
    triplet_found: bool = False
    extension_found: bool = False
    n_converged: int = 0
    n_seeds: int = 0
    skipped: bool = False
    index: tuple = ()


def _axis_points(intervals, n: int) -> np.ndarray:
    """n cell centres spread over a union of intervals in proportion to their lengths."""
    lengths = np.array([hi - lo for lo, hi in intervals])
    u = (np.arange(n) + 0.5) / n * lengths.sum()
    edges = np.concatenate([[0.0], np.cumsum(lengths)])
    k = np.minimum(np.searchsorted(edges, u, side="right") - 1, len(intervals) - 1)
    return np.array([intervals[j][0] + (x - edges[j]) for j, x in zip(k, u)])


def _axis_sample(intervals, rng: np.random.Generator, n: int) -> np.ndarray:
    lengths = np.array([hi - lo for lo, hi in intervals])
    u = rng.uniform(0, lengths.sum(), n)
    edges = np.concatenate([[0.0], np.cumsum(lengths)])
    k = np.minimum(np.searchsorted(edges, u, side="right") - 1, len(intervals) - 1)
    return np.array([intervals[j][0] + (x - edges[j]) for j, x in zip(k, u)])


def sample_points(spec: SweepSpec) -> list[tuple[tuple, tuple]]:
    """(params, grid index) pairs in row-major order; grid index is () in random mode."""
    domains = DOMAINS[spec.family]
    fixed = dict(spec.fixed_params)
    free = spec.free_axes
    n = spec.resolution

    def full(vals):
        out = dict(fixed)
        out.update(zip(free, vals))
        return tuple(float(out[k]) for k in range(spec.family.arity))

    if spec.mode == "random":
        rng = np.random.default_rng([spec.solver.rng_seed, 0x5EED])
        cols = [_axis_sample(domains[k], rng, n) for k in free]
        return [(full(vals), ()) for vals in zip(*cols)]
    axes = [_axis_points(domains[k], n) for k in free]
    if spec.reduced:
        # triangle 0 <= x2 <= x1 <= pi/2
        axes = [_axis_points([(0.0, HALF_PI)], n)] * 2
        return [(full((a, b)), (i, j)) for i, a in enumerate(axes[0])
                for j, b in enumerate(axes[1]) if b <= a]
    grids = np.meshgrid(*axes, indexing="ij")
    idx = np.ndindex(*grids[0].shape) if grids else iter([()])
    return [(full(tuple(g[i] for g in grids)), i) for i in idx]


def _point_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def scan_point(spec: SweepSpec, params: tuple, point: int) -> ScanRecord:
    rec = ScanRecord(tuple(params))
    try:
        h = catalog.build(spec.family, params)
    except (catalog.SingularParameterError, catalog.ParameterRangeError) as e:
        log.info("skipping %s%s: %s", spec.family.value, params, e)
        rec.skipped = True
        return rec
    pair = (np.eye(6), hadamard_basis(h))
    cfg = replace(spec.solver, rng_seed=_point_seed(spec.solver.rng_seed, point))
    stop = (lambda s: len(third_bases(s)) > 0) if spec.existence_only else None
    # one chunk per point: a chunk costs as much as its slowest seed
    vs = search(pair, spec.seeds_per_point, cfg, early_stop=False, stop_when=stop)
    bases = third_bases(vs)
    rec.n_vectors = len(vs)
    rec.n_third_bases = len(bases)
    rec.triplet_found = bool(bases)
    rec.n_converged = vs.n_converged
    rec.n_seeds = vs.n_seeds
    if bases and spec.extend_seeds > 0:
        ext_cfg = replace(cfg, rng_seed=_point_seed(cfg.rng_seed, 1))
        ext = extend_triplet(Triplet(pair, bases[0]), spec.extend_seeds, ext_cfg)
        rec.extension_found = len(ext) > 0
        if rec.extension_found:
            log.warning("vector MU to a triplet found at %s%s", spec.family.value, params)
    return rec


def _scan_task(args):
    spec, params, point, index = args
    rec = scan_point(spec, params, point)
    rec.index = index
    return rec


def run_sweep(spec: SweepSpec, workers: int = 1, progress=None) -> list[ScanRecord]:
    """One record per sampled point, in sampling order; identical for any worker count."""
    tasks = [(spec, p, k, idx) for k, (p, idx) in enumerate(sample_points(spec))]
    if workers <= 1:
        results = map(_scan_task, tasks)
        pool = None
    else:
        pool = ProcessPoolExecutor(workers)
        results = pool.map(_scan_task, tasks, chunksize=max(1, len(tasks) // (8 * workers)))
    out = []
    try:
        for rec in results:
            out.append(rec)
            if progress is not None:
                progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return out


# ---------------------------------------------------------------------------
# symmetry validation


@dataclass
class SymmetryReport:
    mismatches: dict[str, int]
    compared: dict[str, int]

    @property
    def fractions(self) -> dict[str, float]:
        return {k: self.mismatches[k] / self.compared[k] if self.compared[k] else 0.0 for k in self.compared}

    @property
    def worst(self) -> float:
        return max(self.fractions.values(), default=0.0)


def _grid_map(records) -> tuple[dict, tuple]:
    if any(not r.index for r in records):
        raise ValueError("symmetry validation needs grid-mode records")
    cells = {r.index: r for r in records}
    shape = tuple(max(i[k] for i in cells) + 1 for k in range(len(records[0].index)))
    return cells, shape


def symmetry_validate(records, family) -> SymmetryReport:
    """Compare triplet_found at grid points related by the K2 reflections and the diagonal swap."""
    family = FamilyId.parse(family) if isinstance(family, str) else family
    if family is not FamilyId.KARLSSON2:
        raise ValueError(f"no proven symmetries to validate for {family.value}")
    cells, shape = _grid_map(records)
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError("K2 symmetry validation needs a square grid")
    n = shape[0]
    maps = {
        "swap": lambda i, j: (j, i),
        "reflect_x2": lambda i, j: (i, n - 1 - j),
        "reflect_x1": lambda i, j: (n - 1 - i, j),
        "reflect_both": lambda i, j: (n - 1 - i, n - 1 - j),
    }
    mism, comp = {}, {}
    for name, f in maps.items():
        mism[name] = comp[name] = 0
        for (i, j), r in cells.items():
            other = cells.get(f(i, j))
            if other is None or r.skipped or other.skipped:
                continue
            comp[name] += 1
            mism[name] += r.triplet_found != other.triplet_found
    return SymmetryReport(mism, comp)


# ---------------------------------------------------------------------------
# export

FIELDS = ("n_vectors", "n_third_bases", "triplet_found", "extension_found")


def records_to_csv(records, n_params: int | None = None) -> str:
    if n_params is None:
        n_params = len(records[0].params) if records else 2
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"param{k + 1}" for k in range(n_params)] + list(FIELDS))
    for r in records:
        if r.skipped:
            tail = ["", "", "skipped", "skipped"]
        else:
            tail = [r.n_vectors, r.n_third_bases, str(r.triplet_found).lower(), str(r.extension_found).lower()]
        w.writerow([repr(float(p)) for p in r.params] + tail)
    return buf.getvalue()


def export_csv(records, path, n_params: int | None = None) -> None:
    try:
        Path(path).write_text(records_to_csv(records, n_params))
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e


def records_from_csv(text: str) -> list[ScanRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    header = rows[0]
    n_params = sum(h.startswith("param") for h in header)
    out = []
    for row in rows[1:]:
        params = tuple(float(x) for x in row[:n_params])
        nv, nb, tf, ef = row[n_params : n_params + 4]
        if tf == "skipped":
            out.append(ScanRecord(params, skipped=True))
        else:
            out.append(ScanRecord(params, int(nv), int(nb), tf == "true", ef == "true"))
    # grid indices from the sorted distinct values along each axis
    axes = [sorted({r.params[k] for r in out}) for k in range(n_params)]
    for r in out:
        r.index = tuple(axes[k].index(r.params[k]) for k in range(n_params))
    return out


def read_csv(path) -> list[ScanRecord]:
    try:
        return records_from_csv(Path(path).read_text())
    except OSError as e:
        raise OSError(f"cannot read {path}: {e.strerror}") from e


def bitmap_pixels(records, threshold: int = 1) -> np.ndarray:
    """Grey levels, row-major over the grid: 0 where n_third_bases >= threshold, 128 skipped, 255 otherwise."""
    if not records:
        return np.zeros((0, 0), dtype=np.uint8)
    cells, shape = _grid_map(records)
    if len(shape) == 1:
        shape = (1, shape[0])
        cells = {(0,) + k: v for k, v in cells.items()}
    elif len(shape) != 2:
        raise ValueError("bitmaps need a 1-d or 2-d grid")
    img = np.full(shape, 255, dtype=np.uint8)
    for k, r in cells.items():
        img[k] = 128 if r.skipped else (0 if r.n_third_bases >= threshold else 255)
    return img


def render_bitmap(records, path, threshold: int = 1) -> None:
    img = bitmap_pixels(records, threshold)
    h, w = img.shape
    body = "\n".join(" ".join(str(v) for v in row) for row in img)
    try:
        Path(path).write_text(f"P2\n{w} {h}\n255\n{body}\n")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e
