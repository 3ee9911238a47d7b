"""Affine iterated function systems and the geometric cross-checks.

An affine IFS is a list of maps x -> A_i x + a_i with non-singular contractive
linear parts.  The attractor is realized by the chaos game (random iteration),
optionally driven by the depth-k conditional masses of a cylinder measure so
that the sampled orbit follows the projected equilibrium approximant rather
than the uniform Bernoulli measure.  Box counting over corner-anchored grids
gives the numerical dimension estimate used to cross-check the affinity
dimension on sampled generic translations.

Randomness: numpy's PCG64 behind ``default_rng``; 64-bit seeds.  Chains of the
chaos game draw from per-chain streams created with ``SeedSequence.spawn``, so
a fixed (seed, chains) pair reproduces the cloud bit for bit regardless of how
the chains are scheduled.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCloudError, IFSValidationError, NumericallySingularError
from .linalg import singular_values

#: Number of independent chaos-game chains (a config value, not a worker count:
#: it changes the sampled cloud, so it is fixed by default).
DEFAULT_CHAINS = 512


@dataclass
class AffineIFS:
    """Maps x -> A_i x + a_i in dimension d.

    Construction checks only shapes and finiteness; run ``validate_ifs`` for
    the mathematical preconditions (tests may bypass it deliberately)."""

    dimension: int
    matrices: np.ndarray
    translations: np.ndarray
    name: str = "ifs"

    def __post_init__(self):
        self.matrices = np.asarray(self.matrices, dtype=float)
        self.translations = np.asarray(self.translations, dtype=float)
        d = self.dimension
        if self.matrices.ndim != 3 or self.matrices.shape[1:] != (d, d):
            raise ValueError(f"matrices must have shape (k, {d}, {d}), got {self.matrices.shape}")
        if self.translations.shape != (self.matrices.shape[0], d):
            raise ValueError(
                f"translations must have shape ({self.matrices.shape[0]}, {d}), "
                f"got {self.translations.shape}"
            )
        if self.matrices.shape[0] < 1:
            raise ValueError("an IFS needs at least one map")
        if not (np.all(np.isfinite(self.matrices)) and np.all(np.isfinite(self.translations))):
            raise ValueError("IFS entries must be finite")

    @property
    def n_maps(self) -> int:
        return self.matrices.shape[0]

    def contraction_ratios(self) -> np.ndarray:
        """Largest singular value of each linear part."""
        return np.linalg.svd(self.matrices, compute_uv=False)[:, 0]

    def bounding_radius(self) -> float:
        """Radius of a ball around the origin mapped into itself by every map."""
        s_max = float(self.contraction_ratios().max())
        if s_max >= 1.0:
            raise IFSValidationError(f"IFS is not contractive (max ratio {s_max:g})")
        a_max = float(np.linalg.norm(self.translations, axis=1).max())
        return a_max / (1.0 - s_max)

    def with_translations(self, flat) -> "AffineIFS":
        """Same linear parts with a new translation bundle (k*d flat coords)."""
        flat = np.asarray(flat, dtype=float).reshape(self.n_maps, self.dimension)
        return AffineIFS(self.dimension, self.matrices.copy(), flat, name=self.name)

    def content_hash(self) -> str:
        h = hashlib.sha256(b"affine-ifs")
        h.update(np.int64(self.dimension).tobytes())
        h.update(np.int64(self.n_maps).tobytes())
        h.update(self.matrices.tobytes())
        h.update(self.translations.tobytes())
        return h.hexdigest()


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_ifs(ifs: AffineIFS) -> ValidationReport:
    """Hard errors: fewer than two maps, singular or expanding linear part.
    The operator-norm < 1/2 hypothesis is only a warning; the dimension
    computation is defined without it."""
    report = ValidationReport()
    if ifs.n_maps < 2:
        report.errors.append(f"IFS has {ifs.n_maps} map(s); at least 2 required")
    for i, A in enumerate(ifs.matrices):
        try:
            svals = singular_values(A)
        except NumericallySingularError as exc:
            report.errors.append(f"map {i}: {exc}")
            continue
        if svals[0] >= 1.0:
            report.errors.append(
                f"map {i}: not contractive (largest singular value {svals[0]:.6g})"
            )
        elif svals[0] >= 0.5:
            report.warnings.append(
                f"map {i}: operator norm {svals[0]:.6g} >= 1/2; the norm-1/2 "
                "hypothesis behind the generic-translation dimension guarantee fails"
            )
    return report


def sample_translations(d: int, n_maps: int, count: int, radius: float, seed: int) -> np.ndarray:
    """Uniform samples from the cube [-radius, radius]^(d * n_maps), one row
    per sampled translation bundle."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return rng.uniform(-radius, radius, size=(count, d * n_maps))


@dataclass
class PointCloud:
    points: np.ndarray
    seed: int
    driver: str


def _driver_tables(ifs: AffineIFS, driver):
    """Resolve a chaos-game driver into (iid cumulative probs, conditional
    cumulative rows, context depth)."""
    from .equilibrium import CylinderMeasure

    m = ifs.n_maps
    if driver is None:
        probs = np.full(m, 1.0 / m)
        return np.cumsum(probs), None, 0, "uniform"
    if isinstance(driver, CylinderMeasure):
        if driver.n_symbols != m:
            raise ValueError("driver measure is over a different alphabet")
        k = driver.depth
        if k == 1:
            return np.cumsum(driver.masses), None, 0, driver.provenance
        rows = driver.masses.reshape(m ** (k - 1), m)
        row_sums = rows.sum(axis=1, keepdims=True)
        cond = np.where(row_sums > 0, rows / np.where(row_sums > 0, row_sums, 1.0), 1.0 / m)
        return None, np.cumsum(cond, axis=1), k - 1, driver.provenance
    probs = np.asarray(driver, dtype=float)
    if probs.shape != (m,) or probs.min() < 0 or probs.sum() <= 0:
        raise ValueError("weight driver must be a nonnegative vector with positive sum, one entry per map")
    probs = probs / probs.sum()
    return np.cumsum(probs), None, 0, f"weights({probs.tolist()})"


def attractor_points(
    ifs: AffineIFS,
    count: int,
    burn_in: int = 200,
    seed: int = 0,
    driver=None,
    chains: int = DEFAULT_CHAINS,
) -> PointCloud:
    """Chaos-game realization of the attractor.

    Runs ``chains`` independent chains from the origin, discards ``burn_in``
    iterates per chain, and concatenates the chains' tails (chain-major) into
    ``count`` points.  All points stay inside the invariant ball."""
    if count < 1:
        raise ValueError("count must be >= 1")
    ifs.bounding_radius()  # raises if not contractive
    m = ifs.n_maps
    n_chains = max(1, min(chains, count))
    base, extra = divmod(count, n_chains)
    keep = base + (1 if extra else 0)
    total_steps = burn_in + keep

    iid_cum, cond_cum, ctx_depth, tag = _driver_tables(ifs, driver)
    streams = np.random.SeedSequence(seed).spawn(n_chains)
    uniforms = np.stack(
        [np.random.default_rng(s).random(total_steps) for s in streams], axis=0
    )

    d = ifs.dimension
    x = np.zeros((n_chains, d))
    ctx = np.zeros(n_chains, dtype=np.int64)
    ctx_size = m**ctx_depth if ctx_depth else 1
    out = np.empty((keep, n_chains, d))
    for step in range(total_steps):
        r = uniforms[:, step]
        if cond_cum is None:
            sym = np.searchsorted(iid_cum, r, side="right")
        else:
            sym = (cond_cum[ctx] < r[:, None]).sum(axis=1)
            ctx = (ctx * m + sym) % ctx_size
        sym = np.minimum(sym, m - 1)
        x = np.einsum("cij,cj->ci", ifs.matrices[sym], x) + ifs.translations[sym]
        if step >= burn_in:
            out[step - burn_in] = x

    series = out.transpose(1, 0, 2)  # (chain, step, d)
    quotas = np.full(n_chains, base, dtype=int)
    quotas[:extra] += 1
    points = np.concatenate([series[c, : quotas[c]] for c in range(n_chains) if quotas[c]])
    return PointCloud(points=points, seed=seed, driver=tag)


@dataclass
class BoxDimensionResult:
    estimate: float
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    residual: float


def box_dimension(cloud, scales) -> BoxDimensionResult:
    """Least-squares slope of log N(delta) against log(1/delta) over
    corner-anchored grid covers."""
    points = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    scales = [float(s) for s in scales]
    if len(scales) < 3:
        raise ValueError("need at least 3 scales")
    if any(s <= 0 for s in scales) or any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be positive and strictly decreasing")
    if points.ndim != 2 or len(points) == 0:
        raise ValueError(f"expected a nonempty (N, d) point array, got shape {points.shape}")
    mins = points.min(axis=0)
    if not np.any(points.max(axis=0) - mins > 0):
        raise DegenerateCloudError("degenerate cloud: all points coincide")

    counts = []
    for delta in scales:
        idx = np.floor((points - mins) / delta).astype(np.int64)
        radices = [int(idx[:, axis].max()) + 1 for axis in range(points.shape[1])]
        if np.prod(radices, dtype=object) < 2**62:
            key = idx[:, 0].copy()
            for axis in range(1, points.shape[1]):
                key = key * radices[axis] + idx[:, axis]
            counts.append(len(np.unique(key)))
        else:  # mixed-radix key would overflow int64
            counts.append(len(np.unique(idx, axis=0)))
    x = np.log(1.0 / np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return BoxDimensionResult(
        estimate=float(slope), scales=tuple(scales), counts=tuple(counts), residual=residual
    )


def render_pgm(cloud, resolution: int, bounds=None) -> bytes:
    """Binary PGM (P5) raster of hit counts, log-scaled to 8 bits.

    Byte-exact for fixed inputs: header ``P5\\n<w> <h>\\n255\\n`` followed by
    row-major bytes, top row = largest y."""
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    points = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    header = b"P5\n%d %d\n255\n" % (resolution, resolution)
    if len(points) == 0:
        return header + bytes(resolution * resolution)

    xs = points[:, 0]
    ys = points[:, 1] if points.shape[1] >= 2 else np.zeros(len(points))
    if bounds is None:
        bounds = ((float(xs.min()), float(xs.max())), (float(ys.min()), float(ys.max())))
    (x_lo, x_hi), (y_lo, y_hi) = bounds
    if x_hi <= x_lo:
        x_lo, x_hi = x_lo - 0.5, x_lo + 0.5
    if y_hi <= y_lo:
        y_lo, y_hi = y_lo - 0.5, y_lo + 0.5

    px = np.clip(((xs - x_lo) / (x_hi - x_lo) * resolution).astype(np.int64), 0, resolution - 1)
    py = np.clip(((ys - y_lo) / (y_hi - y_lo) * resolution).astype(np.int64), 0, resolution - 1)
    row = resolution - 1 - py
    hits = np.bincount(row * resolution + px, minlength=resolution * resolution)
    c_max = hits.max()
    if c_max == 0:
        img = np.zeros(resolution * resolution, dtype=np.uint8)
    else:
        img = np.rint(255.0 * np.log1p(hits) / np.log1p(c_max)).astype(np.uint8)
    return header + img.tobytes()
