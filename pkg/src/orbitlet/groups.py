"""Dilation-group charts, Haar quadrature, and the built-in group catalog.

A dilation group H < GL(k,R) is represented by a single global chart:
a list of parameter blocks (continuous intervals or integer ranges),
an embedding t -> h(t) into k x k matrices, the left-Haar density w(t)
in chart coordinates, and the modular function of H.  The modular
function of the full affine group G = R^k x| H is
Delta_G(h) = Delta_H(h) |det h|^{-1}.

Fixed Haar normalizations (everything downstream depends on these):

* scale-type blocks use the chart t = log a, so da/a has density 1;
* the SO(2) factor uses d(theta) with total mass 2*pi;
* discrete blocks carry counting measure.

Quadrature is the composite midpoint rule per continuous block with a
node-doubling pass; the returned value is the Richardson extrapolation
of the pair and the reported error is the doubling spread.  Optional
per-block knots split the range so that piecewise-smooth integrands
are integrated piece by piece (midpoint is then exact on constant
pieces, which is what makes indicator profiles cheap and sharp).
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    NonFinite,
    OutOfDomain,
    TruncationMissing,
)
from .expressions import parse_expression

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ContinuousBlock:
    lo: float = -math.inf
    hi: float = math.inf
    label: str = "t"

    @property
    def bounded(self):
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True)
class DiscreteBlock:
    lo: float = -math.inf  # inclusive integer bound, may be +-inf
    hi: float = math.inf
    label: str = "j"

    @property
    def bounded(self):
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True)
class Truncation:
    """Per-block clips (lo, hi); ``None`` keeps a bounded block's own range."""

    limits: tuple = ()

    @classmethod
    def box(cls, *pairs):
        return cls(tuple(pairs))

    def limit(self, index):
        if index < len(self.limits):
            return self.limits[index]
        return None


def default_truncation(chart, half_width=12.0, discrete_span=24):
    """Clip every unbounded block: continuous to +-half_width, discrete
    to +-discrete_span indices."""
    lims = []
    for b in chart.blocks:
        if b.bounded:
            lims.append(None)
        elif isinstance(b, ContinuousBlock):
            lo = b.lo if math.isfinite(b.lo) else -half_width
            hi = b.hi if math.isfinite(b.hi) else half_width
            lims.append((lo, hi))
        else:
            lo = b.lo if math.isfinite(b.lo) else -discrete_span
            hi = b.hi if math.isfinite(b.hi) else discrete_span
            lims.append((lo, hi))
    return Truncation(tuple(lims))


def det_many(mats):
    """Determinants of a stack of k x k matrices; closed form for
    k <= 2 (keeps modular data exact to the last bit)."""
    mats = np.asarray(mats, dtype=float)
    k = mats.shape[-1]
    if k == 1:
        return mats[..., 0, 0]
    if k == 2:
        return mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
    return np.linalg.det(mats)


@dataclass(frozen=True)
class GroupElement:
    point: tuple
    mat: np.ndarray
    det: float
    delta_h: float
    delta_g: float

    @property
    def inv_mat(self):
        return np.linalg.inv(self.mat)


@dataclass
class GroupChart:
    name: str
    ambient_dim: int
    blocks: tuple
    embed_fn: Callable  # points (N,d) -> mats (N,k,k)
    haar_density_fn: Callable = None  # points -> (N,), default 1
    modular_h_fn: Callable = None  # points -> (N,), default 1
    coords_fn: Optional[Callable] = None  # mats (N,k,k) -> points (N,d)
    is_compact: bool = False
    is_unimodular_g: bool = False
    catalog_id: Optional[str] = None

    @property
    def n_blocks(self):
        return len(self.blocks)

    def _points(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.n_blocks:
            if self.n_blocks == 0 and pts.size == 0:
                return pts.reshape(-1, 0)
            raise OutOfDomain(
                f"{self.name}: chart point has {pts.shape[-1]} coordinates, "
                f"expected {self.n_blocks}"
            )
        return pts

    def embed(self, points):
        pts = self._points(points)
        if self.n_blocks == 0:
            n = max(1, pts.shape[0])
            k = self.ambient_dim
            return np.broadcast_to(np.eye(k), (n, k, k)).copy()
        return self.embed_fn(pts)

    def haar_weight(self, points):
        pts = self._points(points)
        if self.haar_density_fn is None:
            return np.ones(pts.shape[0])
        return np.asarray(self.haar_density_fn(pts), dtype=float)

    def modular_h(self, points):
        pts = self._points(points)
        if self.modular_h_fn is None:
            return np.ones(pts.shape[0])
        return np.asarray(self.modular_h_fn(pts), dtype=float)

    def coords(self, mats):
        if self.coords_fn is None:
            raise ConfigError(f"{self.name}: chart has no inverse coordinate map")
        return self.coords_fn(np.asarray(mats, dtype=float))

    def contains(self, point):
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape != (self.n_blocks,):
            return False
        for value, block in zip(point, self.blocks):
            if isinstance(block, DiscreteBlock):
                if value != round(value):
                    return False
            if value < block.lo or value > block.hi:
                return False
        return True

    def element(self, point=()):
        """Evaluate the chart at one point, caching matrix and modular data."""
        point = tuple(np.atleast_1d(np.asarray(point, dtype=float)).tolist())
        if len(point) != self.n_blocks:
            raise OutOfDomain(
                f"{self.name}: point {point} has {len(point)} coordinates, "
                f"expected {self.n_blocks}"
            )
        if self.n_blocks and not self.contains(point):
            raise OutOfDomain(f"{self.name}: point {point} outside chart domain")
        pts = np.asarray(point, dtype=float).reshape(1, -1)
        mat = self.embed(pts)[0]
        det = float(det_many(mat[None])[0])
        if det == 0.0 or not math.isfinite(det):
            raise OutOfDomain(f"{self.name}: singular matrix at {point}")
        dh = float(self.modular_h(pts)[0])
        return GroupElement(point=point, mat=mat, det=det, delta_h=dh,
                            delta_g=dh / abs(det))

    def random_point(self, rng, span=3.0):
        coords = []
        for b in self.blocks:
            if isinstance(b, ContinuousBlock):
                lo = max(b.lo, -span)
                hi = min(b.hi, span)
                coords.append(rng.uniform(lo, hi))
            else:
                lo = int(max(b.lo, -span * 2))
                hi = int(min(b.hi, span * 2))
                coords.append(float(rng.integers(lo, hi + 1)))
        return tuple(coords)


def evaluate_element(chart, point=()):
    return chart.element(point)


def dual_act(omega, g):
    """Right dual action on frequency row vectors: omega -> omega @ h."""
    mat = g.mat if isinstance(g, GroupElement) else np.asarray(g, dtype=float)
    k = mat.shape[-1]
    om = np.asarray(omega, dtype=float)
    scalar_in = om.ndim == 0
    if om.ndim == 0 and k != 1:
        raise DimensionMismatch(
            f"scalar frequency given but group acts on dimension {k}"
        )
    if k == 1 and om.shape[-1:] != (1,):
        om = om.reshape(om.shape + (1,))
    if om.shape[-1] != k:
        raise DimensionMismatch(
            f"frequency has dimension {om.shape[-1]}, group acts on dimension {k}"
        )
    out = om @ mat
    if scalar_in:
        return float(out.reshape(-1)[0])
    if k == 1 and np.asarray(omega).shape[-1:] != (1,):
        return out[..., 0]
    return out


def modular_g(chart, g):
    """Modular function of G = R^k x| H: Delta_H(h) |det h|^{-1}."""
    return g.delta_g


# ----------------------------------------------------------------------
# quadrature


def _segments(lo, hi, knots):
    cuts = [lo]
    for c in sorted(set(knots or ())):
        if lo < c < hi:
            cuts.append(c)
    cuts.append(hi)
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _continuous_nodes(lo, hi, n, knots):
    segs = _segments(lo, hi, knots)
    total = hi - lo
    centers = []
    widths = []
    for a, b in segs:
        m = max(2, int(math.ceil(n * (b - a) / total)))
        step = (b - a) / m
        c = a + step * (np.arange(m) + 0.5)
        centers.append(c)
        widths.append(np.full(m, step))
    return np.concatenate(centers), np.concatenate(widths)


def _discrete_nodes(lo, hi):
    lo_i = int(math.ceil(lo))
    hi_i = int(math.floor(hi))
    if hi_i < lo_i:
        return np.zeros(0), np.zeros(0)
    vals = np.arange(lo_i, hi_i + 1, dtype=float)
    return vals, np.ones_like(vals)


def _resolve_limits(chart, trunc):
    trunc = trunc or Truncation()
    out = []
    for i, b in enumerate(chart.blocks):
        lim = trunc.limit(i)
        if lim is None:
            if not b.bounded:
                raise TruncationMissing(
                    f"{chart.name}: block {i} is unbounded and no truncation was given"
                )
            out.append((b.lo, b.hi))
        else:
            lo = max(b.lo, lim[0])
            hi = min(b.hi, lim[1])
            out.append((lo, hi))
    return out


@dataclass
class QuadGrid:
    points: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,) haar density x cell measure
    block_values: list  # per-block 1-D node arrays
    block_is_edge: list  # per-block bool arrays marking outermost nodes


def haar_grid(chart, trunc=None, nodes=256, knots=None):
    """Tensor quadrature grid over the (truncated) chart.

    ``knots`` maps a continuous block index to split locations.
    Weights are haar_density(t) x product of cell measures (counting
    measure contributes factor 1).
    """
    limits = _resolve_limits(chart, trunc)
    axes = []
    meshw = []
    edges = []
    for i, (b, (lo, hi)) in enumerate(zip(chart.blocks, limits)):
        if isinstance(b, ContinuousBlock):
            kn = (knots or {}).get(i)
            c, w = _continuous_nodes(lo, hi, nodes, kn)
        else:
            c, w = _discrete_nodes(lo, hi)
        axes.append(c)
        meshw.append(w)
        is_edge = np.zeros(len(c), dtype=bool)
        if len(c):
            is_edge[np.argmin(c)] = True
            is_edge[np.argmax(c)] = True
        edges.append(is_edge)
    if not axes:
        return QuadGrid(points=np.zeros((1, 0)), weights=np.ones(1),
                        block_values=[], block_is_edge=[])
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*meshw, indexing="ij")
    cellw = np.ones(pts.shape[0])
    for w in wmesh:
        cellw = cellw * w.ravel()
    dens = chart.haar_weight(pts)
    return QuadGrid(points=pts, weights=dens * cellw,
                    block_values=axes, block_is_edge=edges)


def _grid_sum(chart, f, grid):
    vals = np.asarray(f(grid.points), dtype=float)
    if vals.shape != (grid.points.shape[0],):
        vals = vals.reshape(grid.points.shape[0])
    if not np.all(np.isfinite(vals)):
        raise NonFinite(f"{chart.name}: integrand returned NaN/inf at a node")
    return vals, float(np.sum(vals * grid.weights))


def haar_integrate(chart, f, trunc=None, nodes=256, knots=None):
    """Integrate f over H against the chart's Haar measure.

    ``f`` receives chart points with shape (N, d) and returns (N,)
    values.  Returns (value, error_estimate); the estimate combines the
    node-doubling spread with a boundary-cell truncation indicator for
    clipped blocks.
    """
    limits = _resolve_limits(chart, trunc)
    has_continuous = any(isinstance(b, ContinuousBlock) for b in chart.blocks)
    grid1 = haar_grid(chart, trunc, nodes, knots)
    if grid1.points.shape[0] == 0:
        return 0.0, 0.0
    vals1, total1 = _grid_sum(chart, f, grid1)
    if not has_continuous:
        tail = _tail_estimate(chart, grid1, vals1, limits)
        return total1, tail
    grid2 = haar_grid(chart, trunc, 2 * nodes, knots)
    vals2, total2 = _grid_sum(chart, f, grid2)
    # midpoint is O(h^2); the doubled-node pair gives a Richardson value
    value = (4.0 * total2 - total1) / 3.0
    err = abs(total2 - total1) / 3.0
    err += _tail_estimate(chart, grid2, vals2, limits)
    return value, err


def _tail_estimate(chart, grid, vals, limits):
    """Boundary-shell magnitude of clipped blocks, as a tail indicator."""
    tail = 0.0
    for i, b in enumerate(chart.blocks):
        clipped = (limits[i][0] > b.lo) or (limits[i][1] < b.hi)
        if not clipped or not grid.block_values:
            continue
        block_col = grid.points[:, i]
        bv = grid.block_values[i]
        edge_vals = bv[grid.block_is_edge[i]]
        mask = np.isin(block_col, edge_vals)
        tail += float(np.sum(np.abs(vals[mask]) * grid.weights[mask]))
    return tail


def integrate_matrix_fn(chart, f_mat, trunc=None, nodes=256, left=None, knots=None):
    """Integrate a function of the group *matrix*, optionally left
    translated: integral of f(left @ h(t)) d mu_H."""

    def f(points):
        mats = chart.embed(points)
        if left is not None:
            mats = np.asarray(left, dtype=float) @ mats
        return f_mat(mats)

    return haar_integrate(chart, f, trunc=trunc, nodes=nodes, knots=knots)


def check_left_invariance(chart, samples, trunc=None, nodes=2048):
    """Max relative error of |int f(h0 h) - int f(h)| / int f over samples.

    Each sample is (h0_chart_point, f) with f defined on matrices
    (N,k,k) -> (N,); f must be integrable within the truncation both
    before and after translation.
    """
    worst = 0.0
    for h0_point, f_mat in samples:
        h0 = chart.element(h0_point)
        base, _ = integrate_matrix_fn(chart, f_mat, trunc, nodes)
        moved, _ = integrate_matrix_fn(chart, f_mat, trunc, nodes, left=h0.mat)
        if base == 0.0:
            worst = max(worst, abs(moved))
        else:
            worst = max(worst, abs(moved - base) / abs(base))
    return worst


# ----------------------------------------------------------------------
# catalog

IDENTITY1 = "IDENTITY1"
IDENTITY2 = "IDENTITY2"
AFFINE1D_PLUS = "AFFINE1D_PLUS"
AFFINE1D_FULL = "AFFINE1D_FULL"
DYADIC1D = "DYADIC1D"
SIM2 = "SIM2"
DIAG2 = "DIAG2"
DIAGLINE2 = "DIAGLINE2"
SE2ROT = "SE2ROT"
SL2Z_DYADIC = "SL2Z_DYADIC"

CATALOG_IDS = (
    IDENTITY1, IDENTITY2, AFFINE1D_PLUS, AFFINE1D_FULL, DYADIC1D,
    SIM2, DIAG2, DIAGLINE2, SE2ROT, SL2Z_DYADIC,
)


def _ones(pts):
    return np.ones(pts.shape[0])


def _chart_identity(k):
    def embed(pts):
        return np.broadcast_to(np.eye(k), (pts.shape[0], k, k)).copy()

    return GroupChart(
        name=f"IDENTITY{k}", ambient_dim=k, blocks=(),
        embed_fn=embed, coords_fn=lambda m: np.zeros((m.shape[0], 0)),
        is_compact=True, is_unimodular_g=True,
        catalog_id=f"IDENTITY{k}",
    )


def _chart_affine_plus():
    def embed(pts):
        return np.exp(pts[:, 0]).reshape(-1, 1, 1)

    def coords(mats):
        return np.log(mats[:, 0, 0]).reshape(-1, 1)

    return GroupChart(
        name="AFFINE1D_PLUS", ambient_dim=1,
        blocks=(ContinuousBlock(label="log_scale"),),
        embed_fn=embed, coords_fn=coords,
        is_compact=False, is_unimodular_g=False, catalog_id=AFFINE1D_PLUS,
    )


def _chart_affine_full():
    def embed(pts):
        sign = 1.0 - 2.0 * pts[:, 1]
        return (sign * np.exp(pts[:, 0])).reshape(-1, 1, 1)

    def coords(mats):
        a = mats[:, 0, 0]
        return np.stack([np.log(np.abs(a)), (a < 0).astype(float)], axis=-1)

    return GroupChart(
        name="AFFINE1D_FULL", ambient_dim=1,
        blocks=(ContinuousBlock(label="log_scale"), DiscreteBlock(0, 1, "sign")),
        embed_fn=embed, coords_fn=coords,
        is_compact=False, is_unimodular_g=False, catalog_id=AFFINE1D_FULL,
    )


def _chart_dyadic():
    def embed(pts):
        return np.exp2(pts[:, 0]).reshape(-1, 1, 1)

    def coords(mats):
        return np.log2(mats[:, 0, 0]).reshape(-1, 1)

    return GroupChart(
        name="DYADIC1D", ambient_dim=1,
        blocks=(DiscreteBlock(label="octave"),),
        embed_fn=embed, coords_fn=coords,
        is_compact=False, is_unimodular_g=False, catalog_id=DYADIC1D,
    )


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    m = np.empty(theta.shape + (2, 2))
    m[..., 0, 0] = c
    m[..., 0, 1] = -s
    m[..., 1, 0] = s
    m[..., 1, 1] = c
    return m


def _chart_sim2():
    def embed(pts):
        return np.exp(pts[:, 0])[:, None, None] * _rot(pts[:, 1])

    def coords(mats):
        det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
        s = 0.5 * np.log(det)
        theta = np.mod(np.arctan2(mats[:, 1, 0], mats[:, 0, 0]), TWO_PI)
        return np.stack([s, theta], axis=-1)

    return GroupChart(
        name="SIM2", ambient_dim=2,
        blocks=(ContinuousBlock(label="log_scale"),
                ContinuousBlock(0.0, TWO_PI, "angle")),
        embed_fn=embed, coords_fn=coords,
        is_compact=False, is_unimodular_g=False, catalog_id=SIM2,
    )


def _chart_diag2():
    def embed(pts):
        m = np.zeros((pts.shape[0], 2, 2))
        m[:, 0, 0] = np.exp(pts[:, 0])
        m[:, 1, 1] = np.exp(pts[:, 1])
        return m

    def coords(mats):
        return np.stack([np.log(mats[:, 0, 0]), np.log(mats[:, 1, 1])], axis=-1)

    return GroupChart(
        name="DIAG2", ambient_dim=2,
        blocks=(ContinuousBlock(label="log_a1"), ContinuousBlock(label="log_a2")),
        embed_fn=embed, coords_fn=coords,
        is_compact=False, is_unimodular_g=False, catalog_id=DIAG2,
    )


def _chart_diagline2():
    def embed(pts):
        m = np.zeros((pts.shape[0], 2, 2))
        m[:, 0, 0] = np.exp(pts[:, 0])
        m[:, 1, 1] = 1.0
        return m

    def coords(mats):
        return np.log(mats[:, 0, 0]).reshape(-1, 1)

    return GroupChart(
        name="DIAGLINE2", ambient_dim=2,
        blocks=(ContinuousBlock(label="log_a"),),
        embed_fn=embed, coords_fn=coords,
        is_compact=False, is_unimodular_g=False, catalog_id=DIAGLINE2,
    )


def _chart_se2rot():
    def embed(pts):
        return _rot(pts[:, 0])

    def coords(mats):
        return np.mod(np.arctan2(mats[:, 1, 0], mats[:, 0, 0]), TWO_PI).reshape(-1, 1)

    return GroupChart(
        name="SE2ROT", ambient_dim=2,
        blocks=(ContinuousBlock(0.0, TWO_PI, "angle"),),
        embed_fn=embed, coords_fn=coords,
        is_compact=True, is_unimodular_g=True, catalog_id=SE2ROT,
    )


_SL2Z_CACHE = []
_SL2Z_RING = 0


def _sl2z_matrix(n):
    """Deterministic enumeration of SL(2,Z): rings of growing max-abs
    entry, lexicographic within a ring."""
    global _SL2Z_RING
    n = int(n)
    while len(_SL2Z_CACHE) <= n:
        _SL2Z_RING += 1
        B = _SL2Z_RING
        rng_vals = range(-B, B + 1)
        for a in rng_vals:
            for b in rng_vals:
                for c in rng_vals:
                    for d in rng_vals:
                        if max(abs(a), abs(b), abs(c), abs(d)) != B:
                            continue
                        if a * d - b * c == 1:
                            _SL2Z_CACHE.append(np.array([[a, b], [c, d]], dtype=float))
    return _SL2Z_CACHE[n]


def _chart_sl2z_dyadic():
    def embed(pts):
        out = np.empty((pts.shape[0], 2, 2))
        for i, (k, n) in enumerate(pts):
            out[i] = (2.0 ** k) * _sl2z_matrix(n)
        return out

    return GroupChart(
        name="SL2Z_DYADIC", ambient_dim=2,
        blocks=(DiscreteBlock(label="dyadic_power"),
                DiscreteBlock(0, math.inf, "word_index")),
        embed_fn=embed, coords_fn=None,
        is_compact=False, is_unimodular_g=False, catalog_id=SL2Z_DYADIC,
    )


_BUILDERS = {
    IDENTITY1: lambda: _chart_identity(1),
    IDENTITY2: lambda: _chart_identity(2),
    AFFINE1D_PLUS: _chart_affine_plus,
    AFFINE1D_FULL: _chart_affine_full,
    DYADIC1D: _chart_dyadic,
    SIM2: _chart_sim2,
    DIAG2: _chart_diag2,
    DIAGLINE2: _chart_diagline2,
    SE2ROT: _chart_se2rot,
    SL2Z_DYADIC: _chart_sl2z_dyadic,
}

_ALIASES = {
    "IDENTITY(1)": IDENTITY1,
    "IDENTITY(2)": IDENTITY2,
}

_CHART_CACHE = {}


def catalog(group_id):
    """Look up a catalog chart by id (case-insensitive)."""
    key = str(group_id).strip().upper()
    key = _ALIASES.get(key, key)
    if key not in _BUILDERS:
        raise ConfigError(f"unknown catalog group {group_id!r}; "
                          f"known: {', '.join(CATALOG_IDS)}")
    if key not in _CHART_CACHE:
        _CHART_CACHE[key] = _BUILDERS[key]()
    return _CHART_CACHE[key]


def resolve_chart(group):
    """Accept a chart, a catalog id string, or a config dict."""
    if isinstance(group, GroupChart):
        return group
    if isinstance(group, str):
        return catalog(group)
    if isinstance(group, dict):
        return chart_from_config(group)
    raise ConfigError(f"cannot interpret group spec {group!r}")


# ----------------------------------------------------------------------
# custom charts from JSON config


def chart_from_config(config):
    """Build a chart from {"catalog": id} or {"custom": {...}}.

    Custom charts give blocks, a k x k matrix of embed expressions, a
    Haar density expression, and a modular expression, all in the
    variables t1..td.
    """
    if "catalog" in config:
        return catalog(config["catalog"])
    if "custom" not in config:
        raise ConfigError("group config needs 'catalog' or 'custom'")
    spec = config["custom"]
    try:
        k = int(spec.get("ambient_dim", 1))
        blocks = []
        for bs in spec["blocks"]:
            lo = bs.get("lo")
            hi = bs.get("hi")
            lo = -math.inf if lo is None else float(lo)
            hi = math.inf if hi is None else float(hi)
            if bs.get("type", "continuous") == "discrete":
                blocks.append(DiscreteBlock(lo, hi, bs.get("label", "j")))
            else:
                blocks.append(ContinuousBlock(lo, hi, bs.get("label", "t")))
        embed_rows = spec["embed"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad custom group config: {exc}") from None
    d = len(blocks)
    if len(embed_rows) != k or any(len(r) != k for r in embed_rows):
        raise ConfigError(f"embed must be a {k}x{k} matrix of expressions")
    entry_fns = [[parse_expression(e, d) for e in row] for row in embed_rows]
    dens_fn = parse_expression(spec.get("haar_density", "1"), d)
    modl_fn = parse_expression(spec.get("modular", "1"), d)

    def embed(pts):
        cols = [pts[:, i] for i in range(d)]
        m = np.empty((pts.shape[0], k, k))
        for i in range(k):
            for j in range(k):
                m[:, i, j] = np.broadcast_to(entry_fns[i][j](cols), (pts.shape[0],))
        return m

    def density(pts):
        cols = [pts[:, i] for i in range(d)]
        return np.broadcast_to(np.asarray(dens_fn(cols), dtype=float), (pts.shape[0],))

    def modular(pts):
        cols = [pts[:, i] for i in range(d)]
        return np.broadcast_to(np.asarray(modl_fn(cols), dtype=float), (pts.shape[0],))

    chart = GroupChart(
        name=spec.get("name", "custom"), ambient_dim=k, blocks=tuple(blocks),
        embed_fn=embed, haar_density_fn=density, modular_h_fn=modular,
        is_compact=all(b.bounded for b in blocks),
    )
    chart.is_unimodular_g = _probe_unimodular(chart)
    return chart


def _probe_unimodular(chart):
    rng = np.random.default_rng(0)
    pts = np.array([chart.random_point(rng, span=2.0) for _ in range(32)])
    if pts.size == 0:
        return True
    pts = pts.reshape(32, -1)
    mats = chart.embed(pts)
    dets = np.abs(np.linalg.det(mats))
    dh = chart.modular_h(pts)
    return bool(np.max(np.abs(dh / dets - 1.0)) < 1e-9)
