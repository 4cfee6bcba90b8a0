"""Wavelet profiles on the frequency side.

A profile is an evaluable function g_hat on the dual space, together
with a support region.  Closed-form families:

* IndicatorProfile     -- amplitude * indicator of a region;
* RadialGaussianProfile-- c |w|^p exp(-q |w|^2);
* TentProfile          -- |g_hat|^2 is a tent in log|w|, normalized so
                          the scale-group admissibility integral is
                          exactly one (a Littlewood-Paley style window);
* TiledProfile         -- pieces prefactor * base(w @ mat) on disjoint
                          regions (output of the non-unimodular
                          synthesizer, also used for weak windows);
* GridProfile          -- samples on a uniform frequency grid with zero
                          extension (only sound for groups whose dual
                          action maps the grid into itself).

Evaluators accept arrays of shape (..., k); for k = 1 a plain (...)
array also works.  Values are returned as float64 (all built-in
families are real-valued); the transform layer promotes to complex.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ProfileUnevaluable
from .regions import (
    Annulus,
    Box,
    FullSpace,
    IntervalUnion,
    Region,
    as_points,
    region_from_config,
)


class FrequencyProfile:
    """Base class: subclasses set .dim, .support and implement _values."""

    dim = 1
    support: Region = None

    def __call__(self, omega):
        pts = as_points(omega, self.dim)
        flat = pts.reshape(-1, self.dim)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            vals = self._values(flat)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        return vals.reshape(pts.shape[:-1])

    def _values(self, pts):
        raise NotImplementedError

    def edges(self):
        """Support/kink magnitudes used for quadrature knots:
        {'axis': {i: (..,)}, 'radial': (..,)}."""
        return {"axis": {}, "radial": ()}

    def norm_sq_closed_form(self):
        return None

    def to_config(self):
        raise ConfigError(f"{type(self).__name__} is not serializable")


def _region_edges(region):
    axis = {}
    for i in range(region.dim):
        e = region.axis_edges(i)
        if e:
            axis[i] = tuple(e)
    return {"axis": axis, "radial": tuple(region.radial_edges())}


@dataclass
class IndicatorProfile(FrequencyProfile):
    region: Region
    amplitude: float = 1.0

    def __post_init__(self):
        self.dim = self.region.dim
        self.support = self.region

    def _values(self, pts):
        return self.amplitude * self.region.contains(pts).astype(float)

    def edges(self):
        return _region_edges(self.region)

    def norm_sq_closed_form(self):
        try:
            m = self.region.measure()
        except Exception:
            return None
        return self.amplitude ** 2 * m

    def to_config(self):
        return {"type": "indicator", "region": self.region.to_config(),
                "amplitude": self.amplitude}


@dataclass
class RadialGaussianProfile(FrequencyProfile):
    """c |w|^p exp(-q |w|^2); q > 0 or p = q = 0 (constant)."""

    c: float = 1.0
    p: float = 0.0
    q: float = 1.0
    dim: int = 1

    def __post_init__(self):
        self.support = FullSpace(self.dim) if self.p == 0 else _punctured(self.dim)

    def _values(self, pts):
        r = np.sqrt(np.sum(pts * pts, axis=-1))
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = self.c * np.exp(self.p * np.log(r[pos]) - self.q * r[pos] ** 2)
        if self.p == 0:
            out[~pos] = self.c
        return out

    def to_config(self):
        return {"type": "radial_gaussian", "c": self.c, "p": self.p,
                "q": self.q, "dim": self.dim}


def _punctured(dim):
    if dim == 1:
        return IntervalUnion.punctured_line()
    return Annulus.punctured_plane()


@dataclass
class TentProfile(FrequencyProfile):
    """Scale-admissible window: |g_hat(w)|^2 is a tent in u = log|w|
    supported on [log lo, log hi], with peak at the geometric midpoint
    and height 2/log(hi/lo), so that for any w != 0 (of the covered
    sign) the da/a admissibility integral is exactly 1.

    ``sides``: "positive", "negative", or "both" (evaluated at |w|).
    """

    lo: float = 1.0
    hi: float = 4.0
    sides: str = "positive"
    dim: int = 1

    def __post_init__(self):
        if not (0 < self.lo < self.hi):
            raise ConfigError("TentProfile needs 0 < lo < hi")
        if self.dim != 1:
            raise ConfigError("TentProfile is one-dimensional")
        self.u_lo = math.log(self.lo)
        self.u_hi = math.log(self.hi)
        self.u_mid = 0.5 * (self.u_lo + self.u_hi)
        self.half = 0.5 * (self.u_hi - self.u_lo)
        self.height = 2.0 / (self.u_hi - self.u_lo)
        pieces = []
        if self.sides in ("positive", "both"):
            pieces.append((self.lo, self.hi))
        if self.sides in ("negative", "both"):
            pieces.append((-self.hi, -self.lo))
        self.support = IntervalUnion(tuple(pieces))

    def _values(self, pts):
        x = pts[..., 0]
        r = np.abs(x)
        ok = self.support.contains(pts) & (r > 0)
        out = np.zeros_like(r)
        u = np.log(np.where(r > 0, r, 1.0))
        tent = self.height * (1.0 - np.abs(u - self.u_mid) / self.half)
        out[ok] = np.sqrt(np.maximum(tent[ok], 0.0))
        return out

    @property
    def mid(self):
        return math.exp(self.u_mid)

    def edges(self):
        e = (self.lo, self.mid, self.hi)
        return {"axis": {0: e}, "radial": e}

    def norm_sq_closed_form(self):
        # substituting w = e^u, one side integrates to
        # (height/half) (sqrt(hi) - sqrt(lo))^2  by parts
        one_side = (self.height / self.half) * (math.sqrt(self.hi) - math.sqrt(self.lo)) ** 2
        return one_side * (2.0 if self.sides == "both" else 1.0)

    def to_config(self):
        return {"type": "tent", "lo": self.lo, "hi": self.hi, "sides": self.sides}


@dataclass(frozen=True)
class TileSpec:
    region: Region
    prefactor: float = 1.0
    mat: object = None  # k x k array applied on the right, or None
    tag: object = None

    def to_config(self):
        return {"region": self.region.to_config(), "prefactor": self.prefactor,
                "mat": None if self.mat is None else np.asarray(self.mat).tolist(),
                "tag": self.tag}


class TiledProfile(FrequencyProfile):
    """Disjoint tiles, each prefactor * base(w @ mat)."""

    def __init__(self, base, tiles, support=None):
        self.base = base
        self.tiles = tuple(tiles)
        self.dim = base.dim
        self.support = support if support is not None else _punctured(self.dim)

    def _values(self, pts):
        out = np.zeros(pts.shape[0])
        for tile in self.tiles:
            mask = tile.region.contains(pts)
            if not np.any(mask):
                continue
            sub = pts[mask]
            if tile.mat is not None:
                sub = sub @ np.asarray(tile.mat, dtype=float)
            out[mask] = tile.prefactor * self.base(sub).reshape(-1)
        return out

    def edges(self):
        base_edges = self.base.edges()
        axis = {i: set(v) for i, v in base_edges["axis"].items()}
        radial = set(base_edges["radial"])
        for tile in self.tiles:
            te = _region_edges(tile.region)
            for i, vals in te["axis"].items():
                axis.setdefault(i, set()).update(vals)
            radial.update(te["radial"])
            if tile.mat is not None:
                m = np.asarray(tile.mat, dtype=float)
                diag = np.diag(np.diagonal(m))
                if np.allclose(m, diag):
                    for i, vals in base_edges["axis"].items():
                        scale = abs(m[i, i])
                        if scale > 0:
                            axis.setdefault(i, set()).update(v / scale for v in vals)
                gram = m.T @ m
                c2 = gram[0, 0]
                if np.allclose(gram, c2 * np.eye(m.shape[0])) and c2 > 0:
                    c = math.sqrt(c2)
                    radial.update(v / c for v in base_edges["radial"])
        return {"axis": {i: tuple(sorted(v)) for i, v in axis.items()},
                "radial": tuple(sorted(radial))}

    def to_config(self):
        return {"type": "tiled", "base": self.base.to_config(),
                "tiles": [t.to_config() for t in self.tiles],
                "support": self.support.to_config()}


class GridProfile(FrequencyProfile):
    """Samples on a uniform frequency grid, zero outside.

    Lookup requires query points to land on grid nodes (within a
    relative snap tolerance); this is only meaningful for groups whose
    dual action maps the grid into itself (the dyadic group).
    """

    def __init__(self, origin, spacing, samples, snap_tol=1e-9):
        self.samples = np.asarray(samples, dtype=float)
        self.dim = self.samples.ndim
        self.origin = np.atleast_1d(np.asarray(origin, dtype=float))
        self.spacing = np.atleast_1d(np.asarray(spacing, dtype=float))
        self.snap_tol = snap_tol
        lo = self.origin
        hi = self.origin + self.spacing * np.array(self.samples.shape)
        if self.dim == 1:
            self.support = IntervalUnion(((lo[0], hi[0]),))
        else:
            self.support = Box(tuple(IntervalUnion(((lo[i], hi[i]),))
                                     for i in range(self.dim)))

    def _values(self, pts):
        idx_f = (pts - self.origin) / self.spacing
        idx = np.rint(idx_f)
        off_grid = np.max(np.abs(idx_f - idx), axis=-1) > self.snap_tol
        if np.any(off_grid & np.all(np.isfinite(pts), axis=-1)):
            finite = np.all(np.isfinite(pts), axis=-1)
            bad = pts[off_grid & finite]
            inside = self.support.contains(bad)
            if np.any(inside):
                raise ProfileUnevaluable(
                    "grid-backed profile queried off its grid inside the support"
                )
        out = np.zeros(pts.shape[0])
        ok = ~off_grid
        for d in range(self.dim):
            ok &= (idx[:, d] >= 0) & (idx[:, d] < self.samples.shape[d])
        ii = tuple(idx[ok, d].astype(int) for d in range(self.dim))
        out[ok] = self.samples[ii]
        return out

    def to_config(self):
        return {"type": "grid", "origin": self.origin.tolist(),
                "spacing": self.spacing.tolist(),
                "samples": self.samples.tolist()}


def scale_profile(profile, factor):
    """Pointwise scalar multiple of a profile (same support)."""
    if isinstance(profile, IndicatorProfile):
        return IndicatorProfile(profile.region, profile.amplitude * factor)
    if isinstance(profile, TiledProfile):
        tiles = [TileSpec(t.region, t.prefactor * factor, t.mat, t.tag)
                 for t in profile.tiles]
        return TiledProfile(profile.base, tiles, profile.support)
    return _Scaled(profile, factor)


class _Scaled(FrequencyProfile):
    def __init__(self, base, factor):
        self.base = base
        self.factor = factor
        self.dim = base.dim
        self.support = base.support

    def _values(self, pts):
        return self.factor * self.base(pts).reshape(-1)

    def edges(self):
        return self.base.edges()

    def to_config(self):
        return {"type": "scaled", "factor": self.factor,
                "base": self.base.to_config()}


def profile_from_config(cfg):
    kind = cfg.get("type")
    if kind == "indicator":
        return IndicatorProfile(region_from_config(cfg["region"]),
                                float(cfg.get("amplitude", 1.0)))
    if kind == "radial_gaussian":
        return RadialGaussianProfile(float(cfg.get("c", 1.0)),
                                     float(cfg.get("p", 0.0)),
                                     float(cfg.get("q", 1.0)),
                                     int(cfg.get("dim", 1)))
    if kind == "tent":
        return TentProfile(float(cfg["lo"]), float(cfg["hi"]),
                           cfg.get("sides", "positive"))
    if kind == "tiled":
        base = profile_from_config(cfg["base"])
        tiles = [TileSpec(region_from_config(t["region"]),
                          float(t.get("prefactor", 1.0)),
                          None if t.get("mat") is None else np.asarray(t["mat"]),
                          t.get("tag"))
                 for t in cfg["tiles"]]
        support = region_from_config(cfg["support"]) if "support" in cfg else None
        return TiledProfile(base, tiles, support)
    if kind == "grid":
        return GridProfile(cfg["origin"], cfg["spacing"], cfg["samples"])
    if kind == "scaled":
        return _Scaled(profile_from_config(cfg["base"]), float(cfg["factor"]))
    raise ConfigError(f"unknown profile type {kind!r}")
