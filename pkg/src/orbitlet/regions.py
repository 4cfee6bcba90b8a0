"""Frequency-domain regions: supports of wavelet profiles and invariant
subsets of the dual space.

All regions are half-open where it matters ([lo, hi) along axes); the
distinction only affects sets of measure zero.  Points are arrays of
shape (..., k); for k = 1 a trailing axis is optional.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UnsupportedRegion


def as_points(omega, dim):
    om = np.asarray(omega, dtype=float)
    if dim == 1 and om.shape[-1:] != (1,):
        om = om.reshape(om.shape + (1,))
    if om.ndim == 1:
        om = om.reshape(1, -1)
    if om.shape[-1] != dim:
        raise ConfigError(f"points have dimension {om.shape[-1]}, expected {dim}")
    return om


def _norm(pts):
    return np.sqrt(np.sum(pts * pts, axis=-1))


class Region:
    dim = 1

    def contains(self, omega):
        raise NotImplementedError

    def measure(self):
        raise UnsupportedRegion(f"{type(self).__name__} has no closed-form measure")

    def bbox(self):
        raise UnsupportedRegion(f"{type(self).__name__} has no bounding box")

    def axis_edges(self, axis):
        return ()

    def radial_edges(self):
        return ()

    def is_empty(self):
        return False

    def intersect(self, other):
        if isinstance(other, FullSpace):
            return self
        return IntersectionRegion(self, other)


def _normalize_intervals(intervals):
    ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
    merged = []
    for a, b in ivs:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class IntervalUnion(Region):
    """Disjoint union of half-open intervals [lo, hi) on the line."""

    intervals: tuple

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize_intervals(self.intervals))

    dim = 1

    @classmethod
    def line(cls):
        return cls(((-math.inf, math.inf),))

    @classmethod
    def punctured_line(cls):
        return cls(((-math.inf, 0.0), (0.0, math.inf)))

    def contains(self, omega):
        x = as_points(omega, 1)[..., 0]
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x >= a) & (x < b)
        return out

    def contains_value(self, x):
        return any(a <= x < b for a, b in self.intervals)

    def measure(self):
        return float(sum(b - a for a, b in self.intervals))

    def bbox(self):
        if not self.intervals:
            return ((0.0, 0.0),)
        return ((self.intervals[0][0], self.intervals[-1][1]),)

    def axis_edges(self, axis=0):
        out = set()
        for a, b in self.intervals:
            for e in (a, b):
                if math.isfinite(e) and abs(e) > 0:
                    out.add(abs(e))
        return tuple(sorted(out))

    def radial_edges(self):
        return self.axis_edges(0)

    def is_empty(self):
        return not self.intervals

    def intersect(self, other):
        if isinstance(other, IntervalUnion):
            pieces = []
            for a, b in self.intervals:
                for c, d in other.intervals:
                    lo, hi = max(a, c), min(b, d)
                    if hi > lo:
                        pieces.append((lo, hi))
            return IntervalUnion(tuple(pieces))
        if isinstance(other, FullSpace):
            return self
        return IntersectionRegion(self, other)

    def to_config(self):
        return {"type": "intervals", "intervals": [list(iv) for iv in self.intervals]}


@dataclass(frozen=True)
class Annulus(Region):
    """{r_lo <= |omega| < r_hi} in the plane; open at r_lo when
    closed_lo is false (punctured ball/plane)."""

    r_lo: float = 0.0
    r_hi: float = math.inf
    closed_lo: bool = True

    dim = 2

    @classmethod
    def ball(cls, radius):
        return cls(0.0, float(radius), closed_lo=True)

    @classmethod
    def punctured_plane(cls):
        return cls(0.0, math.inf, closed_lo=False)

    def contains(self, omega):
        r = _norm(as_points(omega, 2))
        lo_ok = (r >= self.r_lo) if self.closed_lo else (r > self.r_lo)
        return lo_ok & (r < self.r_hi)

    def measure(self):
        if not math.isfinite(self.r_hi):
            return math.inf
        return math.pi * (self.r_hi ** 2 - self.r_lo ** 2)

    def bbox(self):
        r = self.r_hi
        return ((-r, r), (-r, r))

    def radial_edges(self):
        return tuple(e for e in (self.r_lo, self.r_hi)
                     if math.isfinite(e) and e > 0)

    def is_empty(self):
        return self.r_hi <= self.r_lo

    def intersect(self, other):
        if isinstance(other, Annulus):
            lo = max(self.r_lo, other.r_lo)
            closed = self.closed_lo if lo == self.r_lo else other.closed_lo
            if self.r_lo == other.r_lo:
                closed = self.closed_lo and other.closed_lo
            return Annulus(lo, min(self.r_hi, other.r_hi), closed)
        if isinstance(other, FullSpace):
            return self
        return IntersectionRegion(self, other)

    def to_config(self):
        return {"type": "annulus", "r_lo": self.r_lo,
                "r_hi": None if not math.isfinite(self.r_hi) else self.r_hi,
                "closed_lo": self.closed_lo}


@dataclass(frozen=True)
class Box(Region):
    """Product of per-axis interval unions."""

    axes: tuple  # tuple of IntervalUnion

    @property
    def dim(self):
        return len(self.axes)

    def contains(self, omega):
        pts = as_points(omega, self.dim)
        out = np.ones(pts.shape[:-1], dtype=bool)
        for i, iu in enumerate(self.axes):
            out &= iu.contains(pts[..., i: i + 1])
        return out

    def measure(self):
        m = 1.0
        for iu in self.axes:
            m *= iu.measure()
        return m

    def bbox(self):
        return tuple(iu.bbox()[0] for iu in self.axes)

    def axis_edges(self, axis):
        return self.axes[axis].axis_edges()

    def is_empty(self):
        return any(iu.is_empty() for iu in self.axes)

    def intersect(self, other):
        if isinstance(other, Box) and other.dim == self.dim:
            return Box(tuple(a.intersect(b) for a, b in zip(self.axes, other.axes)))
        if isinstance(other, FullSpace):
            return self
        return IntersectionRegion(self, other)

    def to_config(self):
        return {"type": "box", "axes": [iu.to_config() for iu in self.axes]}


@dataclass(frozen=True)
class FullSpace(Region):
    k: int = 1

    @property
    def dim(self):
        return self.k

    def contains(self, omega):
        pts = as_points(omega, self.dim)
        return np.ones(pts.shape[:-1], dtype=bool)

    def measure(self):
        return math.inf

    def bbox(self):
        return tuple((-math.inf, math.inf) for _ in range(self.dim))

    def intersect(self, other):
        return other

    def to_config(self):
        return {"type": "full", "dim": self.dim}


class IntersectionRegion(Region):
    """Fallback intersection: membership and edges only."""

    def __init__(self, a, b):
        if a.dim != b.dim:
            raise ConfigError("cannot intersect regions of different dimension")
        self.a = a
        self.b = b

    @property
    def dim(self):
        return self.a.dim

    def contains(self, omega):
        return self.a.contains(omega) & self.b.contains(omega)

    def bbox(self):
        out = []
        for (a0, a1), (b0, b1) in zip(self.a.bbox(), self.b.bbox()):
            out.append((max(a0, b0), min(a1, b1)))
        return tuple(out)

    def axis_edges(self, axis):
        return tuple(sorted(set(self.a.axis_edges(axis)) | set(self.b.axis_edges(axis))))

    def radial_edges(self):
        return tuple(sorted(set(self.a.radial_edges()) | set(self.b.radial_edges())))

    def to_config(self):
        return {"type": "intersection",
                "a": self.a.to_config(), "b": self.b.to_config()}


def region_from_config(cfg):
    kind = cfg.get("type")
    if kind == "intervals":
        return IntervalUnion(tuple(tuple(iv) for iv in cfg["intervals"]))
    if kind == "annulus":
        hi = cfg.get("r_hi")
        return Annulus(float(cfg.get("r_lo", 0.0)),
                       math.inf if hi is None else float(hi),
                       bool(cfg.get("closed_lo", True)))
    if kind == "box":
        return Box(tuple(region_from_config(a) for a in cfg["axes"]))
    if kind == "full":
        return FullSpace(int(cfg.get("dim", 1)))
    if kind == "intersection":
        return IntersectionRegion(region_from_config(cfg["a"]),
                                  region_from_config(cfg["b"]))
    raise ConfigError(f"unknown region type {kind!r}")
