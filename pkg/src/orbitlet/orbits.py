"""Dual orbit spaces: stabilizer classification, transversals and cross
sections, the Radon-Nikodym density kappa linking Haar-image orbit
measures to the Lebesgue disintegration, and the quotient measure.

Fixed conventions (they rescale kappa and the quotient measure jointly;
all closed forms below are stated under these):

* open-orbit atoms carry quotient weight 1;
* DYADIC1D uses d(a)/|a| on the transversal +-[1,2), making
  kappa(w) = |w| smooth across tile boundaries;
* DIAGLINE2 uses d(w2) x counting on the sign;
* SE2ROT uses r dr (forced by kappa == 1 for unimodular groups);
* IDENTITY uses Lebesgue measure (every point is its own orbit).

Classification verdicts:

* RC        -- compact stabilizer and locally closed ("regular") orbit;
* C_NOT_RC  -- compact stabilizer, orbit not locally closed;
* NOT_C     -- noncompact stabilizer;
* UNKNOWN   -- the numerical probe for custom charts was inconclusive
               (never returned for catalog groups).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import groups
from .errors import NotRegular, UnsupportedRegion
from .groups import Truncation, dual_act, haar_grid, resolve_chart
from .regions import (
    Annulus,
    Box,
    FullSpace,
    IntervalUnion,
    Region,
    as_points,
)

RC = "RC"
C_NOT_RC = "C_NOT_RC"
NOT_C = "NOT_C"
UNKNOWN = "UNKNOWN"


@dataclass
class Classification:
    verdict: str
    witness: dict = field(default_factory=dict)

    def to_dict(self):
        return {"verdict": self.verdict, "witness": self.witness}


@dataclass(frozen=True)
class QuotientRegion:
    """Subset of the orbit space: named atoms, per-part parameter
    intervals, or (IDENTITY groups) a plain region of representatives."""

    atoms: tuple = ()
    intervals: dict = field(default_factory=dict)  # part name -> ((lo,hi),...)
    region: object = None
    full: bool = False

    @classmethod
    def everything(cls):
        return cls(full=True)


@dataclass(frozen=True)
class QuotientMass:
    value: float
    infinite: bool = False

    def __float__(self):
        return math.inf if self.infinite else self.value


@dataclass(frozen=True)
class Tile:
    """One cell of a quotient tiling: finite mass, a representative
    orbit, and (when expressible) the full-space preimage region."""

    key: tuple
    mass: float
    rep_omega: np.ndarray
    part: str = ""
    param_interval: tuple = None
    preimage: Region = None


@dataclass(frozen=True)
class AtomPart:
    name: str
    rep: tuple
    weight: float = 1.0
    orbit_region: Region = None


@dataclass(frozen=True)
class LinePart:
    """One-parameter piece of the transversal with a density for the
    quotient measure and a closed-form mass."""

    name: str
    lo: float
    hi: float
    embed: callable  # param array -> (..., k) transversal points
    density: callable  # param array -> (...,)
    mass_fn: callable  # (lo, hi) -> float (closed form, inf allowed)
    preimage_fn: callable = None  # (lo, hi) -> Region or None

    def mass(self, lo, hi):
        lo = max(lo, self.lo)
        hi = min(hi, self.hi)
        if hi <= lo:
            return 0.0
        return self.mass_fn(lo, hi)


def _sgn(x):
    return 1.0 if x >= 0 else -1.0


class OrbitAtlas:
    """Base: closed-form orbit data for one catalog group."""

    group_id = None

    def __init__(self, chart):
        self.chart = chart
        self.k = chart.ambient_dim
        self.parts = self._build_parts()

    # -- to implement per group -----------------------------------------
    def _build_parts(self):
        return ()

    def classify(self, omega):
        raise NotImplementedError

    def cross_section_point(self, omega):
        """(transversal point a, chart point of h) with a . h = omega."""
        raise NotImplementedError

    def _kappa_values(self, pts):
        """Raw closed form on (N, k) points, no domain checks."""
        raise NotImplementedError

    def kappa(self, omega):
        self._require_regular(omega)
        pts = as_points(omega, self.k)
        return self._kappa_values(pts.reshape(-1, self.k)).reshape(pts.shape[:-1])

    def kappa_unchecked(self, flat):
        """kappa extended by zero off the regular set (quadrature helper)."""
        flat = np.asarray(flat, dtype=float).reshape(-1, self.k)
        out = np.zeros(flat.shape[0])
        ok = np.asarray(self.regular_region().contains(flat)).reshape(-1)
        ok &= np.all(np.isfinite(flat), axis=-1)
        if np.any(ok):
            out[ok] = self._kappa_values(flat[ok])
        return out

    def thickened_transversal(self):
        raise NotImplementedError

    def regular_region(self):
        raise NotImplementedError

    def irregular_probes(self):
        return ()

    def sample_regular(self, rng, n=1):
        raise NotImplementedError

    def quotient_footprint(self, region):
        raise UnsupportedRegion(
            f"{self.group_id}: cannot project this region to the quotient")

    # -- shared ----------------------------------------------------------
    def _require_regular(self, omega):
        pts = as_points(omega, self.k)
        ok = self.regular_region().contains(pts)
        if not np.all(ok):
            raise NotRegular(f"{self.group_id}: frequency outside the regular set")

    def cross_section(self, omega):
        self._require_regular(omega)
        a, h_point = self.cross_section_point(np.asarray(omega, dtype=float))
        return np.asarray(a, dtype=float), self.chart.element(h_point)

    def region_is_regular(self, region):
        for p in self.irregular_probes():
            if bool(region.contains(np.asarray(p, dtype=float).reshape(1, -1))[0]):
                return False
        return True

    def full_quotient(self):
        intervals = {p.name: ((p.lo, p.hi),) for p in self.parts
                     if isinstance(p, LinePart)}
        atoms = tuple(p.name for p in self.parts if isinstance(p, AtomPart))
        return QuotientRegion(atoms=atoms, intervals=intervals)

    def _resolve_region(self, qregion):
        if qregion is None or (isinstance(qregion, QuotientRegion) and qregion.full):
            return self.full_quotient()
        return qregion

    def quotient_measure(self, qregion):
        qregion = self._resolve_region(qregion)
        total = 0.0
        infinite = False
        by_name = {p.name: p for p in self.parts}
        for name in qregion.atoms:
            total += by_name[name].weight
        for name, ivs in qregion.intervals.items():
            part = by_name[name]
            for lo, hi in ivs:
                m = part.mass(lo, hi)
                if math.isinf(m):
                    infinite = True
                else:
                    total += m
        return QuotientMass(total, infinite)

    def tiles(self, qregion=None, max_tiles=64):
        """Disjoint finite-mass tiles covering the quotient region:
        atoms first, then unit-width strips of the line parts ordered by
        distance from the origin, positive side first."""
        qregion = self._resolve_region(qregion)
        by_name = {p.name: p for p in self.parts}
        out = []
        for name in qregion.atoms:
            part = by_name[name]
            rep = np.asarray(part.rep, dtype=float)
            out.append(Tile(key=("atom", name), mass=part.weight, rep_omega=rep,
                            part=name, preimage=part.orbit_region))
            if len(out) >= max_tiles:
                return out
        line_items = [(name, ivs) for name, ivs in qregion.intervals.items()]
        dist = 0
        while len(out) < max_tiles:
            emitted = False
            for side in (1, -1):
                cand = (dist, dist + 1) if side > 0 else (-(dist + 1), -dist)
                for name, ivs in line_items:
                    part = by_name[name]
                    for lo, hi in ivs:
                        a, b = max(lo, cand[0]), min(hi, cand[1])
                        if b <= a:
                            continue
                        mass = part.mass(a, b)
                        if mass == 0.0:
                            continue
                        mid = 0.5 * (a + b)
                        rep = np.asarray(part.embed(np.array([mid]))[0], dtype=float)
                        pre = part.preimage_fn(a, b) if part.preimage_fn else None
                        out.append(Tile(key=("strip", name, dist, side), mass=mass,
                                        rep_omega=rep, part=name,
                                        param_interval=(a, b), preimage=pre))
                        emitted = True
                        if len(out) >= max_tiles:
                            return out
            dist += 1
            if not emitted and dist > 1:
                done = all(
                    all(hi <= dist and lo >= -dist for lo, hi in ivs)
                    for _, ivs in line_items
                )
                if done:
                    break
            if not line_items:
                break
        return out

    def probe_points(self, qregion=None, n_orbits=64, rng=None, span=(1e-2, 1e2)):
        """Transversal representatives: atoms plus log-spaced points
        along each line part (clipped to the part footprint)."""
        qregion = self._resolve_region(qregion)
        by_name = {p.name: p for p in self.parts}
        pts = [np.asarray(by_name[n].rep, dtype=float) for n in qregion.atoms]
        line_items = list(qregion.intervals.items())
        if line_items:
            per = max(1, (n_orbits - len(pts)) // max(1, len(line_items)))
            for name, ivs in line_items:
                part = by_name[name]
                for lo, hi in ivs:
                    lo_c = max(lo, -span[1])
                    hi_c = min(hi, span[1])
                    if hi_c <= lo_c:
                        continue
                    # log-spaced magnitudes where the range allows, else linear
                    if lo_c > 0:
                        u = np.geomspace(max(lo_c, span[0]), hi_c, per)
                    elif hi_c < 0:
                        u = -np.geomspace(max(-hi_c, span[0]), -lo_c, per)
                    else:
                        u = np.linspace(lo_c, hi_c, per + 2)[1:-1]
                    for val in u:
                        pts.append(np.asarray(part.embed(np.array([val]))[0]))
        return np.array(pts) if pts else np.zeros((0, self.k))

    def block_knots(self, edges, omega):
        """Map profile support edges to per-block chart knots for the
        orbit integrals at frequency omega."""
        return {}


# ----------------------------------------------------------------------
# concrete atlases


def _log_knots(edges, magnitude):
    out = set()
    if magnitude <= 0 or not math.isfinite(magnitude):
        return ()
    for e in edges:
        if e > 0 and math.isfinite(e):
            out.add(math.log(e / magnitude))
    return tuple(sorted(out))


class _IdentityAtlas(OrbitAtlas):
    def __init__(self, chart):
        self.group_id = chart.catalog_id
        super().__init__(chart)

    def _build_parts(self):
        return ()

    def classify(self, omega):
        return Classification(RC, {"method": "closed-form",
                                   "note": "trivial group, every point fixed"})

    def cross_section_point(self, omega):
        return np.atleast_1d(np.asarray(omega, dtype=float)), ()

    def _kappa_values(self, pts):
        return np.ones(pts.shape[0])

    def thickened_transversal(self):
        return FullSpace(self.k)

    def regular_region(self):
        return FullSpace(self.k)

    def sample_regular(self, rng, n=1):
        return rng.normal(size=(n, self.k))

    def quotient_footprint(self, region):
        return QuotientRegion(region=region)

    def quotient_measure(self, qregion):
        if qregion is None or qregion.full:
            return QuotientMass(math.inf, True)
        region = qregion.region
        m = region.measure()
        return QuotientMass(0.0 if math.isinf(m) else m, math.isinf(m))

    def tiles(self, qregion=None, max_tiles=64):
        if qregion is None or qregion.full or qregion.region is None:
            raise UnsupportedRegion("IDENTITY: tiles need a concrete region")
        region = qregion.region
        m = region.measure()
        if math.isinf(m):
            raise UnsupportedRegion("IDENTITY: cannot tile an infinite region")
        bb = region.bbox()
        rep = np.array([0.5 * (lo + hi) for lo, hi in bb])
        if not bool(region.contains(rep.reshape(1, -1))[0]):
            raise UnsupportedRegion("IDENTITY: no obvious representative")
        return [Tile(key=("region",), mass=m, rep_omega=rep, preimage=region)]

    def probe_points(self, qregion=None, n_orbits=64, rng=None, span=(1e-2, 1e2)):
        rng = rng or np.random.default_rng(0)
        if qregion is not None and qregion.region is not None:
            bb = qregion.region.bbox()
            pts = []
            while len(pts) < n_orbits:
                cand = np.array([rng.uniform(max(lo, -span[1]), min(hi, span[1]))
                                 for lo, hi in bb])
                if bool(qregion.region.contains(cand.reshape(1, -1))[0]):
                    pts.append(cand)
            return np.array(pts)
        return self.sample_regular(rng, n_orbits)


class _ScalarLineAtlas(OrbitAtlas):
    """Shared logic for the 1-D scalar dilation groups."""

    def _kappa_values(self, pts):
        return np.abs(pts[:, 0])

    def regular_region(self):
        return IntervalUnion.punctured_line()

    def irregular_probes(self):
        return ((0.0,),)

    def block_knots(self, edges, omega):
        mag = abs(float(np.atleast_1d(np.asarray(omega, float)).reshape(-1)[0]))
        e = set(edges["axis"].get(0, ())) | set(edges["radial"])
        kn = _log_knots(e, mag)
        return {0: kn} if kn else {}


class _AffinePlusAtlas(_ScalarLineAtlas):
    group_id = groups.AFFINE1D_PLUS

    def _build_parts(self):
        return (
            AtomPart("pos", (1.0,), 1.0, IntervalUnion(((0.0, math.inf),))),
            AtomPart("neg", (-1.0,), 1.0, IntervalUnion(((-math.inf, 0.0),))),
        )

    def classify(self, omega):
        x = float(np.atleast_1d(np.asarray(omega, float)).reshape(-1)[0])
        if x == 0.0:
            return Classification(NOT_C, {"method": "closed-form",
                                          "note": "stabilizer is all of H"})
        return Classification(RC, {"method": "closed-form",
                                   "note": "open half-line orbit, trivial stabilizer"})

    def cross_section_point(self, omega):
        x = float(np.atleast_1d(omega).reshape(-1)[0])
        return np.array([_sgn(x)]), (math.log(abs(x)),)

    def thickened_transversal(self):
        return IntervalUnion(((1.0, 2.0), (-2.0, -1.0)))

    def sample_regular(self, rng, n=1):
        mag = np.exp(rng.uniform(-3, 3, size=n))
        sign = rng.choice([-1.0, 1.0], size=n)
        return (sign * mag).reshape(n, 1)

    def quotient_footprint(self, region):
        atoms = []
        for part in self.parts:
            probe = part.rep[0]
            hits = False
            if isinstance(region, FullSpace):
                hits = True
            elif isinstance(region, IntervalUnion):
                side = IntervalUnion(((0.0, math.inf),)) if probe > 0 \
                    else IntervalUnion(((-math.inf, 0.0),))
                hits = not region.intersect(side).is_empty()
            else:
                raise UnsupportedRegion("AFFINE1D_PLUS: unsupported region type")
            if hits:
                atoms.append(part.name)
        return QuotientRegion(atoms=tuple(atoms))


class _AffineFullAtlas(_ScalarLineAtlas):
    group_id = groups.AFFINE1D_FULL

    def _build_parts(self):
        return (AtomPart("line", (1.0,), 1.0, IntervalUnion.punctured_line()),)

    def classify(self, omega):
        x = float(np.atleast_1d(omega).reshape(-1)[0])
        if x == 0.0:
            return Classification(NOT_C, {"method": "closed-form",
                                          "note": "stabilizer is all of H"})
        return Classification(RC, {"method": "closed-form",
                                   "note": "single open orbit, trivial stabilizer"})

    def cross_section_point(self, omega):
        x = float(np.atleast_1d(omega).reshape(-1)[0])
        return np.array([1.0]), (math.log(abs(x)), 0.0 if x > 0 else 1.0)

    def thickened_transversal(self):
        return IntervalUnion(((1.0, 2.0),))

    def sample_regular(self, rng, n=1):
        mag = np.exp(rng.uniform(-3, 3, size=n))
        sign = rng.choice([-1.0, 1.0], size=n)
        return (sign * mag).reshape(n, 1)

    def quotient_footprint(self, region):
        if isinstance(region, FullSpace):
            return QuotientRegion(atoms=("line",))
        if isinstance(region, IntervalUnion):
            if region.is_empty():
                return QuotientRegion()
            return QuotientRegion(atoms=("line",))
        raise UnsupportedRegion("AFFINE1D_FULL: unsupported region type")


class _DyadicAtlas(_ScalarLineAtlas):
    group_id = groups.DYADIC1D

    def _build_parts(self):
        def embed_pos(u):
            u = np.asarray(u, dtype=float)
            return u.reshape(u.shape + (1,))

        def embed_neg(u):
            u = np.asarray(u, dtype=float)
            return (-u).reshape(u.shape + (1,))

        def density(u):
            return 1.0 / np.abs(np.asarray(u, dtype=float))

        def mass(lo, hi):
            return math.log(hi / lo)

        return (
            LinePart("pos", 1.0, 2.0, embed_pos, density, mass),
            LinePart("neg", 1.0, 2.0, embed_neg, density, mass),
        )

    def classify(self, omega):
        x = float(np.atleast_1d(omega).reshape(-1)[0])
        if x == 0.0:
            return Classification(NOT_C, {"method": "closed-form",
                                          "note": "stabilizer is all of H"})
        return Classification(RC, {"method": "closed-form",
                                   "note": "discrete orbit, locally closed away from 0"})

    def cross_section_point(self, omega):
        x = float(np.atleast_1d(omega).reshape(-1)[0])
        m, e = math.frexp(abs(x))  # |x| = m * 2^e with m in [0.5, 1)
        return np.array([_sgn(x) * (2.0 * m)]), (float(e - 1),)

    def thickened_transversal(self):
        # discrete group: the identity neighborhood is {identity}
        return IntervalUnion(((1.0, 2.0), (-2.0, -1.0)))

    def sample_regular(self, rng, n=1):
        mag = np.exp(rng.uniform(-3, 3, size=n))
        sign = rng.choice([-1.0, 1.0], size=n)
        return (sign * mag).reshape(n, 1)

    def quotient_footprint(self, region):
        intervals = {}
        pos = IntervalUnion(((0.0, math.inf),))
        neg = IntervalUnion(((-math.inf, 0.0),))
        if isinstance(region, FullSpace):
            touched = {"pos": True, "neg": True}
        elif isinstance(region, IntervalUnion):
            touched = {"pos": not region.intersect(pos).is_empty(),
                       "neg": not region.intersect(neg).is_empty()}
        else:
            raise UnsupportedRegion("DYADIC1D: unsupported region type")
        for part in self.parts:
            if touched[part.name]:
                intervals[part.name] = ((part.lo, part.hi),)
        return QuotientRegion(intervals=intervals)

    def block_knots(self, edges, omega):
        return {}


class _Sim2Atlas(OrbitAtlas):
    group_id = groups.SIM2

    def _build_parts(self):
        return (AtomPart("plane", (1.0, 0.0), 1.0, Annulus.punctured_plane()),)

    def classify(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        if np.all(om == 0.0):
            return Classification(NOT_C, {"method": "closed-form",
                                          "note": "stabilizer is all of H"})
        return Classification(RC, {"method": "closed-form",
                                   "note": "single open orbit, trivial stabilizer"})

    def cross_section_point(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        r = math.hypot(om[0], om[1])
        phi = math.atan2(om[1], om[0])
        theta = (-phi) % groups.TWO_PI
        return np.array([1.0, 0.0]), (math.log(r), theta)

    def _kappa_values(self, pts):
        return np.sum(pts * pts, axis=-1)

    def thickened_transversal(self):
        return Annulus(1.0, 2.0)

    def regular_region(self):
        return Annulus.punctured_plane()

    def irregular_probes(self):
        return ((0.0, 0.0),)

    def sample_regular(self, rng, n=1):
        r = np.exp(rng.uniform(-3, 3, size=n))
        phi = rng.uniform(0, groups.TWO_PI, size=n)
        return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)

    def quotient_footprint(self, region):
        if region.is_empty():
            return QuotientRegion()
        return QuotientRegion(atoms=("plane",))

    def block_knots(self, edges, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        kn = _log_knots(set(edges["radial"]), math.hypot(om[0], om[1]))
        return {0: kn} if kn else {}


class _Diag2Atlas(OrbitAtlas):
    group_id = groups.DIAG2

    def _build_parts(self):
        parts = []
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                name = f"q{'p' if s1 > 0 else 'm'}{'p' if s2 > 0 else 'm'}"
                region = Box((
                    IntervalUnion(((0.0, math.inf),) if s1 > 0 else ((-math.inf, 0.0),)),
                    IntervalUnion(((0.0, math.inf),) if s2 > 0 else ((-math.inf, 0.0),)),
                ))
                parts.append(AtomPart(name, (s1, s2), 1.0, region))
        return tuple(parts)

    def classify(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        if om[0] != 0.0 and om[1] != 0.0:
            return Classification(RC, {"method": "closed-form",
                                       "note": "open quadrant orbit"})
        return Classification(NOT_C, {"method": "closed-form",
                                      "note": "a coordinate stabilizer is noncompact"})

    def cross_section_point(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        return (np.array([_sgn(om[0]), _sgn(om[1])]),
                (math.log(abs(om[0])), math.log(abs(om[1]))))

    def _kappa_values(self, pts):
        return np.abs(pts[:, 0] * pts[:, 1])

    def thickened_transversal(self):
        iu = IntervalUnion(((1.0, 2.0), (-2.0, -1.0)))
        return Box((iu, iu))

    def regular_region(self):
        pl = IntervalUnion.punctured_line()
        return Box((pl, pl))

    def irregular_probes(self):
        return ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))

    def sample_regular(self, rng, n=1):
        mags = np.exp(rng.uniform(-3, 3, size=(n, 2)))
        signs = rng.choice([-1.0, 1.0], size=(n, 2))
        return mags * signs

    def quotient_footprint(self, region):
        atoms = []
        for part in self.parts:
            if isinstance(region, FullSpace):
                atoms.append(part.name)
                continue
            if isinstance(region, Box):
                ok = True
                for axis, s in enumerate(part.rep):
                    side = IntervalUnion(((0.0, math.inf),) if s > 0
                                         else ((-math.inf, 0.0),))
                    if region.axes[axis].intersect(side).is_empty():
                        ok = False
                if ok:
                    atoms.append(part.name)
                continue
            raise UnsupportedRegion("DIAG2: unsupported region type")
        return QuotientRegion(atoms=tuple(atoms))

    def block_knots(self, edges, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        out = {}
        for axis in (0, 1):
            kn = _log_knots(set(edges["axis"].get(axis, ())), abs(om[axis]))
            if kn:
                out[axis] = kn
        return out


class _DiagLine2Atlas(OrbitAtlas):
    group_id = groups.DIAGLINE2

    def _build_parts(self):
        def make(sign):
            def embed(u):
                u = np.asarray(u, dtype=float)
                out = np.empty(u.shape + (2,))
                out[..., 0] = sign
                out[..., 1] = u
                return out

            def preimage(lo, hi):
                half = IntervalUnion(((0.0, math.inf),) if sign > 0
                                     else ((-math.inf, 0.0),))
                return Box((half, IntervalUnion(((lo, hi),))))

            return LinePart(f"{'pos' if sign > 0 else 'neg'}", -math.inf, math.inf,
                            embed, lambda u: np.ones_like(np.asarray(u, float)),
                            lambda lo, hi: hi - lo, preimage)

        return (make(1.0), make(-1.0))

    def classify(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        if om[0] != 0.0:
            return Classification(RC, {"method": "closed-form",
                                       "note": "open half-line orbit"})
        return Classification(NOT_C, {"method": "closed-form",
                                      "note": "fixed point of the scale action"})

    def cross_section_point(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        return np.array([_sgn(om[0]), om[1]]), (math.log(abs(om[0])),)

    def _kappa_values(self, pts):
        return np.abs(pts[:, 0])

    def thickened_transversal(self):
        return Box((IntervalUnion(((1.0, 2.0), (-2.0, -1.0))), IntervalUnion.line()))

    def regular_region(self):
        return Box((IntervalUnion.punctured_line(), IntervalUnion.line()))

    def irregular_probes(self):
        return ((0.0, 0.0), (0.0, 1.0), (0.0, -1.0))

    def sample_regular(self, rng, n=1):
        mag = np.exp(rng.uniform(-3, 3, size=n))
        sign = rng.choice([-1.0, 1.0], size=n)
        c = rng.normal(scale=2.0, size=n)
        return np.stack([sign * mag, c], axis=-1)

    def quotient_footprint(self, region):
        if isinstance(region, FullSpace):
            return QuotientRegion(intervals={
                "pos": ((-math.inf, math.inf),), "neg": ((-math.inf, math.inf),)})
        if isinstance(region, Box):
            out = {}
            for part, side in (("pos", IntervalUnion(((0.0, math.inf),))),
                               ("neg", IntervalUnion(((-math.inf, 0.0),)))):
                if not region.axes[0].intersect(side).is_empty():
                    out[part] = tuple(region.axes[1].intervals)
            return QuotientRegion(intervals=out)
        raise UnsupportedRegion("DIAGLINE2: unsupported region type")

    def block_knots(self, edges, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        kn = _log_knots(set(edges["axis"].get(0, ())), abs(om[0]))
        return {0: kn} if kn else {}


class _Se2RotAtlas(OrbitAtlas):
    group_id = groups.SE2ROT

    def _build_parts(self):
        def embed(u):
            u = np.asarray(u, dtype=float)
            out = np.zeros(u.shape + (2,))
            out[..., 0] = u
            return out

        def preimage(lo, hi):
            return Annulus(lo, hi, closed_lo=lo > 0.0)

        return (LinePart("radius", 0.0, math.inf, embed,
                         lambda u: np.asarray(u, dtype=float),
                         lambda lo, hi: 0.5 * (hi * hi - lo * lo),
                         preimage),)

    def classify(self, omega):
        return Classification(RC, {"method": "closed-form",
                                   "note": "compact group: circles are closed orbits"})

    def cross_section_point(self, omega):
        om = np.asarray(omega, dtype=float).reshape(-1)
        r = math.hypot(om[0], om[1])
        if r == 0.0:
            return np.zeros(2), (0.0,)
        theta = (-math.atan2(om[1], om[0])) % groups.TWO_PI
        return np.array([r, 0.0]), (theta,)

    def _kappa_values(self, pts):
        return np.ones(pts.shape[0])

    def thickened_transversal(self):
        return Annulus.punctured_plane()

    def regular_region(self):
        return FullSpace(2)

    def sample_regular(self, rng, n=1):
        r = np.exp(rng.uniform(-3, 3, size=n))
        phi = rng.uniform(0, groups.TWO_PI, size=n)
        return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)

    def quotient_footprint(self, region):
        if isinstance(region, FullSpace):
            return QuotientRegion(intervals={"radius": ((0.0, math.inf),)})
        if isinstance(region, Annulus):
            if region.is_empty():
                return QuotientRegion()
            return QuotientRegion(intervals={"radius": ((region.r_lo, region.r_hi),)})
        raise UnsupportedRegion("SE2ROT: unsupported region type")


_ATLAS_TYPES = {
    groups.IDENTITY1: _IdentityAtlas,
    groups.IDENTITY2: _IdentityAtlas,
    groups.AFFINE1D_PLUS: _AffinePlusAtlas,
    groups.AFFINE1D_FULL: _AffineFullAtlas,
    groups.DYADIC1D: _DyadicAtlas,
    groups.SIM2: _Sim2Atlas,
    groups.DIAG2: _Diag2Atlas,
    groups.DIAGLINE2: _DiagLine2Atlas,
    groups.SE2ROT: _Se2RotAtlas,
}

_ATLAS_CACHE = {}


def atlas(group):
    """Closed-form atlas for a catalog group (SL2Z_DYADIC has none)."""
    chart = resolve_chart(group)
    gid = chart.catalog_id
    if gid not in _ATLAS_TYPES:
        raise UnsupportedRegion(
            f"group {chart.name} has no closed-form orbit atlas")
    if gid not in _ATLAS_CACHE:
        _ATLAS_CACHE[gid] = _ATLAS_TYPES[gid](chart)
    return _ATLAS_CACHE[gid]


def has_atlas(group):
    chart = resolve_chart(group)
    return chart.catalog_id in _ATLAS_TYPES


# ----------------------------------------------------------------------
# module-level operations


def _classify_sl2z(omega):
    om = np.asarray(omega, dtype=float).reshape(-1)
    if np.all(om == 0.0):
        return Classification(NOT_C, {"method": "closed-form",
                                      "note": "stabilizer is all of H"})
    w1, w2 = float(om[0]), float(om[1])
    if w2 == 0.0 or w1 == 0.0:
        return Classification(NOT_C, {"method": "closed-form",
                                      "note": "axis point: noncompact stabilizer"})
    ratio = w1 / w2
    approx = Fraction(ratio).limit_denominator(10 ** 4)
    resid = abs(ratio - float(approx))
    if resid <= 1e-9 * max(1.0, abs(ratio)):
        return Classification(NOT_C, {
            "method": "continued-fraction", "ratio": ratio,
            "rational_witness": f"{approx.numerator}/{approx.denominator}",
            "residual": resid})
    return Classification(C_NOT_RC, {
        "method": "continued-fraction", "ratio": ratio,
        "best_denominator_1e4_residual": resid,
        "note": "finite stabilizer but no locally closed orbit"})


def default_epsilon_schedule(omega):
    scale = float(np.linalg.norm(np.atleast_1d(np.asarray(omega, dtype=float))))
    if scale == 0.0:
        scale = 1.0
    return (1e-2 * scale, 1e-1 * scale, 1.0 * scale)


def _generic_classify(chart, omega, schedule):
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.all(om == 0.0):
        verdict = RC if chart.is_compact else NOT_C
        return Classification(verdict, {"method": "origin-shortcircuit"})
    if chart.is_compact:
        return Classification(RC, {"method": "compact-group"})
    schedule = schedule or default_epsilon_schedule(om)
    nodes = 40
    for eps in schedule:
        half = 4.0
        grid = haar_grid(chart, groups.default_truncation(chart, half, 8), nodes)
        mats = chart.embed(grid.points)
        moved = np.einsum("i,nij->nj", om, mats)
        hits = grid.points[np.linalg.norm(moved - om, axis=-1) <= eps]
        hit_box = (hits.min(axis=0), hits.max(axis=0)) if len(hits) else None
        ok = True
        for _ in range(3):
            half *= 2.0
            grid = haar_grid(chart, groups.default_truncation(chart, half, 8), nodes)
            mats = chart.embed(grid.points)
            moved = np.einsum("i,nij->nj", om, mats)
            new_hits = grid.points[np.linalg.norm(moved - om, axis=-1) <= eps]
            if len(new_hits):
                if hit_box is None:
                    ok = False
                    break
                margin = 1e-9 + 0.25 * (hit_box[1] - hit_box[0] + 1.0)
                outside = np.any((new_hits < hit_box[0] - margin)
                                 | (new_hits > hit_box[1] + margin), axis=-1)
                if np.any(outside):
                    ok = False
                    break
        if ok:
            return Classification(RC, {"method": "epsilon-probe", "epsilon": eps})
    return Classification(UNKNOWN, {"method": "epsilon-probe",
                                    "schedule": list(schedule)})


def classify_point(group, omega, epsilon_schedule=None):
    """Orbit/stabilizer classification of a dual point."""
    chart = resolve_chart(group)
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if om.shape != (chart.ambient_dim,):
        raise groups.DimensionMismatch(
            f"point has shape {om.shape}, expected ({chart.ambient_dim},)")
    if chart.catalog_id == groups.SL2Z_DYADIC:
        return _classify_sl2z(om)
    if has_atlas(chart):
        return atlas(chart).classify(om)
    return _generic_classify(chart, om, epsilon_schedule)


def cross_section(group, omega):
    return atlas(group).cross_section(omega)


def kappa(group, omega):
    """Radon-Nikodym density of the Lebesgue orbit measures against the
    Haar-image measures, under the fixed quotient conventions."""
    return atlas(group).kappa(omega)


def quotient_measure(group, region=None):
    return atlas(group).quotient_measure(region)


def verify_semi_invariance(group, n_samples=1000, seed=0, samples=None):
    """max |kappa(w h) Delta_G(h) - kappa(w)| / kappa(w) over samples."""
    at = atlas(group)
    chart = at.chart
    if samples is None:
        rng = np.random.default_rng(seed)
        omegas = at.sample_regular(rng, n_samples)
        points = [chart.random_point(rng) for _ in range(n_samples)]
        samples = list(zip(omegas, points))
    worst = 0.0
    for om, pt in samples:
        g = chart.element(pt)
        k0 = float(np.asarray(at.kappa(np.asarray(om).reshape(1, -1)))[0])
        moved = dual_act(np.asarray(om, dtype=float).reshape(1, -1), g)
        k1 = float(np.asarray(at.kappa(moved))[0])
        worst = max(worst, abs(k1 * g.delta_g - k0) / k0)
    return worst


def _lebesgue_integral(f, k, half_width, nodes):
    axes = [np.linspace(-half_width, half_width, nodes, endpoint=False)
            + half_width / nodes for _ in range(k)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    cell = (2.0 * half_width / nodes) ** k
    return float(np.sum(f(pts)) * cell)


def verify_disintegration(group, f, half_width=8.0, nodes=None, trunc=None,
                          haar_nodes=None):
    """Relative gap between the direct Lebesgue integral of f and the
    iterated orbit-then-quotient integral (with the kappa weight)."""
    at = atlas(group)
    chart = at.chart
    k = chart.ambient_dim
    nodes = nodes or (2048 if k == 1 else 512)
    direct = _lebesgue_integral(f, k, half_width, nodes)

    trunc = trunc or groups.default_truncation(chart, 14.0, 40)
    haar_nodes = haar_nodes or (4096 if len(chart.blocks) <= 1 else 512)
    grid = haar_grid(chart, trunc, haar_nodes)
    mats = chart.embed(grid.points)

    def orbit_values(reps):
        pts = np.einsum("mi,nij->mnj", reps, mats)
        flat = pts.reshape(-1, k)
        vals = np.asarray(f(flat), dtype=float) * np.asarray(at.kappa_unchecked(flat))
        return vals.reshape(len(reps), -1) @ grid.weights

    iterated = 0.0
    for part in at.parts:
        if isinstance(part, AtomPart):
            rep = np.asarray(part.rep, dtype=float).reshape(1, k)
            iterated += part.weight * float(orbit_values(rep)[0])
        else:
            lo = max(part.lo, -4.0 * half_width)
            hi = min(part.hi, 4.0 * half_width)
            m = 512
            u = np.linspace(lo, hi, m, endpoint=False) + (hi - lo) / (2 * m)
            reps = part.embed(u).reshape(m, k)
            inner = orbit_values(reps)
            iterated += float(np.sum(inner * part.density(u)) * (hi - lo) / m)

    denom = max(abs(direct), 1e-300)
    return abs(direct - iterated) / denom
