"""Coefficient embedding, companion dynamics, and fundamental-domain geometry.

The fundamental domain F = {sum_{h>=1} B^{-h} phi(a_h)} is handled through
three representations:

* exact integer-scaled points: a vector x is carried as (coords, D) with
  x = coords / D, coords integer.  The step x -> B x - phi(a) stays integer,
  so membership queries memoize perfectly;
* a depth-v point cloud (numpy) for rasterization and box counting;
* a viability test: digit a is "unrefuted" at x with budget r if some
  depth-r digit continuation of B x - phi(a) stays inside the pruning ball.
  The budget is chosen so refutation resolves distances ~ |det B|^{-v},
  the natural tube width at depth v.  Membership is tri-state
  (inside / outside / boundary_band); ambiguity is never silently resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .numsys import NumberSystem
from .polycore import ModulusContext, Residue, bareiss_det

FLOAT_SCALE_BITS = 48  # float inputs are snapped to this dyadic lattice


@dataclass(frozen=True)
class TileParams:
    """Knobs for membership/rasterization; depth is the paper-facing v."""

    depth: int = 12
    grid: int = 512
    bounding_radius: Optional[float] = None
    lookahead: Optional[int] = None
    samples_per_axis: int = 5
    c_u: float = 1.0


@dataclass(frozen=True)
class TileResult:
    status: str  # "inside" | "outside" | "boundary_band"
    digits: tuple[int, ...]


def embed_phi(r: Residue) -> tuple[int, ...]:
    """Canonical coefficient vector of a residue (exact integers)."""
    return r.coeff_vector()


def _mat_vec(m: Sequence[Sequence[int]], v: Sequence) -> tuple:
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _identity(n: int):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _adjugate(m: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(m)
    if n == 1:
        return ((1,),)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [m[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * bareiss_det(minor)
    return tuple(tuple(row) for row in adj)


def _mat_pow(m, k: int):
    result = _identity(len(m))
    base = m
    while k:
        if k & 1:
            result = _mat_mul(result, base)
        base = _mat_mul(base, base)
        k >>= 1
    return result


def apply_power(x: Sequence, h: int, ctx: ModulusContext) -> tuple[float, ...]:
    """B^h x with B the companion matrix; negative powers via the exact
    adjugate (adj^m / det^m over rationals), presented as floats."""
    b = ctx.companion
    if h >= 0:
        vec = tuple(Fraction(v) if not isinstance(v, int) else v for v in x)
        out = _mat_vec(_mat_pow(b, h), vec)
        return tuple(float(v) for v in out)
    m = -h
    det = bareiss_det(b)
    adj = _adjugate(b)
    num = _mat_vec(_mat_pow(adj, m), tuple(Fraction(v) for v in x))
    scale = Fraction(det) ** m
    return tuple(float(v / scale) for v in num)


class TileGeometry:
    """Everything membership needs, cached per (p, digit set)."""

    def __init__(self, ns: NumberSystem):
        self.ns = ns
        ctx = ns.ctx
        self.n = ctx.n
        self.B = ctx.companion
        self.det = bareiss_det(self.B)
        if self.det == 0:
            raise ValueError("companion matrix is singular")
        self.abs_det = abs(self.det)
        self.adj = _adjugate(self.B)
        prod = _mat_mul(self.B, self.adj)
        assert prod == tuple(
            tuple(self.det * int(i == j) for j in range(self.n)) for i in range(self.n)
        ), "adjugate identity failed"
        self.phi = {a: ns.ctx.residue(a).coeff_vector() for a in ns.digits}
        self.min_beta = ctx.min_root_abs
        if self.min_beta <= 1.0:
            raise ValueError("tile geometry requires all roots outside the unit circle")

        binv = np.array(self.adj, dtype=float) / float(self.det)
        self.binv_np = binv
        max_phi = max(math.sqrt(sum(c * c for c in v)) for v in self.phi.values())
        max_phi = max(max_phi, 1e-12)
        # IFS tail: rho = sum_h ||B^-h|| * max ||phi(a)||, truncated when the
        # remaining geometric tail drops below 1e-6, then inflated 10%
        acc = 0.0
        power = np.eye(self.n)
        ratio = 1.0 / self.min_beta
        for _ in range(2048):
            power = power @ binv
            term = float(np.linalg.norm(power, 2))
            acc += term
            if term * ratio / (1.0 - ratio) < 1e-6:
                break
        self.rho_ifs = 1.1 * acc * max_phi
        self.rho_prune = self.rho_ifs

        # tighter empirical extent for lattice-candidate searches
        ext_depth = max(3, min(10, int(math.log(200_000) / math.log(len(ns.digits)))))
        pts = self._cloud(ext_depth)
        tail = float(np.linalg.norm(np.linalg.matrix_power(binv, ext_depth), 2)) * self.rho_ifs
        self.sup_extent = float(np.max(np.abs(pts))) + tail + 1e-9
        self.rho_search = min(self.rho_ifs, math.hypot(*([self.sup_extent] * self.n)) * 1.02)
        # memo: (coords, D) -> [max budget proven viable, min budget proven refuted]
        self._memo: dict[tuple, list] = {}

    def _cloud(self, depth: int) -> np.ndarray:
        pts = np.zeros((1, self.n))
        shifts = np.array([self.phi[a] for a in self.ns.digits], dtype=float)
        for _ in range(depth):
            pts = (pts[:, None, :] + shifts[None, :, :]).reshape(-1, self.n) @ self.binv_np.T
            if len(pts) > 4_000_000:
                raise ValueError("tile cloud budget exceeded; lower the depth")
            pts = np.unique(np.round(pts, 12), axis=0)
        return pts

    def cloud(self, depth: int) -> np.ndarray:
        """Depth-v tile points sum_{h=1..v} B^{-h} phi(a_h), deduplicated, lex order."""
        return self._cloud(depth)

    def lookahead_for(self, depth: int) -> int:
        """Refutation budget resolving the depth-v tube width |det|^{-v}."""
        if depth <= 0:
            return 0
        target = depth * math.log(self.abs_det) + math.log(2.0 * self.rho_prune + 1.0)
        return max(depth, math.ceil(target / math.log(self.min_beta)))

    def unrefuted(self, coords: tuple[int, ...], scale: int, budget: int) -> bool:
        """True unless every depth-budget digit continuation leaves the ball."""
        norm2 = sum(c * c for c in coords)
        if norm2 > int(self.rho_prune * self.rho_prune * scale * scale):
            return False
        if budget <= 0:
            return True
        key = (coords, scale)
        entry = self._memo.get(key)
        if entry is not None:
            if entry[0] >= budget:
                return True
            if entry[1] <= budget:
                return False
        else:
            if len(self._memo) > 4_000_000:
                self._memo.clear()
            entry = [-1, math.inf]
            self._memo[key] = entry
        ok = False
        base = _mat_vec(self.B, coords)
        for a in self.ns.digits:
            child = tuple(base[i] - self.phi[a][i] * scale for i in range(self.n))
            if self.unrefuted(child, scale, budget - 1):
                ok = True
                break
        if ok:
            entry[0] = max(entry[0], budget)
        else:
            entry[1] = min(entry[1], budget)
        return ok

    def digit_candidates(self, coords: tuple[int, ...], scale: int, budget: int) -> list[int]:
        base = _mat_vec(self.B, coords)
        out = []
        for a in self.ns.digits:
            child = tuple(base[i] - self.phi[a][i] * scale for i in range(self.n))
            if self.unrefuted(child, scale, budget):
                out.append(a)
        return out


_GEOMETRY_CACHE: dict[tuple, TileGeometry] = {}


def tile_geometry(ns: NumberSystem) -> TileGeometry:
    key = (ns.ctx.p, ns.digits)
    geom = _GEOMETRY_CACHE.get(key)
    if geom is None:
        geom = _GEOMETRY_CACHE[key] = TileGeometry(ns)
    return geom


def _scaled_coords(x: Sequence, n: int) -> tuple[tuple[int, ...], int]:
    """Carry x as integer coords over a common denominator."""
    if len(x) != n:
        raise ValueError(f"expected a length-{n} vector")
    if all(isinstance(v, int) for v in x):
        return tuple(x), 1
    if all(isinstance(v, (int, Fraction)) for v in x):
        den = 1
        for v in x:
            if isinstance(v, Fraction):
                den = den * v.denominator // math.gcd(den, v.denominator)
        return tuple(int(v * den) for v in x), den
    scale = 1 << FLOAT_SCALE_BITS
    return tuple(round(float(v) * scale) for v in x), scale


def tile_membership(
    x: Sequence, ns: NumberSystem, params: Optional[TileParams] = None
) -> TileResult:
    """Tri-state membership of x in the fundamental domain, with the digit
    string extracted up to depth v.

    At each step the viable first digits of the current point are computed
    by lookahead refutation; none -> outside, several -> boundary_band,
    exactly one -> descend.  Surviving all v steps means every point of the
    orbit stayed within resolution |det|^{-v} of the tile: inside.
    """
    params = params or TileParams()
    geom = tile_geometry(ns)
    coords, scale = _scaled_coords(tuple(x), geom.n)
    budget = params.lookahead if params.lookahead is not None else geom.lookahead_for(params.depth)
    digits: list[int] = []
    for _ in range(params.depth):
        cands = geom.digit_candidates(coords, scale, budget)
        if not cands:
            return TileResult("outside", tuple(digits))
        if len(cands) > 1:
            return TileResult("boundary_band", tuple(digits))
        a = cands[0]
        digits.append(a)
        base = _mat_vec(geom.B, coords)
        coords = tuple(base[i] - geom.phi[a][i] * scale for i in range(geom.n))
    return TileResult("inside", tuple(digits))


@dataclass
class TileRaster:
    points: np.ndarray          # deduplicated depth-v cloud, lex sorted
    pixels: np.ndarray          # covered cells at the display grid
    grid: int                   # display cells per unit
    depth: int
    area_grid: int              # lattice-matched grid used for the area estimate
    area_pixel_count: int
    area_estimate: float
    sup_norm: float


def rasterize_tile(ns: NumberSystem, params: Optional[TileParams] = None) -> TileRaster:
    """Depth-v tile cloud plus covered-pixel raster.

    The area estimate is always taken at the lattice-matched resolution
    round(|det|^{v/n}) cells per unit, where the depth-v cloud is an affine
    lattice with one point per cell; coarser display grids overcount.
    """
    params = params or TileParams(depth=14)
    geom = tile_geometry(ns)
    pts = geom.cloud(params.depth)
    sup = float(np.max(np.abs(pts))) if len(pts) else 0.0
    rho = params.bounding_radius if params.bounding_radius is not None else geom.rho_ifs
    if sup > rho:
        raise ValueError(f"cloud sup-norm {sup:.6f} exceeds bounding radius {rho:.6f}")
    agrid = max(1, round(geom.abs_det ** (params.depth / geom.n)))
    apix = np.unique(np.floor(pts * agrid).astype(np.int64), axis=0)
    pixels = np.unique(np.floor(pts * params.grid).astype(np.int64), axis=0)
    return TileRaster(
        points=pts,
        pixels=pixels,
        grid=params.grid,
        depth=params.depth,
        area_grid=agrid,
        area_pixel_count=len(apix),
        area_estimate=len(apix) / float(agrid**geom.n),
        sup_norm=sup,
    )


NEIGHBOR_SPAN = 2  # lattice translates z with |z|_inf <= 2 are checked


def boundary_counts_from_points(
    points: np.ndarray, scales: Sequence[int], span: int = NEIGHBOR_SPAN
) -> dict[int, int]:
    """Boxes at scale 2^-s meeting both the cloud and some Z^n-translate of it."""
    n = points.shape[1]
    out: dict[int, int] = {}
    shifts = [
        z
        for z in np.ndindex(*([2 * span + 1] * n))
        if any(c != span for c in z)
    ]
    for s in scales:
        cell = 1 << s
        pix = set(map(tuple, np.floor(points * cell).astype(np.int64)))
        boundary: set = set()
        for z in shifts:
            off = tuple((c - span) * cell for c in z)
            boundary.update(p for p in pix if tuple(p[i] + off[i] for i in range(n)) in pix)
        out[s] = len(boundary)
    return out


@dataclass
class BoundaryReport:
    counts: dict[int, int]
    scales: tuple[int, ...]
    depth: int
    dimension_estimate: float
    mu_estimate: float


def boundary_stats(
    ns: NumberSystem, scales: Sequence[int] = (2, 3, 4, 5), depth: int = 16
) -> BoundaryReport:
    """Box-counting boundary growth across scales 2^-s.

    dimension = log2-slope of the counts; mu = |det|^{dim/n} is the
    subexponential tube growth rate (must sit below |det|).
    """
    geom = tile_geometry(ns)
    if geom.n != 2:
        raise ValueError("boundary box-counting is implemented for n = 2")
    scales = tuple(sorted(scales))
    blob = float(np.linalg.norm(np.linalg.matrix_power(geom.binv_np, depth), 2)) * geom.rho_ifs
    if blob > 2.0 ** (-scales[-1]):
        raise ValueError(
            f"depth {depth} cloud blob {blob:.4g} is coarser than scale 2^-{scales[-1]}; "
            "increase depth or drop the finest scale"
        )
    pts = geom.cloud(depth)
    counts = boundary_counts_from_points(pts, scales)
    xs = np.array(scales, dtype=float)
    ys = np.log2(np.array([max(counts[s], 1) for s in scales], dtype=float))
    slope = float(np.polyfit(xs, ys, 1)[0])
    mu = geom.abs_det ** (slope / geom.n)
    return BoundaryReport(
        counts=counts,
        scales=scales,
        depth=depth,
        dimension_estimate=slope,
        mu_estimate=mu,
    )


def urysohn_eval(
    x: Sequence, a: int, ns: NumberSystem, params: Optional[TileParams] = None
) -> float:
    """Box-average over the kappa-cube of the sub-tile indicator psi_a.

    psi_a(w) is 1 when a is the unique viable first digit at w, 1/2 when a
    is one of several viable digits (boundary band), 0 otherwise;
    kappa = 2 c_u |det B|^{-v}.
    """
    params = params or TileParams()
    if a not in ns.digits:
        raise ValueError(f"digit {a} outside the digit set")
    geom = tile_geometry(ns)
    kappa = 2.0 * params.c_u * geom.abs_det ** (-params.depth)
    s = max(1, params.samples_per_axis)
    offsets = [0.0] if s == 1 else [((i / (s - 1)) - 0.5) * kappa for i in range(s)]
    budget = params.lookahead if params.lookahead is not None else geom.lookahead_for(params.depth)
    total = 0.0
    count = 0
    base = tuple(float(v) for v in x)
    for idx in np.ndindex(*([s] * geom.n)):
        w = tuple(base[i] + offsets[idx[i]] for i in range(geom.n))
        coords, scale = _scaled_coords(w, geom.n)
        cands = geom.digit_candidates(coords, scale, budget)
        if a in cands:
            total += 1.0 if len(cands) == 1 else 0.5
        count += 1
    return total / count


def integer_fractional(
    gamma: Sequence, ns: NumberSystem, params: Optional[TileParams] = None
) -> tuple[Residue, tuple, str]:
    """Split gamma = phi(z) + fractional with fractional in the tile.

    Candidate lattice points within the measured tile extent are tested in
    lexicographic order; the first "inside" wins, else the first
    boundary_band candidate (flag reports which).  gamma = phi(integer) +
    fractional holds exactly as computed.
    """
    params = params or TileParams()
    geom = tile_geometry(ns)
    g = tuple(gamma)
    if len(g) != geom.n:
        raise ValueError(f"expected a length-{geom.n} vector")
    r = geom.sup_extent
    ranges = [range(math.ceil(float(v) - r), math.floor(float(v) + r) + 1) for v in g]
    band_hit: Optional[tuple] = None
    for z in _lex_product(ranges):
        frac = tuple(v - zi for v, zi in zip(g, z))
        res = tile_membership(frac, ns, params)
        if res.status == "inside":
            return ns.ctx.residue(z), frac, "exact"
        if res.status == "boundary_band" and band_hit is None:
            band_hit = (z, frac)
    if band_hit is not None:
        z, frac = band_hit
        return ns.ctx.residue(z), frac, "boundary_band"
    raise ValueError(f"no lattice candidate within radius {r:.3f} of {g}")


def _lex_product(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _lex_product(ranges[1:]):
            yield (head,) + tail


def border_hit(
    num: tuple[int, ...], scale: int, ns: NumberSystem, depth: int, budget: Optional[int] = None
) -> bool:
    """Boundary-band test of the Z^n-reduced exact rational point num/scale.

    The point is reduced componentwise into [0,1)^n; it is a hit unless
    exactly one lattice translate stays viable at the depth-v refutation
    budget (zero viable translates cannot happen for a true tiling and is
    counted as a hit conservatively).
    """
    if depth <= 0:
        return True  # zero refutation depth: the band is everything
    geom = tile_geometry(ns)
    if budget is None:
        budget = geom.lookahead_for(depth)
    frac = tuple(c % scale for c in num)
    r = geom.rho_search
    viable = 0
    span = math.ceil(r)
    for z in _lex_product([range(-span, span + 2)] * geom.n):
        coords = tuple(frac[i] - z[i] * scale for i in range(geom.n))
        if sum(c * c for c in coords) > r * r * scale * scale:
            continue
        if geom.unrefuted(coords, scale, budget):
            viable += 1
            if viable > 1:
                return True
    return viable != 1
