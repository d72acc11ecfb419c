"""Additive digit functionals and the empirical distribution harness.

An additive function scores an expansion position by position: f(g) =
sum_h w(a_h, h).  Over z ranging through a region R(T) the truncated sums
of w(a_h(P(z)), h), standardized by the exact per-position moments, are
compared against the standard normal law (KS distance, raw moments).  The
same enumeration stream feeds digit-pattern counts, Weyl exponential sums,
the Erdos-Turan-Koksma discrepancy bound, and border-hit counts F_l.

All per-sample work is exact (integers and Fractions); floats appear only
in the final standardization, so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ._parallel import chunked_map
from .embed import _mat_pow, _mat_vec, border_hit, embed_phi, tile_geometry
from .numsys import NumberSystem, expand
from .polycore import Residue, RingPoly
from .spectra import DEFAULT_BUDGET, enumerate_bounded, region_bounds

Weight = Union[int, Fraction]

_CHECK_POSITIONS = (0, 1, 2, 7, 48)


@dataclass(frozen=True)
class AdditiveFunction:
    """Per-position digit weight w(a, h); w(0, h) = 0 so padding zeros are free.

    weight must return int or Fraction (exact moment sums depend on it).
    Weights default to h-independence; position-dependent rules are allowed
    as long as they stay bounded.
    """

    name: str
    weight: Callable[[int, int], Weight]

    def validate(self, ns: NumberSystem) -> None:
        for h in _CHECK_POSITIONS:
            if self.weight(0, h) != 0:
                raise ValueError(f"{self.name}: weight(0, {h}) must be 0")
            for a in ns.digits:
                w = self.weight(a, h)
                if not isinstance(w, (int, Fraction)):
                    raise ValueError(f"{self.name}: weight({a}, {h}) must be int or Fraction")

    def bound(self, ns: NumberSystem) -> float:
        return float(max(abs(self.weight(a, h)) for a in ns.digits for h in _CHECK_POSITIONS))


sum_of_digits = AdditiveFunction("sum_of_digits", lambda a, h: a)

zero_function = AdditiveFunction("zero", lambda a, h: 0)


def digit_indicator(a0: int) -> AdditiveFunction:
    """Indicator of digit a0 (a0 = 0 would violate weight(0, h) = 0)."""
    if a0 == 0:
        raise ValueError("indicator of digit 0 is not additive-compatible")
    return AdditiveFunction(f"indicator[{a0}]", lambda a, h: 1 if a == a0 else 0)


PRESETS: dict[str, Callable[..., AdditiveFunction]] = {
    "sumdigits": lambda: sum_of_digits,
    "sum_of_digits": lambda: sum_of_digits,
    "zero": lambda: zero_function,
    "indicator": digit_indicator,
}


def resolve_preset(spec: str) -> AdditiveFunction:
    """Preset by name; "indicator:<digit>" carries its parameter inline."""
    name, _, arg = spec.partition(":")
    if name not in PRESETS:
        raise ValueError(f"unknown additive function preset {spec!r}")
    if name == "indicator":
        return digit_indicator(int(arg))
    return PRESETS[name]()


def truncation_index(x: float, m: int) -> int:
    """Largest L with m^L <= x (x > 1 required)."""
    if x <= 1:
        raise ValueError(f"truncation index needs x > 1, got {x}")
    level = 0
    t = m
    while t <= x * (1.0 + 1e-12):
        level += 1
        t *= m
    return level


@dataclass(frozen=True)
class MomentProfile:
    """Exact per-position digit moments m_h, sigma^2_h and their sums."""

    L: int
    m_h: tuple[Fraction, ...]
    sigma2_h: tuple[Fraction, ...]
    M: Fraction
    D2: Fraction

    @property
    def degenerate(self) -> bool:
        return self.D2 == 0

    @property
    def D(self) -> float:
        return math.sqrt(self.D2)


def _position_moments(f: AdditiveFunction, digits: Sequence[int], h: int) -> tuple[Fraction, Fraction]:
    card = len(digits)
    mean = Fraction(sum(Fraction(f.weight(a, h)) for a in digits), card)
    second = Fraction(sum(Fraction(f.weight(a, h)) ** 2 for a in digits), card)
    var = second - mean * mean
    assert var >= 0
    return mean, var


def moment_profile(f: AdditiveFunction, x: float, ns: NumberSystem) -> MomentProfile:
    """Moments over positions 0..L with L = floor(log_|p(0)| x)."""
    f.validate(ns)
    level = truncation_index(x, ns.ctx.abs_p0)
    means = []
    variances = []
    for h in range(level + 1):
        m, v = _position_moments(f, ns.digits, h)
        means.append(m)
        variances.append(v)
    return MomentProfile(
        L=level,
        m_h=tuple(means),
        sigma2_h=tuple(variances),
        M=sum(means, Fraction(0)),
        D2=sum(variances, Fraction(0)),
    )


def window_moments(
    f: AdditiveFunction, ns: NumberSystem, a: int, b: int
) -> tuple[Fraction, Fraction]:
    """(M', D'^2) summed over positions a..b inclusive."""
    mean = Fraction(0)
    var = Fraction(0)
    for h in range(a, b + 1):
        m, v = _position_moments(f, ns.digits, h)
        mean += m
        var += v
    return mean, var


def _truncated_exact(digits: Sequence[int], f: AdditiveFunction, a: int, b: int) -> Fraction:
    hi = min(b, len(digits) - 1)
    total = Fraction(0)
    for h in range(max(a, 0), hi + 1):
        if digits[h]:
            total += Fraction(f.weight(digits[h], h))
    return total


def additive_value(g, f: AdditiveFunction, ns: NumberSystem) -> float:
    """f(g) = sum over all positions of the expansion."""
    e = expand(g, ns)
    return float(_truncated_exact(e.digits, f, 0, len(e.digits)))


def truncated_value(g, f: AdditiveFunction, ns: NumberSystem, a: int, b: int) -> float:
    """Head/tail-cut sum over positions a <= h <= b; positions past the
    expansion length read digit 0."""
    e = expand(g, ns)
    return float(_truncated_exact(e.digits, f, a, b))


@dataclass(frozen=True)
class TruncationWindow:
    """Digit positions [A, B] kept by the truncated functional."""

    A: int
    B: int
    L: int
    clamped: bool

    @property
    def width(self) -> int:
        return self.B - self.A + 1


def truncation_window(T: float, d: int, ns: NumberSystem, C: float = 3.0) -> TruncationWindow:
    """Window A = ceil(C log L), B = dL - A over L = floor(log_m T^n).

    Expansions of P(z) for z in R(T) run to about d*L positions, so the
    tail cut mirrors the head cut at that depth.  When C log L already
    exceeds half the range the window would invert; it is then clamped to
    the centered single split and flagged.
    """
    level = truncation_index(float(T) ** ns.ctx.n, ns.ctx.abs_p0)
    a = 0 if level <= 1 else math.ceil(C * math.log(level) - 1e-9)
    b = d * level - a
    clamped = False
    if a > b:
        a = (d * level) // 2
        b = d * level - a
        clamped = True
    return TruncationWindow(A=a, B=b, L=level, clamped=clamped)


def pattern_window(T: float, d: int, ns: NumberSystem, C: float = 3.0) -> tuple[float, float]:
    """Admissible digit positions [C log L, dL - C log L] (may be empty)."""
    level = truncation_index(float(T) ** ns.ctx.n, ns.ctx.abs_p0)
    lo = 0.0 if level <= 1 else C * math.log(level)
    return lo, d * level - lo


def level_window(T: float, d: int, ns: NumberSystem, C: float = 3.0) -> tuple[float, float]:
    """Admissible reduction levels [C log log T, d log_|det|(T^n) - C log log T]."""
    lo = C * math.log(math.log(T)) if T > math.e else 0.0
    hi = d * ns.ctx.n * math.log(T) / math.log(ns.ctx.abs_p0) - lo
    return lo, hi


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def ks_statistic(values: Sequence[float]) -> float:
    """One-sample Kolmogorov-Smirnov distance to the standard normal."""
    xs = sorted(values)
    count = len(xs)
    if count == 0:
        raise ValueError("KS distance needs a nonempty sample")
    d = 0.0
    for i, x in enumerate(xs):
        c = normal_cdf(x)
        d = max(d, c - i / count, (i + 1) / count - c)
    return d


def _region_items(T: float, ns: NumberSystem, budget: int) -> list[tuple[tuple[int, ...], bool]]:
    region = region_bounds(T, ns.ctx)
    return list(enumerate_bounded(ns.ctx, region.thresholds, budget=budget))


def _poly_degree(P: RingPoly) -> int:
    d = P.degree
    return max(int(d), 1) if isinstance(d, int) else 1


@dataclass
class SampleReport:
    """Empirical record of standardized truncated values over R(T)."""

    T: float
    sample_count: int
    ks: float
    moments: list[float]
    histogram_counts: list[int]
    histogram_edges: list[float]
    boundary_band: int
    window: TruncationWindow
    mean_window: float
    deviation_window: float
    m_h: list[float]
    sigma2_h: list[float]

    def to_json_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "ks": self.ks,
            "moments": self.moments,
            "m_profile": {
                "L": self.window.L,
                "A": self.window.A,
                "B": self.window.B,
                "window_clamped": self.window.clamped,
                "mean_window": self.mean_window,
                "deviation_window": self.deviation_window,
                "m_h": self.m_h,
                "sigma2_h": self.sigma2_h,
            },
            "boundary_band": self.boundary_band,
        }


def clt_harness(
    P: RingPoly,
    f: AdditiveFunction,
    T: float,
    ns: NumberSystem,
    C: float = 3.0,
    bins: int = 64,
    hist_range: tuple[float, float] = (-4.0, 4.0),
    k_max: int = 4,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> SampleReport:
    """Standardized truncated f(P(z)) over z in R(T), vs. the normal law.

    Each sample is exact until the final (s - M')/D' float; the histogram
    clips into its end bins so its mass always equals the sample count.
    """
    f.validate(ns)
    d = _poly_degree(P)
    win = truncation_window(T, d, ns, C)
    mean_w, var_w = window_moments(f, ns, win.A, win.B)
    if var_w == 0:
        raise ValueError(
            f"degenerate deviation: D' = 0 on window [{win.A}, {win.B}] for {f.name}"
        )
    dev = math.sqrt(var_w)
    items = _region_items(T, ns, budget)
    band = sum(1 for _, b in items if b)
    ctx = ns.ctx

    def one(item: tuple[tuple[int, ...], bool]) -> float:
        z = ctx.residue(item[0])
        e = expand(P.evaluate(z), ns)
        s = _truncated_exact(e.digits, f, win.A, win.B)
        return float(s - mean_w) / dev

    values = chunked_map(one, items, workers=workers)
    count = len(values)
    moments = [math.fsum(x**k for x in values) / count for k in range(1, k_max + 1)]
    lo, hi = hist_range
    width = (hi - lo) / bins
    counts = [0] * bins
    for x in values:
        idx = int((x - lo) / width)
        counts[min(max(idx, 0), bins - 1)] += 1
    edges = [lo + i * width for i in range(bins + 1)]
    per_pos = [_position_moments(f, ns.digits, h) for h in range(win.A, win.B + 1)]
    return SampleReport(
        T=float(T),
        sample_count=count,
        ks=ks_statistic(values),
        moments=moments,
        histogram_counts=counts,
        histogram_edges=edges,
        boundary_band=band,
        window=win,
        mean_window=float(mean_w),
        deviation_window=dev,
        m_h=[float(m) for m, _ in per_pos],
        sigma2_h=[float(v) for _, v in per_pos],
    )


@dataclass(frozen=True)
class PatternReport:
    """Count of z in R(T) whose expansion of P(z) shows the digit pattern."""

    count: int
    total: int
    expected: float
    relative_error: float
    frequency: float
    admissible: bool
    window: tuple[float, float]


def pattern_count(
    positions: Sequence[int],
    digit_values: Sequence[int],
    P: RingPoly,
    T: float,
    ns: NumberSystem,
    C: float = 3.0,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> PatternReport:
    """Occurrences of a_{l_r}(P(z)) = b_r for all r; positions past the
    expansion length read digit 0."""
    pos = [int(l) for l in positions]
    vals = [int(b) for b in digit_values]
    if len(pos) != len(vals) or not pos:
        raise ValueError("need equally many positions and digits, at least one")
    if any(l < 0 for l in pos):
        raise ValueError("positions must be nonnegative")
    if any(b2 <= b1 for b1, b2 in zip(pos, pos[1:])):
        raise ValueError("positions must be strictly increasing")
    allowed = set(ns.digits)
    for b in vals:
        if b not in allowed:
            raise ValueError(f"digit {b} outside the digit set {sorted(allowed)}")
    lo, hi = pattern_window(T, _poly_degree(P), ns, C)
    admissible = lo <= pos[0] and pos[-1] <= hi
    if not admissible:
        warnings.warn(
            f"positions {pos} outside the admissible window [{lo:.2f}, {hi:.2f}]; "
            "equidistribution is not guaranteed there",
            stacklevel=2,
        )
    items = _region_items(T, ns, budget)
    ctx = ns.ctx

    def one(item: tuple[tuple[int, ...], bool]) -> int:
        z = ctx.residue(item[0])
        digits = expand(P.evaluate(z), ns).digits
        for l, b in zip(pos, vals):
            if (digits[l] if l < len(digits) else 0) != b:
                return 0
        return 1

    hits = chunked_map(one, items, workers=workers)
    count = int(sum(hits))
    total = len(items)
    expected = total / len(ns.digits) ** len(pos)
    return PatternReport(
        count=count,
        total=total,
        expected=expected,
        relative_error=(count - expected) / expected if expected else math.inf,
        frequency=count / total if total else math.nan,
        admissible=admissible,
        window=(lo, hi),
    )


@dataclass(frozen=True)
class WeylReport:
    value: complex
    normalized: float
    sample_count: int
    admissible: bool

    def to_json_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "normalized": self.normalized,
            "sample_count": self.sample_count,
        }


def _as_h_vectors(h_vectors, n: int) -> list[tuple[int, ...]]:
    hs = list(h_vectors)
    if hs and isinstance(hs[0], int):
        hs = [tuple(hs)]
    out = []
    for h in hs:
        v = tuple(int(c) for c in h)
        if len(v) != n:
            raise ValueError(f"frequency vector {h} must have length {n}")
        out.append(v)
    return out


def weyl_sum(
    h_vectors,
    positions: Union[int, Sequence[int]],
    P: RingPoly,
    T: float,
    ns: NumberSystem,
    C: float = 3.0,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> WeylReport:
    """sum_z e(sum_r <h_r, B^(-l_r-1) phi(P(z))>) with exact rational phases.

    B^(-m) = adj(B)^m / det(B)^m keeps every inner product an exact
    Fraction; terms with phase exactly 0 contribute exactly 1.0.
    """
    ctx = ns.ctx
    hs = _as_h_vectors(h_vectors, ctx.n)
    pos = [int(positions)] if isinstance(positions, int) else [int(l) for l in positions]
    if len(pos) != len(hs):
        raise ValueError("need one position per frequency vector")
    if any(l < 0 for l in pos):
        raise ValueError("levels must be nonnegative")
    geom = tile_geometry(ns)
    lo, hi = level_window(T, _poly_degree(P), ns, C)
    admissible = all(lo <= l <= hi for l in pos)
    if not admissible and any(any(h) for h in hs):
        warnings.warn(
            f"levels {pos} outside the admissible window [{lo:.2f}, {hi:.2f}]; "
            "decay is not guaranteed there",
            stacklevel=2,
        )
    mats = [_mat_pow(geom.adj, l + 1) for l in pos]
    dens = [geom.det ** (l + 1) for l in pos]
    items = _region_items(T, ns, budget)

    def one(item: tuple[tuple[int, ...], bool]) -> tuple[float, float]:
        z = ctx.residue(item[0])
        v = embed_phi(P.evaluate(z))
        phase = Fraction(0)
        for h, mat, den in zip(hs, mats, dens):
            av = _mat_vec(mat, v)
            phase += Fraction(sum(hc * ac for hc, ac in zip(h, av)), den)
        phase %= 1
        if phase == 0:
            return 1.0, 0.0
        angle = 2.0 * math.pi * float(phase)
        return math.cos(angle), math.sin(angle)

    terms = chunked_map(one, items, workers=workers)
    total = complex(math.fsum(t[0] for t in terms), math.fsum(t[1] for t in terms))
    count = len(terms)
    return WeylReport(
        value=total,
        normalized=abs(total) / count if count else math.nan,
        sample_count=count,
        admissible=admissible,
    )


def etk_bound(points: Sequence[Sequence[float]], H: int) -> float:
    """Discrepancy upper bound 2/(H+1) + sum_{0<|h|_inf<=H} |mean e(<h,x>)|/r(h).

    The classical inequality carries an absolute constant; it is taken as 1
    here, so the value is an upper-bound proxy for comparisons, not a
    certified bound.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.size == 0:
        raise ValueError("discrepancy bound needs a nonempty point set")
    if H < 1:
        raise ValueError("H must be >= 1")
    pts = pts % 1.0
    dim = pts.shape[1]
    bound = 2.0 / (H + 1)
    ranges = [np.arange(-H, H + 1)] * dim
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, dim)
    grid = grid[np.any(grid != 0, axis=1)]
    r = np.prod(np.maximum(1, np.abs(grid)), axis=1).astype(float)
    phases = np.exp(2j * np.pi * (pts @ grid.T))
    sums = np.abs(phases.mean(axis=0))
    bound += float(np.sum(sums / r))
    return bound


@dataclass(frozen=True)
class BorderReport:
    """Hits of the depth-v boundary band among reduced B^(-l-1) phi(P(z))."""

    hits: int
    total: int
    ratio: float
    level: int
    depth: int
    admissible: bool


def border_hits(
    l: int,
    P: RingPoly,
    T: float,
    ns: NumberSystem,
    depth: int = 12,
    C: float = 3.0,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> BorderReport:
    """F_l: how many z in R(T) land in the boundary band after reduction.

    The level-l point B^(-l-1) phi(P(z)) is reduced modulo B^(-1) Z^n;
    equivalently its B-image B^(-l) phi(P(z)) is reduced modulo Z^n and
    tested against the depth-v band of the tile boundary.  The point is
    carried as an exact rational with denominator |det B|^l, so band
    membership is decided by the same integer-scaled refutation walk as
    tile_membership.
    """
    if l < 0:
        raise ValueError("level l must be nonnegative")
    lo, hi = level_window(T, _poly_degree(P), ns, C)
    admissible = lo <= l <= hi
    if not admissible:
        warnings.warn(
            f"level {l} outside the admissible window [{lo:.2f}, {hi:.2f}]; "
            "the border ratio is not expected to be small there",
            stacklevel=2,
        )
    geom = tile_geometry(ns)
    mat = _mat_pow(geom.adj, l)
    den = geom.det**l
    sign = 1 if den > 0 else -1
    scale = abs(den)
    ctx = ns.ctx
    items = _region_items(T, ns, budget)

    def one(item: tuple[tuple[int, ...], bool]) -> int:
        v = embed_phi(P.evaluate(ctx.residue(item[0])))
        num = tuple(sign * c for c in _mat_vec(mat, v))
        return int(border_hit(num, scale, ns, depth))

    hits = chunked_map(one, items, workers=workers)
    count = int(sum(hits))
    total = len(items)
    return BorderReport(
        hits=count,
        total=total,
        ratio=count / total if total else math.nan,
        level=l,
        depth=depth,
        admissible=admissible,
    )
