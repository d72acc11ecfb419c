"""Root-derivative values B_jk, house/length functionals, and region R(T).

A residue g is scored by the n linear functionals (d/dX)^{j-1} g at the
distinct roots beta_k (j up to the multiplicity).  Regions R(T) impose
|B_jk(g)| <= T_k with log T_k = log T * n log|beta_k| / log|p(0)|.
Enumeration maps the thresholds to an exact coefficient bounding box via
the inverse confluent Vandermonde matrix, then filters; membership within
+-eps_root*(1+|B|) of a threshold is included and tallied as boundary band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .polycore import ModulusContext, Residue

DEFAULT_EPS_ROOT = 1e-9
DEFAULT_BUDGET = 5_000_000


class RegionBudgetError(RuntimeError):
    """Estimated enumeration cardinality exceeds the configured budget."""


@dataclass(frozen=True)
class BVector:
    """Map (j, k) -> (d/dX)^{j-1} g (beta_k); exactly n entries."""

    entries: Mapping[tuple[int, int], complex]

    def __getitem__(self, key: tuple[int, int]) -> complex:
        return self.entries[key]

    def max_abs(self) -> float:
        return max(abs(v) for v in self.entries.values())

    def items(self):
        return self.entries.items()


def b_values(g: Residue) -> BVector:
    ctx = g.ctx
    max_mult = max(m for _, m in ctx.roots)
    derivs = [g.rep]
    for _ in range(max_mult - 1):
        derivs.append(derivs[-1].derivative())
    entries: dict[tuple[int, int], complex] = {}
    for j, k in ctx.row_keys:
        entries[(j, k)] = complex(derivs[j - 1].evaluate(ctx.root(k)))
    return BVector(entries)


def house_and_length(g: Residue) -> tuple[float, float]:
    """House H(g) = max |B_jk(g)| and length predictor M(g).

    Entries with |B| <= 1 would contribute nonpositive ratios; they are
    clamped to 0 since lengths are nonnegative.
    """
    if g.is_zero:
        raise ValueError("house/length undefined for g = 0")
    ctx = g.ctx
    bv = b_values(g)
    house = bv.max_abs()
    m = 0.0
    for (j, k), v in bv.items():
        mod = abs(v)
        if mod > 1.0:
            m = max(m, math.log(mod) / math.log(abs(ctx.root(k))))
    return house, m


@dataclass(frozen=True)
class Region:
    """Thresholds T_k (independent of j) at level T."""

    ctx: ModulusContext
    T: float
    thresholds: Mapping[tuple[int, int], float]


def region_bounds(T: float, ctx: ModulusContext) -> Region:
    """Thresholds T_k = T^{n log|beta_k| / log|p(0)|}.

    T = 1 is allowed (all thresholds 1); T < 1 is rejected.  Exponents
    within 1e-9 of an integer are snapped to it.
    """
    if T < 1.0:
        raise ValueError(f"region level T must be >= 1, got {T}")
    if ctx.abs_p0 < 2:
        raise ValueError("region thresholds need |p(0)| >= 2")
    logm = math.log(ctx.abs_p0)
    thresholds: dict[tuple[int, int], float] = {}
    for j, k in ctx.row_keys:
        e = ctx.n * math.log(abs(ctx.root(k))) / logm
        if abs(e - round(e)) < 1e-9:
            e = float(round(e))
        thresholds[(j, k)] = T**e
    return Region(ctx=ctx, T=float(T), thresholds=thresholds)


def _confluent_vandermonde(ctx: ModulusContext) -> np.ndarray:
    """Row r = row_keys[r] = (j, k): W[r, i] = (d/dX)^{j-1} X^i at beta_k."""
    n = ctx.n
    w = np.zeros((n, n), dtype=complex)
    for r, (j, k) in enumerate(ctx.row_keys):
        beta = ctx.root(k)
        for i in range(n):
            if i >= j - 1:
                w[r, i] = math.perm(i, j - 1) * beta ** (i - j + 1)
    return w


def coefficient_box(ctx: ModulusContext, bounds: Mapping[tuple[int, int], float]) -> list[int]:
    """Per-coefficient box |a_i| <= sum_r |W^-1[i, r]| * bound_r, 1% inflated."""
    w = _confluent_vandermonde(ctx)
    winv = np.linalg.inv(w)
    bvec = np.array([bounds[key] for key in ctx.row_keys], dtype=float)
    raw = np.abs(winv) @ bvec
    return [int(math.floor(v * 1.01 + 1e-9)) for v in raw]


def enumerate_bounded(
    ctx: ModulusContext,
    bounds: Mapping[tuple[int, int], float],
    budget: int = DEFAULT_BUDGET,
    eps_root: float = DEFAULT_EPS_ROOT,
) -> Iterator[tuple[tuple[int, ...], bool]]:
    """All coefficient vectors with every |B_jk| within its bound, in
    lexicographic order, each flagged when within the boundary band."""
    box = coefficient_box(ctx, bounds)
    total = 1
    for b in box:
        total *= 2 * b + 1
    if total > budget:
        raise RegionBudgetError(
            f"coefficient box holds {total} candidates, over the budget {budget}"
        )
    if total == 0:
        return
    w = _confluent_vandermonde(ctx)
    bvec = np.array([bounds[key] for key in ctx.row_keys], dtype=float)
    grids = np.meshgrid(*(np.arange(-b, b + 1) for b in box), indexing="ij")
    cand = np.stack([g.reshape(-1) for g in grids], axis=1)  # C order = lex
    vals = np.abs(cand.astype(complex) @ w.T)
    slack = eps_root * (1.0 + vals)
    inside = np.all(vals - bvec[None, :] <= slack, axis=1)
    band = inside & np.any(np.abs(vals - bvec[None, :]) <= slack, axis=1)
    for row, b in zip(cand[inside], band[inside]):
        yield tuple(int(c) for c in row), bool(b)


def enumerate_region(region: Region, budget: int = DEFAULT_BUDGET) -> Iterator[Residue]:
    """Deterministic lexicographic stream of the residues of R(T)."""
    for vec, _band in enumerate_bounded(region.ctx, region.thresholds, budget=budget):
        yield region.ctx.residue(vec)


@dataclass(frozen=True)
class RegionCount:
    count: int
    normalized: float
    boundary_band: int


def count_region(region: Region, budget: int = DEFAULT_BUDGET) -> RegionCount:
    """Cardinality of R(T) and count/T^n; band members included and tallied."""
    count = 0
    band = 0
    for _vec, b in enumerate_bounded(region.ctx, region.thresholds, budget=budget):
        count += 1
        band += int(b)
    return RegionCount(
        count=count,
        normalized=count / region.T**region.ctx.n,
        boundary_band=band,
    )
