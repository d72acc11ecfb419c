"""Exact integer polynomial and residue arithmetic.

Polynomials are immutable tuples of arbitrary-precision integers in
ascending degree order (coeffs[i] multiplies X^i), matching the digit
indexing a_0, a_1, ... used everywhere else in this package.  The zero
polynomial is the empty tuple and its degree is a distinguished -inf.

A ModulusContext caches everything derived from a monic modulus p:
squarefree decomposition, numerically refined roots with exact
multiplicities, the companion matrix, and |p(0)|.  Residues are
canonical representatives of Z[X]/(p) with degree < deg p.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

NEG_INF = float("-inf")


class RootFindingError(RuntimeError):
    """Simultaneous iteration failed to meet the residual target."""


def _normalize(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Integer-coefficient polynomial, ascending order, trailing zeros stripped."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        norm = _normalize(self.coeffs)
        if norm != tuple(self.coeffs):
            object.__setattr__(self, "coeffs", norm)
        for c in self.coeffs:
            if not isinstance(c, int):
                raise TypeError(f"integer coefficients required, got {type(c).__name__}")

    # -- basic structure -------------------------------------------------

    @property
    def degree(self) -> Union[int, float]:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    @property
    def constant(self) -> int:
        return self[0]

    @property
    def leading(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    # -- ring operations -------------------------------------------------

    def __add__(self, other: IntPoly | int) -> IntPoly:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self[i] + other[i] for i in range(n)))

    def __radd__(self, other: int) -> IntPoly:
        return self + other

    def __sub__(self, other: IntPoly | int) -> IntPoly:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self[i] - other[i] for i in range(n)))

    def __rsub__(self, other: int) -> IntPoly:
        return _as_poly(other) - self

    def __neg__(self) -> IntPoly:
        return IntPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other: IntPoly | int) -> IntPoly:
        if isinstance(other, int):
            return IntPoly(tuple(c * other for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    def __rmul__(self, other: int) -> IntPoly:
        return self * other

    def __pow__(self, k: int) -> IntPoly:
        if k < 0:
            raise ValueError("negative power")
        result = IntPoly((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> IntPoly:
        """Multiply by X^k (k >= 0)."""
        if k < 0:
            raise ValueError("negative shift")
        if self.is_zero:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def __divmod__(self, other: IntPoly) -> tuple[IntPoly, IntPoly]:
        """Exact division with remainder; divisor must be monic."""
        if not isinstance(other, IntPoly) or not other.is_monic:
            raise ValueError("division only by a monic IntPoly")
        rem = list(self.coeffs)
        d = len(other.coeffs) - 1
        if d == 0:
            return self, IntPoly()
        quo = [0] * max(0, len(rem) - d)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c:
                quo[i - d] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - d + j] -= c * b
        return IntPoly(tuple(quo)), IntPoly(tuple(rem[:d]))

    def __mod__(self, other: IntPoly) -> IntPoly:
        return divmod(self, other)[1]

    def __floordiv__(self, other: IntPoly) -> IntPoly:
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ValueError("division not exact")
        return q

    # -- calculus and evaluation ------------------------------------------

    def derivative(self, order: int = 1) -> IntPoly:
        p = self
        for _ in range(order):
            p = IntPoly(tuple(i * c for i, c in enumerate(p.coeffs))[1:] if p.coeffs else ())
        return p

    def evaluate(self, x):
        """Horner evaluation; works for int, Fraction, float, complex inputs."""
        acc = 0 * x if self.is_zero else self.coeffs[-1] + 0 * x
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    # -- presentation ------------------------------------------------------

    def to_text(self, var: str = "X") -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                body = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                body = f"{mag}{var}" + (f"^{i}" if i > 1 else "")
            terms.append(("-" if c < 0 else "+", body))
        sign, first = terms[0]
        out = ("-" if sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += sign + body
        return out

    def __str__(self) -> str:
        return self.to_text()


def _as_poly(v: IntPoly | int) -> IntPoly:
    if isinstance(v, IntPoly):
        return v
    if isinstance(v, int):
        return IntPoly((v,))
    raise TypeError(f"cannot coerce {type(v).__name__} to IntPoly")


_TERM_RE = re.compile(
    r"(?P<sign>[+-]?)\s*(?:(?P<coef>\d+)\s*\*?\s*)?(?P<var>[A-Za-z])?(?:\s*\^\s*(?P<exp>\d+))?"
)


def parse_poly(text: str, var: str = "X") -> IntPoly:
    """Parse "2,2,1" (ascending coefficients) or "X^2+2*X+2" (symbolic)."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if "," in s or var not in s.upper() and re.fullmatch(r"[+-]?\d+", s):
        try:
            return IntPoly(tuple(int(tok.strip()) for tok in s.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad coefficient list {text!r}") from exc
    coeffs: dict[int, int] = {}
    pos = 0
    s2 = s.replace(" ", "")
    while pos < len(s2):
        m = _TERM_RE.match(s2, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial term at {s2[pos:]!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coef = m.group("coef")
        v = m.group("var")
        exp = m.group("exp")
        if v is not None and v.upper() != var.upper():
            raise ValueError(f"unexpected variable {v!r}, expected {var!r}")
        if v is None:
            if coef is None:
                raise ValueError(f"cannot parse polynomial term at {s2[pos:]!r}")
            e = 0
        else:
            e = int(exp) if exp is not None else 1
        c = int(coef) if coef is not None else 1
        coeffs[e] = coeffs.get(e, 0) + sign * c
        pos = m.end()
    deg = max(coeffs) if coeffs else 0
    return IntPoly(tuple(coeffs.get(i, 0) for i in range(deg + 1)))


# -- gcd and squarefree decomposition -------------------------------------


def _frac_poly(p: IntPoly) -> list[Fraction]:
    return [Fraction(c) for c in p.coeffs]


def _frac_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = num[:]
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        while num and num[-1] == 0:
            num.pop()
        if len(num) < len(den):
            break
        c = num[-1] / den[-1]
        k = len(num) - len(den)
        q[k] = c
        for i, d in enumerate(den):
            num[k + i] -= c * d
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return q, num


def gcd_monic(f: IntPoly, g: IntPoly) -> IntPoly:
    """Monic gcd over Q; result asserted integral (true when one input is monic)."""
    a, b = _frac_poly(f), _frac_poly(g)
    while any(b):
        _, r = _frac_divmod(a, b)
        a, b = b, r
    if not any(a):
        raise ValueError("gcd(0, 0) undefined")
    lead = a[-1]
    monic = [c / lead for c in a]
    out = []
    for c in monic:
        if c.denominator != 1:
            raise ValueError("gcd is not integral; expected a monic input")
        out.append(int(c))
    return IntPoly(tuple(out))


def squarefree_decompose(p: IntPoly) -> list[tuple[IntPoly, int]]:
    """Yun's algorithm: p = prod part^mult with pairwise-coprime squarefree parts."""
    if not p.is_monic:
        raise ValueError("squarefree decomposition requires a monic polynomial")
    if p.degree < 1:
        raise ValueError("squarefree decomposition requires a nonconstant polynomial")
    parts: list[tuple[IntPoly, int]] = []
    dp = p.derivative()
    g = gcd_monic(p, dp)
    w = p // g
    y = dp // g
    i = 1
    while w.degree > 0:
        z = y - w.derivative()
        gi = gcd_monic(w, z) if not z.is_zero else w
        if gi.degree > 0:
            parts.append((gi, i))
        w = w // gi
        y = z // gi
        i += 1
    prod = IntPoly((1,))
    for part, mult in parts:
        prod = prod * part**mult
    assert prod == p, "squarefree reassembly failed"
    return parts


# -- root finding ----------------------------------------------------------


def _aberth(coeffs: Sequence[float], max_iter: int = 400) -> list[complex]:
    """Aberth-Ehrlich simultaneous iteration for a monic squarefree polynomial."""
    d = len(coeffs) - 1
    if d == 1:
        return [complex(-coeffs[0])]
    radius = 1.0 + max(abs(c) for c in coeffs[:-1])
    roots = [
        radius ** (0.5) * cmath.exp(2j * math.pi * (k + 0.35) / d) * (1 + 0.05 * (k % 3))
        for k in range(d)
    ]
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]

    def horner(cs, z):
        acc = complex(cs[-1])
        for c in reversed(cs[:-1]):
            acc = acc * z + c
        return acc

    for _ in range(max_iter):
        moved = 0.0
        for k in range(d):
            z = roots[k]
            pz = horner(coeffs, z)
            dz = horner(dcoeffs, z)
            if dz == 0:
                roots[k] = z + 1e-6 * (1 + abs(z))
                moved = math.inf
                continue
            w = pz / dz
            s = sum(1.0 / (z - roots[j]) for j in range(d) if j != k)
            denom = 1.0 - w * s
            step = w if denom == 0 else w / denom
            roots[k] = z - step
            moved = max(moved, abs(step))
        if moved < 1e-14 * (1.0 + max(abs(z) for z in roots)):
            break
    return roots


def _symmetrize_conjugates(roots: list[complex]) -> list[complex]:
    # real polynomial: snap near-real roots and pair the rest into exact conjugates
    out: list[complex] = []
    pending: list[complex] = []
    for z in roots:
        if abs(z.imag) <= 1e-10 * (1.0 + abs(z.real)):
            out.append(complex(z.real, 0.0))
        else:
            pending.append(z)
    pos = sorted((z for z in pending if z.imag > 0), key=lambda z: (z.real, z.imag))
    neg = [z for z in pending if z.imag < 0]
    for z in pos:
        if not neg:
            out.append(z)
            continue
        j = min(range(len(neg)), key=lambda i: abs(neg[i] - z.conjugate()))
        neg.pop(j)
        out.append(z)
        out.append(z.conjugate())
    out.extend(neg)
    return out


def find_roots(p: IntPoly, tol: float = 1e-12) -> list[tuple[complex, int]]:
    """All complex roots with multiplicities, via Yun parts + Aberth-Ehrlich.

    Each root is refined until |part(beta)| < tol * (1 + |beta|)^deg(part);
    failure raises RootFindingError.  Output sorted by (Re, Im).
    """
    flat: list[tuple[complex, int]] = []
    for part, mult in squarefree_decompose(p):
        coeffs = [float(c) for c in part.coeffs]
        if any(math.isinf(c) for c in coeffs):
            raise RootFindingError("coefficients exceed float range")
        roots = _symmetrize_conjugates(_aberth(coeffs))
        deg = part.degree
        for beta in roots:
            resid = abs(part.evaluate(beta))
            bound = tol * (1.0 + abs(beta)) ** deg
            if resid >= bound:
                raise RootFindingError(
                    f"root residual {resid:.3e} above {bound:.3e} for part {part} at {beta}"
                )
            flat.append((beta, mult))
    flat.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return flat


# -- companion matrix and contexts ------------------------------------------


def companion_matrix(p: IntPoly) -> tuple[tuple[int, ...], ...]:
    """Subdiagonal of ones, last column -b_0..-b_{n-1}, for monic p = X^n + sum b_i X^i."""
    if not p.is_monic or p.degree < 1:
        raise ValueError("companion matrix requires a monic polynomial of degree >= 1")
    n = p.degree
    rows = []
    for i in range(n):
        row = [0] * n
        if i > 0:
            row[i - 1] = 1
        row[n - 1] = -p.coeffs[i]
        rows.append(tuple(row))
    return tuple(rows)


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free integer determinant (Bareiss elimination)."""
    m = [list(row) for row in matrix]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("square matrix required")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


class ModulusContext:
    """Immutable bundle of data derived from a monic modulus p.

    Root indexing convention: distinct roots sorted by (Re, Im) and numbered
    k = 1..K; each carries its multiplicity m_k from the exact squarefree
    decomposition.  Row keys (j, k) with j = 1..m_k enumerate the n linear
    functionals g -> (d/dX)^{j-1} g at root beta_k.
    """

    def __init__(self, p: IntPoly | str | Sequence[int], root_tol: float = 1e-12):
        if isinstance(p, str):
            p = parse_poly(p)
        elif not isinstance(p, IntPoly):
            p = IntPoly(tuple(p))
        if not p.is_monic or p.degree < 1:
            raise ValueError(f"modulus must be monic of degree >= 1, got {p}")
        self.p = p
        self.n: int = p.degree
        self.root_tol = root_tol
        self.abs_p0: int = abs(p.constant)
        self.squarefree_parts = squarefree_decompose(p)
        self.roots: list[tuple[complex, int]] = find_roots(p, tol=root_tol)
        # (j, k) rows in a fixed order: k over sorted roots (1-based), j = 1..mult
        self.row_keys: tuple[tuple[int, int], ...] = tuple(
            (j, k + 1) for k, (_, mult) in enumerate(self.roots) for j in range(1, mult + 1)
        )
        assert len(self.row_keys) == self.n
        self.companion = companion_matrix(p)

    def root(self, k: int) -> complex:
        return self.roots[k - 1][0]

    @cached_property
    def min_root_abs(self) -> float:
        return min(abs(b) for b, _ in self.roots)

    @cached_property
    def max_root_abs(self) -> float:
        return max(abs(b) for b, _ in self.roots)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModulusContext) and self.p == other.p

    def __hash__(self) -> int:
        return hash(self.p)

    def __repr__(self) -> str:
        return f"ModulusContext({self.p})"

    # -- residue construction ------------------------------------------------

    def residue(self, coeffs: IntPoly | int | Sequence[int]) -> Residue:
        if isinstance(coeffs, IntPoly):
            return reduce(coeffs, self)
        if isinstance(coeffs, int):
            return reduce(IntPoly((coeffs,)), self)
        return reduce(IntPoly(tuple(coeffs)), self)

    @cached_property
    def zero(self) -> Residue:
        return Residue(IntPoly(), self)

    @cached_property
    def one(self) -> Residue:
        return Residue(IntPoly((1,)), self)

    @cached_property
    def x(self) -> Residue:
        if self.n == 1:
            return self.residue(IntPoly((0, 1)))
        return Residue(IntPoly((0, 1)), self)


class Residue:
    """Canonical representative of Z[X]/(p), degree < n."""

    __slots__ = ("rep", "ctx")

    def __init__(self, rep: IntPoly, ctx: ModulusContext):
        if rep.degree != NEG_INF and rep.degree >= ctx.n:
            raise ValueError("representative degree must be < deg p; use reduce()")
        self.rep = rep
        self.ctx = ctx

    def __eq__(self, other) -> bool:
        return isinstance(other, Residue) and self.rep == other.rep and self.ctx == other.ctx

    def __hash__(self) -> int:
        return hash((self.rep, self.ctx.p))

    def __repr__(self) -> str:
        return f"<{self.rep} mod {self.ctx.p}>"

    @property
    def is_zero(self) -> bool:
        return self.rep.is_zero

    def coeff_vector(self) -> tuple[int, ...]:
        """Coefficients padded to length n."""
        return tuple(self.rep[i] for i in range(self.ctx.n))

    def _check(self, other: Residue) -> None:
        if self.ctx != other.ctx:
            raise ValueError("mismatched modulus contexts")

    def __add__(self, other: Residue | int) -> Residue:
        if isinstance(other, int):
            return Residue(self.rep + other, self.ctx)
        self._check(other)
        return Residue(self.rep + other.rep, self.ctx)

    __radd__ = __add__

    def __sub__(self, other: Residue | int) -> Residue:
        if isinstance(other, int):
            return Residue(self.rep - other, self.ctx)
        self._check(other)
        return Residue(self.rep - other.rep, self.ctx)

    def __rsub__(self, other: int) -> Residue:
        return Residue(_as_poly(other) - self.rep, self.ctx)

    def __neg__(self) -> Residue:
        return Residue(-self.rep, self.ctx)

    def __mul__(self, other: Residue | int) -> Residue:
        if isinstance(other, int):
            return Residue(self.rep * other, self.ctx)
        self._check(other)
        return reduce(self.rep * other.rep, self.ctx)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Residue:
        if k < 0:
            raise ValueError("negative residue power")
        result = self.ctx.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


def reduce(g: IntPoly | int, ctx: ModulusContext) -> Residue:
    """g mod p with degree < n, by exact division by the monic modulus."""
    g = _as_poly(g)
    if g.degree != NEG_INF and g.degree >= ctx.n:
        g = g % ctx.p
    return Residue(g, ctx)


def residue_mul(a: Residue, b: Residue) -> Residue:
    return a * b


def multiplication_matrix(r: Residue) -> list[list[int]]:
    """Exact matrix of multiplication-by-r in basis {1, X, ..., X^{n-1}} (columns)."""
    ctx = r.ctx
    cols = []
    acc = r
    for _ in range(ctx.n):
        cols.append(acc.coeff_vector())
        acc = reduce(acc.rep.shift(1), ctx)
    return [[cols[j][i] for j in range(ctx.n)] for i in range(ctx.n)]


def norm_trace(r: Residue) -> tuple[int, int]:
    """Determinant and trace of the multiplication-by-r matrix, exactly."""
    m = multiplication_matrix(r)
    trace = sum(m[i][i] for i in range(len(m)))
    return bareiss_det(m), trace


# -- polynomials over the residue ring --------------------------------------


class RingPoly:
    """Polynomial in Y with Residue coefficients (ascending order)."""

    __slots__ = ("coeffs", "ctx")

    def __init__(self, coeffs: Sequence[Residue], ctx: ModulusContext):
        cs = list(coeffs)
        while cs and cs[-1].is_zero:
            cs.pop()
        for c in cs:
            if c.ctx != ctx:
                raise ValueError("RingPoly coefficient from a different context")
        self.coeffs = tuple(cs)
        self.ctx = ctx

    @classmethod
    def from_ints(cls, coeffs: Sequence[IntPoly | int | Sequence[int]], ctx: ModulusContext) -> RingPoly:
        return cls([ctx.residue(c) for c in coeffs], ctx)

    @property
    def degree(self) -> Union[int, float]:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def evaluate(self, z: Residue) -> Residue:
        if not self.coeffs:
            return self.ctx.zero
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def __repr__(self) -> str:
        return f"RingPoly({[str(c.rep) for c in self.coeffs]} mod {self.ctx.p})"


def parse_ring_poly(text: str, ctx: ModulusContext) -> RingPoly:
    """Parse "Y^2" / "Y^2+3*Y+1" (integer coefficients) or "c0;c1;..." with
    each c_i a comma-separated residue coefficient vector."""
    s = text.strip()
    if ";" in s:
        parts = []
        for chunk in s.split(";"):
            chunk = chunk.strip()
            vec = tuple(int(tok) for tok in chunk.split(",")) if chunk else ()
            parts.append(ctx.residue(vec))
        return RingPoly(parts, ctx)
    ip = parse_poly(s, var="Y")
    return RingPoly.from_ints(list(ip.coeffs), ctx)
