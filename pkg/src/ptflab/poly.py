"""Exact multilinear polynomials over {0,1}^n.

A monomial is an ``int`` bitmask (bit j set means x_{j+1} occurs).  Since the
domain is the Boolean cube, every product is reduced with x^2 = x, so the
representation of a function is unique and a polynomial is determined by its
values on the cube.  That uniqueness is what the dense helpers exploit:
``cube_values`` (zeta transform) and ``from_values`` (Moebius transform) move
between coefficients and values in O(n 2^n).

``SparsePoly`` carries rational coefficients (``Fraction``, lowest terms);
``IntPoly`` carries Python ints.  ``UniPoly`` is an ordinary dense univariate
polynomial over the rationals (used for Chebyshev polynomials, where x^2 = x
does not apply).
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .concepts import Conjunction, Literal

INT64_SAFE = 1 << 62


# ------------------------------------------------------------------ monomials

def monomial(*variables: int) -> int:
    m = 0
    for v in variables:
        m |= 1 << v
    return m


def monomial_vars(m: int) -> tuple[int, ...]:
    out = []
    j = 0
    while m:
        if m & 1:
            out.append(j)
        m >>= 1
        j += 1
    return tuple(out)


def monomial_degree(m: int) -> int:
    return bin(m).count("1")


def monomial_key(m: int) -> tuple[int, tuple[int, ...]]:
    """Canonical order: by degree, then lexicographically by variable indices."""
    return monomial_degree(m), monomial_vars(m)


# ------------------------------------------------------------------ polynomials

class SparsePoly:
    """Multilinear polynomial with exact rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[int, object] | None = None):
        self.n = int(n)
        clean = {}
        limit = 1 << self.n
        for m, c in (terms or {}).items():
            if m < 0 or m >= limit:
                raise ValueError(f"monomial {monomial_vars(m)} outside dimension {n}")
            c = self._coerce(c)
            if c:
                clean[m] = c
        self.terms = clean

    @staticmethod
    def _coerce(c):
        return Fraction(c)

    @classmethod
    def _raw(cls, n: int, terms: dict):
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, n: int, c=1):
        return cls(n, {0: c})

    @classmethod
    def variable(cls, n: int, i: int):
        return cls(n, {1 << i: 1})

    @classmethod
    def zero(cls, n: int):
        return cls._raw(n, {})

    # -- inspection

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms, key=monomial_key))

    def coefficient(self, m: int):
        return self.terms.get(m, 0)

    @property
    def constant_term(self):
        return self.terms.get(0, 0)

    @property
    def is_integral(self) -> bool:
        return all(_is_integral(c) for c in self.terms.values())

    def degree(self) -> int:
        return degree(self)

    def weight(self):
        return weight(self)

    def variables(self) -> set[int]:
        acc = 0
        for m in self.terms:
            acc |= m
        return set(monomial_vars(acc))

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        body = to_text(self).replace("\n", " ")
        return f"{type(self).__name__}(n={self.n}, {body or '0'})"

    # -- arithmetic

    def _check(self, other: "SparsePoly"):
        if self.n != other.n:
            raise ValueError(f"ambient mismatch: {self.n} vs {other.n}")

    def _result_cls(self, other):
        if isinstance(other, SparsePoly):
            return IntPoly if isinstance(self, IntPoly) and isinstance(other, IntPoly) else SparsePoly
        if isinstance(self, IntPoly) and _is_integral(other):
            return IntPoly
        return SparsePoly

    def _lift(self, other):
        if isinstance(other, SparsePoly):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            c = _normalize(other)
            cls = type(self) if _is_integral(c) else SparsePoly
            return _make(cls, self.n, {0: c})
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return add(self, o)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return add(self, -o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return add(o, -self)

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return mul(self, other)
        if isinstance(other, (int, Rational)):
            return scale(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return pow_(self, e)

    def __call__(self, x: Sequence[int]):
        return eval_poly(self, x)


class IntPoly(SparsePoly):
    """Multilinear polynomial with integer coefficients (the PTF carrier)."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if isinstance(c, (int, np.integer)):
            return int(c)
        c = Fraction(c)
        if c.denominator != 1:
            raise ValueError(f"non-integer coefficient {c}")
        return c.numerator


def _is_integral(c) -> bool:
    return isinstance(c, (int, np.integer)) or (isinstance(c, Fraction) and c.denominator == 1)


def _normalize(c):
    if isinstance(c, (int, np.integer)):
        return int(c)
    return Fraction(c)


def _make(cls, n, terms):
    if cls is IntPoly:
        return IntPoly._raw(n, {m: int(c) for m, c in terms.items() if c})
    return SparsePoly._raw(n, {m: Fraction(c) for m, c in terms.items() if c})


def add(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    p._check(q)
    out = dict(p.terms)
    for m, c in q.terms.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return _make(p._result_cls(q), p.n, out)


def mul(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Product followed by multilinear reduction (monomials combine by OR)."""
    p._check(q)
    if len(p.terms) < len(q.terms):
        p, q = q, p
    out: dict[int, object] = {}
    for m2, c2 in q.terms.items():
        for m1, c1 in p.terms.items():
            m = m1 | m2
            out[m] = out.get(m, 0) + c1 * c2
    return _make(p._result_cls(q), p.n, out)


def scale(p: SparsePoly, c) -> SparsePoly:
    c = _normalize(c)
    return _make(p._result_cls(c), p.n, {m: v * c for m, v in p.terms.items()})


def pow_(p: SparsePoly, e: int) -> SparsePoly:
    if e < 0:
        raise ValueError("negative exponent")
    result = type(p).constant(p.n, 1)
    base = p
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def eval_poly(p: SparsePoly, x: Sequence[int]):
    if len(x) != p.n:
        raise ValueError(f"input has length {len(x)}, expected {p.n}")
    mask = sum(1 << j for j, v in enumerate(x) if v)
    total = 0
    for m, c in p.terms.items():
        if m & mask == m:
            total += c
    return total


def degree(p: SparsePoly) -> int:
    return max((monomial_degree(m) for m in p.terms), default=0)


def weight(p: SparsePoly):
    return sum(abs(c) for c in p.terms.values())


# ------------------------------------------------------------------ dense cube kernels

def zeta_transform(arr: np.ndarray) -> np.ndarray:
    """Subset sums in place: coefficients indexed by monomial -> values indexed by input."""
    size = arr.shape[0]
    j = 1
    while j < size:
        view = arr.reshape(-1, 2, j)
        view[:, 1, :] += view[:, 0, :]
        j <<= 1
    return arr


def moebius_transform(arr: np.ndarray) -> np.ndarray:
    """Inverse of ``zeta_transform``, in place."""
    size = arr.shape[0]
    j = 1
    while j < size:
        view = arr.reshape(-1, 2, j)
        view[:, 1, :] -= view[:, 0, :]
        j <<= 1
    return arr


def to_dense(p: SparsePoly, dtype=object) -> np.ndarray:
    arr = np.zeros(1 << p.n, dtype=dtype)
    for m, c in p.terms.items():
        arr[m] = c
    return arr


def cube_values(p: SparsePoly) -> np.ndarray:
    """Exact values of ``p`` on every point of {0,1}^n, indexed by bitmask.

    Returns int64 when every partial sum is provably in range, else an object array.
    """
    if p.is_integral and weight(p) < INT64_SAFE:
        return zeta_transform(to_dense(p, np.int64))
    return zeta_transform(to_dense(p, object))


def from_values(values: Sequence, n: int | None = None) -> SparsePoly:
    """The unique multilinear polynomial taking ``values`` on the cube."""
    values = np.asarray(values, dtype=object).copy()
    size = values.shape[0]
    if n is None:
        n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError("value table length must be 2^n")
    coeffs = moebius_transform(values)
    terms = {int(m): coeffs[m] for m in np.flatnonzero(coeffs != 0)}
    if all(_is_integral(c) for c in terms.values()):
        return IntPoly(n, terms)
    return SparsePoly(n, terms)


# ------------------------------------------------------------------ univariate

class UniPoly:
    """Dense univariate polynomial, coefficients low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [_normalize(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    @property
    def is_integral(self) -> bool:
        return all(_is_integral(c) for c in self.coeffs)

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)})"

    def __add__(self, other):
        a, b = self.coeffs, UniPoly._lift(other).coeffs
        size = max(len(a), len(b))
        return UniPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * UniPoly._lift(other)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return UniPoly([c * _normalize(other) for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UniPoly([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result, base = UniPoly([1]), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    @staticmethod
    def _lift(other):
        return other if isinstance(other, UniPoly) else UniPoly([other])

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def rescale(self, a) -> "UniPoly":
        """t -> q(a t)."""
        a = _normalize(a)
        return UniPoly([c * a ** i for i, c in enumerate(self.coeffs)])


def chebyshev(d: int) -> UniPoly:
    """Chebyshev polynomial of the first kind via C_{d+1} = 2 y C_d - C_{d-1}."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = UniPoly([1]), UniPoly([0, 1])
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, UniPoly([0, 2]) * cur - prev
    return cur


def _finite_differences(table: np.ndarray, axis: int) -> np.ndarray:
    """D[t] = sum_u C(t,u) (-1)^(t-u) F[u] along ``axis``."""
    out = np.empty_like(table)
    size = table.shape[axis]
    moved = np.moveaxis(table, axis, 0)
    res = np.moveaxis(out, axis, 0)
    for t in range(size):
        acc = 0
        for u in range(t + 1):
            acc = acc + math.comb(t, u) * (-1) ** (t - u) * moved[u]
        res[t] = acc
    return out


def compose_univariate(q: UniPoly, A: SparsePoly) -> SparsePoly:
    """Multilinear reduction of q(A(x))."""
    if degree(A) <= 1:
        return _compose_affine(q, A)
    result = type(A).constant(A.n, 0) if q.is_integral else SparsePoly.zero(A.n)
    for c in reversed(q.coeffs):
        result = mul(result, A) + c
    return result


def _compose_affine(q: UniPoly, A: SparsePoly) -> SparsePoly:
    # Variables sharing a coefficient are interchangeable, so the coefficient of
    # a monomial only depends on how many of its variables fall in each group;
    # it is a mixed finite difference of q along the group counts.
    n = A.n
    c0 = A.constant_term
    groups: dict[object, list[int]] = {}
    for m, c in A.terms.items():
        if m:
            groups.setdefault(c, []).append(monomial_vars(m)[0])
    keys = sorted(groups)
    sizes = [len(groups[k]) for k in keys]
    grid = np.empty([s + 1 for s in sizes] or [1], dtype=object)
    for idx in np.ndindex(*grid.shape):
        arg = c0 + sum((u * k for u, k in zip(idx, keys)), 0)
        grid[idx] = q(arg)
    for axis in range(len(keys)):
        grid = _finite_differences(grid, axis)

    out: dict[int, object] = {}
    for idx in np.ndindex(*grid.shape):
        coeff = grid[idx]
        if not coeff:
            continue
        masks = [0]
        for t, key in zip(idx, keys):
            masks = [a | b for a in masks for b in _subset_masks(groups[key], t)]
        for m in masks:
            out[m] = coeff
    cls = IntPoly if all(_is_integral(c) for c in out.values()) and isinstance(A, IntPoly) else SparsePoly
    return _make(cls, n, out)


def _subset_masks(variables: list[int], size: int) -> list[int]:
    from itertools import combinations

    return [monomial(*c) for c in combinations(variables, size)]


# ------------------------------------------------------------------ denominators & literals

def clear_denominators(p: SparsePoly) -> tuple[IntPoly, int]:
    """(C*p, C) with C the lcm of all coefficient denominators in lowest terms."""
    C = reduce(math.lcm, (Fraction(c).denominator for c in p.terms.values()), 1)
    return IntPoly._raw(p.n, {m: int(Fraction(c) * C) for m, c in p.terms.items()}), C


def literal_poly(lit: Literal, n: int) -> IntPoly:
    if lit.var >= n:
        raise ValueError(f"variable x_{lit.var + 1} outside dimension {n}")
    if lit.negated:
        return IntPoly(n, {0: 1, 1 << lit.var: -1})
    return IntPoly(n, {1 << lit.var: 1})


def conjunction_interpolator(c: Conjunction | Sequence[Literal], n: int) -> IntPoly:
    """Product of literal polynomials: 1 exactly where the conjunction holds."""
    if not isinstance(c, Conjunction):
        c = Conjunction(tuple(c))
    out = IntPoly.constant(n, 1)
    for lit in c.literals:
        out = mul(out, literal_poly(lit, n))
    return out


# ------------------------------------------------------------------ substitution

def substitute(p: SparsePoly, images: Sequence[SparsePoly]) -> SparsePoly:
    """Replace variable j of ``p`` by ``images[j]`` and reduce."""
    if len(images) < p.n:
        raise ValueError("need one image per variable")
    n_out = images[0].n if images else 0
    memo: dict[int, SparsePoly] = {0: IntPoly.constant(n_out, 1)}

    def product(m: int) -> SparsePoly:
        got = memo.get(m)
        if got is None:
            low = m & -m
            got = mul(product(m ^ low), images[low.bit_length() - 1])
            memo[m] = got
        return got

    all_int = isinstance(p, IntPoly) and all(isinstance(g, IntPoly) for g in images)
    acc: dict[int, object] = {}
    for m, c in p.terms.items():
        for mm, cc in product(m).terms.items():
            acc[mm] = acc.get(mm, 0) + c * cc
    return _make(IntPoly if all_int else SparsePoly, n_out, acc)


def substitute_literals(p: SparsePoly, literals: Sequence[Literal], n_out: int) -> SparsePoly:
    """Replace variable j of ``p`` by the literal ``literals[j]`` (x or 1-x)."""
    h = len(literals)
    if p.n != h:
        raise ValueError("one literal per variable required")
    for lit in literals:
        if lit.var >= n_out:
            raise ValueError(f"variable x_{lit.var + 1} outside dimension {n_out}")
    targets = [lit.var for lit in literals]
    if len(set(targets)) != h or h > 24:
        return substitute(p, [literal_poly(lit, n_out) for lit in literals])
    arr = to_dense(p, object)
    for j, lit in enumerate(literals):
        if lit.negated:
            # c0 + c1 (1 - y) = (c0 + c1) - c1 y
            view = arr.reshape(-1, 2, 1 << j)
            view[:, 0, :] += view[:, 1, :]
            view[:, 1, :] = -view[:, 1, :]
    idx = np.flatnonzero(arr != 0)
    out_masks = np.zeros(idx.shape, dtype=object)
    out_masks[:] = 0
    for j, v in enumerate(targets):
        out_masks = out_masks + (((idx >> j) & 1).astype(object) << v)
    terms = {int(mm): arr[i] for mm, i in zip(out_masks, idx)}
    return _make(type(p) if isinstance(p, IntPoly) else SparsePoly, n_out, terms)


def embed(p: SparsePoly, variables: Sequence[int], n_out: int) -> SparsePoly:
    """Rename variable j of ``p`` to ``variables[j]`` inside an n_out-dimensional space."""
    return substitute_literals(p, [Literal(v) for v in variables], n_out)


# ------------------------------------------------------------------ text format

_TERM = re.compile(r"^([+-])\s*(\d+(?:/\d+)?)((?:\s*\*\s*x_\d+)*)\s*$")


def to_text(p: SparsePoly) -> str:
    """One term per line, '+c * x_i * x_j', canonical (degree, lex) order, 1-based variables."""
    lines = []
    for m in sorted(p.terms, key=monomial_key):
        c = p.terms[m]
        sign = "-" if c < 0 else "+"
        body = str(abs(c))
        for v in monomial_vars(m):
            body += f" * x_{v + 1}"
        lines.append(sign + body)
    return "\n".join(lines)


def from_text(text: str, n: int) -> SparsePoly:
    terms: dict[int, object] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        match = _TERM.match(line)
        if not match:
            raise ValueError(f"malformed term: {line!r}")
        sign, coeff, tail = match.groups()
        c = Fraction(coeff) * (-1 if sign == "-" else 1)
        m = monomial(*(int(v) - 1 for v in re.findall(r"x_(\d+)", tail)))
        terms[m] = terms.get(m, 0) + c
    if all(Fraction(c).denominator == 1 for c in terms.values()):
        return IntPoly(n, terms)
    return SparsePoly(n, terms)
