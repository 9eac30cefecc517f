"""Polynomial threshold functions for decision lists.

Three constructions, all in exact integer arithmetic:

* ``outer_ptf``: cut the list into blocks, write each block exactly as a
  telescoping polynomial, and weight block i by 2^(K-i+1).
* ``inner_approx``: a low-degree approximator of one block built from a
  Chebyshev amplifier; exact (zero) on the all-zero input.
* ``compose_ptf``: the outer sum with base 3 and every block replaced by its
  inner approximator.  ``main_ptf`` picks the block length from k and
  ``rdl_ptf`` lifts the construction to lists of conjunctions.

Verification is exhaustive over the cube (``verify_ptf_exhaustive``).
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .concepts import (
    Concept,
    DecisionList,
    Literal,
    ModifiedDecisionList,
    RDecisionList,
    bits_to_str,
    ceil_log2,
    lex_order,
    mask_to_bits,
    oddmaxbit,
    random_decision_list,
    split_blocks,
)
from .poly import (
    IntPoly,
    SparsePoly,
    UniPoly,
    chebyshev,
    compose_univariate,
    conjunction_interpolator,
    cube_values,
    from_values,
    literal_poly,
    mul,
    substitute,
    substitute_literals,
)

DEFAULT_EXHAUSTION_LIMIT = 22


def exhaustion_limit() -> int:
    """Largest n verified by full enumeration; PTFLAB_EXHAUSTION_LIMIT overrides."""
    value = os.environ.get("PTFLAB_EXHAUSTION_LIMIT")
    return int(value) if value else DEFAULT_EXHAUSTION_LIMIT


@dataclass
class PTF:
    poly: IntPoly
    construction: str
    h: Optional[int] = None
    d_cheb: Optional[int] = None
    exponent: Optional[int] = None
    C: int = 1
    blocks: int = 0

    @property
    def degree(self) -> int:
        return self.poly.degree()

    @property
    def weight(self) -> int:
        return self.poly.weight()

    @property
    def log2_weight(self) -> float:
        return log2_int(self.weight)

    def metadata(self) -> dict:
        return {
            "construction": self.construction,
            "h": self.h,
            "d_cheb": self.d_cheb,
            "exponent": self.exponent,
            "C": str(self.C),
            "blocks": self.blocks,
            "degree": self.degree,
            "weight": str(self.weight),
            "log2_weight": round(self.log2_weight, 6),
            "terms": len(self.poly),
        }


@dataclass
class VerifyReport:
    domain_size: int
    mismatches: int
    zero_hits: int
    witness: Optional[str]
    degree: int
    weight: int
    max_error: Optional[Fraction] = None

    @property
    def valid(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weight"] = str(self.weight)
        d["max_error"] = None if self.max_error is None else str(self.max_error)
        d["valid"] = self.valid
        return d


@dataclass
class TradeoffRow:
    k: int
    h: int
    degree: int
    log2_weight: float
    bound_log2_weight: float
    verified: Optional[bool] = None
    family: str = field(default="oddmaxbit", repr=False)
    construction: str = field(default="compose", repr=False)

    CSV_COLUMNS = ("k", "h", "degree", "log2_weight", "bound_log2_weight", "verified")

    def csv_row(self) -> list[str]:
        verified = "" if self.verified is None else str(self.verified).lower()
        return [str(self.k), str(self.h), str(self.degree), f"{self.log2_weight:.6f}",
                f"{self.bound_log2_weight:.6f}", verified]


def log2_int(w: int) -> float:
    if w <= 0:
        return float("-inf") if w == 0 else float("nan")
    shift = max(0, w.bit_length() - 60)
    return shift + math.log2(w >> shift)


# ------------------------------------------------------------------ outer construction

def modified_dl_exact_poly(f: ModifiedDecisionList) -> IntPoly:
    """Telescoping sum l_1 b_1 + (1-l_1) l_2 b_2 + ... ; equals f on the whole cube."""
    total = IntPoly.zero(f.n)
    prefix = IntPoly.constant(f.n, 1)
    for lit, b in f.items:
        lp = literal_poly(lit, f.n)
        total = total + mul(prefix, lp) * b
        prefix = mul(prefix, 1 - lp)
    return total


def outer_ptf(L: DecisionList, h: int, base: int = 2) -> PTF:
    if L.k == 0:
        return PTF(IntPoly.constant(L.n, L.default), "outer", h=h, blocks=0)
    if not 1 <= h <= L.k:
        raise ValueError(f"block length must satisfy 1 <= h <= k={L.k}, got {h}")
    blocks, default = split_blocks(L, h)
    K = len(blocks)
    acc: dict[int, int] = {0: default}
    for i, f in enumerate(blocks, start=1):
        factor = base ** (K - i + 1)
        for m, c in modified_dl_exact_poly(f).terms.items():
            acc[m] = acc.get(m, 0) + factor * c
    return PTF(IntPoly(L.n, acc), "outer", h=h, blocks=K)


# ------------------------------------------------------------------ inner approximator

def chebyshev_degree(h: int) -> int:
    """ceil(sqrt(h))."""
    return math.isqrt(h - 1) + 1 if h > 0 else 0


def amplification_exponent(h: int) -> int:
    """Even integer reading of "2 log h": max(2, 2 ceil(log2 h))."""
    return max(2, 2 * ceil_log2(h))


@lru_cache(maxsize=None)
def amplifier(h: int) -> tuple[UniPoly, Fraction]:
    """q(y) = C_d(y (1 + 1/h)) with d = ceil(sqrt h), together with q(1)."""
    q = chebyshev(chebyshev_degree(h)).rescale(1 + Fraction(1, h))
    return q, Fraction(q(1))


def tail_arith(h: int, i: int) -> IntPoly:
    """A_i(x) = h - i + x_i + sum_{j<i} (1 - x_j) over block coordinates (i is 1-based)."""
    terms = {0: h - i + (i - 1), 1 << (i - 1): 1}
    for j in range(i - 1):
        terms[1 << j] = -1
    return IntPoly(h, terms)


def tail_indicator(h: int, i: int) -> IntPoly:
    """T_i(x) = (1-x_1)...(1-x_{i-1}) x_i."""
    lits = [Literal(j, True) for j in range(i - 1)] + [Literal(i - 1)]
    return conjunction_interpolator(lits, h)


@lru_cache(maxsize=None)
def approximator_terms(h: int) -> tuple[SparsePoly, ...]:
    """P_1..P_h with P_i = (q(A_i/h) / q(1))^e, as exact multilinear polynomials.

    The univariate part is powered first and then composed with the affine
    A_i; multilinear reduction commutes with both steps.
    """
    if h < 2:
        raise ValueError("inner approximator needs h >= 2")
    q, q1 = amplifier(h)
    G = (q.rescale(Fraction(1, h)) * (1 / q1)) ** amplification_exponent(h)
    return tuple(compose_univariate(G, tail_arith(h, i)) for i in range(1, h + 1))


@lru_cache(maxsize=None)
def _integer_terms(h: int) -> tuple[np.ndarray, int]:
    """P_1..P_h over one common denominator D, as dense integer rows indexed by monomial."""
    terms = approximator_terms(h)
    D = math.lcm(*(c.denominator for P in terms for c in P.terms.values()))
    rows = np.zeros((h, 1 << h), dtype=object)
    for i, P in enumerate(terms):
        for m, c in P.terms.items():
            rows[i, m] = c.numerator * (D // c.denominator)
    return rows, D


@lru_cache(maxsize=8192)
def _abstract_inner(labels: tuple[int, ...]) -> tuple[IntPoly, int]:
    h = len(labels)
    rows, D = _integer_terms(h)
    total = np.asarray(labels, dtype=object) @ rows  # D * R
    total[0] = 0  # p = R - R(0^h)
    nz = np.flatnonzero(total != 0)
    g = math.gcd(D, *(int(v) for v in total[nz]))
    # lcm of the reduced denominators of total/D is exactly D/g
    return IntPoly._raw(h, {int(m): int(total[m]) // g for m in nz}), D // g


def inner_approx(f: ModifiedDecisionList) -> tuple[IntPoly, int]:
    """(p~, C) with p~(0-fallthrough) = 0 and |p~(x) - C f(x)| <= C/h on the cube."""
    if f.h < 2:
        raise ValueError("inner approximator needs a block of length >= 2")
    ptilde, C = _abstract_inner(f.labels)
    return substitute_literals(ptilde, f.literals, f.n), C


# ------------------------------------------------------------------ composition

def main_block_length(k: int) -> int:
    """h = k^(2/3) / log2(k)^(4/3), rounded half-up, at least 2, at most k."""
    if k < 2:
        raise ValueError("need k >= 2")
    raw = k ** (2 / 3) / math.log2(k) ** (4 / 3)
    return min(k, max(2, math.floor(raw + 0.5)))


def compose_ptf(L: DecisionList, h: int) -> PTF:
    if not 2 <= h <= L.k:
        raise ValueError(f"block length must satisfy 2 <= h <= k={L.k}, got {h}")
    blocks, default = split_blocks(L, h)
    parts = []
    for f in blocks:
        if f.h >= 2:
            parts.append(inner_approx(f))
        else:
            # a length-1 block is its own exact approximator
            parts.append((modified_dl_exact_poly(f), 1))
    C = math.lcm(*(c for _, c in parts))
    K = len(blocks)
    acc: dict[int, int] = {0: C * default}
    for i, (pt, Ci) in enumerate(parts, start=1):
        factor = 3 ** (K - i + 1) * (C // Ci)
        for m, c in pt.terms.items():
            acc[m] = acc.get(m, 0) + factor * c
    return PTF(IntPoly(L.n, acc), "compose", h=h, d_cheb=chebyshev_degree(h),
               exponent=amplification_exponent(h), C=C, blocks=K)


def main_ptf(L: DecisionList) -> PTF:
    if L.k < 2:
        raise ValueError("main construction needs k >= 2")
    ptf = compose_ptf(L, main_block_length(L.k))
    ptf.construction = "main"
    return ptf


def substitute_boolean(p: SparsePoly, images: Sequence[SparsePoly]) -> SparsePoly:
    """Substitution for {0,1}-valued images, done through value tables.

    Exact and equal to ``substitute`` because the multilinear form of a
    function on the cube is unique; requires both cubes to fit in memory.
    """
    n_out = images[0].n
    abstract = cube_values(p)
    index = np.zeros(1 << n_out, dtype=np.int64)
    for j, g in enumerate(images):
        vals = np.asarray(cube_values(g), dtype=object)
        if not np.all((vals == 0) | (vals == 1)):
            raise ValueError("substitute_boolean needs {0,1}-valued images")
        index |= vals.astype(np.int64) << j
    return from_values(np.asarray(abstract, dtype=object)[index], n_out)


def rdl_ptf(L: RDecisionList, h: Optional[int] = None) -> PTF:
    """Construction over one abstract variable per conjunction, then interpolate."""
    abstract = DecisionList(L.k, tuple((Literal(i), b) for i, (_, b) in enumerate(L.items)), L.default)
    if L.k >= 2:
        h = main_block_length(L.k) if h is None else h
        base = compose_ptf(abstract, h)
    else:
        base = outer_ptf(abstract, 1)
    if L.k == 0:
        return PTF(IntPoly.constant(L.n, L.default), "rdl", blocks=0)
    images = [conjunction_interpolator(c, L.n) for c, _ in L.items]
    limit = exhaustion_limit()
    if L.k <= limit and L.n <= limit:
        poly = substitute_boolean(base.poly, images)
    else:
        poly = substitute(base.poly, images)
    return PTF(IntPoly(L.n, poly.terms), "rdl", h=base.h, d_cheb=base.d_cheb,
               exponent=base.exponent, C=base.C, blocks=base.blocks)


# ------------------------------------------------------------------ verification

def _first_in_lex(bad: np.ndarray, n: int) -> Optional[str]:
    if not bad.any():
        return None
    order = lex_order(n)
    pos = np.flatnonzero(bad[order])[0]
    return bits_to_str(mask_to_bits(int(order[pos]), n))


def _signs(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pos = np.asarray(values > 0, dtype=bool)
    neg = np.asarray(values < 0, dtype=bool)
    return pos, neg


def verify_ptf_exhaustive(p: Union[PTF, SparsePoly], concept: Concept,
                          n: Optional[int] = None, limit: Optional[int] = None) -> VerifyReport:
    """Check sign(p(x)) = concept(x) on all 2^n inputs; p(x) = 0 counts as a mismatch."""
    poly = p.poly if isinstance(p, PTF) else p
    n = concept.n if n is None else n
    limit = exhaustion_limit() if limit is None else limit
    if n > limit:
        raise ValueError(f"n={n} exceeds exhaustion limit {limit}")
    if poly.n != n or concept.n != n:
        raise ValueError("dimension mismatch between polynomial and concept")
    values = cube_values(poly)
    table = concept.table()
    pos, neg = _signs(values)
    zero = ~(pos | neg)
    bad = zero | (pos & (table < 0)) | (neg & (table > 0))
    return VerifyReport(1 << n, int(bad.sum()), int(zero.sum()), _first_in_lex(bad, n),
                        poly.degree(), poly.weight())


def verify_approximator(ptilde: IntPoly, C: int, f: ModifiedDecisionList,
                        limit: Optional[int] = None) -> VerifyReport:
    """Check |p~(x) - C f(x)| <= C/h everywhere and p~ = 0 where f falls off."""
    limit = exhaustion_limit() if limit is None else limit
    if f.n > limit:
        raise ValueError(f"n={f.n} exceeds exhaustion limit {limit}")
    values = np.asarray(cube_values(ptilde), dtype=object)
    target = f.table().astype(object) * C
    err = np.abs(values - target)
    bad = np.asarray(err * f.h > C, dtype=bool) | np.asarray((f.table() == 0) & (values != 0), dtype=bool)
    return VerifyReport(1 << f.n, int(bad.sum()), 0, _first_in_lex(bad, f.n),
                        ptilde.degree(), ptilde.weight(), max_error=Fraction(int(err.max()), C))


# ------------------------------------------------------------------ tradeoff profile

def compose_bound_log2(k: int, h: int, c: float = 1.0) -> float:
    """c * (ceil(k/h) + sqrt(h) log2^2 h)."""
    return c * (math.ceil(k / h) + math.sqrt(h) * math.log2(h) ** 2)


def outer_bound_log2(k: int, h: int) -> int:
    return 2 + math.ceil(k / h) + h


def tradeoff_profile(family: str, ks: Iterable[int], hs: Iterable[int], construction: str = "compose",
                     seed: int = 0, verify: bool = True, bound_constant: float = 1.0,
                     limit: Optional[int] = None) -> list[TradeoffRow]:
    """Measured degree and log2 weight per (k, h), next to the analytic curve."""
    limit = exhaustion_limit() if limit is None else limit
    rows = []
    hs = list(hs)
    for k in ks:
        if family == "oddmaxbit":
            L = oddmaxbit(k)
        elif family == "random":
            L = random_decision_list(k, k, [seed, k])
        else:
            raise ValueError(f"unknown family {family!r}")
        for h in hs:
            if construction == "compose":
                if not 2 <= h <= k:
                    continue
                ptf = compose_ptf(L, h)
                bound = compose_bound_log2(k, h, bound_constant)
            elif construction == "outer":
                if not 1 <= h <= k:
                    continue
                ptf = outer_ptf(L, h)
                bound = outer_bound_log2(k, h)
            else:
                raise ValueError(f"unknown construction {construction!r}")
            verified = None
            if verify:
                if k > limit:
                    raise ValueError(f"k={k} exceeds exhaustion limit {limit}")
                verified = verify_ptf_exhaustive(ptf, L, limit=limit).valid
            rows.append(TradeoffRow(k, h, ptf.degree, round(ptf.log2_weight, 6), round(bound, 6),
                                    verified, family, construction))
    return rows
