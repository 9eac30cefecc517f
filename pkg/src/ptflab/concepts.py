"""Concept classes over {0,1}^n: decision lists and their variants, trees, parities.

Variables are 0-indexed internally and 1-indexed in every serialized form.
An input x is any sequence of 0/1 values of length n.  Whole-cube evaluation
(``truth_table``) indexes inputs by bitmask, bit j holding x_{j+1}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

Label = int  # -1 or +1


def _check_label(b: int) -> int:
    if b not in (-1, 1):
        raise ValueError(f"label must be -1 or +1, got {b!r}")
    return int(b)


def _check_input(x: Sequence[int], n: int) -> None:
    if len(x) != n:
        raise ValueError(f"input has length {len(x)}, expected {n}")


def cube_bits(n: int) -> np.ndarray:
    """Bits of every point of the cube: row j, column mask -> x_{j+1}."""
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(bool)


def lex_order(n: int) -> np.ndarray:
    """Masks listed in lexicographic order of (x_1, ..., x_n), x_1 most significant."""
    t = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(t)
    for j in range(n):
        out |= ((t >> (n - 1 - j)) & 1) << j
    return out


def bits_to_str(x: Sequence[int]) -> str:
    return "".join("1" if v else "0" for v in x)


def str_to_bits(s: str) -> tuple[int, ...]:
    s = s.strip()
    if any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    return tuple(int(c) for c in s)


def mask_to_bits(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> j) & 1 for j in range(n))


def bits_to_mask(x: Sequence[int]) -> int:
    return sum(1 << j for j, v in enumerate(x) if v)


@dataclass(frozen=True)
class Literal:
    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 0:
            raise ValueError("variable index must be non-negative")

    def fires(self, x: Sequence[int]) -> bool:
        return bool(x[self.var]) != self.negated

    def table(self, bits: np.ndarray) -> np.ndarray:
        col = bits[self.var]
        return ~col if self.negated else col

    def __str__(self):
        return ("~" if self.negated else "") + f"x_{self.var + 1}"


def _check_vars(n: int, literals: Iterable[Literal]) -> None:
    for lit in literals:
        if lit.var >= n:
            raise ValueError(f"variable x_{lit.var + 1} outside dimension {n}")


@dataclass(frozen=True)
class Conjunction:
    literals: tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        seen = [lit.var for lit in self.literals]
        if len(set(seen)) != len(seen):
            raise ValueError("conjunction repeats a variable")

    @property
    def width(self) -> int:
        return len(self.literals)

    def fires(self, x: Sequence[int]) -> bool:
        return all(lit.fires(x) for lit in self.literals)

    def table(self, bits: np.ndarray) -> np.ndarray:
        out = np.ones(bits.shape[1], dtype=bool)
        for lit in self.literals:
            out &= lit.table(bits)
        return out

    def __str__(self):
        return " & ".join(map(str, self.literals)) or "true"


@dataclass(frozen=True)
class DecisionList:
    n: int
    items: tuple[tuple[Literal, int], ...]
    default: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((lit, _check_label(b)) for lit, b in self.items))
        _check_label(self.default)
        _check_vars(self.n, (lit for lit, _ in self.items))

    @property
    def k(self) -> int:
        return len(self.items)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_decision_list(self, x)

    def table(self) -> np.ndarray:
        bits = cube_bits(self.n)
        out = np.full(1 << self.n, self.default, dtype=np.int8)
        for lit, b in reversed(self.items):
            out[lit.table(bits)] = b
        return out


@dataclass(frozen=True)
class ModifiedDecisionList:
    """Decision list whose fall-off value is 0."""

    n: int
    items: tuple[tuple[Literal, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((lit, _check_label(b)) for lit, b in self.items))
        _check_vars(self.n, (lit for lit, _ in self.items))

    @property
    def h(self) -> int:
        return len(self.items)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.items)

    @property
    def literals(self) -> tuple[Literal, ...]:
        return tuple(lit for lit, _ in self.items)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_modified_dl(self, x)

    def table(self) -> np.ndarray:
        bits = cube_bits(self.n)
        out = np.zeros(1 << self.n, dtype=np.int8)
        for lit, b in reversed(self.items):
            out[lit.table(bits)] = b
        return out


@dataclass(frozen=True)
class RDecisionList:
    n: int
    r: int
    items: tuple[tuple[Conjunction, int], ...]
    default: int

    def __post_init__(self):
        items = tuple((c if isinstance(c, Conjunction) else Conjunction(tuple(c)), _check_label(b))
                      for c, b in self.items)
        object.__setattr__(self, "items", items)
        _check_label(self.default)
        for c, _ in items:
            if c.width > self.r:
                raise ValueError(f"conjunction of width {c.width} exceeds r={self.r}")
            _check_vars(self.n, c.literals)

    @property
    def k(self) -> int:
        return len(self.items)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_rdl(self, x)

    def table(self) -> np.ndarray:
        bits = cube_bits(self.n)
        out = np.full(1 << self.n, self.default, dtype=np.int8)
        for c, b in reversed(self.items):
            out[c.table(bits)] = b
        return out


@dataclass(frozen=True)
class Leaf:
    label: int

    def __post_init__(self):
        _check_label(self.label)


@dataclass(frozen=True)
class Node:
    var: int
    zero: "Tree"
    one: "Tree"


Tree = Union[Leaf, Node]


@dataclass(frozen=True)
class DecisionTree:
    n: int
    root: Tree

    def __post_init__(self):
        def walk(t, path):
            if isinstance(t, Leaf):
                return
            if t.var >= self.n or t.var < 0:
                raise ValueError(f"variable x_{t.var + 1} outside dimension {self.n}")
            if t.var in path:
                raise ValueError(f"variable x_{t.var + 1} repeats on a root-to-leaf path")
            walk(t.zero, path | {t.var})
            walk(t.one, path | {t.var})

        walk(self.root, frozenset())

    @property
    def size(self) -> int:
        def count(t):
            return 1 if isinstance(t, Leaf) else count(t.zero) + count(t.one)

        return count(self.root)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_tree(self, x)

    def table(self) -> np.ndarray:
        bits = cube_bits(self.n)
        out = np.zeros(1 << self.n, dtype=np.int8)

        def fill(t, sel):
            if isinstance(t, Leaf):
                out[sel] = t.label
                return
            col = bits[t.var]
            fill(t.zero, sel & ~col)
            fill(t.one, sel & col)

        fill(self.root, np.ones(1 << self.n, dtype=bool))
        return out


@dataclass(frozen=True)
class ParityFunction:
    n: int
    support: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.support))
        if any(v < 0 or v >= self.n for v in self.support):
            raise ValueError("support variable outside dimension")

    @property
    def k(self) -> int:
        return len(self.support)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_parity(self, x)

    def table(self) -> np.ndarray:
        bits = cube_bits(self.n)
        odd = np.zeros(1 << self.n, dtype=bool)
        for v in self.support:
            odd ^= bits[v]
        return np.where(odd, -1, 1).astype(np.int8)


Concept = Union[DecisionList, ModifiedDecisionList, RDecisionList, DecisionTree, ParityFunction]


def eval_decision_list(L: DecisionList, x: Sequence[int]) -> int:
    _check_input(x, L.n)
    for lit, b in L.items:
        if lit.fires(x):
            return b
    return L.default


def eval_modified_dl(f: ModifiedDecisionList, x: Sequence[int]) -> int:
    _check_input(x, f.n)
    for lit, b in f.items:
        if lit.fires(x):
            return b
    return 0


def eval_rdl(L: RDecisionList, x: Sequence[int]) -> int:
    _check_input(x, L.n)
    for c, b in L.items:
        if c.fires(x):
            return b
    return L.default


def eval_tree(T: DecisionTree, x: Sequence[int]) -> int:
    _check_input(x, T.n)
    t = T.root
    while isinstance(t, Node):
        t = t.one if x[t.var] else t.zero
    return t.label


def eval_parity(P: ParityFunction, x: Sequence[int]) -> int:
    _check_input(x, P.n)
    return -1 if sum(x[v] for v in P.support) % 2 else 1


def truth_table(concept: Concept) -> np.ndarray:
    """Values of ``concept`` on every point of its cube, indexed by bitmask."""
    return concept.table()


def oddmaxbit(n: int) -> DecisionList:
    """The alternating list (x_1,-1),(x_2,+1),...,(x_n,(-1)^n),(-1)^(n+1)."""
    if n < 1:
        raise ValueError("oddmaxbit needs n >= 1")
    items = tuple((Literal(i), (-1) ** (i + 1)) for i in range(n))
    return DecisionList(n, items, (-1) ** (n + 1))


def random_decision_list(k: int, n: int, seed) -> DecisionList:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    vars_ = rng.choice(n, size=k, replace=False)
    neg = rng.integers(0, 2, size=k)
    labels = rng.choice([-1, 1], size=k + 1)
    items = tuple((Literal(int(v), bool(g)), int(b)) for v, g, b in zip(vars_, neg, labels[:k]))
    return DecisionList(n, items, int(labels[k]))


def random_modified_dl(h: int, n: int, seed) -> ModifiedDecisionList:
    L = random_decision_list(h, n, seed)
    return ModifiedDecisionList(n, L.items)


def random_parity(k: int, n: int, seed) -> ParityFunction:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    return ParityFunction(n, frozenset(int(v) for v in rng.choice(n, size=k, replace=False)))


def random_tree(s: int, n: int, seed) -> DecisionTree:
    """A random tree with exactly ``s`` leaves (requires s <= 2^n)."""
    if s < 1 or s > (1 << n):
        raise ValueError(f"cannot build a tree with {s} leaves over {n} variables")
    rng = np.random.default_rng(seed)

    def build(leaves, free):
        if leaves == 1:
            return Leaf(int(rng.choice([-1, 1])))
        var = int(rng.choice(sorted(free)))
        rest = free - {var}
        cap = 1 << len(rest)
        lo, hi = max(1, leaves - cap), min(cap, leaves - 1)
        left = int(rng.integers(lo, hi + 1))
        return Node(var, build(left, rest), build(leaves - left, rest))

    return DecisionTree(n, build(s, frozenset(range(n))))


def split_blocks(L: DecisionList, h: int) -> tuple[list[ModifiedDecisionList], int]:
    """Cut L into consecutive blocks of length h; the last one may be shorter."""
    if h < 1:
        raise ValueError("block length must be >= 1")
    blocks = [ModifiedDecisionList(L.n, L.items[i:i + h]) for i in range(0, L.k, h)]
    return blocks, L.default


def tree_rank(T: Union[DecisionTree, Tree]) -> int:
    t = T.root if isinstance(T, DecisionTree) else T
    if isinstance(t, Leaf):
        return 0
    r0, r1 = tree_rank(t.zero), tree_rank(t.one)
    return max(r0, r1) if r0 != r1 else r0 + 1


def tree_to_rdl(T: DecisionTree) -> RDecisionList:
    """Rank-recursive conversion of a tree into an equivalent rank(T)-decision list."""

    def convert(t):
        # returns (items, default) with every conjunction width <= rank(t)
        if isinstance(t, Leaf):
            return [], t.label
        r0, r1 = tree_rank(t.zero), tree_rank(t.one)
        if r1 < r0:
            first, first_lit, second = t.one, Literal(t.var, False), t.zero
        else:
            first, first_lit, second = t.zero, Literal(t.var, True), t.one
        items_a, default_a = convert(first)
        items_b, default_b = convert(second)
        items = [(Conjunction((first_lit,) + c.literals), b) for c, b in items_a]
        items.append((Conjunction((first_lit,)), default_a))
        return items + items_b, default_b

    items, default = convert(T.root)
    r = max((c.width for c, _ in items), default=0)
    return RDecisionList(T.n, r, tuple(items), default)


# ---------------------------------------------------------------- serialization

def _lit_json(lit: Literal) -> list:
    return [lit.var + 1, lit.negated]


def _lit_from(entry) -> Literal:
    return Literal(int(entry[0]) - 1, bool(entry[1]))


def _tree_json(t: Tree) -> dict:
    if isinstance(t, Leaf):
        return {"leaf": t.label}
    return {"var": t.var + 1, "zero": _tree_json(t.zero), "one": _tree_json(t.one)}


def _tree_from(d: dict) -> Tree:
    if "leaf" in d:
        return Leaf(int(d["leaf"]))
    return Node(int(d["var"]) - 1, _tree_from(d["zero"]), _tree_from(d["one"]))


def concept_to_dict(c: Concept) -> dict:
    if isinstance(c, DecisionList):
        return {"kind": "decision_list", "n": c.n,
                "items": [[lit.var + 1, lit.negated, b] for lit, b in c.items],
                "default": c.default}
    if isinstance(c, ModifiedDecisionList):
        return {"kind": "modified_decision_list", "n": c.n,
                "items": [[lit.var + 1, lit.negated, b] for lit, b in c.items]}
    if isinstance(c, RDecisionList):
        return {"kind": "r_decision_list", "n": c.n, "r": c.r,
                "items": [[[_lit_json(l) for l in conj.literals], b] for conj, b in c.items],
                "default": c.default}
    if isinstance(c, DecisionTree):
        return {"kind": "decision_tree", "n": c.n, "root": _tree_json(c.root)}
    if isinstance(c, ParityFunction):
        return {"kind": "parity", "n": c.n, "support": sorted(v + 1 for v in c.support)}
    raise TypeError(f"not a concept: {type(c).__name__}")


def concept_from_dict(d: dict) -> Concept:
    kind, n = d["kind"], int(d["n"])
    if kind == "decision_list":
        items = tuple((Literal(int(v) - 1, bool(neg)), int(b)) for v, neg, b in d["items"])
        return DecisionList(n, items, int(d["default"]))
    if kind == "modified_decision_list":
        items = tuple((Literal(int(v) - 1, bool(neg)), int(b)) for v, neg, b in d["items"])
        return ModifiedDecisionList(n, items)
    if kind == "r_decision_list":
        items = tuple((Conjunction(tuple(_lit_from(e) for e in lits)), int(b)) for lits, b in d["items"])
        return RDecisionList(n, int(d["r"]), items, int(d["default"]))
    if kind == "decision_tree":
        return DecisionTree(n, _tree_from(d["root"]))
    if kind == "parity":
        return ParityFunction(n, frozenset(int(v) - 1 for v in d["support"]))
    raise ValueError(f"unknown concept kind {kind!r}")


def dumps(c: Concept) -> str:
    return json.dumps(concept_to_dict(c), sort_keys=True)


def loads(s: str) -> Concept:
    return concept_from_dict(json.loads(s))


def ceil_log2(s: int) -> int:
    return max(0, s - 1).bit_length()
