"""Online learning of decision lists: Expanded-Winnow and the baseline learners.

Expanded-Winnow maps x in {0,1}^n to the vector of all monomials of degree
<= d (the empty monomial included as a constant feature) and runs Balanced
Winnow over that vector.  Weights are exact: every weight is a power of the
promotion factor, so the state stores one integer exponent per feature and
w+ = alpha^c, w- = alpha^-c.

Teachers follow the mistake-bound protocol.  The adversarial teacher scans the
cube in lexicographic order and feeds the first input the current hypothesis
gets wrong; the i.i.d. teacher draws uniform inputs.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .concepts import Concept, Literal, lex_order
from .poly import SparsePoly, monomial_key, zeta_transform

DEFAULT_ALPHA = Fraction(3, 2)


# ------------------------------------------------------------------ features

@dataclass(frozen=True)
class FeatureMap:
    n: int
    d: int
    monomials: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.d < 0 or self.d > self.n:
            raise ValueError(f"expansion degree must lie in [0, n], got {self.d}")
        mons = [sum(1 << v for v in c) for deg in range(self.d + 1)
                for c in itertools.combinations(range(self.n), deg)]
        object.__setattr__(self, "monomials", tuple(sorted(mons, key=monomial_key)))

    @property
    def N(self) -> int:
        return len(self.monomials)

    def active(self, mask: int) -> np.ndarray:
        """Indices of features equal to 1 on the input with bitmask ``mask``."""
        return np.fromiter((j for j, m in enumerate(self.monomials) if m & mask == m), dtype=np.int64)


def feature_count(n: int, d: int) -> int:
    return sum(math.comb(n, i) for i in range(d + 1))


def expand_features(x: Sequence[int], fm: FeatureMap) -> np.ndarray:
    if len(x) != fm.n:
        raise ValueError(f"input has length {len(x)}, expected {fm.n}")
    mask = sum(1 << j for j, v in enumerate(x) if v)
    return np.fromiter((1 if m & mask == m else 0 for m in fm.monomials), dtype=np.uint8, count=fm.N)


# ------------------------------------------------------------------ Balanced Winnow

@dataclass(frozen=True)
class LearnerConfig:
    d: int
    alpha: Fraction = DEFAULT_ALPHA
    theta: Optional[Fraction] = None  # None means N, the number of features
    exact: bool = True

    def resolved_theta(self, N: int) -> Fraction:
        return Fraction(N) if self.theta is None else Fraction(self.theta)

    def to_dict(self) -> dict:
        return {"d": self.d, "alpha": str(self.alpha),
                "theta": None if self.theta is None else str(self.theta), "exact": self.exact}


@dataclass(frozen=True)
class WinnowState:
    alpha: Fraction
    theta: Fraction
    exponents: tuple[int, ...]  # net promotions per feature
    mistakes: int = 0

    @classmethod
    def initial(cls, N: int, alpha=DEFAULT_ALPHA, theta=None) -> "WinnowState":
        alpha = Fraction(alpha)
        if alpha <= 1:
            raise ValueError("promotion factor must exceed 1")
        theta = Fraction(N) if theta is None else Fraction(theta)
        if theta <= 0:
            raise ValueError("threshold must be positive")
        return cls(alpha, theta, (0,) * N)

    @property
    def N(self) -> int:
        return len(self.exponents)

    def w_plus(self, j: int) -> Fraction:
        return self.alpha ** self.exponents[j]

    def w_minus(self, j: int) -> Fraction:
        return self.alpha ** -self.exponents[j]

    def net_weight(self, j: int) -> Fraction:
        c = self.exponents[j]
        return self.alpha ** c - self.alpha ** -c


def winnow_score(s: WinnowState, z: Sequence[int]) -> Fraction:
    if len(z) != s.N:
        raise ValueError(f"expanded example has length {len(z)}, expected {s.N}")
    return sum((s.net_weight(j) for j, v in enumerate(z) if v), Fraction(0))


def winnow_predict(s: WinnowState, z: Sequence[int]) -> int:
    return 1 if winnow_score(s, z) >= s.theta else -1


def winnow_update(s: WinnowState, z: Sequence[int], y_true: int) -> WinnowState:
    """Promote (y=+1) or demote (y=-1) every active feature, only after a mistake."""
    if winnow_predict(s, z) == y_true:
        return s
    exps = list(s.exponents)
    for j, v in enumerate(z):
        if v:
            exps[j] += y_true
    return WinnowState(s.alpha, s.theta, tuple(exps), s.mistakes + 1)


def hypothesis_poly(s: WinnowState, fm: FeatureMap) -> SparsePoly:
    """The learner's hypothesis as a polynomial over x: sum_j (w+_j - w-_j) m_j(x) - theta."""
    terms: dict[int, Fraction] = {0: -s.theta}
    for j, m in enumerate(fm.monomials):
        terms[m] = terms.get(m, 0) + s.net_weight(j)
    return SparsePoly(fm.n, terms)


class ExpandedWinnow:
    """Balanced Winnow over the degree-<=d monomial expansion."""

    def __init__(self, n: int, config: LearnerConfig):
        self.fm = FeatureMap(n, config.d)
        self.config = config
        self.state = WinnowState.initial(self.fm.N, config.alpha, config.theta)
        self._pow_cache: dict[int, Fraction] = {}
        self._float_alpha = float(config.alpha)
        self._dense: Optional[np.ndarray] = None

    @property
    def name(self) -> str:
        return f"Expanded-Winnow (d={self.config.d})"

    def _net(self, c: int) -> Fraction:
        got = self._pow_cache.get(c)
        if got is None:
            a = self.state.alpha
            got = self._pow_cache[c] = a ** c - a ** -c
        return got

    def exact_score(self, mask: int) -> Fraction:
        exps = self.state.exponents
        return sum((self._net(exps[j]) for j in self.fm.active(mask)), Fraction(0))

    def predict_mask(self, mask: int) -> int:
        if self.config.exact:
            return 1 if self.exact_score(mask) >= self.state.theta else -1
        return 1 if self._float_scores_at(mask) >= float(self.state.theta) else -1

    def _float_scores_at(self, mask: int) -> float:
        a = self._float_alpha
        return sum(a ** self.state.exponents[j] - a ** -self.state.exponents[j] for j in self.fm.active(mask))

    def update_mask(self, mask: int, y: int) -> bool:
        """Feed one labelled example; True when it was a mistake."""
        if self.predict_mask(mask) == y:
            return False
        exps = list(self.state.exponents)
        active = self.fm.active(mask)
        for j in active:
            exps[j] += y
        self.state = WinnowState(self.state.alpha, self.state.theta, tuple(exps), self.state.mistakes + 1)
        if self._dense is not None:
            a = self._float_alpha
            for j in active:
                c = exps[j]
                self._dense[self.fm.monomials[j]] = a ** c - a ** -c
        return True

    def float_scores(self) -> np.ndarray:
        """Approximate scores on the whole cube (one zeta transform)."""
        if self._dense is None:
            self._dense = np.zeros(1 << self.fm.n)
            a = self._float_alpha
            for j, m in enumerate(self.fm.monomials):
                c = self.state.exponents[j]
                self._dense[m] = a ** c - a ** -c
        return zeta_transform(self._dense.copy())

    def first_error(self, table: np.ndarray, order: np.ndarray) -> Optional[int]:
        """First input in ``order`` that the current hypothesis labels wrongly."""
        scores = self.float_scores()
        theta = float(self.state.theta)
        pred = np.where(scores >= theta, 1, -1)
        wrong = pred != table
        if not self.config.exact:
            hits = np.flatnonzero(wrong[order])
            return int(order[hits[0]]) if hits.size else None
        # float sums are only trusted away from the threshold
        tol = 1e-9 * (float(np.abs(self._dense).sum()) + theta)
        suspect = wrong | (np.abs(scores - theta) <= tol)
        for pos in np.flatnonzero(suspect[order]):
            mask = int(order[pos])
            if self.predict_mask(mask) != table[mask]:
                return mask
        return None


class ListLearner:
    """Online decision-list learner: rules sit on levels, wrong rules drop one level.

    Candidate rules are (literal, label) for all 2n literals and (true, label).
    Prediction uses the lowest level holding a firing rule, majority vote
    inside that level (ties predict -1).
    """

    name = "Rivest/Littlestone list learner"

    def __init__(self, n: int):
        self.n = n
        rules = [(Literal(v, neg), b) for v in range(n) for neg in (False, True) for b in (1, -1)]
        rules += [(None, 1), (None, -1)]
        self.rules = rules
        self.level = np.zeros(len(rules), dtype=np.int64)
        self.labels = np.array([b for _, b in rules], dtype=np.int64)

    def _fires(self, mask: int) -> np.ndarray:
        return np.array([lit is None or (((mask >> lit.var) & 1) == 1) != lit.negated
                         for lit, _ in self.rules])

    def _decide(self, mask: int) -> tuple[int, np.ndarray]:
        fires = self._fires(mask)
        top = self.level[fires].min()
        sel = fires & (self.level == top)
        vote = int(self.labels[sel].sum())
        return (1 if vote > 0 else -1), sel

    def predict_mask(self, mask: int) -> int:
        return self._decide(mask)[0]

    def update_mask(self, mask: int, y: int) -> bool:
        pred, sel = self._decide(mask)
        if pred == y:
            return False
        self.level[sel & (self.labels != y)] += 1
        return True

    def first_error(self, table: np.ndarray, order: np.ndarray) -> Optional[int]:
        for mask in order:
            if self.predict_mask(int(mask)) != table[mask]:
                return int(mask)
        return None


HALVING_MAX_K, HALVING_MAX_N = 3, 8


class HalvingLearner:
    """Majority vote over every length-k decision list still consistent with the data."""

    name = "Halving algorithm"

    def __init__(self, n: int, k: int):
        if k > HALVING_MAX_K or n > HALVING_MAX_N:
            raise ValueError("halving algorithm is only run for k <= 3, n <= 8")
        from .concepts import DecisionList

        lits = [Literal(v, neg) for v in range(n) for neg in (False, True)]
        tables = set()
        for chosen in itertools.product(lits, repeat=k):
            for labels in itertools.product((-1, 1), repeat=k + 1):
                L = DecisionList(n, tuple(zip(chosen, labels[:k])), labels[k])
                tables.add(L.table().tobytes())
        self.tables = np.array([np.frombuffer(t, dtype=np.int8) for t in sorted(tables)])

    def predict_mask(self, mask: int) -> int:
        return 1 if int(self.tables[:, mask].sum()) > 0 else -1

    def update_mask(self, mask: int, y: int) -> bool:
        mistake = self.predict_mask(mask) != y
        self.tables = self.tables[self.tables[:, mask] == y]
        return mistake

    def first_error(self, table: np.ndarray, order: np.ndarray) -> Optional[int]:
        pred = np.where(self.tables.sum(axis=0) > 0, 1, -1)
        hits = np.flatnonzero((pred != table)[order])
        return int(order[hits[0]]) if hits.size else None


# ------------------------------------------------------------------ protocol

@dataclass
class MistakeRecord:
    trials: int
    mistakes: int
    mistake_trials: list[int]
    final_consistent: Optional[bool]
    teacher: str = "adversarial"
    seed: Optional[int] = None
    n: int = 0
    learner: str = ""
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def run_online(concept: Concept, config: LearnerConfig, teacher: str = "adversarial",
               max_trials: int = 100_000, seed: int = 0, limit: Optional[int] = None,
               learner=None) -> MistakeRecord:
    """Run one learner against one target under the chosen teacher."""
    from .construct import exhaustion_limit

    n = concept.n
    limit = exhaustion_limit() if limit is None else limit
    learner = ExpandedWinnow(n, config) if learner is None else learner
    mistake_trials: list[int] = []
    trials = 0
    final = None
    if teacher == "adversarial":
        if n > limit:
            raise ValueError(f"adversarial teacher needs n <= {limit}, got n={n}")
        table = concept.table()
        order = lex_order(n)
        final = False
        while trials < max_trials:
            mask = learner.first_error(table, order)
            if mask is None:
                final = True
                break
            trials += 1
            if learner.update_mask(mask, int(table[mask])):
                mistake_trials.append(trials)
        else:
            final = learner.first_error(table, order) is None
    elif teacher == "iid":
        rng = np.random.default_rng(seed)
        for _ in range(max_trials):
            x = rng.integers(0, 2, size=n)
            mask = int(sum(1 << j for j in range(n) if x[j]))
            trials += 1
            if learner.update_mask(mask, concept(tuple(int(v) for v in x))):
                mistake_trials.append(trials)
        if n <= limit:
            final = learner.first_error(concept.table(), lex_order(n)) is None
    else:
        raise ValueError(f"unknown teacher {teacher!r}")
    cfg = config.to_dict()
    if isinstance(learner, ExpandedWinnow):
        cfg.update(N=learner.fm.N, theta=str(learner.state.theta))
    return MistakeRecord(trials, len(mistake_trials), mistake_trials, final, teacher, seed, n,
                         getattr(learner, "name", type(learner).__name__), cfg)


def expanded_winnow_for_list(k: int, n: int) -> LearnerConfig:
    """Degree of the main construction for length-k lists; plain Winnow when k = 1."""
    from .concepts import oddmaxbit
    from .construct import main_ptf

    if k < 1:
        raise ValueError("need k >= 1")
    if k == 1:
        d = 1
    else:
        d = main_ptf(oddmaxbit(k)).degree
    return LearnerConfig(d=min(d, n))


def comparison_table(concept, k: int, seed: int = 0, max_trials: int = 100_000) -> list[dict]:
    """Mistakes of each learner under the adversarial teacher, with wall time."""
    n = concept.n
    rows = []
    entries = [("Rivest/Littlestone list learner", lambda: ListLearner(n), None)]
    if k <= HALVING_MAX_K and n <= HALVING_MAX_N:
        entries.append(("Halving algorithm", lambda: HalvingLearner(n, k), None))
    else:
        rows.append({"algorithm": "Halving algorithm", "mistakes": None, "final_consistent": None,
                     "status": "infeasible", "wall_time_s": None})
    entries.append(("Winnow (d=1)", lambda: ExpandedWinnow(n, LearnerConfig(d=1)), LearnerConfig(d=1)))
    ew = expanded_winnow_for_list(k, n)
    entries.append((f"Expanded-Winnow (d={ew.d})", lambda: ExpandedWinnow(n, ew), ew))
    for name, make, cfg in entries:
        start = time.perf_counter()
        rec = run_online(concept, cfg or LearnerConfig(d=1), "adversarial", max_trials, seed, learner=make())
        rows.append({"algorithm": name, "mistakes": rec.mistakes, "final_consistent": rec.final_consistent,
                     "status": "ok" if rec.final_consistent else "max_trials",
                     "wall_time_s": time.perf_counter() - start})
    order = ["Rivest/Littlestone list learner", "Halving algorithm", "Winnow (d=1)"]
    rows.sort(key=lambda r: order.index(r["algorithm"]) if r["algorithm"] in order else len(order))
    return rows
