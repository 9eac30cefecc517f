"""Learning parities: GF(2) elimination and the restriction learner.

A labelled example (x, b) is the equation sum_{i: x_i = 1} a_i = [b == -1]
(mod 2).  ``GF2Matrix`` packs each equation into 64-bit words; elimination
XORs whole rows at once.

The restriction learner draws one sample of Occam size, then repeatedly
zeroes out a random set of n - l coefficients (l = ceil(n^(1-1/k))) and
solves the remaining l-column system until a trial succeeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .concepts import ParityFunction, bits_to_str, str_to_bits

WORD = 64


# ------------------------------------------------------------------ packed matrices

@dataclass
class GF2Matrix:
    rows: int
    cols: int
    words: np.ndarray  # (rows, ceil(cols / 64)) uint64, bit c of row r at words[r, c // 64] >> (c % 64)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(rows, cols, np.zeros((rows, max(1, -(-cols // WORD))), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits) -> "GF2Matrix":
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("expected a 2-d 0/1 array")
        rows, cols = bits.shape
        nwords = max(1, -(-cols // WORD))
        packed = np.zeros((rows, nwords * 8), dtype=np.uint8)
        if cols:
            by = np.packbits(bits, axis=1, bitorder="little")
            packed[:, :by.shape[1]] = by
        words = packed.view("<u8").astype(np.uint64, copy=False).reshape(rows, nwords)
        return cls(rows, cols, words)

    def to_bits(self) -> np.ndarray:
        shifts = np.arange(WORD, dtype=np.uint64)
        bits = ((self.words[:, :, None] >> shifts) & np.uint64(1)).astype(bool)
        return bits.reshape(self.rows, -1)[:, :self.cols]

    def column(self, c: int) -> np.ndarray:
        return ((self.words[:, c // WORD] >> np.uint64(c % WORD)) & np.uint64(1)).astype(bool)

    def copy(self) -> "GF2Matrix":
        return GF2Matrix(self.rows, self.cols, self.words.copy())


@dataclass
class Elimination:
    echelon: GF2Matrix
    rhs: np.ndarray  # bool, one per row
    pivots: list[int]
    consistent: bool

    @property
    def rank(self) -> int:
        return len(self.pivots)


def gf2_eliminate(M: GF2Matrix, b: Sequence[int]) -> Elimination:
    """Reduced row-echelon form; pivots taken left to right, lowest free row first."""
    A = M.copy()
    rhs = np.asarray(b, dtype=bool).copy()
    if rhs.shape != (M.rows,):
        raise ValueError("label column must have one entry per row")
    words = A.words
    pivots = []
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        w, bit = c // WORD, np.uint64(c % WORD)
        col = ((words[:, w] >> bit) & np.uint64(1)).astype(bool)
        below = np.flatnonzero(col[r:])
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
            rhs[[r, p]] = rhs[[p, r]]
            col[[r, p]] = col[[p, r]]
        col[r] = False
        hit = np.flatnonzero(col)
        if hit.size:
            words[hit] ^= words[r]
            rhs[hit] ^= rhs[r]
        pivots.append(c)
        r += 1
    consistent = not rhs[r:].any()
    return Elimination(A, rhs, pivots, bool(consistent))


def gf2_solve(M: GF2Matrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """A solution with every free variable at 0, or None if the system is inconsistent."""
    e = gf2_eliminate(M, b)
    if not e.consistent:
        return None
    a = np.zeros(M.cols, dtype=np.uint8)
    for row, c in enumerate(e.pivots):
        a[c] = e.rhs[row]
    return a


# ------------------------------------------------------------------ samples

@dataclass
class LabeledSample:
    xs: np.ndarray      # (m, n) uint8
    labels: np.ndarray  # (m,) int8 in {-1, +1}

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.int8)
        if self.xs.ndim != 2 or self.labels.shape != (self.xs.shape[0],):
            raise ValueError("sample shape mismatch")
        if not np.isin(self.labels, (-1, 1)).all():
            raise ValueError("labels must be -1 or +1")

    @property
    def m(self) -> int:
        return self.xs.shape[0]

    @property
    def n(self) -> int:
        return self.xs.shape[1]

    @property
    def rhs(self) -> np.ndarray:
        return self.labels == -1

    def dumps(self) -> str:
        return "".join(f"{bits_to_str(x)} {int(y):+d}\n" for x, y in zip(self.xs, self.labels))

    @classmethod
    def loads(cls, text: str) -> "LabeledSample":
        xs, ys = [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            bits, label = line.split()
            xs.append(str_to_bits(bits))
            ys.append(int(label))
        if len({len(x) for x in xs}) > 1:
            raise ValueError("examples of different dimension")
        return cls(np.array(xs, dtype=np.uint8).reshape(len(xs), -1), np.array(ys, dtype=np.int8))


def parity_labels(support: Sequence[int], xs: np.ndarray) -> np.ndarray:
    idx = np.asarray(sorted(support), dtype=np.int64)
    odd = xs[:, idx].sum(axis=1) % 2 if idx.size else np.zeros(xs.shape[0], dtype=np.int64)
    return np.where(odd == 1, -1, 1).astype(np.int8)


ExampleOracle = Callable[[int, np.random.Generator], LabeledSample]


def parity_oracle(target: ParityFunction) -> ExampleOracle:
    """Uniform examples labelled by ``target``."""

    def draw(m: int, rng: np.random.Generator) -> LabeledSample:
        xs = rng.integers(0, 2, size=(m, target.n), dtype=np.uint8)
        return LabeledSample(xs, parity_labels(target.support, xs))

    return draw


# ------------------------------------------------------------------ learners

@dataclass
class ParityHypothesis:
    a: np.ndarray  # uint8 coefficient vector of length n
    trials: int = 1

    @property
    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.a)]

    @property
    def weight(self) -> int:
        return int(self.a.sum())

    def predict(self, xs: np.ndarray) -> np.ndarray:
        return parity_labels(self.support, np.atleast_2d(xs))

    def consistent_with(self, sample: LabeledSample) -> bool:
        return bool((self.predict(sample.xs) == sample.labels).all())


def restriction_size(n: int, k: int) -> int:
    """l = ceil(n^(1 - 1/k)), computed exactly as the least l with l^k >= n^(k-1)."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    target = n ** (k - 1)
    lo = max(1, math.floor(n ** (1 - 1 / k)) - 1)
    while lo ** k < target:
        lo += 1
    while lo > 1 and (lo - 1) ** k >= target:
        lo -= 1
    return lo


def occam_sample_size(n: int, k: int, eps: float, delta: float) -> int:
    """ceil((1/eps) (l log2 n + log2(1/delta))) with l = ceil(n^(1-1/k))."""
    if not (0 < eps <= 1 and 0 < delta < 1):
        raise ValueError("need 0 < eps <= 1 and 0 < delta < 1")
    ell = restriction_size(n, k)
    return math.ceil((ell * math.log2(n) + math.log2(1 / delta)) / eps)


def trial_success_probability(n: int, k: int, ell: int) -> Fraction:
    """Chance that a random l-subset of the n variables contains a fixed k-subset."""
    if not 0 <= k <= ell <= n:
        raise ValueError(f"need 0 <= k <= l <= n, got k={k}, l={ell}, n={n}")
    p = Fraction(1)
    for i in range(1, k + 1):
        p *= Fraction(ell - k + i, n - k + i)
    return p


def standard_parity_learner(sample: LabeledSample) -> Optional[ParityHypothesis]:
    """Plain Gaussian elimination over all n columns."""
    a = gf2_solve(GF2Matrix.from_bits(sample.xs), sample.rhs)
    return None if a is None else ParityHypothesis(a)


def learn_parity_trial(sample: LabeledSample, k: int, seed, kept: Optional[np.ndarray] = None
                       ) -> Optional[ParityHypothesis]:
    """One restriction trial: keep l random variables, force the rest to 0, solve.

    Returns None ("FAIL") when the restricted system is inconsistent.
    """
    n = sample.n
    ell = restriction_size(n, k)
    if kept is None:
        kept = np.sort(np.random.default_rng(seed).choice(n, size=ell, replace=False))
    sub = GF2Matrix.from_bits(sample.xs[:, kept])
    a_sub = gf2_solve(sub, sample.rhs)
    if a_sub is None:
        return None
    a = np.zeros(n, dtype=np.uint8)
    a[kept] = a_sub
    return ParityHypothesis(a)


@dataclass
class ParityRun:
    n: int
    k: int
    ell: int
    m: int
    trials_used: int
    hypothesis: Optional[ParityHypothesis]
    method: str = "restriction"
    success_prob_exact: Fraction = Fraction(0)
    holdout_error: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def success_freq(self) -> float:
        return (1.0 if self.hypothesis else 0.0) / self.trials_used if self.trials_used else 0.0

    def report(self) -> dict:
        return {
            "n": self.n, "k": self.k, "ℓ": self.ell, "m": self.m,
            "trials_used": self.trials_used,
            "success_prob_exact": str(self.success_prob_exact),
            "success_freq": self.success_freq,
            "hypothesis_support": [] if self.hypothesis is None else [i + 1 for i in self.hypothesis.support],
            "holdout_error": self.holdout_error,
            "method": self.method,
            **self.extra,
        }


class TrialsExhausted(RuntimeError):
    """No restriction trial succeeded within the trial budget."""


def learn_parity(oracle: ExampleOracle, n: int, k: int, eps: float, delta: float, seed: int = 0,
                 max_trials: Optional[int] = None) -> ParityRun:
    """Draw one Occam-sized sample, then retry restriction trials until one succeeds."""
    ell = restriction_size(n, k)
    m = occam_sample_size(n, k, eps, delta)
    max_trials = 100 * n if max_trials is None else max_trials
    sample = oracle(m, np.random.default_rng([seed, 0]))
    p = trial_success_probability(n, k, ell)
    if 2 * ell >= n:
        hyp = standard_parity_learner(sample)
        if hyp is None:
            raise TrialsExhausted("sample is not consistent with any parity")
        return ParityRun(n, k, ell, m, 1, hyp, "standard", p)
    for t in range(1, max_trials + 1):
        hyp = learn_parity_trial(sample, k, [seed, 1, t])
        if hyp is not None:
            hyp.trials = t
            return ParityRun(n, k, ell, m, t, hyp, "restriction", p)
    raise TrialsExhausted(f"no trial succeeded in {max_trials} attempts")


def holdout_error(hyp: ParityHypothesis, oracle: ExampleOracle, size: int, seed) -> float:
    test = oracle(size, np.random.default_rng(seed))
    return float((hyp.predict(test.xs) != test.labels).mean())
