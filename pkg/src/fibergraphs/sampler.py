"""Seeded Metropolis-Hastings walks on table fibers, without enumeration.

The proposal draws uniformly from the full signed move basis; a proposal
that would drive an entry negative is rejected in place, which keeps the
kernel symmetric (a lazy walk).  Two stationary targets are supported:

* ``uniform``: every proposal that stays non-negative is accepted, so the
  chain is uniform over the fiber.
* ``hypergeometric``: density proportional to 1 / prod(cell!), the
  conditional null distribution used by exact tests; the acceptance ratio
  only involves the four changed cells and is evaluated in log space.

Randomness comes from numpy's PCG64 generator seeded with a 64-bit integer.
PCG64 streams are stable across platforms and numpy releases, so a (seed,
config, start) triple pins the trajectory bit for bit; changing the
generator would be a breaking interface change.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDimensionError, MarginMismatchError
from .tables import ContingencyTable, MarkovMove, enumerate_basis_moves, validate_table


class Target(str, enum.Enum):
    UNIFORM = "uniform"
    HYPERGEOMETRIC = "hypergeometric"


@dataclass(frozen=True)
class WalkConfig:
    """Walk length, burn-in, thinning, 64-bit seed and stationary target.

    steps may be zero (an empty walk); otherwise burn_in < steps and the
    thinning stride cannot exceed the post-burn-in stretch.
    """

    steps: int
    seed: int
    burn_in: int = 0
    thinning: int = 1
    target: Target = Target.UNIFORM

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise InvalidDimensionError(f"steps must be >= 0, got {self.steps}")
        if self.burn_in < 0:
            raise InvalidDimensionError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.thinning < 1:
            raise InvalidDimensionError(f"thinning must be >= 1, got {self.thinning}")
        if not 0 <= self.seed < 2**64:
            raise InvalidDimensionError("seed must fit in an unsigned 64-bit integer")
        if self.steps > 0:
            if self.burn_in >= self.steps:
                raise InvalidDimensionError("burn_in must be smaller than steps")
            if self.thinning > self.steps - self.burn_in:
                raise InvalidDimensionError(
                    "thinning cannot exceed the post-burn-in step count"
                )
        object.__setattr__(self, "target", Target(self.target))

    @property
    def samples_expected(self) -> int:
        return (self.steps - self.burn_in) // self.thinning if self.steps else 0


VISIT_COUNTER_CAP = 100_000
_KMV_SIZE = 256


class VisitCounter:
    """Exact per-table visit counts up to a cap, then a distinct-count sketch.

    Past the cap the counter stops admitting new tables and switches to a
    k-minimum-values sketch over stable 64-bit hashes, flagged approximate.
    """

    def __init__(self, cap: int = VISIT_COUNTER_CAP):
        self.cap = cap
        self.counts: dict[tuple[int, ...], int] = {}
        self.approximate = False
        self._kmv: list[int] = []
        self._kmv_members: set[int] = set()

    @staticmethod
    def _hash(key: tuple[int, ...]) -> int:
        digest = hashlib.blake2b(
            ",".join(map(str, key)).encode(), digest_size=8
        ).digest()
        return int.from_bytes(digest, "big")

    def record(self, key: tuple[int, ...]) -> None:
        if key in self.counts:
            self.counts[key] += 1
            return
        if len(self.counts) < self.cap:
            self.counts[key] = 1
            return
        if not self.approximate:
            self.approximate = True
            self._kmv = sorted(self._hash(k) for k in self.counts)[:_KMV_SIZE]
            self._kmv_members = set(self._kmv)
        h = self._hash(key)
        if h in self._kmv_members:
            return
        if len(self._kmv) < _KMV_SIZE:
            self._kmv.append(h)
            self._kmv.sort()
            self._kmv_members.add(h)
        elif h < self._kmv[-1]:
            self._kmv_members.discard(self._kmv[-1])
            self._kmv[-1] = h
            self._kmv.sort()
            self._kmv_members.add(h)

    def distinct_estimate(self) -> int:
        if not self.approximate:
            return len(self.counts)
        k = len(self._kmv)
        if k < _KMV_SIZE:
            return max(len(self.counts), k)
        return max(len(self.counts), int((k - 1) * (2**64) / self._kmv[-1]))


@dataclass
class ChainState:
    """Mutable running state of one chain; current is always a fiber member."""

    n: int
    r: int
    entries: list[int]  # row-major, mutated in place
    rng: np.random.Generator
    moves: tuple[MarkovMove, ...]
    step_index: int = 0
    accepted_count: int = 0
    visits: VisitCounter = field(default_factory=VisitCounter)

    @classmethod
    def from_table(cls, start: ContingencyTable, config: WalkConfig) -> "ChainState":
        rng = np.random.Generator(np.random.PCG64(config.seed))
        moves = tuple(enumerate_basis_moves(start.n)) if start.n >= 2 else ()
        return cls(start.n, start.r, list(start.row_major()), rng, moves)

    @property
    def current(self) -> ContingencyTable:
        n = self.n
        ent = tuple(
            tuple(self.entries[i * n : (i + 1) * n]) for i in range(n)
        )
        return ContingencyTable(n, self.r, ent)


def _margins_ok(n: int, r: int, entries: list[int]) -> bool:
    for i in range(n):
        if sum(entries[i * n : (i + 1) * n]) != r:
            return False
        if sum(entries[i::n]) != r:
            return False
    return min(entries) >= 0


def step(state: ChainState, config: WalkConfig) -> ChainState:
    """One Metropolis-Hastings transition; mutates and returns the state.

    Invalid proposals are consumed as self-loops.  The uniform target accepts
    every valid proposal; the hypergeometric target accepts with probability
    min(1, prod(old subtracted cells) / prod(new added cells)).

    Margins are re-checked on every step under assertions (stripped by -O)
    and unconditionally every 4096 steps.
    """
    n = state.n
    entries = state.entries
    state.step_index += 1
    assert _margins_ok(n, state.r, entries)
    if state.step_index % 4096 == 0 and not _margins_ok(n, state.r, entries):
        raise InvalidDimensionError("chain state left the fiber (corrupted margins)")
    if not state.moves:
        return state
    move = state.moves[int(state.rng.integers(len(state.moves)))]
    (s1r, s1c), (s2r, s2c) = move.subtracted_cells()
    sub1, sub2 = s1r * n + s1c, s2r * n + s2c
    if entries[sub1] < 1 or entries[sub2] < 1:
        return state  # lazy self-loop
    (a1r, a1c), (a2r, a2c) = move.added_cells()
    add1, add2 = a1r * n + a1c, a2r * n + a2c
    if config.target is Target.HYPERGEOMETRIC:
        log_ratio = (
            math.log(entries[sub1])
            + math.log(entries[sub2])
            - math.log(entries[add1] + 1)
            - math.log(entries[add2] + 1)
        )
        if log_ratio < 0 and state.rng.random() >= math.exp(log_ratio):
            return state
    entries[sub1] -= 1
    entries[sub2] -= 1
    entries[add1] += 1
    entries[add2] += 1
    state.accepted_count += 1
    return state


def run_walk(
    start: ContingencyTable, config: WalkConfig
) -> tuple[ChainState, list[ContingencyTable]]:
    """Run a full walk and collect the post-burn-in, thinned sample stream.

    Visit counts cover every post-burn-in step (thinned or not).  The stream
    is a pure function of (start, config).
    """
    state = ChainState.from_table(start, config)
    samples: list[ContingencyTable] = []
    for _ in range(config.steps):
        step(state, config)
        if state.step_index > config.burn_in:
            state.visits.record(tuple(state.entries))
            if (state.step_index - config.burn_in) % config.thinning == 0:
                samples.append(state.current)
    return state, samples


def acceptance_ratio(u: ContingencyTable, v: ContingencyTable) -> Fraction:
    """Exact hypergeometric acceptance ratio pi(v)/pi(u) for one-move neighbors."""
    num = Fraction(1)
    for i in range(u.n):
        for j in range(u.n):
            a, b = u.entries[i][j], v.entries[i][j]
            if b > a:
                for x in range(a + 1, b + 1):
                    num /= x
            elif a > b:
                for x in range(b + 1, a + 1):
                    num *= x
    return num


def transition_probabilities(
    t: ContingencyTable, target: Target
) -> dict[tuple[tuple[int, ...], ...], Fraction]:
    """Exact one-step transition distribution out of t, as fractions.

    Enumerates every proposal and its acceptance probability; the self-loop
    mass absorbs invalid and rejected proposals.  Used for analytic checks
    (detailed balance, stationary distributions) independent of the runtime
    log-space path.
    """
    moves = enumerate_basis_moves(t.n) if t.n >= 2 else []
    out: dict[tuple[tuple[int, ...], ...], Fraction] = {}
    stay = Fraction(0)
    proposal = Fraction(1, len(moves)) if moves else Fraction(1)
    for m in moves:
        (a, b), (c, d) = m.subtracted_cells()
        if t.entries[a][b] < 1 or t.entries[c][d] < 1:
            stay += proposal
            continue
        rows = [list(row) for row in t.entries]
        rows[a][b] -= 1
        rows[c][d] -= 1
        for (i, j) in m.added_cells():
            rows[i][j] += 1
        dest = tuple(tuple(row) for row in rows)
        if target is Target.HYPERGEOMETRIC:
            ratio = acceptance_ratio(t, ContingencyTable(t.n, t.r, dest))
            accept = min(Fraction(1), ratio)
        else:
            accept = Fraction(1)
        out[dest] = out.get(dest, Fraction(0)) + proposal * accept
        stay += proposal * (1 - accept)
    out[t.entries] = out.get(t.entries, Fraction(0)) + stay
    return out


def chi_square_statistic(t: ContingencyTable) -> float:
    """Pearson statistic against the flat expectation r/n in every cell."""
    expected = Fraction(t.r, t.n)
    total = sum(
        (Fraction(x) - expected) ** 2 / expected
        for row in t.entries
        for x in row
    )
    return float(total)


def _integer_score(n: int, r: int, entries: Iterable[int]) -> int:
    """Monotone integer reindexing of the chi-square statistic: sum (n*x - r)^2.

    Equal scores correspond exactly to equal statistics, so tie handling in
    p-values is exact without any float comparisons.
    """
    return sum((n * x - r) ** 2 for x in entries)


@dataclass(frozen=True)
class ExactTestResult:
    observed_statistic: float
    p_value_estimate: float
    standard_error: float
    samples_used: int


def as_equal_margin_table(rows: Sequence[Sequence[int]]) -> ContingencyTable:
    """Validate a raw square array as an equal-margin table.

    Raises MarginMismatchError when the row sums or column sums are unequal
    (such tables are outside this package's scope).
    """
    n = len(rows)
    if n < 1 or any(len(row) != n for row in rows):
        raise MarginMismatchError("input is not a square array")
    row_sums = [sum(row) for row in rows]
    col_sums = [sum(rows[i][j] for i in range(n)) for j in range(n)]
    if len(set(row_sums)) != 1 or len(set(col_sums)) != 1 or row_sums[0] != col_sums[0]:
        raise MarginMismatchError(
            f"margins are not all equal: row sums {row_sums}, column sums {col_sums}"
        )
    return validate_table(n, row_sums[0], rows)


def exact_test(
    observed: ContingencyTable | Sequence[Sequence[int]], config: WalkConfig
) -> ExactTestResult:
    """Monte Carlo exact test of the flat-table null for an equal-margin table.

    Samples the hypergeometric target from the observed table and estimates
    p = P(statistic >= observed), ties included.  The standard error comes
    from batch means over the thinned sample stream, which accounts for the
    autocorrelation an i.i.d. binomial formula would ignore.
    """
    if not isinstance(observed, ContingencyTable):
        observed = as_equal_margin_table(observed)
    config = WalkConfig(
        steps=config.steps,
        seed=config.seed,
        burn_in=config.burn_in,
        thinning=config.thinning,
        target=Target.HYPERGEOMETRIC,
    )
    threshold = _integer_score(observed.n, observed.r, observed.row_major())
    _, samples = run_walk(observed, config)
    if not samples:
        return ExactTestResult(chi_square_statistic(observed), float("nan"), float("nan"), 0)
    hits = [
        1.0 if _integer_score(s.n, s.r, s.row_major()) >= threshold else 0.0
        for s in samples
    ]
    m = len(hits)
    p_hat = sum(hits) / m
    n_batches = min(100, m)
    batch_size = m // n_batches
    means = [
        sum(hits[b * batch_size : (b + 1) * batch_size]) / batch_size
        for b in range(n_batches)
    ]
    if n_batches > 1:
        center = sum(means) / n_batches
        var = sum((x - center) ** 2 for x in means) / (n_batches - 1)
        se = math.sqrt(var / n_batches)
    else:
        se = float("nan")
    return ExactTestResult(chi_square_statistic(observed), p_hat, se, m)
