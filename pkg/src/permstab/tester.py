"""The canonical one-query tester, its amplified variant, and Monte-Carlo
rejection-rate estimation with the exact rate alongside.

The canonical tester samples a point and a relator uniformly and rejects
when the relator moves the point; it never rejects exact solutions, and its
rejection probability is exactly L_E / |E|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .actions import ActionSpace, apply_word, local_defect
from .presentation import EquationSet
from .rng import SplitMix64

_EXACT_ITERATION_LIMIT = 4096


@dataclass(frozen=True)
class TesterStats:
    trials: int
    rejections: int
    empirical_rate: Fraction
    expected_rate: Fraction
    query_count: int
    deviation_flagged: bool


def exact_rejection_rate(x: ActionSpace, e: EquationSet) -> Fraction:
    """Pr[reject] = L_E / |E|, from the exhaustive violation count."""
    if len(e) == 0:
        raise ValueError("tester needs a nonempty equation set")
    return local_defect(x, e).local_defect / len(e)


def canonical_test(x: ActionSpace, e: EquationSet, rng) -> bool:
    """One tester run; True means accept.  ``rng`` is a SplitMix64 or seed."""
    if len(e) == 0:
        raise ValueError("tester needs a nonempty equation set")
    if isinstance(rng, int):
        rng = SplitMix64(rng)
    pt = rng.randrange(x.n)
    w = e.words[rng.randrange(len(e))]
    return apply_word(x, w, pt) == pt


def amplified_iterations(delta: Fraction) -> int:
    """ceil(log_{1-delta}(1/2)): the smallest k with (1-delta)^k <= 1/2."""
    delta = Fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("detection probability must be in (0, 1]")
    if delta == 1:
        return 1
    q = 1 - delta
    num, den = q.numerator, q.denominator
    pk, qk = num, den
    for k in range(1, _EXACT_ITERATION_LIMIT + 1):
        if 2 * pk <= qk:
            return k
        pk *= num
        qk *= den
    # Far beyond exact verification; the float estimate is used as-is.
    return math.ceil(math.log(0.5) / math.log(1 - float(delta)))


def amplified_test(x: ActionSpace, e: EquationSet, epsilon, delta_fn,
                   rng) -> tuple[bool, int]:
    """Repeat the canonical tester log_{1-delta}(1/2) times; reject if any
    run rejects.  Returns (accept, query count)."""
    if isinstance(rng, int):
        rng = SplitMix64(rng)
    iterations = amplified_iterations(Fraction(delta_fn(epsilon)))
    for _ in range(iterations):
        if not canonical_test(x, e, rng):
            return False, iterations
    return True, iterations


def estimate_rejection(x: ActionSpace, e: EquationSet, trials: int,
                       seed: int) -> TesterStats:
    """Monte-Carlo rejection rate with the exact rate side by side.

    Flags a deviation beyond 4 sqrt(p(1-p)/trials), compared exactly.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = SplitMix64(seed)
    rejections = 0
    for _ in range(trials):
        if not canonical_test(x, e, rng):
            rejections += 1
    emp = Fraction(rejections, trials)
    exp = exact_rejection_rate(x, e)
    flagged = (emp - exp) ** 2 * trials > 16 * exp * (1 - exp)
    return TesterStats(trials=trials, rejections=rejections,
                       empirical_rate=emp, expected_rate=exp,
                       query_count=trials, deviation_flagged=bool(flagged))
