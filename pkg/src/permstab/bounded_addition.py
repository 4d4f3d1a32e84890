"""Bounded addition: the closure [D]_R, generation witnesses, and the
Jefferson (highest-averages) ordering lemma that powers short witnesses.

The closure of D inside the L-infinity box of radius R is the least set
containing D and 0, closed under negation, and closed under sums that do
not leave the box.  It is computed as a monotone fixpoint with the
Minkowski-sum step done by FFT convolution on a boolean grid; witnesses
are reconstructed lazily from the per-cell round levels.

Constructive membership (``membership_with_witness``) does not search the
closure; it follows the proof chain: represent the target over a reduced
basis obtained incrementally from D, order each representation like a
highest-averages seat apportionment so the partial sums stay balanced, and
emit the partial sums as a generation sequence inside the 5 m^2 R box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve

from .errors import CertificateError, PreconditionError
from .lattices import (
    Lattice,
    norm_inf,
    reduced_basis,
    solve_integer_combination,
)

MAX_CLOSURE_CELLS = 30_000_000


def _neg(v):
    return tuple(-a for a in v)


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# Closure
# ---------------------------------------------------------------------------

@dataclass
class ClosureResult:
    """[D]_R plus the per-member round levels of the fixpoint iteration.

    ``witness(y)`` reconstructs a (D, R)-generation sequence for a member:
    a list of (vector, tag, operands) steps where tag is one of "seed",
    "zero", "neg", "sum" and operands are previously listed vectors.
    """

    seeds: tuple[tuple[int, ...], ...]
    R: int
    m: int
    members: frozenset
    level: dict
    _parents: dict = field(default_factory=dict, repr=False)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def _parent(self, y):
        """One justification for y: ("seed",), ("zero",), ("neg", x), ("sum", a, b)."""
        if y in self._parents:
            return self._parents[y]
        if y in self.seeds:
            step = ("seed",)
        elif not any(y):
            step = ("zero",)
        else:
            ly = self.level[y]
            ny = _neg(y)
            if ny in self.members and self.level[ny] < ly:
                step = ("neg", ny)
            else:
                step = None
                for a in sorted(self.members):
                    if self.level[a] >= ly:
                        continue
                    b = _add(y, _neg(a))
                    if b in self.members and self.level[b] < ly:
                        step = ("sum", a, b)
                        break
                if step is None:  # pragma: no cover - fixpoint guarantees one
                    raise AssertionError("closure member without justification")
        self._parents[y] = step
        return step

    def witness(self, y):
        """A generation sequence ending at y (y must be a member)."""
        y = tuple(y)
        if y not in self.members:
            raise ValueError("not a closure member")
        emitted: list = []
        seen = set()

        def emit(v):
            if v in seen:
                return
            step = self._parent(v)
            for op in step[1:]:
                emit(op)
            seen.add(v)
            emitted.append((v, step[0], step[1:]))

        emit(y)
        return emitted


def verify_generation_sequence(steps, seeds, R: int, target=None) -> bool:
    """Replay a witness: every step justified, inside the box, ends at target."""
    seeds = {tuple(s) for s in seeds}
    have = set()
    last = None
    for v, tag, ops in steps:
        if norm_inf(v) > R:
            return False
        if tag == "seed":
            if v not in seeds:
                return False
        elif tag == "zero":
            if any(v):
                return False
        elif tag == "neg":
            (a,) = ops
            if a not in have or v != _neg(a):
                return False
        elif tag == "sum":
            a, b = ops
            if a not in have or b not in have or v != _add(a, b):
                return False
        else:
            return False
        have.add(v)
        last = v
    if target is not None and last != tuple(target):
        return False
    return True


def _fixpoint(grid, R: int, m: int, level_grid=None):
    """Run the negation/bounded-sum fixpoint on a (2R+1)^m boolean grid."""
    rounds = 0
    while True:
        rounds += 1
        neg = grid[(slice(None, None, -1),) * m]
        conv = fftconvolve(grid.astype(np.float64), grid.astype(np.float64),
                           mode="full")
        crop = conv[(slice(R, 3 * R + 1),) * m] > 0.5
        new = (neg | crop) & ~grid
        if not new.any():
            return grid
        if level_grid is not None:
            level_grid[new] = rounds
        grid |= new


def closure_grid(seeds, R: int, m: int, warm_grid=None,
                 warm_R: int | None = None) -> np.ndarray:
    """[D]_R as a boolean (2R+1)^m grid (index v + R per axis).

    ``warm_grid`` may carry the closure grid of a subset of the seeds at a
    radius warm_R <= R: closures are monotone in both the seed set and the
    radius, and [D u E]_R = [[D]_R u E]_R, so its cells may seed the
    fixpoint without changing the result.
    """
    side = 2 * R + 1
    if side**m > MAX_CLOSURE_CELLS:
        raise PreconditionError(f"closure box {side}^{m} too large")
    grid = np.zeros((side,) * m, dtype=bool)
    grid[(R,) * m] = True
    for v in seeds:
        if len(v) != m:
            raise ValueError("seed dimension mismatch")
        if norm_inf(v) > R:
            raise PreconditionError("seeds must lie inside the box")
        grid[tuple(int(a) + R for a in v)] = True
    if warm_grid is not None:
        pad = R - warm_R
        if pad < 0:
            raise ValueError("warm grid radius exceeds the target radius")
        sl = (slice(pad, pad + 2 * warm_R + 1),) * m
        grid[sl] |= warm_grid
    return _fixpoint(grid, R, m)


def closure(seeds, R: int, m: int) -> ClosureResult:
    """[D]_R by monotone fixpoint iteration on a boolean box grid."""
    seeds = tuple(tuple(int(a) for a in v) for v in seeds)
    side = 2 * R + 1
    if side**m > MAX_CLOSURE_CELLS:
        raise PreconditionError(f"closure box {side}^{m} too large")
    for v in seeds:
        if len(v) != m:
            raise ValueError("seed dimension mismatch")
        if norm_inf(v) > R:
            raise PreconditionError("seeds must lie inside the box")

    grid = np.zeros((side,) * m, dtype=bool)
    level_grid = np.full((side,) * m, -1, dtype=np.int32)
    grid[(R,) * m] = True
    level_grid[(R,) * m] = 0
    for v in seeds:
        grid[tuple(a + R for a in v)] = True
        level_grid[tuple(a + R for a in v)] = 0
    _fixpoint(grid, R, m, level_grid=level_grid)

    members = set()
    level = {}
    for raw in np.argwhere(grid):
        v = tuple(int(a) - R for a in raw)
        members.add(v)
        level[v] = int(level_grid[tuple(raw)])
    return ClosureResult(seeds=seeds, R=R, m=m,
                         members=frozenset(members), level=level)


# ---------------------------------------------------------------------------
# Jefferson ordering
# ---------------------------------------------------------------------------

def jefferson_order(multiset, y, R: int):
    """Order a multiset summing to y so every prefix stays near the ray to y.

    Flags at N*b/a_i per distinct element (highest-averages style), merged
    by position then color.  Verifies the exact prefix bound
    ||prefix_k - (k/N) y||_inf <= 2 * (#distinct) * R before returning.
    """
    elems = [tuple(int(a) for a in v) for v in multiset]
    if not elems:
        raise ValueError("empty multiset")
    y = tuple(int(a) for a in y)
    m = len(y)
    total = (0,) * m
    for v in elems:
        if norm_inf(v) > R:
            raise PreconditionError("multiset element outside the box")
        if not any(v):
            raise ValueError("zero vector in multiset")
        total = _add(total, v)
    if total != y:
        raise PreconditionError("multiset does not sum to the target")

    counts: dict = {}
    for v in elems:
        counts[v] = counts.get(v, 0) + 1
    for v in counts:
        if _neg(v) in counts:
            raise PreconditionError("multiset contains a vector and its negation")
    distinct = sorted(counts)
    n_total = len(elems)
    flags = []
    for color, v in enumerate(distinct):
        a = counts[v]
        for b in range(1, a + 1):
            flags.append((Fraction(n_total * b, a), color))
    flags.sort()
    order = [distinct[color] for _, color in flags]

    bound = 2 * len(distinct) * R
    prefix = (0,) * m
    for k, v in enumerate(order, start=1):
        prefix = _add(prefix, v)
        for j in range(m):
            if abs(n_total * prefix[j] - k * y[j]) > bound * n_total:
                raise CertificateError("Jefferson prefix bound violated")
    return order


# ---------------------------------------------------------------------------
# Constructive membership
# ---------------------------------------------------------------------------

class _WitnessBuilder:
    def __init__(self, seeds, box: int, m: int):
        self.box = box
        self.m = m
        self.steps: list = []
        self.have: set = set()
        for v in seeds:
            self._emit(v, "seed", ())

    def _emit(self, v, tag, ops):
        if norm_inf(v) > self.box:
            raise CertificateError("witness step escapes the box")
        if v not in self.have:
            self.steps.append((v, tag, ops))
            self.have.add(v)

    def ensure_zero(self):
        self._emit((0,) * self.m, "zero", ())

    def ensure_negation(self, v):
        if v in self.have:
            return
        nv = _neg(v)
        if nv not in self.have:
            raise AssertionError("negating an unestablished vector")
        self._emit(v, "neg", (nv,))

    def add_combination(self, generators, coeffs, target, elem_bound: int):
        """Emit a balanced chain establishing sum(c_i g_i) = target."""
        merged: dict = {}
        for g, c in zip(generators, coeffs):
            if c == 0:
                continue
            key = max(g, _neg(g))
            merged[key] = merged.get(key, 0) + (c if key == g else -c)
        multiset = []
        for key, c in merged.items():
            if c == 0:
                continue
            v = key if c > 0 else _neg(key)
            multiset.extend([v] * abs(c))
        if not multiset:
            if any(target):
                raise AssertionError("empty combination for a nonzero target")
            self.ensure_zero()
            return
        order = jefferson_order(multiset, target, elem_bound)
        prefix = None
        for v in order:
            self.ensure_negation(v)
            if prefix is None:
                prefix = v
            else:
                s = _add(prefix, v)
                self._emit(s, "sum", (prefix, v))
                prefix = s
        if prefix != tuple(target):
            raise AssertionError("combination chain missed its target")


def _prune_witness(steps, target):
    """Keep only the ancestors of the target; the target ends the sequence."""
    index = {v: ops for v, _tag, ops in steps}
    needed: set = set()

    def mark(v):
        if v in needed:
            return
        needed.add(v)
        for op in index[v]:
            mark(op)

    mark(target)
    return [s for s in steps if s[0] in needed]


def membership_with_witness(seeds, R: int, y, m: int | None = None):
    """A (D, 5 m^2 R)-generation sequence for y in <D>, or None when y is
    outside the lattice.

    Requires D inside the L-infinity box of radius R and ||y||_inf <= R.
    """
    seeds = [tuple(int(a) for a in v) for v in seeds]
    y = tuple(int(a) for a in y)
    m = len(y) if m is None else m
    for v in seeds:
        if norm_inf(v) > R:
            raise PreconditionError("seed outside the box")
    if norm_inf(y) > R:
        raise PreconditionError("target outside the box")

    box = 5 * m * m * R
    lat = Lattice.from_generators(m, seeds)
    if not lat.contains(y):
        return None
    builder = _WitnessBuilder(sorted(set(seeds)), box, m)
    if not any(y):
        builder.ensure_zero()
        return _prune_witness(builder.steps, y)

    basis: list = []
    current = None
    for x in sorted(set(seeds)):
        gens = basis + [x]
        grown = Lattice.from_generators(m, gens)
        if current is not None and grown.same_lattice(current):
            continue
        new_basis = reduced_basis(grown)
        for b in new_basis:
            if norm_inf(b) > m * R:
                raise CertificateError("incremental basis escapes the m*R box")
        elem_bound = max(norm_inf(g) for g in gens)
        for b in new_basis:
            if b in builder.have:
                continue
            coeffs = solve_integer_combination(gens, b, m)
            if coeffs is None:  # pragma: no cover - b lies in <gens>
                raise AssertionError("basis vector not representable")
            builder.add_combination(gens, coeffs, b, elem_bound)
        basis = list(new_basis)
        current = grown

    if y not in builder.have:
        coeffs = solve_integer_combination(basis, y, m)
        if coeffs is None:  # pragma: no cover - membership already checked
            raise AssertionError("target not representable over the final basis")
        builder.add_combination(basis, coeffs, y,
                                max(norm_inf(b) for b in basis))
    steps = _prune_witness(builder.steps, y)
    if not verify_generation_sequence(steps, seeds, box, target=y):
        raise CertificateError("constructed witness failed replay")
    return steps
