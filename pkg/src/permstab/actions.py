"""Finite F_m-sets as labelled permutation actions, and graph machinery.

An ActionSpace holds m permutations of [n] (forward and inverse arrays).
Generic graph operations (balls, partial maps, equivariance accounting,
subgraph-isomorphism checks) are written against a tiny point protocol --
``space.m``, ``space.step(i, p)``, ``space.step_inv(i, p)`` -- so they work
both for ActionSpace (points are ints) and for quotient-lattice handles
(points are coset-representative tuples).

Vectors of Z^m act on points through their sorted lifts everywhere: the
sorted word e_1^{v_1}...e_m^{v_m} is applied suffix first, so axis m moves
first.  All counts and distances are exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CertificateError, PreconditionError
from .presentation import (
    AbelianPresentation,
    EquationSet,
    Word,
    presentation_from_json_dict,
)


class ActionSpace:
    """A finite F_m-set: n points with m labelled permutation edge sets."""

    def __init__(self, perms, presentation: AbelianPresentation | None = None):
        arrs = [np.asarray(p, dtype=np.int64) for p in perms]
        if not arrs:
            raise ValueError("need at least one permutation")
        n = arrs[0].shape[0]
        ref = np.arange(n, dtype=np.int64)
        for a in arrs:
            if a.shape != (n,):
                raise ValueError("permutations must share the same length")
            if not np.array_equal(np.sort(a), ref):
                raise ValueError("row is not a bijection of [n]")
        self.n = int(n)
        self.m = len(arrs)
        self._fwd = []
        self._inv = []
        for a in arrs:
            inv = np.empty_like(a)
            inv[a] = ref
            a.setflags(write=False)
            inv.setflags(write=False)
            self._fwd.append(a)
            self._inv.append(inv)
        self.presentation = presentation

    # -- point protocol ----------------------------------------------------
    def step(self, i: int, x: int) -> int:
        return int(self._fwd[i][x])

    def step_inv(self, i: int, x: int) -> int:
        return int(self._inv[i][x])

    # -- array access ------------------------------------------------------
    def perm(self, i: int) -> np.ndarray:
        return self._fwd[i]

    def perm_inv(self, i: int) -> np.ndarray:
        return self._inv[i]

    def letter_array(self, g: int) -> np.ndarray:
        return self._fwd[abs(g) - 1] if g > 0 else self._inv[abs(g) - 1]

    def word_array(self, w: Word) -> np.ndarray:
        """The permutation Phi(w) as an image array."""
        cur = np.arange(self.n, dtype=np.int64)
        for g in reversed(w.letters):
            cur = self.letter_array(g)[cur]
        return cur

    def points(self):
        return range(self.n)

    def assignment(self) -> list[np.ndarray]:
        return [a.copy() for a in self._fwd]

    def to_json_dict(self) -> dict:
        obj = {
            "n": self.n,
            "m": self.m,
            "perms": [a.tolist() for a in self._fwd],
        }
        if self.presentation is not None:
            obj["presentation"] = self.presentation.to_json_dict()
        return obj

    def canonical_json(self) -> str:
        return canonical_dumps(self.to_json_dict())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ActionSpace)
            and self.n == other.n
            and self.m == other.m
            and all(np.array_equal(a, b) for a, b in zip(self._fwd, other._fwd))
        )

    def __repr__(self) -> str:
        return f"ActionSpace(n={self.n}, m={self.m})"


def canonical_dumps(obj) -> str:
    """Deterministic serialization: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def store(space: ActionSpace, path) -> None:
    with open(path, "w") as fh:
        fh.write(space.canonical_json())


def load(path) -> ActionSpace:
    with open(path) as fh:
        obj = json.load(fh)
    return space_from_json_dict(obj)


def space_from_json_dict(obj: dict) -> ActionSpace:
    perms = obj["perms"]
    if len(perms) != obj["m"]:
        raise ValueError("m does not match the number of permutations")
    if any(len(row) != obj["n"] for row in perms):
        raise ValueError("n does not match the permutation length")
    pres = None
    if "presentation" in obj:
        pres, _ = presentation_from_json_dict(obj["presentation"])
    return ActionSpace(perms, presentation=pres)


# ---------------------------------------------------------------------------
# Words and vectors acting on points
# ---------------------------------------------------------------------------

def apply_word(space, w: Word, x):
    """w . x with right-to-left letter application (suffix acts first)."""
    for g in reversed(w.letters):
        i = abs(g) - 1
        x = space.step(i, x) if g > 0 else space.step_inv(i, x)
    return x


def apply_vector(space, v, x):
    """The sorted lift of v in Z^m acting on x (axis m moves first)."""
    for i in range(len(v) - 1, -1, -1):
        a = v[i]
        if a > 0:
            for _ in range(a):
                x = space.step(i, x)
        elif a < 0:
            for _ in range(-a):
                x = space.step_inv(i, x)
    return x


def sorted_ball_items(space, x0, radius: int, norm: str = "l1"):
    """All (v, v_hat . x0) with ||v|| <= radius, one permutation step per node.

    ``norm`` is "l1" or "linf".  Deterministic order.  This is the single
    most important enumeration in the package: it visits the sorted orbit of
    an L1 or Linf ball in O(ball size) permutation lookups.
    """
    m = space.m
    vec = [0] * m
    out = []

    def rec(axis, point, remaining):
        if axis < 0:
            out.append((tuple(vec), point))
            return
        limit = remaining if norm == "l1" else radius
        rec(axis - 1, point, remaining)
        p = point
        for s in range(1, limit + 1):
            p = space.step(axis, p)
            vec[axis] = s
            rec(axis - 1, p, (remaining - s) if norm == "l1" else remaining)
        p = point
        for s in range(1, limit + 1):
            p = space.step_inv(axis, p)
            vec[axis] = -s
            rec(axis - 1, p, (remaining - s) if norm == "l1" else remaining)
        vec[axis] = 0

    if norm not in ("l1", "linf"):
        raise ValueError("norm must be 'l1' or 'linf'")
    rec(m - 1, x0, radius)
    return out


def ranged_sorted_items(space, x0, ranges):
    """(v, v_hat . x0) for v with v_i in [lo_i, hi_i]; each range contains 0."""
    m = space.m
    if len(ranges) != m:
        raise ValueError("need one range per axis")
    for lo, hi in ranges:
        if not (lo <= 0 <= hi):
            raise ValueError("each range must contain 0")
    vec = [0] * m
    out = []

    def rec(axis, point):
        if axis < 0:
            out.append((tuple(vec), point))
            return
        lo, hi = ranges[axis]
        rec(axis - 1, point)
        p = point
        for s in range(1, hi + 1):
            p = space.step(axis, p)
            vec[axis] = s
            rec(axis - 1, p)
        p = point
        for s in range(1, -lo + 1):
            p = space.step_inv(axis, p)
            vec[axis] = -s
            rec(axis - 1, p)
        vec[axis] = 0

    rec(m - 1, x0)
    return out


def inverse_ranged_points(space, b, ranges):
    """{w_hat^{-1} . b : w_hat the sorted lift of v, v_i in [lo_i, hi_i]}.

    Inverse sorted words apply axis 1 first, so the walk order flips.
    """
    m = space.m
    out = []

    def rec(axis, point):
        if axis >= m:
            out.append(point)
            return
        lo, hi = ranges[axis]
        rec(axis + 1, point)
        p = point
        for _ in range(hi):
            p = space.step_inv(axis, p)
            rec(axis + 1, p)
        p = point
        for _ in range(-lo):
            p = space.step(axis, p)
            rec(axis + 1, p)

    rec(0, b)
    return out


# ---------------------------------------------------------------------------
# Distances and defects
# ---------------------------------------------------------------------------

def hamming(sigma, tau) -> Fraction:
    """Normalized Hamming distance between two image arrays."""
    a = np.asarray(sigma)
    b = np.asarray(tau)
    if a.shape != b.shape:
        raise ValueError("permutation size mismatch")
    return Fraction(int(np.count_nonzero(a != b)), int(a.shape[0]))


def assignment_distance(x: ActionSpace, y: ActionSpace) -> Fraction:
    """d_n(Phi, Psi) = sum over generators of the Hamming distance."""
    if x.n != y.n or x.m != y.m:
        raise ValueError("size mismatch")
    return sum((hamming(x.perm(i), y.perm(i)) for i in range(x.m)), Fraction(0))


@dataclass(frozen=True)
class DefectReport:
    n: int
    local_defect: Fraction
    abiding_count: int
    per_word: tuple[int, ...]

    @property
    def abiding_fraction(self) -> Fraction:
        return Fraction(self.abiding_count, self.n)


def abiding_mask(x: ActionSpace, e: EquationSet) -> np.ndarray:
    """Boolean mask of the E-abiding points X_E."""
    ident = np.arange(x.n, dtype=np.int64)
    good = np.ones(x.n, dtype=bool)
    for w in e:
        good &= x.word_array(w) == ident
    return good


def local_defect(x: ActionSpace, e: EquationSet) -> DefectReport:
    """L_E(X) with per-relator violation counts and |X_E|."""
    ident = np.arange(x.n, dtype=np.int64)
    counts = []
    good = np.ones(x.n, dtype=bool)
    for w in e:
        ok = x.word_array(w) == ident
        counts.append(int(x.n - np.count_nonzero(ok)))
        good &= ok
    abiding = int(np.count_nonzero(good))
    ld = Fraction(sum(counts), x.n)
    bad_frac = Fraction(x.n - abiding, x.n)
    if not (bad_frac <= ld <= len(e) * bad_frac) and len(e) > 0:
        raise CertificateError("local defect violates the X_E sandwich")
    return DefectReport(n=x.n, local_defect=ld, abiding_count=abiding,
                        per_word=tuple(counts))


def is_solution(x: ActionSpace, e: EquationSet) -> bool:
    return bool(abiding_mask(x, e).all()) if len(e) else True


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

def ball(space, x, r: int):
    """B(x, r): BFS over all 2m directed labels; returns a set of points."""
    return ball_of_set(space, [x], r)


def ball_of_set(space, pts, r: int):
    seen = set(pts)
    frontier = list(seen)
    for _ in range(r):
        nxt = []
        for p in frontier:
            for i in range(space.m):
                for q in (space.step(i, p), space.step_inv(i, p)):
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
        if not nxt:
            break
        frontier = nxt
    return seen


def ball_of_mask(x: ActionSpace, mask: np.ndarray, r: int) -> np.ndarray:
    """Vectorized ball of a point mask in an ActionSpace."""
    cur = mask.copy()
    for _ in range(r):
        nxt = cur.copy()
        for i in range(x.m):
            nxt[x.perm(i)[cur]] = True
            nxt[x.perm_inv(i)[cur]] = True
        if np.array_equal(nxt, cur):
            break
        cur = nxt
    return cur


# ---------------------------------------------------------------------------
# Partial maps, equivariance, subgraph isomorphisms
# ---------------------------------------------------------------------------

@dataclass
class PartialMap:
    """A map between subsets of two spaces; points are space-native."""

    source: object
    target: object
    mapping: dict
    injective: bool

    @classmethod
    def from_dict(cls, source, target, mapping: dict) -> "PartialMap":
        inj = len(set(mapping.values())) == len(mapping)
        return cls(source=source, target=target, mapping=dict(mapping), injective=inj)

    def domain(self):
        return set(self.mapping)

    def image(self):
        return set(self.mapping.values())

    def __len__(self) -> int:
        return len(self.mapping)


def f_map(p_vectors, x, y, src, tgt) -> PartialMap:
    """The map F_{P,x,y} : P.x -> P.y given by p.x -> p.y (sorted action).

    Well-definedness (Stab(x) cap (-P+P) inside Stab(y) cap (-P+P)) is
    verified by enumeration over the action: whenever two vectors collide on
    the x side they must collide on the y side.
    """
    mapping: dict = {}
    for p in p_vectors:
        px = apply_vector(src, p, x)
        py = apply_vector(tgt, p, y)
        prev = mapping.get(px)
        if prev is None:
            mapping[px] = py
        elif prev != py:
            raise PreconditionError(
                "F-map is not well-defined: stabilizer condition fails")
    return PartialMap.from_dict(src, tgt, mapping)


def equivariance_points(f: PartialMap):
    """Eq(f): points whose whole out-star stays in the domain and commutes."""
    dom = f.domain()
    src, tgt = f.source, f.target
    out = set()
    for x, fx in f.mapping.items():
        ok = True
        for i in range(src.m):
            sx = src.step(i, x)
            if sx not in dom or f.mapping[sx] != tgt.step(i, fx):
                ok = False
                break
        if ok:
            out.add(x)
    return out


def check_subgraph_iso(f: PartialMap) -> bool:
    """True iff f is a bijection onto its image preserving every edge.

    Edge x --s-> is preserved when either both s.x and s.f(x) leave the
    domain/image, or both stay and f(s.x) = s.f(x).
    """
    if not f.injective:
        return False
    dom = f.domain()
    img = f.image()
    src, tgt = f.source, f.target
    for x, fx in f.mapping.items():
        for i in range(src.m):
            sx = src.step(i, x)
            sfx = tgt.step(i, fx)
            if (sx in dom) != (sfx in img):
                return False
            if sx in dom and f.mapping[sx] != sfx:
                return False
    return True


def norm_s(f, src: ActionSpace, tgt: ActionSpace) -> Fraction:
    """||f||_S for a bijection f between spaces of equal size."""
    if src.n != tgt.n or src.m != tgt.m:
        raise ValueError("size mismatch")
    if isinstance(f, PartialMap):
        arr = np.empty(src.n, dtype=np.int64)
        if len(f.mapping) != src.n or not f.injective:
            raise ValueError("norm_s needs a total bijection")
        for k, v in f.mapping.items():
            arr[k] = v
    else:
        arr = np.asarray(f, dtype=np.int64)
        if sorted(arr.tolist()) != list(range(src.n)):
            raise ValueError("norm_s needs a total bijection")
    bad = 0
    for i in range(src.m):
        bad += int(np.count_nonzero(arr[src.perm(i)] != tgt.perm(i)[arr]))
    return Fraction(bad, src.n)


# ---------------------------------------------------------------------------
# Stabilizer probes
# ---------------------------------------------------------------------------

def stabilizer_vectors(space, x0, r: int):
    """{v in Z^m : ||v||_1 <= r and v_hat . x0 = x0}, sorted.

    Enumerates only sorted lifts of the L1 ball; valid as a stabilizer
    probe wherever the surrounding box hypothesis makes the action of short
    words canonical.
    """
    out = [v for v, p in sorted_ball_items(space, x0, r, "l1") if p == x0]
    out.sort()
    return out
