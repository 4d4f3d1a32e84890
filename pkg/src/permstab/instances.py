"""Instance families: the punctured-torus lower-bound family X_t, dilutions,
seeded perturbations, and exact product-of-cycles solutions.

Regeneration from the same parameters and seed is bit-identical.
"""

from __future__ import annotations

import itertools

import numpy as np

from .actions import ActionSpace
from .presentation import AbelianPresentation, build_presentation
from .rng import SplitMix64


def make_xt(d: int, t: int) -> ActionSpace:
    """The punctured torus: (Z/t)^d minus the origin, with the +e_i action
    rerouted so (t-1) e_i maps to e_i.

    Each commutator [e_i, e_j] (i < j) is violated at exactly the three
    points e_i, e_j, e_i + e_j.
    """
    if d < 1 or t < 2:
        raise ValueError("need d >= 1 and t >= 2")
    pts = [v for v in itertools.product(range(t), repeat=d) if any(v)]
    index = {v: i for i, v in enumerate(pts)}
    n = len(pts)
    perms = []
    for axis in range(d):
        special = tuple((t - 1) if j == axis else 0 for j in range(d))
        target = tuple(1 if j == axis else 0 for j in range(d))
        arr = np.empty(n, dtype=np.int64)
        for v, i in index.items():
            if v == special:
                arr[i] = index[target]
            else:
                w = list(v)
                w[axis] = (w[axis] + 1) % t
                arr[i] = index[tuple(w)]
        perms.append(arr)
    return ActionSpace(perms, presentation=build_presentation(d, d, []))


def make_torus(dims, presentation: AbelianPresentation | None = None) -> ActionSpace:
    """The free product-of-cycles solution: point (a_1..a_m), generator i
    adds 1 to a_i mod dims[i].  An exact solution of every commutator; it
    satisfies e_i^b = 1 exactly when dims[i] divides b."""
    dims = [int(a) for a in dims]
    if any(a < 1 for a in dims):
        raise ValueError("cycle lengths must be >= 1")
    pts = list(itertools.product(*[range(a) for a in dims]))
    index = {v: i for i, v in enumerate(pts)}
    n = len(pts)
    perms = []
    for axis, size in enumerate(dims):
        arr = np.empty(n, dtype=np.int64)
        for v, i in index.items():
            w = list(v)
            w[axis] = (w[axis] + 1) % size
            arr[i] = index[tuple(w)]
        perms.append(arr)
    if presentation is None:
        presentation = build_presentation(len(dims), len(dims), [])
    return ActionSpace(perms, presentation=presentation)


def disjoint_union(spaces) -> ActionSpace:
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one space")
    m = spaces[0].m
    if any(s.m != m for s in spaces):
        raise ValueError("mixed generator counts")
    offsets = np.cumsum([0] + [s.n for s in spaces])
    perms = []
    for i in range(m):
        perms.append(np.concatenate(
            [s.perm(i) + off for s, off in zip(spaces, offsets)]))
    return ActionSpace(perms, presentation=spaces[0].presentation)


def dilute(x: ActionSpace, p: int, q: int) -> ActionSpace:
    """p disjoint copies of x plus (q-p)|x| global fixed points; the local
    defect scales by exactly p/q."""
    if not 1 <= p <= q:
        raise ValueError("need 1 <= p <= q")
    blocks = [x] * p
    parts = [np.concatenate([x.perm(i) + j * x.n for j in range(p)])
             for i in range(x.m)]
    pad = (q - p) * x.n
    base = p * x.n
    perms = [np.concatenate([part, np.arange(base, base + pad, dtype=np.int64)])
             for part in parts]
    del blocks
    return ActionSpace(perms, presentation=x.presentation)


def perturb(x: ActionSpace, k: int, seed: int) -> ActionSpace:
    """k random transposition edits spread across the m permutations;
    deterministic per seed, and d_n(x, result) <= 2k/n."""
    if k < 0:
        raise ValueError("need k >= 0")
    rng = SplitMix64(seed)
    perms = [a.copy() for a in (x.perm(i) for i in range(x.m))]
    for _ in range(k):
        g = rng.randrange(x.m)
        a = rng.randrange(x.n)
        b = rng.randrange(x.n - 1)
        if b >= a:
            b += 1
        perms[g][a], perms[g][b] = perms[g][b], perms[g][a]
    return ActionSpace(perms, presentation=x.presentation)


def instance_from_spec(spec: dict) -> ActionSpace:
    """Build an instance from a family-tagged parameter dict (CLI `gen`)."""
    family = spec["family"]
    if family == "xt":
        return make_xt(spec["d"], spec["t"])
    if family == "torus":
        return make_torus(spec["dims"])
    if family == "dilution":
        return dilute(instance_from_spec(spec["base"]), spec["p"], spec["q"])
    if family == "perturbed":
        return perturb(instance_from_spec(spec["base"]), spec["k"], spec["seed"])
    raise ValueError(f"unknown family {family!r}")
