"""Independent brute-force oracles used to cross-check the main pipeline:
exact global defect (min over all solutions), exact d_S (min over all
bijections), and the exact tile-interference set.

These deliberately share no code with the repair path beyond ActionSpace,
so values derived from them genuinely cross-check the pipeline.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .actions import ActionSpace
from .errors import BudgetExceeded
from .presentation import EquationSet, Word

ORACLE_G_MAX_N = 6
ORACLE_DS_MAX_N = 8


def _perm_cycles(sigma):
    n = len(sigma)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        a = start
        while not seen[a]:
            seen[a] = True
            cyc.append(a)
            a = sigma[a]
        cycles.append(tuple(cyc))
    return cycles


def centralizer_elements(sigma):
    """All permutations commuting with sigma, via its cycle structure.

    Commuting elements permute same-length cycles and rotate within them.
    """
    n = len(sigma)
    by_len: dict[int, list[tuple[int, ...]]] = {}
    for cyc in _perm_cycles(sigma):
        by_len.setdefault(len(cyc), []).append(cyc)
    groups = sorted(by_len.items())

    def build(group_idx, tau):
        if group_idx == len(groups):
            yield tuple(tau)
            return
        length, cycles = groups[group_idx]
        r = len(cycles)
        for assignment in itertools.permutations(range(r)):
            for shifts in itertools.product(range(length), repeat=r):
                tau2 = list(tau)
                for j, (target, shift) in enumerate(zip(assignment, shifts)):
                    src = cycles[j]
                    dst = cycles[target]
                    for pos in range(length):
                        tau2[src[pos]] = dst[(pos + shift) % length]
                yield from build(group_idx + 1, tau2)

    yield from build(0, [0] * n)


def _word_fixes_all(word: Word, perms) -> bool:
    n = len(perms[0])
    for x in range(n):
        y = x
        for g in reversed(word.letters):
            i = abs(g) - 1
            y = perms[i][y] if g > 0 else perms[i].index(y)
        if y != x:
            return False
    return True


def _torsion_words(e: EquationSet):
    out = []
    for w in e:
        letters = set(w.letters)
        if len(letters) == 1 and next(iter(letters)) > 0:
            out.append(w)
    return out


def oracle_g(x: ActionSpace, e: EquationSet) -> Fraction:
    """Exact global defect: min over all E-solutions Psi of d_n(Phi, Psi).

    Budget-guarded: n <= 6 and m <= 2; commuting pairs are enumerated by
    centralizer decomposition.
    """
    if x.n > ORACLE_G_MAX_N or x.m > 2:
        raise BudgetExceeded("oracle_g is limited to n <= 6, m <= 2")
    n = x.n
    phi = [tuple(int(v) for v in x.perm(i)) for i in range(x.m)]
    torsion = _torsion_words(e)
    best = None

    def dist(a, b):
        return sum(1 for u, v in zip(a, b) if u != v)

    if x.m == 1:
        for sigma in itertools.permutations(range(n)):
            if all(_word_fixes_all(w, [sigma]) for w in e):
                d = Fraction(dist(sigma, phi[0]), n)
                best = d if best is None else min(best, d)
        return best

    has_commutator = any(len(set(abs(g) for g in w.letters)) == 2 for w in e)
    for sigma in itertools.permutations(range(n)):
        d_sigma = dist(sigma, phi[0])
        if best is not None and Fraction(d_sigma, n) >= best:
            continue
        taus = centralizer_elements(sigma) if has_commutator else \
            itertools.permutations(range(n))
        for tau in taus:
            if torsion and not all(_word_fixes_all(w, [sigma, tau])
                                   for w in torsion):
                continue
            d = Fraction(d_sigma + dist(tau, phi[1]), n)
            if best is None or d < best:
                best = d
    return best


def oracle_ds(x: ActionSpace, y: ActionSpace) -> Fraction:
    """Exact d_S(X, Y): minimum of ||f||_S over all bijections f, by
    branch and bound in assignment order."""
    if x.n != y.n or x.m != y.m:
        raise ValueError("size mismatch")
    if x.n > ORACLE_DS_MAX_N:
        raise BudgetExceeded("oracle_ds is limited to n <= 8")
    n, m = x.n, x.m
    xs = [[int(v) for v in x.perm(i)] for i in range(m)]
    ys = [[int(v) for v in y.perm(i)] for i in range(m)]
    best = [m * n + 1]
    f = [-1] * n
    used = [False] * n

    def added_cost(p):
        # edges p -> s.p and q -> s.q = p with both endpoints assigned
        cost = 0
        for i in range(m):
            q = xs[i][p]
            if f[q] >= 0 and ys[i][f[p]] != f[q]:
                cost += 1
            for q2 in range(n):
                if q2 != p and f[q2] >= 0 and xs[i][q2] == p:
                    if ys[i][f[q2]] != f[p]:
                        cost += 1
        return cost

    def rec(p, cost):
        if cost >= best[0]:
            return
        if p == n:
            best[0] = cost
            return
        for img in range(n):
            if used[img]:
                continue
            f[p] = img
            used[img] = True
            rec(p + 1, cost + added_cost(p))
            used[img] = False
            f[p] = -1

    rec(0, 0)
    return Fraction(best[0], n)


def oracle_eta(ctx, a_points, t: int):
    """Exact eta_t(A): A plus every anchor whose t-tile image meets A.

    Enumerates all admissible anchors with the pipeline's own tile
    construction (the interference set is defined through those tiles)."""
    from .tiling import build_tile

    a = set(int(p) for p in a_points)
    out = set(a)
    for x0 in range(ctx.x.n):
        tile = build_tile(ctx, x0, t)
        if tile is not None and a.intersection(tile.image.tolist()):
            out.add(x0)
    return out
