"""Sublattices of Z^m with exact integer/rational arithmetic.

Provides canonical coset representatives (via a row-style Hermite form),
successive minima and Korkin-Zolotarev style reduced bases by exhaustive
enumeration, strongest coordinates / strong standard complements, discrete
parallelotopes, and quotient Z^m/H handles that never materialize the
(usually infinite) quotient.

No floating point is used anywhere in this module; ranges proposed during
enumeration are derived and verified with Fraction comparisons.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import BudgetExceeded, CertificateError, PreconditionError

DEFAULT_ENUM_BUDGET = 2_000_000
DEFAULT_POINT_BUDGET = 2_000_000


def _vec(v) -> tuple[int, ...]:
    return tuple(int(a) for a in v)


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _neg(u):
    return tuple(-a for a in u)


def _scale(q, u):
    return tuple(q * a for a in u)


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def norm1(v) -> int:
    return sum(abs(a) for a in v)


def norm_inf(v) -> int:
    return max((abs(a) for a in v), default=0)


def norm2_sq(v) -> int:
    return sum(a * a for a in v)


def set_norm1(vectors) -> int:
    return sum(norm1(v) for v in vectors)


# ---------------------------------------------------------------------------
# Hermite form and integer linear algebra
# ---------------------------------------------------------------------------

def hnf_rows(vectors, m: int):
    """Row-style Hermite form of the lattice generated by ``vectors``.

    Returns (rows, pivots): echelon rows with strictly increasing pivot
    columns, positive pivots, and entries above each pivot reduced into
    [0, pivot).  The rows are a canonical basis of the generated lattice.
    """
    rows, pivots, _ = hnf_with_transform(vectors, m, want_transform=False)
    return rows, pivots


def hnf_with_transform(vectors, m: int, want_transform: bool = True):
    """Hermite form plus a unimodular U with U @ vectors = [rows; zeros]."""
    mat = [list(_vec(v)) for v in vectors]
    for r in mat:
        if len(r) != m:
            raise ValueError("vector length does not match ambient rank")
    n = len(mat)
    tr = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if want_transform else None

    def rowop(i, q, j):  # row_i -= q * row_j
        mat[i] = [a - q * b for a, b in zip(mat[i], mat[j])]
        if tr is not None:
            tr[i] = [a - q * b for a, b in zip(tr[i], tr[j])]

    def rowswap(i, j):
        mat[i], mat[j] = mat[j], mat[i]
        if tr is not None:
            tr[i], tr[j] = tr[j], tr[i]

    def rowneg(i):
        mat[i] = [-a for a in mat[i]]
        if tr is not None:
            tr[i] = [-a for a in tr[i]]

    row = 0
    pivots: list[int] = []
    for col in range(m):
        while True:
            cand = [i for i in range(row, n) if mat[i][col] != 0]
            if not cand:
                break
            imin = min(cand, key=lambda i: (abs(mat[i][col]), i))
            rowswap(row, imin)
            p = mat[row][col]
            clean = True
            for i in range(row + 1, n):
                if mat[i][col] != 0:
                    rowop(i, mat[i][col] // p, row)
                    if mat[i][col] != 0:
                        clean = False
            if clean:
                break
        if row < n and mat[row][col] != 0:
            if mat[row][col] < 0:
                rowneg(row)
            pivots.append(col)
            row += 1
    # Normalize entries above each pivot into [0, pivot), left to right so
    # earlier pivot columns stay reduced.
    for i in range(row):
        c = pivots[i]
        pv = mat[i][c]
        for j in range(i):
            q = mat[j][c] // pv
            if q:
                rowop(j, q, i)
    rows = [tuple(r) for r in mat[:row]]
    return rows, pivots, ([tuple(r) for r in tr] if tr is not None else None)


def solve_integer_combination(generators, target, m: int):
    """Integer coefficients c with sum c_i * generators_i == target, or None."""
    gens = [_vec(g) for g in generators]
    rows, pivots, tr = hnf_with_transform(gens, m)
    x = list(_vec(target))
    coeffs_on_rows = [0] * len(rows)
    for i, c in enumerate(pivots):
        q = x[c] // rows[i][c]
        if q:
            x = [a - q * b for a, b in zip(x, rows[i])]
        coeffs_on_rows[i] = q
    if any(x):
        return None
    out = [0] * len(gens)
    for i, q in enumerate(coeffs_on_rows):
        if q:
            out = [a + q * b for a, b in zip(out, tr[i])]
    return tuple(out)


def integer_row_kernel(vectors, m: int):
    """Basis of {c in Z^n : sum c_i vectors_i = 0} for n given vectors."""
    rows, _, tr = hnf_with_transform(vectors, m)
    return [tr[i] for i in range(len(rows), len(tr))]


def _int_matrix_inverse(mat):
    """Exact inverse of a unimodular integer matrix, as integer rows."""
    k = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(k)]
         for i, row in enumerate(mat)]
    for col in range(k):
        piv = next(i for i in range(col, k) if a[i][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(k):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    out = []
    for i in range(k):
        row = a[i][k:]
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append(tuple(int(x) for x in row))
    return out


def int_det(mat) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    a = [list(map(int, row)) for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for col in range(n - 1):
        if a[col][col] == 0:
            piv = next((i for i in range(col + 1, n) if a[i][col] != 0), None)
            if piv is None:
                return 0
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        for i in range(col + 1, n):
            for j in range(col + 1, n):
                a[i][j] = (a[i][j] * a[col][col] - a[i][col] * a[col][j]) // prev
        prev = a[col][col]
    return sign * a[n - 1][n - 1]


class Lattice:
    """A sublattice H <= Z^m given by an independent integer basis."""

    def __init__(self, m: int, basis):
        self.m = int(m)
        self.basis = tuple(_vec(v) for v in basis)
        self._hnf, self._pivots = hnf_rows(self.basis, self.m)
        if len(self._hnf) != len(self.basis):
            raise ValueError("basis vectors are not integrally independent")

    @classmethod
    def from_generators(cls, m: int, vectors) -> "Lattice":
        rows, _ = hnf_rows(vectors, m)
        return cls(m, rows)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def hnf(self):
        return self._hnf

    def determinant(self) -> int:
        """Index [Z^m : H] for full-rank H (product of Hermite pivots)."""
        if self.rank != self.m:
            raise ValueError("determinant defined for full-rank lattices only")
        out = 1
        for i, c in enumerate(self._pivots):
            out *= self._hnf[i][c]
        return out

    def coset_rep(self, x) -> tuple[int, ...]:
        """Canonical representative of x + H; rep(x) == rep(y) iff x-y in H."""
        x = list(_vec(x))
        for i, c in enumerate(self._pivots):
            q = x[c] // self._hnf[i][c]
            if q:
                x = [a - q * b for a, b in zip(x, self._hnf[i])]
        return tuple(x)

    def contains(self, x) -> bool:
        return not any(self.coset_rep(x))

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(v) for v in other.basis)

    def same_lattice(self, other: "Lattice") -> bool:
        return self.m == other.m and self._hnf == other._hnf

    def __repr__(self) -> str:
        return f"Lattice(m={self.m}, basis={list(self.basis)})"


def coset_rep(h: Lattice, x):
    return h.coset_rep(x)


# ---------------------------------------------------------------------------
# Reduction: exact LLL, enumeration, successive minima, KZ-style bases
# ---------------------------------------------------------------------------

def _gso(rows):
    """Gram-Schmidt data (mu, N) of basis rows, over Fractions."""
    k = len(rows)
    mu = [[Fraction(0)] * k for _ in range(k)]
    star: list[list[Fraction]] = []
    nsq: list[Fraction] = []
    for i in range(k):
        b = [Fraction(x) for x in rows[i]]
        for j in range(i):
            m_ij = sum(Fraction(rows[i][t]) * star[j][t] for t in range(len(b))) / nsq[j]
            mu[i][j] = m_ij
            b = [x - m_ij * y for x, y in zip(b, star[j])]
        star.append(b)
        nsq.append(sum(x * x for x in b))
        if nsq[i] == 0:
            raise ValueError("dependent basis")
    return mu, nsq


def lll_reduce(rows, delta: Fraction = Fraction(3, 4)):
    """Exact-arithmetic LLL; returns a new basis of the same lattice."""
    b = [list(_vec(v)) for v in rows]
    k = len(b)
    if k <= 1:
        return [tuple(r) for r in b]
    i = 1
    while i < k:
        mu, nsq = _gso(b)
        for j in range(i - 1, -1, -1):
            q = (mu[i][j] + Fraction(1, 2)).__floor__()
            if q:
                b[i] = [a - q * c for a, c in zip(b[i], b[j])]
                mu, nsq = _gso(b)
        if nsq[i] >= (delta - mu[i][i - 1] ** 2) * nsq[i - 1]:
            i += 1
        else:
            b[i], b[i - 1] = b[i - 1], b[i]
            i = max(i - 1, 1)
    return [tuple(r) for r in b]


def _gso_from_gram(g):
    """(mu, N) from a Gram matrix of Fractions."""
    k = len(g)
    mu = [[Fraction(0)] * k for _ in range(k)]
    nsq = [Fraction(0)] * k
    for i in range(k):
        for j in range(i):
            s = Fraction(g[i][j])
            for t in range(j):
                s -= mu[i][t] * mu[j][t] * nsq[t]
            mu[i][j] = s / nsq[j]
        s = Fraction(g[i][i])
        for t in range(i):
            s -= mu[i][t] ** 2 * nsq[t]
        nsq[i] = s
        if nsq[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
    return mu, nsq


def _int_range_around(center: Fraction, radius_sq: Fraction):
    """All integers n with (n - center)^2 <= radius_sq, exactly."""
    if radius_sq < 0:
        return []
    lo = center.__floor__()
    out = []
    n = lo
    while (center - n) ** 2 <= radius_sq:
        out.append(n)
        n -= 1
    n = lo + 1
    while (n - center) ** 2 <= radius_sq:
        out.append(n)
        n += 1
    out.sort()
    return out


class _EnumBudget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def tick(self, amount=1):
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(f"enumeration budget {self.limit} exceeded")


def _enum_gram(g, bound: Fraction, budget: _EnumBudget):
    """All nonzero c in Z^k with c G c^T <= bound (exact, complete)."""
    k = len(g)
    mu, nsq = _gso_from_gram(g)
    results = []
    coeff = [0] * k

    def descend(i, remaining):
        budget.tick()
        if i < 0:
            if any(coeff):
                q = bound - remaining  # == c G c^T by construction
                results.append((tuple(coeff), q))
            return
        center = -sum(mu[j][i] * coeff[j] for j in range(i + 1, k))
        for n in _int_range_around(center, remaining / nsq[i]):
            coeff[i] = n
            used = (n - center) ** 2 * nsq[i]
            descend(i - 1, remaining - used)
        coeff[i] = 0

    descend(k - 1, Fraction(bound))
    return results


def enumerate_short_vectors(basis, bound_sq, m: int | None = None,
                            budget: int = DEFAULT_ENUM_BUDGET):
    """All nonzero lattice vectors v with ||v||_2^2 <= bound_sq.

    Returns a list of (vector, norm_sq) sorted by (norm_sq, vector).
    """
    rows = [_vec(v) for v in basis]
    if not rows:
        return []
    g = [[Fraction(_dot(a, b)) for b in rows] for a in rows]
    found = _enum_gram(g, Fraction(bound_sq), _EnumBudget(budget))
    out = []
    for coeff, nsq in found:
        v = [0] * len(rows[0])
        for c, row in zip(coeff, rows):
            if c:
                v = [a + c * b for a, b in zip(v, row)]
        out.append((tuple(v), int(nsq)))
    out.sort(key=lambda p: (p[1], p[0]))
    return out


def _independent_prefix_ranks(vectors):
    """Greedy scan: yields (vector, True/False) marking rank increases."""
    rows: list[list[Fraction]] = []
    pivcols: list[int] = []
    for v in vectors:
        x = [Fraction(a) for a in v]
        for r, c in zip(rows, pivcols):
            if x[c]:
                f = x[c] / r[c]
                x = [a - f * b for a, b in zip(x, r)]
        nz = next((i for i, a in enumerate(x) if a), None)
        if nz is None:
            yield v, False
        else:
            rows.append(x)
            pivcols.append(nz)
            yield v, True


def successive_minima(h: Lattice, budget: int = DEFAULT_ENUM_BUDGET):
    """Squared successive minima (lambda_i^2 as exact integers).

    Computed by exhaustive enumeration inside the certified radius given by
    an LLL-reduced basis (lambda_i is at most the i-th smallest basis norm).
    """
    if h.rank == 0:
        return []
    red = lll_reduce(h.basis)
    bound = max(norm2_sq(v) for v in red)
    vecs = enumerate_short_vectors(red, bound, budget=budget)
    out = []
    norms = [nsq for _, nsq in vecs]
    for idx, (_, isnew) in enumerate(_independent_prefix_ranks([v for v, _ in vecs])):
        if isnew:
            out.append(norms[idx])
            if len(out) == h.rank:
                break
    if len(out) != h.rank:
        raise AssertionError("enumeration radius failed to reach full rank")
    return out


def minima_witnesses(h: Lattice, budget: int = DEFAULT_ENUM_BUDGET):
    """Independent vectors achieving the successive minima, in norm order."""
    red = lll_reduce(h.basis)
    bound = max(norm2_sq(v) for v in red)
    vecs = enumerate_short_vectors(red, bound, budget=budget)
    wit = []
    for (v, isnew) in _independent_prefix_ranks([v for v, _ in vecs]):
        if isnew:
            wit.append(v)
            if len(wit) == h.rank:
                break
    return wit


def _unimodular_with_first_row(c):
    k = len(c)
    rows, _, tr = hnf_with_transform([(x,) for x in c], 1)
    if rows and rows[0][0] != 1:
        raise ValueError("vector is not primitive")
    inv = _int_matrix_inverse(tr)
    return [tuple(inv[i][j] for i in range(k)) for j in range(k)]  # transpose


def _mat_mul(a, b):
    return [
        tuple(sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    ]


def _gram_transform(u, g):
    ug = [
        [sum(Fraction(u[i][t]) * g[t][j] for t in range(len(g))) for j in range(len(g))]
        for i in range(len(u))
    ]
    return [
        [sum(ug[i][t] * u[j][t] for t in range(len(g))) for j in range(len(u))]
        for i in range(len(u))
    ]


def _shortest_coeff(g, budget: _EnumBudget):
    bound = min(g[i][i] for i in range(len(g)))
    found = _enum_gram(g, Fraction(bound), budget)
    best = None
    for coeff, nsq in found:
        key = (nsq, coeff)
        if best is None or key < best:
            best = key
    if best is None:
        raise AssertionError("no nonzero vector within diagonal bound")
    return best[1]


def _hkz_transform(g, budget: _EnumBudget):
    k = len(g)
    ident = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    if k <= 1:
        return ident
    c = _shortest_coeff(g, budget)
    u0 = _unimodular_with_first_row(c)
    g1 = _gram_transform(u0, g)
    # Orthogonal projection away from the first vector (Schur complement).
    g2 = [
        [g1[i][j] - g1[i][0] * g1[0][j] / g1[0][0] for j in range(1, k)]
        for i in range(1, k)
    ]
    v = _hkz_transform(g2, budget)
    lift = [ident[0]] + [
        (0,) + tuple(v[i - 1][j - 1] for j in range(1, k)) for i in range(1, k)
    ]
    u = _mat_mul(lift, u0)
    # Size reduction: |mu_ij| <= 1/2, does not change the GS vectors.
    for i in range(1, k):
        for j in range(i - 1, -1, -1):
            mu, _ = _gso_from_gram(_gram_transform(u, g))
            q = (mu[i][j] + Fraction(1, 2)).__floor__()
            if q:
                u[i] = tuple(a - q * b for a, b in zip(u[i], u[j]))
    return u


def reduced_basis(h: Lattice, max_rank: int = 6,
                  budget: int = DEFAULT_ENUM_BUDGET):
    """A basis certified to satisfy ||b_i||_2 <= (1/2) sqrt(i+3) lambda_i.

    Built by recursive shortest-vector enumeration (Korkin-Zolotarev style);
    the certificate against independently enumerated successive minima is
    checked unconditionally and a failure raises CertificateError.
    """
    if h.rank > max_rank:
        raise BudgetExceeded(f"rank {h.rank} exceeds reduction limit {max_rank}")
    if h.rank == 0:
        return []
    pre = lll_reduce(h.basis)
    g = [[Fraction(_dot(a, b)) for b in pre] for a in pre]
    u = _hkz_transform(g, _EnumBudget(budget))
    out = []
    for row in u:
        v = [0] * h.m
        for c, b in zip(row, pre):
            if c:
                v = [a + c * t for a, t in zip(v, b)]
        first = next((a for a in v if a), 0)
        if first < 0:
            v = [-a for a in v]
        out.append(tuple(v))
    if not Lattice(h.m, out).same_lattice(h):
        raise CertificateError("reduced basis spans a different lattice")
    lam = successive_minima(h, budget=budget)
    for i, b in enumerate(out, start=1):
        if 4 * norm2_sq(b) > (i + 3) * lam[i - 1]:
            raise CertificateError(
                f"reduction failed the Lenstra bound at index {i}")
    return out


def short_basis_in_window(h: Lattice, t: int, ambient: int | None = None,
                          budget: int = DEFAULT_ENUM_BUDGET):
    """A basis D with D within the L1 ball of radius l*t and ||D||_1 <= l^2 t.

    Requires that the lattice already reaches full rank inside the L2 ball
    of radius t (checked via the successive minima).
    """
    l = h.m if ambient is None else ambient
    if h.rank == 0:
        return []
    lam = successive_minima(h, budget=budget)
    if lam[-1] > t * t:
        raise PreconditionError(
            f"lattice does not reach rank {h.rank} inside the L2 ball of radius {t}")
    d = reduced_basis(h, max_rank=max(h.rank, 6), budget=budget)
    for b in d:
        if norm1(b) > l * t:
            raise CertificateError("window basis vector escapes the L1 ball")
    if set_norm1(d) > l * l * t:
        raise CertificateError("window basis total L1 norm out of bound")
    return d


# ---------------------------------------------------------------------------
# Strongest coordinates and discrete parallelotopes
# ---------------------------------------------------------------------------

def strongest_coordinates(d0, m: int) -> tuple[int, ...]:
    """The lexicographically least strongest-coordinate set for ordered d0.

    Coordinates are 0-based here; the strength of I is |det| of the matrix
    whose columns are d0 with the rows in I stricken out.
    """
    vectors = [_vec(v) for v in d0]
    k = len(vectors)
    best_i = None
    best_val = -1
    for rows_i in itertools.combinations(range(m), m - k):
        stricken = set(rows_i)
        keep = [r for r in range(m) if r not in stricken]
        mat = [[vectors[c][r] for c in range(k)] for r in keep]
        val = abs(int_det(mat))
        if val > best_val:
            best_val = val
            best_i = rows_i
    if best_val <= 0:
        raise ValueError("vectors are not linearly independent")
    return best_i


def _fraction_inverse(mat):
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [tuple(row[n:]) for row in a]


class Parallelotope:
    """The discrete parallelotope P_t^{D0} with exact membership and points.

    D = D0 followed by the unit vectors of the strong standard complement,
    in ascending coordinate order; a point x belongs to P_t iff its
    D-coordinates lie in [0,1)^k x [-t,t)^{m-k}.
    """

    def __init__(self, d0, t: int, m: int,
                 point_budget: int = DEFAULT_POINT_BUDGET):
        if t < 1:
            raise ValueError("need t >= 1")
        self.d0 = tuple(_vec(v) for v in d0)
        self.t = int(t)
        self.m = int(m)
        self.k = len(self.d0)
        self.I = strongest_coordinates(self.d0, m) if self.k < m else ()
        cols = list(self.d0) + [
            tuple(int(r == i) for r in range(m)) for i in self.I
        ]
        self.columns = tuple(cols)
        mat = [[cols[c][r] for c in range(m)] for r in range(m)]
        self.det = int_det(mat)
        if self.det == 0:
            raise ValueError("degenerate parallelotope")
        self.minv = _fraction_inverse(mat)
        for i in range(self.k, m):
            for x in self.minv[i]:
                if not (-1 <= x <= 1):
                    raise CertificateError(
                        "strong-complement inverse entry escapes [-1, 1]")
        self._point_budget = point_budget
        self._points = None

    def coords(self, x):
        x = _vec(x)
        return tuple(sum(row[j] * x[j] for j in range(self.m)) for row in self.minv)

    def contains(self, x) -> bool:
        c = self.coords(x)
        for i in range(self.k):
            if not (0 <= c[i] < 1):
                return False
        for i in range(self.k, self.m):
            if not (-self.t <= c[i] < self.t):
                return False
        return True

    def l1_radius_bound(self) -> int:
        return set_norm1(self.d0) + (self.m - self.k) * self.t

    def size(self) -> int:
        return abs(self.det) * (2 * self.t) ** (self.m - self.k)

    def _cell_points(self):
        """The |det| integer points of the half-open unit cell of D."""
        full = Lattice.from_generators(self.m, self.columns)
        reps = [()]
        for i, c in enumerate(full._pivots):
            p = full.hnf[i][c]
            reps = [r + (a,) for r in reps for a in range(p)]
        # full-rank: every coordinate is a pivot coordinate in order
        out = []
        for rep in reps:
            x = list(rep)
            c = self.coords(x)
            shift = [cc.__floor__() for cc in c]
            for j, s in enumerate(shift):
                if s:
                    x = [a - s * b for a, b in zip(x, self.columns[j])]
            out.append(tuple(x))
        return out

    def points(self):
        """All integer points, sorted; validates the L1-ball containment."""
        if self._points is not None:
            return self._points
        if self.size() > self._point_budget:
            raise BudgetExceeded(
                f"parallelotope size {self.size()} exceeds budget")
        cell = self._cell_points()
        bnd = self.l1_radius_bound()
        pts = []
        unit = [tuple(int(r == i) for r in range(self.m)) for i in self.I]
        for shift in itertools.product(range(-self.t, self.t), repeat=self.m - self.k):
            base = [0] * self.m
            for s, e in zip(shift, unit):
                if s:
                    base = [a + s * b for a, b in zip(base, e)]
            for u in cell:
                p = tuple(a + b for a, b in zip(u, base))
                if norm1(p) > bnd:
                    raise CertificateError(
                        "parallelotope point escapes its L1 ball")
                pts.append(p)
        pts.sort()
        if len(pts) != self.size():
            raise CertificateError("parallelotope point count mismatch")
        self._points = pts
        return pts


def parallelotope(d0, t: int, m: int) -> Parallelotope:
    return Parallelotope(d0, t, m)


# ---------------------------------------------------------------------------
# Quotient handles
# ---------------------------------------------------------------------------

class QuotientLattice:
    """Z^m / H as a pointed action of the m generators on coset reps.

    Points are canonical coset representatives (tuples); the set itself is
    never materialized unless the quotient is finite and ``points`` is used.
    """

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self.m = lattice.m
        self._units = [tuple(int(r == i) for r in range(self.m)) for i in range(self.m)]

    @property
    def basepoint(self):
        return self.lattice.coset_rep((0,) * self.m)

    def step(self, i: int, u):
        return self.lattice.coset_rep(_add(u, self._units[i]))

    def step_inv(self, i: int, u):
        return self.lattice.coset_rep(_sub(u, self._units[i]))

    def apply_vector(self, v, u):
        return self.lattice.coset_rep(_add(u, v))

    def is_finite(self) -> bool:
        return self.lattice.rank == self.m

    def size(self) -> int | None:
        return self.lattice.determinant() if self.is_finite() else None

    def points(self):
        if not self.is_finite():
            raise ValueError("infinite quotient")
        reps = [()]
        for i, c in enumerate(self.lattice._pivots):
            p = self.lattice.hnf[i][c]
            reps = [r + (a,) for r in reps for a in range(p)]
        return [tuple(r) for r in reps]
