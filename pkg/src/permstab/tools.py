"""Tools A, B and C: certified constructors of partial maps between action
spaces and quotient lattices.

Each tool re-verifies its advertised conclusion at runtime (injectivity,
subgraph-isomorphism, equivariance and growth bounds); the theorems are
never assumed.  Quotients Z^m/H are handled through coset-representative
calculators and never materialized unless finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .actions import (
    ball_of_set,
    check_subgraph_iso,
    equivariance_points,
    f_map,
    sorted_ball_items,
    stabilizer_vectors,
    apply_word,
)
from .errors import BudgetExceeded, CertificateError, PreconditionError
from .lattices import (
    Lattice,
    Parallelotope,
    QuotientLattice,
    _independent_prefix_ranks,
    enumerate_short_vectors,
    integer_row_kernel,
    lll_reduce,
    norm1,
    set_norm1,
    short_basis_in_window,
    solve_integer_combination,
)
from .presentation import (
    AbelianPresentation,
    Constants,
    Word,
    certified_constants,
    sorted_word,
)


# ---------------------------------------------------------------------------
# Tool C
# ---------------------------------------------------------------------------

@dataclass
class ToolCResult:
    y_space: QuotientLattice
    v_space: QuotientLattice
    f_c: object  # PartialMap, total on Y
    parallelotope: Parallelotope
    eq_count: int
    ball_growth: dict


def tool_c(h: Lattice, t: int, growth_radii=(0, 1, None)) -> ToolCResult:
    """Inject a finite quotient Y into V = Z^m/H along the parallelotope of
    the given basis.

    Verifies |Eq| >= (1 - (m-k)/t) |Y| and the ball-growth bound
    |B_V(Im, r)| <= (1 + r/t)^{m-k} |Im| for each sampled radius.
    """
    if t < 1:
        raise PreconditionError("need t >= 1")
    m = h.m
    k = h.rank
    par = Parallelotope(h.basis, t, m)
    complement = [tuple(int(r == i) for r in range(m)) for i in par.I]
    t_basis = list(h.basis) + [tuple(2 * t * a for a in e) for e in complement]
    y_lat = Lattice(m, t_basis)
    y_space = QuotientLattice(y_lat)
    v_space = QuotientLattice(h)

    fc = f_map(par.points(), y_space.basepoint, v_space.basepoint,
               y_space, v_space)
    if not fc.injective:
        raise CertificateError("tool C map failed injectivity")
    if len(fc) != y_space.size():
        raise CertificateError("tool C domain does not exhaust Y")

    eq = equivariance_points(fc)
    eq_count = len(eq)
    size = y_space.size()
    if eq_count * t < (t - (m - k)) * size:
        raise CertificateError("tool C equivariance bound failed")

    image = list(fc.image())
    growth = {}
    for r in growth_radii:
        rr = t if r is None else r
        grown = len(ball_of_set(v_space, image, rr))
        ok = grown * t ** (m - k) <= (t + rr) ** (m - k) * len(image)
        if not ok:
            raise CertificateError("tool C ball-growth bound failed")
        growth[rr] = (grown, True)
    return ToolCResult(y_space=y_space, v_space=v_space, f_c=fc,
                       parallelotope=par, eq_count=eq_count,
                       ball_growth=growth)


# ---------------------------------------------------------------------------
# Good bases (the far-reaching short set of Tool B)
# ---------------------------------------------------------------------------

def _l1_minima_data(lat: Lattice, budget: int = 2_000_000):
    """L1 successive minima of a lattice, with achieving vectors."""
    if lat.rank == 0:
        return [], []
    red = lll_reduce(lat.basis)
    bound = max(norm1(v) for v in red)
    vecs = enumerate_short_vectors(red, bound * bound, budget=budget)
    cand = sorted(((norm1(v), v) for v, _ in vecs))
    minima: list[int] = []
    witnesses: list = []
    flags = _independent_prefix_ranks([v for _, v in cand])
    for (n1, _), (v, isnew) in zip(cand, flags):
        if isnew:
            minima.append(n1)
            witnesses.append(v)
            if len(minima) == lat.rank:
                break
    return minima, witnesses


@dataclass
class GoodBasisResult:
    basis: tuple
    norm_bound: int
    norm_ok: bool
    window_radius: int
    window_mode: str  # "enumerated" | "certified-by-construction"


def good_basis(h: Lattice, t: int, p: AbelianPresentation,
               t_min: int | None = None,
               window_budget: int = 200_000) -> GoodBasisResult:
    """A short independent D <= H with K <= <D> agreeing with H inside a
    window of radius 2(||D||_1 + d t) + 1.

    Follows the projection/scale-search construction: find the first scale
    where the rank of the projected lattice inside the L1 ball stabilizes,
    take a reduced window basis there, lift it through the torsion box, and
    append a short basis of the torsion part H_T.
    """
    m, d = p.m, p.d
    if h.m != m:
        raise ValueError("ambient rank mismatch")
    t_min = p.t_E if t_min is None else t_min
    if t < t_min:
        raise PreconditionError(f"need t >= {t_min}")
    for v in p.relator_lattice_basis():
        if not h.contains(v):
            raise PreconditionError("K is not contained in H")

    # Projection onto the free part.
    proj_gens = [v[:d] for v in h.basis]
    hbar = Lattice.from_generators(d, proj_gens)
    minima1, _ = _l1_minima_data(hbar)

    def rank_at(radius):
        return sum(1 for lam in minima1 if lam <= radius)

    scales = [t * (7 * d * d) ** i for i in range(d + 2)]
    stable_i = next(i for i in range(d + 1)
                    if rank_at(scales[i]) == rank_at(scales[i + 1]))

    # G = <Hbar cap B^{L1}(t_{i+1})>.
    if hbar.rank == 0 or rank_at(scales[stable_i + 1]) == 0:
        d0_bar: list = []
    else:
        red = lll_reduce(hbar.basis)
        max_basis_l1 = max(norm1(v) for v in red)
        if scales[stable_i + 1] >= max_basis_l1:
            g_lat = hbar
        else:
            short = [v for v, _ in enumerate_short_vectors(
                red, scales[stable_i + 1] ** 2)]
            short = [v for v in short if norm1(v) <= scales[stable_i + 1]]
            g_lat = Lattice.from_generators(d, short)
        d0_bar = short_basis_in_window(g_lat, scales[stable_i], ambient=d)

    # Lift the projected basis through the torsion box.
    d0 = []
    for hb in d0_bar:
        coeffs = solve_integer_combination(proj_gens, hb, d)
        if coeffs is None:  # pragma: no cover - hb lies in tau(H)
            raise AssertionError("projected vector not liftable")
        lift = [0] * m
        for c, bvec in zip(coeffs, h.basis):
            if c:
                lift = [a + c * b for a, b in zip(lift, bvec)]
        for j in range(d, m):
            beta = p.betas[j - d]
            q = lift[j] // beta
            if q:
                lift[j] -= q * beta
        if lift[:d] != list(hb):
            raise AssertionError("lift lost its projection")
        d0.append(tuple(lift))

    # H_T = H cap ({0}^d + Z^{m-d}) via the integer kernel of the projection.
    d1 = []
    if m > d:
        ker = integer_row_kernel(proj_gens, d)
        tails = []
        for c in ker:
            vec = [0] * m
            for ci, bvec in zip(c, h.basis):
                if ci:
                    vec = [a + ci * b for a, b in zip(vec, bvec)]
            if any(vec[:d]):
                raise AssertionError("kernel vector has a free part")
            tails.append(tuple(vec[d:]))
        ht = Lattice.from_generators(m - d, tails)
        d1_c = short_basis_in_window(ht, p.beta_E, ambient=m - d)
        d1 = [(0,) * d + tail for tail in d1_c]

    basis = tuple(d0) + tuple(d1)
    span = Lattice(m, basis) if basis else Lattice.from_generators(m, [])
    for v in p.relator_lattice_basis():
        if not span.contains(v):
            raise CertificateError("good basis does not contain K")
    if not all(h.contains(v) for v in basis):
        raise CertificateError("good basis escapes H")

    norm_bound = 2 * 7**d * d ** (2 * d + 2) * t
    norm_ok = set_norm1(basis) <= norm_bound
    if not norm_ok and t >= p.t_E:
        raise CertificateError("good basis norm bound failed")

    # Window property: <D> and H agree inside the L1 ball of radius R.
    r_window = 2 * (set_norm1(basis) + d * t) + 1
    window_mode = "certified-by-construction"
    try:
        in_window = enumerate_short_vectors(
            lll_reduce(h.basis) if h.rank else [], r_window * r_window,
            budget=window_budget)
        for v, _ in in_window:
            if norm1(v) <= r_window and not span.contains(v):
                raise CertificateError("window property failed by enumeration")
        window_mode = "enumerated"
    except BudgetExceeded:
        pass
    return GoodBasisResult(basis=basis, norm_bound=norm_bound, norm_ok=norm_ok,
                           window_radius=r_window, window_mode=window_mode)


# ---------------------------------------------------------------------------
# Tool B
# ---------------------------------------------------------------------------

@dataclass
class ToolBResult:
    basis: tuple
    u_space: QuotientLattice
    v_space: QuotientLattice
    f_b: object
    parallelotope: Parallelotope
    radius_ok: bool


def tool_b(h: Lattice, t: int, p: AbelianPresentation,
           constants: Constants | None = None) -> ToolBResult:
    """A subgraph isomorphism P_t^D . u0 -> P_t^D . v0 for a short D <= H."""
    c = certified_constants(p) if constants is None else constants
    gb = good_basis(h, t, p, t_min=c.t_E)
    basis = gb.basis
    u_lat = Lattice(h.m, basis) if basis else Lattice.from_generators(h.m, [])
    u_space = QuotientLattice(u_lat)
    v_space = QuotientLattice(h)
    par = Parallelotope(basis, t, h.m)
    radius_ok = par.l1_radius_bound() <= c.C_d * t
    if not radius_ok and c.mode == "certified":
        raise CertificateError("parallelotope escapes the C_d t ball")
    fb = f_map(par.points(), u_space.basepoint, v_space.basepoint,
               u_space, v_space)
    if not check_subgraph_iso(fb):
        raise CertificateError("tool B map is not a subgraph isomorphism")
    return ToolBResult(basis=basis, u_space=u_space, v_space=v_space,
                       f_b=fb, parallelotope=par, radius_ok=radius_ok)


# ---------------------------------------------------------------------------
# Tool A
# ---------------------------------------------------------------------------

@dataclass
class ToolAResult:
    h: Lattice
    u_space: QuotientLattice
    f_a: object
    r: int
    k_inside: bool


def tool_a(x, x0: int, r: int, abiding, p: AbelianPresentation,
           constants: Constants | None = None,
           precondition_checked: bool = False,
           stab_vectors=None) -> ToolAResult:
    """A subgraph isomorphism B_U(u0, r) -> B_X(x0, r) where U = Z^m/H and
    H is spanned by the short stabilizer vectors at x0.

    ``abiding`` is the boolean E-abiding mask of X.  The box precondition is
    scanned at radius toolA_box_factor * r unless the caller already did.
    ``stab_vectors`` may carry a precomputed radius-(2r+1) stabilizer scan.
    """
    from .actions import PartialMap

    c = certified_constants(p) if constants is None else constants
    m = x.m
    if not precondition_checked:
        radius = c.toolA_box_factor * r
        for _, pt in sorted_ball_items(x, x0, radius, "linf"):
            if not abiding[pt]:
                raise PreconditionError(
                    "box precondition fails: non-abiding point in the box")
    stab = (stabilizer_vectors(x, x0, 2 * r + 1)
            if stab_vectors is None else list(stab_vectors))
    h = Lattice.from_generators(m, stab)
    u_space = QuotientLattice(h)
    # One incremental walk of the L1 ball; the F-map well-definedness check
    # is the coset-consistency of the endpoints.
    mapping: dict = {}
    for v, pt in sorted_ball_items(x, x0, r, "l1"):
        key = h.coset_rep(v)
        prev = mapping.get(key)
        if prev is None:
            mapping[key] = pt
        elif prev != pt:
            raise PreconditionError(
                "F-map is not well-defined: stabilizer condition fails")
    fa = PartialMap.from_dict(u_space, x, mapping)
    if not check_subgraph_iso(fa):
        raise CertificateError("tool A map is not a subgraph isomorphism")
    k_inside = all(h.contains(v) for v in p.relator_lattice_basis())
    return ToolAResult(h=h, u_space=u_space, f_a=fa, r=r, k_inside=k_inside)


def canonical_action_check(x, x0: int, radius: int, rng, samples: int = 64) -> bool:
    """Sample random words w of length <= radius and test w.x0 == w_hat.x0."""
    if radius == 0:
        return True
    m = x.m
    for _ in range(samples):
        length = rng.randrange(radius) + 1
        letters = []
        for _ in range(length):
            g = rng.randrange(m) + 1
            letters.append(g if rng.randrange(2) else -g)
        w = Word.of(*letters)
        if apply_word(x, w, x0) != apply_word(x, sorted_word(w.abelianization(m)), x0):
            return False
    return True
