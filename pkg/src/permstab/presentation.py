"""Fixed abelian presentations Z^m/K, free-group words and boxes.

A presentation is determined by the ambient rank ``m``, the free rank ``d``
and the torsion orders ``betas`` (one per generator index d+1..m, 1-based).
The relator subgroup is K = <beta_i * e_i>.  Everything derived from the
presentation (the equation set, the torsion box, the constants used by the
repair pipeline) is exact integer data.

Generators are 1-based in all user-facing notation; a letter of a word is a
nonzero signed integer ``g`` with ``abs(g)`` in 1..m, negative meaning the
inverse generator.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded

# Guard for box(k, t) and similar product enumerations.
DEFAULT_BOX_LIMIT = 10**7


def free_reduce(letters) -> tuple[int, ...]:
    """Freely reduce a letter sequence (cancel adjacent g, -g pairs)."""
    out: list[int] = []
    for g in letters:
        if g == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word over the generators of F_m."""

    letters: tuple[int, ...]

    @staticmethod
    def of(*letters: int) -> "Word":
        return Word(free_reduce(letters))

    def __post_init__(self):
        if self.letters != free_reduce(self.letters):
            raise ValueError("word is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(free_reduce(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(tuple(-g for g in reversed(self.letters)))

    def abelianization(self, m: int) -> tuple[int, ...]:
        """Image under F_m -> Z^m (signed letter counts)."""
        v = [0] * m
        for g in self.letters:
            i = abs(g)
            if i > m:
                raise ValueError(f"letter {g} outside F_{m}")
            v[i - 1] += 1 if g > 0 else -1
        return tuple(v)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g in self.letters:
            parts.append(f"e{abs(g)}" + ("'" if g < 0 else ""))
        return ".".join(parts)


EMPTY_WORD = Word(())


def sorted_word(v) -> Word:
    """The sorted lift e_1^{v_1} ... e_m^{v_m} of a vector in Z^m."""
    letters = []
    for i, a in enumerate(v, start=1):
        letters.extend([i if a > 0 else -i] * abs(a))
    return Word(tuple(letters))


def sorted_form(w: Word, m: int) -> Word:
    """The unique sorted word with the same abelianization as ``w``."""
    return sorted_word(w.abelianization(m))


def commutator(i: int, j: int, si: int = 1, sj: int = 1) -> Word:
    """[e_i^si, e_j^sj] freely reduced (empty when i == j)."""
    return Word(free_reduce((si * i, sj * j, -si * i, -sj * j)))


def box(k: int, t: int, limit: int = DEFAULT_BOX_LIMIT) -> list[Word]:
    """Sorted lifts of the L-infinity ball of radius t in Z^k.

    The result has (2t+1)^k elements, in lexicographic vector order.
    """
    if k < 1 or t < 0:
        raise ValueError("need k >= 1 and t >= 0")
    size = (2 * t + 1) ** k
    if size > limit:
        raise BudgetExceeded(f"box size {size} exceeds limit {limit}")
    rng = range(-t, t + 1)
    return [sorted_word(v) for v in itertools.product(rng, repeat=k)]


def box_vectors(k: int, t: int, limit: int = DEFAULT_BOX_LIMIT):
    """The L-infinity ball itself, same order and guard as :func:`box`."""
    size = (2 * t + 1) ** k
    if size > limit:
        raise BudgetExceeded(f"box size {size} exceeds limit {limit}")
    return itertools.product(range(-t, t + 1), repeat=k)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class AbelianPresentation:
    """Gamma = Z^m / <beta_i e_i : m-d+1 <= i <= m>, with derived constants."""

    m: int
    d: int
    betas: tuple[int, ...]

    def __post_init__(self):
        if not (1 <= self.d <= self.m):
            raise ValueError("need 1 <= d <= m")
        if len(self.betas) != self.m - self.d:
            raise ValueError("need exactly m - d torsion orders")
        if any(b < 2 for b in self.betas):
            raise ValueError("torsion orders must be >= 2")
        if list(self.betas) != sorted(self.betas):
            raise ValueError("torsion orders must be nondecreasing")

    @property
    def beta_E(self) -> int:
        return self.betas[-1] if self.m > self.d else 1

    @property
    def torsion_order(self) -> int:
        out = 1
        for b in self.betas:
            out *= b
        return out

    # Exact paper constants; arbitrary-precision on purpose.
    @property
    def C_d(self) -> int:
        return max(3 * 7**self.d * self.d ** (2 * self.d + 2), self.beta_E)

    @property
    def t_E(self) -> int:
        return max(_ceil_div((self.m - self.d) * self.m * self.beta_E, self.d), 2)

    @property
    def C_Box(self) -> int:
        return 180 * self.m**3 * self.C_d

    def torsion_vectors(self) -> list[tuple[int, ...]]:
        """The box T: last m-d coordinates in [0, beta_i), zeros elsewhere."""
        ranges = [range(b) for b in self.betas]
        out = []
        for tail in itertools.product(*ranges):
            out.append((0,) * self.d + tail)
        return out

    def torsion_words(self) -> list[Word]:
        return [sorted_word(v) for v in self.torsion_vectors()]

    def relator_lattice_basis(self) -> list[tuple[int, ...]]:
        """Basis {beta_i e_i} of K (empty when m == d)."""
        out = []
        for idx, b in enumerate(self.betas):
            v = [0] * self.m
            v[self.d + idx] = b
            out.append(tuple(v))
        return out

    def to_json_dict(self) -> dict:
        return {"m": self.m, "d": self.d, "betas": list(self.betas)}


def build_presentation(m: int, d: int, betas) -> AbelianPresentation:
    return AbelianPresentation(m=m, d=d, betas=tuple(betas))


@dataclass(frozen=True)
class EquationSet:
    """A finite set of nonempty relator words, deduplicated after reduction."""

    words: tuple[Word, ...]
    source: str  # "commutators_only" | "full_E" | "custom"

    def __post_init__(self):
        seen = set()
        for w in self.words:
            if not w.letters:
                raise ValueError("equation sets may not contain the empty word")
            if w.letters in seen:
                raise ValueError("duplicate word in equation set")
            seen.add(w.letters)

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def total_length(self) -> int:
        return sum(len(w) for w in self.words)


def build_E(p: AbelianPresentation) -> EquationSet:
    """The working equation set: all nontrivial signed commutators plus
    the torsion relators e_i^{beta_i}.

    Pairs i == j freely reduce to the identity and are dropped.
    """
    words: list[Word] = []
    seen = set()
    for i in range(1, p.m + 1):
        for j in range(1, p.m + 1):
            for si in (1, -1):
                for sj in (1, -1):
                    w = commutator(i, j, si, sj)
                    if w.letters and w.letters not in seen:
                        seen.add(w.letters)
                        words.append(w)
    for idx, b in enumerate(p.betas):
        i = p.d + idx + 1
        w = Word((i,) * b)
        if w.letters not in seen:
            seen.add(w.letters)
            words.append(w)
    return EquationSet(tuple(words), source="full_E")


def commutator_set(d: int, m: int | None = None) -> EquationSet:
    """The canonical commutator set {[e_i, e_j] : 1 <= i < j <= d}."""
    del m  # the words only mention generators 1..d
    words = [commutator(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
    return EquationSet(tuple(words), source="commutators_only")


@dataclass(frozen=True)
class Constants:
    """Effective pipeline constants.

    ``certified`` carries the exact paper values.  ``scaled`` lets desk-scale
    experiments replace them; every report records which set produced it.
    ``margin`` is the parallelotope safety factor (the paper builds tiles on
    the 2t-parallelotope; scaled mode may use 1), ``stab_factor`` fixes the
    stabilizer scan radius stab_factor*t + 1 and ``schedule_coeff`` is the
    prefactor of the tiling schedule (24*C_Box in the certified regime).
    """

    mode: str
    C_d: int
    t_E: int
    C_Box: int
    h: int
    schedule_coeff: Fraction
    toolA_box_factor: int
    stab_factor: int
    r_factor: int
    margin: int

    def round_threshold(self) -> int:
        return 2 * self.t_E

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "C_d": self.C_d,
            "t_E": self.t_E,
            "C_Box": self.C_Box,
            "h": self.h,
            "schedule_coeff": str(self.schedule_coeff),
            "toolA_box_factor": self.toolA_box_factor,
            "stab_factor": self.stab_factor,
            "r_factor": self.r_factor,
            "margin": self.margin,
        }


def certified_constants(p: AbelianPresentation) -> Constants:
    c_d, c_box = p.C_d, p.C_Box
    return Constants(
        mode="certified",
        C_d=c_d,
        t_E=p.t_E,
        C_Box=c_box,
        h=16 * p.d * c_d + 1,
        schedule_coeff=Fraction(24 * c_box),
        toolA_box_factor=30 * p.m**3,
        stab_factor=12 * c_d,
        r_factor=6 * c_d,
        margin=2,
    )


def scaled_constants(
    p: AbelianPresentation,
    C_d: int = 1,
    C_Box: int = 1,
    h: int = 2,
    schedule_coeff: Fraction | int = Fraction(1, 3),
    stab_factor: int = 2,
    margin: int = 1,
) -> Constants:
    """Desk-scale constants; defaults are the ones used throughout the tests."""
    t_e = max(_ceil_div((p.m - p.d) * p.m * p.beta_E, p.d), 1)
    return Constants(
        mode="scaled",
        C_d=C_d,
        t_E=t_e,
        C_Box=C_Box,
        h=h,
        schedule_coeff=Fraction(schedule_coeff),
        toolA_box_factor=2,
        stab_factor=stab_factor,
        r_factor=max(2 * p.m * margin, 2),
        margin=margin,
    )


def constants_from_scale_multipliers(
    p: AbelianPresentation,
    C_d: Fraction | int = 1,
    t_E: Fraction | int = 1,
    C_Box: Fraction | int = 1,
) -> Constants:
    """Effective constants from exact-rational multipliers of the paper values.

    Multiplier 1 everywhere reproduces the certified constants; the derived
    constants (h, scan radii, schedule prefactor) keep their paper formulas,
    evaluated at the effective values.
    """
    def eff(scale, paper, floor):
        scale = Fraction(scale)
        if scale <= 0:
            raise ValueError("constant multipliers must be positive")
        v = scale * paper
        return max(_ceil_div(v.numerator, v.denominator), floor)

    c_d = eff(C_d, p.C_d, 1)
    t_e = eff(t_E, p.t_E, 2)
    c_box = eff(C_Box, p.C_Box, 1)
    mode = "certified" if (c_d, t_e, c_box) == (p.C_d, p.t_E, p.C_Box) else "scaled"
    return Constants(
        mode=mode,
        C_d=c_d,
        t_E=t_e,
        C_Box=c_box,
        h=16 * p.d * c_d + 1,
        schedule_coeff=Fraction(24 * c_box),
        toolA_box_factor=30 * p.m**3,
        stab_factor=12 * c_d,
        r_factor=6 * c_d,
        margin=2,
    )


def _parse_rational(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise ValueError(f"expected an exact rational, got {x!r}")


def presentation_from_json_dict(obj: dict) -> tuple[AbelianPresentation, Constants]:
    """Parse the presentation file schema.

    {"m": int, "d": int, "betas": [int],
     "constant_scale": {"C_d": rational, "t_E": rational, "C_Box": rational}?}

    Rationals may be written as integers or "p/q" strings.
    """
    p = build_presentation(obj["m"], obj["d"], obj.get("betas", []))
    scale = obj.get("constant_scale")
    if scale is None:
        return p, certified_constants(p)
    consts = constants_from_scale_multipliers(
        p,
        C_d=_parse_rational(scale.get("C_d", 1)),
        t_E=_parse_rational(scale.get("t_E", 1)),
        C_Box=_parse_rational(scale.get("C_Box", 1)),
    )
    return p, consts


def load_presentation(path) -> tuple[AbelianPresentation, Constants]:
    with open(path) as fh:
        return presentation_from_json_dict(json.load(fh))
