"""permstab: measure, test and repair almost-solutions of abelian
permutation equations, with certified per-step guarantees."""

from .actions import (
    ActionSpace,
    DefectReport,
    PartialMap,
    abiding_mask,
    apply_vector,
    apply_word,
    assignment_distance,
    ball,
    ball_of_set,
    canonical_dumps,
    check_subgraph_iso,
    equivariance_points,
    f_map,
    hamming,
    is_solution,
    load,
    local_defect,
    norm_s,
    stabilizer_vectors,
    store,
)
from .bounded_addition import (
    ClosureResult,
    closure,
    jefferson_order,
    membership_with_witness,
    verify_generation_sequence,
)
from .errors import (
    BudgetExceeded,
    CertificateError,
    PermstabError,
    PreconditionError,
)
from .instances import dilute, disjoint_union, make_torus, make_xt, perturb
from .lattices import (
    Lattice,
    Parallelotope,
    QuotientLattice,
    coset_rep,
    parallelotope,
    reduced_basis,
    short_basis_in_window,
    strongest_coordinates,
    successive_minima,
)
from .oracles import oracle_ds, oracle_eta, oracle_g
from .presentation import (
    AbelianPresentation,
    Constants,
    EquationSet,
    Word,
    box,
    build_E,
    build_presentation,
    certified_constants,
    commutator_set,
    scaled_constants,
    sorted_form,
    sorted_word,
)
from .rng import SplitMix64
from .tester import (
    TesterStats,
    amplified_test,
    canonical_test,
    estimate_rejection,
    exact_rejection_rate,
)
from .tiling import (
    RepairResult,
    Tile,
    TileContext,
    build_tile,
    eta_superset,
    repair,
    repair_via_quotient,
    single_iteration,
    tile_basis,
    tiling_algorithm,
)
from .tools import (
    GoodBasisResult,
    ToolAResult,
    ToolBResult,
    ToolCResult,
    canonical_action_check,
    good_basis,
    tool_a,
    tool_b,
    tool_c,
)

__version__ = "0.1.0"
