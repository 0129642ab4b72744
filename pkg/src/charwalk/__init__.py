"""charwalk: exact walk calculus on Bruhat graphs for character stacks.

Enumerate walks, compute their lattice invariants, assemble naive and
stringy motives of generic parabolic character stacks as polynomials in q,
and execute the duality and mirror-symmetry checks at desk scale.
"""

from .lattices import (
    CongruenceSubgroup,
    FiniteAbelianGroup,
    InfiniteIndexError,
    LatticeError,
    RationalLattice,
    Sublattice,
    lattice_index,
    lattice_intersect,
    lattice_preimage,
    lattice_sum,
    quotient_group,
    smith_normal_form,
)
from .roots import (
    CartanType,
    ReducedWord,
    RootDatum,
    RootSystemError,
    WeylElement,
    build_root_datum,
    coset_representatives,
    dual_element,
    goes_up,
    langlands_dual,
    minimal_words,
    reduced_word,
)
from .walks import (
    CellIndex,
    CellWord,
    Handle,
    InstructionWord,
    Puncture,
    Walk,
    WalkError,
    cell_word,
    enumerate_walks,
    torus_map_matrix,
    validate_walk,
)
from .invariants import (
    CellInvariants,
    GenericityQuery,
    GenericityVerdict,
    NonSurjectiveError,
    NotWellTwistedError,
    SectorReport,
    TwistsRequiredError,
    WalkInvariants,
    cell_invariants,
    center_twist,
    is_generic,
    sector_counts,
    trivial_twist,
    twisted_sectors,
    walk_invariants,
    well_twisted,
)
from .duality import DualityError, DualPair, dual_twist, dual_walk, verify_duality
from .motive import (
    BookkeepingError,
    MotiveClass,
    MirrorReport,
    StackSpec,
    StringyResult,
    cell_class,
    e_specialize,
    mirror_check,
    naive_motive,
    stack_dimension,
    stringy_motive,
)
from .oracle import (
    FiniteFieldSpec,
    OracleError,
    ff_count_rank1,
    ff_generic,
    group_order_bruteforce,
    recursive_walk_count,
)

__version__ = "0.1.0"
