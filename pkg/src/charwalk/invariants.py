"""Lattice and group invariants of walks and cells.

All cocharacter-side computations happen in t(Z)-basis coordinates, where
t(Z) itself is the unit lattice; root-side computations in the simple-root
basis, where the root lattice Q is the unit lattice.  Subgroups of the torus
(the stabilizer groups and their twisted refinements) are congruence systems
in the cocharacter space, read modulo t(Z).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as iproduct

from .lattices import (
    CongruenceSubgroup,
    FiniteAbelianGroup,
    RationalLattice,
    Sublattice,
    dual_lattice,
    kernel_basis,
    mat_mul,
    mat_transpose,
    mat_vec,
    quotient_group,
)
from .roots import RootDatum, RootSystemError, WeylElement
from .walks import CellIndex, Walk, WalkError, cell_word, torus_map_matrix, validate_walk


class NotWellTwistedError(ValueError):
    pass


class TwistsRequiredError(ValueError):
    """High-genus, higher-rank, nontrivially twisted calls need explicit twists."""


class NonSurjectiveError(ValueError):
    """A finite stabilizer group was requested for a non-surjective walk."""


# ---------------------------------------------------------------------------
# twist subgroups F <= Z(G), stored through their cocharacter overlattices
# ---------------------------------------------------------------------------

def trivial_twist(datum: RootDatum) -> RationalLattice:
    """Lambda_F for F = 1: just t(Z)."""
    return RationalLattice.standard(datum.rank)


def center_twist(datum: RootDatum) -> RationalLattice:
    """Lambda_F for F = Z(G): the full coweight lattice Q^*."""
    return datum.coweights_tz


def validate_twist(datum: RootDatum, twist: RationalLattice):
    if twist.ambient_rank != datum.rank or twist.rank != datum.rank:
        raise ValueError("twist lattice must be full rank in t(Z) coordinates")
    if not twist.contains_lattice(RationalLattice.standard(datum.rank)):
        raise ValueError("twist lattice must contain t(Z)")
    if not datum.coweights_tz.contains_lattice(twist):
        raise ValueError("twist lattice must be inside the coweight lattice")


def twist_is_trivial(datum: RootDatum, twist: RationalLattice) -> bool:
    return twist == trivial_twist(datum)


# ---------------------------------------------------------------------------
# walk-level invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WalkInvariants:
    T_p: Sublattice              # stay lattice in t(Z) coordinates
    Q_p: Sublattice              # root-side stay lattice
    Z_p: FiniteAbelianGroup      # dual of Q / Q_p (free rank = torus directions)
    pi1_p: FiniteAbelianGroup    # t(Z) / T_p
    S_p_group: CongruenceSubgroup  # common stabilizer subgroup, mod t(Z)
    surjective: bool

    def S_group(self, datum: RootDatum) -> FiniteAbelianGroup:
        return self.S_p_group.group_mod(RationalLattice.standard(datum.rank))


def _stay_data(datum: RootDatum, walk: Walk):
    n = datum.rank
    t_cols, q_cols = [], []
    for k in sorted(walk.stay_set):
        i = walk.letter(k)
        unit = [int(i == j) for j in range(n)]
        pinv = walk.pi[k].inverse
        t_cols.append(datum.to_tz_int(pinv.act_coroot(unit)))
        q_cols.append(pinv.act_root(unit))
    return t_cols, q_cols


def walk_invariants(datum: RootDatum, walk: Walk) -> WalkInvariants:
    bad = validate_walk(datum, walk)
    if bad is not None:
        raise WalkError(f"invalid walk: {bad.kind} at step {bad.step}")
    n = datum.rank
    t_cols, q_cols = _stay_data(datum, walk)
    T_p = Sublattice(n, t_cols)
    Q_p = Sublattice(n, q_cols)
    Z_p = quotient_group(Sublattice.full(n), Q_p).dual()
    pi1_p = quotient_group(Sublattice.full(n), T_p)
    S_p = dual_lattice(Q_p.basis, datum.pairing_tz)
    return WalkInvariants(T_p, Q_p, Z_p, pi1_p, S_p, T_p.rank == n)


def walk_reflection_group(datum: RootDatum, walk: Walk, track="pi"):
    """W(p): the subgroup generated by the stay reflections along a track."""
    gens = []
    n = datum.rank
    for k in sorted(walk.stay_set):
        i = walk.letter(k)
        w = walk.pi[k] if track == "pi" else walk.p[k]
        gens.append(w.inverse * datum.simple_reflections[i] * w)
    return generated_subgroup(datum, gens)


def generated_subgroup(datum: RootDatum, generators):
    seen = {datum.identity_element}
    frontier = [datum.identity_element]
    while frontier:
        nxt = []
        for w in frontier:
            for g in generators:
                v = g * w
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# cell-level invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellInvariants:
    T_beta: Sublattice
    pi1_beta: FiniteAbelianGroup
    Z_beta: FiniteAbelianGroup
    S_tilde: CongruenceSubgroup
    T_tilde: Sublattice
    pi1_tilde: FiniteAbelianGroup
    Z_tilde: FiniteAbelianGroup
    walk: WalkInvariants
    surjective: bool


def well_twisted(datum: RootDatum, cell: CellIndex) -> bool:
    """Each handle twist must lie in the subgroup of the earlier letters."""
    earlier = []
    for h in cell.handles:
        if not h.twist.is_identity:
            sub = generated_subgroup(datum, earlier)
            if h.twist not in sub:
                return False
        earlier.extend([h.pi1, h.pi2])
    return True


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _minus_id(m):
    n = len(m)
    return [[m[i][j] - int(i == j) for j in range(n)] for i in range(n)]


def cell_invariants(datum: RootDatum, cell: CellIndex, walk: Walk,
                    section="lex") -> CellInvariants:
    if not well_twisted(datum, cell):
        raise NotWellTwistedError(
            "a handle twist lies outside the subgroup of the earlier letters")
    winv = walk_invariants(datum, walk)
    n = datum.rank
    cols = torus_map_matrix(datum, cell, walk, section=section)
    T_beta = Sublattice(n, cols)
    pi1_beta = quotient_group(Sublattice.full(n), T_beta)

    # root-side commutator span, transported by pi_l and saturated
    pi_l = walk.pi[-1]
    comm_cols = []
    for h in cell.handles:
        for w in (h.pi1, h.pi2):
            diff = _minus_id([list(r) for r in w.inverse.mat_root])
            for j in range(n):
                col = [diff[r][j] for r in range(n)]
                comm_cols.append(pi_l.act_root(col))
    comm_sat = Sublattice(n, comm_cols).saturation()
    Z_beta = quotient_group(
        Sublattice.full(n),
        Sublattice(n, list(winv.Q_p.generators) + list(comm_sat.basis)),
    ).dual()

    # S_tilde: S(p) cut by the central-defect conditions of every handle letter
    m_pi_l = datum.cochar_matrix_tz(pi_l)
    pair = [list(r) for r in datum.pairing_tz]
    systems = [winv.S_p_group]
    for h in cell.handles:
        for w in (h.pi1, h.pi2):
            diff = _minus_id([list(r) for r in datum.cochar_matrix_tz(w)])
            rows = mat_mul(mat_mul(pair, diff), [list(r) for r in m_pi_l])
            systems.append(CongruenceSubgroup.from_rows(n, 1, rows))
    S_tilde = systems[0].intersect(*systems[1:])
    Z_tilde = S_tilde.group_mod(datum.coweights_tz)

    # T_tilde: T(p) plus the twist-conjugated coweight defects
    t_tilde_cols = [list(c) for c in _stay_data(datum, walk)[0]]
    qstar = datum.coweights_tz.basis_fractions()
    for h in cell.handles:
        m_tw = datum.cochar_matrix_tz(h.twist)
        for w in (h.pi1, h.pi2):
            diff = _minus_id([list(r) for r in datum.cochar_matrix_tz(w)])
            for q in qstar:
                img = mat_vec(diff, q)
                if any(Fraction(x).denominator != 1 for x in img):
                    raise RootSystemError(
                        "coweight defect left t(Z); pairing data inconsistent")
                t_tilde_cols.append(mat_vec(m_tw, [int(x) for x in img]))
    T_tilde = Sublattice(n, t_tilde_cols)
    pi1_tilde = quotient_group(Sublattice.full(n), T_tilde)

    return CellInvariants(T_beta, pi1_beta, Z_beta, S_tilde, T_tilde,
                          pi1_tilde, Z_tilde, winv, T_beta.rank == n)


# ---------------------------------------------------------------------------
# twisted sectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sector:
    rep: tuple                 # cocharacter representative, t(Z) coordinates
    trivial: bool
    fermionic_shift: object    # int for rank-1 data, else None (conditional)


@dataclass(frozen=True)
class SectorReport:
    m1: int
    m2: int
    sectors: tuple


def twists_required(datum: RootDatum, cell: CellIndex,
                    twist: RationalLattice) -> bool:
    """The under-specified regime: genus >= 2, rank >= 2, F nontrivial."""
    return (cell.genus >= 2 and datum.rank >= 2
            and not twist_is_trivial(datum, twist))


def _check_twist_regime(datum, cell, twist):
    if twists_required(datum, cell, twist) and \
            not all(h.twist_explicit for h in cell.handles):
        raise TwistsRequiredError(
            "genus >= 2 at rank >= 2 with a nontrivial twist subgroup needs "
            "explicitly chosen handle twists")


def _stabilizer_component_group(datum, cell, walk, twist):
    """Y_F: stabilizer cocharacters whose central defects land in Lambda_F."""
    n = datum.rank
    _, q_cols = _stay_data(datum, walk)
    systems = [dual_lattice(Sublattice(n, q_cols).basis, datum.pairing_tz)]
    m_pi_l = datum.cochar_matrix_tz(walk.pi[-1])
    p_f = CongruenceSubgroup.from_overlattice(twist)
    for h in cell.handles:
        for w in (h.pi1, h.pi2):
            diff = _minus_id([list(r) for r in datum.cochar_matrix_tz(w)])
            rows = mat_mul(mat_mul([[Fraction(x, p_f.den) for x in r]
                                    for r in p_f.rows], diff),
                           [list(r) for r in m_pi_l])
            systems.append(CongruenceSubgroup.from_fraction_rows(n, rows))
    return systems[0].intersect(*systems[1:])


def _twist_image_lattice(datum, cell, t_beta, twist):
    """T_beta plus the twist-conjugated F-defect columns."""
    n = datum.rank
    image_cols = [list(c) for c in t_beta.generators]
    for h in cell.handles:
        m_tw = datum.cochar_matrix_tz(h.twist)
        for w in (h.pi1, h.pi2):
            diff = _minus_id([list(r) for r in datum.cochar_matrix_tz(w)])
            for q in twist.basis_fractions():
                img = mat_vec(diff, q)
                if any(Fraction(x).denominator != 1 for x in img):
                    raise RootSystemError("twist defect left t(Z)")
                image_cols.append(mat_vec(m_tw, [int(x) for x in img]))
    return Sublattice(n, image_cols)


def sector_counts(datum: RootDatum, cell: CellIndex, walk: Walk,
                  twist: RationalLattice, section="lex", t_beta=None):
    """(m1, m2) of a cell walk, or None when the walk is not surjective.

    ``m1`` counts stabilizer components whose central part lies in F^(2g),
    ``m2`` the components of the F-quotient: the index of T_beta plus the
    F-defect lattice inside t(Z).
    """
    validate_twist(datum, twist)
    _check_twist_regime(datum, cell, twist)
    n = datum.rank
    if t_beta is None:
        from .walks import torus_map_matrix as _tmm
        t_beta = Sublattice(n, _tmm(datum, cell, walk, section=section))
    if t_beta.rank < n:
        return None
    y_f = _stabilizer_component_group(datum, cell, walk, twist)
    m1 = y_f.order_mod(datum.coweights_tz)
    m2 = quotient_group(Sublattice.full(n),
                        _twist_image_lattice(datum, cell, t_beta, twist)).order()
    return m1, m2


def twisted_sectors(datum: RootDatum, cell: CellIndex, walk: Walk,
                    twist: RationalLattice, section="lex",
                    cinv: CellInvariants = None) -> SectorReport:
    """Sector counts plus the sector list of a surjective cell walk."""
    validate_twist(datum, twist)
    _check_twist_regime(datum, cell, twist)
    if cinv is None:
        cinv = cell_invariants(datum, cell, walk, section=section)
    if not cinv.surjective:
        raise NonSurjectiveError(
            "stabilizer groups are infinite on a non-surjective walk")
    counts = sector_counts(datum, cell, walk, twist, section=section,
                           t_beta=cinv.T_beta)
    m1, m2 = counts
    y_f = _stabilizer_component_group(datum, cell, walk, twist)
    qstar = datum.coweights_tz
    k = len(cell.punctures) + 1
    shift_nontrivial = 2 * cell.genus + k - 2 if datum.rank == 1 else None
    sectors = []
    for rep in y_f.coset_representatives(qstar):
        trivial = qstar.contains(rep)
        sectors.append(Sector(
            rep, trivial, 0 if trivial else shift_nontrivial))
    sectors.sort(key=lambda s: (not s.trivial, s.rep))
    return SectorReport(m1, m2, tuple(sectors))


# ---------------------------------------------------------------------------
# genericity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenericityQuery:
    """Finite-order class representatives: cocharacter vectors plus Levi types.

    Vectors are in t(Z) coordinates; each must be fixed by its Levi's
    reflections (the nice-class condition on the recorded side).
    """

    classes: tuple  # of (vector tuple of Fractions, frozenset levi)

    def __init__(self, classes):
        cls = []
        for vec, levi in classes:
            cls.append((tuple(Fraction(x) for x in vec),
                        frozenset(int(i) for i in levi)))
        object.__setattr__(self, "classes", tuple(cls))

    def validate(self, datum: RootDatum):
        for vec, levi in self.classes:
            if len(vec) != datum.rank:
                raise ValueError("class vector has wrong dimension")
            for i in levi:
                m = datum.cochar_matrix_tz(datum.simple_reflections[i])
                if mat_vec(m, vec) != vec:
                    raise ValueError(
                        f"class vector {vec} is not fixed by its Levi")


@dataclass(frozen=True)
class GenericityVerdict:
    generic: object            # True | False | None (undecided)
    reason: str = ""
    witness: object = None

    @property
    def undecided(self):
        return self.generic is None


GENERICITY_BUDGET = 5_000_000


def _proper_spans(datum: RootDatum):
    """Deduplicated proper rational spans of coweight differences.

    Returns annihilator row systems: ``v`` lies in span + t(Z) iff the rows
    evaluate integrally on ``v``.
    """
    n = datum.rank
    coroots = [datum.to_tz_int(c) for c in datum.positive_coroots]
    pool = []
    seen_vec = set()
    candidates = [tuple(c) for c in coroots] + \
        [tuple(-x for x in c) for c in coroots] + [tuple([0] * n)]
    for a in candidates:
        for b in candidates:
            v = tuple(x - y for x, y in zip(a, b))
            if not any(v):
                continue
            key = v if v > tuple(-x for x in v) else tuple(-x for x in v)
            if key not in seen_vec:
                seen_vec.add(key)
                pool.append(key)
    spans = {}
    eye = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    spans[()] = eye  # the zero span: membership in t(Z) itself
    for size in range(1, n):
        for combo in combinations(pool, size):
            sub = Sublattice(n, combo).saturation()
            if sub.rank >= n or sub.rank < size:
                continue
            key = sub.basis
            if key in spans:
                continue
            ann = kernel_basis([list(b) for b in key])
            spans[key] = tuple(ann)
    return list(spans.values())


def is_generic(datum: RootDatum, query: GenericityQuery) -> GenericityVerdict:
    """Exhaustive genericity decision for rational class representatives.

    Sweeps all Weyl tuples, all proper coweight-difference spans, and the
    half-coroot torsion shifts coming from the finite lift subgroup of the
    Weyl group; a conjugated product is degenerate when a shifted combination
    lands in a span plus t(Z).
    """
    query.validate(datum)
    if datum.rank > 3:
        return GenericityVerdict(None, "rank budget exceeded (rank <= 3)")
    k = len(query.classes)
    table = datum.weyl_table()
    spans = _proper_spans(datum)
    n = datum.rank
    shifts = []
    for bits in iproduct((0, 1), repeat=n):
        vec = [Fraction(0)] * n
        for i, b in enumerate(bits):
            if b:
                vec = [x + Fraction(y, 2)
                       for x, y in zip(vec, datum.coroots_tz[i])]
        shifts.append(tuple(vec))
    cost = (len(table) ** k) * len(spans) * len(shifts)
    if cost > GENERICITY_BUDGET:
        return GenericityVerdict(None, f"sweep budget exceeded ({cost} checks)")
    mats = [datum.cochar_matrix_tz(w) for w in table.elements]
    vecs = [vec for vec, _ in query.classes]
    for combo in iproduct(range(len(table)), repeat=k):
        total = [Fraction(0)] * n
        for idx, vec in zip(combo, vecs):
            moved = mat_vec(mats[idx], vec)
            total = [x + y for x, y in zip(total, moved)]
        for shift in shifts:
            probe = [x + y for x, y in zip(total, shift)]
            for ann in spans:
                ok = True
                for row in ann:
                    val = sum(Fraction(r) * p for r, p in zip(row, probe))
                    if val.denominator != 1:
                        ok = False
                        break
                if ok:
                    witness = {
                        "weyl_tuple": [table.elements[i].render() for i in combo],
                        "torsion_shift": [str(x) for x in shift],
                        "span_annihilator": [list(r) for r in ann],
                    }
                    return GenericityVerdict(False, "degenerate product", witness)
    return GenericityVerdict(True)
