"""Motives of generic parabolic character stacks as exact polynomials in q.

A stack instance is a root datum, a genus, the Levi types of its nice
punctures (one regular puncture is always implicit), and a twist subgroup of
the center.  Cells are indexed by Weyl tuples and coset representatives; each
surjective walk on a cell word contributes a polynomial determined by its
stay count and component group, and the twisted (stringy) sum replaces the
component count by the two sector counts of the twist.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product as iproduct

from .invariants import (
    TwistsRequiredError,
    center_twist,
    sector_counts,
    trivial_twist,
    twist_is_trivial,
    validate_twist,
)
from .lattices import RationalLattice, Sublattice, quotient_group
from .roots import CartanType, RootDatum, build_root_datum, coset_representatives, langlands_dual
from .walks import CellIndex, Handle, Puncture, cell_word, enumerate_walks, torus_map_matrix
from .duality import dual_twist, dual_walk


VALID_UNCONDITIONAL = "unconditional"
VALID_CONDITIONAL = "conditional"


class BookkeepingError(RuntimeError):
    """A cell violated the dimension bookkeeping identity."""

    def __init__(self, message, diagnostics):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


# ---------------------------------------------------------------------------
# Laurent polynomials in q
# ---------------------------------------------------------------------------

class MotiveClass:
    """Integer Laurent polynomial in one variable (default q)."""

    __slots__ = ("coeffs", "variable")

    def __init__(self, coeffs=None, variable="q"):
        clean = {}
        for e, c in (coeffs or {}).items():
            c = int(c)
            if c:
                clean[int(e)] = c
        self.coeffs = clean
        self.variable = variable

    @classmethod
    def zero(cls, variable="q"):
        return cls({}, variable)

    @classmethod
    def one(cls, variable="q"):
        return cls({0: 1}, variable)

    @classmethod
    def q(cls):
        return cls({1: 1})

    @classmethod
    def monomial(cls, exponent, coeff=1, variable="q"):
        return cls({exponent: coeff}, variable)

    def _check(self, other):
        if self.variable != other.variable:
            raise ValueError(
                f"variable mismatch: {self.variable} vs {other.variable}")

    def __add__(self, other):
        if isinstance(other, int):
            other = MotiveClass({0: other}, self.variable)
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return MotiveClass(out, self.variable)

    __radd__ = __add__

    def __neg__(self):
        return MotiveClass({e: -c for e, c in self.coeffs.items()}, self.variable)

    def __sub__(self, other):
        if isinstance(other, int):
            other = MotiveClass({0: other}, self.variable)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MotiveClass({e: c * other for e, c in self.coeffs.items()},
                               self.variable)
        self._check(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return MotiveClass(out, self.variable)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers of a polynomial")
        out = MotiveClass.one(self.variable)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, MotiveClass)
                and self.coeffs == other.coeffs
                and self.variable == other.variable)

    def __hash__(self):
        return hash((self.variable, tuple(sorted(self.coeffs.items()))))

    @property
    def is_zero(self):
        return not self.coeffs

    def degree(self):
        if not self.coeffs:
            return None
        return max(self.coeffs)

    def lowest(self):
        if not self.coeffs:
            return None
        return min(self.coeffs)

    def leading_coefficient(self):
        d = self.degree()
        return 0 if d is None else self.coeffs[d]

    def evaluate(self, x):
        return sum(c * Fraction(x) ** e for e, c in self.coeffs.items())

    def is_palindromic(self) -> bool:
        if not self.coeffs:
            return True
        lo, hi = self.lowest(), self.degree()
        return all(self.coeffs.get(e, 0) == self.coeffs.get(lo + hi - e, 0)
                   for e in range(lo, hi + 1))

    def to_json(self):
        return {"variable": self.variable,
                "coeffs": {str(e): c for e, c in sorted(self.coeffs.items())}}

    def __str__(self):
        if not self.coeffs:
            return "0"
        var = self.variable
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            if e == 0:
                term = str(abs(c))
            else:
                base = var if e == 1 else f"{var}^{e}"
                term = base if abs(c) == 1 else f"{abs(c)}*{base}"
            parts.append(("- " if c < 0 else "+ ") + term)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"MotiveClass({self})"


def e_specialize(m: MotiveClass) -> MotiveClass:
    """Substitute q -> uv: the E-polynomial shadow in the product variable."""
    return MotiveClass(dict(m.coeffs), variable="uv")


# ---------------------------------------------------------------------------
# stack specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StackSpec:
    """One character-stack instance.

    ``punctures`` lists the Levi subsets of the nice punctures; a regular
    puncture is always present on top of them.  ``twist`` is the cocharacter
    overlattice of the twist subgroup F <= Z(G) (None means trivial).
    Genericity of the actual classes is assumed, not computed: the motive
    depends on the Levi types only.
    """

    datum: RootDatum
    genus: int
    punctures: tuple = ()
    twist: RationalLattice = None
    assume_generic: bool = True

    def __init__(self, datum, genus, punctures=(), twist=None,
                 assume_generic=True):
        object.__setattr__(self, "datum", datum)
        object.__setattr__(self, "genus", int(genus))
        object.__setattr__(self, "punctures",
                           tuple(frozenset(int(i) for i in p) for p in punctures))
        if twist is None:
            twist = trivial_twist(datum)
        validate_twist(datum, twist)
        object.__setattr__(self, "twist", twist)
        object.__setattr__(self, "assume_generic", bool(assume_generic))
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")
        for p in self.punctures:
            if not p <= set(range(datum.rank)):
                raise ValueError(f"Levi subset {sorted(p)} out of range")

    @property
    def k(self) -> int:
        return len(self.punctures) + 1

    def describe(self) -> dict:
        return {
            "type": str(self.datum.cartan_type),
            "isogeny": self.datum.isogeny_label,
            "genus": self.genus,
            "punctures": [sorted(p) for p in self.punctures],
            "k": self.k,
            "twist": self.twist.to_json(),
        }


def group_dimension(datum: RootDatum) -> int:
    return 2 * len(datum.positive_roots) + datum.rank


def levi_positive_count(datum: RootDatum, levi) -> int:
    levi = set(levi)
    count = 0
    for root in datum.positive_roots:
        if all(root[i] == 0 for i in range(datum.rank) if i not in levi):
            count += 1
    return count


def centralizer_dimension(datum: RootDatum, levi) -> int:
    """Dimension of the Levi centralizer of a nice class of this type."""
    return datum.rank + 2 * levi_positive_count(datum, levi)


def stack_dimension(spec: StackSpec) -> int:
    """Dimension of the character stack (semisimple group, so dim Z(G) = 0)."""
    datum = spec.datum
    dim_g = group_dimension(datum)
    d = (2 * spec.genus - 2) * dim_g
    for levi in spec.punctures:
        d += dim_g - centralizer_dimension(datum, levi)
    d += dim_g - datum.rank  # the regular puncture
    return d


@dataclass(frozen=True)
class CellGeometry:
    d: int
    r: int
    i_p: int
    R_beta: int


def cell_geometry(spec: StackSpec, cell: CellIndex, walk) -> CellGeometry:
    """Dimension bookkeeping of one cell; raises on identity violations."""
    datum = spec.datum
    n = datum.rank
    d = stack_dimension(spec)
    r = len(datum.positive_roots)
    i_p = (2 * spec.genus - 2) * n + len(walk.stay_set)
    dim_g = group_dimension(datum)
    r_beta = 0
    for h in cell.handles:
        r_beta += dim_g - n - h.pi1.length - h.pi2.length
    for p in cell.punctures:
        r_beta += (dim_g - centralizer_dimension(datum, p.levi)) // 2 \
            - p.rep.length
    geom = CellGeometry(d, r, i_p, r_beta)
    diagnostics = {
        "d": d, "r": r, "i_p": i_p, "R_beta": r_beta,
        "stays": len(walk.stay_set), "ups": len(walk.up_set),
        "steps": "".join(walk.steps),
        "cell": describe_cell(cell),
    }
    if (d - i_p) % 2 != 0:
        raise BookkeepingError("d - i_p is odd", diagnostics)
    if len(walk.up_set) + r_beta != (d - i_p) // 2 + r:
        raise BookkeepingError(
            "|U_p| + R_beta != (d - i_p)/2 + r", diagnostics)
    return geom


def describe_cell(cell: CellIndex) -> dict:
    return {
        "handles": [[h.pi1.render(), h.pi2.render(), h.twist.render()]
                    for h in cell.handles],
        "punctures": [[sorted(p.levi), p.rep.render()] for p in cell.punctures],
    }


# ---------------------------------------------------------------------------
# per-cell contributions
# ---------------------------------------------------------------------------

def _q_minus_one_power(i):
    # (q-1)^i expanded exactly
    out = MotiveClass.one()
    for _ in range(i):
        out = out * MotiveClass({1: 1, 0: -1})
    return out


def _component_count(datum: RootDatum, cell: CellIndex, walk, section):
    """(surjective, |pi1_beta|) computed from the torus-map columns."""
    n = datum.rank
    cols = torus_map_matrix(datum, cell, walk, section=section)
    t_beta = Sublattice(n, cols)
    if t_beta.rank < n:
        return False, 0
    return True, quotient_group(Sublattice.full(n), t_beta).order()


def cell_class(spec: StackSpec, cell: CellIndex, walk,
               section="lex") -> MotiveClass:
    """Naive class of one cell: |pi1_beta| (q-1)^{i_p} q^{(d-i_p)/2}, or 0."""
    geom = cell_geometry(spec, cell, walk)
    surjective, comp = _component_count(spec.datum, cell, walk, section)
    if not surjective:
        return MotiveClass.zero()
    return comp * _q_minus_one_power(geom.i_p) * \
        MotiveClass.monomial((geom.d - geom.i_p) // 2)


def _stringy_cell_class(spec: StackSpec, cell: CellIndex, walk, section):
    """(polynomial, had_nontrivial_sector) for the twisted sum."""
    geom = cell_geometry(spec, cell, walk)
    counts = sector_counts(spec.datum, cell, walk, spec.twist, section=section)
    if counts is None:
        return MotiveClass.zero(), False
    m1, m2 = counts
    poly = (m1 * m2) * _q_minus_one_power(geom.i_p) * \
        MotiveClass.monomial((geom.d - geom.i_p) // 2)
    return poly, m1 > 1


# ---------------------------------------------------------------------------
# cell enumeration
# ---------------------------------------------------------------------------

def enumerate_cell_indices(spec: StackSpec):
    """Deterministic descriptors (handle idxs, puncture idxs) of all cells."""
    datum = spec.datum
    table = datum.weyl_table()
    size = len(table)
    handle_space = list(iproduct(range(size), repeat=2 * spec.genus))
    rep_lists = []
    for levi in spec.punctures:
        reps = coset_representatives(datum, levi)
        rep_lists.append([table.idx(w) for w in reps])
    puncture_space = list(iproduct(*rep_lists)) if rep_lists else [()]
    return handle_space, puncture_space


def build_cell(spec: StackSpec, handle_idxs, puncture_idxs) -> CellIndex:
    table = spec.datum.weyl_table()
    handles = []
    for a, b in zip(handle_idxs[::2], handle_idxs[1::2]):
        handles.append(Handle(table.elements[a], table.elements[b]))
    punctures = []
    for levi, idx in zip(spec.punctures, puncture_idxs):
        punctures.append(Puncture(levi, table.elements[idx]))
    return CellIndex(handles=handles, punctures=punctures)


def iter_cells(spec: StackSpec):
    handle_space, puncture_space = enumerate_cell_indices(spec)
    for h in handle_space:
        for p in puncture_space:
            yield build_cell(spec, h, p)


class _WalkCache:
    """Walks from e to e per instruction word, shared across cells."""

    def __init__(self, datum):
        self.datum = datum
        self.store = {}

    def walks(self, word):
        key = word.letters
        if key not in self.store:
            self.store[key] = enumerate_walks(
                self.datum, word, end=self.datum.identity_element)
        return self.store[key]


# ---------------------------------------------------------------------------
# motive assembly
# ---------------------------------------------------------------------------

def naive_motive(spec: StackSpec, section="lex", workers=1) -> MotiveClass:
    """Class of the stack: sum of cell classes over all cells and walks."""
    if workers > 1:
        return _parallel_sum(spec, section, workers, stringy=False)[0]
    cache = _WalkCache(spec.datum)
    total = MotiveClass.zero()
    for cell in iter_cells(spec):
        cw = cell_word(spec.datum, cell, section=section)
        for walk in cache.walks(cw.unipotent_word):
            total = total + cell_class(spec, cell, walk, section=section)
    return total


@dataclass(frozen=True)
class StringyResult:
    motive: MotiveClass
    validity: str
    reason: str = ""

    def to_json(self):
        return {"motive": self.motive.to_json(), "validity": self.validity,
                "reason": self.reason}


def stringy_motive(spec: StackSpec, section="lex", workers=1) -> StringyResult:
    """Twisted-sector sum with a validity tag.

    Rank-1 outputs are unconditional (their sector classes are pinned by the
    rank-1 fixed-locus computation); so is any run whose sectors were all
    trivial, since it literally equals the naive sum.  Everything else relies
    on the untested assumption that a twisted sector's class matches the
    untwisted one after the fermionic shift, and is tagged conditional.
    """
    datum = spec.datum
    if spec.genus >= 2 and datum.rank >= 2 and \
            not twist_is_trivial(datum, spec.twist):
        raise TwistsRequiredError(
            "genus >= 2 at rank >= 2 with a nontrivial twist needs explicit "
            "handle twists; supply cells and sectors directly")
    if workers > 1:
        total, saw_nontrivial = _parallel_sum(spec, section, workers, stringy=True)
    else:
        cache = _WalkCache(datum)
        total = MotiveClass.zero()
        saw_nontrivial = False
        for cell in iter_cells(spec):
            cw = cell_word(datum, cell, section=section)
            for walk in cache.walks(cw.unipotent_word):
                poly, nontriv = _stringy_cell_class(spec, cell, walk, section)
                total = total + poly
                saw_nontrivial = saw_nontrivial or nontriv
    if datum.rank == 1 or not saw_nontrivial:
        return StringyResult(total, VALID_UNCONDITIONAL)
    return StringyResult(
        total, VALID_CONDITIONAL,
        "nontrivial sector classes beyond rank 1 are assumed to match their "
        "untwisted cells up to the fermionic shift")


# ---------------------------------------------------------------------------
# parallel summation
# ---------------------------------------------------------------------------

_WORKER_STATE = {}


@lru_cache(maxsize=8)
def _rebuild_datum(doc_str):
    return RootDatum.from_json(json.loads(doc_str))


def _rebuild_spec(desc):
    datum = _rebuild_datum(desc["datum"])
    twist = RationalLattice(datum.rank, desc["twist"]["den"],
                            desc["twist"]["basis"])
    return StackSpec(datum, desc["genus"],
                     [frozenset(p) for p in desc["punctures"]], twist)


def _spec_descriptor(spec):
    return {
        "datum": spec.datum.to_json_str(),
        "genus": spec.genus,
        "punctures": [sorted(p) for p in spec.punctures],
        "twist": spec.twist.to_json(),
    }


def _worker_chunk(args):
    desc, section, stringy, chunk = args
    key = (json.dumps(desc, sort_keys=True), section)
    state = _WORKER_STATE.get(key)
    if state is None:
        spec = _rebuild_spec(desc)
        state = (spec, _WalkCache(spec.datum))
        _WORKER_STATE[key] = state
    spec, cache = state
    total = MotiveClass.zero()
    saw = False
    for handle_idxs, puncture_idxs in chunk:
        cell = build_cell(spec, handle_idxs, puncture_idxs)
        cw = cell_word(spec.datum, cell, section=section)
        for walk in cache.walks(cw.unipotent_word):
            if stringy:
                poly, nontriv = _stringy_cell_class(spec, cell, walk, section)
                saw = saw or nontriv
            else:
                poly = cell_class(spec, cell, walk, section=section)
            total = total + poly
    return dict(total.coeffs), saw


def _parallel_sum(spec, section, workers, stringy):
    handle_space, puncture_space = enumerate_cell_indices(spec)
    cells = [(h, p) for h in handle_space for p in puncture_space]
    chunk_size = max(1, len(cells) // (workers * 4) or 1)
    chunks = [cells[i:i + chunk_size] for i in range(0, len(cells), chunk_size)]
    desc = _spec_descriptor(spec)
    total = MotiveClass.zero()
    saw = False
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for coeffs, nontriv in pool.map(
                _worker_chunk,
                [(desc, section, stringy, c) for c in chunks]):
            total = total + MotiveClass(coeffs)
            saw = saw or nontriv
    return total, saw


# ---------------------------------------------------------------------------
# mirror comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellPairingRow:
    cell: dict
    steps: str
    m1: int
    m2: int
    m1_dual: int
    m2_dual: int

    @property
    def swap_ok(self):
        return self.m1 == self.m2_dual and self.m2 == self.m1_dual

    def to_json(self):
        return {"cell": self.cell, "steps": self.steps,
                "m1": self.m1, "m2": self.m2,
                "m1_dual": self.m1_dual, "m2_dual": self.m2_dual,
                "swap_ok": self.swap_ok}


@dataclass(frozen=True)
class MirrorReport:
    lhs_spec: dict
    rhs_spec: dict
    lhs: StringyResult
    rhs: StringyResult
    difference: MotiveClass
    equal: bool
    first_difference: object
    pairing_rows: tuple
    pairing_failures: int

    def to_json(self):
        return {
            "lhs_spec": self.lhs_spec,
            "rhs_spec": self.rhs_spec,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "difference": self.difference.to_json(),
            "equal": self.equal,
            "first_difference": self.first_difference,
            "lhs_palindromic": MotiveClass(self.lhs.motive.coeffs).is_palindromic(),
            "rhs_palindromic": MotiveClass(self.rhs.motive.coeffs).is_palindromic(),
            "pairing_failures": self.pairing_failures,
            "pairing_rows": [r.to_json() for r in self.pairing_rows],
        }


def mirror_check(ctype, twist="full", genus=1, punctures=(),
                 section="lex", workers=1, max_rows=200) -> MirrorReport:
    """Compare the twisted stringy motive with its Langlands-dual partner.

    The left side is the simply connected stack of ``ctype`` twisted by F,
    the right side the simply connected dual type twisted by the annihilator
    of F; puncture Levi subsets transport along the node-identity bijection
    of simple roots.
    """
    if isinstance(ctype, str):
        ctype = CartanType.parse(ctype)
    datum = build_root_datum(ctype, "sc")
    if isinstance(twist, str):
        twist = center_twist(datum) if twist == "full" else trivial_twist(datum)
    lhs_spec = StackSpec(datum, genus, punctures, twist)
    dual_datum = langlands_dual(datum, "sc")
    rhs_twist = dual_twist(datum, dual_datum, twist)
    rhs_spec = StackSpec(dual_datum, genus, punctures, rhs_twist)

    lhs = stringy_motive(lhs_spec, section=section, workers=workers)
    rhs = stringy_motive(rhs_spec, section=section, workers=workers)

    # per-cell sector pairing along the transported cells
    rows = []
    failures = 0
    cache = _WalkCache(datum)
    for cell in iter_cells(lhs_spec):
        cw = cell_word(datum, cell, section=section)
        for walk in cache.walks(cw.unipotent_word):
            counts = sector_counts(datum, cell, walk, twist, section=section)
            if counts is None:
                continue
            pair = dual_walk(datum, cell, walk)
            dual_counts = sector_counts(
                dual_datum, pair.target_cell, pair.target_walk, rhs_twist,
                section=section)
            row = CellPairingRow(
                describe_cell(cell), "".join(walk.steps),
                counts[0], counts[1],
                -1 if dual_counts is None else dual_counts[0],
                -1 if dual_counts is None else dual_counts[1])
            if not row.swap_ok:
                failures += 1
            if len(rows) < max_rows or not row.swap_ok:
                rows.append(row)

    difference = lhs.motive - rhs.motive
    equal = difference.is_zero
    first_diff = None
    if not equal:
        exps = sorted(difference.coeffs)
        e = exps[0]
        first_diff = {"exponent": e,
                      "lhs": lhs.motive.coeffs.get(e, 0),
                      "rhs": rhs.motive.coeffs.get(e, 0)}
    return MirrorReport(
        lhs_spec.describe(), rhs_spec.describe(), lhs, rhs,
        difference, equal, first_diff, tuple(rows), failures)


# ---------------------------------------------------------------------------
# convention-invariance helpers (used by the order-invariance checks)
# ---------------------------------------------------------------------------

def motive_under_permutations(spec: StackSpec, section="lex"):
    """Naive motives under every handle/puncture permutation; all must agree."""
    out = []
    for h_perm in permutations(range(spec.genus)):
        for p_perm in permutations(range(len(spec.punctures))):
            permuted = StackSpec(
                spec.datum, spec.genus,
                [spec.punctures[i] for i in p_perm], spec.twist)
            # handle permutation reorders the cell enumeration only, but we
            # recompute to exercise the full path
            out.append(naive_motive(permuted, section=section))
    return out
