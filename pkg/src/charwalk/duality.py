"""Walk and cell duality through the root-coroot exchange.

The dual of a walk lives on the dual root datum, keeps the same letters and
the same step pattern, and exchanges the roles of the stay lattices: the
center of a walk matches the fundamental group of its dual and vice versa.
The checks here execute those identities and the sector-count invariance
used by the mirror comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

from .invariants import (
    CellInvariants,
    cell_invariants,
    twisted_sectors,
    validate_twist,
    walk_invariants,
)
from .lattices import CongruenceSubgroup, RationalLattice, mat_vec
from .roots import RootDatum, dual_element, langlands_dual
from .walks import CellIndex, Handle, InstructionWord, Puncture, Walk, validate_walk


class DualityError(ValueError):
    pass


@dataclass(frozen=True)
class DualPair:
    source_datum: RootDatum
    source_cell: CellIndex
    source_walk: Walk
    target_datum: RootDatum
    target_cell: CellIndex
    target_walk: Walk
    involutive: bool  # sc sources dualize back onto themselves


def dual_twist(datum: RootDatum, dual_datum: RootDatum,
               twist: RationalLattice) -> RationalLattice:
    """(Z(G)/F)^v as an overlattice on the dual side.

    The annihilator of Lambda_F under the root-coroot pairing, expressed in
    the dual datum's t(Z) coordinates (which are the source's root basis for
    an sc source).
    """
    validate_twist(datum, twist)
    pair = [list(r) for r in datum.pairing_tz]
    rows = [mat_vec(pair, b) for b in twist.basis_fractions()]
    ann = CongruenceSubgroup.from_fraction_rows(datum.rank, rows)
    out = ann.overlattice()
    validate_twist(dual_datum, out)
    return out


def dual_walk(datum: RootDatum, cell, walk: Walk,
              dual_isogeny="sc") -> DualPair:
    """Transport a cell and walk to the Langlands dual datum.

    Letters keep their indices, steps are unchanged, and every Weyl element
    crosses through the canonical isomorphism of Weyl groups.  For a simply
    connected source the construction is an involution.  ``cell`` may be
    None for walks on free words that do not come from a cell.
    """
    target = langlands_dual(datum, dual_isogeny)

    def dw(w):
        return dual_element(target, w)

    t_cell = None
    if cell is not None:
        t_cell = CellIndex(
            handles=[Handle(dw(h.pi1), dw(h.pi2), dw(h.twist), h.twist_explicit)
                     for h in cell.handles],
            punctures=[Puncture(p.levi, dw(p.rep)) for p in cell.punctures],
        )
    t_walk = Walk(
        InstructionWord(walk.word.letters),
        walk.steps,
        tuple(dw(w) for w in walk.p),
        tuple(dw(w) for w in walk.pi),
    )
    bad = validate_walk(target, t_walk)
    if bad is not None:
        raise DualityError(
            f"dual walk failed validation: {bad.kind} at step {bad.step}")
    involutive = datum.isogeny_label == "sc" and dual_isogeny == "sc"
    return DualPair(datum, cell, walk, target, t_cell, t_walk, involutive)


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    detail: dict

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class DualityReport:
    pair: DualPair
    checks: tuple
    passed: bool

    def to_json(self):
        return {
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def verify_duality(datum: RootDatum, cell, walk: Walk,
                   twist: RationalLattice = None, section="lex") -> DualityReport:
    """Execute the duality identities on one walk and its dual.

    Requires a simply connected source and a surjective walk; the cell-level
    identities compare the twisted stabilizer groups against the component
    groups of the dual, and the sector-count product must be invariant under
    exchanging (walk, F) with (dual walk, annihilator twist).  With
    ``cell=None`` only the walk-level identities run.
    """
    if datum.isogeny_label != "sc":
        raise DualityError("duality verification needs a simply connected source")
    pair = dual_walk(datum, cell, walk)
    target = pair.target_datum

    src_w = walk_invariants(datum, walk)
    tgt_w = walk_invariants(target, pair.target_walk)
    src_c = tgt_c = None
    if cell is not None:
        src_c = cell_invariants(datum, cell, walk, section=section)
        tgt_c = cell_invariants(target, pair.target_cell, pair.target_walk,
                                section=section)
    # surjectivity is a cell-level notion when handles are present
    surjective = src_c.surjective if src_c is not None else src_w.surjective
    if not surjective:
        raise DualityError("duality verification needs a surjective walk")

    checks = []

    def group_key(g):
        return (g.invariant_factors, g.free_rank)

    back = dual_walk(target, pair.target_cell, pair.target_walk)
    checks.append(LemmaCheck(
        "involution",
        back.target_walk.p == walk.p and back.target_walk.steps == walk.steps
        and back.target_cell == cell,
        {"steps": "".join(walk.steps)}))

    checks.append(LemmaCheck(
        "step-sets-preserved",
        pair.target_walk.stay_set == walk.stay_set
        and pair.target_walk.up_set == walk.up_set,
        {"stays": sorted(walk.stay_set)}))

    checks.append(LemmaCheck(
        "surjectivity-transfer",
        tgt_c.surjective if tgt_c is not None else tgt_w.surjective, {}))

    checks.append(LemmaCheck(
        "center-vs-pi1",
        group_key(tgt_w.Z_p) == group_key(src_w.pi1_p)
        and group_key(tgt_w.pi1_p) == group_key(src_w.Z_p),
        {
            "Z(p)": str(src_w.Z_p), "pi1(p)": str(src_w.pi1_p),
            "Z(p*)": str(tgt_w.Z_p), "pi1(p*)": str(tgt_w.pi1_p),
        }))

    if cell is not None:
        checks.append(LemmaCheck(
            "twisted-stabilizers-vs-components",
            group_key(tgt_c.pi1_beta) == group_key(src_c.Z_tilde)
            and group_key(src_c.pi1_beta) == group_key(tgt_c.Z_tilde),
            {
                "Z~(p)": str(src_c.Z_tilde), "pi1_beta(p*)": str(tgt_c.pi1_beta),
                "Z~(p*)": str(tgt_c.Z_tilde), "pi1_beta(p)": str(src_c.pi1_beta),
            }))
        checks.append(LemmaCheck(
            "center-beta-vs-tilde-pi1",
            group_key(tgt_c.pi1_tilde) == group_key(src_c.Z_beta)
            and group_key(src_c.pi1_tilde) == group_key(tgt_c.Z_beta),
            {
                "Z_beta(p)": str(src_c.Z_beta), "pi~1(p*)": str(tgt_c.pi1_tilde),
                "Z_beta(p*)": str(tgt_c.Z_beta), "pi~1(p)": str(src_c.pi1_tilde),
            }))

        if twist is not None:
            f_dual = dual_twist(datum, target, twist)
            src_s = twisted_sectors(datum, cell, walk, twist, section=section,
                                    cinv=src_c)
            tgt_s = twisted_sectors(target, pair.target_cell, pair.target_walk,
                                    f_dual, section=section, cinv=tgt_c)
            checks.append(LemmaCheck(
                "sector-product-invariance",
                src_s.m1 * src_s.m2 == tgt_s.m1 * tgt_s.m2
                and src_s.m1 == tgt_s.m2 and src_s.m2 == tgt_s.m1,
                {
                    "m1": src_s.m1, "m2": src_s.m2,
                    "m1*": tgt_s.m1, "m2*": tgt_s.m2,
                }))

    return DualityReport(pair, tuple(checks), all(c.passed for c in checks))
