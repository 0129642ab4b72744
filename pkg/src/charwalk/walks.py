"""Walks on Bruhat graphs and the words attached to character-stack cells.

A word of simple roots is consumed first letter first; the running product
``pi_k = s_{a_k} ... s_{a_1} * start`` is tracked next to the walk track
``p_k``.  At each letter the walk is forced up when the edge above is
available, and otherwise chooses between going down and staying.  Step
positions are 1-based to line up with the k = 1..l tables this follows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .roots import (
    ReducedWord,
    RootDatum,
    RootSystemError,
    WeylElement,
    is_minimal_coset_rep,
    reduced_word,
)

UP, DOWN, STAY = "U", "D", "S"


class WalkError(ValueError):
    pass


@dataclass(frozen=True)
class InstructionWord:
    """Sequence of simple-root indices driving a walk (consumption order)."""

    letters: tuple

    def __init__(self, letters):
        object.__setattr__(self, "letters", tuple(int(x) for x in letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def validate(self, datum: RootDatum):
        for i in self.letters:
            if not 0 <= i < datum.rank:
                raise WalkError(f"letter {i} out of range for rank {datum.rank}")

    def to_json(self, datum: RootDatum = None):
        return [f"a{i+1}" for i in self.letters]


@dataclass(frozen=True)
class Walk:
    """A walk: step tags plus the p and pi tracks (length l+1 each)."""

    word: InstructionWord
    steps: tuple
    p: tuple
    pi: tuple

    @property
    def start(self) -> WeylElement:
        return self.p[0]

    @property
    def end(self) -> WeylElement:
        return self.p[-1]

    def __len__(self):
        return len(self.steps)

    @cached_property
    def up_set(self) -> frozenset:
        return frozenset(k + 1 for k, s in enumerate(self.steps) if s == UP)

    @cached_property
    def down_set(self) -> frozenset:
        return frozenset(k + 1 for k, s in enumerate(self.steps) if s == DOWN)

    @cached_property
    def stay_set(self) -> frozenset:
        return frozenset(k + 1 for k, s in enumerate(self.steps) if s == STAY)

    def letter(self, k: int) -> int:
        """Simple-root index consumed at step k (1-based)."""
        return self.word.letters[k - 1]

    def to_json(self) -> dict:
        return {
            "word": self.word.to_json(),
            "steps": list(self.steps),
            "p": [w.render() for w in self.p],
            "pi": [w.render() for w in self.pi],
        }

    def __repr__(self):
        return f"<walk {''.join(self.steps)} from {self.start.render()}>"


@dataclass(frozen=True)
class WalkViolation:
    kind: str  # forced-up-ignored | p-track-mismatch | pi-track-mismatch | end-mismatch
    step: int
    message: str


def enumerate_walks(datum: RootDatum, word, start: WeylElement = None,
                    end: WeylElement = None) -> list:
    """All walks driven by ``word`` from ``start`` (optionally ending at ``end``).

    Deterministic order: depth-first with the stay branch explored before the
    down branch at every free choice.
    """
    word = word if isinstance(word, InstructionWord) else InstructionWord(word)
    word.validate(datum)
    table = datum.weyl_table()
    if start is None:
        start = datum.identity_element
    start_idx = table.idx(start)
    end_idx = None if end is None else table.idx(end)
    letters = word.letters
    l = len(letters)
    out = []
    # iterative DFS carrying (position, p-index track, steps)
    stack = [(0, [start_idx], [])]
    while stack:
        k, track, steps = stack.pop()
        if k == l:
            if end_idx is None or track[-1] == end_idx:
                out.append((track, steps))
            continue
        i = letters[k]
        cur = track[-1]
        upper = table.leftmul[i][cur]
        if table.goes_up[i][cur]:
            stack.append((k + 1, track + [upper], steps + [UP]))
        else:
            # pushed down-first so the stay branch pops first
            stack.append((k + 1, track + [upper], steps + [DOWN]))
            stack.append((k + 1, track + [cur], steps + [STAY]))
    walks = []
    for track, steps in out:
        pi = [start_idx]
        for i in letters:
            pi.append(table.leftmul[i][pi[-1]])
        walks.append(Walk(
            word,
            tuple(steps),
            tuple(table.elements[j] for j in track),
            tuple(table.elements[j] for j in pi),
        ))
    return walks


def validate_walk(datum: RootDatum, walk: Walk, end: WeylElement = None):
    """None when the walk satisfies every invariant, else the first violation."""
    from .roots import goes_up

    word = walk.word
    l = len(word)
    if not (len(walk.steps) == l and len(walk.p) == l + 1 == len(walk.pi)):
        return WalkViolation("p-track-mismatch", 0, "track lengths do not match word")
    if walk.pi[0] != walk.p[0]:
        return WalkViolation("pi-track-mismatch", 0, "pi track must start at the start")
    for k in range(1, l + 1):
        i = word.letters[k - 1]
        s = datum.simple_reflections[i]
        prev, cur = walk.p[k - 1], walk.p[k]
        step = walk.steps[k - 1]
        if walk.pi[k] != s * walk.pi[k - 1]:
            return WalkViolation(
                "pi-track-mismatch", k,
                f"pi_{k} != s_{i+1} pi_{k-1}")
        forced = goes_up(prev, i)
        if forced and step != UP:
            return WalkViolation(
                "forced-up-ignored", k,
                f"edge above p_{k-1} for a{i+1} must be followed")
        if step in (UP, DOWN):
            expect = s * prev
            if cur != expect:
                return WalkViolation(
                    "p-track-mismatch", k,
                    f"p_{k} != s_{i+1} p_{k-1} on an {step} step")
            if step == UP and not forced:
                return WalkViolation(
                    "p-track-mismatch", k,
                    f"step {k} marked up but the edge goes down")
            if step == DOWN and forced:
                return WalkViolation(
                    "p-track-mismatch", k,
                    f"step {k} marked down but the edge goes up")
        elif step == STAY:
            if cur != prev:
                return WalkViolation(
                    "p-track-mismatch", k, f"p_{k} changed on a stay step")
        else:
            return WalkViolation("p-track-mismatch", k, f"unknown step tag {step!r}")
    if end is not None and walk.end != end:
        return WalkViolation(
            "end-mismatch", l, f"walk ends at {walk.end.render()}")
    return None


# ---------------------------------------------------------------------------
# cell indices and cell words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Handle:
    """One handle letter: a pair of Weyl elements plus an optional twist.

    The twist defaults to the identity; ``twist_explicit`` records whether a
    caller pinned it on purpose, which the twisted-sector code uses to decide
    whether the under-specified high-genus regime was acknowledged.
    """

    pi1: WeylElement
    pi2: WeylElement
    twist: WeylElement = None
    twist_explicit: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.twist is None:
            object.__setattr__(self, "twist", self.pi1.datum.identity_element)

    def letters(self):
        return (self.pi1, self.pi2)


@dataclass(frozen=True)
class Puncture:
    """A nice puncture: Levi subset and its minimal coset representative."""

    levi: frozenset
    rep: WeylElement

    def __init__(self, levi, rep):
        object.__setattr__(self, "levi", frozenset(int(i) for i in levi))
        object.__setattr__(self, "rep", rep)


@dataclass(frozen=True)
class CellIndex:
    """Index of one character-stack cell: handle letters and puncture reps.

    The regular base puncture is implicit; ``punctures`` lists only the nice
    ones.
    """

    handles: tuple
    punctures: tuple = ()

    def __init__(self, handles=(), punctures=()):
        hs = []
        for h in handles:
            if isinstance(h, Handle):
                hs.append(h)
            else:
                hs.append(Handle(*h))
        ps = []
        for p in punctures:
            ps.append(p if isinstance(p, Puncture) else Puncture(*p))
        object.__setattr__(self, "handles", tuple(hs))
        object.__setattr__(self, "punctures", tuple(ps))

    @property
    def genus(self) -> int:
        return len(self.handles)

    def validate(self, datum: RootDatum):
        for h in self.handles:
            for w in (h.pi1, h.pi2, h.twist):
                if w.datum.cartan_matrix != datum.cartan_matrix:
                    raise WalkError("handle letters belong to a different datum")
        for p in self.punctures:
            if not p.levi <= set(range(datum.rank)):
                raise WalkError(f"Levi subset {set(p.levi)} out of range")
            if not is_minimal_coset_rep(datum, p.rep, p.levi):
                raise WalkError(
                    f"puncture representative {p.rep.render()} is not minimal "
                    f"in its coset modulo the Levi {sorted(p.levi)}")


@dataclass(frozen=True)
class CellWord:
    """Commutator letters plus the unipotent instruction word of a cell."""

    commutator_letters: tuple  # (pi1, pi2, twist) triples in handle order
    unipotent_word: InstructionWord
    blocks: tuple = field(default=(), compare=False)  # (tag, letters) provenance


def cell_word(datum: RootDatum, cell: CellIndex, section="lex") -> CellWord:
    """Unipotent word of a cell: handle blocks then puncture blocks.

    Per handle the block is word(pi1) word(pi2) word(pi1)^t word(pi2)^t, per
    nice puncture word(pi) word(pi)^t, with ^t reversing letters; blocks are
    concatenated in convolution order, handles before punctures.
    """
    cell.validate(datum)
    letters = []
    blocks = []
    for h in cell.handles:
        w1 = reduced_word(datum, h.pi1, section=section)
        w2 = reduced_word(datum, h.pi2, section=section)
        block = (w1.letters + w2.letters
                 + tuple(reversed(w1.letters)) + tuple(reversed(w2.letters)))
        letters.extend(block)
        blocks.append(("handle", block))
    for p in cell.punctures:
        w = reduced_word(datum, p.rep, section=section)
        block = w.letters + tuple(reversed(w.letters))
        letters.extend(block)
        blocks.append(("puncture", block))
    return CellWord(
        tuple((h.pi1, h.pi2, h.twist) for h in cell.handles),
        InstructionWord(letters),
        tuple(blocks),
    )


def torus_map_matrix(datum: RootDatum, cell: CellIndex, walk: Walk,
                     section="lex") -> tuple:
    """Columns of the differential of the cell's torus map, in t(Z) coordinates.

    One column ``pi_k^-1 h_{a_k}`` per stay step, then per handle the columns
    of ``(id - pi1) t(Z)`` and ``(id - pi2) t(Z)`` transported by ``p_l^-1``.
    The stay columns span T(p); all columns together span T_beta(p).
    """
    cw = cell_word(datum, cell, section=section)
    if walk.word != cw.unipotent_word:
        raise WalkError("walk does not belong to this cell's word")
    bad = validate_walk(datum, walk)
    if bad is not None:
        raise WalkError(f"invalid walk: {bad.kind} at step {bad.step}")
    n = datum.rank
    cols = []
    for k in sorted(walk.stay_set):
        i = walk.letter(k)
        coroot = [int(i == j) for j in range(n)]
        moved = walk.pi[k].inverse.act_coroot(coroot)
        cols.append(datum.to_tz_int(moved))
    p_l_inv = walk.end.inverse
    transport = datum.cochar_matrix_tz(p_l_inv)
    for h in cell.handles:
        for w in (h.pi1, h.pi2):
            m = datum.cochar_matrix_tz(w)
            for j in range(n):
                col = tuple(int(j == r) - m[r][j] for r in range(n))
                moved = tuple(sum(transport[r][c] * col[c] for c in range(n))
                              for r in range(n))
                cols.append(moved)
    return tuple(tuple(c) for c in cols)
