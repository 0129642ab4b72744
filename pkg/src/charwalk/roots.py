"""Root data, Weyl groups, reduced words, coset representatives, duals.

Conventions, fixed once:

* The Cartan matrix entry ``a[i][j]`` is the pairing ``<alpha_i, h_j>`` of the
  i-th simple root against the j-th simple coroot, so reflections act by
  ``s_j(alpha_i) = alpha_i - a[i][j] alpha_j`` on roots and
  ``s_j(h_i) = h_i - a[j][i] h_j`` on coweights.
* Root-side vectors are written in the simple-root basis, coweight-side
  vectors in the simple-coroot basis.
* For series C the first node is the long simple root (for C2 it is the
  ``2 E_22^*`` root of Sp4 in diagonal coordinates); series B is its
  transpose, so the Langlands dual map is a node-by-node transpose.
* Reduced words are stored in consumption order: ``(i_1, ..., i_k)`` means
  the product ``s_{i_k} ... s_{i_1}``, the letter ``i_1`` acting first by
  left multiplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial

from .lattices import (
    RationalLattice,
    Sublattice,
    mat_freeze,
    mat_inverse_frac,
    mat_inverse_int,
    mat_mul,
    mat_transpose,
    mat_vec,
    quotient_group,
)

SCHEMA_VERSION = "1"

SERIES = ("A", "B", "C", "D", "E", "F", "G")

_RANK_BOUNDS = {
    "A": (1, None),
    "B": (2, None),
    "C": (2, None),
    "D": (3, None),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}

_POSITIVE_ROOT_COUNT = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "G": lambda n: 6,
    "F": lambda n: 24,
    "E": lambda n: {6: 36, 7: 63, 8: 120}[n],
}


class RootSystemError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CartanType:
    series: str
    rank: int

    def __post_init__(self):
        if self.series not in SERIES:
            raise RootSystemError(f"unknown series {self.series!r}")
        lo, hi = _RANK_BOUNDS[self.series]
        if self.rank < lo or (hi is not None and self.rank > hi):
            raise RootSystemError(
                f"rank {self.rank} out of bounds for series {self.series}")

    @classmethod
    def parse(cls, text: str) -> "CartanType":
        text = text.strip()
        if len(text) < 2 or text[0].upper() not in SERIES:
            raise RootSystemError(f"cannot parse Cartan type {text!r}")
        try:
            rank = int(text[1:])
        except ValueError as exc:
            raise RootSystemError(f"cannot parse Cartan type {text!r}") from exc
        return cls(text[0].upper(), rank)

    def weyl_order(self) -> int:
        n = self.rank
        if self.series == "A":
            return factorial(n + 1)
        if self.series in ("B", "C"):
            return 2 ** n * factorial(n)
        if self.series == "D":
            return 2 ** (n - 1) * factorial(n)
        if self.series == "G":
            return 12
        if self.series == "F":
            return 1152
        return {6: 51840, 7: 2903040, 8: 696729600}[n]

    def positive_root_count(self) -> int:
        return _POSITIVE_ROOT_COUNT[self.series](self.rank)

    def dual_series(self) -> str:
        return {"B": "C", "C": "B"}.get(self.series, self.series)

    def __str__(self):
        return f"{self.series}{self.rank}"


def cartan_matrix(ctype: CartanType) -> tuple:
    """Integer Cartan matrix for the fixed node orders of this package."""
    n = ctype.rank
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j] = aij
        a[j][i] = aji

    s = ctype.series
    if s == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif s in ("B", "C"):
        for i in range(1, n - 1):
            link(i, i + 1)
        if s == "C":
            link(0, 1, -2, -1)  # node 1 is the long simple root
        else:
            link(0, 1, -1, -2)  # node 1 is the short simple root
    elif s == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif s == "G":
        link(0, 1, -1, -3)  # node 1 short, node 2 long
    elif s == "F":
        link(0, 1)
        link(1, 2, -2, -1)  # nodes 1,2 long; nodes 3,4 short
        link(2, 3)
    elif s == "E":
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)]
        edges += [(i, i + 1) for i in range(4, n - 1)]
        for i, j in edges:
            link(i, j)
    return mat_freeze(a)


@dataclass(frozen=True)
class ReducedWord:
    """Simple-root indices in consumption order (first letter acts first)."""

    letters: tuple

    def __init__(self, letters):
        object.__setattr__(self, "letters", tuple(int(x) for x in letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def reversed(self) -> "ReducedWord":
        return ReducedWord(tuple(reversed(self.letters)))

    def __add__(self, other):
        return ReducedWord(self.letters + tuple(other))


@dataclass(frozen=True)
class WeylElement:
    """Weyl group element stored by its action matrices.

    ``mat_root`` acts on the root lattice in the simple-root basis,
    ``mat_coroot`` on the coweight side in the simple-coroot basis.
    Equality and hashing only use the Cartan matrix and root action.
    """

    datum: "RootDatum" = field(repr=False)
    mat_root: tuple = ()
    mat_coroot: tuple = ()

    def __eq__(self, other):
        return (isinstance(other, WeylElement)
                and self.datum.cartan_matrix == other.datum.cartan_matrix
                and self.mat_root == other.mat_root)

    def __hash__(self):
        return hash((self.datum.cartan_matrix, self.mat_root))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        if self.datum.cartan_matrix != other.datum.cartan_matrix:
            raise RootSystemError("cannot multiply elements of different groups")
        return WeylElement(
            self.datum,
            mat_freeze(mat_mul(self.mat_root, other.mat_root)),
            mat_freeze(mat_mul(self.mat_coroot, other.mat_coroot)),
        )

    @cached_property
    def inverse(self) -> "WeylElement":
        return WeylElement(
            self.datum,
            mat_freeze(mat_inverse_int(self.mat_root)),
            mat_freeze(mat_inverse_int(self.mat_coroot)),
        )

    @cached_property
    def length(self) -> int:
        flipped = 0
        for r in self.datum.positive_roots:
            img = mat_vec(self.mat_root, r)
            if all(x <= 0 for x in img):
                flipped += 1
        return flipped

    @property
    def is_identity(self) -> bool:
        n = len(self.mat_root)
        return all(self.mat_root[i][j] == (i == j)
                   for i in range(n) for j in range(n))

    def act_root(self, vec):
        if len(vec) != len(self.mat_root):
            raise RootSystemError("dimension mismatch on root side")
        return mat_vec(self.mat_root, vec)

    def act_coroot(self, vec):
        if len(vec) != len(self.mat_coroot):
            raise RootSystemError("dimension mismatch on coweight side")
        return mat_vec(self.mat_coroot, vec)

    @cached_property
    def word(self) -> ReducedWord:
        return reduced_word(self.datum, self)

    def render(self) -> str:
        """Product form, leftmost factor acting last: 's2*s1' etc."""
        letters = self.word.letters
        if not letters:
            return "e"
        return "*".join(f"s{i+1}" for i in reversed(letters))

    def __repr__(self):
        return f"<W {self.render()}>"


class RootDatum:
    """Cartan type, root and coroot tables, and an isogeny lattice t(Z).

    The isogeny lattice is stored between the coroot lattice Q^v (the unit
    lattice of the simple-coroot basis) and the coweight lattice P^v, and
    cocharacter computations downstream happen in coordinates of its basis.
    """

    def __init__(self, cartan_type, cartan, positive_roots, positive_coroots,
                 cochar_lattice, isogeny_label):
        self.cartan_type = cartan_type
        self.cartan_matrix = mat_freeze(cartan)
        self.positive_roots = mat_freeze(positive_roots)
        self.positive_coroots = mat_freeze(positive_coroots)
        self.cochar_lattice = cochar_lattice
        self.isogeny_label = isogeny_label
        self._cochar_tz_cache = {}
        self._validate()

    # -- construction -----------------------------------------------------

    def _validate(self):
        n = self.rank
        a = self.cartan_matrix
        for i in range(n):
            if a[i][i] != 2:
                raise RootSystemError("Cartan diagonal must be 2")
            for j in range(n):
                if i != j and a[i][j] > 0:
                    raise RootSystemError("off-diagonal Cartan entries must be <= 0")
        expected = self.cartan_type.positive_root_count()
        if len(self.positive_roots) != expected:
            raise RootSystemError(
                f"{self.cartan_type} expects {expected} positive roots, "
                f"got {len(self.positive_roots)}")
        if self.cochar_lattice.rank != n:
            raise RootSystemError("isogeny lattice must have full rank")
        if not self.cochar_lattice.contains_lattice(self.coroot_lattice):
            raise RootSystemError("isogeny lattice does not contain Q^v")
        if not self.coweight_lattice.contains_lattice(self.cochar_lattice):
            raise RootSystemError("isogeny lattice is not inside P^v")
        assert self.center_group().order() and \
            self.coweight_lattice.index_over(self.coroot_lattice) % \
            self.center_group().order() == 0

    @property
    def rank(self) -> int:
        return len(self.cartan_matrix)

    # -- lattices ---------------------------------------------------------

    @cached_property
    def coroot_lattice(self) -> RationalLattice:
        """Q^v: the unit lattice in simple-coroot coordinates."""
        return RationalLattice.standard(self.rank)

    @cached_property
    def coweight_lattice(self) -> RationalLattice:
        """P^v = {y : <alpha_i, y> in Z}: columns of the inverse Cartan."""
        inv = mat_inverse_frac(self.cartan_matrix)
        cols = mat_transpose(inv)
        return RationalLattice.from_fraction_vectors(self.rank, cols)

    def center_group(self):
        """Z(G) = P^v / t(Z) as a finite abelian group."""
        return self.coweight_lattice.quotient_by(self.cochar_lattice)

    def fundamental_group(self):
        """pi_1(G) = t(Z) / Q^v."""
        return self.cochar_lattice.quotient_by(self.coroot_lattice)

    # -- t(Z) coordinates ---------------------------------------------------

    @cached_property
    def _basis_cols(self):
        return mat_transpose([[Fraction(x, self.cochar_lattice.den) for x in r]
                              for r in self.cochar_lattice.lattice.basis])

    @cached_property
    def _basis_cols_inv(self):
        return mat_inverse_frac(self._basis_cols)

    def to_tz(self, coroot_vec):
        """Coroot-basis coordinates -> t(Z)-basis coordinates."""
        out = mat_vec(self._basis_cols_inv, [Fraction(x) for x in coroot_vec])
        return tuple(out)

    def to_tz_int(self, coroot_vec):
        out = self.to_tz(coroot_vec)
        if any(Fraction(x).denominator != 1 for x in out):
            raise RootSystemError("vector is not in t(Z)")
        return tuple(int(x) for x in out)

    def from_tz(self, tz_vec):
        return tuple(mat_vec(self._basis_cols, [Fraction(x) for x in tz_vec]))

    @cached_property
    def pairing_tz(self) -> tuple:
        """<alpha_i, y> for y in t(Z) coordinates; integral because t(Z) <= P^v."""
        prod = mat_mul([list(r) for r in self.cartan_matrix], self._basis_cols)
        out = []
        for row in prod:
            if any(Fraction(x).denominator != 1 for x in row):
                raise RootSystemError("pairing matrix is not integral")
            out.append([int(x) for x in row])
        return mat_freeze(out)

    @cached_property
    def coweights_tz(self) -> RationalLattice:
        """Q^* = P^v in t(Z) coordinates: {y : pairing_tz @ y integral}."""
        inv = mat_inverse_frac(self.pairing_tz)
        return RationalLattice.from_fraction_vectors(
            self.rank, mat_transpose(inv))

    @cached_property
    def coroots_tz(self) -> tuple:
        """Simple coroots in t(Z) coordinates (integer vectors)."""
        n = self.rank
        return tuple(self.to_tz_int([int(i == j) for j in range(n)])
                     for i in range(n))

    def cochar_matrix_tz(self, w: WeylElement) -> tuple:
        """Action of w on the coweight side in t(Z) coordinates."""
        key = w.mat_coroot
        hit = self._cochar_tz_cache.get(key)
        if hit is not None:
            return hit
        prod = mat_mul(self._basis_cols_inv,
                       mat_mul([list(r) for r in w.mat_coroot], self._basis_cols))
        out = []
        for row in prod:
            if any(Fraction(x).denominator != 1 for x in row):
                raise RootSystemError("t(Z) is not stable under the Weyl group")
            out.append([int(x) for x in row])
        frozen = mat_freeze(out)
        self._cochar_tz_cache[key] = frozen
        return frozen

    # -- Weyl elements ------------------------------------------------------

    @cached_property
    def identity_element(self) -> WeylElement:
        n = self.rank
        eye = mat_freeze([[int(i == j) for j in range(n)] for i in range(n)])
        return WeylElement(self, eye, eye)

    @cached_property
    def simple_reflections(self) -> tuple:
        n = self.rank
        a = self.cartan_matrix
        out = []
        for k in range(n):
            mr = [[int(i == j) - (1 if i == k else 0) * a[j][k]
                   for j in range(n)] for i in range(n)]
            mc = [[int(i == j) - (1 if i == k else 0) * a[k][j]
                   for j in range(n)] for i in range(n)]
            out.append(WeylElement(self, mat_freeze(mr), mat_freeze(mc)))
        return tuple(out)

    def element_from_word(self, letters) -> WeylElement:
        w = self.identity_element
        for i in letters:
            w = self.simple_reflections[int(i)] * w
        return w

    def weyl_table(self) -> "WeylTable":
        if not hasattr(self, "_weyl_table"):
            order = self.cartan_type.weyl_order()
            if order > 200_000:
                raise RootSystemError(
                    f"Weyl group of {self.cartan_type} is too large to enumerate "
                    f"({order} elements)")
            self._weyl_table = WeylTable(self)
        return self._weyl_table

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": {"series": self.cartan_type.series,
                     "rank": self.cartan_type.rank},
            "cartan_matrix": [list(r) for r in self.cartan_matrix],
            "cochar_lattice": self.cochar_lattice.to_json(),
            "isogeny_label": self.isogeny_label,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict) -> "RootDatum":
        ctype = CartanType(doc["type"]["series"], doc["type"]["rank"])
        lat = doc["cochar_lattice"]
        basis = RationalLattice(ctype.rank, lat["den"], lat["basis"])
        return build_root_datum(ctype, basis, label=doc.get("isogeny_label", "explicit"))

    def __repr__(self):
        return f"RootDatum({self.cartan_type}, {self.isogeny_label})"


def _generate_root_coroot_pairs(ctype, cartan):
    """Orbit of the simple (root, coroot) pairs under simple reflections."""
    n = ctype.rank
    refl_root = []
    refl_cor = []
    for k in range(n):
        refl_root.append([[int(i == j) - (1 if i == k else 0) * cartan[j][k]
                           for j in range(n)] for i in range(n)])
        refl_cor.append([[int(i == j) - (1 if i == k else 0) * cartan[k][j]
                          for j in range(n)] for i in range(n)])
    seen = {}
    frontier = []
    for i in range(n):
        root = tuple(int(i == j) for j in range(n))
        seen[root] = tuple(int(i == j) for j in range(n))
        frontier.append(root)
    while frontier:
        nxt = []
        for root in frontier:
            cor = seen[root]
            for k in range(n):
                r2 = mat_vec(refl_root[k], root)
                if r2 not in seen:
                    seen[r2] = mat_vec(refl_cor[k], cor)
                    nxt.append(r2)
        frontier = nxt
    pos = [(r, c) for r, c in seen.items() if all(x >= 0 for x in r)]
    pos.sort(key=lambda rc: (sum(rc[0]), rc[0]))
    return tuple(r for r, _ in pos), tuple(c for _, c in pos)


def build_root_datum(ctype, isogeny="sc", label=None) -> RootDatum:
    """Construct the root datum of a Cartan type with a chosen isogeny lattice.

    ``isogeny`` is ``"sc"`` (t(Z) = Q^v), ``"ad"`` (t(Z) = P^v), a
    ``RationalLattice`` in simple-coroot coordinates, or a sequence of basis
    vectors with Fraction entries.
    """
    if isinstance(ctype, str):
        ctype = CartanType.parse(ctype)
    cartan = cartan_matrix(ctype)
    roots, coroots = _generate_root_coroot_pairs(ctype, cartan)
    n = ctype.rank
    if isinstance(isogeny, str):
        if isogeny == "sc":
            lat = RationalLattice.standard(n)
        elif isogeny == "ad":
            inv = mat_inverse_frac(cartan)
            lat = RationalLattice.from_fraction_vectors(n, mat_transpose(inv))
        else:
            raise RootSystemError(f"unknown isogeny label {isogeny!r}")
        label = label or isogeny
    elif isinstance(isogeny, RationalLattice):
        lat = isogeny
        label = label or "explicit"
    else:
        lat = RationalLattice.from_fraction_vectors(n, isogeny)
        label = label or "explicit"
    return RootDatum(ctype, cartan, roots, coroots, lat, label)


class WeylTable:
    """Enumerated Weyl group with left-multiplication and ascent tables."""

    def __init__(self, datum: RootDatum):
        self.datum = datum
        n = datum.rank
        ident = datum.identity_element
        self.elements = [ident]
        self.index = {ident.mat_root: 0}
        self.length = [0]
        frontier = [0]
        while frontier:
            nxt = []
            for idx in frontier:
                w = self.elements[idx]
                for i in range(n):
                    v = datum.simple_reflections[i] * w
                    if v.mat_root not in self.index:
                        self.index[v.mat_root] = len(self.elements)
                        self.elements.append(v)
                        self.length.append(self.length[idx] + 1)
                        nxt.append(self.index[v.mat_root])
            frontier = nxt
        size = len(self.elements)
        self.leftmul = [[0] * size for _ in range(n)]
        for idx, w in enumerate(self.elements):
            for i in range(n):
                self.leftmul[i][idx] = self.index[
                    (datum.simple_reflections[i] * w).mat_root]
        self.goes_up = [
            [self.length[self.leftmul[i][idx]] > self.length[idx]
             for idx in range(size)]
            for i in range(n)
        ]
        self.inv = [self.index[w.inverse.mat_root] for w in self.elements]

    def __len__(self):
        return len(self.elements)

    def idx(self, w: WeylElement) -> int:
        return self.index[w.mat_root]


def length(w: WeylElement) -> int:
    return w.length


def goes_up(w: WeylElement, i: int) -> bool:
    """Whether l(s_i w) = l(w) + 1, i.e. w^-1(alpha_i) is positive."""
    n = w.datum.rank
    if not 0 <= i < n:
        raise RootSystemError(f"simple index {i} out of range")
    e_i = tuple(int(i == j) for j in range(n))
    img = w.inverse.act_root(e_i)
    return all(x >= 0 for x in img)


def right_descents(datum: RootDatum, w: WeylElement):
    """Indices i with l(w s_i) < l(w), read off the sign of w(alpha_i)."""
    n = datum.rank
    out = []
    for i in range(n):
        e_i = tuple(int(i == j) for j in range(n))
        img = w.act_root(e_i)
        if all(x <= 0 for x in img):
            out.append(i)
    return out


def reduced_word(datum: RootDatum, w: WeylElement, section="lex") -> ReducedWord:
    """The chosen reduced word of w in consumption order.

    ``section="lex"`` picks the lexicographically least word letter by
    letter; ``"revlex"`` the greatest.  Both are honest sections of the
    lift-to-words map, used by the convention-invariance checks.
    """
    if section not in ("lex", "revlex"):
        raise RootSystemError(f"unknown word section {section!r}")
    letters = []
    cur = w
    while True:
        descents = right_descents(datum, cur)
        if not descents:
            break
        i = min(descents) if section == "lex" else max(descents)
        letters.append(i)
        cur = cur * datum.simple_reflections[i]
    if cur.mat_root != datum.identity_element.mat_root:
        raise RootSystemError("descent recursion did not terminate at e")
    return ReducedWord(letters)


def all_reduced_words(datum: RootDatum, w: WeylElement):
    """Every reduced word of w (consumption order); test-sized inputs only."""
    if w.is_identity:
        return [()]
    out = []
    for i in right_descents(datum, w):
        for tail in all_reduced_words(datum, w * datum.simple_reflections[i]):
            out.append(tail + (i,))
    return sorted(out)


def is_minimal_coset_rep(datum: RootDatum, w: WeylElement, levi) -> bool:
    """Minimal length in w W_I: no right descent inside the Levi subset."""
    return not any(i in set(levi) for i in right_descents(datum, w))


def minimal_coset_rep(datum: RootDatum, w: WeylElement, levi) -> WeylElement:
    levi = set(levi)
    cur = w
    while True:
        ds = [i for i in right_descents(datum, cur) if i in levi]
        if not ds:
            return cur
        cur = cur * datum.simple_reflections[min(ds)]


def coset_representatives(datum: RootDatum, levi):
    """Minimal-length representatives of W / W_levi, sorted by (length, word)."""
    table = datum.weyl_table()
    reps = {}
    for w in table.elements:
        r = minimal_coset_rep(datum, w, levi)
        reps[r.mat_root] = r
    out = list(reps.values())
    out.sort(key=lambda w: (w.length, w.word.letters))
    return out


def minimal_words(datum: RootDatum, w: WeylElement = None, levi=None,
                  section="lex"):
    """Reduced word of ``w``, or the minimal coset representatives of W/W_levi."""
    if levi is None:
        if w is None:
            raise RootSystemError("need an element or a Levi subset")
        return reduced_word(datum, w, section=section)
    return coset_representatives(datum, levi)


def langlands_dual(datum: RootDatum, isogeny="sc") -> RootDatum:
    """Dual root datum: transposed Cartan matrix, roots and coroots exchanged.

    Node indices are preserved, so walk letters transport identically; the
    isogeny lattice of the dual is the caller's choice (default sc).
    """
    ctype = CartanType(datum.cartan_type.dual_series(), datum.cartan_type.rank)
    cartan = mat_freeze(mat_transpose([list(r) for r in datum.cartan_matrix]))
    n = datum.rank
    if isinstance(isogeny, str):
        if isogeny == "sc":
            lat = RationalLattice.standard(n)
        elif isogeny == "ad":
            inv = mat_inverse_frac(cartan)
            lat = RationalLattice.from_fraction_vectors(n, mat_transpose(inv))
        else:
            raise RootSystemError(f"unknown isogeny label {isogeny!r}")
        label = isogeny
    else:
        lat = isogeny if isinstance(isogeny, RationalLattice) else \
            RationalLattice.from_fraction_vectors(n, isogeny)
        label = "explicit"
    return RootDatum(ctype, cartan, datum.positive_coroots,
                     datum.positive_roots, lat, label)


def dual_element(dual_datum: RootDatum, w: WeylElement) -> WeylElement:
    """Image of w under the canonical isomorphism W(G) = W(dual G)."""
    return WeylElement(dual_datum, w.mat_coroot, w.mat_root)


# -- Sp4 diagonal-coordinate helpers ----------------------------------------

def _require_c2(datum: RootDatum):
    if datum.cartan_type != CartanType("C", 2):
        raise RootSystemError("diagonal coordinates are only defined for C2")


def c2_root_diag(datum: RootDatum, root_vec):
    """Root-side vector as coefficients of (E_11^*, E_22^*) for Sp4.

    The simple roots are alpha_1 = 2 E_22^* and alpha_2 = E_11^* - E_22^*.
    """
    _require_c2(datum)
    a, b = root_vec
    return (b, 2 * a - b)


def c2_coweight_diag(datum: RootDatum, coroot_vec):
    """Coweight in simple-coroot coordinates as diag(u1, u2, -u1, -u2)."""
    _require_c2(datum)
    a, b = coroot_vec
    u1, u2 = b, a - b
    return (u1, u2, -u1, -u2)
