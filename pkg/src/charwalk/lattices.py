"""Exact integer and rational lattice arithmetic.

Everything here is built on arbitrary-precision Python integers and
``fractions.Fraction``; no floating point is ever used.  Vectors are tuples,
matrices are tuples of row tuples.  A sublattice is stored through its
generating vectors and canonicalized by a row-style Hermite normal form, so
two generating sets of the same lattice compare equal.

Finite subgroups of a torus are represented as congruence systems: a rational
matrix ``P`` encodes the subgroup ``{y : P @ y is integral}`` of the ambient
rational vector space.  Intersection is row concatenation, which keeps the
stabilizer computations downstream cheap and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product as _iproduct
from math import gcd, lcm
from typing import Iterable, Sequence


class LatticeError(ValueError):
    pass


class InfiniteIndexError(LatticeError):
    """A finite order or index was requested for an infinite quotient."""


# ---------------------------------------------------------------------------
# bare integer-matrix helpers (lists of rows of python ints)
# ---------------------------------------------------------------------------

def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return [
        [sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for row in a
    ]


def mat_vec(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def mat_transpose(m):
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def mat_freeze(m):
    return tuple(tuple(row) for row in m)


def mat_det(m):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[-1][-1]


def mat_inverse_frac(m):
    """Exact inverse over the rationals via Gauss-Jordan."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise LatticeError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def mat_inverse_int(m):
    """Inverse of a unimodular integer matrix."""
    d = mat_det(m)
    if d not in (1, -1):
        raise LatticeError(f"matrix is not unimodular (det={d})")
    inv = mat_inverse_frac(m)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise LatticeError("unimodular inverse came out non-integral")
        out.append([int(x) for x in row])
    return out


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(matrix: Sequence[Sequence[int]]):
    """Return unimodular ``U``, diagonal ``D``, unimodular ``V`` with U@M@V = D.

    The diagonal of ``D`` carries the invariant-factor chain d_1 | d_2 | ...
    (entries nonnegative, zeros trailing).
    """
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity_matrix(m)
    v = identity_matrix(n)

    def row_op(i, j, q):
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):
        for r in range(m):
            a[r][i] -= q * a[r][j]
        for r in range(n):
            v[r][i] -= q * v[r][j]

    def find_pivot(t):
        best = None
        where = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    where = (i, j)
        return where

    t = 0
    while t < min(m, n):
        where = find_pivot(t)
        if where is None:
            break
        while True:
            i, j = where
            if i != t:
                a[t], a[i] = a[i], a[t]
                u[t], u[i] = u[i], u[t]
            if j != t:
                for r in range(m):
                    a[r][t], a[r][j] = a[r][j], a[r][t]
                for r in range(n):
                    v[r][t], v[r][j] = v[r][j], v[r][t]
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                u[t] = [-x for x in u[t]]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    if q:
                        row_op(i, t, q)
                    if a[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    if q:
                        col_op(j, t, q)
                    if a[t][j] != 0:
                        dirty = True
            if dirty:
                where = find_pivot(t)
                continue
            offender = None
            for i in range(t + 1, m):
                if any(a[i][j] % a[t][t] != 0 for j in range(t + 1, n)):
                    offender = i
                    break
            if offender is None:
                break
            row_op(t, offender, -1)
            where = (t, t)
        t += 1

    return mat_freeze(u), mat_freeze(a), mat_freeze(v)


def snf_diagonal(matrix) -> tuple:
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if m == 0 or n == 0:
        return ()
    _, d, _ = smith_normal_form(matrix)
    return tuple(d[i][i] for i in range(min(m, n)))


# ---------------------------------------------------------------------------
# Hermite normal form on generator vectors (rows)
# ---------------------------------------------------------------------------

def hnf_rows(vectors: Iterable[Sequence[int]], n: int) -> tuple:
    """Canonical echelon basis of the lattice spanned by ``vectors`` in Z^n.

    Pivots are positive, pivot columns strictly increase, and entries of
    earlier rows above a pivot are reduced into [0, pivot).  This is the
    unique HNF basis, so it doubles as the canonical form for equality.
    """
    rows = [list(map(int, v)) for v in vectors if any(v)]
    out = []
    for col in range(n):
        live = [r for r in rows if r[col] != 0]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            base = live[0]
            for r in live[1:]:
                q = r[col] // base[col]
                for j in range(n):
                    r[j] -= q * base[j]
            live = [r for r in live if r[col] != 0]
        piv = live[0]
        rows = [r for r in rows if r is not piv and any(r)]
        if piv[col] < 0:
            piv = [-x for x in piv]
        for prev in out:
            if prev[col] != 0:
                q = prev[col] // piv[col]
                if q:
                    for j in range(n):
                        prev[j] -= q * piv[j]
        out.append(piv)
    return mat_freeze(out)


def hnf_reduce(basis, vec):
    """Reduce ``vec`` against an HNF basis; returns (coords, remainder).

    The vector lies in the lattice iff the remainder is zero, in which case
    ``coords`` are its coordinates in the HNF basis.
    """
    v = list(map(int, vec))
    coords = []
    for row in basis:
        col = next(j for j, x in enumerate(row) if x != 0)
        q = v[col] // row[col]
        coords.append(q)
        if q:
            for j in range(len(v)):
                v[j] -= q * row[j]
    return coords, tuple(v)


def kernel_basis(matrix) -> list:
    """Integer basis of {x : M @ x = 0}; the result is a saturated lattice."""
    m = len(matrix)
    if m == 0:
        raise LatticeError("kernel of an empty matrix needs explicit width")
    n = len(matrix[0])
    _, d, v = smith_normal_form(matrix)
    r = sum(1 for i in range(min(m, n)) if d[i][i] != 0)
    return [tuple(v[i][j] for i in range(n)) for j in range(r, n)]


# ---------------------------------------------------------------------------
# finite abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Invariant-factor form d_1 | d_2 | ... plus a free rank.

    ``free_rank`` counts the free/torus directions; the group is finite iff
    it is zero.
    """

    invariant_factors: tuple = ()
    free_rank: int = 0

    def __post_init__(self):
        for d in self.invariant_factors:
            if d < 2:
                raise LatticeError(f"invariant factor {d} < 2")
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise LatticeError(
                    f"invariant factors {self.invariant_factors} do not form a chain")

    @property
    def is_finite(self):
        return self.free_rank == 0

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.invariant_factors

    def order(self) -> int:
        if not self.is_finite:
            raise InfiniteIndexError("group has positive free rank")
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def dual(self) -> "FiniteAbelianGroup":
        # the dual of a finite abelian group has the same invariant factors
        return self

    @classmethod
    def from_diagonal(cls, diag, extra_free=0):
        facs = tuple(d for d in diag if d > 1)
        free = sum(1 for d in diag if d == 0) + extra_free
        return cls(facs, free)

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        parts += ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "1"

    def to_json(self):
        return {"invariant_factors": list(self.invariant_factors),
                "free_rank": self.free_rank}


TRIVIAL_GROUP = FiniteAbelianGroup()


# ---------------------------------------------------------------------------
# integer sublattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sublattice:
    """Sublattice of Z^n given by generating vectors (not necessarily a basis)."""

    ambient_rank: int
    generators: tuple

    def __init__(self, ambient_rank, generators=()):
        gens = tuple(tuple(int(x) for x in g) for g in generators)
        for g in gens:
            if len(g) != ambient_rank:
                raise LatticeError(
                    f"generator length {len(g)} != ambient rank {ambient_rank}")
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "generators", gens)

    @cached_property
    def basis(self) -> tuple:
        return hnf_rows(self.generators, self.ambient_rank)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return (isinstance(other, Sublattice)
                and self.ambient_rank == other.ambient_rank
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_rank, self.basis))

    def contains(self, vec) -> bool:
        _, rem = hnf_reduce(self.basis, vec)
        return not any(rem)

    def contains_lattice(self, other: "Sublattice") -> bool:
        return all(self.contains(g) for g in other.basis)

    @classmethod
    def full(cls, n):
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n):
        return cls(n, ())

    def saturation(self) -> "Sublattice":
        """Smallest saturated sublattice with the same rational span."""
        if not self.basis:
            return self
        if self.rank == self.ambient_rank:
            return Sublattice.full(self.ambient_rank)
        ann = kernel_basis([list(b) for b in self.basis])
        return Sublattice(self.ambient_rank, kernel_basis([list(a) for a in ann]))

    def to_json(self):
        return {"ambient_rank": self.ambient_rank,
                "basis": [list(r) for r in self.basis]}


def lattice_sum(*lats: Sublattice) -> Sublattice:
    if not lats:
        raise LatticeError("empty sum")
    n = lats[0].ambient_rank
    gens = []
    for lat in lats:
        if lat.ambient_rank != n:
            raise LatticeError("ambient rank mismatch in sum")
        gens.extend(lat.generators)
    return Sublattice(n, gens)


def lattice_intersect(a: Sublattice, b: Sublattice) -> Sublattice:
    if a.ambient_rank != b.ambient_rank:
        raise LatticeError("ambient rank mismatch in intersection")
    ga, gb = a.basis, b.basis
    if not ga or not gb:
        return Sublattice.zero(a.ambient_rank)
    stacked = mat_transpose([list(r) for r in ga] + [[-x for x in r] for r in gb])
    gens = []
    for k in kernel_basis(stacked):
        vec = [0] * a.ambient_rank
        for c, row in zip(k[:len(ga)], ga):
            for j in range(a.ambient_rank):
                vec[j] += c * row[j]
        gens.append(tuple(vec))
    return Sublattice(a.ambient_rank, gens)


def quotient_group(ambient: Sublattice, sub: Sublattice) -> FiniteAbelianGroup:
    """Structure of ambient/sub as a finitely generated abelian group."""
    if ambient.ambient_rank != sub.ambient_rank:
        raise LatticeError("ambient rank mismatch in quotient")
    if not ambient.contains_lattice(sub):
        raise LatticeError("quotient: sub is not contained in ambient")
    basis = ambient.basis
    if not basis:
        return TRIVIAL_GROUP
    coords = []
    for g in sub.basis:
        c, rem = hnf_reduce(basis, g)
        assert not any(rem)
        coords.append(c)
    if not coords:
        return FiniteAbelianGroup((), len(basis))
    diag = snf_diagonal(coords)
    facs = tuple(d for d in diag if d > 1)
    rank_hit = sum(1 for d in diag if d != 0)
    return FiniteAbelianGroup(facs, len(basis) - rank_hit)


def lattice_index(sub: Sublattice, ambient: Sublattice) -> int:
    """Finite index [ambient : sub]; raises InfiniteIndexError otherwise."""
    return quotient_group(ambient, sub).order()


# ---------------------------------------------------------------------------
# rational lattices: (1/den) * integer lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalLattice:
    """Lattice of the form (1/den) * L for an integer lattice L in Z^n."""

    ambient_rank: int
    den: int
    lattice: Sublattice

    def __init__(self, ambient_rank, den, vectors):
        den = int(den)
        if den <= 0:
            raise LatticeError("denominator must be positive")
        lat = vectors if isinstance(vectors, Sublattice) else \
            Sublattice(ambient_rank, vectors)
        g = den
        for row in lat.basis:
            for x in row:
                g = gcd(g, abs(x))
        if g > 1:
            lat = Sublattice(ambient_rank,
                             [tuple(x // g for x in r) for r in lat.basis])
            den //= g
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "lattice", lat)

    @classmethod
    def from_fraction_vectors(cls, n, vectors):
        den = 1
        vecs = [tuple(Fraction(x) for x in v) for v in vectors]
        for v in vecs:
            for x in v:
                den = lcm(den, x.denominator)
        ints = [tuple(int(x * den) for x in v) for v in vecs]
        return cls(n, den, ints)

    @classmethod
    def integral(cls, lat: Sublattice):
        return cls(lat.ambient_rank, 1, lat)

    @classmethod
    def standard(cls, n):
        return cls(n, 1, Sublattice.full(n))

    @property
    def rank(self):
        return self.lattice.rank

    def basis_fractions(self) -> tuple:
        return tuple(tuple(Fraction(x, self.den) for x in row)
                     for row in self.lattice.basis)

    def __eq__(self, other):
        return (isinstance(other, RationalLattice)
                and self.ambient_rank == other.ambient_rank
                and self.den == other.den
                and self.lattice == other.lattice)

    def __hash__(self):
        return hash((self.ambient_rank, self.den, self.lattice))

    def contains(self, vec) -> bool:
        scaled = [Fraction(x) * self.den for x in vec]
        if any(x.denominator != 1 for x in scaled):
            return False
        return self.lattice.contains([int(x) for x in scaled])

    def contains_lattice(self, other: "RationalLattice") -> bool:
        return all(self.contains(v) for v in other.basis_fractions())

    def rescaled_pair(self, other: "RationalLattice"):
        """Integer lattices for self and other over the common denominator."""
        if self.ambient_rank != other.ambient_rank:
            raise LatticeError("ambient rank mismatch")
        d = lcm(self.den, other.den)
        a = Sublattice(self.ambient_rank,
                       [tuple(x * (d // self.den) for x in r)
                        for r in self.lattice.basis])
        b = Sublattice(other.ambient_rank,
                       [tuple(x * (d // other.den) for x in r)
                        for r in other.lattice.basis])
        return a, b

    def quotient_by(self, sub: "RationalLattice") -> FiniteAbelianGroup:
        a, b = self.rescaled_pair(sub)
        return quotient_group(a, b)

    def index_over(self, sub: "RationalLattice") -> int:
        return self.quotient_by(sub).order()

    def sum(self, other: "RationalLattice") -> "RationalLattice":
        a, b = self.rescaled_pair(other)
        return RationalLattice(self.ambient_rank, lcm(self.den, other.den),
                               list(a.basis) + list(b.basis))

    def intersect(self, other: "RationalLattice") -> "RationalLattice":
        a, b = self.rescaled_pair(other)
        return RationalLattice(self.ambient_rank, lcm(self.den, other.den),
                               lattice_intersect(a, b))

    def image_under(self, matrix) -> "RationalLattice":
        """Image under an integer matrix given by rows."""
        vecs = [mat_vec(matrix, row) for row in self.lattice.basis]
        return RationalLattice(len(matrix), self.den, vecs)

    def to_json(self):
        return {"den": self.den, "basis": [list(r) for r in self.lattice.basis]}


def lattice_preimage(matrix, target: Sublattice) -> RationalLattice:
    """Rational lattice {x : M @ x in target}, kernel taken as a lattice.

    The honest preimage of a lattice under a singular map contains whole
    rational lines; this function returns the lattice generated by the
    particular solutions together with the saturated integer kernel.  Group
    level questions about such subgroups go through ``CongruenceSubgroup``.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if target.ambient_rank != m:
        raise LatticeError("target rank does not match the map")
    u, d, v = smith_normal_form(matrix)
    rk = sum(1 for i in range(min(m, n)) if d[i][i] != 0)
    gens = []
    for t in target.basis:
        rhs = mat_vec(u, t)
        if any(rhs[i] != 0 for i in range(rk, m)):
            continue  # this generator is not in the image
        z = [Fraction(rhs[i], d[i][i]) if i < rk else Fraction(0)
             for i in range(n)]
        gens.append(tuple(sum(Fraction(v[i][j]) * z[j] for j in range(n))
                          for i in range(n)))
    for k in kernel_basis(matrix) if m else []:
        gens.append(tuple(Fraction(x) for x in k))
    return RationalLattice.from_fraction_vectors(n, gens)


def dual_lattice(generators, pairing) -> "CongruenceSubgroup":
    """{y : <g, y> in Z for all generators g} under a pairing matrix."""
    n = len(pairing[0]) if pairing else 0
    rows = [mat_vec(mat_transpose(pairing), g) for g in generators]
    return CongruenceSubgroup.from_rows(n, 1, rows)


# ---------------------------------------------------------------------------
# congruence subgroups of the ambient rational space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CongruenceSubgroup:
    """Subgroup {y in Q^n : (1/den) rows @ y is integral}.

    Models subgroups of a torus through the exponential; the group of values
    is always read modulo a reference lattice supplied by the caller.
    """

    ambient_rank: int
    den: int
    rows: tuple

    @classmethod
    def from_rows(cls, n, den, rows):
        return cls(n, int(den), mat_freeze([[int(x) for x in r] for r in rows]))

    @classmethod
    def from_fraction_rows(cls, n, rows):
        den = 1
        frows = [tuple(Fraction(x) for x in r) for r in rows]
        for r in frows:
            for x in r:
                den = lcm(den, x.denominator)
        return cls.from_rows(n, den, [[int(x * den) for x in r] for r in frows])

    @classmethod
    def everything(cls, n):
        return cls(n, 1, ())

    @classmethod
    def from_overlattice(cls, lat: RationalLattice):
        """Constraint form of a full-rank lattice: y in L <=> B^-1 y integral."""
        if lat.rank != lat.ambient_rank:
            raise LatticeError("overlattice must be full rank")
        basis_cols = mat_transpose([list(r) for r in lat.lattice.basis])
        inv = mat_inverse_frac(basis_cols)
        return cls.from_fraction_rows(
            lat.ambient_rank, [[Fraction(x) * lat.den for x in r] for r in inv])

    def intersect(self, *others: "CongruenceSubgroup") -> "CongruenceSubgroup":
        n = self.ambient_rank
        den = self.den
        for o in others:
            if o.ambient_rank != n:
                raise LatticeError("ambient rank mismatch")
            den = lcm(den, o.den)
        rows = [[x * (den // self.den) for x in r] for r in self.rows]
        for o in others:
            rows.extend([[x * (den // o.den) for x in r] for r in o.rows])
        return CongruenceSubgroup.from_rows(n, den, rows)

    def pullback(self, matrix) -> "CongruenceSubgroup":
        """Preimage of self under y -> M @ y (constraints become P @ M)."""
        if not self.rows:
            return CongruenceSubgroup.everything(self.ambient_rank)
        return CongruenceSubgroup.from_rows(
            self.ambient_rank, self.den,
            mat_mul([list(r) for r in self.rows], matrix))

    def contains(self, vec) -> bool:
        for r in self.rows:
            s = sum(Fraction(x) * Fraction(y) for x, y in zip(r, vec))
            if (s / self.den).denominator != 1:
                return False
        return True

    @cached_property
    def solution(self):
        """(lattice_part, free_basis): solutions are lattice + Q-span(free)."""
        n = self.ambient_rank
        if not self.rows:
            return RationalLattice.standard(n), \
                tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        u, d, v = smith_normal_form(self.rows)
        m = len(self.rows)
        rk = sum(1 for i in range(min(m, n)) if d[i][i] != 0)
        gens = []
        for i in range(rk):
            scale = Fraction(self.den, d[i][i])
            gens.append(tuple(Fraction(v[r][i]) * scale for r in range(n)))
        free = tuple(tuple(v[r][i] for r in range(n)) for i in range(rk, n))
        for f in free:
            gens.append(tuple(Fraction(x) for x in f))
        lat = RationalLattice.from_fraction_vectors(n, gens)
        return lat, free

    @property
    def free_rank(self) -> int:
        return len(self.solution[1])

    def overlattice(self) -> RationalLattice:
        """Solution set as a rational lattice; requires no free directions."""
        lat, free = self.solution
        if free:
            raise InfiniteIndexError(
                "subgroup has a positive-dimensional part")
        return lat

    def group_mod(self, reference: RationalLattice) -> FiniteAbelianGroup:
        """Structure of (solutions)/(reference) for a contained reference."""
        if not all(self.contains(v) for v in reference.basis_fractions()):
            raise LatticeError("reference lattice is not inside the subgroup")
        lat, free = self.solution
        if not free:
            return lat.quotient_by(reference)
        proj = kernel_basis(mat_transpose([list(f) for f in free]))
        if not proj:
            return FiniteAbelianGroup((), len(free))
        pm = [list(p) for p in proj]
        img = RationalLattice.from_fraction_vectors(
            len(pm), [mat_vec(pm, b) for b in lat.basis_fractions()])
        ref = RationalLattice.from_fraction_vectors(
            len(pm), [mat_vec(pm, b) for b in reference.basis_fractions()])
        q = img.quotient_by(ref)
        return FiniteAbelianGroup(q.invariant_factors, q.free_rank + len(free))

    def order_mod(self, reference: RationalLattice) -> int:
        return self.group_mod(reference).order()

    def coset_representatives(self, reference: RationalLattice) -> list:
        """Vectors representing (solutions)/(reference); finite case only."""
        lat = self.overlattice()
        if not all(self.contains(v) for v in reference.basis_fractions()):
            raise LatticeError("reference lattice is not inside the subgroup")
        a, b = lat.rescaled_pair(reference)
        den = lcm(lat.den, reference.den)
        basis = a.basis
        k = len(basis)
        if k == 0:
            return [tuple(Fraction(0) for _ in range(self.ambient_rank))]
        coords = []
        for g in b.basis:
            c, rem = hnf_reduce(basis, g)
            assert not any(rem)
            coords.append(c)
        # quotient Z^k / (column span of coords^T): in coordinates w = U y the
        # sublattice is spanned by d_i e_i, so representatives are U^-1 w
        uu, dd, _ = smith_normal_form(mat_transpose(coords))
        diag = [dd[i][i] if i < min(k, len(coords)) else 0 for i in range(k)]
        if any(x == 0 for x in diag):
            raise InfiniteIndexError("quotient is infinite")
        u_inv = mat_inverse_int([list(r) for r in uu])
        reps = []
        for combo in _iproduct(*(range(x) for x in diag)):
            z = mat_vec(u_inv, combo)
            out = [0] * self.ambient_rank
            for cf, brow in zip(z, basis):
                for j in range(self.ambient_rank):
                    out[j] += cf * brow[j]
            reps.append(tuple(Fraction(x, den) for x in out))
        return reps
