"""Independent brute-force cross-checks.

Nothing here reuses the lattice or motive machinery: walk counts come from a
bare recursion on the Bruhat graph, lattice indices from coset enumeration
with rational Gaussian elimination, and rank-1 stack counts from exhaustive
matrix arithmetic over small prime fields.  The point-count oracle divides
the solution count of the moment equation by the adjoint group order; the
division is exact because generic eigenvalues force free torus actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .lattices import Sublattice
from .roots import RootDatum, WeylElement
from .walks import InstructionWord


class OracleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# walk counting without materialization
# ---------------------------------------------------------------------------

def recursive_walk_count(datum: RootDatum, word, start: WeylElement = None) -> int:
    """Number of walks for a word from a start, counted by plain recursion."""
    word = word if isinstance(word, InstructionWord) else InstructionWord(word)
    word.validate(datum)
    table = datum.weyl_table()
    letters = word.letters
    if start is None:
        start = datum.identity_element
    memo = {}

    def count(k, idx):
        if k == len(letters):
            return 1
        key = (k, idx)
        hit = memo.get(key)
        if hit is not None:
            return hit
        i = letters[k]
        up = table.leftmul[i][idx]
        if table.goes_up[i][idx]:
            out = count(k + 1, up)
        else:
            out = count(k + 1, up) + count(k + 1, idx)
        memo[key] = out
        return out

    return count(0, table.idx(start))


# ---------------------------------------------------------------------------
# quotient order by coset enumeration
# ---------------------------------------------------------------------------

def _solve_rational(columns, target):
    """Solve sum x_i columns_i = target over Q; None if inconsistent."""
    if not columns:
        return [] if not any(target) else None
    n = len(target)
    m = len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(m)] + [Fraction(target[i])]
           for i in range(n)]
    pivots = []
    row = 0
    for col in range(m):
        piv = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        p = aug[row][col]
        aug[row] = [x / p for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    for r in range(row, n):
        if aug[r][m] != 0:
            return None
    sol = [Fraction(0)] * m
    for r, col in enumerate(pivots):
        sol[col] = aug[r][m]
    return sol


def _rank_rational(vectors, n):
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        rows[rank] = [x / p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def group_order_bruteforce(ambient: Sublattice, sub: Sublattice,
                           limit: int = 10000) -> int:
    """Order of ambient/sub by breadth-first coset enumeration.

    Membership tests use rational elimination over the raw generators, so
    this path is independent of the Hermite/Smith machinery it validates.
    """
    n = ambient.ambient_rank
    amb_gens = [tuple(g) for g in ambient.generators if any(g)]
    sub_gens = [tuple(g) for g in sub.generators if any(g)]
    if _rank_rational(sub_gens, n) < _rank_rational(amb_gens, n):
        raise OracleError("index is not finite: ranks differ")

    def in_sub(vec):
        if not any(vec):
            return True
        if not sub_gens:
            return False
        sol = _solve_rational(sub_gens, vec)
        return sol is not None and all(x.denominator == 1 for x in sol)

    reps = [tuple([0] * n)]
    frontier = [tuple([0] * n)]
    while frontier:
        nxt = []
        for base in frontier:
            for g in amb_gens:
                cand = tuple(b + x for b, x in zip(base, g))
                if any(in_sub([c - r for c, r in zip(cand, rep)])
                       for rep in reps):
                    continue
                reps.append(cand)
                nxt.append(cand)
                if len(reps) > limit:
                    raise OracleError("coset enumeration exceeded the budget")
        frontier = nxt
    return len(reps)


# ---------------------------------------------------------------------------
# finite-field point counts for rank 1
# ---------------------------------------------------------------------------

_SUPPORTED_PRIMES = (3, 5, 7, 11, 13)


@dataclass(frozen=True)
class FiniteFieldSpec:
    """Rank-1 counting instance over a small prime field.

    Punctures are regular semisimple classes of the 2x2 determinant-one
    group, each given either as ("split", zeta) with an eigenvalue in F_q or
    as ("trace", t) for the class of trace t (nonsplit when t^2 - 4 is a
    nonsquare).  The last listed puncture plays the regular base role; all
    classes here are regular, so the order is immaterial.
    """

    q: int
    genus: int
    punctures: tuple

    def __init__(self, q, genus, punctures):
        q = int(q)
        if q not in _SUPPORTED_PRIMES:
            raise OracleError(
                f"q={q} unsupported: the oracle runs over prime fields "
                f"{_SUPPORTED_PRIMES} (char 2 and prime squares excluded)")
        if not 0 <= int(genus) <= 2:
            raise OracleError("genus must be 0, 1, or 2")
        ps = []
        for p in punctures:
            kind, val = p
            if kind not in ("split", "trace"):
                raise OracleError(f"unknown puncture kind {kind!r}")
            ps.append((kind, int(val) % q))
        if not ps:
            raise OracleError("at least one puncture class is required")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "genus", int(genus))
        object.__setattr__(self, "punctures", tuple(ps))

    def traces(self):
        out = []
        for kind, val in self.punctures:
            if kind == "split":
                out.append((val + pow(val, -1, self.q)) % self.q)
            else:
                out.append(val % self.q)
        return out


def _is_square(a, q):
    a %= q
    return a == 0 or pow(a, (q - 1) // 2, q) == 1


def split_eigenvalue(q, kind, val):
    """Eigenvalue in F_q^x of a puncture class, or None when nonsplit."""
    if kind == "split":
        return val % q
    disc = (val * val - 4) % q
    if disc == 0 or not _is_square(disc, q):
        return None
    r = next(x for x in range(q) if (x * x) % q == disc)
    return (val + r) * pow(2, -1, q) % q


def ff_generic(spec: FiniteFieldSpec) -> bool:
    """Whether the eigenvalue data supports exact polynomial counting.

    Needs every class split with an eigenvalue that is a square of
    multiplicative order > 2, and every signed eigenvalue product away from
    +-1.  The square condition keeps the component-indexing square roots of
    the cell decomposition rational, so Frobenius fixes every cell; nonsplit
    or nonsquare eigenvalues give honest but twisted forms whose counts sit
    below the polynomial.  The product condition is the torsion-shifted
    genericity of the invariants module transported to F_q.
    """
    q = spec.q
    eigs = []
    for kind, val in spec.punctures:
        z = split_eigenvalue(q, kind, val)
        if z is None or z == 0:
            return False
        if (z * z) % q == 1:
            return False
        if not _is_square(z, q):
            return False
        eigs.append(z)
    from itertools import product as iproduct
    for signs in iproduct((1, -1), repeat=len(eigs)):
        prod = 1
        for s, z in zip(signs, eigs):
            prod = prod * (z if s == 1 else pow(z, -1, q)) % q
        if prod == 1:
            return False
    return True


@lru_cache(maxsize=8)
def _sl2_data(q):
    """Elements, conjugacy classes, and the commutator class vector."""
    elems = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    if (a * d - b * c) % q == 1:
                        elems.append((a, b, c, d))
    index = {m: i for i, m in enumerate(elems)}

    def mul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % q, (a * f + b * h) % q,
                (c * e + d * g) % q, (c * f + d * h) % q)

    def inv(x):
        a, b, c, d = x
        return (d % q, (-b) % q, (-c) % q, a % q)

    class_of = [None] * len(elems)
    class_sizes = []
    class_reps = []
    for i, m in enumerate(elems):
        if class_of[i] is not None:
            continue
        cls = len(class_reps)
        orbit = set()
        for g in elems:
            orbit.add(mul(mul(g, m), inv(g)))
        for x in orbit:
            class_of[index[x]] = cls
        class_reps.append(m)
        class_sizes.append(len(orbit))

    # N[cls] = #{(x, y) : [x, y] in cls}
    ncls = len(class_reps)
    big_n = [0] * ncls
    for ci, rep in enumerate(class_reps):
        rep_inv = inv(rep)
        for y in elems:
            comm = mul(mul(rep, y), mul(rep_inv, inv(y)))
            big_n[class_of[index[comm]]] += class_sizes[ci]
    # per-element commutator count c(z), constant on classes
    c_elem = []
    for cls in range(ncls):
        total, size = big_n[cls], class_sizes[cls]
        assert total % size == 0
        c_elem.append(total // size)
    return {
        "elems": elems, "index": index, "mul": mul, "inv": inv,
        "class_of": class_of, "class_sizes": class_sizes,
        "class_reps": class_reps, "c_elem": c_elem,
    }


def _class_matrix(spec: FiniteFieldSpec, kind, val):
    q = spec.q
    if kind == "split":
        if val % q in (0,):
            raise OracleError("eigenvalue must be invertible")
        return (val % q, 0, 0, pow(val, -1, q))
    # companion matrix of x^2 - t x + 1
    return (0, (q - 1) % q, 1, val % q)


def _commutator_counts(data, genus, target_idx):
    """#{(x_1,y_1,..,x_g,y_g) : prod [x_i,y_i] = target}."""
    c = data["c_elem"]
    cls = data["class_of"]
    if genus == 0:
        ident = data["index"][(1, 0, 0, 1)]
        return 1 if target_idx == ident else 0
    if genus == 1:
        return c[cls[target_idx]]
    mul, inv, index = data["mul"], data["inv"], data["index"]
    target = data["elems"][target_idx]
    total = 0
    for z in data["elems"]:
        rest = mul(inv(z), target)
        total += c[cls[index[z]]] * c[cls[index[rest]]]
    return total


def ff_count_rank1(spec: FiniteFieldSpec) -> Fraction:
    """Point-count ratio of a rank-1 character stack over F_q.

    Counts tuples solving the moment equation with the puncture classes and
    divides by the adjoint group order q(q^2 - 1); torus actions are free at
    generic eigenvalues, so the ratio is the exact stack count.
    """
    if not ff_generic(spec):
        raise OracleError("puncture eigenvalues are not generic")
    return ff_count_rank1_raw(spec)


def ff_count_rank1_raw(spec: FiniteFieldSpec) -> Fraction:
    """The counting core without the genericity gate (diagnostics only)."""
    q = spec.q
    data = _sl2_data(q)
    mul, inv, index = data["mul"], data["inv"], data["index"]
    mats = [_class_matrix(spec, *p) for p in spec.punctures]

    # all z_j range over their classes; by conjugation invariance the last
    # one is pinned to its representative and restored by a class-size factor
    fixed = mats[-1]
    fixed_size = data["class_sizes"][data["class_of"][index[fixed]]]
    classes = []
    for m in mats[:-1]:
        cls = data["class_of"][index[m]]
        classes.append([z for z, ci in zip(data["elems"], data["class_of"])
                        if ci == cls])

    budget = (q ** 4) ** max(1, len(classes))
    if budget > 10 ** 8:
        raise OracleError("enumeration budget exceeded")

    total = 0

    def rec(i, acc):
        nonlocal total
        if i == len(classes):
            target = inv(mul(acc, fixed))
            total += _commutator_counts(data, spec.genus, index[target])
            return
        for z in classes[i]:
            rec(i + 1, mul(acc, z))

    rec(0, (1, 0, 0, 1))
    return Fraction(total * fixed_size, q * (q * q - 1))
