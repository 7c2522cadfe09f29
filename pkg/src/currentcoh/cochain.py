"""Relative Chevalley-Eilenberg cochains in coordinates.

Suspended generators ``xi^(a, m)`` pair a basis index ``a`` of g with a
non-unit monomial ``m`` of A; their parity is ``|m| + 1``.  A super-monomial
is stored as the sorted tuple of generator ids (even generators may repeat,
odd ones may not).  Generator ids are global for a given algebra:
``id = monomial_index * dim(g) + a`` in the order of a growing monomial table.
"""
from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import exactla
from .liealg import LieAlgebraData
from .superspace import AMonomial, factorizations, letter_multisets

SuperMonomial = tuple  # sorted tuple of generator ids


@dataclass(frozen=True)
class Generator:
    g_index: int
    monomial: AMonomial

    @property
    def parity(self) -> int:
        return (self.monomial.theta_count + 1) & 1

    @property
    def multidegree(self) -> tuple[int, int, int, int, int]:
        return self.monomial.degree


class GeneratorTable:
    """Numbering of generators and their differentials for one algebra."""

    def __init__(self, g: LieAlgebraData):
        self.g = g
        self.D = g.dim
        self.monomials: list[AMonomial] = []
        self.mono_index: dict[AMonomial, int] = {}
        self._d: dict[int, list[tuple[Fraction, int, int]]] = {}

    def mono_id(self, m: AMonomial) -> int:
        i = self.mono_index.get(m)
        if i is None:
            i = len(self.monomials)
            self.monomials.append(m)
            self.mono_index[m] = i
        return i

    def gid(self, a: int, m: AMonomial) -> int:
        return self.mono_id(m) * self.D + a

    def generator(self, gid: int) -> Generator:
        return Generator(gid % self.D, self.monomials[gid // self.D])

    def parity(self, gid: int) -> int:
        return (self.monomials[gid // self.D].theta_count + 1) & 1

    def d_generator(self, gid: int) -> list[tuple[Fraction, int, int]]:
        """d xi as a list of (coeff, id1, id2) meaning coeff * xi_id1 xi_id2 (unordered)."""
        cached = self._d.get(gid)
        if cached is not None:
            return cached
        c = gid % self.D
        m2 = self.monomials[gid // self.D]
        terms: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        sc = self.g.structure_constants
        for s, m, mp in factorizations(m2):
            eps = -s if (m.parity * (mp.parity + 1)) & 1 else s
            for a in range(self.D):
                for b in range(self.D):
                    for cc, f in sc.get((a, b), ()):
                        if cc == c:
                            # Q xi^c = 1/2 sum eps f_ab^c xi^(a,m) xi^(b,m'), and d = -Q
                            terms[(self.gid(a, m), self.gid(b, mp))] -= Fraction(eps) * f / 2
        out = [(v, i, j) for (i, j), v in terms.items() if v]
        self._d[gid] = out
        return out


_TABLES: dict[int, GeneratorTable] = {}


def generator_table(g: LieAlgebraData) -> GeneratorTable:
    t = _TABLES.get(id(g))
    if t is None or t.g is not g:
        t = GeneratorTable(g)
        _TABLES[id(g)] = t
    return t


def normal_order(seq: Sequence[int], table: GeneratorTable) -> tuple[int, SuperMonomial | None]:
    """Sort a product of generators with its Koszul sign; zero if an odd generator repeats."""
    odd = [x for x in seq if table.parity(x)]
    inv = 0
    for i in range(len(odd)):
        for j in range(i + 1, len(odd)):
            if odd[i] > odd[j]:
                inv += 1
            elif odd[i] == odd[j]:
                return 0, None
    return (-1 if inv & 1 else 1), tuple(sorted(seq))


class Cochain:
    """Sparse combination of normal-ordered super-monomials."""

    __slots__ = ("g", "terms")

    def __init__(self, g: LieAlgebraData, terms: Mapping[SuperMonomial, object] | None = None):
        self.g = g
        self.terms: dict[SuperMonomial, object] = {k: v for k, v in (terms or {}).items() if v}

    @property
    def table(self) -> GeneratorTable:
        return generator_table(self.g)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Cochain") -> "Cochain":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Cochain(self.g, out)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-1)

    def scale(self, c) -> "Cochain":
        return Cochain(self.g, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "Cochain") -> "Cochain":
        t = self.table
        out: dict[SuperMonomial, object] = defaultdict(int)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                s, key = normal_order(k1 + k2, t)
                if s:
                    out[key] += s * v1 * v2
        return Cochain(self.g, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Cochain) and self.g is other.g and self.terms == other.terms

    def mod(self, P: int) -> "Cochain":
        return Cochain(self.g, {k: exactla.to_mod(v, P) for k, v in self.terms.items()})

    def sectors(self) -> set[tuple[int, tuple[int, ...]]]:
        t = self.table
        out = set()
        for k in self.terms:
            deg = [0] * 5
            for x in k:
                for j, y in enumerate(t.generator(x).multidegree):
                    deg[j] += y
            out.add((len(k), tuple(deg)))
        return out

    def sector(self) -> tuple[int, tuple[int, ...]]:
        s = self.sectors()
        if len(s) != 1:
            raise ValueError(f"cochain is not homogeneous: {sorted(s)}")
        return next(iter(s))

    def to_json(self) -> list[dict]:
        t = self.table
        out = []
        for k in sorted(self.terms):
            gens = [t.generator(x) for x in k]
            out.append({
                "monomial": [[gen.g_index, [gen.monomial.zp, gen.monomial.zm, gen.monomial.mask]] for gen in gens],
                "coeff": str(self.terms[k]),
            })
        return out

    @classmethod
    def from_json(cls, g: LieAlgebraData, data: str | list) -> "Cochain":
        if isinstance(data, str):
            data = json.loads(data)
        t = generator_table(g)
        terms: dict[SuperMonomial, object] = defaultdict(int)
        for item in data:
            seq = [t.gid(a, AMonomial(*code)) for a, code in item["monomial"]]
            s, key = normal_order(seq, t)
            if s:
                terms[key] += s * Fraction(item["coeff"])
        return cls(g, terms)


def differential(c: Cochain, P: int | None = None) -> Cochain:
    """d as an odd derivation extended from the generator rule (mod ``P`` if given)."""
    t = c.table
    out: dict[SuperMonomial, object] = defaultdict(int)
    for key, coeff in c.terms.items():
        sign = 1
        for i, x in enumerate(key):
            for v, a, b in t.d_generator(x):
                s, nk = normal_order(key[:i] + (a, b) + key[i + 1:], t)
                if s:
                    out[nk] += sign * s * v * coeff
            if t.parity(x):
                sign = -sign
    if P is not None:
        return Cochain(c.g, {k: exactla.to_mod(v, P) for k, v in out.items() if exactla.to_mod(v, P)})
    return Cochain(c.g, out)


def g_action(a: int, c: Cochain) -> Cochain:
    """Coadjoint action of ``T_a`` (an even derivation): T_a xi^(c,m) = -sum_b f_ab^c xi^(b,m)."""
    t = c.table
    g = c.g
    # transpose of the structure constants: for each target c, the (b, f) with f_ab^c
    inv: dict[int, list[tuple[int, Fraction]]] = defaultdict(list)
    for b in range(g.dim):
        for cc, f in g.structure_constants.get((a, b), ()):
            inv[cc].append((b, f))
    out: dict[SuperMonomial, object] = defaultdict(int)
    for key, coeff in c.terms.items():
        for i, x in enumerate(key):
            cidx = x % t.D
            base = x - cidx
            for b, f in inv.get(cidx, ()):
                s, nk = normal_order(key[:i] + (base + b,) + key[i + 1:], t)
                if s:
                    out[nk] -= s * f * coeff
    return Cochain(g, out)


def enumerate_basis(g: LieAlgebraData, p: int, n: Sequence[int], weight_zero: bool = False) -> list[SuperMonomial]:
    """Normal-ordered super-monomials of word length ``p`` and multidegree ``n``."""
    if p > sum(n) or p < 0:
        return []
    t = generator_table(g)
    D = g.dim
    out: list[SuperMonomial] = []
    for content in letter_multisets(n, p):
        choices = []
        for m, k in content:
            odd_gen = (m.theta_count + 1) & 1
            base = t.mono_id(m) * D
            it = itertools.combinations(range(D), k) if odd_gen else itertools.combinations_with_replacement(range(D), k)
            choices.append([tuple(base + a for a in combo) for combo in it])
        for pick in itertools.product(*choices):
            key = tuple(sorted(x for part in pick for x in part))
            if weight_zero and any(_weight(g, key, D)):
                continue
            out.append(key)
    out.sort()
    return out


def _weight(g: LieAlgebraData, key: SuperMonomial, D: int) -> tuple[int, ...]:
    # generators carry the dual (negative) weight; only vanishing matters here
    w = [0] * len(g.weights[0]) if g.weights and g.weights[0] else []
    for x in key:
        for j, y in enumerate(g.weights[x % D]):
            w[j] += y
    return tuple(w)


def weight_of(g: LieAlgebraData, key: SuperMonomial) -> tuple[int, ...]:
    return _weight(g, key, g.dim)


def relative_invariants(g: LieAlgebraData, p: int, n: Sequence[int], P: int | None = None, full: bool = False) -> list[Cochain]:
    """Basis of invariant cochains in sector ``(p, n)``.

    Weight-zero cochains killed by the simple raising operators.  With
    ``full=True`` the kernel of every basis action is used instead (oracle).
    Coefficients are rationals, or residues mod ``P``.
    """
    if p > sum(n):
        return []
    if p == 0:
        return [Cochain(g, {(): 1})] if not any(n) else []
    basis = enumerate_basis(g, p, n, weight_zero=not full)
    if not basis:
        return []
    index = {k: i for i, k in enumerate(basis)}
    ops = range(g.dim) if full else g.simple_raising
    # equations: rows are (operator, image monomial), columns are basis elements
    row_ids: dict[tuple[int, SuperMonomial], int] = {}
    entries = []
    for j, key in enumerate(basis):
        c = Cochain(g, {key: 1})
        for a in ops:
            for img, v in g_action(a, c).terms.items():
                r = row_ids.setdefault((a, img), len(row_ids))
                entries.append((r, j, v))
    M = exactla.SparseMatrix.from_entries(max(len(row_ids), 1), len(basis), entries)
    vecs = exactla.nullspace_basis(M, P)
    return [Cochain(g, {basis[j]: v for j, v in vec.items()}) for vec in vecs]


def d_matrix(g: LieAlgebraData, src: Sequence[SuperMonomial], dst_index: Mapping[SuperMonomial, int] | None = None) -> tuple[exactla.SparseMatrix, list[SuperMonomial]]:
    """Matrix of d from the monomials ``src`` (rows) to target monomials (columns)."""
    targets: dict[SuperMonomial, int] = dict(dst_index) if dst_index else {}
    rows = []
    for key in src:
        img = differential(Cochain(g, {key: 1}))
        row = {}
        for k, v in img.terms.items():
            j = targets.setdefault(k, len(targets))
            row[j] = v
        rows.append(row)
    order = sorted(targets, key=targets.get)
    return exactla.SparseMatrix.from_rows(rows, len(order)), order


def cochains_to_rows(cs: Iterable[Cochain], index: dict[SuperMonomial, int], P: int) -> list[dict[int, int]]:
    rows = []
    for c in cs:
        row = {}
        for k, v in c.terms.items():
            x = exactla.to_mod(v, P)
            if x:
                row[index.setdefault(k, len(index))] = x
        rows.append(row)
    return rows
