"""Invariants of the super-commuting scheme and the Cartan restriction.

Coordinates are three even g-valued functions ``x1, x2, x3`` and two odd ones
``psi+, psi-``; a multidegree ``n`` gives ``psi+`` degree ``n[0]``, ``psi-``
degree ``n[1]`` and ``x_i`` degree ``n[2 + i]``.  The coordinate ring is
taken modulo all super-brackets of pairs of coordinates.

Internally the coordinates are encoded by the first-derivative letters of
``traceform`` (``x_i`` as ``Psi_{t_i}`` and ``psi+-`` as ``Psi_{z+-}``), which
have the right parities.  Only evaluation and trace bookkeeping is shared
with the cochain side: the quotient here is by relations, never by ``d``.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import cochain as ch
from . import exactla, kernels
from .liealg import CartanPoly, LieAlgebraData, LieAlgebraSpec, build_algebra, cartan_poly_mul, weyl_orbit_average
from .superspace import AMonomial, as_multidegree
from .tracecoh import min_trace_length, supports_traces
from .traceform import Points, Product, TraceForm, canon_product, letter_parity, spanning_products

PSI_P = AMonomial(1, 0, 0)
PSI_M = AMonomial(0, 1, 0)
X = (AMonomial(0, 0, 1), AMonomial(0, 0, 2), AMonomial(0, 0, 4))
COORDINATES = (PSI_P, PSI_M) + X
NAMES = {PSI_P: "psi+", PSI_M: "psi-", X[0]: "x1", X[1]: "x2", X[2]: "x3"}


def _spec(g) -> LieAlgebraData:
    if isinstance(g, LieAlgebraData):
        return g
    return build_algebra(LieAlgebraSpec.parse(g) if isinstance(g, str) else g)


def content_of(n: Sequence[int]) -> tuple[tuple[AMonomial, int], ...]:
    n = as_multidegree(n)
    pairs = [(m, k) for m, k in zip(COORDINATES, n) if k]
    return tuple(sorted(pairs, key=lambda mk: (mk[0].zp, mk[0].zm, mk[0].mask)))


def is_first_derivative(m: AMonomial) -> bool:
    return m in COORDINATES


# --- relation spanning set -------------------------------------------------------


def relation_forms(products: Sequence[Product]) -> list[TraceForm]:
    """Trace forms Tr(W1 [a, b] W2) * (other traces) built from ``products``.

    Every invariant in the relation ideal is a combination of these.
    """
    out: list[TraceForm] = []
    seen: set = set()
    for prod in products:
        for t, tr in enumerate(prod):
            k = len(tr)
            if k < 3:
                continue  # Tr([a,b]) = 0 and Tr([a,b] c) needs a third letter
            for i in range(k):
                j = (i + 1) % k
                a, b = tr[i], tr[j]
                if a == b and not letter_parity(a):
                    continue
                if j == 0:
                    # rotate so the pair is interior; rotation sign is irrelevant for spans
                    tr_rot = tr[i:] + tr[:i]
                    i, j = 0, 1
                else:
                    tr_rot = tr
                swapped = tr_rot[:i] + (tr_rot[j], tr_rot[i]) + tr_rot[j + 1:]
                s = -1 if letter_parity(a) and letter_parity(b) else 1
                f = TraceForm.from_product(prod[:t] + (tr_rot,) + prod[t + 1:]) - TraceForm.from_product(
                    prod[:t] + (swapped,) + prod[t + 1:]
                ).scale(s)
                key = tuple(sorted(f.terms.items(), key=repr))
                if f and key not in seen:
                    seen.add(key)
                    out.append(f)
    return out


def _rank_forms(pts: Points, forms: Sequence[TraceForm | Product]) -> tuple[int, list[int]]:
    if not forms:
        return 0, []
    M = pts.eval_matrix(forms)
    r, rows, _ = kernels.rank_mod(M, pts.P)
    return r, rows


@dataclass
class SchemeSector:
    algebra: str
    n: tuple[int, ...]
    ambient_basis: list[Product]
    dim_ambient_invariants: int
    dim_relation_invariants: int
    primes: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.dim_ambient_invariants - self.dim_relation_invariants


def _points(g: LieAlgebraData, n, R: int, P: int, seed: int) -> Points:
    slots = {m: (k if letter_parity(m) else 1) for m, k in content_of(n)}
    return Points(g, slots, R, P, seed=[seed, 11, *n])


def invariants_supercommuting(g, n: Sequence[int], primes: Sequence[int] | None = None, seed: int = 0) -> SchemeSector:
    """dim of the G-invariants of the scheme's coordinate ring in multidegree ``n``."""
    g = _spec(g)
    n = as_multidegree(n)
    if not supports_traces(g):
        return invariants_supercommuting_coordinates(g, n)
    primes = tuple(primes) if primes else exactla.DEFAULT_PRIMES
    content = content_of(n)
    if not content:
        return SchemeSector(g.spec.name, n, [()], 1, 0, primes)
    if any(letter_parity(m) and k > g.dim for m, k in content):
        return SchemeSector(g.spec.name, n, [], 0, 0, primes)
    cands = spanning_products(content, min_trace_length(g))
    rels = relation_forms(spanning_products(content, 1))
    results = []
    for P in primes:
        R = min(len(cands), 24) if cands else 1
        while True:
            pts = _points(g, n, R, P, seed)
            ra, rows = _rank_forms(pts, cands)
            if ra < R or R >= len(cands):
                break
            R = min(2 * R, len(cands))
        rr, _ = _rank_forms(_points(g, n, max(ra, 1) + 4, P, seed + 1), rels) if ra else (0, [])
        results.append((ra, rr, [cands[i] for i in rows]))
    if len({(a, b) for a, b, _ in results}) != 1:
        raise exactla.ArithmeticDisagreement(f"scheme invariants disagree across primes {primes}")
    ra, rr, basis = results[0]
    return SchemeSector(g.spec.name, n, basis, ra, rr, primes)


def invariants_supercommuting_coordinates(g, n: Sequence[int], P: int | None = None) -> SchemeSector:
    """Coordinate-level computation (small sectors): quotient of invariants by relation invariants."""
    g = _spec(g)
    n = as_multidegree(n)
    P = P or exactla.DEFAULT_PRIMES[0]
    top = sum(n)
    t = ch.generator_table(g)
    inv = ch.relative_invariants(g, top, n, P)
    if not inv:
        return SchemeSector(g.spec.name, n, [], 0, 0, (P,))
    # relation span: lambda_c([y, z]) times every monomial of complementary degree
    rel_rows: list[dict] = []
    index: dict = {}
    for i, y in enumerate(COORDINATES):
        for z in COORDINATES[i:]:
            rest = list(n)
            for m in (y, z):
                rest[COORDINATES.index(m)] -= 1
            if min(rest) < 0 or (y == z and not letter_parity(y)):
                continue
            rel = {}
            for c in range(g.dim):
                terms: dict = defaultdict(int)
                for (a, b), consts in g.structure_constants.items():
                    for cc, f in consts:
                        if cc == c:
                            s, key = ch.normal_order((t.gid(a, y), t.gid(b, z)), t)
                            if s:
                                terms[key] += s * f
                rel[c] = ch.Cochain(g, terms)
            others = ch.enumerate_basis(g, top - 2, rest) if sum(rest) else [()]
            for c, r in rel.items():
                if not r:
                    continue
                for mono in others:
                    prod = r * ch.Cochain(g, {mono: 1})
                    row = {}
                    for k, v in prod.terms.items():
                        x = exactla.to_mod(v, P)
                        if x:
                            row[index.setdefault(k, len(index))] = x
                    if row:
                        rel_rows.append(row)
    inv_rows = ch.cochains_to_rows(inv, index, P)
    r_rel = exactla.rank_mod_sparse(rel_rows, P)
    r_sum = exactla.rank_mod_sparse(rel_rows + inv_rows, P)
    dim_int = r_rel + len(inv) - r_sum
    return SchemeSector(g.spec.name, n, [], len(inv), dim_int, (P,))


# --- Cartan side -------------------------------------------------------------------


def _diag_forms(g: LieAlgebraData) -> dict[AMonomial, list[CartanPoly]]:
    """Diagonal entries of each coordinate restricted to the Cartan subalgebra."""
    r = g.cartan_rank
    D = g.cartan_diagonal
    out: dict[AMonomial, list[CartanPoly]] = {}
    for copy, m in enumerate(X):
        entries = []
        for k in range(g.N):
            poly: CartanPoly = {}
            for l in range(r):
                if D[k, l]:
                    ex = [0] * (3 * r)
                    ex[copy * r + l] = 1
                    poly[(tuple(ex), ())] = int(D[k, l])
            entries.append(poly)
        out[m] = entries
    for a, m in enumerate((PSI_P, PSI_M)):
        entries = []
        for k in range(g.N):
            poly = {}
            for l in range(r):
                if D[k, l]:
                    poly[(tuple([0] * (3 * r)), (a * r + l,))] = int(D[k, l])
            entries.append(poly)
        out[m] = entries
    return out


def _poly_add(f: CartanPoly, h: CartanPoly, c=1) -> CartanPoly:
    out = dict(f)
    for k, v in h.items():
        out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


def restrict_product(g: LieAlgebraData, prod: Product, diag=None) -> CartanPoly:
    diag = diag or _diag_forms(g)
    r = g.cartan_rank
    one: CartanPoly = {(tuple([0] * (3 * r)), ()): 1}
    total = one
    for tr in prod:
        tr_val: CartanPoly = {}
        for k in range(g.N):
            term = one
            for m in tr:
                if m not in diag:
                    raise ValueError(f"letter {m.label()} is not a scheme coordinate")
                term = cartan_poly_mul(term, diag[m][k])
                if not term:
                    break
            tr_val = _poly_add(tr_val, term)
        total = cartan_poly_mul(total, tr_val)
        if not total:
            break
    return total


def restrict_form(g, form: TraceForm) -> CartanPoly:
    """Exact restriction of a top-degree trace form to Cartan-valued coordinates."""
    g = _spec(g)
    diag = _diag_forms(g)
    out: CartanPoly = {}
    for prod, c in form.terms.items():
        out = _poly_add(out, restrict_product(g, prod, diag), c)
    return out


def cartan_monomials(g: LieAlgebraData, n: Sequence[int]) -> list[tuple]:
    import itertools

    r = g.cartan_rank
    n = as_multidegree(n)

    def comps(total: int) -> list[tuple[int, ...]]:
        if r == 0:
            return [()] if total == 0 else []
        return [c for c in itertools.product(range(total + 1), repeat=r) if sum(c) == total]

    u_parts = [comps(n[2 + i]) for i in range(3)]
    eta_parts = [list(itertools.combinations(range(a * r, a * r + r), n[a])) for a in range(2)]
    out = []
    for u1 in u_parts[0]:
        for u2 in u_parts[1]:
            for u3 in u_parts[2]:
                for e1 in eta_parts[0]:
                    for e2 in eta_parts[1]:
                        out.append((u1 + u2 + u3, e1 + e2))
    return out


@dataclass
class CartanSector:
    algebra: str
    n: tuple[int, ...]
    dim: int
    basis: list[CartanPoly] = field(default_factory=list)


def cartan_invariants(g, n: Sequence[int]) -> CartanSector:
    """W-invariant polynomials on the Cartan superspace in multidegree ``n``."""
    g = _spec(g)
    n = as_multidegree(n)
    monos = cartan_monomials(g, n)
    avgs = []
    keys: dict = {}
    rows = []
    for mono in monos:
        f = weyl_orbit_average(g, {mono: 1})
        if not f:
            continue
        row = {keys.setdefault(k, len(keys)): v for k, v in f.items()}
        rows.append(row)
        avgs.append(f)
    M = exactla.SparseMatrix.from_rows(rows, max(len(keys), 1))
    piv = exactla._echelon_q([dict(r) for r in M.data.values()])
    # independent averages: pick rows greedily
    basis = []
    acc: list[dict] = []
    for f, row in zip(avgs, rows):
        if len(exactla._echelon_q(acc + [row])) > len(acc):
            acc.append(row)
            basis.append(f)
    assert len(basis) == len(piv)
    return CartanSector(g.spec.name, n, len(basis), basis)


@dataclass
class RestrictionReport:
    algebra: str
    n: tuple[int, ...]
    dim_scheme_invariants: int
    dim_cartan_invariants: int
    rank_restriction: int
    dim_kernel: int

    def to_json(self) -> dict:
        return {
            "g": self.algebra,
            "n": list(self.n),
            "dim_scheme_invariants": self.dim_scheme_invariants,
            "dim_cartan_invariants": self.dim_cartan_invariants,
            "rank_restriction": self.rank_restriction,
            "dim_kernel": self.dim_kernel,
        }


def restriction_matrix(g, n: Sequence[int], sector: SchemeSector | None = None) -> tuple[exactla.SparseMatrix, list[tuple]]:
    """Rows: ambient invariant basis; columns: Cartan monomials; exact entries."""
    g = _spec(g)
    sector = sector or invariants_supercommuting(g, n)
    diag = _diag_forms(g)
    keys: dict = {}
    rows = []
    for prod in sector.ambient_basis:
        f = restrict_product(g, prod, diag)
        rows.append({keys.setdefault(k, len(keys)): v for k, v in f.items()})
    return exactla.SparseMatrix.from_rows(rows, len(keys)), sorted(keys, key=keys.get)


def non_cartan_kernel(g, n: Sequence[int], primes: Sequence[int] | None = None) -> RestrictionReport:
    """dim ker(res) on the scheme invariants of multidegree ``n``.

    The restriction kills every relation, so its rank on the ambient
    invariants equals its rank on the quotient.
    """
    g = _spec(g)
    n = as_multidegree(n)
    sector = invariants_supercommuting(g, n, primes)
    if not sector.ambient_basis and sector.dim:
        raise ValueError("restriction needs the trace realization of the invariants")
    M, _ = restriction_matrix(g, n, sector)
    rk = exactla.rank(M, primes).rank if M.rows else 0
    cart = cartan_invariants(g, n).dim
    return RestrictionReport(g.spec.name, n, sector.dim, cart, rk, sector.dim - rk)
