"""Sector cohomology through trace forms and random evaluation.

For gl_n, sl_n, so_(2k+1) and sp_2k every invariant cochain is a combination
of products of traces of words in the letters ``Psi_m``.  Within a sector
``(q, n)`` the invariant space splits over letter contents; a basis of each
piece is extracted from the spanning products by evaluating them at random
points modulo a prime.  The rank of ``d`` is the rank of ``Q`` applied to that
basis, evaluated at points of the next sector.

All ranks are exact modulo the chosen prime at the chosen points and can
only undershoot the true value; agreement over independent primes and
points is the (probabilistic) certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .liealg import LieAlgebraData
from .superspace import canonical_multidegree
from .traceform import (
    Points,
    Product,
    TraceForm,
    apply_Q,
    sector_contents,
    slots_for_contents,
    spanning_products,
)

RANK_MARGIN = 4


def supports_traces(g: LieAlgebraData) -> bool:
    """Whether products of traces span all invariants of ``g``."""
    s = g.spec
    return s.series in ("GL", "SL", "SP") or (s.series == "SO" and s.size % 2 == 1)


def min_trace_length(g: LieAlgebraData) -> int:
    return 1 if g.spec.series == "GL" else 2


def _content_seed(content) -> list[int]:
    out = []
    for m, k in content:
        out.extend((m.zp, m.zm, m.mask, k))
    return out


def invariant_basis(g: LieAlgebraData, q: int, n: Sequence[int], P: int, seed: int = 0) -> list[Product]:
    """Trace products forming a basis of the invariant cochains in ``(q, n)``."""
    if q > sum(n):
        return []
    if q == 0:
        return [()] if not any(n) else []
    out: list[Product] = []
    for content in sector_contents(n, q, g.dim):
        cands = spanning_products(content, min_trace_length(g))
        if not cands:
            continue
        slots = slots_for_contents([content])
        R = min(len(cands), 24)
        while True:
            pts = Points(g, slots, R, P, seed=[seed, 1, q, *n, *_content_seed(content)])
            M = pts.eval_matrix(cands)
            r, rows, _ = kernels.rank_mod(M, P)
            if r < R or R >= len(cands):
                break
            R = min(2 * R, len(cands))
        out.extend(cands[i] for i in rows)
    return out


@dataclass
class TraceSectorResult:
    n: tuple[int, ...]
    dims: dict[int, int] = field(default_factory=dict)  # q -> dim invariants
    ranks: dict[int, int] = field(default_factory=dict)  # q -> rank of d out of q
    bases: dict[int, list[Product]] = field(default_factory=dict)

    def dim_H(self, q: int) -> int:
        return self.dims.get(q, 0) - self.ranks.get(q, 0) - self.ranks.get(q - 1, 0)


def sector_points(g: LieAlgebraData, q: int, n: Sequence[int], R: int, P: int, seed: int, tag: int = 2) -> Points:
    contents = sector_contents(n, q, g.dim)
    return Points(g, slots_for_contents(contents), R, P, seed=[seed, tag, q, *n])


def d_rank(g: LieAlgebraData, basis: Sequence[Product], q: int, n: Sequence[int], dim_next: int, P: int, seed: int = 0) -> int:
    """Rank of d on the span of ``basis`` (sector q), evaluated in sector q + 1."""
    if not basis or not dim_next:
        return 0
    R = min(len(basis), dim_next) + RANK_MARGIN
    pts = sector_points(g, q + 1, n, R, P, seed)
    M = np.zeros((len(basis), R), dtype=np.uint64)
    for i, b in enumerate(basis):
        M[i] = pts.eval_form(apply_Q(TraceForm({b: 1})))
    return kernels.rank_mod(M, P)[0]


def sector_cohomology(g: LieAlgebraData, n: Sequence[int], P: int, seed: int = 0, qs: Sequence[int] | None = None) -> TraceSectorResult:
    """Invariant dimensions and d ranks for the requested word lengths (all by default)."""
    n = tuple(n)
    top = sum(n)
    wanted = sorted(set(qs)) if qs is not None else list(range(top + 1))
    need_basis = set()
    for q in wanted:
        need_basis.update(x for x in (q - 1, q, q + 1) if 0 <= x <= top)
    res = TraceSectorResult(n)
    for q in sorted(need_basis):
        res.bases[q] = invariant_basis(g, q, n, P, seed)
        res.dims[q] = len(res.bases[q])
    need_rank = set()
    for q in wanted:
        need_rank.update(x for x in (q - 1, q) if 0 <= x < top)
    for q in sorted(need_rank):
        if q + 1 in res.dims:
            res.ranks[q] = d_rank(g, res.bases[q], q, n, res.dims[q + 1], P, seed)
    return res


def canonical_sector(n: Sequence[int]) -> tuple[int, ...]:
    return canonical_multidegree(n)
