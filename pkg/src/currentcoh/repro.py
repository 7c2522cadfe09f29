"""Reproduction checks: each returns a :class:`CriterionResult`.

Heavy checks take an ``extended`` flag; without it they run a reduced
budget and say so in their detail string.
"""
from __future__ import annotations

import itertools
import json
import os
import random
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import classes, engine, exactla, schemes
from .cochain import Cochain, d_matrix, differential, enumerate_basis
from .liealg import LieAlgebraSpec, build_algebra
from .superspace import Q_CHARGE, canonical_multidegree, charges
from .tracecoh import invariant_basis
from .traceform import TraceForm, apply_Q, expand

EXTENDED_ENV = "CURRENTCOH_EXTENDED"


def extended_enabled() -> bool:
    return os.environ.get(EXTENDED_ENV, "") not in ("", "0")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    skipped: bool = False
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return f"[{tag}] criterion {self.number}: {self.title} -- {self.detail} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, "skipped": self.skipped, "detail": self.detail, "data": self.data}


def _sectors(max_total: int, canonical: bool) -> list[tuple[int, ...]]:
    ns = [n for n in itertools.product(range(max_total + 1), repeat=5) if 1 <= sum(n) <= max_total]
    if canonical:
        ns = sorted({canonical_multidegree(n) for n in ns})
    return ns


def _compose_zero(A: exactla.SparseMatrix, B: exactla.SparseMatrix) -> bool:
    for row in A.data.values():
        acc: dict[int, Fraction] = {}
        for j, v in row.items():
            for k, w in B.data.get(j, {}).items():
                acc[k] = acc.get(k, 0) + v * w
        if any(acc.values()):
            return False
    return True


def check_d_squared(extended: bool = False, random_cochains: int = 200, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    sectors = _sectors(4, canonical=not extended)
    checked = 0
    for name in ("sl2", "sl3", "so5", "sp4"):
        g = build_algebra(LieAlgebraSpec.parse(name))
        for n in sectors:
            prev = None
            for p in range(sum(n), 0, -1):
                src = enumerate_basis(g, p, n)
                dst = enumerate_basis(g, p + 1, n)
                D, _ = d_matrix(g, src, {k: i for i, k in enumerate(dst)})
                if prev is not None and not _compose_zero(D, prev):
                    return CriterionResult(1, "d^2 = 0", False, f"{name} n={n} p={p}", time.perf_counter() - t0)
                checked += len(src)
                prev = D
    rng = random.Random(seed)
    for _ in range(random_cochains):
        g = build_algebra(LieAlgebraSpec.parse(rng.choice(["sl2", "sl3", "so5", "sp4", "gl3", "so3"])))
        while True:
            n = tuple(rng.randint(0, 2) for _ in range(5))
            if 5 <= sum(n) <= 7:
                break
        p = rng.randint(2, min(4, sum(n) - 1))
        basis = enumerate_basis(g, p, n)
        if not basis:
            continue
        picks = rng.sample(basis, min(4, len(basis)))
        c = Cochain(g, {k: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for k in picks})
        if differential(differential(c)):
            return CriterionResult(1, "d^2 = 0", False, f"random cochain on {g.spec.name} n={n}", time.perf_counter() - t0)
    scope = "all sectors" if extended else "symmetry representatives"
    return CriterionResult(1, "d^2 = 0", True, f"{checked} basis cochains ({scope}) + {random_cochains} random", time.perf_counter() - t0)


def check_q_vs_d(samples: int = 20, seed: int = 1) -> CriterionResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    done = 0
    while done < samples:
        name = rng.choice(["sl2", "so5", "sp4", "gl2"])
        g = build_algebra(LieAlgebraSpec.parse(name))
        n = tuple(rng.randint(0, 2) for _ in range(5))
        if not 2 <= sum(n) <= 4:
            continue
        p = rng.randint(1, sum(n) - 1)
        basis = invariant_basis(g, p, n, exactla.DEFAULT_PRIMES[0])
        if not basis:
            continue
        form = TraceForm({b: rng.randint(-3, 3) or 1 for b in rng.sample(basis, min(3, len(basis)))})
        lhs = expand(apply_Q(form), g)
        rhs = differential(expand(form, g)).scale(-1)
        if (lhs - rhs):
            return CriterionResult(2, "Q = -d", False, f"{name} p={p} n={n}", time.perf_counter() - t0)
        done += 1
    return CriterionResult(2, "Q = -d", True, f"{samples} sampled invariant cochains agree exactly", time.perf_counter() - t0)


def check_top_degree(extended: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    bad = []
    count = 0
    for name, bound in (("sl2", 4), ("so5", 3)):
        for n in _sectors(bound, canonical=True):
            top = sum(n)
            h = engine.dim_H(name, top, n).dim_H
            if name == "sl2":
                s = schemes.invariants_supercommuting_coordinates(name, n).dim
            else:
                s = schemes.invariants_supercommuting(name, n).dim
            count += 1
            if h != s:
                bad.append((name, n, h, s))
    detail = f"{count} sectors agree" if not bad else f"mismatches {bad[:3]}"
    return CriterionResult(3, "top degree = scheme invariants", not bad, detail, time.perf_counter() - t0)


def check_dense_oracle(max_total: int = 5) -> CriterionResult:
    t0 = time.perf_counter()
    bad = []
    count = 0
    for n in _sectors(max_total, canonical=True):
        reps = engine.sector_reports("sl2", n)
        for r in reps:
            o = engine.dim_H_dense_oracle("sl2", r.p, n)
            count += 1
            if o != r.dim_H:
                bad.append((r.p, n, r.dim_H, o))
    detail = f"{count} sl2 sectors agree" if not bad else f"mismatches {bad[:3]}"
    return CriterionResult(4, "modular pipeline = dense rational oracle", not bad, detail, time.perf_counter() - t0)


def check_sl2_saturation(extended: bool = False, level_budget: int = 16, progress: Callable | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    top = 23 if extended else level_budget
    rows = classes.fortuitous_sweep("sl2", top, progress=progress)
    bad = [r for r in rows if r["fortuitous_dim"] != 0]
    detail = f"levels 0..{top}: {len(rows)} nonzero cohomology sectors, fortuitous total {sum(r['fortuitous_dim'] for r in bad)}"
    return CriterionResult(5, "no sl2 fortuity below level 24", not bad, detail, time.perf_counter() - t0, data={"bad": bad[:10]})


def check_sl2_fortuitous(extended: bool = False) -> CriterionResult:
    if not extended:
        return CriterionResult(6, "sl2 fortuitous class at level 24", False, f"extended run (set {EXTENDED_ENV}=1)", skipped=True)
    t0 = time.perf_counter()
    n = (0, 0, 4, 4, 4)
    f = classes.fortuitous_dim("sl2", 7, n)
    rep = classes.verify_class(classes.builtin_representative("XiF_sl2"), "sl2", certify=True)
    ok = f >= 1 and rep.closed and rep.closed_certified and rep.exact is False and rep.fortuitous is True
    return CriterionResult(6, "sl2 fortuitous class at level 24", ok, f"fortuitous_dim={f}, report={rep.to_json()}", time.perf_counter() - t0)


def check_charges() -> CriterionResult:
    t0 = time.perf_counter()
    a = charges(8, (0, 0, 3, 3, 3))
    b = charges(8, (1, 1, 2, 2, 2))
    h = Fraction(1, 2)
    ok = (
        a.as_tuple() == (h, h, 5 * h, 5 * h, 5 * h)
        and b.as_tuple() == (0, 0, 3, 3, 3)
        and (b - a).as_tuple() == Q_CHARGE.as_tuple()
        and b.deg - a.deg == 1
    )
    return CriterionResult(7, "charge table", ok, f"{a.to_json()} / {b.to_json()}", time.perf_counter() - t0)


def check_so7_representatives(extended: bool = False) -> CriterionResult:
    if not extended:
        return CriterionResult(8, "so7 representatives", False, f"extended run (set {EXTENDED_ENV}=1)", skipped=True)
    t0 = time.perf_counter()
    nc = classes.verify_class(classes.builtin_representative("XiNC_so7"), "so7", check_exact=True, check_fortuitous=False)
    xf = classes.verify_class(classes.builtin_representative("XiF_so7"), "so7", check_exact=False, check_fortuitous=False)
    kern = schemes.non_cartan_kernel("so7", (1, 1, 2, 2, 2))
    ok = nc.closed and nc.cartan_restriction_zero is True and nc.exact is False and kern.dim_kernel >= 1 and xf.closed
    return CriterionResult(
        8,
        "so7 representatives",
        ok,
        f"XiNC closed={nc.closed} nonexact={nc.exact is False} cartan_zero={nc.cartan_restriction_zero}; "
        f"kernel={kern.dim_kernel}; XiF closed={xf.closed}",
        time.perf_counter() - t0,
    )


def check_langlands(extended: bool = False, cache_dir: str | None = None, progress: Callable | None = None) -> CriterionResult:
    if not extended:
        return CriterionResult(9, "so7 / sp6 mismatch at level 18", False, f"extended run (set {EXTENDED_ENV}=1)", skipped=True)
    t0 = time.perf_counter()
    cache = engine.ResultCache.from_env(cache_dir)
    m17 = engine.compare_langlands("so7", "sp6", 17, 17, cache=cache, progress=progress)
    m18 = engine.compare_langlands("so7", "sp6", 18, 18, cache=cache, progress=progress)
    got = sorted((m.p, m.n, m.difference) for m in m18)
    want = [(8, (0, 0, 3, 3, 3), 1), (8, (1, 1, 2, 2, 2), 1)]
    ok = not m17 and got == want
    return CriterionResult(9, "so7 / sp6 mismatch at level 18", ok, f"level 17: {len(m17)} mismatches; level 18: {got}", time.perf_counter() - t0)


def check_determinism() -> CriterionResult:
    t0 = time.perf_counter()
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for attempt in range(3):
            cache = engine.ResultCache(tmp if attempt else None)
            reps = engine.sector_reports("so5", (0, 1, 2, 1, 0), seed=7, cache=cache)
            if attempt == 1:
                # warm the cache, then read back from it
                reps = engine.sector_reports("so5", (0, 1, 2, 1, 0), seed=7, cache=engine.ResultCache(tmp))
            blobs.append(json.dumps([r.to_json() for r in reps], sort_keys=True))
        t = engine.level_table("sl2", 8, cache=engine.ResultCache(tmp), seed=7)
        u = engine.level_table("sl2", 8, seed=7)
        blobs_t = [json.dumps(x.to_json(), sort_keys=True) for x in (t, u)]
    ok = len(set(blobs)) == 1 and len(set(blobs_t)) == 1
    return CriterionResult(10, "determinism and cache coherence", ok, "fresh, cached and uncached JSON identical" if ok else "JSON differs", time.perf_counter() - t0)


def run_all(extended: bool | None = None, progress: Callable | None = None, cache_dir: str | None = None) -> list[CriterionResult]:
    ext = extended_enabled() if extended is None else extended
    checks = [
        lambda: check_d_squared(ext),
        check_q_vs_d,
        lambda: check_top_degree(ext),
        check_dense_oracle,
        lambda: check_sl2_saturation(ext),
        lambda: check_sl2_fortuitous(ext),
        check_charges,
        lambda: check_so7_representatives(ext),
        lambda: check_langlands(ext, cache_dir),
        check_determinism,
    ]
    out = []
    for c in checks:
        r = c()
        out.append(r)
        if progress:
            progress(r)
    return out
