"""Sector cohomology, level tables and Langlands-dual comparisons."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import cochain as ch
from . import exactla, tracecoh
from .liealg import LieAlgebraData, LieAlgebraSpec, build_algebra
from .superspace import (
    as_multidegree,
    canonical_multidegree,
    charges,
    letter_multisets,
    level,
    multidegrees_at_level,
)

CONVENTION_VERSION = 1
CACHE_ENV = "CURRENTCOH_CACHE_DIR"
BACKENDS = ("auto", "trace", "monomial")


def _spec(spec: LieAlgebraSpec | str) -> LieAlgebraSpec:
    return LieAlgebraSpec.parse(spec) if isinstance(spec, str) else spec


@dataclass
class SectorReport:
    algebra: str
    p: int
    n: tuple[int, ...]
    dim_cochain: int
    dim_invariant: int
    rank_d_out: int
    rank_d_in: int
    dim_H: int
    charge: tuple[str, ...]
    level: int
    primes: tuple[int, ...]
    backend: str
    wall_time: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        if self.dim_H != self.dim_invariant - self.rank_d_out - self.rank_d_in or self.dim_H < 0:
            raise exactla.ArithmeticDisagreement(f"inconsistent sector dimensions: {self}")

    def to_json(self, timings: bool = False) -> dict:
        d = asdict(self)
        d["n"] = list(self.n)
        d["charge"] = list(self.charge)
        d["primes"] = list(self.primes)
        if not timings:
            d.pop("wall_time")
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SectorReport":
        d = dict(d)
        d["n"] = tuple(d["n"])
        d["charge"] = tuple(d["charge"])
        d["primes"] = tuple(d["primes"])
        return cls(**d)


def dim_cochain(g: LieAlgebraData, p: int, n: Sequence[int]) -> int:
    """Dimension of the coordinate cochain space C^{p;n} (before invariants)."""
    if p > sum(n):
        return 0
    if p == 0:
        return 1 if not any(n) else 0
    D = g.dim
    total = 0
    for content in letter_multisets(n, p):
        prod = 1
        for m, k in content:
            odd_generator = (m.theta_count + 1) & 1
            prod *= math.comb(D, k) if odd_generator else math.comb(D + k - 1, k)
        total += prod
    return total


# --- cache -----------------------------------------------------------------------


class ResultCache:
    """Append-only JSON-lines store of sector reports."""

    def __init__(self, directory: str | os.PathLike | None):
        self.directory = Path(directory) if directory else None
        self._mem: dict[str, dict] | None = None

    @classmethod
    def from_env(cls, directory: str | None = None) -> "ResultCache":
        return cls(directory or os.environ.get(CACHE_ENV) or None)

    @property
    def path(self) -> Path | None:
        return self.directory / "sectors.jsonl" if self.directory else None

    @staticmethod
    def key(spec: LieAlgebraSpec, p: int, n: Sequence[int], primes: Sequence[int], backend: str, seed: int) -> str:
        h = hashlib.sha256(",".join(map(str, sorted(primes))).encode()).hexdigest()[:12]
        return f"{spec.series}|{spec.size}|{p}|{','.join(map(str, n))}|v{CONVENTION_VERSION}|{h}|{backend}|{seed}"

    def _load(self) -> dict[str, dict]:
        if self._mem is None:
            self._mem = {}
            if self.path and self.path.exists():
                with open(self.path) as fh:
                    for line in fh:
                        line = line.strip()
                        if line:
                            rec = json.loads(line)
                            self._mem[rec["key"]] = rec["report"]
        return self._mem

    def get(self, key: str) -> SectorReport | None:
        if not self.directory:
            return None
        rec = self._load().get(key)
        return SectorReport.from_json(rec) if rec else None

    def put_many(self, items: Iterable[tuple[str, SectorReport]]) -> None:
        if not self.directory:
            return
        mem = self._load()
        new = [(k, r) for k, r in items if k not in mem]
        if not new:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        old = self.path.read_text() if self.path.exists() else ""
        lines = [json.dumps({"key": k, "report": r.to_json()}, sort_keys=True) for k, r in new]
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".sectors-")
        with os.fdopen(fd, "w") as fh:
            fh.write(old)
            fh.write("".join(line + "\n" for line in lines))
        os.replace(tmp, self.path)
        for k, r in new:
            mem[k] = r.to_json()


# --- sector computations ---------------------------------------------------------


def _monomial_dims(g: LieAlgebraData, n: Sequence[int], qs: set[int], P: int) -> tuple[dict[int, int], dict[int, int]]:
    top = sum(n)
    need = sorted({x for q in qs for x in (q - 1, q, q + 1) if 0 <= x <= top})
    inv = {q: ch.relative_invariants(g, q, n, P) for q in need}
    ranks = {}
    for q in need:
        if q + 1 not in inv or q == top:
            continue
        idx: dict = {}
        rows = [r for r in (ch.cochains_to_rows([ch.differential(c, P)], idx, P)[0] for c in inv[q]) if r]
        ranks[q] = exactla.rank_mod_sparse(rows, P)
    return {q: len(v) for q, v in inv.items()}, ranks


def _one_prime(g: LieAlgebraData, n: tuple, qs: set[int], P: int, backend: str, seed: int):
    if backend == "trace":
        res = tracecoh.sector_cohomology(g, n, P, seed=seed, qs=sorted(qs))
        return res.dims, res.ranks
    return _monomial_dims(g, n, qs, P)


def resolve_backend(g: LieAlgebraData, backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "auto":
        return "trace" if tracecoh.supports_traces(g) else "monomial"
    if backend == "trace" and not tracecoh.supports_traces(g):
        raise ValueError(f"trace backend does not span the invariants of {g.spec.name}")
    return backend


def sector_reports(
    spec: LieAlgebraSpec | str,
    n: Sequence[int],
    ps: Sequence[int] | None = None,
    *,
    backend: str = "auto",
    primes: Sequence[int] | None = None,
    seed: int = 0,
    cache: ResultCache | None = None,
    use_symmetry: bool = True,
    retries: int = 2,
) -> list[SectorReport]:
    """Reports for word lengths ``ps`` (default: all 0..|n|) of multidegree ``n``."""
    spec = _spec(spec)
    n = as_multidegree(n)
    g = build_algebra(spec)
    backend = resolve_backend(g, backend)
    primes = tuple(primes) if primes else tuple(exactla.choose_primes(2, seed=seed))
    top = sum(n)
    ps = list(range(top + 1)) if ps is None else list(ps)
    cache = cache or ResultCache(None)

    out: dict[int, SectorReport] = {}
    todo = []
    for p in ps:
        if p < 0:
            raise ValueError("word length must be non-negative")
        if p > top:
            out[p] = SectorReport(spec.name, p, n, 0, 0, 0, 0, 0, tuple(charges(p, n).to_json()), level(n), (), "bound")
            continue
        hit = cache.get(ResultCache.key(spec, p, n, primes, backend, seed))
        if hit is not None:
            out[p] = hit
        else:
            todo.append(p)

    if todo:
        work_n = canonical_multidegree(n) if use_symmetry else n
        t0 = time.perf_counter()
        used = list(primes)
        attempt = 0
        cur_primes = list(primes)
        while True:
            results = [_one_prime(g, work_n, set(todo), P, backend, seed) for P in cur_primes]
            if all(r == results[0] for r in results):
                break
            attempt += 1
            if attempt > retries:
                raise exactla.ArithmeticDisagreement(f"{spec.name} n={n}: primes {used} disagree")
            cur_primes = exactla.choose_primes(len(primes), seed=seed + 7919 * attempt, exclude=used)
            used.extend(cur_primes)
        dims, ranks = results[0]
        elapsed = time.perf_counter() - t0
        fresh = []
        for p in todo:
            rep = SectorReport(
                algebra=spec.name,
                p=p,
                n=n,
                dim_cochain=dim_cochain(g, p, n),
                dim_invariant=dims.get(p, 0),
                rank_d_out=ranks.get(p, 0),
                rank_d_in=ranks.get(p - 1, 0),
                dim_H=dims.get(p, 0) - ranks.get(p, 0) - ranks.get(p - 1, 0),
                charge=tuple(charges(p, n).to_json()),
                level=level(n),
                primes=tuple(cur_primes),
                backend=backend,
                wall_time=round(elapsed / len(todo), 3),
            )
            out[p] = rep
            fresh.append((ResultCache.key(spec, p, n, primes, backend, seed), rep))
        cache.put_many(fresh)
    return [out[p] for p in ps]


def dim_H(spec: LieAlgebraSpec | str, p: int, n: Sequence[int], **kw) -> SectorReport:
    return sector_reports(spec, n, [p], **kw)[0]


# --- dense rational oracle ---------------------------------------------------------


def dim_H_dense_oracle(spec: LieAlgebraSpec | str, p: int, n: Sequence[int]) -> int:
    """dim H^{p;n} by dense fraction-free elimination over the full cochain spaces."""
    spec = _spec(spec)
    g = build_algebra(spec)
    n = as_multidegree(n)
    if p > sum(n):
        return 0

    def inv_basis(q: int) -> list[ch.Cochain]:
        return ch.relative_invariants(g, q, n, None, full=True)

    def d_rank(src: list[ch.Cochain]) -> int:
        if not src:
            return 0
        idx: dict = {}
        rows = []
        for c in src:
            dc = ch.differential(c)
            row = {}
            for k, v in dc.terms.items():
                row[idx.setdefault(k, len(idx))] = v
            rows.append(row)
        if not idx:
            return 0
        dense = [[r.get(j, 0) for j in range(len(idx))] for r in rows]
        return exactla.bareiss_rank(dense)

    B_prev = inv_basis(p - 1) if p >= 1 else []
    B = inv_basis(p)
    return len(B) - d_rank(B) - d_rank(B_prev)


# --- level tables ----------------------------------------------------------------


@dataclass
class LevelTable:
    algebra: str
    level: int
    reports: list[SectorReport]

    def to_json(self, timings: bool = False) -> dict:
        return {"algebra": self.algebra, "level": self.level, "sectors": [r.to_json(timings) for r in self.reports]}

    def nonzero(self) -> list[SectorReport]:
        return [r for r in self.reports if r.dim_H]

    def lookup(self) -> dict[tuple[int, tuple[int, ...]], int]:
        return {(r.p, r.n): r.dim_H for r in self.reports}


def _estimate(n: Sequence[int]) -> int:
    return len(letter_multisets(n, max(1, sum(n) // 2)))


def _table_worker(args):
    spec, n, kw = args
    return sector_reports(spec, n, **kw)


def level_table(spec: LieAlgebraSpec | str, L: int, *, threads: int = 1, progress=None, **kw) -> LevelTable:
    """All sectors (p, n) with level(n) = L."""
    spec = _spec(spec)
    if L < 0:
        raise ValueError("level must be non-negative")
    degs = multidegrees_at_level(L)
    use_sym = kw.get("use_symmetry", True)
    # each symmetry orbit is computed once, smallest first
    reps: dict[tuple, list[tuple]] = {}
    for n in degs:
        reps.setdefault(canonical_multidegree(n) if use_sym else n, []).append(n)
    order = sorted(reps, key=lambda n: (_estimate(n), n))
    results: dict[tuple, list[SectorReport]] = {}
    if threads > 1 and len(order) > 1:
        with ProcessPoolExecutor(threads) as ex:
            for n, reports in zip(order, ex.map(_table_worker, [(spec, n, kw) for n in order])):
                results[n] = reports
    else:
        for n in order:
            results[n] = sector_reports(spec, n, **kw)
            if progress:
                progress(spec, L, n)
    all_reports = []
    for rep, members in reps.items():
        for n in members:
            for r in results[rep]:
                all_reports.append(_relabel(r, n))
    all_reports.sort(key=lambda r: (r.n, r.p))
    return LevelTable(spec.name, L, all_reports)


def _relabel(r: SectorReport, n: tuple) -> SectorReport:
    if tuple(r.n) == tuple(n):
        return r
    d = r.to_json(timings=True)
    d["n"] = list(n)
    d["charge"] = charges(r.p, n).to_json()
    return SectorReport.from_json(d)


@dataclass(frozen=True)
class Mismatch:
    level: int
    p: int
    n: tuple[int, ...]
    dim_a: int
    dim_b: int

    @property
    def difference(self) -> int:
        return self.dim_a - self.dim_b

    def to_json(self) -> dict:
        return {"level": self.level, "p": self.p, "n": list(self.n), "dim_a": self.dim_a, "dim_b": self.dim_b, "difference": self.difference}


def compare_tables(a: LevelTable, b: LevelTable) -> list[Mismatch]:
    la, lb = a.lookup(), b.lookup()
    out = []
    for key in sorted(set(la) | set(lb)):
        x, y = la.get(key, 0), lb.get(key, 0)
        if x != y:
            out.append(Mismatch(a.level, key[0], key[1], x, y))
    return out


def compare_langlands(spec_a: LieAlgebraSpec | str, spec_b: LieAlgebraSpec | str, L_max: int, L_min: int = 0, progress=None, **kw) -> list[Mismatch]:
    """Sector-by-sector differences of dim H for all levels L_min..L_max."""
    out: list[Mismatch] = []
    for L in range(L_min, L_max + 1):
        ta = level_table(spec_a, L, progress=progress, **kw)
        tb = level_table(spec_b, L, progress=progress, **kw)
        out.extend(compare_tables(ta, tb))
    return out


def table_csv(tables: Iterable[LevelTable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algebra", "level", "p", "n", "dim_cochain", "dim_invariant", "rank_d_out", "rank_d_in", "dim_H", "charge", "primes", "backend"])
    for t in tables:
        for r in t.reports:
            w.writerow([r.algebra, r.level, r.p, " ".join(map(str, r.n)), r.dim_cochain, r.dim_invariant, r.rank_d_out, r.rank_d_in, r.dim_H, " ".join(r.charge), " ".join(map(str, r.primes)), r.backend])
    return buf.getvalue()
