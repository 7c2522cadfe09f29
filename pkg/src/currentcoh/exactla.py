"""Exact linear algebra over prime fields and the rationals.

Ranks are computed modulo several primes just above 2**30 and compared.
Because ``rank_p(M) <= rank_Q(M)`` for every prime, agreement across random
primes is strong (but probabilistic) evidence for the rational rank.  Span
membership verdicts of ``True`` can additionally be certified by an exact
rational solve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels

# admissible prime window: 15 * P**2 < 2**64 keeps chunked uint64 sums exact
PRIME_LOW = 2**30
PRIME_HIGH = 1_100_000_000


class ArithmeticDisagreement(RuntimeError):
    """Different primes produced different answers even after retries."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def choose_primes(count: int, seed: int = 0, exclude: Iterable[int] = ()) -> list[int]:
    """Deterministic primes in the admissible window; seed 0 gives the smallest ones."""
    excluded = set(exclude)
    out: list[int] = []
    if seed == 0:
        x = PRIME_LOW + 1
    else:
        rng = np.random.default_rng(seed)
        x = int(rng.integers(PRIME_LOW, PRIME_HIGH - 10**6)) | 1
    while len(out) < count:
        if x >= PRIME_HIGH:
            x = PRIME_LOW + 1
        if is_prime(x) and x not in excluded and x not in out:
            out.append(x)
        x += 2
    return out


DEFAULT_PRIMES = tuple(choose_primes(2))


def to_mod(c, P: int) -> int:
    if isinstance(c, Fraction):
        den = c.denominator % P
        if den == 0:
            raise ZeroDivisionError(f"denominator divisible by {P}")
        return c.numerator % P * pow(den, P - 2, P) % P
    return int(c) % P


@dataclass
class SparseMatrix:
    """Row-major sparse matrix; ``data[r]`` maps column -> nonzero scalar."""

    rows: int
    cols: int
    data: dict[int, dict[int, object]] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple[int, int, object]]) -> "SparseMatrix":
        M = cls(rows, cols)
        for r, c, v in entries:
            M.add(r, c, v)
        M.prune()
        return M

    @classmethod
    def from_dense(cls, A) -> "SparseMatrix":
        A = [list(r) for r in A]
        rows = len(A)
        cols = len(A[0]) if rows else 0
        return cls.from_entries(rows, cols, ((i, j, v) for i, r in enumerate(A) for j, v in enumerate(r) if v))

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, object]], cols: int) -> "SparseMatrix":
        return cls(len(rows), cols, {i: dict(r) for i, r in enumerate(rows) if r})

    def add(self, r: int, c: int, v) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError((r, c))
        row = self.data.setdefault(r, {})
        row[c] = row.get(c, 0) + v

    def prune(self) -> None:
        for r in list(self.data):
            row = {c: v for c, v in self.data[r].items() if v}
            if row:
                self.data[r] = row
            else:
                del self.data[r]

    @property
    def entries(self) -> list[tuple[int, int, object]]:
        return [(r, c, v) for r in sorted(self.data) for c, v in sorted(self.data[r].items())]

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.data.values())

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_entries(self.cols, self.rows, ((c, r, v) for r, c, v in self.entries))

    def to_dense(self) -> list[list[object]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def matvec(self, v: Sequence) -> list:
        out = [0] * self.rows
        for r, row in self.data.items():
            out[r] = sum((x * v[c] for c, x in row.items()), 0)
        return out

    def reduce_mod(self, P: int) -> list[dict[int, int]]:
        rows = []
        for r in sorted(self.data):
            row = {}
            for c, v in self.data[r].items():
                x = to_mod(v, P)
                if x:
                    row[c] = x
            if row:
                rows.append(row)
        return rows


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    primes: tuple[int, ...]
    agreement: bool


# --- modular sparse elimination ------------------------------------------------


def _echelon_mod(rows: list[dict[int, int]], P: int) -> dict[int, dict[int, int]]:
    """Incremental echelon form; returns pivot column -> normalized pivot row.

    Rows are processed sparsest first (a Markowitz-style ordering of pivot
    candidates); ties keep the original row order so the result is
    deterministic.
    """
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), i))
    pivots: dict[int, dict[int, int]] = {}
    for i in order:
        row = dict(rows[i])
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = pow(row[c], P - 2, P)
                pivots[c] = {k: v * inv % P for k, v in row.items()}
                break
            f = row[c]
            for k, v in piv.items():
                x = (row.get(k, 0) - f * v) % P
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    return pivots


def rank_mod_sparse(M: SparseMatrix | list[dict[int, int]], P: int) -> int:
    rows = M.reduce_mod(P) if isinstance(M, SparseMatrix) else M
    return len(_echelon_mod(rows, P))


def rank(M: SparseMatrix, primes: Sequence[int] | None = None, retries: int = 2, seed: int = 0) -> RankCertificate:
    """Rank over several primes with retry on disagreement."""
    primes = list(primes) if primes else list(DEFAULT_PRIMES)
    used: list[int] = []
    for attempt in range(retries + 1):
        ranks = [rank_mod_sparse(M, P) for P in primes]
        used.extend(primes)
        if len(set(ranks)) == 1:
            return RankCertificate(ranks[0], tuple(primes), True)
        primes = choose_primes(len(primes), seed=seed + 1000 + attempt, exclude=used)
    raise ArithmeticDisagreement(f"rank disagreement across primes {used}")


def nullspace_mod(M: SparseMatrix | list[dict[int, int]], cols: int, P: int) -> list[dict[int, int]]:
    """Basis of {v : M v = 0} over F_P as sparse vectors."""
    rows = M.reduce_mod(P) if isinstance(M, SparseMatrix) else M
    piv = _echelon_mod(rows, P)
    # back-substitute to reduced form
    cols_sorted = sorted(piv, reverse=True)
    for c in cols_sorted:
        row = piv[c]
        for c2 in [k for k in row if k != c and k in piv]:
            f = row.get(c2)
            if not f:
                continue
            for k, v in piv[c2].items():
                x = (row.get(k, 0) - f * v) % P
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    free = [j for j in range(cols) if j not in piv]
    out = []
    for j in free:
        v = {j: 1}
        for c, row in piv.items():
            x = row.get(j)
            if x:
                v[c] = (-x) % P
        out.append(v)
    return out


def rational_reconstruct(a: int, P: int) -> Fraction | None:
    """Smallest n/d with n = a*d mod P and |n|, d <= sqrt(P/2); None if none exists."""
    a %= P
    bound = int((P // 2) ** 0.5)
    r0, r1, t0, t1 = P, a, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    return Fraction(r1, t1)


# --- rational elimination ------------------------------------------------------


def _echelon_q(rows: list[dict[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), i))
    pivots: dict[int, dict[int, Fraction]] = {}
    for i in order:
        row = {k: Fraction(v) for k, v in rows[i].items() if v}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = 1 / row[c]
                pivots[c] = {k: v * inv for k, v in row.items()}
                break
            f = row[c]
            for k, v in piv.items():
                x = row.get(k, 0) - f * v
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    return pivots


def rank_rational(M: SparseMatrix) -> int:
    return len(_echelon_q([dict(r) for r in M.data.values()]))


def nullspace_basis(M: SparseMatrix, P: int | None = None) -> list[dict[int, object]]:
    """Nullspace vectors of ``M``: exact rationals, or residues mod ``P`` if given."""
    if P is not None:
        return nullspace_mod(M, M.cols, P)
    piv = _echelon_q([dict(r) for r in M.data.values()])
    for c in sorted(piv, reverse=True):
        row = piv[c]
        for c2 in [k for k in row if k != c and k in piv]:
            f = row.get(c2)
            if not f:
                continue
            for k, v in piv[c2].items():
                x = row.get(k, 0) - f * v
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    out = []
    for j in range(M.cols):
        if j in piv:
            continue
        v: dict[int, object] = {j: Fraction(1)}
        for c, row in piv.items():
            x = row.get(j)
            if x:
                v[c] = -x
        out.append(v)
    return out


def solve_rational(M: SparseMatrix, v: Sequence) -> list[Fraction] | None:
    """Some x with M x = v over Q, or None."""
    n = M.cols
    rows = []
    for r in range(M.rows):
        row = {c: Fraction(x) for c, x in M.data.get(r, {}).items()}
        if v[r]:
            row[n] = Fraction(v[r])
        if row:
            rows.append(row)
    piv = _echelon_q(rows)
    if n in piv:
        return None
    for c in sorted(piv, reverse=True):
        row = piv[c]
        for c2 in [k for k in row if k != c and k in piv]:
            f = row.get(c2)
            if not f:
                continue
            for k, val in piv[c2].items():
                x = row.get(k, 0) - f * val
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    x = [Fraction(0)] * n
    for c, row in piv.items():
        x[c] = row.get(n, Fraction(0))
    return x


@dataclass(frozen=True)
class SpanVerdict:
    in_span: bool
    primes: tuple[int, ...]
    certified: bool


def in_span(M: SparseMatrix, v: Sequence, primes: Sequence[int] | None = None, certify: bool = False, seed: int = 0) -> SpanVerdict:
    """Is ``v`` in the column span of ``M``?"""
    primes = list(primes) if primes else list(DEFAULT_PRIMES)
    verdicts = []
    for P in primes:
        base = M.transpose().reduce_mod(P)
        vrow = {i: to_mod(x, P) for i, x in enumerate(v) if to_mod(x, P)}
        r0 = len(_echelon_mod(base, P))
        r1 = len(_echelon_mod(base + ([vrow] if vrow else []), P))
        verdicts.append(r0 == r1)
    if len(set(verdicts)) != 1:
        raise ArithmeticDisagreement(f"span membership disagrees across primes {primes}")
    ok = verdicts[0]
    certified = False
    if ok and certify:
        x = solve_rational(M, v)
        if x is None or [Fraction(y) for y in M.matvec(x)] != [Fraction(y) for y in v]:
            raise ArithmeticDisagreement("modular span verdict not confirmed over Q")
        certified = True
    return SpanVerdict(ok, tuple(primes), certified)


def cokernel_dim(M: SparseMatrix, primes: Sequence[int] | None = None) -> int:
    return M.rows - rank(M, primes).rank


# --- dense helpers -------------------------------------------------------------


def bareiss_rank(A: Sequence[Sequence]) -> int:
    """Fraction-free Gaussian elimination over Z (entries may be Fractions)."""
    rows = [list(r) for r in A]
    if not rows:
        return 0
    # clear denominators row by row
    ints = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = math.lcm(den, x.denominator)
        ints.append([int(Fraction(x) * den) for x in r])
    m, n = len(ints), len(ints[0])
    M = ints
    rk = 0
    prev = 1
    for c in range(n):
        if rk == m:
            break
        p = next((i for i in range(rk, m) if M[i][c]), None)
        if p is None:
            continue
        M[rk], M[p] = M[p], M[rk]
        for i in range(rk + 1, m):
            for j in range(c + 1, n):
                M[i][j] = (M[i][j] * M[rk][c] - M[i][c] * M[rk][j]) // prev
            M[i][c] = 0
        prev = M[rk][c]
        rk += 1
    return rk


def dense_rank_mod(A: np.ndarray, P: int) -> int:
    if A.size == 0:
        return 0
    return kernels.rank_mod(np.ascontiguousarray(A, dtype=np.uint64), P)[0]
