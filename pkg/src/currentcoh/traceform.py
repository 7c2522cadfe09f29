"""Cochains written as linear combinations of products of traces.

A *letter* is a non-unit monomial ``m`` of A; it stands for the matrix
``Psi_m = sum_a xi^(a, m) T_a`` whose entries are the suspended generators
attached to ``m``.  Its parity is ``|m| + 1``.  A product of traces of words
in letters is a relative cochain, and every invariant cochain of gl_n, sl_n,
so_(2k+1) and sp_2k is a combination of such products.

The supercharge acts on letters through ``Q Psi = Psi^2``, i.e.

    Q Psi_m = sum_{a b = s m} (-1)^{|a|(|b|+1)} s Psi_a Psi_b,

and the Chevalley-Eilenberg differential is ``d = -Q``.

Numerical work happens by evaluating trace forms at random points modulo a
large prime: even letters are replaced by random elements of g, odd letters
by several random elements whose Grassmann coefficients are extracted.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .liealg import LieAlgebraData
from .superspace import AMonomial, factorizations, letter_multisets

Trace = tuple  # tuple[AMonomial, ...]
Product = tuple  # tuple[Trace, ...]


def letter_parity(m: AMonomial) -> int:
    return (m.theta_count + 1) & 1


def _key(m: AMonomial) -> tuple[int, int, int]:
    return (m.zp, m.zm, m.mask)


def _trace_key(tr: Trace) -> tuple:
    return (len(tr), tuple(_key(m) for m in tr))


def canon_trace(tr: Sequence[AMonomial]) -> tuple[int, Trace | None]:
    """Canonical cyclic rotation with its Koszul sign, or (0, None) if the trace vanishes identically."""
    tr = tuple(tr)
    k = len(tr)
    if k == 0:
        return 1, tr
    par = [letter_parity(m) for m in tr]
    total = sum(par) & 1
    best = None
    best_sign = 0
    sign = 1
    cur = tr
    cur_par = par
    for r in range(k):
        if r:
            # Tr(X w) = (-1)^{|X||w|} Tr(w X)
            x = cur_par[0]
            if x and (total - x) & 1:
                sign = -sign
            cur = cur[1:] + cur[:1]
            cur_par = cur_par[1:] + cur_par[:1]
        key = _trace_key(cur)
        if best is None or key < best[0]:
            best = (key, cur)
            best_sign = sign
        elif key == best[0] and sign != best_sign:
            return 0, None
    return best_sign, best[1]


def trace_parity(tr: Trace) -> int:
    return sum(letter_parity(m) for m in tr) & 1


def canon_product(traces: Iterable[Sequence[AMonomial]]) -> tuple[int, Product | None]:
    sign = 1
    items = []
    for tr in traces:
        s, c = canon_trace(tr)
        if not s:
            return 0, None
        sign *= s
        items.append(c)
    # stable sort with Koszul sign among odd factors
    keyed = [(_trace_key(t), i, t) for i, t in enumerate(items)]
    order = sorted(range(len(items)), key=lambda i: keyed[i][:2])
    odd_positions = [i for i in order if trace_parity(items[i])]
    if _perm_parity(odd_positions):
        sign = -sign
    out = tuple(items[i] for i in order)
    for a, b in zip(out, out[1:]):
        if a == b and trace_parity(a):
            return 0, None
    return sign, out


def _perm_parity(seq: Sequence[int]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv & 1


def product_content(prod: Product) -> tuple[tuple[AMonomial, int], ...]:
    c = Counter(m for tr in prod for m in tr)
    return tuple(sorted(c.items(), key=lambda kv: _key(kv[0])))


def product_degree(prod: Product) -> tuple[int, int, int, int, int]:
    d = [0] * 5
    for tr in prod:
        for m in tr:
            for j, x in enumerate(m.degree):
                d[j] += x
    return tuple(d)  # type: ignore[return-value]


class TraceForm:
    """Sparse linear combination of canonical trace products."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Product, object] | None = None):
        self.terms: dict[Product, object] = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = v

    @classmethod
    def from_product(cls, traces: Iterable[Sequence[AMonomial]], coeff=1) -> "TraceForm":
        s, key = canon_product(traces)
        if not s:
            return cls()
        return cls({key: s * coeff})

    @classmethod
    def from_products(cls, items: Iterable[tuple[Iterable[Sequence[AMonomial]], object]]) -> "TraceForm":
        """Sum of (traces, coeff) pairs, canonicalized in one pass."""
        out: dict[Product, object] = defaultdict(int)
        for traces, coeff in items:
            s, key = canon_product(traces)
            if s:
                out[key] += s * coeff
        return cls(out)

    @classmethod
    def one(cls) -> "TraceForm":
        return cls({(): 1})

    def copy(self) -> "TraceForm":
        return TraceForm(dict(self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __add__(self, other: "TraceForm") -> "TraceForm":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TraceForm(out)

    def __sub__(self, other: "TraceForm") -> "TraceForm":
        return self + other.scale(-1)

    def scale(self, c) -> "TraceForm":
        if not c:
            return TraceForm()
        return TraceForm({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "TraceForm") -> "TraceForm":
        out: dict[Product, object] = defaultdict(int)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                s, key = canon_product(k1 + k2)
                if s:
                    out[key] += s * v1 * v2
        return TraceForm(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, TraceForm) and self.terms == other.terms

    def sectors(self) -> set[tuple[int, tuple[int, ...]]]:
        return {(sum(len(t) for t in k), product_degree(k)) for k in self.terms}

    def sector(self) -> tuple[int, tuple[int, ...]]:
        secs = self.sectors()
        if len(secs) != 1:
            raise ValueError(f"trace form is not homogeneous: {sorted(secs)}")
        return next(iter(secs))

    def Q(self) -> "TraceForm":
        return apply_Q(self)

    def d(self) -> "TraceForm":
        return apply_Q(self).scale(-1)

    def drop_short_traces(self) -> "TraceForm":
        """Remove products containing a length-one trace (zero for traceless algebras)."""
        return TraceForm({k: v for k, v in self.terms.items() if all(len(t) > 1 for t in k)})


def q_letter(m: AMonomial) -> list[tuple[int, AMonomial, AMonomial]]:
    """Q Psi_m as a list of (sign, a, b) meaning sign * Psi_a Psi_b."""
    out = []
    for s, a, b in factorizations(m):
        eps = -s if (a.parity * (b.parity + 1)) & 1 else s
        out.append((eps, a, b))
    return out


def apply_Q(form: TraceForm) -> TraceForm:
    out: dict[Product, object] = defaultdict(int)
    qcache: dict[AMonomial, list] = {}
    for prod, c in form.terms.items():
        prefix = 0
        for t, tr in enumerate(prod):
            for i, m in enumerate(tr):
                splits = qcache.get(m)
                if splits is None:
                    splits = qcache[m] = q_letter(m)
                base = -c if prefix else c
                for eps, a, b in splits:
                    new_tr = tr[:i] + (a, b) + tr[i + 1:]
                    s, key = canon_product(prod[:t] + (new_tr,) + prod[t + 1:])
                    if s:
                        out[key] += s * eps * base
                prefix ^= letter_parity(m)
    return TraceForm(out)


# --- spanning sets -------------------------------------------------------------


def _distinct_perms(counts: list[tuple[AMonomial, int]]) -> Iterator[tuple[AMonomial, ...]]:
    items = [m for m, _ in counts]
    cnt = [k for _, k in counts]
    total = sum(cnt)
    seq: list[AMonomial] = []

    def rec():
        if len(seq) == total:
            yield tuple(seq)
            return
        for i, m in enumerate(items):
            if cnt[i]:
                cnt[i] -= 1
                seq.append(m)
                yield from rec()
                seq.pop()
                cnt[i] += 1

    yield from rec()


def spanning_products(content: Sequence[tuple[AMonomial, int]], min_trace_len: int = 1) -> list[Product]:
    """All nonzero canonical trace products with the given letter content."""
    letters = sorted((m for m, _ in content), key=_key)
    base = dict(content)
    found: set[Product] = set()

    def rec(rem: dict[AMonomial, int], acc: list[Trace]):
        live = [m for m in letters if rem.get(m)]
        if not live:
            s, key = canon_product(acc)
            if s:
                found.add(key)
            return
        x = live[0]
        rem[x] -= 1
        choices = [range(rem[m] + 1) for m in live]
        for take in itertools.product(*choices):
            size = 1 + sum(take)
            if size < min_trace_len:
                continue
            sub = [(m, k) for m, k in zip(live, take) if k]
            for m, k in sub:
                rem[m] -= k
            for perm in _distinct_perms(sub):
                acc.append((x,) + perm)
                rec(rem, acc)
                acc.pop()
            for m, k in sub:
                rem[m] += k
        rem[x] += 1

    rec(dict(base), [])
    return sorted(found, key=lambda p: tuple(_trace_key(t) for t in p))


def sector_contents(n: Sequence[int], p: int, dim_g: int) -> list[tuple[tuple[AMonomial, int], ...]]:
    """Letter contents of word length ``p`` and multidegree ``n`` that can be nonzero."""
    out = []
    for content in letter_multisets(n, p):
        if all(letter_parity(m) == 0 or k <= dim_g for m, k in content):
            out.append(content)
    return out


# --- evaluation ----------------------------------------------------------------


def _seed(*parts: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(x) & 0xFFFFFFFF for x in parts]))


class Points:
    """Random evaluation points for trace forms modulo ``P``.

    ``slots`` maps each letter to the number of matrices it needs: one for an
    even letter, and the maximal multiplicity for an odd letter (Grassmann
    coefficient extraction).  A functional evaluates a term with content
    ``k_m`` on the first ``k_m`` odd slots of each letter.
    """

    def __init__(self, g: LieAlgebraData, slots: Mapping[AMonomial, int], R: int, P: int, seed: Sequence[int]):
        self.g = g
        self.P = P
        self.R = R
        self.slot_index: dict[tuple[AMonomial, int], int] = {}
        letters = sorted(slots, key=_key)
        for m in letters:
            for j in range(slots[m]):
                self.slot_index[(m, j)] = len(self.slot_index)
        self.letter_rank = {m: i for i, m in enumerate(letters)}
        nslots = len(self.slot_index)
        rng = _seed(*seed, P, R, nslots)
        D, N = g.dim, g.N
        basis = np.array(g.basis, dtype=np.int64).reshape(D, N, N) if D else np.zeros((0, N, N), np.int64)
        coeffs = rng.integers(0, P, size=(nslots, R, D), dtype=np.int64)
        # |entries| <= 2 and D <= ~40 terms, so int64 cannot overflow
        mats = np.einsum("sra,aij->srij", coeffs, basis)
        self.mats = (mats % P).astype(np.uint64)
        self._trace_cache: dict[tuple[int, ...], np.ndarray] = {}
        self._assign_cache: dict[tuple, list] = {}

    def trace_value(self, slots: tuple[int, ...]) -> np.ndarray:
        k = len(slots)
        best = min(slots[i:] + slots[:i] for i in range(k))
        v = self._trace_cache.get(best)
        if v is None:
            v = kernels.trace_product(self.mats, np.array(best, dtype=np.intp), self.P)
            self._trace_cache[best] = v
        return v

    def _assignments(self, prod: Product) -> list[tuple[int, list[tuple[int, ...]]]]:
        """Signed resolutions of a product into slot words (prefix slots)."""
        cached = self._assign_cache.get(prod)
        if cached is not None:
            return cached
        flat = [m for tr in prod for m in tr]
        odd_letters = sorted({m for m in flat if letter_parity(m)}, key=_key)
        counts = Counter(m for m in flat if letter_parity(m))
        perms_per_letter = [list(itertools.permutations(range(counts[m]))) for m in odd_letters]
        out = []
        for choice in itertools.product(*perms_per_letter):
            assign = {m: iter(perm) for m, perm in zip(odd_letters, choice)}
            resolved = []
            odd_seq = []
            for tr in prod:
                word = []
                for m in tr:
                    if letter_parity(m):
                        j = next(assign[m])
                        odd_seq.append((self.letter_rank[m], j))
                    else:
                        j = 0
                    word.append(self.slot_index[(m, j)])
                resolved.append(tuple(word))
            sign = -1 if _perm_parity_keys(odd_seq) else 1
            out.append((sign, resolved))
        self._assign_cache[prod] = out
        return out

    def vanishes(self, prod: Product) -> bool:
        """More odd copies of one letter than dim(g): identically zero."""
        counts = Counter(m for tr in prod for m in tr if letter_parity(m))
        return any(k > self.g.dim for k in counts.values())

    def eval_product(self, prod: Product) -> np.ndarray:
        P = self.P
        total = np.zeros(self.R, dtype=np.uint64)
        if not prod:
            return np.ones(self.R, dtype=np.uint64)
        if self.vanishes(prod):
            return total
        for sign, words in self._assignments(prod):
            v = self.trace_value(words[0])
            for w in words[1:]:
                v = (v * self.trace_value(w)) % P
            total = (total + v) % P if sign > 0 else (total + (P - v)) % P
        return total

    def eval_form(self, form: TraceForm) -> np.ndarray:
        P = self.P
        total = np.zeros(self.R, dtype=np.uint64)
        for prod, c in form.terms.items():
            cm = coeff_mod(c, P)
            if cm == 0:
                continue
            total = (total + self.eval_product(prod) * np.uint64(cm) % P) % P
        return total

    def eval_matrix(self, forms: Sequence[TraceForm | Product]) -> np.ndarray:
        M = np.zeros((len(forms), self.R), dtype=np.uint64)
        for i, f in enumerate(forms):
            M[i] = self.eval_form(f) if isinstance(f, TraceForm) else self.eval_product(f)
        return M


def _perm_parity_keys(seq: list[tuple[int, int]]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv & 1


def coeff_mod(c, P: int) -> int:
    if isinstance(c, Fraction):
        return c.numerator % P * pow(c.denominator % P, P - 2, P) % P
    return int(c) % P


def slots_for_contents(contents: Iterable[Sequence[tuple[AMonomial, int]]]) -> dict[AMonomial, int]:
    slots: dict[AMonomial, int] = {}
    for content in contents:
        for m, k in content:
            need = k if letter_parity(m) else 1
            slots[m] = max(slots.get(m, 0), need)
    return slots


# --- expansion into coordinates ------------------------------------------------


def _trace_coefficients(g: LieAlgebraData, k: int) -> dict[tuple[int, ...], int]:
    """Nonzero Tr(T_a1 ... T_ak) as a dict over index tuples (small k only)."""
    basis = [np.asarray(T, dtype=np.int64) for T in g.basis]
    out: dict[tuple[int, ...], int] = {}
    stack = [((), np.eye(g.N, dtype=np.int64))]
    while stack:
        idx, M = stack.pop()
        if len(idx) == k:
            tr = int(np.trace(M))
            if tr:
                out[idx] = tr
            continue
        for a, T in enumerate(basis):
            X = M @ T
            if X.any():
                stack.append((idx + (a,), X))
    return out


_TRACE_TABLES: dict[tuple[int, int], dict] = {}


def trace_table(g: LieAlgebraData, k: int) -> dict[tuple[int, ...], int]:
    key = (id(g), k)
    t = _TRACE_TABLES.get(key)
    if t is None:
        t = _TRACE_TABLES[key] = _trace_coefficients(g, k)
    return t


def expand(form: TraceForm, g: LieAlgebraData):
    """Coordinate cochain of a trace form: Psi_m -> sum_a xi^(a,m) T_a, traces contracted."""
    from .cochain import Cochain, generator_table, normal_order

    t = generator_table(g)
    out: dict[tuple, object] = defaultdict(int)
    for prod, c in form.terms.items():
        per_trace = []
        for tr in prod:
            table = trace_table(g, len(tr))
            per_trace.append([(v, tuple(t.gid(a, m) for a, m in zip(idx, tr))) for idx, v in table.items()])
        for combo in itertools.product(*per_trace):
            coeff = c
            seq: tuple = ()
            for v, ids in combo:
                coeff = coeff * v
                seq += ids
            s, key = normal_order(seq, t)
            if s:
                out[key] += s * coeff
    return Cochain(g, out)
