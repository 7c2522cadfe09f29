"""Trace words, graviton cocycles, explicit representatives and class checks.

A trace word is written in a small text format::

    3/2 * Tr(t1 t2t3) * Tr(zp zm)^2 - Tr(t1 t1)

Each symbol is a derivative label: ``t1``, ``t2``, ``t3`` for theta
derivatives (their order matters and is read left to right), ``zp``/``zm``
for z derivatives with an optional power (``zp2``).  The symbol stands for
the derivative of the superfield evaluated at the origin.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import exactla, kernels, schemes, tracecoh
from .liealg import LieAlgebraData, LieAlgebraSpec, build_algebra
from .superspace import AMonomial, as_multidegree, level
from .traceform import Product, TraceForm, apply_Q, expand, letter_parity


# --- derivative labels ---------------------------------------------------------


@dataclass(frozen=True)
class Label:
    """Derivative multi-index: z-powers and an ordered sequence of theta indices (1-based)."""

    zp: int = 0
    zm: int = 0
    thetas: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.zp < 0 or self.zm < 0 or any(t not in (1, 2, 3) for t in self.thetas):
            raise ValueError(f"bad derivative label {self!r}")
        if len(set(self.thetas)) != len(self.thetas):
            raise ValueError(f"theta derivative order above 1 in {self.text()}")
        if not (self.zp or self.zm or self.thetas):
            raise ValueError("a symbol needs at least one derivative")

    @classmethod
    def parse(cls, text: str) -> "Label":
        pos = 0
        zp = zm = 0
        thetas: list[int] = []
        for m in re.finditer(r"(zp|zm|t)(\d*)", text):
            if m.start() != pos:
                break
            kind, num = m.group(1), m.group(2)
            if kind == "t":
                if len(num) != 1:
                    raise ValueError(f"bad theta index in {text!r}")
                thetas.append(int(num))
            elif kind == "zp":
                zp += int(num) if num else 1
            else:
                zm += int(num) if num else 1
            pos = m.end()
        if pos != len(text) or not text:
            raise ValueError(f"cannot parse derivative label {text!r}")
        return cls(zp, zm, tuple(thetas))

    def text(self) -> str:
        out = ""
        if self.zp:
            out += "zp" + (str(self.zp) if self.zp > 1 else "")
        if self.zm:
            out += "zm" + (str(self.zm) if self.zm > 1 else "")
        return out + "".join(f"t{i}" for i in self.thetas)

    def letter(self) -> tuple[int, AMonomial]:
        """(coefficient, letter) with d^label Psi |_0 = coefficient * Psi_m."""
        sign = 1
        th = list(self.thetas)
        for i in range(len(th)):
            for j in range(i + 1, len(th)):
                if th[i] > th[j]:
                    sign = -sign
        k = len(th)
        if (k * (k - 1) // 2) & 1:
            sign = -sign
        mask = 0
        for t in th:
            mask |= 1 << (t - 1)
        return sign * math.factorial(self.zp) * math.factorial(self.zm), AMonomial(self.zp, self.zm, mask)

    @property
    def parity(self) -> int:
        return (len(self.thetas) + 1) & 1


Trace = tuple  # tuple[Label, ...]


@dataclass(frozen=True)
class TraceWord:
    terms: tuple[tuple[Fraction, tuple[Trace, ...]], ...]

    @classmethod
    def parse(cls, text: str) -> "TraceWord":
        return parse_trace_word(text)

    def text(self) -> str:
        parts = []
        for i, (c, traces) in enumerate(self.terms):
            body = " * ".join("Tr(" + " ".join(l.text() for l in tr) + ")" for tr in traces) or "1"
            mag = abs(c)
            head = "" if mag == 1 else f"{mag} * "
            sign = "-" if c < 0 else ("+" if i else "")
            parts.append(f"{sign} {head}{body}".strip() if i or c < 0 else f"{head}{body}")
        return " ".join(parts) if parts else "0"

    def to_form(self) -> TraceForm:
        items = []
        for c, traces in self.terms:
            coeff = Fraction(c)
            letters = []
            for tr in traces:
                word = []
                for lab in tr:
                    s, m = lab.letter()
                    coeff *= s
                    word.append(m)
                letters.append(tuple(word))
            items.append((letters, coeff))
        return TraceForm.from_products(items)

    def sector(self) -> tuple[int, tuple[int, ...]]:
        secs = set()
        for _, traces in self.terms:
            p = sum(len(t) for t in traces)
            n = [0] * 5
            for tr in traces:
                for lab in tr:
                    n[0] += lab.zp
                    n[1] += lab.zm
                    for t in lab.thetas:
                        n[1 + t] += 1
            secs.add((p, tuple(n)))
        if len(secs) != 1:
            raise ValueError(f"trace word is not homogeneous: {sorted(secs)}")
        return next(iter(secs))


_TERM_SPLIT = re.compile(r"\s*([+-])\s*(?![^()]*\))")


def parse_trace_word(text: str) -> TraceWord:
    """Parse ``coeff * Tr(...) * Tr(...)^k`` terms joined by + and -."""
    src = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if not src:
        raise ValueError("empty trace word")
    if src[0] not in "+-":
        src = "+" + src
    pieces = _TERM_SPLIT.split(src)
    terms = []
    # pieces: ['', sign, body, sign, body, ...]
    if pieces[0].strip():
        raise ValueError(f"cannot parse {text!r}")
    for sign, body in zip(pieces[1::2], pieces[2::2]):
        body = body.strip()
        if not body:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = Fraction(1 if sign == "+" else -1)
        traces: list[Trace] = []
        for factor in _split_factors(body):
            m = re.fullmatch(r"Tr\(([^()]*)\)(?:\^(\d+))?", factor)
            if m:
                tr = tuple(Label.parse(tok) for tok in m.group(1).split())
                if not tr:
                    raise ValueError("empty trace")
                traces.extend([tr] * int(m.group(2) or 1))
            else:
                try:
                    coeff *= Fraction(factor)
                except ValueError as exc:
                    raise ValueError(f"bad factor {factor!r}") from exc
        terms.append((coeff, tuple(traces)))
    return TraceWord(tuple(terms))


def _split_factors(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    out.append(cur.strip())
    return [f for f in out if f]


# --- builtin representatives -------------------------------------------------------

_XIF_SO7 = """
  Tr(t2 t2) * Tr(t1 t2t3) * Tr(t1 t3)^2
- 4 * Tr(t2 t2) * Tr(t1 t3) * Tr(t3 t1 t3 t1t2)
- Tr(t1 t3)^2 * Tr(t3 t2 t1t2 t2)
- 4 * Tr(t1 t3)^2 * Tr(t3 t2 t2 t1t2)
+ 8 * Tr(t1 t3) * Tr(t3 t1 t2 t2 t3 t1t2)
+ 4 * Tr(t1 t3) * Tr(t3 t1 t3 t2 t1t2 t2)
+ 16 * Tr(t1 t3) * Tr(t3 t1 t3 t2 t2 t1t2)
- 4 * Tr(t3 t1t2) * Tr(t3 t1) * Tr(t3 t1 t2 t2)
+ 8 * Tr(t3 t1 t3 t1t2) * Tr(t1 t2 t3 t2)
- 2 * Tr(t2 t2) * Tr(t3 t1t2) * Tr(t3 t1 t3 t1)
+ 8 * Tr(t3 t1 t3 t1) * Tr(t2 t2 t3 t1t2)
+ 2 * Tr(t3 t1 t3 t1) * Tr(t2 t3 t2 t1t2)
+ 16 * Tr(t2 t3 t1t2) * Tr(t3 t1 t3 t1 t2)
+ 8 * Tr(t3 t1t2) * Tr(t3 t1 t3 t1 t2 t2)
+ 8 * Tr(t2 t2) * Tr(t3 t1 t3 t1 t3 t1t2)
+ 16 * Tr(t3 t1 t3 t1 t2 t3 t2 t1t2)
- 8 * Tr(t3 t1 t3 t1 t3 t2 t1t2 t2)
- 32 * Tr(t3 t1 t3 t1 t3 t2 t2 t1t2)
- 16 * Tr(t3 t1 t3 t2 t1 t2 t3 t1t2)
- 16 * Tr(t3 t1 t3 t2 t1 t3 t2 t1t2)
- 16 * Tr(t3 t1 t3 t2 t2 t1 t3 t1t2)
"""


def _cyclic(word: TraceWord, shift: int) -> TraceWord:
    perm = {1: 1 + shift % 3, 2: 1 + (1 + shift) % 3, 3: 1 + (2 + shift) % 3}
    terms = []
    for c, traces in word.terms:
        new = tuple(tuple(Label(l.zp, l.zm, tuple(perm[t] for t in l.thetas)) for l in tr) for tr in traces)
        terms.append((c, new))
    return TraceWord(tuple(terms))


def _xif_sl2() -> TraceWord:
    base = parse_trace_word(
        "Tr(t2t3 t1) * Tr(t1t2 t1) * Tr(t1t3 t2t3 t2t3) + Tr(t1t3 t2) * Tr(t1t2 t1) * Tr(t1t3 t2t3 t2t3)"
    )
    terms = []
    for s in range(3):
        terms.extend(_cyclic(base, s).terms)
    return TraceWord(tuple(terms))


def _xinc_so7() -> TraceWord:
    """Epsilon contractions expanded; Psi^1 = Psi_-, Psi^2 = -Psi_+ and the
    symmetrization is the average of both orders."""
    zp, zm = Label(1, 0, ()), Label(0, 1, ())
    th = {i: Label(0, 0, (i,)) for i in (1, 2, 3)}
    up = [(Fraction(1), zm), (Fraction(-1), zp)]  # Psi^1, Psi^2
    down = [zp, zm]
    acc: dict[tuple, Fraction] = defaultdict(Fraction)

    def eps(a, b, c):
        return int(np.sign((b - a) * (c - a) * (c - b)))

    for i, j, k in itertools.permutations((1, 2, 3)):
        for l, m, n in itertools.permutations((1, 2, 3)):
            e = eps(i, j, k) * eps(l, m, n)
            tail = ((th[j], th[m]), (th[k], th[n]))
            for a in range(2):
                cu, lu = up[a]
                ld = down[a]
                acc[((th[i], th[l]), (ld, lu)) + tail] += e * cu
                acc[((th[i], ld), (th[l], lu)) + tail] -= e * cu
                acc[((ld, lu, th[i], th[l]),) + tail] -= 2 * e * cu
                acc[((ld, lu, th[l], th[i]),) + tail] -= 2 * e * cu
    return TraceWord(tuple((c, k) for k, c in acc.items() if c))


BUILTINS = {
    "XiF_sl2": ("sl2", _xif_sl2),
    "XiF_so7": ("so7", lambda: parse_trace_word(_XIF_SO7)),
    "XiNC_so7": ("so7", _xinc_so7),
}


def builtin_representative(name: str) -> TraceWord:
    if name not in BUILTINS:
        raise KeyError(f"unknown representative {name!r}; choose from {sorted(BUILTINS)}")
    return BUILTINS[name][1]()


def default_algebra(name: str) -> str:
    return BUILTINS[name][0]


# --- gravitons -------------------------------------------------------------------


@dataclass(frozen=True)
class GravitonSpec:
    p_plus: int = 0
    p_minus: int = 0
    m: tuple[int, int, int] = (0, 0, 0)
    e: tuple[int, int, int] = (0, 0, 0)
    k_plus: int = 0
    k_minus: int = 0

    def __post_init__(self) -> None:
        if min(self.p_plus, self.p_minus, *self.m) < 0:
            raise ValueError("graviton exponents must be non-negative")
        if any(x not in (0, 1) for x in (*self.e, self.k_plus, self.k_minus)):
            raise ValueError("e_i and k_+- must be 0 or 1")

    @property
    def word_length(self) -> int:
        return self.k_plus + self.k_minus + sum(self.m)

    @property
    def multidegree(self) -> tuple[int, int, int, int, int]:
        return (
            self.p_plus + self.k_plus,
            self.p_minus + self.k_minus,
            self.e[0] + self.m[0],
            self.e[1] + self.m[1],
            self.e[2] + self.m[2],
        )


# a superfield factor is the ordered derivative sequence applied to Psi;
# variables: 'p', 'm' (z derivatives) and 1, 2, 3 (theta derivatives)


def _factor_parity(seq: tuple) -> int:
    return (1 + sum(1 for v in seq if v in (1, 2, 3))) & 1


def _to_letter(seq: tuple) -> tuple[int, AMonomial | None]:
    thetas = tuple(v for v in seq if v in (1, 2, 3))
    if len(set(thetas)) != len(thetas):
        return 0, None
    zp = sum(1 for v in seq if v == "p")
    zm = sum(1 for v in seq if v == "m")
    if not (zp or zm or thetas):
        return 0, None
    return Label(zp, zm, thetas).letter()


def _symtr(factors: list[tuple]) -> dict[tuple, int]:
    """Unnormalized SymTr: distinct orderings with the Koszul sign of odd factors."""
    out: dict[tuple, int] = defaultdict(int)
    n = len(factors)
    seen = set()
    for perm in itertools.permutations(range(n)):
        word = tuple(factors[i] for i in perm)
        if word in seen:
            continue
        seen.add(word)
        odd = [i for i in perm if _factor_parity(factors[i])]
        inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
        out[(word,)] += -1 if inv & 1 else 1
    return out


def _derive(form: dict[tuple, int], var) -> dict[tuple, int]:
    """Apply one derivative by the graded Leibniz rule to products of traces of factors."""
    odd_var = var in (1, 2, 3)
    out: dict[tuple, int] = defaultdict(int)
    for prod, c in form.items():
        prefix = 0
        for t, tr in enumerate(prod):
            for i, f in enumerate(tr):
                sign = -1 if (odd_var and prefix) else 1
                new_tr = tr[:i] + ((var,) + f,) + tr[i + 1:]
                out[prod[:t] + (new_tr,) + prod[t + 1:]] += sign * c
                prefix ^= _factor_parity(f)
    return {k: v for k, v in out.items() if v}


def superfield_to_form(form: dict[tuple, int]) -> TraceForm:
    def items():
        for prod, c in form.items():
            coeff = c
            letters = []
            for tr in prod:
                word = []
                for f in tr:
                    s, m = _to_letter(f)
                    if not s:
                        coeff = 0
                        break
                    coeff *= s
                    word.append(m)
                if not coeff:
                    break
                letters.append(tuple(word))
            if coeff:
                yield letters, coeff

    return TraceForm.from_products(items())


def _factor_key(seq: tuple) -> tuple:
    return (sum(1 for v in seq if v == "p"), sum(1 for v in seq if v == "m"), tuple(v for v in seq if v in (1, 2, 3)))


def _normal_factor(seq: tuple) -> tuple[int, tuple]:
    """Reorder a derivative sequence to z's then ascending thetas (odd derivatives anticommute)."""
    zp, zm, th = _factor_key(seq)
    if len(set(th)) != len(th):
        return 0, ()
    inv = sum(1 for i in range(len(th)) for j in range(i + 1, len(th)) if th[i] > th[j])
    return (-1 if inv & 1 else 1), ("p",) * zp + ("m",) * zm + tuple(sorted(th))


def _sort_args(args: tuple) -> tuple[int, tuple]:
    """Supersymmetric reordering of SymTr arguments; repeated odd arguments give zero."""
    idx = sorted(range(len(args)), key=lambda i: _factor_key(args[i]))
    out = tuple(args[i] for i in idx)
    for a, b in zip(out, out[1:]):
        if a == b and _factor_parity(a):
            return 0, ()
    odd = [i for i in idx if _factor_parity(args[i])]
    inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
    return (-1 if inv & 1 else 1), out


def _arrangements(items: tuple) -> Iterable[tuple[int, ...]]:
    """Distinct orderings of a sorted multiset, as index tuples (equal items keep index order)."""
    groups: dict[tuple, list[int]] = defaultdict(list)
    for i, x in enumerate(items):
        groups[x].append(i)
    keys = list(groups)
    counts = {k: 0 for k in keys}

    def rec(acc: list[int]):
        if len(acc) == len(items):
            yield tuple(acc)
            return
        for k in keys:
            if counts[k] < len(groups[k]):
                acc.append(groups[k][counts[k]])
                counts[k] += 1
                yield from rec(acc)
                counts[k] -= 1
                acc.pop()

    yield from rec([])


def _expand_symtr(args: tuple) -> dict[tuple, int]:
    """SymTr over all of S_n divided by n: the first argument is pinned by cyclicity."""
    rest = args[1:]
    stab = math.prod(math.factorial(c) for c in Counter(rest).values())
    out: dict[tuple, int] = defaultdict(int)
    for perm in _arrangements(rest):
        order = (0,) + tuple(i + 1 for i in perm)
        odd = [i for i in order if _factor_parity(args[i])]
        inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
        out[(tuple(args[i] for i in order),)] += (-1 if inv & 1 else 1) * stab
    return out


def _derive_args(state: dict[tuple, int], var) -> dict[tuple, int]:
    odd_var = var in (1, 2, 3)
    out: dict[tuple, int] = defaultdict(int)
    for args, c in state.items():
        prefix = 0
        for i, f in enumerate(args):
            s1, nf = _normal_factor((var,) + f)
            if s1:
                s2, srt = _sort_args(args[:i] + (nf,) + args[i + 1:])
                if s2:
                    out[srt] += (-1 if (odd_var and prefix) else 1) * s1 * s2 * c
            prefix ^= _factor_parity(f)
    return {k: v for k, v in out.items() if v}


def graviton(spec: GravitonSpec) -> TraceForm:
    """Single-graviton cocycle as a trace form (zero for the empty spec).

    Derivatives are distributed over the supersymmetric argument list before
    SymTr is expanded, so like terms merge early.
    """
    factors = [("p",)] * spec.k_plus + [("m",)] * spec.k_minus
    for i in range(3):
        factors += [(i + 1,)] * spec.m[i]
    if not factors:
        return TraceForm()
    sign, args = _sort_args(tuple(factors))
    if not sign:
        return TraceForm()
    state = {args: sign}
    # rightmost derivative acts first
    for i in (3, 2, 1):
        if spec.e[i - 1]:
            state = _derive_args(state, i)
    for _ in range(spec.p_minus):
        state = _derive_args(state, "m")
    for _ in range(spec.p_plus):
        state = _derive_args(state, "p")
    words: dict[tuple, int] = defaultdict(int)
    for args, c in state.items():
        for w, v in _expand_symtr(args).items():
            words[w] += c * v
    return superfield_to_form(words)


def graviton_direct(spec: GravitonSpec) -> TraceForm:
    """Reference construction: expand SymTr first, then apply Leibniz term by term."""
    factors = [("p",)] * spec.k_plus + [("m",)] * spec.k_minus
    for i in range(3):
        factors += [(i + 1,)] * spec.m[i]
    if not factors:
        return TraceForm()
    form = _symtr(factors)
    for i in (3, 2, 1):
        if spec.e[i - 1]:
            form = _derive(form, i)
    for _ in range(spec.p_minus):
        form = _derive(form, "m")
    for _ in range(spec.p_plus):
        form = _derive(form, "p")
    return superfield_to_form(form)


def graviton_specs(p: int, n: Sequence[int]) -> list[GravitonSpec]:
    """Single-graviton specs with word length <= p and multidegree <= n."""
    n = as_multidegree(n)
    out = []
    for kp in (0, 1):
        for km in (0, 1):
            for e in itertools.product((0, 1), repeat=3):
                for m in itertools.product(*(range(n[2 + i] - e[i] + 1) for i in range(3))):
                    if min(m) < 0:
                        continue
                    for pp in range(n[0] - kp + 1):
                        for pm in range(n[1] - km + 1):
                            s = GravitonSpec(pp, pm, tuple(m), tuple(e), kp, km)
                            if 1 <= s.word_length <= p and all(a <= b for a, b in zip(s.multidegree, n)):
                                out.append(s)
    return out


def multi_graviton_forms(p: int, n: Sequence[int], min_trace_len: int = 1) -> list[TraceForm]:
    """All products of single gravitons with total word length p and multidegree n."""
    n = as_multidegree(n)
    specs = [s for s in graviton_specs(p, n)]
    forms: list[tuple[GravitonSpec, TraceForm]] = []
    for s in specs:
        f = graviton(s)
        if min_trace_len > 1:
            f = f.drop_short_traces()
        if f:
            forms.append((s, f))
    out: list[TraceForm] = []

    def rec(start: int, p_left: int, n_left: tuple, acc: TraceForm):
        if p_left == 0:
            if not any(n_left) and acc:
                out.append(acc)
            return
        for idx in range(start, len(forms)):
            s, f = forms[idx]
            if s.word_length > p_left:
                continue
            nd = s.multidegree
            if any(a > b for a, b in zip(nd, n_left)):
                continue
            prod = acc * f
            if prod:
                rec(idx, p_left - s.word_length, tuple(b - a for a, b in zip(nd, n_left)), prod)

    if p == 0:
        return [TraceForm.one()] if not any(n) else []
    rec(0, p, n, TraceForm.one())
    return out


# --- class checks ----------------------------------------------------------------


def _algebra(g) -> LieAlgebraData:
    if isinstance(g, LieAlgebraData):
        return g
    return build_algebra(LieAlgebraSpec.parse(g) if isinstance(g, str) else g)


def _require_traces(g: LieAlgebraData) -> None:
    if not tracecoh.supports_traces(g):
        raise ValueError(f"class checks need trace-spanned invariants; {g.spec.name} is not supported")


def _evaluate(g: LieAlgebraData, forms: Sequence[TraceForm], p: int, n, R: int, P: int, seed: int, tag: int) -> np.ndarray:
    pts = tracecoh.sector_points(g, p, n, R, P, seed, tag=tag)
    M = np.zeros((len(forms), R), dtype=np.uint64)
    for i, f in enumerate(forms):
        M[i] = pts.eval_form(f)
    return M


@dataclass
class SpanData:
    """Image of d into sector (p, n) and the sector dimensions, for one prime."""

    P: int
    dim_prev: int
    dim: int
    rank_in: int
    rank_out: int
    image: list[TraceForm]

    @property
    def dim_H(self) -> int:
        return self.dim - self.rank_in - self.rank_out


def _span_data(g: LieAlgebraData, p: int, n, P: int, seed: int) -> SpanData:
    res = tracecoh.sector_cohomology(g, n, P, seed=seed, qs=[p])
    image = [apply_Q(TraceForm({b: 1})) for b in res.bases.get(p - 1, [])]
    return SpanData(P, res.dims.get(p - 1, 0), res.dims.get(p, 0), res.ranks.get(p - 1, 0), res.ranks.get(p, 0), image)


def _rank_with(g, forms_a, forms_b, p, n, R, P, seed, tag) -> tuple[int, int]:
    """(rank of A, rank of A + B) at shared random points."""
    if not forms_a and not forms_b:
        return 0, 0
    M = _evaluate(g, list(forms_a) + list(forms_b), p, n, R, P, seed, tag)
    ra = kernels.rank_mod(M[: len(forms_a)], P)[0] if forms_a else 0
    rab = kernels.rank_mod(M, P)[0]
    return ra, rab


def graviton_span_in_H(g, p: int, n: Sequence[int], primes: Sequence[int] | None = None, seed: int = 0) -> tuple[int, int]:
    """(dim H^{p;n}, dim of the multi-graviton image in it)."""
    g = _algebra(g)
    _require_traces(g)
    n = as_multidegree(n)
    if p > sum(n):
        return 0, 0
    primes = tuple(primes) if primes else exactla.DEFAULT_PRIMES
    grav = multi_graviton_forms(p, n, tracecoh.min_trace_length(g))
    results = []
    for P in primes:
        sd = _span_data(g, p, n, P, seed)
        if not sd.dim_H:
            results.append((0, 0))
            continue
        R = sd.dim + tracecoh.RANK_MARGIN
        ra, rab = _rank_with(g, sd.image, grav, p, n, R, P, seed, tag=5)
        if ra != sd.rank_in:
            raise exactla.ArithmeticDisagreement("image rank not reproduced at fresh points")
        results.append((sd.dim_H, rab - ra))
    if len(set(results)) != 1:
        raise exactla.ArithmeticDisagreement(f"graviton span disagrees across primes {primes}: {results}")
    return results[0]


def fortuitous_dim(g, p: int, n: Sequence[int], primes: Sequence[int] | None = None, seed: int = 0) -> int:
    h, span = graviton_span_in_H(g, p, n, primes, seed)
    return h - span


@dataclass
class ClassReport:
    algebra: str
    p: int
    n: tuple[int, ...]
    closed: bool
    exact: bool | None
    fortuitous: bool | None
    cartan_restriction_zero: bool | None
    closed_certified: bool
    primes: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "g": self.algebra,
            "p": self.p,
            "n": list(self.n),
            "level": level(self.n),
            "closed": self.closed,
            "closed_certified": self.closed_certified,
            "exact": self.exact,
            "fortuitous": self.fortuitous,
            "cartan_restriction_zero": self.cartan_restriction_zero,
            "primes": list(self.primes),
        }


def is_closed(g, form: TraceForm, primes: Sequence[int] | None = None, seed: int = 0, points: int = 8) -> bool:
    """Q(form) vanishes at random points of the next sector for every prime."""
    g = _algebra(g)
    p, n = form.sector()
    q = apply_Q(form)
    if not q:
        return True
    if p + 1 > sum(n):
        return True
    primes = tuple(primes) if primes else exactla.DEFAULT_PRIMES
    verdicts = []
    for P in primes:
        pts = tracecoh.sector_points(g, p + 1, n, points, P, seed, tag=7)
        verdicts.append(not pts.eval_form(q).any())
    if len(set(verdicts)) != 1:
        raise exactla.ArithmeticDisagreement("closedness verdict differs across primes")
    return verdicts[0]


def closed_exact_coordinates(g, form: TraceForm) -> bool:
    """Closedness by expanding into coordinates over Q (small words only)."""
    from .cochain import differential

    g = _algebra(g)
    return not differential(expand(form, g))


def verify_class(
    word: TraceWord | TraceForm,
    g,
    primes: Sequence[int] | None = None,
    seed: int = 0,
    check_fortuitous: bool = True,
    check_exact: bool = True,
    certify: bool = False,
    sector: tuple[int, Sequence[int]] | None = None,
) -> ClassReport:
    """Closedness, exactness, fortuity and Cartan restriction of a homogeneous word."""
    g = _algebra(g)
    _require_traces(g)
    form = word.to_form() if isinstance(word, TraceWord) else word
    if isinstance(word, TraceWord):
        p, n = word.sector()
    elif form:
        p, n = form.sector()
    elif sector is None:
        raise ValueError("the zero form needs an explicit sector")
    else:
        p, n = sector
    if tracecoh.min_trace_length(g) > 1:
        form = form.drop_short_traces()
    if not form:
        return zero_class_report(g, p, n)
    primes = tuple(primes) if primes else exactla.DEFAULT_PRIMES
    closed = is_closed(g, form, primes, seed)
    certified = False
    if certify and closed:
        certified = closed_exact_coordinates(g, form)
        if not certified:
            raise exactla.ArithmeticDisagreement("modular closedness not confirmed over Q")
    exact = fortuitous = None
    if closed and (check_exact or check_fortuitous):
        exact_v, fort_v = [], []
        grav = multi_graviton_forms(p, n, tracecoh.min_trace_length(g)) if check_fortuitous else []
        for P in primes:
            sd = _span_data(g, p, n, P, seed)
            R = sd.dim + tracecoh.RANK_MARGIN
            M = _evaluate(g, sd.image + grav + [form], p, n, R, P, seed, tag=9)
            k = len(sd.image)
            r_img = kernels.rank_mod(M[:k], P)[0] if k else 0
            r_img_f = kernels.rank_mod(np.vstack([M[:k], M[-1:]]), P)[0]
            exact_v.append(r_img_f == r_img)
            if check_fortuitous:
                r_all = kernels.rank_mod(M[:-1], P)[0] if len(M) > 1 else 0
                r_all_f = kernels.rank_mod(M, P)[0]
                fort_v.append(r_all_f > r_all)
        if len(set(exact_v)) != 1 or len(set(fort_v)) > 1:
            raise exactla.ArithmeticDisagreement("class verdicts differ across primes")
        exact = exact_v[0] if check_exact else None
        fortuitous = fort_v[0] if check_fortuitous else None
    cart = None
    if p == sum(n) and all(m in schemes.COORDINATES for prod in form.terms for tr in prod for m in tr):
        cart = not schemes.restrict_form(g, form)
    return ClassReport(g.spec.name, p, tuple(n), closed, exact, fortuitous, cart, certified, primes)


# --- repair of transcribed relative coefficients ------------------------------------


@dataclass
class ClosedRepair:
    """Closed combinations supported on the terms of a word."""

    closed_as_given: bool
    nullity: int
    coefficients: list[Fraction | None] | None
    word: TraceWord | None

    def to_json(self) -> dict:
        return {
            "closed_as_given": self.closed_as_given,
            "nullity": self.nullity,
            "coefficients": None if self.coefficients is None else [None if c is None else str(c) for c in self.coefficients],
        }


def closed_repair(word: TraceWord, g, P: int | None = None, seed: int = 0) -> ClosedRepair:
    """Solve for term coefficients making the word closed, keeping its monomial support.

    With a one-dimensional solution space the coefficients are rationally
    reconstructed and normalized so the first nonzero entry is 1.
    """
    g = _algebra(g)
    P = P or exactla.DEFAULT_PRIMES[0]
    p, n = word.sector()
    pieces = [TraceWord((t,)).to_form() for t in word.terms]
    if tracecoh.min_trace_length(g) > 1:
        pieces = [f.drop_short_traces() for f in pieces]
    given = is_closed(g, word.to_form() if tracecoh.min_trace_length(g) == 1 else word.to_form().drop_short_traces(), (P,), seed)
    if p + 1 > sum(n):
        return ClosedRepair(True, len(pieces), None, word)
    qs = [apply_Q(f) for f in pieces]
    R = len(pieces) + 2 * tracecoh.RANK_MARGIN
    M = _evaluate(g, qs, p + 1, n, R, P, seed, tag=11)
    # left kernel: columns of M^T
    rows = [{i: int(M[i, r]) for i in range(len(qs)) if M[i, r]} for r in range(R)]
    kernel = exactla.nullspace_mod(rows, len(qs), P)
    if len(kernel) != 1:
        return ClosedRepair(given, len(kernel), None, None)
    v = kernel[0]
    lead = v[min(v)]
    inv = pow(lead, P - 2, P)
    coeffs = [exactla.rational_reconstruct(v.get(i, 0) * inv % P, P) for i in range(len(qs))]
    if any(c is None for c in coeffs):
        return ClosedRepair(given, 1, coeffs, None)
    terms = tuple((c * t[0], t[1]) for c, t in zip(coeffs, word.terms) if c)
    return ClosedRepair(given, 1, coeffs, TraceWord(terms))


# --- rank stabilization ----------------------------------------------------------------


def rank_stabilization(p: int, n: Sequence[int], sizes: Sequence[int] = (4, 6), primes: Sequence[int] | None = None, seed: int = 0) -> dict[str, tuple[int, int]]:
    """(dim H, graviton span) for sl_N at each N; stable spans support the finite-rank fortuity proxy."""
    return {f"sl{N}": graviton_span_in_H(f"sl{N}", p, n, primes, seed) for N in sizes}


def zero_class_report(g, p: int, n: Sequence[int]) -> ClassReport:
    g = _algebra(g)
    return ClassReport(g.spec.name, p, tuple(as_multidegree(n)), True, True, False, True if p == sum(n) else None, True, ())


# --- sweeps -------------------------------------------------------------------------


def fortuitous_sector(g, n: Sequence[int], primes: Sequence[int] | None = None, seed: int = 0) -> dict[int, tuple[int, int]]:
    """{p: (dim H, graviton span)} for every p with nonzero cohomology in multidegree n."""
    g = _algebra(g)
    _require_traces(g)
    n = as_multidegree(n)
    primes = tuple(primes) if primes else exactla.DEFAULT_PRIMES
    per_prime = []
    for P in primes:
        res = tracecoh.sector_cohomology(g, n, P, seed=seed)
        out = {}
        for p in range(sum(n) + 1):
            h = res.dim_H(p)
            if not h:
                continue
            image = [apply_Q(TraceForm({b: 1})) for b in res.bases.get(p - 1, [])]
            grav = multi_graviton_forms(p, n, tracecoh.min_trace_length(g))
            ra, rab = _rank_with(g, image, grav, p, n, res.dims[p] + tracecoh.RANK_MARGIN, P, seed, tag=5)
            out[p] = (h, rab - ra)
        per_prime.append(out)
    if any(x != per_prime[0] for x in per_prime):
        raise exactla.ArithmeticDisagreement(f"fortuity sweep disagrees across primes at n={n}")
    return per_prime[0]


def fortuitous_sweep(g, L_max: int, L_min: int = 0, primes: Sequence[int] | None = None, seed: int = 0, progress=None) -> list[dict]:
    """Rows {level, n, p, dim_H, graviton_span, fortuitous_dim} over canonical multidegrees."""
    from .superspace import canonical_multidegree, multidegrees_at_level

    rows = []
    for L in range(L_min, L_max + 1):
        reps = sorted({canonical_multidegree(n) for n in multidegrees_at_level(L)})
        for n in reps:
            for p, (h, span) in sorted(fortuitous_sector(g, n, primes, seed).items()):
                rows.append({"level": L, "n": list(n), "p": p, "dim_H": h, "graviton_span": span, "fortuitous_dim": h - span})
        if progress:
            progress(L, rows)
    return rows
