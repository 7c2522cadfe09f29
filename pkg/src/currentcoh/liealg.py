"""Classical Lie algebras gl_n, sl_n, so_n, sp_2n as explicit matrix algebras.

The orthogonal and symplectic algebras use antidiagonal invariant forms, so
the Cartan subalgebra is diagonal in the defining representation and all
weights are integral in epsilon-coordinates.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

SERIES = ("GL", "SL", "SO", "SP")


@dataclass(frozen=True, order=True)
class LieAlgebraSpec:
    series: str
    size: int

    def __post_init__(self) -> None:
        if self.series not in SERIES:
            raise ValueError(f"unknown series {self.series!r}")
        if self.size < 1:
            raise ValueError("size must be positive")
        if self.series == "SP" and self.size % 2:
            raise ValueError("sp needs even size")

    @property
    def name(self) -> str:
        return f"{self.series.lower()}{self.size}"

    @classmethod
    def parse(cls, text: str) -> "LieAlgebraSpec":
        m = re.fullmatch(r"\s*(gl|sl|so|sp)\s*_?\s*(\d+)\s*", text.lower())
        if not m:
            raise ValueError(f"cannot parse Lie algebra {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    @property
    def rank(self) -> int:
        n = self.size
        return {"GL": n, "SL": n - 1, "SO": n // 2, "SP": n // 2}[self.series]


@dataclass(frozen=True)
class LieAlgebraData:
    spec: LieAlgebraSpec
    basis: tuple[np.ndarray, ...]
    structure_constants: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]]
    cartan_indices: tuple[int, ...]
    simple_raising: tuple[int, ...]
    simple_lowering: tuple[int, ...]
    weights: tuple[tuple[int, ...], ...]
    weyl_group: tuple[np.ndarray, ...]
    # diagonal of a Cartan element in terms of the Cartan coordinates u_1..u_r
    cartan_diagonal: np.ndarray
    labels: tuple[str, ...] = field(default=())
    _coord: tuple = field(default=(), repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def N(self) -> int:
        return self.spec.size

    @property
    def cartan_rank(self) -> int:
        return self.cartan_diagonal.shape[1]

    def coordinates(self, M: np.ndarray) -> list[Fraction]:
        """Coefficients of a matrix in ``g`` with respect to the basis."""
        pivots, inv = self._coord
        flat = np.asarray(M).reshape(-1)
        vals = [Fraction(int(flat[p])) if not isinstance(flat[p], Fraction) else flat[p] for p in pivots]
        out = [sum((vals[j] * inv[j][i] for j in range(len(pivots))), Fraction(0)) for i in range(len(pivots))]
        return out

    def matrix_of(self, coeffs) -> np.ndarray:
        M = np.zeros((self.N, self.N), dtype=object)
        for c, T in zip(coeffs, self.basis):
            if c:
                M = M + c * T.astype(object)
        return M

    def is_central(self, a: int) -> bool:
        return all(not self.structure_constants.get((a, b)) for b in range(self.dim))


def _unit(N: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((N, N), dtype=np.int64)
    E[i, j] = 1
    return E


def _form(spec: LieAlgebraSpec) -> np.ndarray | None:
    N = spec.size
    if spec.series == "SO":
        J = np.zeros((N, N), dtype=np.int64)
        for i in range(N):
            J[i, N - 1 - i] = 1
        return J
    if spec.series == "SP":
        k = N // 2
        J = np.zeros((N, N), dtype=np.int64)
        for i in range(N):
            J[i, N - 1 - i] = 1 if i < k else -1
        return J
    return None


def _eps_of_position(spec: LieAlgebraSpec) -> list[np.ndarray]:
    """Torus character of each standard basis vector, in epsilon-coordinates."""
    N = spec.size
    if spec.series in ("GL", "SL"):
        return [np.eye(N, dtype=np.int64)[i] for i in range(N)]
    k = N // 2
    out = []
    for i in range(N):
        v = np.zeros(k, dtype=np.int64)
        if i < k:
            v[i] = 1
        elif spec.series == "SO" and N % 2 == 1 and i == k:
            pass
        else:
            v[N - 1 - i] = -1
        out.append(v)
    return out


def _simple_roots(spec: LieAlgebraSpec) -> list[np.ndarray]:
    N = spec.size
    if spec.series in ("GL", "SL"):
        out = []
        for i in range(N - 1):
            v = np.zeros(N, dtype=np.int64)
            v[i], v[i + 1] = 1, -1
            out.append(v)
        return out
    k = N // 2
    out = []
    for i in range(k - 1):
        v = np.zeros(k, dtype=np.int64)
        v[i], v[i + 1] = 1, -1
        out.append(v)
    if k == 0:
        return out
    v = np.zeros(k, dtype=np.int64)
    if spec.series == "SP":
        v[k - 1] = 2
    elif N % 2 == 1:
        v[k - 1] = 1
    elif k >= 2:
        v[k - 2], v[k - 1] = 1, 1
    else:
        return out  # so_2 is abelian
    out.append(v)
    return out


def _normalize_int(M: np.ndarray) -> np.ndarray:
    flat = [int(x) for x in M.reshape(-1) if x]
    g = 0
    for x in flat:
        g = gcd(g, abs(x))
    M = M // g
    first = next(int(x) for x in M.reshape(-1) if x)
    return M if first > 0 else -M


def _solve_fraction(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Least-squares-free exact solve of a consistent (possibly overdetermined) system."""
    rows = [list(r) + [bb] for r, bb in zip(A, b)]
    ncol = len(A[0]) if A else 0
    piv_cols = []
    r = 0
    for c in range(ncol):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            raise ValueError("inconsistent system")
    sol = [Fraction(0)] * ncol
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    return sol


def _height(root: np.ndarray, simple: list[np.ndarray]) -> int:
    A = [[Fraction(int(s[i])) for s in simple] for i in range(len(root))]
    coeffs = _solve_fraction(A, [Fraction(int(x)) for x in root])
    return int(sum(coeffs))


def _is_positive(w: np.ndarray) -> bool:
    for x in w:
        if x:
            return x > 0
    return False


def _weyl_generators(spec: LieAlgebraSpec) -> tuple[list[np.ndarray], int]:
    """Generators of W acting on Cartan coordinates, and the coordinate count."""
    N = spec.size
    s = spec.series
    if s == "GL":
        gens = []
        for i in range(N - 1):
            P = np.eye(N, dtype=np.int64)
            P[[i, i + 1]] = P[[i + 1, i]]
            gens.append(P)
        return gens, N
    if s == "SL":
        # coordinates u_1..u_{N-1}; eps_N = -(u_1 + ... + u_{N-1})
        r = N - 1
        if r == 0:
            return [], 0
        eps = [np.eye(r, dtype=np.int64)[i] for i in range(r)] + [-np.ones(r, dtype=np.int64)]
        gens = []
        for i in range(N - 1):
            perm = list(range(N))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            gens.append(np.array([eps[perm[j]] for j in range(r)], dtype=np.int64))
        return gens, r
    k = N // 2
    gens = []
    for i in range(k - 1):
        P = np.eye(k, dtype=np.int64)
        P[[i, i + 1]] = P[[i + 1, i]]
        gens.append(P)
    if k >= 1:
        if s == "SO" and N % 2 == 0:
            if k >= 2:
                P = np.eye(k, dtype=np.int64)
                P[[k - 2, k - 1]] = P[[k - 1, k - 2]]
                P[k - 2] *= -1
                P[k - 1] *= -1
                gens.append(P)
        else:
            P = np.eye(k, dtype=np.int64)
            P[k - 1, k - 1] = -1
            gens.append(P)
    return gens, k


def _close_group(gens: list[np.ndarray], r: int) -> tuple[np.ndarray, ...]:
    ident = np.eye(r, dtype=np.int64)
    seen = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = h @ g
                key = x.tobytes()
                if key not in seen:
                    seen[key] = x
                    nxt.append(x)
        frontier = nxt
    return tuple(sorted(seen.values(), key=lambda m: tuple(m.reshape(-1))))


def _cartan_diagonal(spec: LieAlgebraSpec) -> np.ndarray:
    """N x r integer matrix: diagonal entry i of the Cartan element with coordinates u."""
    N = spec.size
    s = spec.series
    if s == "GL":
        return np.eye(N, dtype=np.int64)
    if s == "SL":
        r = N - 1
        D = np.zeros((N, r), dtype=np.int64)
        for i in range(r):
            D[i, i] = 1
        D[N - 1, :] = -1
        return D
    return np.array(_eps_of_position(spec), dtype=np.int64).reshape(N, N // 2)


@lru_cache(maxsize=None)
def build_algebra(spec: LieAlgebraSpec) -> LieAlgebraData:
    """Construct basis, structure constants, weights and Weyl group for ``spec``."""
    N = spec.size
    s = spec.series
    J = _form(spec)
    eps = _eps_of_position(spec)

    # Cartan
    cartan: list[np.ndarray] = []
    if s == "GL":
        cartan = [_unit(N, i, i) for i in range(N)]
    elif s == "SL":
        cartan = [_unit(N, i, i) - _unit(N, i + 1, i + 1) for i in range(N - 1)]
    else:
        cartan = [_unit(N, i, i) - _unit(N, N - 1 - i, N - 1 - i) for i in range(N // 2)]

    # root vectors, one per root
    root_vecs: dict[tuple[int, ...], np.ndarray] = {}
    for i in range(N):
        for j in range(N):
            w = tuple(int(x) for x in eps[i] - eps[j])
            if not any(w) or w in root_vecs:
                continue
            E = _unit(N, i, j)
            if J is not None:
                Jinv = np.round(np.linalg.inv(J)).astype(np.int64)
                X = E - Jinv @ E.T @ J
            else:
                X = E
            if not X.any():
                continue
            root_vecs[w] = _normalize_int(X)

    simple = _simple_roots(spec)
    rank = len(simple)
    pos = [w for w in root_vecs if _is_positive(np.array(w))]
    if rank:
        pos.sort(key=lambda w: (_height(np.array(w), simple), tuple(-x for x in w)))
    neg = [tuple(-x for x in w) for w in pos]
    missing = set(root_vecs) - set(pos) - set(neg)
    assert not missing, missing

    basis = list(cartan) + [root_vecs[w] for w in pos] + [root_vecs[w] for w in neg]
    zero_w = tuple(0 for _ in eps[0]) if N else ()
    weights = [zero_w] * len(cartan) + [tuple(w) for w in pos] + [tuple(w) for w in neg]
    labels = [f"h{i + 1}" for i in range(len(cartan))]
    labels += [f"e{'_'.join(map(str, w))}" for w in pos]
    labels += [f"f{'_'.join(map(str, (-x for x in w)))}" for w in neg]

    # coordinate extraction
    D = len(basis)
    flat = np.array([b.reshape(-1) for b in basis], dtype=np.int64) if D else np.zeros((0, N * N), dtype=np.int64)
    pivots: list[int] = []
    # greedy independent columns over Q (exact, small)
    rows = [[Fraction(int(x)) for x in flat[:, c]] for c in range(N * N)]
    chosen: list[list[Fraction]] = []
    for c in range(N * N):
        if len(pivots) == D:
            break
        cand = chosen + [rows[c]]
        if _rank_fraction(cand) == len(cand):
            chosen = cand
            pivots.append(c)
    # M[pivots] = coeffs @ flat[:, pivots]  ->  coeffs = M[pivots] @ inv(flat[:, pivots])
    sub = [[Fraction(int(flat[a, p])) for p in pivots] for a in range(D)]
    inv = _inverse_fraction(sub) if D else []
    data_coord = (tuple(pivots), inv)

    def coords(M: np.ndarray) -> list[Fraction]:
        fl = M.reshape(-1)
        vals = [Fraction(int(fl[p])) for p in pivots]
        return [sum((vals[j] * inv[j][i] for j in range(D)), Fraction(0)) for i in range(D)]

    sc: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
    for a in range(D):
        for b in range(D):
            C = basis[a] @ basis[b] - basis[b] @ basis[a]
            if not C.any():
                continue
            cs = coords(C)
            recon = sum((int(c) if c.denominator == 1 else 0) * basis[i] for i, c in enumerate(cs) if c)
            if any(c.denominator != 1 for c in cs) or not np.array_equal(recon, C):
                raise AssertionError("bracket does not close on integral basis")
            sc[(a, b)] = tuple((i, c) for i, c in enumerate(cs) if c)

    raising = []
    lowering = []
    for a in simple:
        t = tuple(int(x) for x in a)
        raising.append(weights.index(t))
        lowering.append(weights.index(tuple(-x for x in t)))

    gens, r = _weyl_generators(spec)
    weyl = _close_group(gens, r) if r else (np.eye(0, dtype=np.int64),)

    for T in basis:
        T.setflags(write=False)
    return LieAlgebraData(
        spec=spec,
        basis=tuple(basis),
        structure_constants=sc,
        cartan_indices=tuple(range(len(cartan))),
        simple_raising=tuple(raising),
        simple_lowering=tuple(lowering),
        weights=tuple(weights),
        weyl_group=weyl,
        cartan_diagonal=_cartan_diagonal(spec),
        labels=tuple(labels),
        _coord=data_coord,
    )


def _rank_fraction(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncol = len(rows[0]) if rows else 0
    for c in range(ncol):
        pr = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[rank], rows[pr] = rows[pr], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _inverse_fraction(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    aug = [list(M[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        pr = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[pr] = aug[pr], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def bracket(g: LieAlgebraData, x, y) -> list[Fraction]:
    """Bracket of two elements given as coefficient sequences."""
    out = [Fraction(0)] * g.dim
    for a, xa in enumerate(x):
        if not xa:
            continue
        for b, yb in enumerate(y):
            if not yb:
                continue
            for c, f in g.structure_constants.get((a, b), ()):
                out[c] += xa * yb * f
    return out


def adjoint_action_matrix(g: LieAlgebraData, a: int, V: list[tuple[int, ...]]) -> dict[tuple[int, int], Fraction]:
    """Derivation action of ``T_a`` on the tensor-slot basis ``V``.

    Each label in ``V`` is a tuple of basis indices, one per tensor slot; the
    result maps (row, col) -> coefficient with rows indexing the image labels
    in ``V``.  Raises ``KeyError`` if the image leaves the span of ``V``.
    """
    index = {lab: i for i, lab in enumerate(V)}
    out: dict[tuple[int, int], Fraction] = {}
    for col, lab in enumerate(V):
        for slot, b in enumerate(lab):
            for c, f in g.structure_constants.get((a, b), ()):
                new = lab[:slot] + (c,) + lab[slot + 1:]
                row = index[new]
                out[(row, col)] = out.get((row, col), Fraction(0)) + f
    return {k: v for k, v in out.items() if v}


# --- polynomials on the Cartan superspace t^{3|2} -----------------------------
#
# A CartanPoly is a dict mapping (u_exponents, eta_indices) -> coefficient, with
# u_exponents a tuple of length 3*r (copy-major) and eta_indices a strictly
# increasing tuple of odd-variable indices a*r + k (a = 0, 1).

CartanPoly = dict


def cartan_poly_mul(f: CartanPoly, g: CartanPoly) -> CartanPoly:
    out: CartanPoly = {}
    for (ue1, et1), c1 in f.items():
        for (ue2, et2), c2 in g.items():
            if set(et1) & set(et2):
                continue
            merged = et1 + et2
            sign = _perm_sign_to_sorted(merged)
            key = (tuple(a + b for a, b in zip(ue1, ue2)), tuple(sorted(merged)))
            out[key] = out.get(key, 0) + sign * c1 * c2
    return {k: v for k, v in out.items() if v}


def _perm_sign_to_sorted(seq: tuple[int, ...]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv & 1 else 1


def _apply_weyl(w: np.ndarray, f: CartanPoly, r: int) -> CartanPoly:
    """Substitute each copy's coordinates u -> w u (likewise for eta)."""
    out: CartanPoly = {}
    nu = 3 * r
    for (ue, et), c in f.items():
        # build product of substituted linear forms
        term: CartanPoly = {(tuple([0] * nu), ()): c}
        for idx, e in enumerate(ue):
            if not e:
                continue
            copy, k = divmod(idx, r)
            lin: CartanPoly = {}
            for l in range(r):
                if w[k, l]:
                    ex = [0] * nu
                    ex[copy * r + l] = 1
                    lin[(tuple(ex), ())] = int(w[k, l])
            for _ in range(e):
                term = cartan_poly_mul(term, lin)
        for v in et:
            copy, k = divmod(v, r)
            lin = {}
            for l in range(r):
                if w[k, l]:
                    lin[(tuple([0] * nu), (copy * r + l,))] = int(w[k, l])
            term = cartan_poly_mul(term, lin)
        for key, val in term.items():
            out[key] = out.get(key, 0) + val
    return {k: v for k, v in out.items() if v}


def weyl_orbit_average(g: LieAlgebraData, f: CartanPoly) -> CartanPoly:
    """Average of ``f`` over the Weyl group (exact, Fraction coefficients)."""
    r = g.cartan_rank
    total: CartanPoly = {}
    for w in g.weyl_group:
        for k, v in _apply_weyl(w, f, r).items():
            total[k] = total.get(k, 0) + v
    order = len(g.weyl_group)
    return {k: Fraction(v) / order for k, v in total.items() if v}


def all_signed_permutations(k: int) -> list[np.ndarray]:
    out = []
    for perm in itertools.permutations(range(k)):
        for signs in itertools.product((1, -1), repeat=k):
            P = np.zeros((k, k), dtype=np.int64)
            for i, (j, s) in enumerate(zip(perm, signs)):
                P[i, j] = s
            out.append(P)
    return out
