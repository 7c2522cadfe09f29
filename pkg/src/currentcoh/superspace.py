"""The superalgebra A = C[z+, z-] (x) Lambda(t1, t2, t3) and its gradings.

Monomials are ``AMonomial(zp, zm, mask)`` with the odd part stored as a bitmask
(bit 0 = t1, bit 1 = t2, bit 2 = t3).  Multidegrees are plain 5-tuples
``(n_zp, n_zm, n_t1, n_t2, n_t3)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

N_THETA = 3
MultiDegree = tuple  # 5-tuple of non-negative ints


class AMonomial(NamedTuple):
    zp: int
    zm: int
    mask: int

    @property
    def parity(self) -> int:
        return bin(self.mask).count("1") & 1

    @property
    def theta_count(self) -> int:
        return bin(self.mask).count("1")

    @property
    def degree(self) -> tuple[int, int, int, int, int]:
        m = self.mask
        return (self.zp, self.zm, m & 1, (m >> 1) & 1, (m >> 2) & 1)

    @property
    def is_unit(self) -> bool:
        return self.zp == 0 and self.zm == 0 and self.mask == 0

    def sort_key(self) -> tuple[int, int, int]:
        return (self.zp, self.zm, self.mask)

    def label(self) -> str:
        """Derivative label in the text format, e.g. ``zp2t1t3``."""
        out = []
        if self.zp:
            out.append("zp" + (str(self.zp) if self.zp > 1 else ""))
        if self.zm:
            out.append("zm" + (str(self.zm) if self.zm > 1 else ""))
        for i in range(N_THETA):
            if self.mask >> i & 1:
                out.append(f"t{i + 1}")
        return "".join(out) or "1"


UNIT = AMonomial(0, 0, 0)


@dataclass(frozen=True)
class ChargeVector:
    """Physical charges (J1, J2, q1, q2, q3) of a cochain sector."""

    J1: Fraction
    J2: Fraction
    q1: Fraction
    q2: Fraction
    q3: Fraction

    def as_tuple(self) -> tuple[Fraction, ...]:
        return (self.J1, self.J2, self.q1, self.q2, self.q3)

    @property
    def deg(self) -> int:
        total = 2 * sum(self.as_tuple())
        assert total.denominator == 1
        return int(total)

    def conserved(self) -> tuple[Fraction, ...]:
        """The combinations J1-J2, J1+q1, J1+q2, J1+q3."""
        return (self.J1 - self.J2, self.J1 + self.q1, self.J1 + self.q2, self.J1 + self.q3)

    def __sub__(self, other: "ChargeVector") -> "ChargeVector":
        return ChargeVector(*(a - b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def to_json(self) -> list[str]:
        return [str(x) for x in self.as_tuple()]


# charge carried by the supercharge Q
Q_CHARGE = ChargeVector(Fraction(-1, 2), Fraction(-1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))


def as_multidegree(n: Sequence[int]) -> tuple[int, int, int, int, int]:
    t = tuple(int(x) for x in n)
    if len(t) != 5 or any(x < 0 for x in t):
        raise ValueError(f"multidegree must be 5 non-negative integers, got {n!r}")
    return t  # type: ignore[return-value]


def total(n: Sequence[int]) -> int:
    return sum(n)


def level(n: Sequence[int]) -> int:
    """Weighted level 3(n_zp + n_zm) + 2(n_t1 + n_t2 + n_t3)."""
    return 3 * (n[0] + n[1]) + 2 * (n[2] + n[3] + n[4])


def add(n1: Sequence[int], n2: Sequence[int]) -> tuple[int, ...]:
    return tuple(a + b for a, b in zip(n1, n2))


def charges(p: int, n: Sequence[int]) -> ChargeVector:
    zp, zm, t1, t2, t3 = n
    half = Fraction(1, 2)
    st = t1 + t2 + t3
    return ChargeVector(
        J1=zm + (st - p) * half,
        J2=zp + (st - p) * half,
        q1=(p + t1 - t2 - t3) * half,
        q2=(p - t1 + t2 - t3) * half,
        q3=(p - t1 - t2 + t3) * half,
    )


def multidegrees_at_level(L: int) -> list[tuple[int, int, int, int, int]]:
    """All multidegrees of weighted level exactly ``L`` (sorted)."""
    out = []
    for a in range(L // 3 + 1):
        rest = L - 3 * a
        if rest % 2:
            continue
        b = rest // 2
        for zp in range(a + 1):
            for t1 in range(b + 1):
                for t2 in range(b - t1 + 1):
                    out.append((zp, a - zp, t1, t2, b - t1 - t2))
    return sorted(out)


def monomial_from_degree(d: Sequence[int]) -> AMonomial:
    if any(x > 1 for x in d[2:]):
        raise ValueError(f"theta degree above 1 in {d!r}")
    return AMonomial(d[0], d[1], d[2] | (d[3] << 1) | (d[4] << 2))


def enumerate_monomials(bound: Sequence[int]) -> list[AMonomial]:
    """Non-unit monomials with degree vector <= ``bound`` componentwise."""
    zp_max, zm_max = bound[0], bound[1]
    masks = [m for m in range(8) if all(not (m >> i & 1) or bound[2 + i] >= 1 for i in range(3))]
    out = [AMonomial(a, b, m) for a in range(zp_max + 1) for b in range(zm_max + 1) for m in masks]
    return sorted((m for m in out if not m.is_unit), key=AMonomial.sort_key)


def theta_sign(mask1: int, mask2: int) -> int:
    """Sign of t_{mask1} t_{mask2} = sign * t_{mask1 | mask2} (masks disjoint)."""
    inversions = 0
    for i in range(N_THETA):
        if mask2 >> i & 1:
            # t_i from the right factor must pass the higher-index thetas of the left
            inversions += bin(mask1 >> (i + 1)).count("1")
    return -1 if inversions & 1 else 1


def multiply(m1: AMonomial, m2: AMonomial) -> tuple[int, AMonomial | None]:
    if m1.mask & m2.mask:
        return 0, None
    return theta_sign(m1.mask, m2.mask), AMonomial(m1.zp + m2.zp, m1.zm + m2.zm, m1.mask | m2.mask)


def factorizations(m: AMonomial) -> Iterator[tuple[int, AMonomial, AMonomial]]:
    """All ordered pairs (a, b) of non-unit monomials with a*b = sign*m."""
    sub = m.mask
    s = sub
    subs = []
    while True:
        subs.append(s)
        if s == 0:
            break
        s = (s - 1) & sub
    for a_zp in range(m.zp + 1):
        for a_zm in range(m.zm + 1):
            for a_mask in subs:
                a = AMonomial(a_zp, a_zm, a_mask)
                b = AMonomial(m.zp - a_zp, m.zm - a_zm, m.mask & ~a_mask)
                if a.is_unit or b.is_unit:
                    continue
                yield theta_sign(a.mask, b.mask), a, b


def letter_multisets(n: Sequence[int], p: int, letters: Sequence[AMonomial] | None = None) -> list[tuple[tuple[AMonomial, int], ...]]:
    """Multisets of ``p`` non-unit monomials with total degree ``n``.

    Returned as sorted tuples of ``(monomial, multiplicity)``.  Odd-theta
    letters may repeat (their generators are even); the caller decides whether
    a multiplicity is realisable.
    """
    n = tuple(n)
    if letters is None:
        letters = enumerate_monomials(n)
    letters = sorted(letters, key=AMonomial.sort_key)
    degs = [m.degree for m in letters]
    out: list[tuple[tuple[AMonomial, int], ...]] = []

    def rec(i: int, remaining: tuple[int, ...], left: int, acc: list[tuple[AMonomial, int]]) -> None:
        if left == 0:
            if not any(remaining):
                out.append(tuple(acc))
            return
        if i == len(letters) or sum(remaining) < left:
            return
        d = degs[i]
        kmax = left
        for j in range(5):
            if d[j]:
                kmax = min(kmax, remaining[j] // d[j])
        for k in range(kmax, -1, -1):
            nxt = tuple(r - k * x for r, x in zip(remaining, d))
            if k:
                acc.append((letters[i], k))
            rec(i + 1, nxt, left - k, acc)
            if k:
                acc.pop()

    rec(0, n, p, [])
    return out


def symmetric_images(n: Sequence[int]) -> set[tuple[int, ...]]:
    """Orbit of ``n`` under swapping z+/z- and permuting the thetas."""
    out = set()
    for zs in ((n[0], n[1]), (n[1], n[0])):
        for perm in itertools.permutations(n[2:]):
            out.add(zs + tuple(perm))
    return out


def canonical_multidegree(n: Sequence[int]) -> tuple[int, ...]:
    return max(symmetric_images(n))
