"""Finite fields and the classical designs behind the constructions.

Provides GF(p^k) arithmetic with a deterministically chosen modulus,
affine and projective planes of prime-power order, circle geometries
(the 3-(q^2+1, q+1, 1) inversive planes), exhaustive design/packing
validators, and a seeded greedy packing fallback for desk-scale runs.

Field elements are integer codes 0..q-1: the code's base-p digits are
the coefficient vector of the residue polynomial, lowest degree first.
Arithmetic goes through dense numpy tables, which also lets the design
generators run vectorized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Optional

import numpy as np

from . import _kernels
from .setfam import Block, Family


class NotPrimePower(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_power(q: int) -> Optional[tuple[int, int]]:
    """Decompose q = p^k with p prime, or None."""
    if q < 2:
        return None
    p = 2
    while p * p <= q:
        if q % p == 0:
            k, m = 0, q
            while m % p == 0:
                m //= p
                k += 1
            return (p, k) if m == 1 else None
        p += 1
    return (q, 1)


# ---------------------------------------------------------------------------
# GF(p^k)

# polynomials over GF(p) are coefficient tuples, lowest degree first


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_rem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            f = c * inv_lead % p
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - f * mod[j]) % p
    return a[:dm]


def _is_irreducible(poly, p):
    k = len(poly) - 1
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for tail in product(range(p), repeat=d):
            div = list(tail) + [1]
            if any(_poly_rem(poly, div, p)):
                continue
            return False
    return True


@dataclass(frozen=True)
class FieldElem:
    """Coefficient vector of a field element, lowest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("coefficient vector must have length k >= 1")


class FiniteField:
    """GF(p^k) with dense add/mul/inv tables over integer element codes.

    The modulus is the lexicographically smallest monic irreducible of
    degree k over GF(p), comparing coefficient vectors lowest degree
    first, so fields (and everything generated from them) are
    byte-reproducible.
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = self._smallest_irreducible(p, k)
        self._build_tables()

    @staticmethod
    def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
        for tail in product(range(p), repeat=k):
            cand = list(tail) + [1]
            if _is_irreducible(cand, p):
                return tuple(cand)
        raise AssertionError("no irreducible polynomial found")

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        dtype = np.int64 if q > 2**15 else np.int32
        add = np.zeros((q, q), dtype=dtype)
        mul = np.zeros((q, q), dtype=dtype)
        for a in range(q):
            ca = self.coeffs(a)
            for b in range(a, q):
                cb = self.coeffs(b)
                s = self.from_coeffs([(x + y) % p for x, y in zip(ca, cb)])
                add[a, b] = add[b, a] = s
                pr = _poly_rem(_poly_mul(list(ca), list(cb), p), self.modulus, p)
                m = self.from_coeffs(pr)
                mul[a, b] = mul[b, a] = m
        inv = np.zeros(q, dtype=dtype)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        neg = np.zeros(q, dtype=dtype)
        for a in range(q):
            neg[a] = int(np.nonzero(add[a] == 0)[0][0])
        self.add_table = add
        self.mul_table = mul
        self.inv_table = inv
        self.neg_table = neg

    def coeffs(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + c % self.p
        return code

    def elem(self, code: int) -> FieldElem:
        return FieldElem(self.coeffs(code))

    def code(self, e: FieldElem) -> int:
        if len(e.coeffs) != self.k:
            raise ValueError("coefficient vector length mismatch")
        return self.from_coeffs(e.coeffs)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.inv_table[a])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        r, b = 1, a
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def __repr__(self):
        return f"GF({self.q})"


_FIELD_CACHE: dict[tuple[int, int], FiniteField] = {}


def field_make(p: int, k: int) -> FiniteField:
    """GF(p^k) with the deterministic modulus choice (cached)."""
    key = (p, k)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FiniteField(p, k)
    return _FIELD_CACHE[key]


def field_for_order(q: int) -> FiniteField:
    pk = prime_power(q)
    if pk is None:
        raise NotPrimePower(f"{q} is not a prime power")
    return field_make(*pk)


# ---------------------------------------------------------------------------
# designs and packings


@dataclass(frozen=True)
class Design:
    """A block system with declared strength t and index lambda.

    kind "design" claims every t-subset lies in exactly lambda blocks;
    kind "packing" claims at most lambda.  Claims are checked by
    is_design / is_packing, not at construction.
    """

    t: int
    v: int
    lam: int
    blocks: Family
    kind: str  # "design" | "packing"

    def __post_init__(self):
        if self.kind not in ("design", "packing"):
            raise ValueError("kind must be 'design' or 'packing'")
        if self.blocks.n != self.v:
            raise ValueError("block family ground size must equal v")

    def block_count(self) -> int:
        return len(self.blocks)


def _subset_cover_counts(d: Design):
    """Block-coverage count for every t-subset (array for t in {2,3})."""
    if d.t in (2, 3):
        pts = []
        offsets = [0]
        for b in d.blocks:
            pts.extend(i - 1 for i in b.members)
            offsets.append(len(pts))
        return _kernels.cover_counts(
            np.asarray(pts, dtype=np.int64),
            np.asarray(offsets, dtype=np.int64),
            d.v,
            d.t,
        )
    counts: dict[tuple[int, ...], int] = {}
    for b in d.blocks:
        for sub in combinations(b.members, d.t):
            counts[sub] = counts.get(sub, 0) + 1
    full = np.zeros(comb(d.v, d.t), dtype=np.int64)
    for i, sub in enumerate(combinations(range(1, d.v + 1), d.t)):
        full[i] = counts.get(sub, 0)
    return full


def is_design(d: Design) -> bool:
    """Exhaustively: every t-subset of [v] lies in exactly lambda blocks."""
    if any(b.size < d.t for b in d.blocks):
        return False
    counts = _subset_cover_counts(d)
    return bool((counts == d.lam).all())


def is_packing(d: Design) -> bool:
    """Exhaustively: every t-subset of [v] lies in at most lambda blocks."""
    if any(b.size < d.t for b in d.blocks):
        return False
    counts = _subset_cover_counts(d)
    return bool((counts <= d.lam).all())


def affine_plane(q: int) -> Design:
    """The 2-(q^2, q, 1) design of lines in GF(q)^2.

    Points are pairs (x, y) ordered lexicographically by coordinate
    code, indexed 1..q^2.  Lines are the q^2 graphs y = m*x + b plus
    the q verticals, q^2 + q blocks in total.
    """
    f = field_for_order(q)

    def pt(x, y):
        return x * q + y + 1

    blocks = []
    for m in range(q):
        for b in range(q):
            blocks.append(
                [pt(x, f.add(f.mul(m, x), b)) for x in range(q)]
            )
    for c in range(q):
        blocks.append([pt(c, y) for y in range(q)])
    fam = Family.of(q * q, [sorted(bl) for bl in blocks])
    return Design(t=2, v=q * q, lam=1, blocks=fam, kind="design")


def projective_plane(q: int) -> Design:
    """The 2-(q^2+q+1, q+1, 1) design from the projective plane PG(2, q).

    Points are 1-dimensional subspaces of GF(q)^3, named by their
    normalized vector (first nonzero coordinate 1) and ordered
    lexicographically; blocks are the 2-dimensional subspaces.  q = 2
    gives the Fano plane.
    """
    f = field_for_order(q)
    vecs = []
    for a, b, c in product(range(q), repeat=3):
        if (a, b, c) == (0, 0, 0):
            continue
        lead = a if a else (b if b else c)
        if lead == 1:
            vecs.append((a, b, c))
    vecs.sort()
    index = {v: i + 1 for i, v in enumerate(vecs)}

    blocks = []
    for u in vecs:
        line = []
        for v in vecs:
            s = 0
            for uu, vv in zip(u, v):
                s = f.add(s, f.mul(uu, vv))
            if s == 0:
                line.append(index[v])
        blocks.append(sorted(line))
    fam = Family.of(len(vecs), blocks)
    return Design(t=2, v=len(vecs), lam=1, blocks=fam, kind="design")


def circle_geometry(q: int) -> Design:
    """The 3-(q^2+1, q+1, 1) circle geometry (inversive plane) of order q.

    Points are GF(q^2) plus a point at infinity (the last index).
    Blocks are the images of the sub-line GF(q) u {inf} under all
    invertible fractional linear maps over GF(q^2), enumerated map by
    map and deduplicated; the block count q*(q^2+1) is verified.
    """
    pk = prime_power(q)
    if pk is None:
        raise NotPrimePower(f"{q} is not a prime power")
    p, e = pk
    f = field_make(p, 2 * e)
    big = f.q  # q^2
    sub = [x for x in range(big) if f.pow(x, q) == x]
    if len(sub) != q:
        raise AssertionError("subfield extraction failed")

    mul, add, inv = f.mul_table, f.add_table, f.inv_table
    ar = np.arange(big, dtype=mul.dtype)
    # PGL(2, q^2): normalize the first nonzero entry of (a, b, c, d) to 1
    b3, c3, d3 = np.meshgrid(ar, ar, ar, indexing="ij")
    b3, c3, d3 = b3.ravel(), c3.ravel(), d3.ravel()
    keep = d3 != mul[b3, c3]  # det = d - b*c with a = 1
    maps_a1 = (np.ones(int(keep.sum()), dtype=mul.dtype), b3[keep], c3[keep], d3[keep])
    c0, d0 = np.meshgrid(ar[1:], ar, indexing="ij")  # a = 0, b = 1, det = -c != 0
    c0, d0 = c0.ravel(), d0.ravel()
    maps_a0 = (
        np.zeros(c0.size, dtype=mul.dtype),
        np.ones(c0.size, dtype=mul.dtype),
        c0,
        d0,
    )
    a = np.concatenate([maps_a1[0], maps_a0[0]])
    b = np.concatenate([maps_a1[1], maps_a0[1]])
    c = np.concatenate([maps_a1[2], maps_a0[2]])
    d = np.concatenate([maps_a1[3], maps_a0[3]])
    assert a.size == big**3 - big  # |PGL(2, q^2)|

    inf = big  # 0-based index of the infinity point
    cols = []
    # sub-line points in homogeneous coordinates (u : v); infinity = (1 : 0)
    for u, v in [(s, 1) for s in sub] + [(1, 0)]:
        num = add[mul[a, u], mul[b, v]]
        den = add[mul[c, u], mul[d, v]]
        img = np.where(den == 0, inf, mul[num, inv[den]])
        cols.append(img)
    images = np.sort(np.stack(cols, axis=1), axis=1)
    uniq = np.unique(images, axis=0)
    expected = q * (q * q + 1)
    if uniq.shape[0] != expected:
        raise AssertionError(
            f"circle geometry block count {uniq.shape[0]} != {expected}"
        )
    fam = Family.of(big + 1, (uniq + 1).tolist())
    return Design(t=3, v=big + 1, lam=1, blocks=fam, kind="design")


def greedy_packing(n: int, k: int, t: int, order_seed: int = 0) -> Design:
    """Seeded greedy t-(n, k, 1) packing: desk-scale plumbing.

    Visits candidate k-subsets in a seeded pseudo-random order and keeps
    a block iff it shares < t points with everything kept so far.  When
    C(n, k) is too large to shuffle outright, falls back to seeded
    random sampling with a patience cutoff; either way the output
    passes is_packing.
    """
    if not t <= k <= n:
        raise ValueError("need t <= k <= n")
    rng = random.Random(order_seed)
    accepted: list[int] = []

    def try_add(points):
        m = 0
        for pt in points:
            m |= 1 << (pt - 1)
        for other in accepted:
            if (m & other).bit_count() >= t:
                return
        accepted.append(m)

    if comb(n, k) <= 2_000_000:
        cands = list(combinations(range(1, n + 1), k))
        rng.shuffle(cands)
        for cand in cands:
            try_add(cand)
    else:
        misses = 0
        while misses < 20_000:
            before = len(accepted)
            try_add(rng.sample(range(1, n + 1), k))
            misses = 0 if len(accepted) > before else misses + 1
    fam = Family.from_masks(n, sorted(accepted, key=lambda m: (m.bit_count(), m)))
    return Design(t=t, v=n, lam=1, blocks=fam, kind="packing")


# ---------------------------------------------------------------------------
# serialization: Family text format plus a metadata comment


def design_to_text(d: Design) -> str:
    from .setfam import family_to_text

    meta = f"design t={d.t} v={d.v} lambda={d.lam} kind={d.kind}"
    return family_to_text(d.blocks, t=d.t, comments=[meta])


def design_from_text(text: str) -> Design:
    from .setfam import family_from_text

    fam, t, comments = family_from_text(text)
    meta = next((c for c in comments if c.startswith("design ")), None)
    if meta is None:
        raise ValueError("missing design metadata comment")
    kv = dict(item.split("=", 1) for item in meta.split()[1:])
    return Design(
        t=int(kv["t"]),
        v=int(kv["v"]),
        lam=int(kv["lambda"]),
        blocks=fam,
        kind=kv["kind"],
    )


def design_to_json(d: Design) -> dict:
    from .setfam import family_to_json

    doc = family_to_json(d.blocks, t=d.t)
    doc["design"] = {"t": d.t, "v": d.v, "lambda": d.lam, "kind": d.kind}
    return doc


def design_from_json(doc: dict) -> Design:
    from .setfam import family_from_json

    fam, _t = family_from_json(doc)
    meta = doc["design"]
    return Design(
        t=int(meta["t"]),
        v=int(meta["v"]),
        lam=int(meta["lambda"]),
        blocks=fam,
        kind=meta["kind"],
    )
