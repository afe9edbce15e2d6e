"""Ground-set subsets, set families, and t-laminarity.

A family F over [n] is t-laminar when any two members sharing at least t
points are nested.  The classical laminar condition is t = 1.  Three
equivalent views are implemented and cross-checked:

  1. the pairwise predicate itself (`is_t_laminar`),
  2. avoidance of a forbidden 2 x (t+2) zero-one configuration in the
     family's incidence matrix (`contains_config` / `forbidden_matrix`),
  3. a unique-chain condition on t-subsets after augmenting the family
     with all of them (`unique_chain_check`).

Blocks are bit vectors: ground point i (1-based) is bit i-1 of an int
mask.  Families order their members; canonical order is by (cardinality,
mask value) so derived artifacts are byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Iterator, Optional

import numpy as np

from . import _kernels

# families at or above this size go through the bit-matrix kernel
_KERNEL_MIN_SETS = 256


@dataclass(frozen=True)
class Block:
    """A subset of {1..n} with bit-vector semantics (bit i-1 = point i)."""

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground-set size must be positive")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError("mask has bits outside 1..n")

    @classmethod
    def of(cls, n: int, points: Iterable[int]) -> "Block":
        mask = 0
        for p in points:
            if not 1 <= p <= n:
                raise ValueError(f"point {p} outside 1..{n}")
            mask |= 1 << (p - 1)
        return cls(n, mask)

    @classmethod
    def universe(cls, n: int) -> "Block":
        return cls(n, (1 << n) - 1)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, point: int) -> bool:
        return 1 <= point <= self.n and bool(self.mask >> (point - 1) & 1)

    def issubset(self, other: "Block") -> bool:
        return self.mask & other.mask == self.mask

    def intersection_size(self, other: "Block") -> int:
        return (self.mask & other.mask).bit_count()

    def __repr__(self):
        return f"Block({self.n}, {{{','.join(map(str, self.members))}}})"


@dataclass(frozen=True)
class Family:
    """A duplicate-free ordered list of Blocks over a common ground set."""

    n: int
    sets: tuple[Block, ...]

    def __post_init__(self):
        for b in self.sets:
            if b.n != self.n:
                raise ValueError("all blocks must share the family's ground size")
        if len({b.mask for b in self.sets}) != len(self.sets):
            raise ValueError("duplicate blocks in family")

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        return cls(n, tuple(Block.of(n, s) for s in sets))

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "Family":
        return cls(n, tuple(Block(n, m) for m in masks))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.sets)

    def canonical(self) -> "Family":
        """Members sorted by (cardinality, mask value)."""
        return Family(self.n, tuple(sorted(self.sets, key=lambda b: (b.size, b.mask))))

    def count_size_geq(self, k: int) -> int:
        return sum(1 for b in self.sets if b.size >= k)

    def to_words(self) -> np.ndarray:
        """Bit-pack into a (len, ceil(n/64)) uint64 matrix for the kernels."""
        n_words = (self.n + 63) // 64
        out = np.zeros((len(self.sets), n_words), dtype=np.uint64)
        for i, b in enumerate(self.sets):
            m = b.mask
            for w in range(n_words):
                out[i, w] = m & 0xFFFFFFFFFFFFFFFF
                m >>= 64
        return out


def _violating_index_pair(fam: Family, t: int) -> Optional[tuple[int, int]]:
    if len(fam) >= _KERNEL_MIN_SETS:
        return _kernels.find_violation(fam.to_words(), t)
    masks = [b.mask for b in fam.sets]
    for i in range(len(masks)):
        mi = masks[i]
        for j in range(i + 1, len(masks)):
            c = mi & masks[j]
            if c.bit_count() >= t and c != mi and c != masks[j]:
                return i, j
    return None


def is_t_laminar(fam: Family, t: int) -> bool:
    """True iff every pair A != B in fam has |A n B| < t or is nested.

    The empty family and singleton families are vacuously laminar.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    return _violating_index_pair(fam, t) is None


def laminarity_witness(fam: Family, t: int) -> Optional[tuple[Block, Block]]:
    """First violating pair in family order, or None when t-laminar."""
    if t < 1:
        raise ValueError("t must be >= 1")
    hit = _violating_index_pair(fam, t)
    if hit is None:
        return None
    i, j = hit
    return fam.sets[i], fam.sets[j]


def maximal_sets(fam: Family, exclude_universe: bool = False) -> Family:
    """Blocks not strictly contained in another eligible block (an antichain).

    With exclude_universe the full set [n] is removed before taking
    maximal elements, matching the structural decomposition that feeds
    the packing inequalities.
    """
    full = (1 << fam.n) - 1
    eligible = [b for b in fam.sets if not (exclude_universe and b.mask == full)]
    out = []
    for b in eligible:
        dominated = any(
            b.mask != c.mask and b.mask & c.mask == b.mask for c in eligible
        )
        if not dominated:
            out.append(b)
    return Family(fam.n, tuple(out))


def incidence_matrix(fam: Family) -> np.ndarray:
    """|F| x n zero-one matrix; entry (A, i) = 1 iff point i+1 in A."""
    out = np.zeros((len(fam), fam.n), dtype=np.uint8)
    for r, b in enumerate(fam.sets):
        for i in range(fam.n):
            if b.mask >> i & 1:
                out[r, i] = 1
    return out


def forbidden_matrix(t: int) -> np.ndarray:
    """The 2 x (t+2) configuration: columns 01, 10, and t copies of 11."""
    if t < 1:
        raise ValueError("t must be >= 1")
    z = np.ones((2, t + 2), dtype=np.uint8)
    z[0, 0] = 0
    z[1, 1] = 0
    return z


def _column_type_counts(m: np.ndarray) -> np.ndarray:
    """Counts of 00/01/10/11 columns for each ordered row pair of m."""
    a = m.astype(np.int64)
    b = 1 - a
    return np.stack([b @ b.T, b @ a.T, a @ b.T, a @ a.T])


def contains_config(m: np.ndarray, z: np.ndarray) -> bool:
    """True iff some row/column permutation of z is a submatrix of m.

    Two-row z reduces exactly to column-type counting over ordered row
    pairs of m.  Arbitrary z falls back to enumerating row selections
    and permutations with multiset matching on columns; that search is
    exponential and intended for desk-scale oracles only.
    """
    m = np.asarray(m, dtype=np.uint8)
    z = np.asarray(z, dtype=np.uint8)
    if z.shape[0] > m.shape[0] or z.shape[1] > m.shape[1]:
        return False
    if z.shape[0] == 2:
        zc = _column_type_counts(z)[:, 0, 1]
        mc = _column_type_counts(m)
        ok = (mc >= zc[:, None, None]).all(axis=0)
        np.fill_diagonal(ok, False)
        return bool(ok.any())
    return _contains_config_general(m, z)


def _contains_config_general(m: np.ndarray, z: np.ndarray) -> bool:
    r = z.shape[0]

    def col_counts(mat: np.ndarray) -> dict[tuple[int, ...], int]:
        counts: dict[tuple[int, ...], int] = {}
        for col in mat.T:
            key = tuple(int(x) for x in col)
            counts[key] = counts.get(key, 0) + 1
        return counts

    for rows in combinations(range(m.shape[0]), r):
        sub = m[list(rows)]
        for perm in permutations(range(r)):
            need = col_counts(z)
            have = col_counts(sub[list(perm)])
            if all(have.get(k, 0) >= v for k, v in need.items()):
                return True
    return False


def unique_chain_check(fam: Family, t: int) -> bool:
    """Chain condition on t-subsets after augmenting fam with all of them.

    For each t-subset T of [n], the members of size >= t containing T
    must be totally ordered by inclusion.  Without the augmentation the
    condition is vacuous for families lacking size-t members, so every
    t-subset is added first; this makes the check equivalent to
    t-laminarity.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if t > fam.n:
        return True
    masks = {b.mask for b in fam.sets}
    t_masks = []
    for pts in combinations(range(fam.n), t):
        m = 0
        for p in pts:
            m |= 1 << p
        t_masks.append(m)
        masks.add(m)
    big = [m for m in masks if m.bit_count() >= t]
    for tm in t_masks:
        ups = sorted((m for m in big if m & tm == tm), key=int.bit_count)
        for a, b in zip(ups, ups[1:]):
            if a & b != a:
                return False
    return True


# ---------------------------------------------------------------------------
# text / JSON serialization
#
# Text format: optional leading '#' comment lines, then a header line
# "n=<int>" or "n=<int> t=<int>", then one line per set listing its
# points in strictly increasing order.


class FamilyParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def family_to_text(fam: Family, t: int | None = None, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    header = f"n={fam.n}" if t is None else f"n={fam.n} t={t}"
    lines.append(header)
    for b in fam.sets:
        lines.append(" ".join(map(str, b.members)))
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> tuple[Family, int | None, list[str]]:
    """Parse the text format; returns (family, t or None, comment lines)."""
    comments: list[str] = []
    header: str | None = None
    header_line = 0
    sets: list[list[int]] = []
    n = 0
    t: int | None = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if header is None:
            header = line
            header_line = ln
            parts = dict(
                kv.split("=", 1) for kv in line.split() if "=" in kv
            )
            if "n" not in parts:
                raise FamilyParseError("header must contain n=<int>", ln)
            try:
                n = int(parts["n"])
                t = int(parts["t"]) if "t" in parts else None
            except ValueError:
                raise FamilyParseError("malformed header values", ln) from None
            continue
        try:
            pts = [int(x) for x in line.split()]
        except ValueError:
            raise FamilyParseError("non-integer point", ln) from None
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise FamilyParseError("points must be strictly increasing", ln)
        sets.append(pts)
    if header is None:
        raise FamilyParseError("missing header line", header_line or 1)
    return Family.of(n, sets), t, comments


def family_to_json(fam: Family, t: int | None = None) -> dict:
    doc: dict = {"n": fam.n, "sets": [list(b.members) for b in fam.sets]}
    if t is not None:
        doc["t"] = t
    return doc


def family_from_json(doc: dict) -> tuple[Family, int | None]:
    return Family.of(int(doc["n"]), doc["sets"]), (
        int(doc["t"]) if "t" in doc else None
    )
