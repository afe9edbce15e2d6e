"""Shared generators for randomized harnesses (all seeded, deterministic)."""

import random

from laminar.setfam import Family


def random_family(rng: random.Random, n_cap: int = 7, size_cap: int = 12) -> Family:
    """A duplicate-free random family on a random small ground set."""
    n = rng.randint(2, n_cap)
    want = rng.randint(0, size_cap)
    masks = set()
    while len(masks) < want:
        m = rng.randint(1, (1 << n) - 1)
        masks.add(m)
        if len(masks) >= (1 << n) - 1:
            break
    return Family.from_masks(n, sorted(masks))


def random_laminar_family(rng: random.Random, n: int, t: int, tries: int = 60) -> Family:
    """Greedy random t-laminar family on [n]: add subsets while legal."""
    masks: list[int] = []
    for _ in range(tries):
        cand = rng.randint(1, (1 << n) - 1)
        if cand in masks:
            continue
        ok = True
        for m in masks:
            c = m & cand
            if c.bit_count() >= t and c != m and c != cand:
                ok = False
                break
        if ok:
            masks.append(cand)
    return Family.from_masks(n, masks)
