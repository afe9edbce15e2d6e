"""The numba and numpy kernel implementations must agree exactly."""

import random

import numpy as np
import pytest

from laminar import _kernels
from laminar.setfam import Family, is_t_laminar


def _random_words(rng, n_sets, n_bits):
    n = rng.randint(1, n_sets)
    masks: set = set()
    while len(masks) < n:
        m = rng.getrandbits(n_bits)
        if m:
            masks.add(m)
    fam = Family.from_masks(n_bits, sorted(masks))
    return fam, fam.to_words()


class TestPopcount:
    def test_matches_bit_count(self):
        rng = random.Random(1)
        vals = [rng.getrandbits(64) for _ in range(500)] + [0, 2**64 - 1]
        arr = np.array(vals, dtype=np.uint64)
        got = _kernels.popcount_u64(arr)
        assert [int(x) for x in got] == [v.bit_count() for v in vals]


class TestViolationKernel:
    @pytest.mark.parametrize("n_bits", [6, 63, 64, 100, 130])
    def test_backends_agree(self, n_bits):
        rng = random.Random(n_bits)
        for _ in range(40):
            fam, words = _random_words(rng, 30, n_bits)
            for t in (1, 2, 3):
                nb = _kernels._nb_violation(words, t)
                np_ = _kernels._np_violation(words, t)
                # reference: first violating pair in scan order
                ref = (-1, -1)
                masks = [b.mask for b in fam]
                for i in range(len(masks)):
                    for j in range(i + 1, len(masks)):
                        c = masks[i] & masks[j]
                        if c.bit_count() >= t and c != masks[i] and c != masks[j]:
                            ref = (i, j)
                            break
                    if ref != (-1, -1):
                        break
                assert tuple(nb) == np_ == ref

    def test_dispatcher_none_for_laminar(self):
        fam = Family.of(3, [[1, 2], [1, 3], [2, 3], [1, 2, 3]])
        assert _kernels.find_violation(fam.to_words(), 2) is None

    def test_large_family_uses_kernel_path(self):
        # families over the kernel threshold go through bit-matrix code
        masks = list(range(1, 400))
        fam = Family.from_masks(16, masks)
        direct = is_t_laminar(fam, 2)
        ref = True
        for i in range(len(masks)):
            for j in range(i + 1, len(masks)):
                c = masks[i] & masks[j]
                if c.bit_count() >= 2 and c != masks[i] and c != masks[j]:
                    ref = False
                    break
            if not ref:
                break
        assert direct == ref


class TestCoverCounts:
    @pytest.mark.parametrize("t", [2, 3])
    def test_backends_agree(self, t):
        rng = random.Random(t)
        for _ in range(30):
            v = rng.randint(t + 1, 14)
            blocks = []
            for _ in range(rng.randint(1, 10)):
                size = rng.randint(t, v)
                blocks.append(sorted(rng.sample(range(v), size)))
            pts = np.array([p for b in blocks for p in b], dtype=np.int64)
            offs = np.cumsum([0] + [len(b) for b in blocks]).astype(np.int64)
            nb = _kernels._nb_pair_counts if t == 2 else _kernels._nb_triple_counts
            np_ = _kernels._np_pair_counts if t == 2 else _kernels._np_triple_counts
            assert np.array_equal(nb(pts, offs, v), np_(pts, offs, v))

    def test_reference_counting(self):
        # one block [0,1,2] on v=4: pairs (0,1),(0,2),(1,2) covered once
        pts = np.array([0, 1, 2], dtype=np.int64)
        offs = np.array([0, 3], dtype=np.int64)
        counts = _kernels.cover_counts(pts, offs, 4, 2)
        assert counts.tolist() == [1, 1, 1, 0, 0, 0]

    def test_rejects_unsupported_t(self):
        with pytest.raises(ValueError):
            _kernels.cover_counts(
                np.zeros(0, dtype=np.int64), np.zeros(1, dtype=np.int64), 4, 4
            )


class TestScanTopK:
    def test_both_backends_contain_true_argmax(self):
        from laminar.bounds import obf_table, lp_dual_value

        table = obf_table(200)
        obf_f = np.zeros(320, dtype=np.float64)
        for k in range(2, 201):
            obf_f[k] = float(table.obf(k))
        starts = [s for s, _ in table.frontier_log]
        fronts = [table.frontier_at(s) for s in starts]
        cnts = [len(f.vertices) for f in fronts]
        voff = np.concatenate([[0], np.cumsum(cnts)[:-1]]).astype(np.int64)
        vx = np.array([float(x) for f in fronts for x, _ in f.vertices])
        vy = np.array([float(y) for f in fronts for _, y in f.vertices])
        starts = np.array(starts, dtype=np.int64)
        cnts = np.array(cnts, dtype=np.int64)
        for n in (50, 120, 200):
            exact_vals = {
                m: lp_dual_value(n, m, table.frontier_at(m), table)
                for m in range(2, n)
            }
            best = max(exact_vals.values())
            true_arg = min(m for m, v in exact_vals.items() if v == best)
            for impl in (_kernels._nb_scan_topk, _kernels._np_scan_topk):
                got = impl(n, obf_f, starts, voff, cnts, vx, vy, 32)
                assert true_arg in {int(m) for m in got if m >= 0}
