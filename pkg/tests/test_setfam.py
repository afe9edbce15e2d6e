import random

import numpy as np
import pytest

from conftest import random_family
from laminar.construct import fano_tower
from laminar.setfam import (
    Block,
    Family,
    FamilyParseError,
    contains_config,
    family_from_json,
    family_from_text,
    family_to_json,
    family_to_text,
    forbidden_matrix,
    incidence_matrix,
    is_t_laminar,
    laminarity_witness,
    maximal_sets,
    unique_chain_check,
)


def fam(n, *sets):
    return Family.of(n, sets)


class TestBlockFamily:
    def test_block_members_roundtrip(self):
        b = Block.of(5, [2, 4, 5])
        assert b.members == (2, 4, 5)
        assert b.size == 3
        assert 4 in b and 3 not in b

    def test_block_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Block.of(3, [4])

    def test_family_rejects_duplicates(self):
        with pytest.raises(ValueError):
            fam(3, [1, 2], [2, 1])

    def test_family_rejects_mixed_ground(self):
        with pytest.raises(ValueError):
            Family(3, (Block.of(3, [1]), Block.of(4, [1])))

    def test_canonical_order(self):
        f = fam(4, [1, 2, 3], [4], [1, 2]).canonical()
        assert [b.members for b in f] == [(4,), (1, 2), (1, 2, 3)]


class TestIsTLaminar:
    def test_triangle_plus_universe(self):
        f = fam(3, [1, 2], [1, 3], [2, 3], [1, 2, 3])
        assert is_t_laminar(f, 2)

    def test_two_triples_sharing_pair(self):
        f = fam(4, [1, 2, 3], [1, 2, 4])
        assert not is_t_laminar(f, 2)

    def test_fano_level0(self):
        _, f0 = fano_tower(0, materialize=True)
        assert is_t_laminar(f0, 2)

    def test_empty_family_vacuous(self):
        assert is_t_laminar(Family(5, ()), 1)

    def test_monotone_in_t(self):
        rng = random.Random(11)
        for _ in range(120):
            f = random_family(rng)
            for s in (1, 2):
                if is_t_laminar(f, s):
                    for t in range(s + 1, 4):
                        assert is_t_laminar(f, t)


class TestWitness:
    def test_only_candidate_pair(self):
        f = fam(4, [1, 2, 3], [1, 2, 4])
        w = laminarity_witness(f, 2)
        assert w == (Block.of(4, [1, 2, 3]), Block.of(4, [1, 2, 4]))

    def test_absent_on_laminar(self):
        f = fam(3, [1, 2], [1, 3], [2, 3], [1, 2, 3])
        assert laminarity_witness(f, 2) is None

    def test_classic_overlap(self):
        f = fam(3, [1, 2], [2, 3])
        assert laminarity_witness(f, 1) == (Block.of(3, [1, 2]), Block.of(3, [2, 3]))

    def test_witness_recheck(self):
        rng = random.Random(5)
        for _ in range(200):
            f = random_family(rng)
            for t in (1, 2, 3):
                w = laminarity_witness(f, t)
                assert (w is None) == is_t_laminar(f, t)
                if w is not None:
                    a, b = w
                    c = a.mask & b.mask
                    assert c.bit_count() >= t and c != a.mask and c != b.mask


class TestMaximalSets:
    def test_basic(self):
        f = fam(5, [1, 2], [1, 2, 3], [4, 5])
        out = maximal_sets(f)
        assert {b.members for b in out} == {(1, 2, 3), (4, 5)}

    def test_universe_dropped(self):
        f = fam(5, [1, 2, 3, 4, 5], [1, 2], [3, 4])
        out = maximal_sets(f, exclude_universe=True)
        assert {b.members for b in out} == {(1, 2), (3, 4)}

    def test_fano_blocks_are_maximal(self):
        _, f0 = fano_tower(0, materialize=True)
        out = maximal_sets(f0, exclude_universe=True)
        assert len(out) == 7
        assert all(b.size == 3 for b in out)

    def test_antichain_and_coverage(self):
        rng = random.Random(23)
        for _ in range(150):
            f = random_family(rng)
            out = maximal_sets(f, exclude_universe=True)
            for a in out:
                for b in out:
                    assert a == b or not (a.mask & b.mask == a.mask)
            full = (1 << f.n) - 1
            for b in f:
                if b.mask == full:
                    continue
                containers = [c for c in out if b.mask & c.mask == b.mask]
                assert containers
                # container unique when the family is 2-laminar
                if is_t_laminar(f, 2) and b.mask not in {c.mask for c in out}:
                    assert len(containers) >= 1


class TestMatrices:
    def test_incidence_rows(self):
        m = incidence_matrix(fam(2, [1], [1, 2]))
        assert m.tolist() == [[1, 0], [1, 1]]

    def test_incidence_empty(self):
        m = incidence_matrix(Family(3, ()))
        assert m.shape == (0, 3)

    def test_incidence_single(self):
        assert incidence_matrix(fam(3, [2, 3])).tolist() == [[0, 1, 1]]

    def test_forbidden_t2(self):
        assert forbidden_matrix(2).tolist() == [[0, 1, 1, 1], [1, 0, 1, 1]]

    def test_forbidden_t1_t3(self):
        assert forbidden_matrix(1).tolist() == [[0, 1, 1], [1, 0, 1]]
        z = forbidden_matrix(3)
        assert z.shape == (2, 5)
        assert int(z.sum()) == 8

    def test_contains_defining_violation(self):
        m = incidence_matrix(fam(4, [1, 2, 3], [1, 2, 4]))
        assert contains_config(m, forbidden_matrix(2))

    def test_avoids_on_laminar(self):
        f = fam(3, [1, 2], [1, 3], [2, 3], [1, 2, 3])
        assert not contains_config(incidence_matrix(f), forbidden_matrix(2))

    def test_identity_embedding(self):
        z = forbidden_matrix(2)
        assert contains_config(z, z)

    def test_too_large_config(self):
        assert not contains_config(np.ones((2, 2), dtype=np.uint8), forbidden_matrix(2))

    def test_general_fallback_three_rows(self):
        m = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=np.uint8)
        z3 = np.eye(3, dtype=np.uint8)
        assert contains_config(m, z3)
        z_impossible = np.zeros((3, 3), dtype=np.uint8)
        z_impossible[0] = 1
        assert not contains_config(np.eye(3, dtype=np.uint8), z_impossible)


class TestUniqueChain:
    def test_fano_level0(self):
        _, f0 = fano_tower(0, materialize=True)
        assert unique_chain_check(f0, 2)

    def test_incomparable_pair_over_shared_t_subset(self):
        assert not unique_chain_check(fam(4, [1, 2, 3], [1, 2, 4]), 2)

    def test_t_equal_n(self):
        f = fam(3, [1, 2, 3], [1, 2], [1, 3])
        assert unique_chain_check(f, 3)


class TestEquivalences:
    """The three characterizations agree on random families."""

    def test_random_suite(self):
        rng = random.Random(427)
        checked = 0
        for _ in range(220):
            f = random_family(rng)
            for t in (1, 2, 3):
                lam = is_t_laminar(f, t)
                avoid = not contains_config(incidence_matrix(f), forbidden_matrix(t))
                chain = unique_chain_check(f, t)
                assert lam == avoid == chain, (f, t)
                checked += 1
        assert checked >= 600


class TestSerialization:
    def test_text_roundtrip(self):
        f = fam(5, [1, 2], [2, 4, 5], [1, 2, 3, 4, 5])
        text = family_to_text(f, t=2, comments=["fixture"])
        back, t, comments = family_from_text(text)
        assert back == f and t == 2 and comments == ["fixture"]

    def test_json_roundtrip(self):
        f = fam(4, [1, 3], [2, 4])
        back, t = family_from_json(family_to_json(f, t=3))
        assert back == f and t == 3

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(FamilyParseError, match="line 2"):
            family_from_text("n=3\n2 1\n")
        with pytest.raises(FamilyParseError, match="header"):
            family_from_text("1 2\n")
