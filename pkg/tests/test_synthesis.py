"""Synthetic-channel sweeps against the exhaustive enumeration oracle."""

import json

import numpy as np
import pytest

from minsum_polar import (
    brute_force_joint,
    construct_code,
    error_probability,
    hamming_weights,
    label_distribution,
    make_bsc,
    make_custom,
    make_quantized_biawgn,
    minus_transform,
    pe_exact,
    plus_transform,
    synthesize_all,
)


def leaf_posynomial(ch, n, i):
    posy = label_distribution(ch)
    for level in range(n - 1, -1, -1):
        posy = plus_transform(posy) if (i >> level) & 1 else minus_transform(posy)
    return posy


class TestSynthesizeAll:
    def test_bsc_n1(self):
        rep = synthesize_all(make_bsc(0.1), 1)
        np.testing.assert_allclose(rep.pe, [0.18, 0.1], atol=1e-12)
        assert list(rep.wt) == [0, 1]

    def test_noiseless(self):
        rep = synthesize_all(make_bsc(0.0), 3)
        assert np.all(rep.pe == 0.0)
        assert np.all(rep.z_star == 0.0)
        np.testing.assert_allclose(rep.mi, 1.0, atol=1e-12)

    def test_leaves_match_single_path(self):
        ch = make_bsc(0.2)
        rep = synthesize_all(ch, 3)
        for i in range(8):
            posy = leaf_posynomial(ch, 3, i)
            assert rep.pe[i] == pytest.approx(error_probability(posy), abs=1e-15)
            assert rep.support_size[i] == posy.support_size

    def test_support_bound_exact(self):
        for ch in (make_bsc(0.1), make_quantized_biawgn(1.0)):
            rep = synthesize_all(ch, 6)
            bound = 2 * ch.gamma * (1 << rep.wt) + 1
            assert np.all(rep.support_size <= bound)

    def test_pe_dominated_by_z_star(self):
        rep = synthesize_all(make_quantized_biawgn(0.9), 5)
        assert np.all(rep.pe <= rep.z_star + 1e-12)

    def test_average_mi_non_increasing_in_depth(self):
        ch = make_bsc(0.1)
        averages = [synthesize_all(ch, n).mi.mean() for n in range(5)]
        assert all(b <= a + 1e-9 for a, b in zip(averages, averages[1:]))

    def test_single_step_information_inequality(self):
        for ch in (make_bsc(0.1), make_quantized_biawgn(1.2)):
            base_mi = synthesize_all(ch, 0).mi[0]
            rep = synthesize_all(ch, 1)
            assert rep.mi[0] + rep.mi[1] <= 2.0 * base_mi + 1e-9

    def test_rejects_non_good_labeler(self):
        with pytest.raises(ValueError):
            synthesize_all(make_bsc(0.5), 2)

    def test_rejects_over_cap(self):
        with pytest.raises(ValueError):
            synthesize_all(make_bsc(0.1), 16)

    def test_csv_shape(self):
        rep = synthesize_all(make_bsc(0.1), 2)
        lines = rep.to_csv().splitlines()
        assert lines[0] == "i,wt,pe,z_star,mi,support_size"
        assert len(lines) == 5
        assert lines[1].startswith("0,0,")


class TestPeExact:
    def test_n1_values(self):
        ch = make_bsc(0.1)
        assert pe_exact(ch, 1, 0) == pytest.approx(0.18, abs=1e-12)
        assert pe_exact(ch, 1, 1) == pytest.approx(0.1, abs=1e-12)

    def test_base_case(self):
        for ch in (make_bsc(0.3), make_quantized_biawgn(0.8)):
            assert pe_exact(ch, 0, 0) == pytest.approx(
                error_probability(label_distribution(ch)), abs=1e-15
            )

    def test_matches_full_sweep(self):
        ch = make_quantized_biawgn(1.0)
        rep = synthesize_all(ch, 4)
        for i in (0, 5, 9, 15):
            assert pe_exact(ch, 4, i) == pytest.approx(rep.pe[i], abs=1e-14)

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError):
            pe_exact(make_bsc(0.1), 2, 4)


class TestConstructCode:
    def test_n1_k1(self):
        code = construct_code(make_bsc(0.1), 1, 1)
        assert code.info_set == [1]
        assert code.union_bound == pytest.approx(0.1, abs=1e-12)

    def test_k0_and_full(self):
        code = construct_code(make_bsc(0.1), 2, 0)
        assert code.info_set == [] and code.union_bound == 0.0
        code = construct_code(make_bsc(0.1), 2, 4)
        assert code.info_set == [0, 1, 2, 3]

    def test_matches_full_sort(self):
        ch = make_bsc(0.1)
        rep = synthesize_all(ch, 3)
        code = construct_code(ch, 3, 4)
        # ties broken to the larger index
        order = sorted(range(8), key=lambda i: (rep.pe[i], -i))
        assert code.info_set == sorted(order[:4])
        assert code.union_bound == pytest.approx(rep.pe[code.info_set].sum(), abs=1e-12)

    def test_z_star_ranking_option(self):
        ch = make_quantized_biawgn(1.0)
        rep = synthesize_all(ch, 3)
        code = construct_code(ch, 3, 3, rank_by="z_star")
        order = sorted(range(8), key=lambda i: (rep.z_star[i], -i))
        assert code.info_set == sorted(order[:3])

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            construct_code(make_bsc(0.1), 2, 5)

    def test_json_export(self):
        code = construct_code(make_bsc(0.1), 1, 1)
        obj = json.loads(json.dumps(code.to_json_dict()))
        assert obj == {"n": 1, "info_set": [1], "union_bound": 0.1}


class TestBruteForceOracle:
    def test_n0_is_base(self):
        ch = make_bsc(0.15)
        np.testing.assert_allclose(
            brute_force_joint(ch, 0, 0).coeffs, label_distribution(ch).coeffs, atol=1e-15
        )

    def test_n1_is_minus_and_plus(self):
        ch = make_bsc(0.1)
        np.testing.assert_allclose(
            brute_force_joint(ch, 1, 0).coeffs,
            minus_transform(label_distribution(ch)).coeffs,
            atol=1e-12,
        )
        np.testing.assert_allclose(
            brute_force_joint(ch, 1, 1).coeffs,
            plus_transform(label_distribution(ch)).coeffs,
            atol=1e-12,
        )

    def test_bsc_n2_all_indices(self):
        ch = make_bsc(0.1)
        for i in range(4):
            np.testing.assert_allclose(
                brute_force_joint(ch, 2, i).coeffs,
                leaf_posynomial(ch, 2, i).coeffs,
                atol=1e-12,
            )

    def test_three_label_channel(self):
        ch = make_custom({2: 0.7, -2: 0.2, 0: 0.1})
        for i in range(4):
            np.testing.assert_allclose(
                brute_force_joint(ch, 2, i).coeffs,
                leaf_posynomial(ch, 2, i).coeffs,
                atol=1e-12,
            )

    def test_rejects_large_instance(self):
        with pytest.raises(ValueError):
            brute_force_joint(make_quantized_biawgn(1.0), 3, 0)


def test_hamming_weights():
    assert list(hamming_weights(3)) == [0, 1, 1, 2, 1, 2, 2, 3]


def test_budget_split_path_matches_batched_path(monkeypatch):
    import minsum_polar.synthesis as syn

    ch = make_bsc(0.1)
    reference = synthesize_all(ch, 7)
    monkeypatch.setattr(syn, "_COEFF_BUDGET", 500)
    split = syn.synthesize_all(ch, 7)
    np.testing.assert_allclose(split.pe, reference.pe, atol=1e-14)
    np.testing.assert_allclose(split.z_star, reference.z_star, atol=1e-12)
    np.testing.assert_allclose(split.mi, reference.mi, atol=1e-14)
    assert np.array_equal(split.support_size, reference.support_size)
