"""Label-posynomial operators: transforms, bounds, and their evolution laws."""

import itertools
import math

import numpy as np
import pytest

from minsum_polar import (
    LabelPosynomial,
    above,
    below,
    error_probability,
    evaluate,
    hadamard,
    label_distribution,
    make_bsc,
    make_quantized_biawgn,
    minus_transform,
    mirror,
    mutual_information,
    neg_op,
    plus_transform,
    pos_op,
    z_star,
    z_value,
)
from minsum_polar.posynomial import _square_direct, _square_fft


def bsc_base(p):
    return label_distribution(make_bsc(p))


def random_posynomial(rng, t_max=None, sparse=False):
    t_max = int(rng.integers(1, 9)) if t_max is None else t_max
    c = rng.random(2 * t_max + 1)
    if sparse:
        c *= rng.random(2 * t_max + 1) < 0.7
    if c.sum() == 0.0:
        c[0] = 1.0
    return LabelPosynomial(t_max, 0.5 * c / c.sum())


def reference_minus(posy):
    """Direct double sum over (t_a, t_b, u) of the defining recursion."""
    t_max = posy.t_max
    out = np.zeros(2 * t_max + 1)
    for ta in range(-t_max, t_max + 1):
        for tb in range(-t_max, t_max + 1):
            t = int(np.sign(ta) * np.sign(tb) * min(abs(ta), abs(tb)))
            # u = 0 and u = 1 rows contribute equally by the mirror symmetry
            out[t + t_max] += 2.0 * posy.coeff(ta) * posy.coeff(tb)
    return out


def reference_plus(posy):
    """Direct double sum over (t_a, t_b, u) of the defining recursion."""
    t_max = posy.t_max
    out = np.zeros(4 * t_max + 1)
    for ta in range(-t_max, t_max + 1):
        for tb in range(-t_max, t_max + 1):
            # u = 0 branch: t_a + t_b with the u_i = 0 rows
            out[ta + tb + 2 * t_max] += posy.coeff(ta) * posy.coeff(tb)
            # u = 1 branch: t_b - t_a with the mirrored left row
            out[tb - ta + 2 * t_max] += posy.coeff(-ta) * posy.coeff(tb)
    return out


class TestConstruction:
    def test_rejects_negative_coefficients(self):
        with pytest.raises(ValueError):
            LabelPosynomial(1, [-0.1, 0.6, 0.0])

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            LabelPosynomial(2, [0.5, 0.5])

    def test_coeffs_are_read_only(self):
        posy = bsc_base(0.1)
        with pytest.raises(ValueError):
            posy.coeffs[0] = 1.0

    def test_json_round_trip(self):
        posy = label_distribution(make_quantized_biawgn(0.9))
        again = LabelPosynomial.from_json(posy.to_json())
        assert again.t_max == posy.t_max
        assert np.array_equal(again.coeffs, posy.coeffs)


class TestEvaluate:
    def test_normalization_point(self):
        assert evaluate(bsc_base(0.1), 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_hand_value(self):
        # 0.45 / 3 + 0.05 * 3
        assert evaluate(bsc_base(0.1), 1.0 / 3.0) == pytest.approx(0.30, abs=1e-15)

    def test_any_normalized_at_one(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            assert evaluate(random_posynomial(rng), 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_rejects_nonpositive_xi(self):
        with pytest.raises(ValueError):
            evaluate(bsc_base(0.1), 0.0)


class TestFoldingOperators:
    def test_mirror(self):
        m = mirror(bsc_base(0.1))
        assert m.as_dict() == {1: 0.05, -1: 0.45}

    def test_mirror_involution_and_fixed_point(self):
        rng = np.random.default_rng(3)
        posy = random_posynomial(rng)
        assert np.array_equal(mirror(mirror(posy)).coeffs, posy.coeffs)
        sym = LabelPosynomial(1, [0.2, 0.1, 0.2])
        assert np.array_equal(mirror(sym).coeffs, sym.coeffs)

    def test_pos_neg_ops(self):
        posy = LabelPosynomial(1, [0.3, 0.2, 0.1])  # c(-1)=0.3, c(0)=0.2, c(1)=0.1
        assert pos_op(posy).as_dict() == {-1: 0.1, 0: 0.2, 1: 0.1}
        assert neg_op(posy).as_dict() == {-1: 0.3, 0: 0.2, 1: 0.3}

    def test_hadamard(self):
        a = LabelPosynomial.from_dict({1: 2.0, -1: 3.0})
        b = LabelPosynomial.from_dict({1: 5.0, -1: 7.0})
        assert hadamard(a, b).as_dict() == {1: 10.0, -1: 21.0}

    def test_hadamard_range_mismatch(self):
        with pytest.raises(ValueError):
            hadamard(bsc_base(0.1), label_distribution(make_quantized_biawgn(1.0)))

    def test_above_below_hand_values(self):
        posy = bsc_base(0.1)
        assert above(posy).as_dict() == {-1: 0.45, 0: 0.45}
        assert below(posy).as_dict() == {0: 0.05, 1: 0.05}

    def test_above_below_edges_empty(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            posy = random_posynomial(rng)
            assert above(posy).coeff(posy.t_max) == 0.0
            assert below(posy).coeff(-posy.t_max) == 0.0


class TestTransforms:
    def test_minus_hand_value(self):
        got = minus_transform(bsc_base(0.1))
        assert got.coeff(1) == pytest.approx(0.41, abs=1e-12)
        assert got.coeff(-1) == pytest.approx(0.09, abs=1e-12)
        assert got.coeff(0) == 0.0

    def test_plus_hand_value(self):
        got = plus_transform(bsc_base(0.1))
        assert got.coeff(2) == pytest.approx(0.405, abs=1e-12)
        assert got.coeff(0) == pytest.approx(0.09, abs=1e-12)
        assert got.coeff(-2) == pytest.approx(0.005, abs=1e-12)

    def test_noiseless_stays_noiseless(self):
        base = bsc_base(0.0)
        assert minus_transform(base).as_dict() == {1: 0.5}
        assert plus_transform(base).as_dict() == {2: 0.5}

    def test_normalization_preserved(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            posy = random_posynomial(rng, sparse=True)
            assert abs(minus_transform(posy).total - 0.5) <= 1e-12
            assert abs(plus_transform(posy).total - 0.5) <= 1e-12

    def test_against_direct_double_sums(self):
        rng = np.random.default_rng(6)
        cases = [bsc_base(0.1), label_distribution(make_quantized_biawgn(1.0))]
        cases += [random_posynomial(rng, t_max=4, sparse=True) for _ in range(30)]
        for posy in cases:
            np.testing.assert_allclose(
                minus_transform(posy).coeffs, reference_minus(posy), atol=1e-12
            )
            np.testing.assert_allclose(
                plus_transform(posy).coeffs, reference_plus(posy), atol=1e-12
            )

    def test_fft_matches_direct_convolution(self):
        rng = np.random.default_rng(7)
        for t_max in (5, 300, 1024, 4096):
            c = rng.random(2 * t_max + 1)
            c *= 0.5 / c.sum()
            np.testing.assert_allclose(
                _square_fft(c), _square_direct(c), atol=1e-10
            )

    def test_plus_uses_both_paths_consistently(self):
        rng = np.random.default_rng(8)
        c = rng.random(2 * 400 + 1)  # length 801, above the direct cutoff
        posy = LabelPosynomial(400, 0.5 * c / c.sum())
        via_fft = plus_transform(posy)
        direct = 2.0 * _square_direct(posy.coeffs)
        np.testing.assert_allclose(via_fft.coeffs, direct, atol=1e-10)


class TestErrorProbability:
    def test_bsc_base_is_p(self):
        # brute force over the two labels: error only on the flipped output
        for p in (0.05, 0.1, 0.2):
            assert error_probability(bsc_base(p)) == pytest.approx(p, abs=1e-15)

    def test_minus_is_two_p_one_minus_p(self):
        for p in (0.05, 0.1, 0.2):
            # oracle: enumerate the 4 label pairs and both u1 values directly
            alpha = {1: 1.0 - p, -1: p}
            pe = 0.0
            for ta, tb, u1 in itertools.product((1, -1), (1, -1), (0, 1)):
                t = int(np.sign(ta) * np.sign(tb) * min(abs(ta), abs(tb)))
                # u0 = 0 slice; left branch sees u0 ^ u1
                w = 0.25 * alpha[ta if u1 == 0 else -ta] * alpha[tb if u1 == 0 else -tb]
                if t < 0:
                    pe += 2 * w
                elif t == 0:
                    pe += w  # cannot happen for the BSC, kept for completeness
            assert pe == pytest.approx(2 * p * (1 - p), abs=1e-15)
            assert error_probability(minus_transform(bsc_base(p))) == pytest.approx(
                2 * p * (1 - p), abs=1e-12
            )

    def test_plus_value(self):
        # tie at t = 0 counts fully as error mass
        assert error_probability(plus_transform(bsc_base(0.1))) == pytest.approx(0.1, abs=1e-12)

    def test_all_positive_support(self):
        assert error_probability(LabelPosynomial.from_dict({1: 0.3, 2: 0.2})) == 0.0


class TestBounds:
    def test_z_value_hand_values(self):
        base = bsc_base(0.1)
        assert z_value(base, 1.0 / math.sqrt(2.0)) == pytest.approx(0.7778174593052023, abs=1e-12)
        assert z_value(base, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert z_value(base, 1.0 / 3.0) == pytest.approx(0.6, abs=1e-12)

    def test_z_value_domain(self):
        with pytest.raises(ValueError):
            z_value(bsc_base(0.1), 1.5)

    def test_z_star_closed_forms(self):
        v, xi = z_star(bsc_base(0.1))
        assert v == pytest.approx(0.6, abs=1e-12)
        assert xi == pytest.approx(1.0 / 3.0, abs=1e-9)
        v, _ = z_star(bsc_base(0.25))
        assert v == pytest.approx(2.0 * math.sqrt(3.0) / 4.0, abs=1e-12)

    def test_z_star_boundary_cases(self):
        assert z_star(bsc_base(0.0)) == (0.0, 0.0)
        assert z_star(LabelPosynomial.from_dict({0: 0.5})) == (1.0, 1.0)

    def test_z_star_far_negative_support(self):
        # early probes sit on the clipped-exponent plateau; the search must
        # still find the interior minimum near xi = 1
        posy = LabelPosynomial.from_dict({-100: 1e-6, 1: 0.5 - 1e-6})
        v, xi = z_star(posy)
        us = np.linspace(-0.5, 0.0, 20001)
        grid = min(z_value(posy, float(2.0**u)) for u in us)
        assert v <= grid + 1e-12
        assert 0.0 < xi <= 1.0
        assert v == pytest.approx(0.9283185919702857, abs=1e-9)

    def test_bound_dominates_error_probability(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            posy = random_posynomial(rng, sparse=True)
            pe = error_probability(posy)
            for xi0 in (0.1, 0.25, 0.5, 1.0 / math.sqrt(2.0), 1.0):
                assert pe <= z_value(posy, xi0) + 1e-12

    def test_evolution_laws(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            posy = random_posynomial(rng)
            v, xi = z_star(posy)
            v_plus, xi_plus = z_star(plus_transform(posy))
            assert v_plus == pytest.approx(v * v, rel=1e-9, abs=1e-300)
            assert abs(xi_plus - xi) < 1e-6
            assert z_star(minus_transform(posy)).value <= 2.0 * v + 1e-12

    def test_minimizer_is_a_local_minimum(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            posy = random_posynomial(rng)
            v, xi = z_star(posy)
            if not 0.0 < xi < 1.0:
                continue
            assert z_value(posy, min(xi * (1 + 1e-6), 1.0)) >= v - 1e-12
            assert z_value(posy, xi * (1 - 1e-6)) >= v - 1e-12


class TestMutualInformation:
    def test_bsc_capacity(self):
        assert mutual_information(bsc_base(0.1)) == pytest.approx(0.5310044064107188, abs=1e-12)

    def test_extremes(self):
        assert mutual_information(bsc_base(0.5)) == 0.0
        assert mutual_information(bsc_base(0.0)) == pytest.approx(1.0, abs=1e-15)

    def test_in_unit_interval(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            mi = mutual_information(random_posynomial(rng, sparse=True))
            assert 0.0 <= mi <= 1.0
