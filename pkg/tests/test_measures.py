"""Measure evaluators: closed forms, optimizers, and the registry."""

import math

import numpy as np
import pytest

from entbounds.measures import (
    MeasureResult,
    binary_entropy,
    concurrence,
    entropy_of_entanglement,
    eof_two_qubit_closed,
    eof_variational,
    er_isotropic_closed,
    get_entry,
    hashing_lower_bound,
    log_negativity,
    registry,
    regularized_eof_probe,
    rel_ent_entanglement,
)
from entbounds.qmat import (
    DensityMatrix,
    PureState,
    min_pt_eigenvalue,
    relative_entropy,
    tensor_product,
)
from entbounds.states import (
    BellDiagonalParams,
    bell_diagonal,
    isotropic,
    maximally_entangled,
    random_density,
    random_pure,
    random_separable,
)

# frozen after independent scalar evaluation
EF_ISO_075 = 0.35457890266527003   # h((1 + sqrt(3)/2) / 2) with C = 0.5
ER_ISO_075 = 0.18872187554086717   # 1 - h(0.75)
HASHING_BELL_09 = 0.5310044064107189  # 1 - h(0.9)


def _white_noise(d=4):
    return DensityMatrix(2, 2, np.eye(d) / d)


class TestMeasureResult:
    def test_rejects_negative_value(self):
        with pytest.raises(ValueError):
            MeasureResult(value=-1e-3, kind="exact")

    def test_exact_requires_zero_gap(self):
        with pytest.raises(ValueError):
            MeasureResult(value=1.0, kind="exact", gap=0.1)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            MeasureResult(value=1.0, kind="estimate")


class TestEntropyOfEntanglement:
    def test_psi_plus_normalization(self):
        assert entropy_of_entanglement(maximally_entangled(2)).value \
            == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        amps = np.zeros(4)
        amps[1] = 1.0
        assert entropy_of_entanglement(PureState(2, 2, amps)).value <= 1e-12

    def test_psi_plus_general_dimension(self):
        for d in (3, 4):
            assert entropy_of_entanglement(maximally_entangled(d)).value \
                == pytest.approx(math.log2(d), abs=1e-12)

    def test_party_symmetric(self):
        psi = random_pure(2, 3, seed=5)
        swapped = PureState(3, 2, psi.amps.reshape(2, 3).T.ravel())
        assert entropy_of_entanglement(psi).value \
            == pytest.approx(entropy_of_entanglement(swapped).value, abs=1e-9)


class TestEofClosedForm:
    def test_psi_plus(self):
        assert eof_two_qubit_closed(maximally_entangled(2).projector()).value \
            == pytest.approx(1.0, abs=1e-12)

    def test_separable_vanishes(self):
        for i in range(20):
            rho = random_separable(2, 2, 1 + i % 4, seed=10_000 + i)
            assert eof_two_qubit_closed(rho).value <= 1e-9

    def test_isotropic_frozen_value(self):
        iso = isotropic(0.75, 2)
        assert concurrence(iso) == pytest.approx(0.5, abs=1e-12)
        assert eof_two_qubit_closed(iso).value == pytest.approx(EF_ISO_075, abs=1e-12)

    def test_matches_variational(self):
        iso = isotropic(0.75, 2)
        res, _ = eof_variational(iso, m=8, budget=10_000, seed=0)
        assert abs(res.value - EF_ISO_075) <= 5e-3

    def test_rejects_wrong_dims(self):
        with pytest.raises(ValueError):
            eof_two_qubit_closed(random_density(2, 3, 1, seed=0))


class TestEofVariational:
    def test_pure_state_exact_for_any_m(self):
        psi = random_pure(2, 2, seed=42)
        target = entropy_of_entanglement(psi).value
        for m in (2, 5):
            res, _ = eof_variational(psi.projector(), m=m, budget=300, seed=0)
            assert res.value == pytest.approx(target, abs=1e-9)

    def test_fuzzed_states_against_closed_form(self):
        for i in range(6):
            rho = random_density(2, 2, 1 + i % 4, seed=7000 + i)
            closed = eof_two_qubit_closed(rho).value
            res, dec = eof_variational(rho, m=8, budget=10_000, seed=i)
            assert res.value <= closed + 5e-3
            assert res.value >= closed - 1e-9  # never below the true roof
            assert np.abs(dec.assemble() - rho.mat).max() <= 1e-8

    def test_white_noise_finds_product_basis(self):
        res, _ = eof_variational(_white_noise(), m=4, budget=2000, seed=0)
        assert res.value <= 1e-6

    def test_rejects_m_below_rank(self):
        with pytest.raises(ValueError):
            eof_variational(_white_noise(), m=3)

    def test_result_is_upper_bound_kind(self):
        res, _ = eof_variational(random_density(2, 2, 2, seed=1), budget=500, seed=0)
        assert res.kind == "upper_bound"


class TestRegularizedProbe:
    def test_pure_state_additive(self):
        psi = random_pure(2, 2, seed=8)
        target = entropy_of_entanglement(psi).value
        for n in (1, 2):
            res = regularized_eof_probe(psi.projector(), copies=n, budget=1500, seed=0)
            assert res.value == pytest.approx(target, abs=1e-6)

    def test_separable_vanishes(self):
        rho = random_separable(2, 2, 4, seed=9)
        for n in (1, 2):
            res = regularized_eof_probe(rho, copies=n, budget=2500, seed=0)
            assert res.value <= 5e-3

    def test_two_copies_never_above_one_copy(self):
        rho = isotropic(0.75, 2)
        one = regularized_eof_probe(rho, copies=1, budget=2500, seed=0)
        two = regularized_eof_probe(rho, copies=2, budget=2500, seed=0)
        assert two.value <= one.value + 1e-3

    def test_dimension_guard(self):
        big = random_density(5, 5, 1, seed=0)
        with pytest.raises(ValueError):
            regularized_eof_probe(big, copies=2)
        with pytest.raises(ValueError):
            regularized_eof_probe(isotropic(0.5, 2), copies=3)


class TestErIsotropicClosed:
    def test_psi_plus_value(self):
        assert er_isotropic_closed(1.0, 2).value == pytest.approx(1.0, abs=1e-12)

    def test_boundary_cancellation(self):
        for d in (2, 3, 4, 5):
            assert er_isotropic_closed(1.0 / d, d).value <= 1e-12

    def test_frozen_value(self):
        assert er_isotropic_closed(0.75, 2).value == pytest.approx(ER_ISO_075, abs=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            er_isotropic_closed(1.5, 2)


class TestRelEntEntanglement:
    def test_separable_near_zero(self):
        for i in range(2):
            rho = random_separable(2, 2, 3, seed=100 + i)
            res, _ = rel_ent_entanglement(rho, seed=i)
            assert res.value <= 1e-3

    def test_isotropic_matches_closed_form(self):
        for fid, d in ((0.75, 2), (0.9, 3)):
            res, _ = rel_ent_entanglement(isotropic(fid, d), max_iters=150, seed=1)
            closed = er_isotropic_closed(fid, d).value
            assert abs(res.value - closed) <= 5e-3
            assert res.value >= closed - 1e-9  # in-hull search only overshoots

    def test_psi_plus(self):
        res, _ = rel_ent_entanglement(maximally_entangled(2).projector(),
                                      max_iters=100, seed=0)
        assert abs(res.value - 1.0) <= 5e-3

    def test_certificate_consistency(self):
        rho = isotropic(0.8, 2)
        res, cert = rel_ent_entanglement(rho, max_iters=80, seed=2)
        assert relative_entropy(rho, cert.sigma) == pytest.approx(res.value, abs=1e-9)
        assert cert.weights.min() >= 0.0
        assert cert.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert min_pt_eigenvalue(cert.sigma) >= -1e-10  # separable by construction
        for q, a, b in cert.terms():
            assert a.dim_b == 1 and b.dim_b == 1

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            rel_ent_entanglement(random_density(10, 10, 1, seed=0))

    def test_zero_floor_on_pure_entangled_input(self):
        # with the regularizing floor disabled the support sentinel may
        # surface; any finite output must still be a valid upper bound
        res, _ = rel_ent_entanglement(maximally_entangled(2).projector(),
                                      max_iters=60, floor=0.0, seed=0)
        assert math.isinf(res.value) or res.value >= 1.0 - 1e-9


class TestLogNegativity:
    def test_separable_vanishes(self):
        for i in range(20):
            rho = random_separable(2, 2, 1 + i % 5, seed=11_000 + i)
            assert abs(log_negativity(rho).value) <= 1e-9

    def test_psi_plus(self):
        assert log_negativity(maximally_entangled(2).projector()).value \
            == pytest.approx(1.0, abs=1e-12)

    def test_additive_under_tensor(self):
        for i in range(20):
            rho = random_density(2, 2, 1 + i % 4, seed=12_000 + i)
            single = log_negativity(rho).value
            double = log_negativity(tensor_product(rho, rho)).value
            assert abs(double - 2.0 * single) <= 1e-9


class TestHashing:
    def test_psi_plus(self):
        assert hashing_lower_bound(maximally_entangled(2).projector()).value \
            == pytest.approx(1.0, abs=1e-12)

    def test_white_noise(self):
        assert hashing_lower_bound(_white_noise()).value == 0.0

    def test_bell_diagonal_frozen_value(self):
        rho = bell_diagonal(BellDiagonalParams((0.9, 0.1, 0.0, 0.0)))
        assert hashing_lower_bound(rho).value \
            == pytest.approx(HASHING_BELL_09, abs=1e-12)

    def test_kind_is_lower_bound(self):
        assert hashing_lower_bound(_white_noise()).kind == "lower_bound"


class TestRegistry:
    def test_names_unique_and_stable(self):
        names = [e.name for e in registry()]
        assert names == ["e_entropy", "e_f_2q", "e_f_var", "e_r", "e_r_iso",
                         "log_neg", "hashing"]
        assert len(set(names)) == len(names)

    def test_lookup(self):
        assert get_entry("e_r").kind == "upper_bound"
        with pytest.raises(KeyError):
            get_entry("nope")

    def test_all_agree_on_psi_plus(self):
        target = maximally_entangled(2).projector()
        for entry in registry():
            budget = 2000 if entry.name == "e_f_var" else 100
            value = entry.evaluate(target, budget=budget, seed=0).value
            tol = 1e-9 if entry.kind in ("exact", "lower_bound") else 5e-3
            assert abs(value - 1.0) <= tol, entry.name

    def test_pure_state_uniqueness_sample(self):
        # all measures coincide with the entropy of entanglement on pure
        # states (log-negativity excluded by design: it differs off psi_plus)
        for i in range(5):
            psi = random_pure(2, 2, seed=13_000 + i)
            rho = psi.projector()
            target = entropy_of_entanglement(psi).value
            assert abs(eof_two_qubit_closed(rho).value - target) <= 1e-9
            var, _ = eof_variational(rho, budget=300, seed=i)
            assert abs(var.value - target) <= 5e-3
            fw, _ = rel_ent_entanglement(rho, max_iters=150, seed=i)
            assert abs(fw.value - target) <= 5e-3

    def test_accepts_filters(self):
        assert not get_entry("e_f_2q").accepts(random_density(3, 3, 1, seed=0))
        assert not get_entry("e_r").accepts(random_density(10, 10, 1, seed=0))
        assert not get_entry("e_entropy").accepts(_white_noise())
        assert get_entry("log_neg").accepts(random_density(3, 3, 2, seed=0))


def test_binary_entropy_conventions():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        binary_entropy(1.2)
