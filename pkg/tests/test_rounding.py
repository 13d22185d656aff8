"""Projection rounding: the single-contraction bound and the family construction."""
from __future__ import annotations

import numpy as np
import pytest

from conftest import random_exact_pvm, random_hermitian

from syncgames import (
    build_synbcs,
    check_game_algebra_relations,
    correlation_from_tracial,
    is_perfect,
    is_synchronous,
    mermin_peres_system,
    pauli_magic_square_rep,
    strategy_from_rep,
)
from syncgames.errors import BoundaryAmbiguityError, ValidationError
from syncgames.matops import norm2
from syncgames.rounding import (
    family_budget_constant,
    orthogonalize_family,
    round_contraction,
)
from syncgames.strategies import OperatorStrategy

BOUND_FACTOR = 2 * np.sqrt(2)


def perturbed_pvm(d, m, rng, eps):
    """An exact PVM nudged by Hermitian noise of operator norm eps per element."""
    return [p + random_hermitian(d, rng, scale=eps) for p in random_exact_pvm(d, m, rng)]


def test_exact_projection_is_fixed():
    p = np.diag([1.0, 1.0, 0.0]).astype(complex)
    q, report = round_contraction(p)
    assert np.allclose(q, p)
    assert report.defect == 0.0
    assert report.distance <= 1e-15


def test_two_level_contraction_matches_hand_computation():
    q, report = round_contraction(np.diag([0.9, 0.1]))
    assert np.allclose(q, np.diag([1.0, 0.0]))
    assert report.distance == pytest.approx(0.1, abs=1e-12)
    assert report.defect == pytest.approx(0.09, abs=1e-12)
    assert report.bound == pytest.approx(2 * np.sqrt(2) * 0.09, abs=1e-12)
    assert report.bound_holds


def test_distance_bound_never_violated_on_random_contractions():
    rng = np.random.default_rng(101)
    for _ in range(300):
        d = int(rng.integers(2, 17))
        r = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        p = r @ r.conj().T
        p /= np.linalg.norm(p, 2)
        try:
            q, report = round_contraction(p)
        except BoundaryAmbiguityError:
            q, report = round_contraction(p, boundary_margin=0.0)
        assert report.distance <= BOUND_FACTOR * report.defect + 1e-12


def test_boundary_ambiguity_and_override():
    p = np.diag([0.5, 0.1])
    with pytest.raises(BoundaryAmbiguityError):
        round_contraction(p)
    q, _ = round_contraction(p, boundary_margin=0.0)
    assert np.allclose(q, np.diag([1.0, 0.0]))


def test_input_eigenvalue_slack():
    with pytest.raises(ValidationError):
        round_contraction(np.diag([1.2, 0.0]))
    q, _ = round_contraction(np.diag([1.05, 0.0]))  # within the default slack: clipped
    assert np.allclose(q, np.diag([1.0, 0.0]))


def test_round_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        round_contraction(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_family_exact_pvm_is_fixed():
    rng = np.random.default_rng(7)
    pvm = random_exact_pvm(6, 3, rng)
    qs, report = orthogonalize_family(pvm, sum_one=True)
    assert max(report.distances) <= 1e-12
    assert report.outputs_exact


def test_family_two_level_sum_one_example():
    qs, report = orthogonalize_family(
        [np.diag([0.95, 0.05]), np.diag([0.05, 0.95])], sum_one=True
    )
    assert np.allclose(qs[0], np.diag([1.0, 0.0]))
    assert np.allclose(qs[1], np.diag([0.0, 1.0]))
    assert report.outputs_exact


def test_family_perturbation_recovery():
    rng = np.random.default_rng(42)
    eps = 1e-3
    for trial in range(10):
        d, m = 8, 3
        ps = perturbed_pvm(d, m, rng, eps)
        qs, report = orthogonalize_family(ps, sum_one=True)
        assert report.outputs_exact
        assert report.max_distance <= 1e-2
        assert report.within_budget


def test_family_rate_tracks_perturbation():
    rng = np.random.default_rng(43)
    m = 4
    for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        ps = perturbed_pvm(10, m, rng, eps)
        qs, report = orthogonalize_family(ps, sum_one=True)
        assert report.input_scale > 0
        observed = report.max_distance / report.input_scale
        assert observed <= family_budget_constant(m)
        assert report.outputs_exact


def test_family_outputs_mutually_orthogonal_projections():
    rng = np.random.default_rng(44)
    ps = perturbed_pvm(12, 5, rng, 1e-4)
    qs, report = orthogonalize_family(ps, sum_one=False)
    for i, q in enumerate(qs):
        assert norm2(q - q @ q) <= 1e-12
        assert norm2(q - q.conj().T) <= 1e-12
        for j in range(i + 1, len(qs)):
            assert norm2(q @ qs[j]) <= 1e-12
    assert report.sum_defect_after >= 0.0


def test_family_degenerate_sizes():
    qs, report = orthogonalize_family([])
    assert qs == []
    with pytest.raises(ValidationError):
        orthogonalize_family([], sum_one=True)
    qs, report = orthogonalize_family([np.diag([0.9, 0.8])], sum_one=True)
    assert np.allclose(qs[0], np.eye(2))


def test_family_mixed_dimensions_rejected():
    with pytest.raises(ValidationError):
        orthogonalize_family([np.eye(2), np.eye(3)])


def test_family_boundary_ambiguity():
    with pytest.raises(BoundaryAmbiguityError):
        orthogonalize_family([np.diag([0.5, 0.2])])


def test_rounded_perturbed_strategy_is_perfect_again():
    # per-input rounding of a slightly perturbed perfect strategy restores a
    # perfect correlation: losing entries are second order in the distance
    rng = np.random.default_rng(45)
    sys_ = mermin_peres_system()
    game = build_synbcs(sys_)
    strategy = strategy_from_rep(pauli_magic_square_rep(), sys_)
    eps = 1e-6
    rounded = {}
    for i in game.inputs:
        outputs = strategy.row_outputs(i)
        noisy = [
            strategy.pvms[(i, a)] + random_hermitian(4, rng, scale=eps) for a in outputs
        ]
        qs, _ = orthogonalize_family(noisy, sum_one=True)
        for a, q in zip(outputs, qs):
            rounded[(i, a)] = q
    restored = OperatorStrategy(dim=4, inputs=strategy.inputs, outputs=strategy.outputs, pvms=rounded)
    report = check_game_algebra_relations(game, restored, tol=1e-4)
    assert report.passes
    corr = correlation_from_tracial(restored, tol=1e-4)
    assert is_synchronous(corr, 1e-9)
    assert is_perfect(corr, game, 1e-9)
