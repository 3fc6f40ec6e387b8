"""The l1 decoder against closed forms, an independent oracle, and its
own optimality certificates."""

import numpy as np
import pytest

from qcbp.ensembles import EnsembleSpec, build_matrix, noise_vector, sparse_signal
from qcbp.solver import (DecodeOptions, operator_norm, qcbp_decode,
                         range_distance, reference_decode)
from qcbp.streams import RandomStream

_TIGHT = DecodeOptions(tol_feas=1e-9, tol_rel=1e-11, max_iter=200000,
                       step_ratio=0.03)


def test_zero_data_returns_zero():
    A = np.eye(4)
    res = qcbp_decode(A, np.zeros(4), 0.0)
    assert res.status == "converged"
    assert np.all(res.solution == 0)
    assert res.objective == 0.0


def test_small_data_inside_ball_returns_zero():
    A = RandomStream(1).generator.standard_normal((5, 9))
    y = np.full(5, 0.1)
    res = qcbp_decode(A, y, eta=1.0)
    assert res.status == "converged"
    assert np.all(res.solution == 0)


def test_scalar_problem_soft_shrinks():
    # min |z| s.t. |z - 3| <= 1 has the closed-form solution z = 2
    res = qcbp_decode(np.array([[1.0]]), np.array([3.0]), 1.0, _TIGHT)
    assert res.status == "converged"
    assert abs(res.solution[0] - 2.0) < 1e-7


def test_diagonal_problem_matches_kkt_solution():
    # A = I: the minimizer soft-thresholds every coordinate by a common
    # level chosen to use the whole radius, sum_i min(|y_i|, lam)^2 = eta^2.
    # For y = (4, 1, 0.5), eta = 1 the level lands in (0.5, 1]:
    # 2 lam^2 + 0.25 = 1, lam = sqrt(3/8), optimum (4 - lam, 1 - lam, 0).
    y = np.array([4.0, 1.0, 0.5])
    lam = np.sqrt(3.0 / 8.0)
    expect = [4.0 - lam, 1.0 - lam, 0.0]
    res = qcbp_decode(np.eye(3), y, 1.0, _TIGHT)
    assert np.allclose(res.solution.real, expect, atol=1e-6)
    ref = reference_decode(np.eye(3), y, 1.0)
    assert np.allclose(ref.real, expect, atol=1e-9)


def test_basis_pursuit_identity_interpolates():
    # eta = 0 with an orthonormal matrix reproduces the data exactly
    gen = RandomStream(7).generator
    q, _ = np.linalg.qr(gen.standard_normal((6, 6)))
    x = np.array([0, 1.5, 0, -2.0, 0, 0.25])
    res = qcbp_decode(q, q @ x, 0.0, _TIGHT)
    assert res.status == "converged"
    assert np.linalg.norm(res.solution - x) < 1e-7


def test_infeasible_target_is_reported():
    # rank-1 sensing matrix, data off the range
    A = np.outer(np.ones(3), np.ones(4))
    y = np.array([1.0, -1.0, 0.0])
    res = qcbp_decode(A, y, eta=1e-3)
    assert res.status == "infeasible_set_empty"
    assert np.all(res.solution == 0)


def test_range_distance_exact_values():
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).T  # 3x2, range = xy-plane
    assert range_distance(A, np.array([2.0, 3.0, 0.0])) < 1e-12
    assert abs(range_distance(A, np.array([0.0, 0.0, 5.0])) - 5.0) < 1e-12
    # rank-deficient square matrix
    B = np.ones((3, 3))
    assert range_distance(B, np.ones(3)) < 1e-12
    d = range_distance(B, np.array([1.0, 0.0, 0.0]))
    assert abs(d - np.sqrt(2.0 / 3.0)) < 1e-12


def test_max_iter_budget_is_honored():
    gen = RandomStream(3).generator
    A = gen.standard_normal((10, 30))
    y = gen.standard_normal(10)
    res = qcbp_decode(A, y, 1e-8, DecodeOptions(max_iter=3))
    assert res.status == "max_iter"
    assert res.iterations <= 3


def test_converged_solutions_are_feasible():
    root = RandomStream(17)
    for trial in range(8):
        inst = root.child(trial)
        A = build_matrix(EnsembleSpec("gaussian"), 20, 50, inst.child("A"))
        x0 = sparse_signal(50, 4, inst.child("x")).real
        e = noise_vector(20, 1e-2, inst.child("e")).real
        y = A.entries.real @ x0 + e
        eta = 2e-2
        res = qcbp_decode(A.entries.real, y, eta,
                          DecodeOptions(step_ratio=0.03))
        assert res.status == "converged"
        tol_feas = 1e-6 * max(1.0, np.linalg.norm(y))
        assert res.residual_norm <= eta + tol_feas
        assert abs(res.objective - np.sum(np.abs(res.solution))) < 1e-12


def test_agrees_with_reference_oracle():
    # moderate accuracy here; the acceptance gate repeats this at tight
    # tolerances
    root = RandomStream(23)
    worst_obj = 0.0
    worst_dist = 0.0
    for trial in range(12):
        inst = root.child(trial)
        m, N = 24, 48
        kind = ("gaussian", "partial_dft_subset",
                "chebyshev_bos")[trial % 3]
        A = build_matrix(EnsembleSpec(kind), m, N, inst.child("A")).entries
        x0 = sparse_signal(N, 5, inst.child("x"))
        e = noise_vector(m, 1e-3, inst.child("e"))
        y = A @ x0 + e
        eta = 1e-3 if trial % 2 else 2e-3
        res = qcbp_decode(A, y, eta, _TIGHT)
        ref = reference_decode(A, y, eta)
        ref_obj = np.sum(np.abs(ref))
        scale = max(1.0, np.linalg.norm(ref))
        worst_obj = max(worst_obj, abs(res.objective - ref_obj)
                        / max(ref_obj, 1e-30))
        worst_dist = max(worst_dist,
                         np.linalg.norm(res.solution - ref) / scale)
    assert worst_obj < 1e-6
    assert worst_dist < 1e-3


def test_solution_scales_with_matrix_and_data():
    inst = RandomStream(31)
    A = inst.child("A").generator.standard_normal((12, 26))
    x0 = sparse_signal(26, 3, inst.child("x")).real
    y = A @ x0
    eta = 1e-4
    base = qcbp_decode(A, y, eta, _TIGHT)
    # multiplying the matrix by c divides the solution by c
    c = 7.5
    scaled = qcbp_decode(c * A, y, eta, _TIGHT)
    assert np.allclose(scaled.solution, base.solution / c, atol=1e-7)
    # multiplying data and radius by c multiplies the solution by c
    moved = qcbp_decode(A, c * y, c * eta, _TIGHT)
    assert np.allclose(moved.solution, c * base.solution, atol=1e-6 * c)


def test_objective_is_monotone_in_radius():
    inst = RandomStream(41)
    A = inst.child("A").generator.standard_normal((16, 40))
    y = A @ sparse_signal(40, 6, inst.child("x")).real
    objs = []
    for eta in (0.0, 1e-3, 1e-2, 1e-1, 1.0):
        res = qcbp_decode(A, y, eta, _TIGHT)
        assert res.status == "converged"
        objs.append(res.objective)
    slack = 1e-9 * max(1.0, objs[0])
    for lo, hi in zip(objs[1:], objs[:-1]):
        assert lo <= hi + slack


def test_exact_recovery_in_the_well_posed_regime():
    hits = 0
    for trial in range(10):
        inst = RandomStream(59).child(trial)
        A = build_matrix(EnsembleSpec("gaussian"), 32, 64,
                         inst.child("A")).entries.real
        x0 = sparse_signal(64, 5, inst.child("x")).real
        res = qcbp_decode(A, A @ x0, 0.0, DecodeOptions(step_ratio=0.03))
        if (res.status == "converged"
                and np.linalg.norm(res.solution - x0)
                <= 1e-5 * np.linalg.norm(x0)):
            hits += 1
    assert hits >= 9


def test_complex_dtype_matches_real_fast_path():
    inst = RandomStream(67)
    A = inst.child("A").generator.standard_normal((14, 30))
    x0 = sparse_signal(30, 4, inst.child("x")).real
    y = A @ x0 + noise_vector(14, 1e-3, inst.child("e")).real
    real_res = qcbp_decode(A, y, 1e-3, _TIGHT)
    # output dtype is uniformly complex, but the real path must produce
    # exactly-zero imaginary parts
    assert np.all(real_res.solution.imag == 0.0)
    # a complex-dtype copy with zero imaginary parts routes to the same
    # real path and must agree exactly
    same = qcbp_decode(A.astype(complex), y.astype(complex), 1e-3, _TIGHT)
    assert np.array_equal(same.solution, real_res.solution)
    # rotating the data by a unit phase forces genuinely complex
    # arithmetic on an equivalent problem; the solution rotates with it
    phase = np.exp(0.3j)
    rot = qcbp_decode(A.astype(complex), phase * y, 1e-3, _TIGHT)
    assert np.linalg.norm(rot.solution / phase - real_res.solution) < 1e-6
    assert abs(rot.objective - real_res.objective) < 1e-8


def test_genuinely_complex_instances_decode():
    inst = RandomStream(71)
    A = build_matrix(EnsembleSpec("partial_dft_subset"), 20, 40,
                     inst.child("A")).entries
    x0 = sparse_signal(40, 4, inst.child("x"))  # complex container
    x0 = x0 * np.exp(1j * 0.7)  # rotate so imag parts are honest
    y = A @ x0
    res = qcbp_decode(A, y, 0.0, _TIGHT)
    assert res.status == "converged"
    assert np.linalg.norm(res.solution - x0) < 1e-5 * np.linalg.norm(x0)


def test_operator_norm_matches_svd():
    gen = RandomStream(83).generator
    for shape in ((5, 5), (8, 3), (3, 8), (20, 50)):
        A = gen.standard_normal(shape) + 1j * gen.standard_normal(shape)
        exact = np.linalg.svd(A, compute_uv=False)[0]
        est = operator_norm(A, tol=1e-6)
        assert abs(est - exact) <= 1e-4 * exact


def test_option_validation():
    with pytest.raises(ValueError):
        DecodeOptions(tol_feas=-1.0)
    with pytest.raises(ValueError):
        DecodeOptions(max_iter=0)
    with pytest.raises(ValueError):
        DecodeOptions(step_ratio=0.0)
    with pytest.raises(ValueError):
        qcbp_decode(np.eye(3), np.ones(4), 0.0)  # shape mismatch
    with pytest.raises(ValueError):
        qcbp_decode(np.eye(3), np.ones(3), -1.0)  # negative radius


def test_reference_oracle_guards_its_domain():
    with pytest.raises(ValueError):
        reference_decode(np.eye(65), np.ones(65), 0.0)
    with pytest.raises(ValueError):
        reference_decode(np.eye(4), np.ones(4), 0.0, tol=1e-6)
