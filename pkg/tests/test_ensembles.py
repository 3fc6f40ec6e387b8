"""Sensing ensembles: scaling, structure, and the binary container."""

import math
import os

import numpy as np
import pytest

from qcbp.ensembles import (BOS_KINDS, EnsembleSpec, KINDS, build_matrix,
                            evaluate_bos, load_matrix, noise_vector,
                            sample_chebyshev_points, save_matrix,
                            sparse_signal)
from qcbp.streams import RandomStream


def _random_unitary(n, stream):
    z = stream.generator.standard_normal((n, n)) \
        + 1j * stream.generator.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _spec_for(kind, N, stream):
    if kind == "custom_isometry":
        # a Fourier-flat isometry: DFT with random phases, entries 1/sqrt(N)
        gen = stream.generator
        j = np.arange(N)
        F = np.exp(2j * np.pi * np.outer(j, j) / N) / math.sqrt(N)
        D = np.exp(2j * np.pi * gen.random(N))
        return EnsembleSpec(kind, entry_bound=1.0, unitary=D[:, None] * F)
    return EnsembleSpec(kind)


def test_every_kind_builds_with_rows_scaled_by_sqrt_m():
    root = RandomStream(314)
    m, N = 12, 36
    for kind in KINDS:
        spec = _spec_for(kind, N, root.child("spec", kind))
        mat = build_matrix(spec, m, N, root.child(kind))
        assert mat.m == m and mat.N == N
        rows = mat.measurement_rows()
        assert rows.shape[1] == N
        if spec.is_bos:
            # entries of a bounded system divided by sqrt(m)
            bound = spec.entry_bound / math.sqrt(m)
            assert np.max(np.abs(rows)) <= bound + 1e-12
        # column second moments are 1/m per sampled row on average;
        # for the exact-modulus Fourier kinds this is an identity
        if kind in ("partial_dft_independent", "partial_dft_subset",
                    "nonharmonic_fourier"):
            assert np.allclose(np.abs(rows), 1.0 / math.sqrt(m))


def test_entries_are_read_only():
    mat = build_matrix(EnsembleSpec("gaussian"), 4, 8, RandomStream(0))
    with pytest.raises(ValueError):
        mat.entries[0, 0] = 1.0


def test_matrix_draw_is_reproducible():
    for kind in KINDS:
        spec = _spec_for(kind, 16, RandomStream(1).child("u"))
        a = build_matrix(spec, 8, 16, RandomStream(5).child(kind))
        b = build_matrix(spec, 8, 16, RandomStream(5).child(kind))
        assert np.array_equal(a.entries, b.entries)


def test_dft_subset_rows_are_distinct_and_orthogonal():
    m, N = 20, 64
    mat = build_matrix(EnsembleSpec("partial_dft_subset"), m, N,
                       RandomStream(8))
    idx = np.asarray(mat.sample_points)
    assert len(np.unique(idx)) == m
    assert np.all((0 <= idx) & (idx < N))
    assert np.all(np.diff(idx) > 0)
    assert mat.rows_distinct
    gram = mat.entries @ mat.entries.conj().T
    assert np.allclose(gram, (N / m) * np.eye(m), atol=1e-10)


def test_dft_subset_at_full_sampling_is_unitary():
    N = 32
    mat = build_matrix(EnsembleSpec("partial_dft_subset"), N, N,
                       RandomStream(3))
    prod = mat.entries.conj().T @ mat.entries
    assert np.allclose(prod, np.eye(N), atol=1e-10)


def test_subset_sampler_is_uniform_over_small_range():
    # all C(5,2)=10 subsets should appear with roughly equal frequency
    from collections import Counter
    gen = RandomStream(77).generator
    from qcbp.ensembles import _draw_subset
    counts = Counter(tuple(_draw_subset(gen, 5, 2)) for _ in range(5000))
    assert len(counts) == 10
    for c in counts.values():
        assert 380 <= c <= 630  # mean 500, ~6.6 sigma slack


def test_bernoulli_model_keeps_ambient_shape():
    m, N = 16, 64
    mat = build_matrix(EnsembleSpec("partial_dft_bernoulli"), m, N,
                       RandomStream(21))
    assert mat.entries.shape == (N, N)
    idx = np.asarray(mat.sample_points, dtype=int)
    mask = np.zeros(N, dtype=bool)
    mask[idx] = True
    assert np.all(mat.entries[~mask] == 0)
    rows = mat.measurement_rows()
    assert rows.shape == (idx.size, N)
    # scale uses the nominal m, not the realized count
    if idx.size:
        assert np.allclose(np.abs(rows), 1.0 / math.sqrt(m))


def test_bernoulli_selection_count_concentrates():
    N, m = 256, 64
    sizes = [build_matrix(EnsembleSpec("partial_dft_bernoulli"), m, N,
                          RandomStream(100).child(k)).sample_points.size
             for k in range(40)]
    assert 0.7 * m <= np.mean(sizes) <= 1.3 * m


def test_nonharmonic_rows_match_system_evaluation():
    spec = EnsembleSpec("nonharmonic_fourier")
    m, N = 6, 11
    mat = build_matrix(spec, m, N, RandomStream(4))
    t = np.asarray(mat.sample_points)
    assert np.all((0.0 <= t) & (t < 1.0))
    for i in range(m):
        row = evaluate_bos(spec, float(t[i]), N) / math.sqrt(m)
        assert np.allclose(mat.entries[i], row, atol=1e-12)
    # frequencies are symmetric around zero, so the system contains the
    # constant function: some column of ones / sqrt(m)
    const_col = np.flatnonzero(
        np.all(np.abs(mat.entries - 1.0 / math.sqrt(m)) < 1e-12, axis=0))
    assert const_col.size == 1


def test_chebyshev_rows_match_system_evaluation():
    spec = EnsembleSpec("chebyshev_bos")
    m, N = 9, 14
    mat = build_matrix(spec, m, N, RandomStream(10))
    t = np.asarray(mat.sample_points)
    assert np.all((-1.0 <= t) & (t <= 1.0))
    for i in range(m):
        row = evaluate_bos(spec, float(t[i]), N) / math.sqrt(m)
        assert np.allclose(mat.entries[i], row, atol=1e-12)
    assert np.allclose(mat.entries[:, 0], 1.0 / math.sqrt(m))
    assert np.isrealobj(mat.entries.real) and np.allclose(mat.entries.imag, 0)


def test_chebyshev_system_is_orthonormal_under_arcsine_weight():
    # quadrature check of E[phi_j conj(phi_k)] = delta_jk with the exact
    # pushforward t = cos(pi u): integrate over u on a fine midpoint grid
    N = 8
    u = (np.arange(20000) + 0.5) / 20000
    from qcbp.ensembles import _chebyshev_rows
    phi = _chebyshev_rows(np.cos(np.pi * u), N)
    gram = phi.T @ phi / u.size
    assert np.allclose(gram, np.eye(N), atol=2e-4)


def test_chebyshev_point_sampler_matches_arcsine_law():
    pts = sample_chebyshev_points(200000, RandomStream(6))
    assert np.all((-1.0 <= pts) & (pts <= 1.0))
    # CDF of the arcsine law: F(t) = 1 - arccos(t)/pi
    for q in (-0.9, -0.5, 0.0, 0.5, 0.9):
        emp = np.mean(pts <= q)
        exact = 1.0 - math.acos(q) / math.pi
        assert abs(emp - exact) < 5e-3


def test_custom_isometry_scaling_and_validation():
    stream = RandomStream(15)
    N = 16
    spec = _spec_for("custom_isometry", N, stream.child("u"))
    mat = build_matrix(spec, 4, N, stream.child("m"))
    # rows are sqrt(N/m) times rows of the isometry
    idx = np.asarray(mat.sample_points, dtype=int)
    expect = math.sqrt(N / 4) * spec.unitary[idx]
    assert np.allclose(mat.entries, expect)
    with pytest.raises(ValueError):
        EnsembleSpec("custom_isometry")  # missing the matrix
    with pytest.raises(ValueError):
        # a generic dense unitary violates the flatness bound K/sqrt(N)
        U = _random_unitary(N, stream.child("dense"))
        EnsembleSpec("custom_isometry", entry_bound=1.0, unitary=U)
    with pytest.raises(ValueError):
        EnsembleSpec("custom_isometry", entry_bound=1.0,
                     unitary=0.5 * np.eye(4))  # rows not unit norm


def test_entry_bounds_are_pinned_per_kind():
    assert EnsembleSpec("partial_dft_subset").entry_bound == 1.0
    assert EnsembleSpec("chebyshev_bos").entry_bound == math.sqrt(2.0)
    with pytest.raises(ValueError):
        EnsembleSpec("partial_dft_subset", entry_bound=2.0)
    with pytest.raises(ValueError):
        EnsembleSpec("chebyshev_bos", entry_bound=1.0)
    assert EnsembleSpec("gaussian").entry_bound is None
    with pytest.raises(ValueError):
        EnsembleSpec("no_such_kind")


def test_shape_validation():
    with pytest.raises(ValueError):
        build_matrix(EnsembleSpec("gaussian"), 9, 8, RandomStream(0))
    with pytest.raises(ValueError):
        build_matrix(EnsembleSpec("gaussian"), 0, 8, RandomStream(0))


def test_sparse_signal_support_and_storage():
    for trial in range(10):
        x = sparse_signal(40, 7, RandomStream(50).child(trial))
        assert x.dtype == complex
        assert np.count_nonzero(x) == 7
        assert np.all(x.imag == 0.0)
    assert np.count_nonzero(sparse_signal(10, 0, RandomStream(0))) == 0
    with pytest.raises(ValueError):
        sparse_signal(10, 11, RandomStream(0))


def test_noise_vector_has_exact_norm():
    for mag in (1e-3, 1.0, 17.5):
        e = noise_vector(33, mag, RandomStream(9))
        assert abs(np.linalg.norm(e) - mag) < 1e-12 * max(1.0, mag)
        assert np.all(e.imag == 0.0)
    assert np.linalg.norm(noise_vector(5, 0.0, RandomStream(1))) == 0.0
    with pytest.raises(ValueError):
        noise_vector(5, -1.0, RandomStream(1))


def test_container_round_trip(tmp_path):
    root = RandomStream(1234)
    for kind in KINDS:
        spec = _spec_for(kind, 24, root.child("spec", kind))
        mat = build_matrix(spec, 6, 24, root.child("draw", kind))
        path = os.path.join(tmp_path, kind + ".npz")
        save_matrix(mat, path)
        back = load_matrix(path)
        assert np.array_equal(back.entries, mat.entries)
        assert back.spec.kind == kind
        assert back.m == mat.m and back.N == mat.N
        assert back.rows_distinct == mat.rows_distinct
        assert back.seed == mat.seed
        if mat.sample_points is None:
            assert back.sample_points is None
        else:
            assert np.array_equal(np.asarray(back.sample_points),
                                  np.asarray(mat.sample_points))
        if kind == "custom_isometry":
            assert np.array_equal(back.spec.unitary, spec.unitary)
        assert back.spec.entry_bound == spec.entry_bound
