import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from paving_lab.errors import BudgetExceeded, PavingLabError
from paving_lab.frames import (
    conference_projection,
    find_difference_set,
    gram_projection,
    harmonic_frame,
    paley_conference,
)
from paving_lab.linalg import random_projection
from paving_lab.paving import bhkw_partition
from paving_lab.symmetry import (
    SymmetryVector,
    bhkw_weights,
    canonical_form,
    conj_a_certificate,
    conj_b_trace_suite,
    interval_symmetries,
    min_symmetry_norm,
    psp_norm,
    psp_norm_via_spectra,
    singer_parameters,
)

P6 = conference_projection(paley_conference(5))


def rank_one(c):
    b = np.sqrt(c * (1 - c))
    return np.array([[1 - c, b], [b, c]])


def test_symmetry_vector():
    s = SymmetryVector((-1, 1, 1))
    assert s.canonical().signs == (1, -1, -1)
    assert s.negate().signs == (1, -1, -1)
    with pytest.raises(PavingLabError):
        SymmetryVector((1, 0))


def test_psp_norm_examples():
    assert psp_norm(P6, (1,) * 6) == pytest.approx(1.0)
    for c in (0.1, 0.25, 0.5, 0.9):
        assert psp_norm(rank_one(c), (1, -1)) == pytest.approx(abs(1 - 2 * c), abs=1e-12)
    s = (1, 1, 1, -1, -1, -1)
    assert psp_norm(P6, s) == pytest.approx(psp_norm_via_spectra(P6, s), abs=1e-8)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1), st.data())
def test_psp_sign_flip_exact(n, seed, data):
    rng = np.random.default_rng(seed)
    p = random_projection(n, int(rng.integers(0, n + 1)), rng)
    s = SymmetryVector(tuple(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))))
    assert psp_norm(p, s) == psp_norm(p, s.negate())


def test_via_spectra_examples():
    assert psp_norm_via_spectra(np.eye(3), (1, -1, 1)) == 1.0
    assert psp_norm_via_spectra(rank_one(0.25), (1, -1)) == pytest.approx(0.5, abs=1e-12)


def test_dual_path_random_projections():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 13))
        p = random_projection(n, int(rng.integers(0, n + 1)), rng)
        for _ in range(2):
            s = 1 - 2 * rng.integers(0, 2, size=n)
            assert psp_norm(p, s) == pytest.approx(psp_norm_via_spectra(p, s), abs=1e-8)


def test_canonical_form_trivial():
    cf = canonical_form(np.diag([1.0, 0.0]), (1, -1))
    assert np.allclose(cf.d1, [1]) and np.allclose(cf.d2, [0]) and np.allclose(cf.d3, [0])
    assert cf.d4.size == 0
    cf = canonical_form(rank_one(0.3), (1, -1))
    assert cf.d1 == pytest.approx([0.7]) and cf.d3 == pytest.approx([0.3])
    assert cf.d2 == pytest.approx([np.sqrt(0.21)])


def test_canonical_form_conference_pairs():
    for s in ((1, 1, 1, -1, -1, -1), (1, -1, 1, -1, 1, -1)):
        cf = canonical_form(P6, s)
        assert cf.reconstruction_defect(P6) <= 1e-8 * 6
        for lam, c, mu in zip(cf.d1, cf.d3, cf.d2):
            if mu > 1e-8:
                assert lam + c == pytest.approx(1.0, abs=1e-8)
                assert mu**2 == pytest.approx(lam * (1 - lam), abs=1e-8)


def test_canonical_form_flips_majority():
    cf = canonical_form(P6, (1, 1, 1, 1, -1, -1))
    assert cf.flipped and cf.m == 2 and cf.l == 2


@given(st.integers(2, 9), st.integers(0, 2**32 - 1), st.data())
def test_canonical_form_properties(n, seed, data):
    rng = np.random.default_rng(seed)
    p = random_projection(n, int(rng.integers(0, n + 1)), rng)
    s = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))
    cf = canonical_form(p, s)
    assert cf.m <= n - cf.m
    assert cf.reconstruction_defect(p) <= 1e-8 * n
    assert np.all(np.minimum(np.abs(cf.d4), np.abs(cf.d4 - 1)) <= 1e-8)
    for lam, c, mu in zip(cf.d1, cf.d3, cf.d2):
        if mu > 1e-8:
            assert lam + c == pytest.approx(1.0, abs=1e-8)
            assert mu**2 == pytest.approx(lam * (1 - lam), abs=1e-8)


def test_canonical_form_rejects_non_projection():
    with pytest.raises(PavingLabError):
        canonical_form(np.diag([0.5, 0.5]), (1, -1))


def test_min_symmetry_rank_one_diagonal():
    p = np.diag([1.0, 0, 0, 0])
    assert min_symmetry_norm(p).value == pytest.approx(1.0)


def test_min_symmetry_conference_exhaustive():
    scan = min_symmetry_norm(P6)
    assert scan.method["scanned"] == 32
    # frozen from a brute-force numpy scan of all 32 symmetries; equals 2/sqrt(5)
    assert scan.value == pytest.approx(2 / np.sqrt(5), abs=1e-12)
    assert scan.signs.signs[0] == 1
    assert scan.value >= psp_norm_via_spectra(P6, scan.signs) - 1e-8
    brute = min(psp_norm(P6, (1,) + rest) for rest in itertools.product((1, -1), repeat=5))
    assert scan.value == pytest.approx(brute, abs=1e-14)


def test_min_symmetry_thread_independent():
    g = conference_projection(paley_conference(13))
    a = min_symmetry_norm(g, chunk=512, threads=1)
    b = min_symmetry_norm(g, chunk=512, threads=4)
    assert a.signs == b.signs and a.value == b.value


def test_min_symmetry_random_reproducible():
    a = min_symmetry_norm(P6, strategy="random", samples=500, seed=3)
    b = min_symmetry_norm(P6, strategy="random", samples=500, seed=3)
    assert a.value == b.value and a.signs == b.signs
    assert a.method["seed"] == 3 and a.method["scanned"] == 500
    g = min_symmetry_norm(P6, strategy="greedy-flip", seed=1)
    assert g.value >= min_symmetry_norm(P6).value - 1e-12


def test_min_symmetry_budget():
    p = np.diag([1.0] + [0.0] * 24)
    with pytest.raises(BudgetExceeded, match="random"):
        min_symmetry_norm(p)
    with pytest.raises(PavingLabError):
        min_symmetry_norm(P6, strategy="annealing")


def test_interval_symmetries():
    iv = interval_symmetries(31)
    assert iv.shape == (62, 31)
    assert set(np.sum(iv == 1, axis=1)) == {15, 16}


def test_conj_a_examples():
    c = conj_a_certificate(276, 23)
    assert (c.lhs, c.rhs) == (1_675_872, 581_900) and c.is_counterexample
    c = conj_a_certificate(31, 6)
    assert (c.lhs, c.rhs) == (4805, 4320) and c.is_counterexample
    c = conj_a_certificate(7, 3)
    assert (c.lhs, c.rhs) == (98, 216) and not c.is_counterexample
    with pytest.raises(PavingLabError):
        conj_a_certificate(6, 3)


def test_singer_family_direction():
    expected = {2: False, 3: False, 4: False, 5: True, 7: True}
    for q, flag in expected.items():
        n, k = singer_parameters(q)
        assert conj_a_certificate(n, k).is_counterexample is flag
    assert singer_parameters(5) == (31, 6)


def test_singer_31_6_interval_symmetries():
    ds = find_difference_set(31, 6)
    g = gram_projection(harmonic_frame(31, ds.elements))
    vals = [psp_norm(g, s) for s in interval_symmetries(31)]
    assert min(vals) > 12 / 31 + 1e-6
    # frozen from an independent numpy evaluation
    assert min(vals) == pytest.approx(0.723490278207102, abs=1e-9)


def test_trace_suite_examples():
    t = conj_b_trace_suite(np.eye(4), [0, 2])
    assert t.trace_matrix == 0.0 and t.trace_sum == 0.0
    g = gram_projection(harmonic_frame(4, [0, 1]))
    t = conj_b_trace_suite(g, [0, 1])
    assert t.trace_matrix == pytest.approx(0.25, abs=1e-15)
    assert t.discrepancy <= 1e-10
    with pytest.raises(PavingLabError):
        conj_b_trace_suite(g, [])
    with pytest.raises(PavingLabError):
        conj_b_trace_suite(g, [0, 1, 2, 3])


def test_trace_suite_conference_bhkw():
    _, labels = bhkw_partition(bhkw_weights(P6), 2)
    r = [i for i, lab in enumerate(labels) if lab == 0]
    t = conj_b_trace_suite(P6, r, eps=0.5)
    assert t.trace_matrix >= 0.375 - 1e-9
    assert t.bhkw_bound == 0.375
    assert t.pa_threshold == pytest.approx(3 * 0.5 * 1.5 / 4)


def test_trace_suite_equiangular_fields():
    g = gram_projection(harmonic_frame(7, [1, 2, 4]))
    t = conj_b_trace_suite(g, [0, 1, 2])
    assert t.equiangular_c == pytest.approx(np.sqrt(2) / 7)
    assert t.equiangular_value == pytest.approx(t.trace_matrix, abs=1e-12)
    assert t.equiangular_value <= t.equiangular_bound + 1e-12
    assert t.eps_relation_rhs == pytest.approx(4 / 6)
