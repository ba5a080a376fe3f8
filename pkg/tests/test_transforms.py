import numpy as np
import pytest
from hypothesis import given, strategies as st

from paving_lab.errors import NoCertificate, PavingLabError
from paving_lab.frames import (
    conference_projection,
    conference_reflection,
    gram_projection,
    harmonic_frame,
    paley_conference,
)
from paving_lab.linalg import operator_norm, principal_compression, random_hermitian
from paving_lab.paving import Partition, exhaustive_pave, paving_norm
from paving_lab.transforms import (
    combine_pavings,
    dilate,
    projection_to_reflection,
    reflection_defect,
    reflection_to_projection,
    transfer_paving,
)

C6 = conference_reflection(paley_conference(5))


def test_dilate_examples():
    assert np.allclose(dilate([[0.0]]), [[0, 1], [1, 0]])
    assert np.allclose(dilate([[1.0]]), np.diag([1, -1]))
    r = dilate(C6)
    assert np.max(np.abs(r[:6, 6:])) < 1e-7
    assert np.allclose(r[6:, 6:], -C6)


def test_dilate_rejects_non_contraction():
    with pytest.raises(PavingLabError, match="contraction"):
        dilate(np.diag([1.5, 0.0]))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_dilate_is_reflection(n, seed):
    a = random_hermitian(n, np.random.default_rng(seed))
    r = dilate(a)
    assert r.shape == (2 * n, 2 * n)
    assert reflection_defect(r) <= 1e-9 * n
    assert np.allclose(np.diag(r)[:n], np.diag(a))
    assert np.max(np.abs(r - r.conj().T)) == 0.0


def test_reflection_projection_examples():
    assert np.allclose(reflection_to_projection(np.diag([1.0, -1.0])), np.diag([1, 0]))
    p = reflection_to_projection(C6)
    assert np.allclose(p, conference_projection(paley_conference(5)).gram, atol=1e-15)
    assert np.allclose(np.diag(p), 0.5)
    with pytest.raises(PavingLabError, match="not a reflection"):
        reflection_to_projection(np.diag([1.0, 0.5]))
    with pytest.raises(PavingLabError, match="not a projection"):
        projection_to_reflection(np.diag([1.0, 0.5]))


def test_round_trip_random_reflections(rng):
    for _ in range(50):
        r = dilate(random_hermitian(int(rng.integers(1, 6)), rng))
        assert np.max(np.abs(projection_to_reflection(reflection_to_projection(r)) - r)) <= 1e-12


def test_affine_norm_transfer(rng):
    for _ in range(30):
        r = dilate(random_hermitian(4, rng))
        p = (np.eye(8) + r) / 2
        block = sorted(rng.choice(8, size=int(rng.integers(1, 8)), replace=False))
        lhs = operator_norm(principal_compression(p, block))
        rhs = (1 + operator_norm(principal_compression(r, block))) / 2
        assert lhs <= rhs + 1e-10


def test_restricted_paving_of_dilation(rng):
    for _ in range(20):
        n = int(rng.integers(1, 7))
        a = random_hermitian(n, rng)
        r = dilate(a)
        got = exhaustive_pave(r, 2)
        sub = got.partition.restrict(list(range(n)))
        assert paving_norm(a, sub).epsilon <= got.epsilon + 1e-9


def test_combine_idempotent_and_counting():
    p = Partition(n=6, blocks=((0, 1, 2), (3, 4, 5)))
    q = Partition(n=6, blocks=((0, 3), (1, 2, 4, 5)))
    assert combine_pavings(p, p, C6, 1.0).partition == p
    assert len(combine_pavings(p, q, C6, 1.0).partition.blocks) <= 4


def test_combine_conference_exhaustive():
    pp = exhaustive_pave((np.eye(6) + C6) / 2, 2)
    pn = exhaustive_pave((np.eye(6) - C6) / 2, 2)
    e1, e2 = 2 * pp.epsilon - 1, 2 * pn.epsilon - 1
    eps = max(e1, e2)
    got = combine_pavings(pp.partition, pn.partition, C6, eps)
    assert got.epsilon <= eps + 1e-9
    assert got.epsilon == pytest.approx(paving_norm(C6, got.partition).epsilon)


def test_combine_rejects_false_level():
    p = Partition(n=6, blocks=((0, 1, 2), (3, 4, 5)))
    with pytest.raises(PavingLabError, match="block"):
        combine_pavings(p, p, C6, 0.1)


def test_combine_below_both_levels_on_samples(rng):
    # observed on samples: the refinement is no worse than either mapped input level
    for _ in range(25):
        n = int(rng.integers(1, 6))
        r = dilate(random_hermitian(n, rng))
        eye = np.eye(2 * n)
        pp = exhaustive_pave((eye + r) / 2, 2)
        pn = exhaustive_pave((eye - r) / 2, 2)
        e1, e2 = 2 * pp.epsilon - 1, 2 * pn.epsilon - 1
        got = combine_pavings(pp.partition, pn.partition, r, max(e1, e2))
        assert got.epsilon <= min(e1, e2) + 1e-9


def test_transfer_exact_half_diagonal():
    q = conference_projection(paley_conference(5)).gram
    res = transfer_paving(q, 0.96, 2)
    assert res.delta == 0.0
    assert res.beta == pytest.approx(0.96)
    assert res.paved.epsilon <= res.beta + 1e-9
    assert res.strategy == "exhaustive"


def test_transfer_beta_arithmetic():
    # direct sum of rank-one blocks with diagonal (0.55, 0.45)
    b = np.sqrt(0.55 * 0.45)
    q = np.kron(np.eye(2), np.array([[0.55, b], [b, 0.45]]))
    res = transfer_paving(q, 0.8, 2)
    assert res.delta == pytest.approx(0.05, abs=1e-12)
    assert res.beta == pytest.approx(0.88, abs=1e-12)
    assert res.paved.epsilon <= res.certified + 1e-9 <= res.beta + 1e-9
    assert paving_norm(q, res.paved.partition).epsilon == pytest.approx(res.paved.epsilon)


def test_transfer_no_certificate_from_delta():
    q = gram_projection(harmonic_frame(9, range(7))).gram  # diagonal 7/9, delta 5/18
    with pytest.raises(NoCertificate) as info:
        transfer_paving(q, 0.9, 3)
    assert info.value.delta == pytest.approx(5 / 18)


def test_transfer_no_certificate_from_search():
    # the (9,7) projection has a block of size >= n-k+1 in any 3-partition, so
    # beta < 1 cannot be certified; the search reports the level it reached
    q = gram_projection(harmonic_frame(9, range(7))).gram
    with pytest.raises(NoCertificate) as info:
        transfer_paving(q, 0.6, 3, strategy="local", restarts=8)
    assert info.value.delta == pytest.approx(5 / 18)
    assert info.value.level > 0.6


def test_transfer_rejects_non_projection():
    q = np.array([[0.5, 0.9], [0.9, 0.5]])
    with pytest.raises(PavingLabError, match="not a projection"):
        transfer_paving(q, 0.5, 2)
