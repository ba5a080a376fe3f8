import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from paving_lab.errors import BudgetExceeded, PavingLabError
from paving_lab.frames import (
    ConferenceMatrix,
    FrameSpec,
    GramProjection,
    block_frame,
    conference_projection,
    equiangular_constant,
    find_difference_set,
    gram_projection,
    harmonic_frame,
    is_difference_set,
    kernel_vector,
    paley_conference,
)
from paving_lab.linalg import operator_norm, principal_compression


def test_harmonic_rank_one():
    g = gram_projection(harmonic_frame(2, [0])).gram
    assert np.allclose(g, [[0.5, 0.5], [0.5, 0.5]])


def test_harmonic_four_two_entries():
    g = harmonic_frame(4, [0, 1]).gram()
    want = np.array([[(1 + 1j ** (j - l)) / 4 for l in range(4)] for j in range(4)])
    assert np.allclose(g, want, atol=1e-15)
    gp = gram_projection(harmonic_frame(4, [0, 1]))
    assert np.allclose(gp.diag, 0.5)
    assert np.max(np.abs(gp.gram @ gp.gram - gp.gram)) < 1e-15


def test_harmonic_seven_equiangular():
    f = harmonic_frame(7, [1, 2, 4])
    c = equiangular_constant(7, 3)
    assert c == pytest.approx(np.sqrt(2) / 7, abs=1e-15)
    assert f.equiangular_c == pytest.approx(c)
    off = np.abs(f.gram())[~np.eye(7, dtype=bool)]
    assert off.size == 42 and np.allclose(off, c, atol=1e-12)
    f.check()


def test_harmonic_rejects_empty():
    with pytest.raises(PavingLabError):
        harmonic_frame(5, [])


@given(st.integers(2, 20), st.data())
def test_harmonic_parseval_equal_norm(n, data):
    d = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    f = harmonic_frame(n, d)
    assert f.parseval_defect() <= 1e-10
    assert np.allclose(f.norm_sq, len(d) / n, atol=1e-10)
    gp = gram_projection(f)
    assert gp.k == len(d)
    assert np.max(np.abs(gp.gram @ gp.gram - gp.gram)) <= 1e-9 * n


def test_equiangular_iff_difference_set_small_orders():
    # exhaustive over residue sets containing 0 (translates give the same moduli)
    for n in range(3, 16):
        c_cache = {}
        for k in range(2, n - 1):
            c = c_cache.setdefault(k, equiangular_constant(n, k))
            for rest in itertools.combinations(range(1, n), k - 1):
                d = (0,) + rest
                off = np.abs(harmonic_frame(n, d).gram())[~np.eye(n, dtype=bool)]
                equi = bool(np.max(np.abs(off - c)) <= 1e-9)
                assert equi == is_difference_set(n, d), (n, d)
            ds = find_difference_set(n, k)
            exists = any(
                is_difference_set(n, (0,) + r) for r in itertools.combinations(range(1, n), k - 1)
            )
            assert (ds is not None) == exists, (n, k)


def test_find_difference_set_examples():
    ds = find_difference_set(7, 3)
    assert ds.elements == (0, 1, 3) and ds.lam == 1
    assert find_difference_set(4, 2) is None
    big = find_difference_set(31, 6)
    assert big.lam == 1 and big.elements == (0, 1, 3, 8, 12, 18)
    assert is_difference_set(31, big.elements)
    assert big.to_json() == {"n": 31, "k": 6, "lambda": 1, "elements": [0, 1, 3, 8, 12, 18]}


def test_find_difference_set_singer_orders():
    # brute-force oracle values for q = 3, 4
    assert find_difference_set(13, 4).elements == (0, 1, 3, 9)
    assert find_difference_set(21, 5).elements == (0, 1, 4, 14, 16)


def test_find_difference_set_budget():
    with pytest.raises(BudgetExceeded):
        find_difference_set(57, 8)
    # the same call is allowed with an explicit larger budget
    assert find_difference_set(57, 8, max_n=60).lam == 1


def test_paley_orders():
    for q, n in ((5, 6), (13, 14), (17, 18)):
        c = paley_conference(q)
        assert c.order == n
        e = np.asarray(c.entries, dtype=np.int64)
        assert np.array_equal(e @ e, q * np.eye(n, dtype=np.int64))
        assert np.array_equal(e, e.T)


@pytest.mark.parametrize("q", [3, 7, 9, 15])
def test_paley_rejects(q):
    with pytest.raises(PavingLabError):
        paley_conference(q)


def test_conference_matrix_check_rejects_bad_diagonal():
    e = np.asarray(paley_conference(5).entries).copy()
    e[0, 0] = 1
    with pytest.raises(PavingLabError):
        ConferenceMatrix(entries=e).check()


def test_conference_projection_orders():
    gp = conference_projection(paley_conference(5))
    assert gp.k == 3 and gp.n == 6
    assert all(x == 0.5 for x in gp.diag)
    assert np.max(np.abs(gp.gram @ gp.gram - gp.gram)) <= 1e-10 * 6
    assert conference_projection(paley_conference(13)).k == 7


def test_gram_projection_examples():
    f = FrameSpec(synthesis=np.eye(3, dtype=complex))
    assert np.allclose(gram_projection(f).gram, np.eye(3))
    scaled = FrameSpec(synthesis=2 * harmonic_frame(5, [0, 2]).synthesis)
    with pytest.raises(PavingLabError, match="not Parseval"):
        gram_projection(scaled)


def test_gram_projection_from_matrix_validates():
    with pytest.raises(PavingLabError):
        GramProjection.from_matrix(np.diag([1.0, 0.5]))
    gp = GramProjection.from_matrix(np.diag([1.0, 0.0, 1.0]))
    assert gp.k == 2 and gp.diag_max == 1.0


def test_synthesis_recovers_gram(rng):
    gp = gram_projection(harmonic_frame(9, [0, 2, 3, 7]))
    f = FrameSpec(synthesis=gp.synthesis())
    assert np.allclose(f.gram(), gp.gram, atol=1e-12)


def test_frame_json_round_trip():
    f = harmonic_frame(7, [1, 2, 4])
    back = FrameSpec.from_json(f.to_json())
    assert np.array_equal(back.synthesis, f.synthesis)
    assert back.family == "harmonic"


def test_block_frame_small():
    frame, cert = block_frame(3, 1, 2)
    assert frame.n == 6 and frame.k == 3
    assert frame.parseval_defect() <= 1e-12
    g = gram_projection(frame).gram
    # block diagonal: the line and the plane do not interact
    assert np.max(np.abs(g[:3, 3:])) < 1e-15
    assert cert["norm_sq_first"] == Fraction(1, 3)
    assert np.allclose(frame.norm_sq[:3], 1 / 3)


def test_block_frame_pairs_have_norm_one():
    frame, cert = block_frame(3, 1, 2)
    g = gram_projection(frame).gram
    i_p = np.eye(6) - g
    for a in itertools.combinations(cert["dependent_block"], cert["min_dependent_size"]):
        assert operator_norm(principal_compression(i_p, a)) == pytest.approx(1.0, abs=1e-9)
        v = kernel_vector(g, a)
        assert v is not None and np.linalg.norm(g @ v) < 1e-9


def test_block_frame_larger_blocks():
    frame, cert = block_frame(5, 2, 2)
    g = gram_projection(frame).gram
    i_p = np.eye(10) - g
    for size in (3, 4, 5):
        for a in itertools.combinations(range(5), size):
            assert operator_norm(principal_compression(i_p, a)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("args", [(3, 2, 3), (3, 1, 1), (3, 3, 2)])
def test_block_frame_rejects(args):
    with pytest.raises(PavingLabError):
        block_frame(*args)
