"""Reflection dilations, reflection/projection maps and paving transfers."""

from dataclasses import dataclass

import numpy as np

from .errors import NoCertificate, PavingLabError
from .linalg import as_matrix, check_hermitian, operator_norm, psd_sqrt
from .paving import NORM_TOL, PavedOperator, pave, paving_norm

ALGEBRA_TOL = 1e-9


def dilate(a):
    """Embed a Hermitian contraction A as the top-left block of a reflection.

    ``R = [[A, S], [S, -A]]`` with ``S = sqrt(I - A^2)``.
    """
    a = check_hermitian(a, "A")
    nrm = operator_norm(a)
    if nrm > 1 + 1e-10:
        raise PavingLabError(f"A is not a contraction: ||A|| = {nrm:.12g}")
    n = a.shape[0]
    s = psd_sqrt(np.eye(n) - a @ a)
    r = np.block([[a, s], [s, -a]])
    return (r + r.conj().T) / 2


def reflection_defect(r):
    n = r.shape[0]
    return float(np.max(np.abs(r @ r - np.eye(n))))


def projection_defect(p):
    return float(np.max(np.abs(p @ p - p)))


def reflection_to_projection(r, tol=ALGEBRA_TOL):
    r = check_hermitian(r, "R")
    n = r.shape[0]
    d = reflection_defect(r)
    if d > tol * n:
        raise PavingLabError(f"R is not a reflection: max |R^2 - I| = {d:.3e}")
    return (np.eye(n) + r) / 2


def projection_to_reflection(p, tol=ALGEBRA_TOL):
    p = check_hermitian(p, "P")
    n = p.shape[0]
    d = projection_defect(p)
    if d > tol * n:
        raise PavingLabError(f"P is not a projection: max |P^2 - P| = {d:.3e}")
    return 2 * p - np.eye(n)


def combine_pavings(pav_p, pav_pneg, r, eps):
    """Common refinement of pavings of (I+R)/2 and (I-R)/2 at level (1+eps)/2.

    Each refinement block C satisfies ``-eps Q_C <= Q_C R Q_C <= eps Q_C``.
    """
    r = as_matrix(r)
    n = r.shape[0]
    level = (1 + eps) / 2
    for name, part, proj in (
        ("(I+R)/2", pav_p, (np.eye(n) + r) / 2),
        ("(I-R)/2", pav_pneg, (np.eye(n) - r) / 2),
    ):
        got = paving_norm(proj, part)
        for b, v in zip(part.blocks, got.per_block_norms):
            if v > level + NORM_TOL:
                raise PavingLabError(
                    f"block {list(b)} of the {name} paving has norm {v:.12g} > (1+eps)/2 = {level:.12g}"
                )
    common = pav_p.refine(pav_pneg)
    out = paving_norm(r, common, provenance={"strategy": "refinement", "eps": eps})
    if out.epsilon > eps + NORM_TOL:
        raise PavingLabError(f"refinement paves R only at {out.epsilon:.12g} > eps = {eps:.12g}")
    return out


@dataclass(frozen=True)
class TransferResult:
    paved: PavedOperator  # paving of Q
    delta: float
    epsilon: float  # requested level for the half-diagonal projection
    half_epsilon: float  # level actually reached on the half-diagonal projection
    beta: float  # (1 + 2 delta) * epsilon
    certified: float  # (1 + 2 delta) * half_epsilon <= beta
    strategy: str


def transfer_paving(q, eps, r, strategy="auto", seed=0, restarts=8):
    """Pave a projection with diagonal near 1/2 through a half-diagonal projection.

    ``delta = max |q_ii - 1/2|`` is measured.  The off-diagonal part B is
    scaled by ``2/(1+2 delta)`` and dilated to a reflection R; the paving of
    ``(I+R)/2`` restricted to the first n indices paves Q at
    ``beta = (1+2 delta) * eps``.
    """
    gram = getattr(q, "gram", q)
    gram = check_hermitian(gram, "Q")
    n = gram.shape[0]
    d = np.real(np.diag(gram))
    delta = float(np.max(np.abs(d - 0.5)))
    if (1 + 2 * delta) * eps >= 1:
        raise NoCertificate(
            f"(1 + 2 delta) eps = {(1 + 2 * delta) * eps:.6g} >= 1 with measured delta = {delta:.6g}",
            delta=delta,
        )
    b = gram - np.diag(np.diag(gram))
    bnorm = operator_norm(b)
    if bnorm > (1 + 2 * delta) / 2 + 1e-9:
        raise PavingLabError(
            f"||Q - diag(Q)|| = {bnorm:.12g} exceeds (1+2 delta)/2; Q is not a projection"
        )
    rr = dilate((2 / (1 + 2 * delta)) * b)
    half = (np.eye(2 * n) + rr) / 2
    if strategy == "auto":
        strategy = "exhaustive" if 2 * n <= 12 else "local"
    found = pave(half, r, strategy=strategy, seed=seed, restarts=restarts)
    if found.epsilon > eps + NORM_TOL:
        raise NoCertificate(
            f"{strategy} paving of the half-diagonal projection reached {found.epsilon:.6g} > eps = {eps:.6g}",
            delta=delta,
            level=found.epsilon,
        )
    part = found.partition.restrict(list(range(n)))
    certified = (1 + 2 * delta) * found.epsilon
    paved = paving_norm(
        gram,
        part,
        provenance={"strategy": strategy, "seed": seed, "restarts": restarts, "delta": delta},
    )
    if paved.epsilon > certified + NORM_TOL:
        raise AssertionError(f"transfer bound violated: {paved.epsilon} > (1+2 delta) * {found.epsilon}")
    return TransferResult(
        paved=paved,
        delta=delta,
        epsilon=eps,
        half_epsilon=found.epsilon,
        beta=(1 + 2 * delta) * eps,
        certified=certified,
        strategy=strategy,
    )
