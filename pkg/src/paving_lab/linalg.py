"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; real inputs are
promoted so there is a single code path.  The reference eigensolver is a
cyclic Jacobi iteration (:func:`hermitian_eig`).  Search loops that evaluate
thousands of small compressions call :func:`eigvalsh` instead, which goes
through LAPACK and accepts stacked matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PavingLabError

HERMITIAN_RTOL = 1e-12
PSD_TOL = 1e-10
JACOBI_RTOL = 1e-14
JACOBI_MAX_SWEEPS = 60


def as_matrix(m):
    a = np.array(m, dtype=np.complex128)
    if a.ndim == 1:
        raise PavingLabError("expected a 2-d matrix, got a 1-d array")
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise PavingLabError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    return a


def hermitian_defect(m):
    """Return ``(defect, (i, j))`` for the worst pair ``|m_ij - conj(m_ji)|``."""
    d = np.abs(m - m.conj().T)
    idx = np.unravel_index(int(np.argmax(d)), d.shape)
    return float(d[idx]), (int(idx[0]), int(idx[1]))


def check_hermitian(m, name="matrix"):
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise PavingLabError(f"{name} must be square, got {m.shape[0]}x{m.shape[1]}")
    defect, (i, j) = hermitian_defect(m)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if defect > HERMITIAN_RTOL * scale:
        raise PavingLabError(
            f"{name} is not Hermitian: |m[{i},{j}] - conj(m[{j},{i}])| = {defect:.3e}"
        )
    return m


def is_hermitian(m):
    if m.shape[0] != m.shape[1]:
        return False
    defect, _ = hermitian_defect(m)
    return defect <= HERMITIAN_RTOL * float(np.max(np.abs(m)))


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # real, ascending
    basis: np.ndarray  # unitary, eigenvectors as columns

    def reconstruct(self):
        v = self.basis
        return (v * self.eigenvalues) @ v.conj().T


def _jacobi_rotation(app, aqq, apq):
    b = abs(apq)
    phase = apq / b
    theta = (aqq - app) / (2.0 * b)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    ph = np.conj(phase)
    return np.array([[c, s], [-s * ph, c * ph]], dtype=np.complex128)


def jacobi_eigh(m, rtol=JACOBI_RTOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Sweeps over all pairs ``p < q`` until the off-diagonal Frobenius mass falls
    below ``rtol * ||m||_F``.  Returns unsorted eigenvalues and eigenvectors.
    """
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(a)
    if n == 1 or fro == 0.0:
        return np.real(np.diag(a)).copy(), v
    target = rtol * fro
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * target:
                    continue
                g = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                cols = a[:, [p, q]] @ g
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = g.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vc = v[:, [p, q]] @ g
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    else:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off > 1e2 * target:
            raise RuntimeError(f"Jacobi iteration did not converge (off-diagonal mass {off:.3e})")
    return np.real(np.diag(a)).copy(), v


def hermitian_eig(m, method="jacobi"):
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    ``method="lapack"`` delegates to ``numpy.linalg.eigh``; the default is the
    in-house Jacobi iteration.
    """
    m = check_hermitian(m)
    if method == "jacobi":
        w, v = jacobi_eigh(m)
    elif method == "lapack":
        w, v = np.linalg.eigh(m)
    else:
        raise PavingLabError(f"unknown eigensolver {method!r}")
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(eigenvalues=w[order], basis=v[:, order])


def eigvalsh(m):
    """Ascending eigenvalues of one Hermitian matrix or a stack of them (LAPACK)."""
    return np.linalg.eigvalsh(m)


def operator_norm(m):
    """Largest singular value.

    Hermitian input uses ``max |eigenvalue|``; other input uses
    ``sqrt(lambda_max(M^H M))``, which is accurate to about sqrt(machine eps)
    only for tiny singular values.
    """
    m = as_matrix(m)
    if m.shape[0] == m.shape[1] and is_hermitian(m):
        w = eigvalsh(m)
        return float(max(abs(w[0]), abs(w[-1])))
    w = eigvalsh(m.conj().T @ m)
    return float(np.sqrt(max(w[-1], 0.0)))


def stacked_norms(stack, hermitian=True):
    """Operator norms of a ``(batch, d, d)`` stack of compressions."""
    if stack.shape[0] == 0:
        return np.zeros(0)
    if hermitian:
        w = np.linalg.eigvalsh(stack)
        return np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))
    return np.linalg.svd(stack, compute_uv=False)[:, 0]


def psd_sqrt(m):
    """Hermitian PSD square root; eigenvalues in ``[-1e-10, 0)`` are clamped to 0.

    Eigenvalues at rounding level (``n * eps * ||M||``) are also set to 0, so
    that the square root of an exact projection reproduces it to ~1e-15
    instead of picking up ``sqrt(1e-17)``-sized noise.
    """
    dec = hermitian_eig(m)
    w = dec.eigenvalues.copy()
    if w.size and w[0] < -PSD_TOL:
        raise PavingLabError(f"matrix is not PSD: smallest eigenvalue {w[0]:.3e}")
    floor = w.size * np.finfo(float).eps * max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    w[np.abs(w) <= floor] = 0.0
    root = np.sqrt(np.clip(w, 0.0, None))
    v = dec.basis
    r = (v * root) @ v.conj().T
    return (r + r.conj().T) / 2


def principal_compression(m, block):
    m = as_matrix(m)
    n = m.shape[0]
    idx = np.asarray(sorted(block), dtype=int)
    if idx.size == 0:
        raise PavingLabError("compression block must be non-empty")
    if idx[0] < 0 or idx[-1] >= n:
        raise PavingLabError(f"block index out of range for dimension {n}: {list(idx)}")
    return m[np.ix_(idx, idx)]


def diagonal_projection(n, block):
    q = np.zeros((n, n), dtype=np.complex128)
    for i in block:
        q[i, i] = 1.0
    return q


def matrix_to_json(m):
    m = as_matrix(m)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(obj):
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re, im = obj["re"], obj.get("im")
    except (KeyError, TypeError) as exc:
        raise PavingLabError(f"malformed matrix JSON: {exc}") from None
    if rows < 1 or cols < 1 or len(re) != rows * cols:
        raise PavingLabError(f"matrix JSON has {len(re)} entries for shape {rows}x{cols}")
    if im is None:
        im = [0.0] * len(re)
    if len(im) != len(re):
        raise PavingLabError("matrix JSON re/im length mismatch")
    data = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    return data.reshape(rows, cols)


def random_hermitian(n, rng, zero_diagonal=False, contraction=True, real=False):
    """Seeded random Hermitian matrix, optionally scaled to a contraction."""
    x = rng.standard_normal((n, n))
    if not real:
        x = x + 1j * rng.standard_normal((n, n))
    h = (x + x.conj().T) / 2
    if zero_diagonal:
        np.fill_diagonal(h, 0.0)
    h = np.asarray(h, dtype=np.complex128)
    if contraction:
        nrm = operator_norm(h)
        if nrm > 0:
            h = h * (rng.uniform(0.5, 1.0) / nrm)
    return h


def random_projection(n, k, rng):
    """Seeded random rank-``k`` orthogonal projection on C^n."""
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    q, _ = np.linalg.qr(z)
    p = q @ q.conj().T
    return (p + p.conj().T) / 2
