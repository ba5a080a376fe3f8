"""Frame and projection families: harmonic frames, difference sets, Paley
conference matrices, half-diagonal conference projections and the two-block
frame whose Gram matrix cannot be paved.

Gram convention: ``gram[i, j] = <f_i, f_j>`` with the inner product linear in
the first slot, i.e. ``gram = F^T conj(F)`` for the k x n synthesis array F.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools

import numpy as np

from .budget import from_env
from .errors import BudgetExceeded, PavingLabError
from .linalg import as_matrix, check_hermitian, hermitian_eig, matrix_from_json, matrix_to_json

PARSEVAL_TOL = 1e-10
EQUIANGULAR_TOL = 1e-9


def equiangular_constant(n, k):
    return float(np.sqrt(k * (n - k) / (n * n * (n - 1))))


@dataclass(frozen=True)
class FrameSpec:
    synthesis: np.ndarray  # k x n, columns are the frame vectors
    family: str = "custom"
    params: dict = field(default_factory=dict)
    equal_norm: bool = False
    equiangular_c: float | None = None

    @property
    def k(self):
        return self.synthesis.shape[0]

    @property
    def n(self):
        return self.synthesis.shape[1]

    @property
    def norm_sq(self):
        return np.sum(np.abs(self.synthesis) ** 2, axis=0)

    def gram(self):
        f = self.synthesis
        return f.T @ f.conj()

    def parseval_defect(self):
        f = self.synthesis
        return float(np.max(np.abs(f @ f.conj().T - np.eye(self.k))))

    def check(self):
        """Raise if a flagged property does not hold numerically."""
        d = self.parseval_defect()
        if d > PARSEVAL_TOL:
            raise PavingLabError(f"frame is not Parseval (defect {d:.3e})")
        if self.equal_norm:
            dev = float(np.max(np.abs(self.norm_sq - self.k / self.n)))
            if dev > PARSEVAL_TOL:
                raise PavingLabError(f"frame is not equal-norm (defect {dev:.3e})")
        if self.equiangular_c is not None:
            g = np.abs(self.gram())
            off = g[~np.eye(self.n, dtype=bool)]
            dev = float(np.max(np.abs(off - self.equiangular_c))) if off.size else 0.0
            if dev > EQUIANGULAR_TOL:
                raise PavingLabError(f"frame is not equiangular (defect {dev:.3e})")
        return self

    def to_json(self):
        return {
            "n": self.n,
            "k": self.k,
            "family": self.family,
            "params": self.params,
            "synthesis": matrix_to_json(self.synthesis),
        }

    @classmethod
    def from_json(cls, obj):
        f = matrix_from_json(obj["synthesis"])
        if f.shape != (obj["k"], obj["n"]):
            raise PavingLabError(f"synthesis shape {f.shape} does not match k={obj['k']}, n={obj['n']}")
        return cls(synthesis=f, family=obj.get("family", "custom"), params=obj.get("params", {}))


@dataclass(frozen=True)
class GramProjection:
    gram: np.ndarray
    k: int

    @property
    def n(self):
        return self.gram.shape[0]

    @property
    def diag(self):
        return np.real(np.diag(self.gram))

    @property
    def diag_max(self):
        return float(np.max(self.diag))

    @classmethod
    def from_matrix(cls, p, tol=1e-9):
        """Validate an orthogonal projection and infer its rank from the trace."""
        p = check_hermitian(p, "projection")
        n = p.shape[0]
        defect = float(np.max(np.abs(p @ p - p)))
        if defect > tol * n:
            raise PavingLabError(f"matrix is not a projection: max |P^2 - P| = {defect:.3e}")
        tr = float(np.real(np.trace(p)))
        k = int(round(tr))
        if abs(tr - k) > 1e-8:
            raise PavingLabError(f"projection trace {tr} is not an integer")
        return cls(gram=p, k=k)

    def synthesis(self):
        """A k x n synthesis array whose Gram matrix (in this module's convention) is ``gram``."""
        dec = hermitian_eig(self.gram, method="lapack")
        v = dec.basis[:, self.n - self.k:]  # eigenvalue-1 eigenvectors, n x k
        # gram = V V^H, so column i of V^T gives f_i with <f_i, f_j> = gram[i, j]
        return v.T

    def to_json(self):
        return matrix_to_json(self.gram)


@dataclass(frozen=True)
class DifferenceSet:
    n: int
    elements: tuple
    lam: int

    @property
    def k(self):
        return len(self.elements)

    def to_json(self):
        return {"n": self.n, "k": self.k, "lambda": self.lam, "elements": list(self.elements)}


def difference_counts(n, elements):
    counts = [0] * n
    for a, b in itertools.permutations(elements, 2):
        counts[(a - b) % n] += 1
    return counts


def is_difference_set(n, elements):
    elements = sorted(set(elements))
    k = len(elements)
    if k < 1 or k >= n:
        return False
    counts = difference_counts(n, elements)[1:]
    return len(set(counts)) == 1


@dataclass(frozen=True)
class ConferenceMatrix:
    entries: np.ndarray  # integer array

    @property
    def order(self):
        return self.entries.shape[0]

    def check(self):
        c = np.asarray(self.entries)
        n = c.shape[0]
        if c.ndim != 2 or c.shape != (n, n):
            raise PavingLabError("conference matrix must be square")
        if not np.issubdtype(c.dtype, np.integer):
            raise PavingLabError("conference matrix entries must be integers")
        if np.any(np.diag(c) != 0):
            i = int(np.flatnonzero(np.diag(c))[0])
            raise PavingLabError(f"conference matrix has nonzero diagonal entry at {i}")
        off = c[~np.eye(n, dtype=bool)]
        if np.any(np.abs(off) != 1):
            raise PavingLabError("conference matrix off-diagonal entries must be +-1")
        if np.any(c != c.T):
            raise PavingLabError("conference matrix must be symmetric")
        if np.any(c @ c != (n - 1) * np.eye(n, dtype=c.dtype)):
            raise PavingLabError(f"C^2 != {n - 1} I")
        return self


def harmonic_frame(n, D):
    """Rows of the n x n DFT matrix indexed by ``D``, scaled by 1/sqrt(n)."""
    D = sorted(set(int(d) % n for d in D))
    if not D:
        raise PavingLabError("harmonic frame needs a non-empty residue set")
    k = len(D)
    j = np.arange(n)
    f = np.exp(2j * np.pi * np.outer(D, j) / n) / np.sqrt(n)
    c = equiangular_constant(n, k) if k < n and is_difference_set(n, D) else None
    if k == n:
        c = None
    frame = FrameSpec(
        synthesis=f,
        family="harmonic",
        params={"n": n, "D": D},
        equal_norm=True,
        equiangular_c=c,
    )
    return frame


def find_difference_set(n, k, max_n=None):
    """Smallest (lexicographic) ``(n, k, lambda)`` difference set containing 0, or None.

    Raises :class:`BudgetExceeded` above ``max_n`` (default from the budget),
    which is distinct from returning None after an exhaustive search.
    """
    if n < 2 or not 2 <= k < n:
        raise PavingLabError(f"need n >= 2 and 2 <= k < n, got n={n}, k={k}")
    if (k * (k - 1)) % (n - 1):
        return None
    lam = k * (k - 1) // (n - 1)
    max_n = from_env().difference_set_max_n if max_n is None else max_n
    if n > max_n:
        raise BudgetExceeded(f"difference-set search for n={n} exceeds budget n <= {max_n}")

    counts = [0] * n
    chosen = [0]

    def add(x):
        touched = []
        ok = True
        for y in chosen:
            for d in ((x - y) % n, (y - x) % n):
                counts[d] += 1
                touched.append(d)
                if counts[d] > lam:
                    ok = False
        return ok, touched

    def search(start):
        if len(chosen) == k:
            return True
        # remaining candidates must be able to fill the set
        for x in range(start, n - (k - len(chosen)) + 1):
            ok, touched = add(x)
            chosen.append(x)
            if ok and search(x + 1):
                return True
            chosen.pop()
            for d in touched:
                counts[d] -= 1
        return False

    if search(1):
        return DifferenceSet(n=n, elements=tuple(chosen), lam=lam)
    return None


def _is_prime(q):
    if q < 2:
        return False
    return all(q % p for p in range(2, int(q**0.5) + 1))


def legendre(a, q):
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def paley_conference(q):
    """Symmetric conference matrix of order q + 1 from quadratic residues mod q."""
    if not _is_prime(q) or q == 2:
        raise PavingLabError(f"q={q} must be an odd prime")
    if q % 4 != 1:
        raise PavingLabError(f"q={q} must satisfy q = 1 (mod 4) for a symmetric conference matrix")
    chi = np.array([legendre(a, q) for a in range(q)], dtype=np.int64)
    idx = np.arange(q)
    core = chi[(idx[None, :] - idx[:, None]) % q]
    c = np.zeros((q + 1, q + 1), dtype=np.int64)
    c[0, 1:] = 1
    c[1:, 0] = 1
    c[1:, 1:] = core
    return ConferenceMatrix(entries=c).check()


def conference_reflection(conf):
    """The zero-diagonal reflection C / sqrt(n - 1)."""
    conf.check()
    n = conf.order
    return conf.entries.astype(np.complex128) / np.sqrt(n - 1)


def conference_projection(conf):
    conf.check()
    n = conf.order
    r = conference_reflection(conf)
    p = (np.eye(n) + r) / 2
    if np.any(np.real(np.diag(p)) != 0.5):
        raise PavingLabError("conference projection diagonal is not exactly 1/2")
    gp = GramProjection.from_matrix(p, tol=1e-10)
    if gp.k * 2 != n:
        raise PavingLabError(f"conference projection has rank {gp.k}, expected {n // 2}")
    return gp


def gram_projection(frame):
    f = as_matrix(frame.synthesis)
    k = f.shape[0]
    dev = np.abs(f @ f.conj().T - np.eye(k))
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if dev[i, j] > PARSEVAL_TOL:
        raise PavingLabError(
            f"frame is not Parseval: |(F F^H - I)[{i},{j}]| = {dev[i, j]:.3e}"
        )
    g = frame.gram()
    g = (g + g.conj().T) / 2
    return GramProjection(gram=g, k=k)


def block_frame(n, k, r):
    """Two-block Parseval frame of 2n vectors for C^n.

    The first ``r*k + 1`` vectors form an equal-norm Parseval frame for the
    span of e_0..e_{k-1}; the rest form one for the complementary coordinates.
    Any ``k + 1`` of the first block are dependent, so the corresponding
    compression of I - P has eigenvalue 1.
    """
    if r < 2 or k < 1 or k >= n:
        raise PavingLabError(f"block frame needs r >= 2 and 1 <= k < n, got r={r}, k={k}, n={n}")
    first = r * k + 1
    second = 2 * n - first
    if first > 2 * n:
        raise PavingLabError(f"r*k + 1 = {first} exceeds 2n = {2 * n}")
    if second < n - k:
        raise PavingLabError(
            f"second block has {second} vectors, fewer than its dimension {n - k}"
        )
    f = np.zeros((n, 2 * n), dtype=np.complex128)
    f[:k, :first] = harmonic_frame(first, range(k)).synthesis
    f[k:, first:] = harmonic_frame(second, range(n - k)).synthesis
    certificate = {
        "dependent_block": list(range(first)),
        "min_dependent_size": k + 1,
        "claim": "every A within the first block with |A| >= k+1 carries a nonzero a with gram a = 0",
        "norm_sq_first": Fraction(k, first),
        "norm_sq_second": Fraction(n - k, second),
    }
    frame = FrameSpec(synthesis=f, family="block", params={"n": n, "k": k, "r": r})
    return frame, certificate


def kernel_vector(gram, block):
    """A unit vector supported on ``block`` annihilated by ``gram``, or None."""
    idx = sorted(block)
    sub = gram[np.ix_(idx, idx)]
    dec = hermitian_eig(sub, method="lapack")
    if dec.eigenvalues[0] > 1e-8:
        return None
    a = np.zeros(gram.shape[0], dtype=np.complex128)
    a[idx] = dec.basis[:, 0]
    return a
