"""Diagonal symmetries S acting on projections: ||PSP||, the canonical block
form, symmetry searches, integer counterexample certificates and trace
inequalities for two-block partitions.
"""

from dataclasses import dataclass, field

import numpy as np

from .budget import from_env
from .errors import BudgetExceeded, PavingLabError
from .frames import GramProjection, equiangular_constant
from .linalg import hermitian_eig, operator_norm

NONZERO_TOL = 1e-8


@dataclass(frozen=True)
class SymmetryVector:
    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if not signs or any(s not in (-1, 1) for s in signs):
            raise PavingLabError("symmetry entries must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    @property
    def n(self):
        return len(self.signs)

    def canonical(self):
        """Representative with ``signs[0] = +1`` (S and -S give the same ||PSP||)."""
        if self.signs[0] == 1:
            return self
        return SymmetryVector(tuple(-s for s in self.signs))

    def negate(self):
        return SymmetryVector(tuple(-s for s in self.signs))

    def array(self):
        return np.asarray(self.signs, dtype=float)


def _gram(p):
    return p.gram if isinstance(p, GramProjection) else np.asarray(p, dtype=np.complex128)


def _as_symmetry(s):
    return s if isinstance(s, SymmetryVector) else SymmetryVector(tuple(s))


def psp_norm(p, s):
    """``||P diag(S) P||`` evaluated directly on the n x n product."""
    g = _gram(p)
    s = _as_symmetry(s).canonical()
    if s.n != g.shape[0]:
        raise PavingLabError(f"symmetry length {s.n} does not match dimension {g.shape[0]}")
    m = (g * s.array()[None, :]) @ g
    return operator_norm((m + m.conj().T) / 2)


@dataclass(frozen=True)
class CanonicalForm:
    plus: tuple  # indices carrying +1
    minus: tuple  # indices carrying -1
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    flipped: bool

    @property
    def m(self):
        return len(self.plus)

    @property
    def l(self):
        return len(self.minus) - len(self.plus)

    def pattern(self):
        m, l = self.m, self.l
        top = np.hstack([np.diag(self.d1), np.diag(self.d2), np.zeros((m, l))])
        mid = np.hstack([np.diag(self.d2), np.diag(self.d3), np.zeros((m, l))])
        bot = np.hstack([np.zeros((l, m)), np.zeros((l, m)), np.diag(self.d4)])
        return np.vstack([top, mid, bot])

    def conjugated(self, p):
        """``diag(U1, U2)^H P' diag(U1, U2)`` with P' the +1-first permutation of P."""
        g = _gram(p)
        order = list(self.plus) + list(self.minus)
        pp = g[np.ix_(order, order)]
        m = self.m
        u = np.zeros_like(pp)
        u[:m, :m] = self.u1
        u[m:, m:] = self.u2
        return u.conj().T @ pp @ u

    def reconstruction_defect(self, p):
        return float(np.max(np.abs(self.conjugated(p) - self.pattern())))


def _complete_unitary(cols, m):
    """Extend orthonormal columns (m x j) to an m x m unitary."""
    j = cols.shape[1]
    if j == m:
        return cols
    basis = np.hstack([cols, np.eye(m, dtype=np.complex128)])
    q, _ = np.linalg.qr(basis)
    # the first j columns of q span the same space as cols; keep cols exactly
    rest = q[:, j:m]
    rest = rest - cols @ (cols.conj().T @ rest)
    rest, _ = np.linalg.qr(rest)
    return np.hstack([cols, rest[:, : m - j]])


def canonical_form(p, s):
    """Block-diagonalise a projection against the split of a diagonal symmetry.

    With A, B, C the blocks on the +1 and -1 index sets (after negating S if
    needed so that there are no more +1's than -1's), returns unitaries U1, U2
    with ``U1^H A U1 = D1``, ``U1^H B U2 = (D2, 0)`` and
    ``U2^H C U2 = diag(D3, D4)``.
    """
    g = _gram(p)
    n = g.shape[0]
    s = _as_symmetry(s)
    if s.n != n:
        raise PavingLabError(f"symmetry length {s.n} does not match dimension {n}")
    defect = float(np.max(np.abs(g @ g - g)))
    if defect > 1e-8 * n:
        raise PavingLabError(f"input is not a projection: max |P^2 - P| = {defect:.3e}")
    flipped = False
    if sum(1 for x in s.signs if x == 1) > n // 2:
        s, flipped = s.negate(), True
    plus = tuple(i for i, x in enumerate(s.signs) if x == 1)
    minus = tuple(i for i, x in enumerate(s.signs) if x == -1)
    m, ml = len(plus), len(minus)
    l = ml - m
    a = g[np.ix_(plus, plus)]
    b = g[np.ix_(plus, minus)]
    c = g[np.ix_(minus, minus)]

    dec_c = hermitian_eig(c, method="lapack")
    gamma, v = dec_c.eigenvalues, dec_c.basis
    bv = b @ v
    colnorm = np.linalg.norm(bv, axis=0) if m else np.zeros(ml)
    # largest off-diagonal couplings first; the l weakest columns form the D4 block
    order = sorted(range(ml), key=lambda i: (-colnorm[i], i))
    paired, rest = order[:m], order[m:]
    u2 = v[:, paired + rest]
    gamma = gamma[paired + rest]
    d3 = np.clip(gamma[:m], 0.0, 1.0)
    d4 = np.clip(gamma[m:], 0.0, 1.0)
    x = (b @ u2)[:, :m]
    d2 = np.linalg.norm(x, axis=0)

    live = [i for i in range(m) if d2[i] > NONZERO_TOL]
    dead = [i for i in range(m) if d2[i] <= NONZERO_TOL]
    u1 = np.zeros((m, m), dtype=np.complex128)
    if live:
        # columns of B U2 are orthogonal since U2^H B^H B U2 = U2^H (C - C^2) U2 is diagonal;
        # QR only removes rounding, the phase fix keeps each column on its own direction
        q, rr = np.linalg.qr(x[:, live])
        diag = np.diag(rr)
        q = q * (diag / np.abs(diag))[None, :]
        full = _complete_unitary(q, m)
    else:
        full = np.eye(m, dtype=np.complex128)
    u1[:, live] = full[:, : len(live)]
    u1[:, dead] = full[:, len(live):]
    if dead:
        # A restricted to the directions with D2 = 0 is diagonalised separately
        w = u1[:, dead]
        sub = w.conj().T @ a @ w
        dec = hermitian_eig((sub + sub.conj().T) / 2, method="lapack")
        u1[:, dead] = w @ dec.basis
    d1 = np.real(np.diag(u1.conj().T @ a @ u1))
    d2 = np.real(np.diag(u1.conj().T @ b @ u2)[:m]) if m else np.zeros(0)
    d2 = np.abs(d2)
    return CanonicalForm(
        plus=plus,
        minus=minus,
        d1=d1,
        d2=d2,
        d3=d3,
        d4=d4,
        u1=u1,
        u2=u2,
        flipped=flipped,
    )


def _nonzero_spectrum(block):
    if block.shape[0] == 0:
        return np.zeros(0)
    w = hermitian_eig((block + block.conj().T) / 2).eigenvalues
    return w[np.abs(w) > NONZERO_TOL]


def psp_norm_via_spectra(p, s):
    """``max |1 - 2 lambda|`` over the nonzero spectra of the two diagonal blocks.

    Uses the Jacobi eigensolver on the blocks, independent of :func:`psp_norm`.
    Eigenvalue 1 in either block (which covers a nonzero D4 block) gives 1.
    """
    g = _gram(p)
    s = _as_symmetry(s)
    if s.n != g.shape[0]:
        raise PavingLabError(f"symmetry length {s.n} does not match dimension {g.shape[0]}")
    plus = [i for i, x in enumerate(s.signs) if x == 1]
    minus = [i for i, x in enumerate(s.signs) if x == -1]
    vals = np.concatenate([
        _nonzero_spectrum(g[np.ix_(plus, plus)]),
        _nonzero_spectrum(g[np.ix_(minus, minus)]),
    ])
    if vals.size == 0:
        return 0.0
    if np.any(np.abs(vals - 1.0) <= NONZERO_TOL):
        return 1.0
    return float(np.max(np.abs(1.0 - 2.0 * vals)))


# --- symmetry search ---------------------------------------------------------


def _range_factor(g):
    """n x k matrix V with ``g = V V^H``; ``||P S P|| = ||V^H S V||``."""
    dec = hermitian_eig(g, method="lapack")
    keep = dec.eigenvalues > 0.5
    return dec.basis[:, keep]


def batched_psp_norms(v, signs):
    """``||V^H diag(s) V||`` for each row s of a ``(batch, n)`` sign array."""
    k = v.shape[1]
    if k == 0:
        return np.zeros(signs.shape[0])
    outer = (v.conj()[:, :, None] * v[:, None, :]).reshape(v.shape[0], k * k)
    stack = (signs.astype(float) @ outer).reshape(-1, k, k)
    stack = (stack + stack.conj().transpose(0, 2, 1)) / 2
    w = np.linalg.eigvalsh(stack)
    return np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))


def _signs_from_codes(codes, n):
    """Canonical sign vectors (signs[0] = +1) from integers; bit n-1-i set means -1 at i."""
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1 - 2 * bits


@dataclass(frozen=True)
class SymmetryScan:
    signs: SymmetryVector
    value: float
    method: dict = field(default_factory=dict)


def _map_chunks(fn, chunks, threads):
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, chunks))
    return [fn(c) for c in chunks]


def _reduce(results):
    """Deterministic minimum over ``(value, sign tuple)`` pairs."""
    best = None
    for value, signs in results:
        key = (value, tuple(signs))
        if best is None or key < best:
            best = key
    return best


def min_symmetry_norm(p, strategy="exhaustive", samples=100_000, seed=0, restarts=8,
                      threads=1, chunk=4096, max_n=None):
    """Smallest ``||PSP||`` over diagonal symmetries.

    ``exhaustive`` scans all ``2^(n-1)`` canonical sign vectors; ``random``
    draws ``samples`` seeded sign vectors; ``greedy-flip`` flips single signs
    while the norm strictly drops.  Ties resolve to the lexicographically
    smallest sign vector.  Random mode also records the largest sampled value.
    """
    g = _gram(p)
    n = g.shape[0]
    v = _range_factor(g)
    budget = from_env()
    meta = {"strategy": strategy, "n": n}
    if strategy == "exhaustive":
        limit = budget.symmetry_max_n if max_n is None else max_n
        if n > budget.symmetry_hard_max_n or n > limit:
            raise BudgetExceeded(
                f"exhaustive symmetry scan of n={n} exceeds the budget n <= {min(limit, budget.symmetry_hard_max_n)}",
                advice="use strategy 'random' or 'greedy-flip'",
            )
        total = 1 << (n - 1)
        starts = range(0, total, chunk)

        def run(start):
            codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
            sg = _signs_from_codes(codes, n)
            vals = batched_psp_norms(v, sg)
            i = int(np.argmin(vals))  # first minimiser = lexicographically smallest within chunk
            return float(vals[i]), [int(x) for x in sg[i]]

        best = _reduce(_map_chunks(run, list(starts), threads))
        meta["scanned"] = total
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        sg = 1 - 2 * rng.integers(0, 2, size=(samples, n), dtype=np.int64)
        sg[sg[:, 0] == -1] *= -1
        chunks = [sg[i:i + chunk] for i in range(0, samples, chunk)]

        def run(block):
            vals = batched_psp_norms(v, block)
            out = min(zip(vals.tolist(), map(tuple, block.tolist())))
            return out[0], list(out[1]), float(np.max(vals))

        parts = _map_chunks(run, chunks, threads)
        best = _reduce([(a, b) for a, b, _ in parts])
        meta.update(scanned=samples, seed=seed, generator="PCG64", max_value=max(c for _, _, c in parts))
    elif strategy == "greedy-flip":
        rng = np.random.default_rng(seed)
        results = []
        for _ in range(max(restarts, 1)):
            s = 1 - 2 * rng.integers(0, 2, size=n, dtype=np.int64)
            s = s * s[0]
            cur = float(batched_psp_norms(v, s[None])[0])
            improved = True
            while improved:
                improved = False
                flips = np.repeat(s[None], n, axis=0)
                flips[np.arange(n), np.arange(n)] *= -1
                flips *= flips[:, :1]
                vals = batched_psp_norms(v, flips)
                i = int(np.argmin(vals))
                if vals[i] < cur:
                    s, cur = flips[i], float(vals[i])
                    improved = True
            results.append((cur, [int(x) for x in s]))
        best = _reduce(results)
        meta.update(seed=seed, restarts=restarts)
    else:
        raise PavingLabError(f"unknown symmetry strategy {strategy!r}")
    value, signs = best
    sym = SymmetryVector(tuple(signs))
    return SymmetryScan(signs=sym, value=psp_norm(g, sym), method=meta)


def interval_symmetries(n):
    """The 2n cyclic-interval symmetries: +1 on n//2 or n//2 + 1 consecutive indices."""
    out = []
    for length in (n // 2, n // 2 + 1):
        for start in range(n):
            s = -np.ones(n, dtype=np.int64)
            s[(start + np.arange(length)) % n] = 1
            out.append(s)
    return np.array(out)


# --- Conjecture A integer certificate ------------------------------------------


@dataclass(frozen=True)
class ConjACertificate:
    n: int
    k: int
    lhs: int  # (k-1) n^2
    rhs: int  # 4 k^2 (n-1)

    @property
    def is_counterexample(self):
        return self.lhs > self.rhs

    @property
    def threshold(self):
        """2 delta_P = 2k/n for a uniform (n, k) frame."""
        return 2 * self.k / self.n

    def statement(self):
        if self.is_counterexample:
            return (
                f"every diagonal symmetry S gives ||PSP|| > 2k/n = {2 * self.k}/{self.n} "
                f"for any uniform equiangular ({self.n},{self.k}) Gram projection"
            )
        return "inequality (k-1)n^2 <= 4k^2(n-1) holds; no violation is implied"

    def to_json(self):
        return {
            "n": self.n,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "is_counterexample": self.is_counterexample,
            "statement": self.statement(),
        }


def conj_a_certificate(n, k):
    if not (isinstance(n, int) and isinstance(k, int)) or k < 1:
        raise PavingLabError("n and k must be positive integers")
    if n <= 2 * k:
        raise PavingLabError(f"certificate needs n > 2k, got n={n}, k={k}")
    return ConjACertificate(n=n, k=k, lhs=(k - 1) * n * n, rhs=4 * k * k * (n - 1))


def singer_parameters(q, m=2):
    """(n, k) of the Singer difference set family for prime power q."""
    return (q ** (m + 1) - 1) // (q - 1), (q**m - 1) // (q - 1)


# --- two-block trace inequalities -------------------------------------------


@dataclass(frozen=True)
class TraceReport:
    n: int
    k: int
    r_block: tuple
    trace_matrix: float
    trace_sum: float
    bhkw_bound: float  # (k/4)(1 - k/n)
    pa_threshold: float | None  # k eps (2 - eps)/4 for caller eps
    eps: float | None
    equiangular_c: float | None
    equiangular_value: float | None  # m (n - m) c^2
    equiangular_bound: float | None  # k (n - k) / (4 (n - 1))
    eps_relation_rhs: float | None  # (n - k)/(n - 1)

    @property
    def discrepancy(self):
        return abs(self.trace_matrix - self.trace_sum)

    def to_json(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def conj_b_trace_suite(g, r_block, eps=None, equiangular=None):
    """``Tr(Q_R P Q_T P Q_R)`` by matrix product and by the frame double sum."""
    gp = g if isinstance(g, GramProjection) else GramProjection.from_matrix(g)
    p = gp.gram
    n, k = gp.n, gp.k
    rset = sorted(set(int(i) for i in r_block))
    if not rset or len(rset) >= n or rset[0] < 0 or rset[-1] >= n:
        raise PavingLabError("R and its complement must both be non-empty subsets of range(n)")
    tset = [i for i in range(n) if i not in set(rset)]
    qr = np.zeros(n)
    qr[rset] = 1.0
    qt = 1.0 - qr
    prod = (qr[:, None] * p * qt[None, :]) @ (p * qr[None, :])
    trace_matrix = float(np.real(np.trace(prod)))
    trace_sum = float(sum(abs(p[i, j]) ** 2 for i in rset for j in tset))
    if abs(trace_matrix - trace_sum) > 1e-10:
        raise AssertionError(f"trace paths disagree: {trace_matrix} vs {trace_sum}")
    if equiangular is None:
        off = np.abs(p[~np.eye(n, dtype=bool)])
        equiangular = bool(off.size and np.ptp(off) <= 1e-9 and np.ptp(np.real(np.diag(p))) <= 1e-10)
    c = eq_val = eq_bound = rel = None
    if equiangular and 0 < k < n:
        c = equiangular_constant(n, k)
        m = len(rset)
        eq_val = m * (n - m) * c * c
        eq_bound = k * (n - k) / (4 * (n - 1))
        rel = (n - k) / (n - 1)
    return TraceReport(
        n=n,
        k=k,
        r_block=tuple(rset),
        trace_matrix=trace_matrix,
        trace_sum=trace_sum,
        bhkw_bound=k / 4 * (1 - k / n),
        pa_threshold=None if eps is None else k * eps * (2 - eps) / 4,
        eps=eps,
        equiangular_c=c,
        equiangular_value=eq_val,
        equiangular_bound=eq_bound,
        eps_relation_rhs=rel,
    )


def bhkw_weights(g):
    """``w_ij = |<f_i, f_j>|^2`` off the diagonal, 0 on it."""
    p = _gram(g)
    w = np.abs(p) ** 2
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0.0)
    return w
