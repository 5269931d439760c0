"""Dense real linear algebra used by the OMP loop.

Matrices and vectors are plain float64 numpy arrays. Supports are sorted
tuples of column indices.
"""
import numpy as np

RANK_TOL = 1e-12


class SingularSupportError(ValueError):
    """Raised when the columns indexed by a support are numerically dependent."""

    def __init__(self, support, message=None):
        self.support = tuple(support)
        super().__init__(message or f"rank-deficient columns on support {self.support}")


def as_matrix(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_vector(v):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_support(indices, n):
    """Normalize ``indices`` into a strictly increasing tuple within ``[0, n)``."""
    S = sorted(int(i) for i in indices)
    if len(set(S)) != len(S):
        raise ValueError(f"duplicate indices in support {S}")
    if S and (S[0] < 0 or S[-1] >= n):
        raise ValueError(f"support {S} out of range for dimension {n}")
    return tuple(S)


def mat_vec(A, v):
    A, v = as_matrix(A), as_vector(v)
    if v.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {v.shape}")
    return A @ v


def correlations(A, r):
    """Column/residual inner products ``A' r``."""
    A, r = as_matrix(A), as_vector(r)
    if r.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape}' @ {r.shape}")
    return A.T @ r


def _checked_lstsq(A, y, S):
    A, y = as_matrix(A), as_vector(y)
    m, n = A.shape
    if y.shape[0] != m:
        raise ValueError(f"dimension mismatch: y has length {y.shape[0]}, expected {m}")
    S = as_support(S, n)
    if len(S) > m:
        raise ValueError(f"support of size {len(S)} exceeds row count {m}")
    if not S:
        return A, y, S, np.zeros(0)
    sub = A[:, S]
    Q, R = np.linalg.qr(sub)
    # |R_jj| is the norm of column j after projecting out the earlier columns.
    norms = np.linalg.norm(sub, axis=0)
    diag = np.abs(np.diag(R))
    if np.any(diag <= RANK_TOL * norms) or np.any(norms == 0):
        raise SingularSupportError(S)
    coef = np.linalg.solve(R, Q.T @ y)
    return A, y, S, coef


def least_squares_on_support(A, y, S):
    """Minimize ``||y - A u||`` over vectors ``u`` supported on ``S``.

    Returns the full length-n vector; entries outside ``S`` are exactly zero.
    """
    A, y, S, coef = _checked_lstsq(A, y, S)
    u = np.zeros(A.shape[1])
    u[list(S)] = coef
    return u


def projection_residual(A, y, S):
    """``y - P_S y``, the part of ``y`` orthogonal to ``span(A[:, S])``."""
    A, y, S, coef = _checked_lstsq(A, y, S)
    if not S:
        return y.copy()
    return y - A[:, S] @ coef


class IncrementalSolver:
    """Least squares on a support that grows one column at a time.

    Keeps a thin QR factorization ``A_S = Q R`` so that ``R`` is the upper
    Cholesky factor of the Gram matrix ``A_S' A_S``. Each extension costs
    ``O(m |S|)`` and the solve ``O(|S|^2)``.
    """

    def __init__(self, A, y=None):
        self.A = as_matrix(A)
        self.y = None if y is None else as_vector(y)
        if self.y is not None and self.y.shape[0] != self.A.shape[0]:
            raise ValueError("dimension mismatch between matrix and measurements")
        m = self.A.shape[0]
        self.order = []
        self._Q = np.zeros((m, 0))
        self._R = np.zeros((0, 0))
        self._qty = np.zeros(0)

    @property
    def support(self):
        return tuple(sorted(self.order))

    def __len__(self):
        return len(self.order)

    def extend(self, new_index):
        """Append column ``new_index``; raises on duplicates or dependence."""
        m, n = self.A.shape
        i = int(new_index)
        if not 0 <= i < n:
            raise ValueError(f"index {i} out of range for {n} columns")
        if i in self.order:
            raise ValueError(f"index {i} already in support")
        if len(self.order) >= m:
            raise ValueError(f"support already has {m} columns")
        a = self.A[:, i]
        a_norm = np.linalg.norm(a)
        w = self._Q.T @ a
        q = a - self._Q @ w
        # Second Gram-Schmidt pass keeps Q orthonormal to working precision.
        w2 = self._Q.T @ q
        q -= self._Q @ w2
        w += w2
        rho = np.linalg.norm(q)
        if a_norm == 0 or rho <= RANK_TOL * a_norm:
            raise SingularSupportError(self.order + [i], f"column {i} is numerically in the span of {sorted(self.order)}")
        q /= rho
        k = len(self.order)
        R = np.zeros((k + 1, k + 1))
        R[:k, :k] = self._R
        R[:k, k] = w
        R[k, k] = rho
        self._R = R
        self._Q = np.column_stack([self._Q, q])
        if self.y is not None:
            self._qty = np.append(self._qty, q @ self.y)
        self.order.append(i)
        return self

    def coefficients(self, y=None):
        """Coefficients in insertion order."""
        if y is None:
            if self.y is None:
                raise ValueError("no measurement vector bound to the solver")
            qty = self._qty
        else:
            qty = self._Q.T @ as_vector(y)
        if not self.order:
            return np.zeros(0)
        return _back_substitute(self._R, qty)

    def solve(self, y=None):
        """Full length-n least-squares solution on the current support."""
        u = np.zeros(self.A.shape[1])
        if self.order:
            u[self.order] = self.coefficients(y)
        return u


def _back_substitute(R, b):
    k = R.shape[0]
    x = np.zeros(k)
    for j in range(k - 1, -1, -1):
        x[j] = (b[j] - R[j, j + 1:] @ x[j + 1:]) / R[j, j]
    return x


def solver_extend(solver, new_index):
    return solver.extend(new_index)
