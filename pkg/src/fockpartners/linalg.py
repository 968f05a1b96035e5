"""Dense complex-matrix kernel shared by every operator in the package.

All operators (hamiltonians, ladder operators, metrics, frame operators)
are plain ``numpy`` complex128 arrays in row-major layout.  The routines
here are pure functions; nothing is mutated in place.  Rank and kernel
decisions are always made through singular values with a relative
threshold, never through exact zero tests, so that algebraic statements
about kernels survive floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ShapeMismatchError",
    "HermiticityError",
    "PositivityError",
    "ToleranceConfig",
    "DEFAULT_TOL",
    "EigResult",
    "as_cmat",
    "adjoint",
    "commutator",
    "q_commutator",
    "hermitian_eig",
    "kernel_basis",
    "rank_of",
    "positive_powers",
    "fro_norm",
    "gram",
]


class ShapeMismatchError(ValueError):
    """Operands have incompatible shapes."""


class HermiticityError(ValueError):
    """A hermiticity precondition is violated.

    The relative residual ``|M - M^dag| / |M|`` (Frobenius) is kept on the
    ``residual`` attribute.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (hermiticity residual {residual:.3e})")
        self.residual = residual


class PositivityError(ValueError):
    """A positive-definiteness precondition is violated.

    ``min_eigenvalue`` carries the offending smallest eigenvalue.
    """

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(f"{message} (smallest eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used across the package.

    residual_tol : relative bound on operator-identity residuals
    rank_tol     : relative singular-value cutoff for rank/kernel decisions
    cluster_tol  : relative gap below which eigenvalues are grouped as
                   degenerate when labeling joint eigensystems
    """

    residual_tol: float = 1e-10
    rank_tol: float = 1e-10
    cluster_tol: float = 1e-8

    def __post_init__(self):
        for name in ("residual_tol", "rank_tol", "cluster_tol"):
            value = getattr(self, name)
            if not (value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True, eq=False)
class EigResult:
    """Ascending eigenvalues and matching unit-norm eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_cmat(entries) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting NaN/Inf and empty axes."""
    M = np.asarray(entries, dtype=np.complex128)
    if M.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-d matrix, got ndim={M.ndim}")
    if M.shape[0] < 1 or M.shape[1] < 1:
        raise ShapeMismatchError(f"matrix axes must be nonempty, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return M


def _require_square_pair(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape[0] != A.shape[1] or B.shape[0] != B.shape[1]:
        raise ShapeMismatchError(f"operands must be square, got {A.shape} and {B.shape}")
    if A.shape != B.shape:
        raise ShapeMismatchError(f"operands must share a dimension, got {A.shape} and {B.shape}")


def adjoint(M) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(as_cmat(M)).T


def commutator(A, B) -> np.ndarray:
    """AB - BA for square matrices of equal dimension."""
    A = as_cmat(A)
    B = as_cmat(B)
    _require_square_pair(A, B)
    return A @ B - B @ A


def q_commutator(A, B, q: float) -> np.ndarray:
    """Deformed commutator AB - q BA with q in [0, 1]."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"deformation parameter must lie in [0, 1], got {q!r}")
    A = as_cmat(A)
    B = as_cmat(B)
    _require_square_pair(A, B)
    return A @ B - q * (B @ A)


def fro_norm(M) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(M)))


def gram(vectors) -> np.ndarray:
    """Pairwise inner products G[i, j] = <v_i, v_j>, conjugate-linear in i.

    Accepts either a sequence of equal-length vectors or a 2-d array whose
    columns are the vectors.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        V = vectors.astype(np.complex128, copy=False)
    else:
        cols = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors]
        if not cols:
            raise ShapeMismatchError("gram of an empty family is undefined")
        if len({c.shape[0] for c in cols}) != 1:
            raise ShapeMismatchError("gram vectors must share a dimension")
        V = np.column_stack(cols)
    return np.conj(V).T @ V


def _fix_phases(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive.

    Makes eigenvector output reproducible run to run; argmax ties resolve
    to the lowest index.
    """
    idx = np.argmax(np.abs(V), axis=0)
    lead = V[idx, np.arange(V.shape[1])]
    mod = np.abs(lead)
    phase = np.where(mod > 0, lead / np.where(mod > 0, mod, 1.0), 1.0)
    return V / phase[np.newaxis, :]


def hermitian_eig(M, tol: ToleranceConfig = DEFAULT_TOL) -> EigResult:
    """Full eigendecomposition of a hermitian matrix, values ascending.

    Raises HermiticityError when the relative hermiticity residual exceeds
    ``tol.residual_tol``; the input is symmetrized before factorization so
    rounding-level asymmetry never leaks into the output.
    """
    M = as_cmat(M)
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatchError(f"eigendecomposition needs a square matrix, got {M.shape}")
    scale = fro_norm(M)
    residual = fro_norm(M - np.conj(M).T)
    if residual > tol.residual_tol * scale:
        raise HermiticityError("matrix is not hermitian", residual / scale if scale else residual)
    H = (M + np.conj(M).T) / 2.0
    values, vectors = np.linalg.eigh(H)
    return EigResult(values=values, vectors=_fix_phases(vectors))


def kernel_basis(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, as columns.

    The kernel is the span of right singular vectors whose singular value
    falls at or below ``rank_tol`` times the largest one.  The result may
    have zero columns.
    """
    M = as_cmat(M)
    _, s, Vh = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    r = int(np.count_nonzero(s > tol.rank_tol * smax))
    return np.conj(Vh[r:, :]).T


def rank_of(M, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_tol`` times the largest."""
    M = as_cmat(M)
    s = np.linalg.svd(M, compute_uv=False)
    smax = s[0] if s.size else 0.0
    return int(np.count_nonzero(s > tol.rank_tol * smax))


def positive_powers(M, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(M^{1/2}, M^{-1/2}, M^{-1}) of a hermitian positive-definite matrix.

    Computed through the eigendecomposition and re-symmetrized, so each
    returned matrix is exactly hermitian.  Raises PositivityError when the
    smallest eigenvalue does not clear ``rank_tol`` times the spectral
    scale.
    """
    eig = hermitian_eig(M, tol)
    w = eig.values
    scale = float(np.abs(w).max()) if w.size else 0.0
    if w[0] <= tol.rank_tol * scale:
        raise PositivityError("matrix is not positive definite", float(w[0]))
    V = eig.vectors
    Vh = np.conj(V).T

    def rebuild(diag_values: np.ndarray) -> np.ndarray:
        A = (V * diag_values) @ Vh
        return (A + np.conj(A).T) / 2.0

    return rebuild(np.sqrt(w)), rebuild(1.0 / np.sqrt(w)), rebuild(1.0 / w)
