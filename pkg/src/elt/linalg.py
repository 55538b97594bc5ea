"""Dense linear algebra used by every observer in the package.

Matrices are plain ``float64`` numpy arrays in C (row-major) order, samples as
rows. The ridge solver factorizes the regularized normal matrix with Cholesky
and refuses to fall back to a pseudo-inverse when that matrix is singular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class SingularMatrixError(np.linalg.LinAlgError):
    """The normal matrix cannot be factorized; a positive penalty is needed."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 row-major array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("matrix product overflowed")
    return out


@dataclass(frozen=True)
class RidgeSolution:
    """Coefficients mapping a design matrix (p columns) to c outputs."""

    beta: np.ndarray
    lam: float

    @property
    def n_inputs(self) -> int:
        return self.beta.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.beta.shape[1]

    def apply(self, design) -> np.ndarray:
        return matmul(design, self.beta)


def ridge_solve(design, targets, lam: float) -> RidgeSolution:
    """Solve ``(D^T D + lam I) beta = D^T T`` by Cholesky factorization.

    Raises
    ------
    SingularMatrixError
        If the normal matrix is not numerically positive definite. This
        only happens for ``lam == 0`` with rank-deficient designs.
    """
    d = as_matrix(design, "design")
    t = as_matrix(targets, "targets")
    if d.shape[0] != t.shape[0]:
        raise ShapeError(
            f"design has {d.shape[0]} rows but targets have {t.shape[0]}"
        )
    lam = float(lam)
    if not lam >= 0.0:
        raise ValueError(f"lambda must be >= 0, got {lam}")

    p = d.shape[1]
    gram = d.T @ d
    gram[np.diag_indices(p)] += lam
    rhs = d.T @ t
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(
            "normal matrix is singular; use a positive lambda"
        ) from None
    # Cholesky can succeed on a rank-deficient matrix through rounding.
    pivots = np.diag(chol) ** 2
    scale = max(float(np.max(np.diag(gram))), np.finfo(float).tiny)
    if np.min(pivots) <= p * np.finfo(float).eps * scale:
        raise SingularMatrixError(
            "normal matrix is numerically singular; use a positive lambda"
        )
    beta = cho_solve((chol, True), rhs)
    beta.setflags(write=False)
    return RidgeSolution(beta=beta, lam=lam)
