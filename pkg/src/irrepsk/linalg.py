"""Dense complex-matrix primitives used by every stage of the compiler.

Matrices are plain numpy arrays of shape (d, d) and dtype complex128.  All
distances are operator-norm (largest singular value) distances; that is the
unitarily invariant metric the contraction analysis is stated in.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
import scipy.linalg

from .errors import ClassError, DimError, InvalidMatrix

DEFAULT_TOL = 1e-9


class MatrixClass(Enum):
    GENERAL = "general"
    SPECIAL_LINEAR = "sl"
    SPECIAL_UNITARY = "su"


def require_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix, rejecting bad shapes and NaN/Inf."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix contains non-finite entries")
    return a


def op_norm(m) -> float:
    """Largest singular value."""
    return float(np.linalg.svd(require_matrix(m), compute_uv=False)[0])


def dist(a, b) -> float:
    """Operator-norm distance ||a - b||."""
    a = require_matrix(a)
    b = require_matrix(b)
    if a.shape != b.shape:
        raise DimError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.svd(a - b, compute_uv=False)[0])


def aligned_dist(a, b, phases=(1.0,)) -> float:
    """min over the given phase factors of ||a - phase * b||.

    With the default single phase 1 this is plain dist().  Projective-mode
    callers pass the d-th roots of unity: those are the only global phases a
    word product can pick up relative to its target, since every factor has
    determinant 1.
    """
    a = require_matrix(a)
    b = require_matrix(b)
    if a.shape != b.shape:
        raise DimError(f"shape mismatch {a.shape} vs {b.shape}")
    return min(
        float(np.linalg.svd(a - z * b, compute_uv=False)[0]) for z in phases
    )


def frobenius_phase(a, b) -> complex:
    """Unit phase z maximising Re tr((z*b)^dag a), i.e. the best Frobenius
    alignment of b onto a.  Returns 1 when the trace inner product vanishes."""
    t = complex(np.vdot(np.asarray(b), np.asarray(a)))
    if abs(t) < 1e-300:
        return 1.0 + 0j
    return t / abs(t)


def determinant(m) -> complex:
    """Determinant via LU factorisation."""
    return complex(np.linalg.det(require_matrix(m)))


def unitarity_residual(m) -> float:
    a = require_matrix(m)
    return float(
        np.linalg.svd(a.conj().T @ a - np.eye(a.shape[0]), compute_uv=False)[0]
    )


def sl_residual(m) -> float:
    return abs(determinant(m) - 1.0)


def check_class(m, klass: MatrixClass, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate m against a matrix class; returns m on success.

    SPECIAL_UNITARY requires both unitarity and det 1, SPECIAL_LINEAR only
    det 1, GENERAL anything square and finite.
    """
    a = require_matrix(m)
    if klass is MatrixClass.GENERAL:
        return a
    r = sl_residual(a)
    if r > tol:
        raise ClassError(f"|det - 1| = {r:.3e} exceeds tolerance {tol:.1e}")
    if klass is MatrixClass.SPECIAL_UNITARY:
        u = unitarity_residual(a)
        if u > tol:
            raise ClassError(
                f"unitarity residual {u:.3e} exceeds tolerance {tol:.1e}"
            )
    return a


def su_normalize(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Rescale a unitary by the principal d-th root of its determinant.

    det(m) = e^{i phi} with phi in (-pi, pi]; the result is e^{-i phi/d} m,
    which has determinant 1.  The branch choice makes su_normalize(X) = -iX.
    """
    a = require_matrix(m)
    u = unitarity_residual(a)
    if u > tol:
        raise ClassError(f"su_normalize needs a unitary input, residual {u:.3e}")
    phi = float(np.angle(np.linalg.det(a)))
    return np.exp(-1j * phi / a.shape[0]) * a


def matrix_exp_tangent(h, t: float, klass: MatrixClass = MatrixClass.SPECIAL_UNITARY,
                       tol: float = DEFAULT_TOL) -> np.ndarray:
    """exp(i t h) for traceless Hermitian h (SU) or exp(t h) for traceless h (SL).

    The traceless requirement keeps the result at determinant 1 exactly.
    """
    a = require_matrix(h)
    scale = max(1.0, float(np.abs(a).max()))
    if abs(np.trace(a)) > tol * scale * a.shape[0]:
        raise ClassError(f"tangent direction is not traceless: tr = {np.trace(a):.3e}")
    if klass is MatrixClass.SPECIAL_UNITARY:
        herm = float(np.abs(a - a.conj().T).max())
        if herm > tol * scale:
            raise ClassError(f"SU tangent direction must be Hermitian, residual {herm:.3e}")
        return scipy.linalg.expm(1j * t * a)
    if klass is MatrixClass.SPECIAL_LINEAR:
        return scipy.linalg.expm(t * a)
    raise ClassError("matrix_exp_tangent needs an SU or SL target class")


# --- seeded samplers used by probes, benchmarks and tests ---

def random_su(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random SU(d) element (exactly Haar for d = 2)."""
    if d == 2:
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        w, x, y, z = q
        return np.array([[w + 1j * z, y + 1j * x],
                         [-y + 1j * x, w - 1j * z]], dtype=complex)
    zmat = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(zmat)
    ph = np.diagonal(r)
    q = q * (ph / np.abs(ph)).conj()
    return su_normalize(q)


def random_traceless_hermitian(d: int, rng: np.random.Generator,
                               unit_norm: bool = True) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (a + a.conj().T) / 2
    h -= np.trace(h) / d * np.eye(d)
    if unit_norm:
        h /= np.linalg.norm(h, 2)
    return h


def random_traceless(d: int, rng: np.random.Generator,
                     unit_norm: bool = True) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    a -= np.trace(a) / d * np.eye(d)
    if unit_norm:
        a /= np.linalg.norm(a, 2)
    return a


def random_sl_near_identity(d: int, rng: np.random.Generator,
                            max_dist: float) -> np.ndarray:
    """Random determinant-1 matrix with dist(M, I) <= max_dist."""
    a = random_traceless(d, rng)
    t = rng.uniform(0.0, 0.8 * max_dist)
    m = scipy.linalg.expm(t * a)
    while op_norm(m - np.eye(d)) > max_dist:
        t *= 0.5
        m = scipy.linalg.expm(t * a)
    return m
