"""Dense small-matrix kernels for Gaussian phase-space states.

Symplectic forms in the two common coordinate orderings, symplectic spectra,
uncertainty checks, congruence transforms, SPD square roots and generalized
eigenvalues. Everything operates on plain ``numpy`` arrays; the light wrapper
types carry the phase-space ordering so callers cannot silently mix bases.

Conventions: the uncertainty threshold is 1, i.e. the spectrum returned by
:func:`symplectic_spectrum` is ``2 |Im eig(Omega^-1 Sigma)|`` and the vacuum
(``Sigma = I/2``) sits exactly at 1. Deformed forms carry their effective
Planck constant inside the form matrix itself, never as a separate scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .errors import NumericDomainError, SingularMatrixError
from .policy import DEFAULT_POLICY, NumericPolicy

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


class Ordering(Enum):
    """Phase-space coordinate ordering of a 2n-dimensional vector."""

    MODE_INTERLEAVED = "mode_interleaved"   # (x1, p1, x2, p2, ...)
    BLOCK_XP = "block_xp"                   # (x1, ..., xn, p1, ..., pn)


def _freeze(matrix) -> np.ndarray:
    out = np.array(matrix, dtype=float)
    out.setflags(write=False)
    return out


def as_matrix(obj) -> np.ndarray:
    """Return the underlying ndarray of a wrapper, or the array itself."""
    if isinstance(obj, (CovarianceMatrix, SymplecticForm)):
        return obj.matrix
    return np.asarray(obj, dtype=float)


def _ordering_of(obj):
    if isinstance(obj, (CovarianceMatrix, SymplecticForm)):
        return obj.ordering
    return None


def _check_square_even(matrix: np.ndarray) -> int:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] % 2:
        raise ValueError(f"phase-space dimension must be even, got {matrix.shape[0]}")
    return matrix.shape[0] // 2


def check_spd(matrix, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Validate symmetry and positive definiteness, returning the array."""
    m = as_matrix(matrix)
    _check_square_even(m)
    asym = np.abs(m - m.T).max()
    if asym > policy.symmetry_tol:
        raise NumericDomainError(f"matrix is not symmetric: max |M - M^T| = {asym:.3e}")
    lam_min = np.linalg.eigvalsh(m).min()
    if lam_min <= policy.spd_tol:
        raise NumericDomainError(f"matrix is not positive definite: min eigenvalue = {lam_min:.3e}")
    return m


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric positive-definite matrix of symmetrized second moments.

    ``ordering`` may be None for caller-managed bases (e.g. a party-blocked
    layout); such objects cannot be re-ordered but work with every spectral
    kernel as long as the companion form uses the same basis.
    """

    matrix: np.ndarray
    ordering: Ordering | None = Ordering.MODE_INTERLEAVED
    policy: NumericPolicy = field(default=DEFAULT_POLICY, repr=False)

    def __post_init__(self):
        m = check_spd(np.asarray(self.matrix, dtype=float), self.policy)
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    """Antisymmetric invertible matrix encoding the commutation relations."""

    matrix: np.ndarray
    ordering: Ordering | None = Ordering.MODE_INTERLEAVED
    hbar_effective: float = 1.0
    policy: NumericPolicy = field(default=DEFAULT_POLICY, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        _check_square_even(m)
        asym = np.abs(m + m.T).max()
        if asym > self.policy.symmetry_tol:
            raise NumericDomainError(f"form is not antisymmetric: max |M + M^T| = {asym:.3e}")
        if abs(np.linalg.det(m)) < self.policy.singular_form_tol:
            raise SingularMatrixError("symplectic form is singular")
        if self.hbar_effective <= 0:
            raise ValueError("hbar_effective must be positive")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


def build_symplectic_form(n_modes: int, ordering: Ordering = Ordering.MODE_INTERLEAVED) -> SymplecticForm:
    """Undeformed form for ``n_modes`` modes in the requested ordering.

    MODE_INTERLEAVED gives ``diag(J2, ..., J2)``; BLOCK_XP gives
    ``[[0, I], [-I, 0]]``.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if ordering is Ordering.MODE_INTERLEAVED:
        m = np.kron(np.eye(n_modes), J2)
    elif ordering is Ordering.BLOCK_XP:
        eye = np.eye(n_modes)
        zero = np.zeros((n_modes, n_modes))
        m = np.block([[zero, eye], [-eye, zero]])
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    return SymplecticForm(m, ordering=ordering, hbar_effective=1.0)


def ordering_permutation(n_modes: int, source: Ordering, target: Ordering) -> np.ndarray:
    """Permutation P with ``v_target = P v_source`` (and P^-1 = P^T)."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if source is target:
        return np.eye(2 * n_modes)
    p = np.zeros((2 * n_modes, 2 * n_modes))
    # rows index BLOCK_XP, columns MODE_INTERLEAVED
    for k in range(n_modes):
        p[k, 2 * k] = 1.0
        p[n_modes + k, 2 * k + 1] = 1.0
    if source is Ordering.MODE_INTERLEAVED and target is Ordering.BLOCK_XP:
        return p
    return p.T


def permute_ordering(matrix: np.ndarray, source: Ordering, target: Ordering) -> np.ndarray:
    """Conjugate a raw matrix from ``source`` to ``target`` ordering."""
    m = np.asarray(matrix, dtype=float)
    n = _check_square_even(m)
    p = ordering_permutation(n, source, target)
    return p @ m @ p.T


def reorder(obj, target: Ordering):
    """Re-express a CovarianceMatrix or SymplecticForm in ``target`` ordering."""
    ordering = _ordering_of(obj)
    if ordering is None:
        raise ValueError("object carries no named ordering; use permute_ordering with an explicit source")
    if isinstance(obj, CovarianceMatrix):
        return CovarianceMatrix(permute_ordering(obj.matrix, ordering, target), ordering=target)
    if isinstance(obj, SymplecticForm):
        return SymplecticForm(permute_ordering(obj.matrix, ordering, target),
                              ordering=target, hbar_effective=obj.hbar_effective)
    raise TypeError(f"cannot reorder object of type {type(obj).__name__}")


def _check_compatible(sigma, form) -> tuple[np.ndarray, np.ndarray]:
    s = as_matrix(sigma)
    w = as_matrix(form)
    if s.shape != w.shape:
        raise ValueError(f"size mismatch: state {s.shape} vs form {w.shape}")
    so, wo = _ordering_of(sigma), _ordering_of(form)
    if so is not None and wo is not None and so is not wo:
        raise ValueError(f"ordering mismatch: state {so} vs form {wo}")
    return s, w


def symplectic_spectrum(sigma, form, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Symplectic (Williamson) invariants of a state with respect to a form.

    Args:
        sigma: SPD state matrix (CovarianceMatrix or ndarray).
        form: invertible antisymmetric form in the same basis.

    Returns:
        The n moduli of the conjugate eigenvalue pairs of ``Omega^-1 Sigma``
        times 2, sorted ascending. With this scaling the uncertainty
        threshold is exactly 1.
    """
    s, w = _check_compatible(sigma, form)
    if not isinstance(sigma, CovarianceMatrix):
        s = check_spd(s, policy)
    if abs(np.linalg.det(w)) < policy.singular_form_tol:
        raise SingularMatrixError("symplectic form is singular")
    eigvals = np.linalg.eigvals(np.linalg.solve(w, s))
    vals = 2.0 * np.sort(np.abs(eigvals.imag))
    scale = max(1.0, vals[-1])
    gaps = np.abs(vals[0::2] - vals[1::2])
    if gaps.max() > policy.pairing_tol * scale:
        raise NumericDomainError(f"could not pair conjugate eigenvalues: max gap {gaps.max():.3e}")
    return 0.5 * (vals[0::2] + vals[1::2])


@dataclass(frozen=True)
class RsupResult:
    valid: bool
    min_invariant: float


def rsup_check(sigma, form, policy: NumericPolicy = DEFAULT_POLICY) -> RsupResult:
    """Robertson-Schrodinger uncertainty check: all invariants >= 1."""
    spectrum = symplectic_spectrum(sigma, form, policy)
    lo = float(spectrum[0])
    return RsupResult(valid=lo >= 1.0 - policy.rsup_slack, min_invariant=lo)


def _check_invertible_transform(s: np.ndarray, dim: int, policy: NumericPolicy):
    if s.shape != (dim, dim):
        raise ValueError(f"transform shape {s.shape} does not match dimension {dim}")
    if abs(np.linalg.det(s)) <= policy.singular_transform_tol:
        raise SingularMatrixError("congruence transform is singular")


def congruence_apply(s, sigma, policy: NumericPolicy = DEFAULT_POLICY) -> CovarianceMatrix:
    """Transform a state by ``Sigma -> S Sigma S^T``.

    The result carries no named ordering: a general invertible S mixes the
    coordinate roles, so the caller owns the basis bookkeeping.
    """
    sm = np.asarray(s, dtype=float)
    m = check_spd(sigma, policy) if not isinstance(sigma, CovarianceMatrix) else sigma.matrix
    _check_invertible_transform(sm, m.shape[0], policy)
    out = sm @ m @ sm.T
    return CovarianceMatrix(0.5 * (out + out.T), ordering=None, policy=policy)


def congruence_form(s, form, policy: NumericPolicy = DEFAULT_POLICY) -> SymplecticForm:
    """Transform a form by ``Omega -> S Omega S^T`` (same basis caveat)."""
    sm = np.asarray(s, dtype=float)
    if not isinstance(form, SymplecticForm):
        form = SymplecticForm(as_matrix(form), ordering=None)
    _check_invertible_transform(sm, form.matrix.shape[0], policy)
    out = sm @ form.matrix @ sm.T
    return SymplecticForm(0.5 * (out - out.T), ordering=None,
                          hbar_effective=form.hbar_effective, policy=policy)


def matrix_sqrt_spd(matrix, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Symmetric positive-definite square root via eigendecomposition.

    Degenerate eigenvalues are fine; only symmetry and positivity are
    required. ``R @ R`` reproduces the input to roundoff.
    """
    m = check_spd(matrix, policy)
    w, v = np.linalg.eigh(m)
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def matrix_inv_sqrt_spd(matrix, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Inverse SPD square root, same route as :func:`matrix_sqrt_spd`."""
    m = check_spd(matrix, policy)
    w, v = np.linalg.eigh(m)
    root = (v / np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def generalized_eigenvalues(sigma1, sigma2, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Eigenvalues of ``Sigma1^-1/2 Sigma2 Sigma1^-1/2``, sorted ascending.

    These solve ``det(Sigma2 - lam Sigma1) = 0``; the symmetric route keeps
    them real and positive for SPD inputs.
    """
    m1 = check_spd(sigma1, policy) if not isinstance(sigma1, CovarianceMatrix) else sigma1.matrix
    m2 = check_spd(sigma2, policy) if not isinstance(sigma2, CovarianceMatrix) else sigma2.matrix
    if m1.shape != m2.shape:
        raise ValueError(f"size mismatch: {m1.shape} vs {m2.shape}")
    inv_root = matrix_inv_sqrt_spd(m1, policy)
    vals = np.linalg.eigvalsh(inv_root @ m2 @ inv_root)
    if vals.min() <= 0:
        raise NumericDomainError("generalized eigenvalues came out nonpositive")
    return np.sort(vals)


# ---------------------------------------------------------------------------
# random generators used by the property batteries and the CLI self checks

def random_spd(dim: int, rng: np.random.Generator, shift: float = 0.5) -> np.ndarray:
    """Random well-conditioned SPD matrix ``A A^T + shift I``."""
    a = rng.normal(size=(dim, dim))
    return a @ a.T + shift * np.eye(dim)


def random_invertible(dim: int, rng: np.random.Generator,
                      smin: float = 0.5, smax: float = 2.0) -> np.ndarray:
    """Random invertible matrix with singular values in [smin, smax]."""
    q1, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    q2, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    s = np.exp(rng.uniform(np.log(smin), np.log(smax), size=dim))
    return q1 @ np.diag(s) @ q2


def random_symplectic(n_modes: int, rng: np.random.Generator, scale: float = 0.5,
                      ordering: Ordering = Ordering.MODE_INTERLEAVED) -> np.ndarray:
    """Random symplectic matrix ``exp(J A)`` with A symmetric."""
    j = build_symplectic_form(n_modes, ordering).matrix
    a = rng.normal(size=(2 * n_modes, 2 * n_modes), scale=scale)
    return expm(j @ (0.5 * (a + a.T)))


def random_local_symplectic(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Block-diagonal pair of single-mode symplectics (interleaved basis)."""
    s1 = random_symplectic(1, rng, scale)
    s2 = random_symplectic(1, rng, scale)
    out = np.zeros((4, 4))
    out[:2, :2] = s1
    out[2:, 2:] = s2
    return out
