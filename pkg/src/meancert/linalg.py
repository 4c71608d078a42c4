"""Hermitian functional calculus and positivity checks.

Every matrix computation downstream (operator means, norm chains,
certification) funnels through this module, so the contracts are kept
strict: inputs are validated and symmetrized once, eigendecompositions go
through a single wrapper with diagnostic errors, and PSD verdicts always
come with an eigenvalue witness.

Conventions
-----------
* A matrix is accepted as Hermitian when its asymmetry max|M - M*| stays
  below ``hermitian_tol * max(1, max|entry|)``; it is then replaced by its
  Hermitian part (M + M*)/2.  Complex inputs whose imaginary part vanishes
  exactly drop to float64 (real-symmetric fast path).
* Fractional powers clamp eigenvalues in [-psd_tol * scale, 0) to zero,
  where scale = max(1, spectral norm).  Anything more negative is a domain
  error that names the offending eigenvalue.
* ``is_psd`` is tolerance-relative: it passes iff
  lam_min >= -tol * max(1, ||M||_2).
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-8
PSD_TOL = 1e-9
RECON_TOL = 1e-9


class DomainError(ValueError):
    """An input fell outside an operation's mathematical domain."""


def hermitianize(M: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M*)/2 of a square array."""
    M = np.asarray(M)
    return (M + M.conj().T) / 2


def validate_hermitian(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Check shape, finiteness and symmetry, then return the Hermitian part.

    Asymmetry up to ``tol * max(1, max|entry|)`` is folded away by the
    symmetrization; anything larger raises DomainError with the measured
    asymmetry.  A complex result with exactly zero imaginary part is
    returned as float64.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DomainError(f"expected a nonempty square matrix, got shape {M.shape}")
    if not np.issubdtype(M.dtype, np.number):
        raise DomainError(f"expected a numeric matrix, got dtype {M.dtype}")
    if not np.isfinite(M).all():
        raise DomainError("matrix contains non-finite entries")
    scale = max(1.0, float(np.abs(M).max()))
    asym = float(np.abs(M - M.conj().T).max())
    if asym > tol * scale:
        raise DomainError(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} "
            f"exceeds {tol:.1e} * {scale:.3e}"
        )
    H = hermitianize(M)
    if np.iscomplexobj(H) and not H.imag.any():
        H = H.real.copy()
    return H


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns matching eigenvalues


def eigh(M, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    H = validate_hermitian(M, tol)
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise DomainError(
            f"eigendecomposition failed for a {H.shape[0]}x{H.shape[0]} matrix "
            f"(max |entry| {np.abs(H).max():.3e}): {exc}"
        ) from exc
    return EigenDecomposition(w, V)


def mat_fn(M, f: Callable, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its spectrum.

    ``f`` may be vectorized (numpy ufunc style) or scalar-only; it must be
    real-valued and finite on every eigenvalue, otherwise a DomainError
    names the offending eigenvalue.
    """
    w, V = eigh(M, tol)
    fw = None
    with np.errstate(all="ignore"):
        try:
            cand = np.asarray(f(w))
            if cand.shape == w.shape:
                fw = cand
        except (TypeError, ValueError, ArithmeticError):
            fw = None
    if fw is None:
        vals = []
        for k, x in enumerate(w):
            try:
                vals.append(f(float(x)))
            except (ArithmeticError, ValueError) as exc:
                raise DomainError(
                    f"f is undefined at eigenvalue {float(x)!r} (index {k}): {exc}"
                ) from exc
        fw = np.asarray(vals)
    if np.iscomplexobj(fw):
        if np.abs(fw.imag).max() > 0.0:
            k = int(np.argmax(np.abs(fw.imag)))
            raise DomainError(
                f"f is not real-valued at eigenvalue {float(w[k])!r} (index {k})"
            )
        fw = fw.real
    fw = fw.astype(np.float64)
    bad = ~np.isfinite(fw)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise DomainError(f"f is undefined at eigenvalue {float(w[k])!r} (index {k})")
    return hermitianize((V * fw) @ V.conj().T)


def _pow_spectrum(w: np.ndarray, p: float, psd_tol: float) -> np.ndarray:
    """Domain-check an eigenvalue vector for t -> t**p and return w**p.

    Integer p >= 0 works on any spectrum (with 0**0 = 1).  Fractional
    p >= 0 requires PSD up to the clamp window.  Any p < 0 requires
    strictly positive eigenvalues after clamping.
    """
    p = float(p)
    scale = max(1.0, float(np.abs(w).max()))
    if p < 0 or not p.is_integer():
        lo = float(w.min())
        if lo < -psd_tol * scale:
            raise DomainError(
                f"eigenvalue {lo:.6e} is negative beyond the clamp window "
                f"{-psd_tol * scale:.1e}; t**{p} needs a positive semidefinite matrix"
            )
        w = np.maximum(w, 0.0)
        if p < 0 and float(w.min()) <= 0.0:
            raise DomainError(
                f"eigenvalue {float(w.min()):.6e} blocks t**{p}; "
                "a positive definite matrix is required"
            )
    with np.errstate(divide="ignore"):
        return np.power(w, p)


def mat_pow(M, p: float, psd_tol: float = PSD_TOL, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Matrix power M**p via the spectral decomposition.

    mat_pow(M, 0) is the identity (0**0 = 1 convention), mat_pow(M, 1)
    returns the symmetrized input.  See ``_pow_spectrum`` for the domain
    rules on fractional and negative exponents.
    """
    w, V = eigh(M, tol)
    wp = _pow_spectrum(w, p, psd_tol)
    return hermitianize((V * wp) @ V.conj().T)


class PsdCheck(NamedTuple):
    ok: bool
    lam_min: float
    scale: float  # max(1, spectral norm), the tolerance reference
    witness: np.ndarray  # unit eigenvector attaining lam_min


def is_psd(M, tol: float = PSD_TOL) -> PsdCheck:
    """Tolerance-relative PSD test with an eigenvector witness.

    Passes iff lam_min(M) >= -tol * max(1, ||M||_2).  The witness column
    attains lam_min whether or not the check passes, so failures ship a
    concrete direction along which positivity breaks.
    """
    w, V = eigh(M)
    scale = max(1.0, float(np.abs(w).max()))
    lam = float(w[0])  # ascending order
    return PsdCheck(lam >= -tol * scale, lam, scale, V[:, 0])


def hs_norm(M) -> float:
    """Hilbert-Schmidt (Frobenius) norm of any rectangular array."""
    return float(np.linalg.norm(np.asarray(M)))


def spectral_norm(M, tol: float = HERMITIAN_TOL) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    w, _ = eigh(M, tol)
    return float(np.abs(w).max())


def congruence(S, M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Congruence transform S M S* of a Hermitian M.

    Invertibility of S is the caller's responsibility; the transform
    preserves the positive semidefinite cone either way.
    """
    S = np.asarray(S)
    H = validate_hermitian(M, tol)
    return hermitianize(S @ H @ S.conj().T)


class Powers:
    """Cached spectral powers of one Hermitian matrix.

    A single eigendecomposition backs every requested power, keeping
    repeated mean evaluations on the same operand cheap and mutually
    consistent.  Numerically this matches mat_pow exactly: same
    decomposition, same clamp rules.
    """

    def __init__(self, M, psd_tol: float = PSD_TOL, tol: float = HERMITIAN_TOL):
        self.matrix = validate_hermitian(M, tol)
        w, V = eigh(self.matrix, tol)
        self.eigenvalues = w
        self.eigenvectors = V
        self.psd_tol = psd_tol
        self._cache: dict[float, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def pow(self, p: float) -> np.ndarray:
        p = float(p)
        got = self._cache.get(p)
        if got is None:
            if p == 1.0:
                got = self.matrix
            elif p == 0.0:
                # 0^0 = 1 convention: M^0 is the identity even on PSD kernels.
                got = np.eye(self.dim, dtype=self.matrix.dtype)
            else:
                wp = _pow_spectrum(self.eigenvalues, p, self.psd_tol)
                V = self.eigenvectors
                got = hermitianize((V * wp) @ V.conj().T)
            self._cache[p] = got
        return got
