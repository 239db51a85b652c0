"""Dense complex linear algebra over truncated Fock bases.

Conventions used throughout the package: natural units with [x, p] = i,
quadratures x = (a† + a)/sqrt(2), p = i(a† - a)/sqrt(2), vacuum variance 1/2.
Operator functions of exponential type are built in a padded dimension and
cropped back, which keeps the low-photon block accurate despite truncation.
Two-mode composite indices are mode-1 major: (n1, n2) -> n1 * N + n2.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import (
    ContractViolationError,
    InvalidDimensionError,
    ResourceCapError,
)

HERMITICITY_TOL = 1e-12

DEFAULT_TWO_MODE_CAP = 64
TWO_MODE_CAP_ENV = "SQEWIT_TWO_MODE_CAP"

COUPLER_KINDS = ("QND", "BS")


def default_pad(dim: int) -> int:
    """Default padding for exponential-generated gates."""
    return max(20, dim // 2)


# ---------------------------------------------------------------------------
# Elementary operators
# ---------------------------------------------------------------------------


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator: a[n-1, n] = sqrt(n)."""
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    a = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def creation(dim: int) -> np.ndarray:
    """Truncated creation operator (conjugate transpose of annihilation)."""
    return annihilation(dim).conj().T


def number_operator(dim: int) -> np.ndarray:
    """diag(0, 1, ..., dim-1)."""
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum quadratures (x, p), both Hermitian."""
    a = annihilation(dim)
    ad = a.conj().T
    x = (ad + a) / np.sqrt(2.0)
    p = 1j * (ad - a) / np.sqrt(2.0)
    return x, p


def crop(matrix: np.ndarray, dim: int) -> np.ndarray:
    """Top-left dim x dim block as a fresh array."""
    return np.array(matrix[:dim, :dim], copy=True)


# ---------------------------------------------------------------------------
# Hermitian eigendecomposition and matrix functions
# ---------------------------------------------------------------------------


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def hermiticity_defect(matrix: np.ndarray) -> float:
    """max |M - M†| elementwise."""
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def is_hermitian(matrix: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    """Hermiticity check with a scale-aware tolerance."""
    scale = max(1.0, float(np.max(np.abs(matrix))))
    return hermiticity_defect(matrix) <= tol * scale


def hermitian_eig(matrix: np.ndarray, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    The input is symmetrized as (M + M†)/2 before solving to absorb the
    rounding accumulated by Kronecker and exponential chains. Inputs whose
    defect exceeds the (scale-relative) tolerance are rejected.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {matrix.shape}")
    if not is_hermitian(matrix, tol):
        raise ContractViolationError(
            f"matrix is not Hermitian within tolerance (defect {hermiticity_defect(matrix):.3e})"
        )
    sym = (matrix + matrix.conj().T) / 2.0
    values, vectors = np.linalg.eigh(sym)
    return EigenDecomposition(values=values, vectors=vectors)


def matrix_function(
    matrix: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = HERMITICITY_TOL,
) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Returns V f(L) V†. The result is Hermitian whenever f is real-valued;
    complex-valued f (e.g. lam -> exp(i*lam)) yields the corresponding
    operator function of the same eigenbasis. Raises if f is undefined
    (NaN/inf) at an eigenvalue.
    """
    eig = hermitian_eig(matrix, tol)
    fvals = np.asarray(f(eig.values))
    if fvals.shape != eig.values.shape:
        raise ContractViolationError("scalar function must map eigenvalues elementwise")
    if not np.all(np.isfinite(fvals)):
        raise ContractViolationError("scalar function undefined at an eigenvalue")
    return (eig.vectors * fvals) @ eig.vectors.conj().T


# ---------------------------------------------------------------------------
# Gaussian unitaries (padded construction, cropped result)
# ---------------------------------------------------------------------------


def displacement_x(u: float, dim: int, pad: int | None = None) -> np.ndarray:
    """x-displacement exp(-i u p), built at dim+pad and cropped to dim."""
    if pad is None:
        pad = default_pad(dim)
    if pad < 0:
        raise ContractViolationError("pad must be >= 0")
    _, p = quadratures(dim + pad)
    full = matrix_function(p, lambda lam: np.exp(-1j * u * lam))
    return crop(full, dim)


def displacement_x_exact(s: float, dim: int) -> np.ndarray:
    """Exact Fock-basis block of the x-displacement exp(-i s p).

    Closed-form matrix elements (associated Laguerre polynomials), i.e. the
    true truncation of the infinite-dimensional operator with no padding
    error. Used where spectral sampling of a truncated quadrature would
    alias, such as the harmonics of sharp momentum combs.
    """
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    if s == 0.0:
        return np.eye(dim)
    alpha = s / np.sqrt(2.0)
    x = alpha * alpha
    n = np.arange(dim)
    nn, mm = np.meshgrid(n, n, indexing="ij")
    i = np.maximum(nn, mm)
    j = np.minimum(nn, mm)
    d = i - j
    log_mag = (
        0.5 * (gammaln(j + 1) - gammaln(i + 1))
        + np.where(d > 0, d * np.log(abs(alpha)), 0.0)
        - 0.5 * x
    )
    lag = eval_genlaguerre(j, d, x)
    sign = np.where(nn >= mm, np.sign(alpha) ** d, (-np.sign(alpha)) ** d)
    return sign * np.exp(log_mag) * lag


def displacement_p(v: float, dim: int, pad: int | None = None) -> np.ndarray:
    """p-displacement exp(i v x), built at dim+pad and cropped to dim."""
    if pad is None:
        pad = default_pad(dim)
    x, _ = quadratures(dim + pad)
    full = matrix_function(x, lambda lam: np.exp(1j * v * lam))
    return crop(full, dim)


def squeeze(r: float, dim: int, pad: int | None = None) -> np.ndarray:
    """Squeezing exp[(r/2)(a² - a†²)]; r > 0 narrows the x quadrature."""
    if pad is None:
        pad = default_pad(dim)
    big = dim + pad
    a = annihilation(big)
    # exp(r G) with anti-Hermitian G = (a² - a†²)/2, via the Hermitian -iG.
    h = -0.5j * (a @ a - a.conj().T @ a.conj().T)
    full = matrix_function(h, lambda lam: np.exp(1j * r * lam))
    return crop(full, dim)


def phase_rotation(theta: float, dim: int) -> np.ndarray:
    """Fock-diagonal rotation exp(i theta n)."""
    return np.diag(np.exp(1j * theta * np.arange(dim))).astype(complex)


# ---------------------------------------------------------------------------
# Two-mode couplers
# ---------------------------------------------------------------------------


def two_mode_cap() -> int:
    """Single-mode dimension cap for two-mode builds (env-overridable)."""
    env = os.environ.get(TWO_MODE_CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ContractViolationError(
                f"{TWO_MODE_CAP_ENV} must be an integer, got {env!r}"
            ) from exc
    return DEFAULT_TWO_MODE_CAP


def coupler_generator(kind: str, dim: int) -> np.ndarray:
    """Hermitian generator of the requested Gaussian coupling.

    QND couples as x1*p2; BS as (pi/4)(p1*x2 - p2*x1). Mode-1 major
    Kronecker composition.
    """
    x, p = quadratures(dim)
    if kind == "QND":
        return np.kron(x, p)
    if kind == "BS":
        return (np.pi / 4.0) * (np.kron(p, x) - np.kron(x, p))
    raise ContractViolationError(f"unknown coupler kind {kind!r}; expected one of {COUPLER_KINDS}")


def _qnd_coupler(dim: int) -> np.ndarray:
    # exp(-i x1 p2): the generator's eigenbasis is the Kronecker product of
    # the single-mode x and p eigenbases, so the big eigensolve factorizes.
    x, p = quadratures(dim)
    mu, w = np.linalg.eigh((x + x.conj().T) / 2)
    lam, v = np.linalg.eigh((p + p.conj().T) / 2)
    k = np.kron(w, v)
    phases = np.exp(-1j * np.outer(mu, lam).ravel())
    return (k * phases) @ k.conj().T


def _photon_sector_indices(dim: int, total: int) -> np.ndarray:
    lo = max(0, total - dim + 1)
    hi = min(total, dim - 1)
    n1 = np.arange(lo, hi + 1)
    return n1 * dim + (total - n1)


def _bs_coupler(dim: int) -> np.ndarray:
    # exp(+i H); H conserves total photon number, so it is exactly
    # block-diagonal over the sectors n1 + n2 = s and each block is small.
    h = coupler_generator("BS", dim)
    out = np.zeros_like(h)
    for s in range(2 * dim - 1):
        idx = _photon_sector_indices(dim, s)
        block = h[np.ix_(idx, idx)]
        lam, z = np.linalg.eigh((block + block.conj().T) / 2)
        out[np.ix_(idx, idx)] = (z * np.exp(1j * lam)) @ z.conj().T
    return out


@lru_cache(maxsize=8)
def _coupler_cached(kind: str, dim: int) -> np.ndarray:
    u = _qnd_coupler(dim) if kind == "QND" else _bs_coupler(dim)
    u.flags.writeable = False
    return u


def two_mode_coupler(kind: str, dim: int, allow_large: bool = False) -> np.ndarray:
    """Unitary two-mode coupler of dimension dim² x dim².

    Cached read-only per (kind, dim). Builds above the memory cap (default
    single-mode dim 64, override via SQEWIT_TWO_MODE_CAP or allow_large)
    are refused.
    """
    kind = kind.upper()
    if kind not in COUPLER_KINDS:
        raise ContractViolationError(f"unknown coupler kind {kind!r}; expected one of {COUPLER_KINDS}")
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    cap = two_mode_cap()
    if dim > cap and not allow_large:
        raise ResourceCapError(
            f"two-mode build at single-mode dim {dim} exceeds the cap {cap}; "
            f"set {TWO_MODE_CAP_ENV} or pass allow_large=True"
        )
    return _coupler_cached(kind, dim)


# ---------------------------------------------------------------------------
# Hermite functions and momentum eigenbras
# ---------------------------------------------------------------------------


def hermite_functions(n_max: int, t: np.ndarray) -> np.ndarray:
    """Harmonic-oscillator eigenfunctions phi_0..phi_n_max on a grid.

    phi_n(t) = H_n(t) exp(-t²/2) / (pi^(1/4) sqrt(2^n n!)), evaluated with
    the stable three-term recurrence (no explicit factorials).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((n_max + 1, t.size))
    out[0] = np.pi ** (-0.25) * np.exp(-0.5 * t * t)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * t * out[0]
    for n in range(2, n_max + 1):
        out[n] = np.sqrt(2.0 / n) * t * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def momentum_wavefunction_coeffs(p0: float, dim: int) -> np.ndarray:
    """Fock coefficients psi_n(p0) = <p0|n> with the (-i)^n phase convention."""
    phi = hermite_functions(dim - 1, np.array([p0]))[:, 0]
    return (-1j) ** np.arange(dim) * phi


def momentum_eigenbra(p0: float, dim: int) -> np.ndarray:
    """Row vector representing <p = p0| on the truncated Fock basis.

    Entry n is conj(psi_n(p0)); contracting it against a mode evaluates the
    (unnormalizable) momentum-eigenstate overlap used by homodyne
    post-selection at outcome p0.
    """
    return momentum_wavefunction_coeffs(p0, dim).conj()


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FockState:
    """Normalized pure state in a truncated Fock basis (immutable)."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidDimensionError("state amplitudes must form a nonempty 1-D vector")
        norm = np.linalg.norm(amps)
        if norm == 0.0 or not np.isfinite(norm):
            raise ContractViolationError("cannot normalize a zero or non-finite vector")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    def padded(self, dim: int) -> "FockState":
        """The same state embedded in a larger space."""
        if dim < self.dim:
            raise InvalidDimensionError("padded dimension smaller than state dimension")
        amps = np.zeros(dim, dtype=complex)
        amps[: self.dim] = self.amps
        return FockState(amps)


def basis_state(dim: int, n: int) -> FockState:
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"Fock index {n} outside [0, {dim})")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return FockState(amps)


def vacuum(dim: int) -> FockState:
    return basis_state(dim, 0)


def expectation(op: np.ndarray, state: FockState) -> float:
    """<psi|op|psi> (real part; intended for Hermitian observables)."""
    if op.shape != (state.dim, state.dim):
        raise ContractViolationError(
            f"operator shape {op.shape} does not match state dimension {state.dim}"
        )
    return float(np.real(np.vdot(state.amps, op @ state.amps)))


def overlap_fidelity(psi: FockState, phi: FockState) -> float:
    """|<psi|phi>|² for pure states of equal dimension."""
    if psi.dim != phi.dim:
        raise ContractViolationError(f"dimension mismatch: {psi.dim} vs {phi.dim}")
    return float(min(1.0, abs(np.vdot(psi.amps, phi.amps)) ** 2))


def position_wavefunction(state: FockState, xs: np.ndarray) -> np.ndarray:
    """<x|psi> on a grid (real Hermite-function expansion)."""
    phi = hermite_functions(state.dim - 1, xs)
    return state.amps @ phi.astype(complex)


def momentum_wavefunction(state: FockState, ps: np.ndarray) -> np.ndarray:
    """<p|psi> on a grid, carrying the (-i)^n momentum phase convention."""
    phi = hermite_functions(state.dim - 1, ps).astype(complex)
    phases = (-1j) ** np.arange(state.dim)
    return (state.amps * phases) @ phi


# ---------------------------------------------------------------------------
# Wigner function
# ---------------------------------------------------------------------------


def wigner(state: FockState, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Wigner function on the rectangular grid xs × ps.

    Normalized so the vacuum gives W(0, 0) = 1/pi and the double Riemann sum
    of W over phase space approaches 1. Returned array has shape
    (len(xs), len(ps)) with W[i, j] = W(xs[i], ps[j]).
    """
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if xs.size == 0 or ps.size == 0:
        raise ContractViolationError("wigner grid must be nonempty")
    rho = np.outer(state.amps, state.amps.conj())
    cutoff = state.dim

    xg, pg = np.meshgrid(xs, ps, indexing="ij")
    alpha = (xg + 1j * pg) / np.sqrt(2.0)

    # Two-row recurrence over the displaced-vacuum kernels W_{mn}(alpha).
    wmat = np.zeros((2, cutoff) + alpha.shape, dtype=complex)
    wmat[0, 0] = np.exp(-2.0 * np.abs(alpha) ** 2) / np.pi
    w = np.real(rho[0, 0]) * np.real(wmat[0, 0])
    for n in range(1, cutoff):
        wmat[0, n] = (2.0 * alpha * wmat[0, n - 1]) / np.sqrt(n)
        w = w + 2.0 * np.real(rho[0, n] * wmat[0, n])
    for m in range(1, cutoff):
        wmat[1, m] = (2.0 * alpha.conj() * wmat[0, m] - np.sqrt(m) * wmat[0, m - 1]) / np.sqrt(m)
        w = w + np.real(rho[m, m] * wmat[1, m])
        for n in range(m + 1, cutoff):
            wmat[1, n] = (2.0 * alpha * wmat[1, n - 1] - np.sqrt(m) * wmat[0, n - 1]) / np.sqrt(n)
            w = w + 2.0 * np.real(rho[m, n] * wmat[1, n])
        wmat[0] = wmat[1]
    return w
