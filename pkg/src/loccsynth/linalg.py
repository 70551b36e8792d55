"""Dense complex linear algebra primitives shared by every other module.

Everything operates on ``complex128`` numpy arrays.  State vectors carry
their tensor factor dimensions alongside the flat amplitude array; the
flat index of a bipartite amplitude is ``i * d_B + j`` for basis vector
``|i>_A |j>_B``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# Shared tolerances.  TAU_ZERO is relative to the Frobenius norm of the
# operand it guards; TAU_ORTH is the looser gate applied to user-supplied
# state pairs, so nearly-orthogonal input is not rejected for float dust.
TAU_ZERO = 1e-10
TAU_NORM = 1e-8
TAU_ORTH = 1e-8


class DimensionMismatchError(ValueError):
    """Operand shapes are incompatible."""


class NotNormalizedError(ValueError):
    """A vector that must be unit norm is not."""


class NonOrthogonalInputError(ValueError):
    """A state pair that must be orthogonal is not."""


def _as_complex_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    # isfinite on complex checks both components, and unlike a float64
    # reinterpret it tolerates non-contiguous views (e.g. unvec output).
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class StateVector:
    """Pure state on a tensor product of finite-dimensional factors.

    ``dims`` lists the factor dimensions left to right; ``amplitudes`` is
    the flat coefficient array in row-major order over those factors.
    Normalization is not enforced here because intermediate (conditional)
    vectors are legitimately subnormalized; call :meth:`require_normalized`
    at the points where unit norm is a precondition.
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        amps = _as_complex_array(self.amplitudes, "amplitudes").reshape(-1).copy()
        if amps.size != math.prod(dims):
            raise DimensionMismatchError(
                f"expected {math.prod(dims)} amplitudes for dims {dims}, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def require_normalized(self, tol: float = TAU_NORM) -> None:
        if abs(self.norm - 1.0) > tol:
            raise NotNormalizedError(f"state norm {self.norm!r} differs from 1 beyond {tol}")

    def overlap(self, other: "StateVector") -> complex:
        """<self|other> with the conjugate on self."""
        if self.dims != other.dims:
            raise DimensionMismatchError(f"dims {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense matrix product with an explicit shape check."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError("matmul expects 2-D operands")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError("adjoint expects a 2-D operand")
    return a.conj().T


def unvec(state: StateVector) -> np.ndarray:
    """Reshape a bipartite state into its coefficient matrix.

    Returns the d_B x d_A matrix M with ``M[j, i] = amplitudes[i * d_B + j]``,
    i.e. the state equals ``sum_ij M[j, i] |j><i|`` read as an operator from
    the A factor to the B factor.  This is a constant-time view.
    """
    if len(state.dims) != 2:
        raise DimensionMismatchError(f"unvec expects a bipartite state, got dims {state.dims}")
    d_a, d_b = state.dims
    return state.amplitudes.reshape(d_a, d_b).T


def vec(matrix: np.ndarray, dims: tuple[int, int] | None = None) -> StateVector:
    """Inverse of :func:`unvec`: fold a d_B x d_A matrix back into a state.

    No norm check is applied; intermediate vectors may be unnormalized.
    """
    m = _as_complex_array(matrix, "matrix")
    if m.ndim != 2:
        raise DimensionMismatchError("vec expects a 2-D matrix")
    d_b, d_a = m.shape
    if dims is not None and tuple(dims) != (d_a, d_b):
        raise DimensionMismatchError(f"matrix shape {m.shape} does not match dims {dims}")
    return StateVector((d_a, d_b), m.T.reshape(-1))


# ---- closed-form 2x2 eigensolver ----
#
# The only eigendecomposition the synthesis pipeline needs.  Works on plain
# Python complex scalars so the flattening inner loop stays cheap.

# Relative width of the "equal to working precision" band used when
# ordering eigenvalues.  A traceless matrix has roots +-lam whose computed
# moduli differ by rounding noise only; without the band the modulus
# comparison would resolve that tie at random instead of falling through
# to the real-part rule.
_TIE_REL = 1e-12


def _eig2x2_scalars(a: complex, b: complex, c: complex, d: complex):
    """Eigenpairs of [[a, b], [c, d]] as plain scalars.

    Returns ((l0, l1), (w0, w1)) with eigenvalues ordered by ascending
    modulus (ties at working precision: ascending real part, then
    ascending imaginary part) and unit eigenvectors as 2-tuples.  A
    defective matrix yields the same eigenvector twice.
    """
    tr = a + d
    det = a * d - b * c
    sq = cmath.sqrt(tr * tr - 4.0 * det)
    # Add the square root with the sign that avoids cancellation, then
    # recover the other root from the determinant.
    if (tr.real * sq.real + tr.imag * sq.imag) < 0.0:
        sq = -sq
    big = 0.5 * (tr + sq)
    if big == 0.0:
        l0 = l1 = 0.0 + 0.0j
    else:
        small = det / big
        l0, l1 = small, big
        tie = _TIE_REL * max(abs(l0), abs(l1))
        if abs(abs(l0) - abs(l1)) > tie:
            swap = abs(l0) > abs(l1)
        elif abs(l0.real - l1.real) > tie:
            swap = l0.real > l1.real
        elif abs(l0.imag - l1.imag) > tie:
            swap = l0.imag > l1.imag
        else:
            swap = False
        if swap:
            l0, l1 = l1, l0
    fro = math.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2)
    w0 = _eigvec_scalars(a, b, c, d, l0, fro)
    w1 = _eigvec_scalars(a, b, c, d, l1, fro)
    return (l0, l1), (w0, w1)


def _eigvec_scalars(a, b, c, d, lam, fro):
    # The eigenvector annihilates both rows of (m - lam I) under the
    # unconjugated pairing; build it from whichever row is larger.
    r0 = (a - lam, b)
    r1 = (c, d - lam)
    n0 = abs(r0[0]) ** 2 + abs(r0[1]) ** 2
    n1 = abs(r1[0]) ** 2 + abs(r1[1]) ** 2
    row, nrm2 = (r0, n0) if n0 >= n1 else (r1, n1)
    if nrm2 <= (TAU_ZERO * fro) ** 2:
        # m is lam I to working precision; every vector qualifies.
        return (1.0 + 0.0j, 0.0 + 0.0j)
    v0 = -row[1]
    v1 = row[0]
    nrm = math.sqrt(abs(v0) ** 2 + abs(v1) ** 2)
    v0 /= nrm
    v1 /= nrm
    # Canonical phase: largest component real positive.
    lead = v0 if abs(v0) >= abs(v1) else v1
    ph = lead / abs(lead)
    return (v0 * ph.conjugate(), v1 * ph.conjugate())


def eig2x2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a 2x2 complex matrix.

    Returns ``(eigvals, eigvecs)`` where ``eigvals`` has the smaller-modulus
    eigenvalue first (ties broken by ascending real, then imaginary part)
    and ``eigvecs[:, k]`` is the unit eigenvector for ``eigvals[k]``.
    """
    m = _as_complex_array(m, "matrix")
    if m.shape != (2, 2):
        raise DimensionMismatchError(f"eig2x2 expects a 2x2 matrix, got {m.shape}")
    (l0, l1), (w0, w1) = _eig2x2_scalars(
        complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])
    )
    vals = np.array([l0, l1], dtype=np.complex128)
    vecs = np.array([[w0[0], w1[0]], [w0[1], w1[1]]], dtype=np.complex128)
    return vals, vecs
