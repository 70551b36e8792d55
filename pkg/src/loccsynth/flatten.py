"""Unitary diagonal flattening.

Given a square complex matrix M, produce a unitary U such that every
diagonal entry of U M U* equals tr(M) / d_pad, where d_pad is M padded up
to the next power of two.  For a 2x2 the unitary comes from a closed-form
eigenbasis rotation; larger sizes are handled by pairing diagonal entries
layer by layer, butterfly style, so exactly ceil(log2 d) layers run and
each layer only ever solves independent 2x2 subproblems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import (
    TAU_ZERO,
    DimensionMismatchError,
    _TIE_REL,
    _as_complex_array,
    _eig2x2_scalars,
)


@dataclass(frozen=True)
class FlatteningResult:
    """Outcome of :func:`uflatgen`.

    ``unitary`` is d_pad x d_pad; ``residual`` is the max deviation of the
    transformed diagonal from tr(M) / d_pad, measured on the incrementally
    updated matrix.  Use :func:`verify_flat` for an independent check.
    """

    unitary: np.ndarray
    padded_dim: int
    original_dim: int
    residual: float

    def __post_init__(self):
        u = _as_complex_array(self.unitary, "unitary").copy()
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)


def _uflat2_scalars(m00, m01, m10, m11):
    """Columns (u, v) of the 2x2 flattening unitary, as scalar 4-tuples.

    u is built so <u| (M - tr(M)/2 I) |u> = 0; v is the remaining basis
    vector.  Both diagonal entries of U* M U then equal tr(M) / 2.
    """
    half_tr = 0.5 * (m00 + m11)
    t00 = m00 - half_tr
    t11 = m11 - half_tr
    fro = math.sqrt(abs(t00) ** 2 + abs(m01) ** 2 + abs(m10) ** 2 + abs(t11) ** 2)
    (l0, _l1), (w0, w1) = _eig2x2_scalars(t00, m01, m10, t11)
    if abs(l0) <= TAU_ZERO * fro:
        # Zero eigenvalue: the eigenvector itself already has a vanishing
        # diagonal expectation, pair it with its orthogonal complement.
        u0, u1 = w0
        return u0, u1, -u1.conjugate(), u0.conjugate()
    # Distinct eigenvalues +-l0: mix the eigenvectors with the phase that
    # makes the cross terms cancel.  For a normal matrix the eigenvectors
    # are orthogonal and any phase works; the inner product is then pure
    # rounding noise, so read it as zero and use phase 1.
    ip = w1[0].conjugate() * w0[0] + w1[1].conjugate() * w0[1]
    aip = abs(ip)
    e = ip.conjugate() / aip if aip > _TIE_REL else 1.0 + 0.0j
    xp0 = e * w0[0] + w1[0]
    xp1 = e * w0[1] + w1[1]
    np_ = math.sqrt(abs(xp0) ** 2 + abs(xp1) ** 2)
    u0 = xp0 / np_
    u1 = xp1 / np_
    xm0 = e * w0[0] - w1[0]
    xm1 = e * w0[1] - w1[1]
    nm = math.sqrt(abs(xm0) ** 2 + abs(xm1) ** 2)
    if nm == 0.0:
        return u0, u1, -u1.conjugate(), u0.conjugate()
    v0 = xm0 / nm
    v1 = xm1 / nm
    # One re-orthogonalization pass keeps U unitary to working precision
    # even when the eigenvectors are nearly parallel.
    ov = u0.conjugate() * v0 + u1.conjugate() * v1
    v0 -= ov * u0
    v1 -= ov * u1
    nv = math.sqrt(abs(v0) ** 2 + abs(v1) ** 2)
    if nv == 0.0:
        return u0, u1, -u1.conjugate(), u0.conjugate()
    return u0, u1, v0 / nv, v1 / nv


def uflat2(m: np.ndarray) -> np.ndarray:
    """Unitary U = [u v] equalizing the diagonal of a 2x2: diag(U* M U) = tr(M)/2."""
    m = _as_complex_array(m, "matrix")
    if m.shape != (2, 2):
        raise DimensionMismatchError(f"uflat2 expects a 2x2 matrix, got {m.shape}")
    u0, u1, v0, v1 = _uflat2_scalars(
        complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])
    )
    return np.array([[u0, v0], [u1, v1]], dtype=np.complex128)


def _modulus_greater(x, y):
    # Elementwise lexicographic (|.|, Re, Im) comparison with the same
    # working-precision tie band as the scalar eigensolver.
    ax = np.abs(x)
    ay = np.abs(y)
    tie = _TIE_REL * np.maximum(ax, ay)
    by_mod = np.abs(ax - ay) > tie
    by_re = np.abs(x.real - y.real) > tie
    return np.where(
        by_mod, ax > ay, np.where(by_re, x.real > y.real, (np.abs(x.imag - y.imag) > tie) & (x.imag > y.imag))
    )


def _eigvec_batch(a, b, c, d, lam, fro):
    # Elementwise version of linalg._eigvec_scalars.
    r00 = a - lam
    r01 = b
    r10 = c
    r11 = d - lam
    n0 = np.abs(r00) ** 2 + np.abs(r01) ** 2
    n1 = np.abs(r10) ** 2 + np.abs(r11) ** 2
    take0 = n0 >= n1
    p = np.where(take0, r00, r10)
    q = np.where(take0, r01, r11)
    nrm2 = np.where(take0, n0, n1)
    tiny = nrm2 <= (TAU_ZERO * fro) ** 2
    v0 = -q
    v1 = p
    nrm = np.sqrt(np.abs(v0) ** 2 + np.abs(v1) ** 2)
    safe = np.where(tiny, 1.0, nrm)
    v0 = np.where(tiny, 1.0 + 0.0j, v0 / safe)
    v1 = np.where(tiny, 0.0 + 0.0j, v1 / safe)
    lead = np.where(np.abs(v0) >= np.abs(v1), v0, v1)
    alead = np.abs(lead)
    ph = np.where(alead > 0.0, lead / np.where(alead > 0.0, alead, 1.0), 1.0 + 0.0j)
    return v0 * ph.conjugate(), v1 * ph.conjugate()


def _uflat2_batch(m00, m01, m10, m11):
    """Vectorized :func:`_uflat2_scalars` over aligned 1-D entry arrays.

    Builds every 2x2 rotation of a butterfly layer in one shot; lanes that
    take a different branch are masked with where().  Returns the column
    entries (u0, u1, v0, v1).
    """
    half_tr = 0.5 * (m00 + m11)
    t00 = m00 - half_tr
    t11 = m11 - half_tr
    fro = np.sqrt(
        np.abs(t00) ** 2 + np.abs(m01) ** 2 + np.abs(m10) ** 2 + np.abs(t11) ** 2
    )

    tr = t00 + t11  # zero by construction, kept for formula parity
    det = t00 * t11 - m01 * m10
    sq = np.sqrt(tr * tr - 4.0 * det)
    sq = np.where((tr.real * sq.real + tr.imag * sq.imag) < 0.0, -sq, sq)
    big = 0.5 * (tr + sq)
    degen = big == 0.0
    small = np.where(degen, 0.0 + 0.0j, det / np.where(degen, 1.0, big))
    big = np.where(degen, 0.0 + 0.0j, big)
    swap = _modulus_greater(small, big)
    l0 = np.where(swap, big, small)
    l1 = np.where(swap, small, big)

    w00, w01 = _eigvec_batch(t00, m01, m10, t11, l0, fro)
    w10, w11 = _eigvec_batch(t00, m01, m10, t11, l1, fro)

    zero = np.abs(l0) <= TAU_ZERO * fro

    ip = w10.conjugate() * w00 + w11.conjugate() * w01
    aip = np.abs(ip)
    sig = aip > _TIE_REL
    e = np.where(sig, ip.conjugate() / np.where(sig, aip, 1.0), 1.0 + 0.0j)
    xp0 = e * w00 + w10
    xp1 = e * w01 + w11
    npl = np.sqrt(np.abs(xp0) ** 2 + np.abs(xp1) ** 2)
    npl = np.where(npl == 0.0, 1.0, npl)
    gu0 = xp0 / npl
    gu1 = xp1 / npl
    xm0 = e * w00 - w10
    xm1 = e * w01 - w11
    nm = np.sqrt(np.abs(xm0) ** 2 + np.abs(xm1) ** 2)
    collapsed = nm == 0.0
    nm = np.where(collapsed, 1.0, nm)
    gv0 = xm0 / nm
    gv1 = xm1 / nm
    ov = gu0.conjugate() * gv0 + gu1.conjugate() * gv1
    gv0 = gv0 - ov * gu0
    gv1 = gv1 - ov * gu1
    nv = np.sqrt(np.abs(gv0) ** 2 + np.abs(gv1) ** 2)
    bad = collapsed | (nv == 0.0)
    nv = np.where(nv == 0.0, 1.0, nv)
    gv0 = np.where(bad, -gu1.conjugate(), gv0 / nv)
    gv1 = np.where(bad, gu0.conjugate(), gv1 / nv)

    u0 = np.where(zero, w00, gu0)
    u1 = np.where(zero, w01, gu1)
    v0 = np.where(zero, -w01.conjugate(), gv0)
    v1 = np.where(zero, w00.conjugate(), gv1)
    return u0, u1, v0, v1


def uflatgen(
    m: np.ndarray,
    d: int | None = None,
    on_layer: Callable[[int, np.ndarray], None] | None = None,
) -> FlatteningResult:
    """Flatten the diagonal of a d x d matrix, d >= 2.

    M is zero padded to d_pad = 2**ceil(log2 d).  Layer p pairs diagonal
    positions i and i + 2**p within aligned blocks of width 2**(p + 1) and
    equalizes each pair with :func:`uflat2`; after the last layer every
    diagonal entry of U M_pad U* equals tr(M) / d_pad.  ``on_layer`` is
    called with (p, current matrix) after each layer, for instrumentation.
    """
    m = _as_complex_array(m, "matrix")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"uflatgen expects a square matrix, got {m.shape}")
    if d is None:
        d = m.shape[0]
    if d != m.shape[0]:
        raise DimensionMismatchError(f"declared dimension {d} does not match shape {m.shape}")
    if d < 2:
        raise DimensionMismatchError("uflatgen needs dimension >= 2")

    k = (d - 1).bit_length()
    n = 1 << k
    cur = np.zeros((n, n), dtype=np.complex128)
    cur[:d, :d] = m
    target = np.trace(m) / n

    u_tot = np.eye(n, dtype=np.complex128)
    for p in range(k):
        step = 1 << p
        base = np.arange(n >> (p + 1)) << (p + 1)
        ii = (base[:, None] + np.arange(step)[None, :]).reshape(-1)
        jj = ii + step
        u0, u1, v0, v1 = _uflat2_batch(cur[ii, ii], cur[ii, jj], cur[jj, ii], cur[jj, jj])
        layer = np.eye(n, dtype=np.complex128)
        layer[ii, ii] = u0
        layer[jj, ii] = u1
        layer[ii, jj] = v0
        layer[jj, jj] = v1
        layer_h = layer.conj().T
        cur = layer_h @ cur @ layer
        u_tot = layer_h @ u_tot
        if on_layer is not None:
            on_layer(p, cur)

    residual = float(np.max(np.abs(np.diagonal(cur) - target)))
    return FlatteningResult(unitary=u_tot, padded_dim=n, original_dim=d, residual=residual)


def verify_flat(m: np.ndarray, result: FlatteningResult) -> float:
    """Recompute the flattening residual by direct conjugation.

    Independent of the incremental updates inside :func:`uflatgen`: pads M,
    forms U M_pad U* with two dense products and returns the max deviation
    of its diagonal from tr(M) / d_pad.
    """
    m = _as_complex_array(m, "matrix")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"verify_flat expects a square matrix, got {m.shape}")
    if m.shape[0] != result.original_dim:
        raise DimensionMismatchError(
            f"matrix of dimension {m.shape[0]} does not match result for {result.original_dim}"
        )
    n = result.padded_dim
    padded = np.zeros((n, n), dtype=np.complex128)
    padded[: m.shape[0], : m.shape[0]] = m
    u = result.unitary
    transformed = u @ padded @ u.conj().T
    target = np.trace(m) / n
    return float(np.max(np.abs(np.diagonal(transformed) - target)))
