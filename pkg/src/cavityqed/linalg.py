"""Dense linear-algebra kernels for small quantum systems.

Everything here works on plain numpy arrays.  Matrices are kept tiny
(system dimension <= 8, superoperators <= 64), so the routines favour
robustness and determinism over asymptotic speed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray | None


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with the first factor on the slow index."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"kron expects a square first factor, got shape {a.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"kron expects a square second factor, got shape {b.shape}")
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Trace out one factor of a bipartite density matrix.

    Parameters
    ----------
    rho : ndarray
        Square matrix on the product space, first factor slow.
    dims : (dA, dB)
        Dimensions of the two factors.
    keep : "A" or "B"
        Which factor survives.
    """
    rho = np.asarray(rho)
    da, db = dims
    if da < 1 or db < 1:
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    if rho.ndim != 2 or rho.shape != (da * db, da * db):
        raise ValueError(f"state shape {rho.shape} does not match factors {dims}")
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")
    r = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest elementwise deviation from m = m^dagger."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def _offdiag_mass(a: np.ndarray) -> np.ndarray:
    off = np.abs(a) ** 2
    idx = np.arange(a.shape[-1])
    off[..., idx, idx] = 0.0
    return np.sqrt(np.sum(off, axis=(-2, -1)))


def _rotate(a: np.ndarray, v: np.ndarray | None, p: int, q: int, floor: np.ndarray) -> None:
    """One cyclic-Jacobi rotation zeroing the (p, q) entry, batched."""
    apq = a[..., p, q].copy()
    mag = np.abs(apq)
    # pivots below the floor stay put; their total mass sits under the sweep tolerance
    active = mag > floor
    if not np.any(active):
        return
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe, 1.0 + 0.0j)
    tau = np.where(active, (a[..., q, q].real - a[..., p, p].real) / (2.0 * safe), 0.0)
    big = np.abs(tau) > 1e8
    tau_c = np.where(big, 0.0, tau)
    sg = np.where(tau >= 0.0, 1.0, -1.0)
    t = sg / (np.abs(tau_c) + np.sqrt(1.0 + tau_c * tau_c))
    # asymptotic branch keeps tau*tau from overflowing
    t = np.where(big, 0.5 / np.where(big, tau, 1.0), t)
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    c_ = c[..., None]
    s_ = s[..., None]
    ph = phase[..., None]
    cph = np.conj(ph)

    colp = a[..., :, p].copy()
    colq = a[..., :, q].copy()
    a[..., :, p] = c_ * colp - s_ * cph * colq
    a[..., :, q] = s_ * colp + c_ * cph * colq
    rowp = a[..., p, :].copy()
    rowq = a[..., q, :].copy()
    a[..., p, :] = c_ * rowp - s_ * ph * rowq
    a[..., q, :] = s_ * rowp + c_ * ph * rowq
    # the pivot is zero by construction; write it out exactly
    a[..., p, q] = 0.0
    a[..., q, p] = 0.0

    if v is not None:
        vp = v[..., :, p].copy()
        vq = v[..., :, q].copy()
        v[..., :, p] = c_ * vp - s_ * cph * vq
        v[..., :, q] = s_ * vp + c_ * cph * vq


def jacobi_eigh(
    a: np.ndarray,
    *,
    vectors: bool = True,
    tol: float = 1e-14,
    max_sweeps: int = 64,
) -> EigenDecomposition:
    """Diagonalize Hermitian matrices by cyclic Jacobi rotations.

    Accepts stacks: leading axes are batch dimensions.  Sweeps run until
    the off-diagonal Frobenius mass of every matrix in the stack falls
    below ``tol`` relative to its overall scale.  Eigenvalues come back
    ascending; eigenvector k is column ``vectors[..., :, k]``.
    """
    work = np.array(a, dtype=np.complex128)
    if work.ndim < 2 or work.shape[-1] != work.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {work.shape}")
    n = work.shape[-1]
    # absolute 1e-14 is unreachable once ||a|| ~ 1e9, so threshold scales with the matrix
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(work) ** 2, axis=(-2, -1))))
    v = None
    if vectors:
        v = np.zeros_like(work)
        v[...] = np.eye(n)
    floor = tol * scale / (10.0 * n * n)
    for _ in range(max_sweeps):
        if np.all(_offdiag_mass(work) <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(work, v, p, q, floor)
    else:
        raise np.linalg.LinAlgError(
            f"Jacobi sweep limit {max_sweeps} reached before convergence"
        )
    w = np.einsum("...ii->...i", work).real.copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if v is not None:
        v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return EigenDecomposition(w, v)


def eigh(h: np.ndarray, *, tol: float = 1e-10) -> EigenDecomposition:
    """Eigendecomposition of a single Hermitian matrix.

    Rejects inputs whose hermiticity defect exceeds ``tol``, reporting
    the measured violation.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise ValueError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.1e}"
        )
    return jacobi_eigh(h, vectors=True)


def eigvalsh2_stack(a: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of stacked Hermitian 2x2 matrices, ascending."""
    a = np.asarray(a)
    half_tr = 0.5 * (a[..., 0, 0].real + a[..., 1, 1].real)
    half_gap = 0.5 * (a[..., 0, 0].real - a[..., 1, 1].real)
    r = np.sqrt(half_gap * half_gap + np.abs(a[..., 0, 1]) ** 2)
    return np.stack([half_tr - r, half_tr + r], axis=-1)


def _largest_cubic_root(a2: np.ndarray, a1: np.ndarray, a0: np.ndarray) -> np.ndarray:
    # largest real root of z^3 + a2 z^2 + a1 z + a0, all roots known real
    p = a1 - a2 * a2 / 3.0
    qc = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    p = np.minimum(p, 0.0)
    m = 2.0 * np.sqrt(-p / 3.0)
    safe_pm = np.where(m > 0.0, p * m, 1.0)
    arg = np.clip(np.where(m > 0.0, 3.0 * qc / safe_pm, 0.0), -1.0, 1.0)
    y = m * np.cos(np.arccos(arg) / 3.0)
    return y - a2 / 3.0


def eigvalsh4_stack(a: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of stacked Hermitian 4x4 matrices, ascending.

    Characteristic-polynomial route (resolvent cubic plus two quadratics),
    fully vectorized over the stack.  Accuracy is ample for entropy-style
    functions of the spectrum; use :func:`jacobi_eigh` when eigenvectors
    or last-digit eigenvalue accuracy are needed.
    """
    a = np.asarray(a, dtype=np.complex128)
    q = np.einsum("...ii->...", a).real / 4.0
    m = a - q[..., None, None] * np.eye(4)
    f = 0.5 * np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))
    degenerate = f <= 1e-150
    fs = np.where(degenerate, 1.0, f)
    b = m / fs[..., None, None]
    b2 = b @ b
    p2 = np.sum(np.abs(b) ** 2, axis=(-2, -1))
    p3 = np.einsum("...ij,...ji->...", b2, b).real
    p4 = np.sum(np.abs(b2) ** 2, axis=(-2, -1))
    big_p = -0.5 * p2
    big_q = -p3 / 3.0
    big_r = p2 * p2 / 8.0 - p4 / 4.0

    z = _largest_cubic_root(2.0 * big_p, big_p * big_p - 4.0 * big_r, -big_q * big_q)
    z = np.maximum(z, 0.0)
    alpha = np.sqrt(z)
    split = alpha > 1e-8
    safe_alpha = np.where(split, alpha, 1.0)
    beta = 0.5 * (big_p + z - big_q / safe_alpha)
    gamma = 0.5 * (big_p + z + big_q / safe_alpha)
    d1 = np.sqrt(np.maximum(alpha * alpha - 4.0 * beta, 0.0))
    d2 = np.sqrt(np.maximum(alpha * alpha - 4.0 * gamma, 0.0))
    roots_split = np.stack(
        [
            0.5 * (-alpha - d1),
            0.5 * (-alpha + d1),
            0.5 * (alpha - d2),
            0.5 * (alpha + d2),
        ],
        axis=-1,
    )
    # alpha ~ 0 means the quartic is biquadratic
    s1 = np.sqrt(np.maximum(0.5 * (-big_p + np.sqrt(np.maximum(big_p**2 - 4.0 * big_r, 0.0))), 0.0))
    s2 = np.sqrt(np.maximum(0.5 * (-big_p - np.sqrt(np.maximum(big_p**2 - 4.0 * big_r, 0.0))), 0.0))
    roots_biquad = np.stack([-s1, -s2, s2, s1], axis=-1)
    mu = np.where(split[..., None], roots_split, roots_biquad)
    lam = q[..., None] + np.where(degenerate[..., None], 0.0, fs[..., None] * mu)
    return np.sort(lam, axis=-1)


def eigvalsh_stack(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of stacked Hermitian matrices, ascending along the last axis."""
    a = np.asarray(a)
    n = a.shape[-1]
    if n == 1:
        return a[..., 0, 0].real[..., None].copy()
    if n == 2:
        return eigvalsh2_stack(a)
    if n == 4:
        return eigvalsh4_stack(a)
    return jacobi_eigh(a, vectors=False).values


def unitary_from_hamiltonian(h: np.ndarray, dt: float, hbar: float = 1.0) -> np.ndarray:
    """Propagator exp(-i h dt / hbar) built from the eigendecomposition."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if hbar <= 0.0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    w, v = eigh(h)
    phases = np.exp(-1j * w * dt / hbar)
    return (v * phases) @ v.conj().T


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a Taylor kernel."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    squarings = 0 if norm <= 0.5 else int(np.ceil(np.log2(norm / 0.5)))
    m = a / (2.0**squarings)
    total = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, 64):
        term = term @ m / k
        total = total + term
        if np.linalg.norm(term, 1) <= 1e-17 * max(1.0, np.linalg.norm(total, 1)):
            break
    else:
        raise np.linalg.LinAlgError("Taylor series for expm failed to converge")
    for _ in range(squarings):
        total = total @ total
    return total
