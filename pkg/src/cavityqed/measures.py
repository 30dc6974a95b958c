"""Entropy, entanglement and correlation measures for bipartite states.

All quantities are expressed in bits.  The classical-correlation
optimization scans a deterministic dense grid of projective measurement
bases and polishes the best point by coordinate descent, so repeated runs
give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import eigvalsh_stack, hermiticity_defect, jacobi_eigh, partial_trace

PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)

# Spectral weights at or below this threshold contribute nothing to an
# entropy sum (the p log p -> 0 limit).
WEIGHT_FLOOR = 1e-12
# Eigenvalues in [clamp_floor, 0) are treated as 0; anything lower means the
# state itself is corrupted and computation must stop.  Callers working on
# integrator snapshots pass a wider floor matching the documented
# first-order splitting error.
DEFAULT_CLAMP_FLOOR = -1e-10

GRID_THETA = 65
GRID_PHI = 129
REFINE_TOL = 1e-9
REFINE_MAX_ROUNDS = 50


def _grid_points():
    thetas = np.linspace(0.0, np.pi / 2, GRID_THETA)
    phis = np.linspace(0.0, 2.0 * np.pi, GRID_PHI)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    # index of the partner point (pi/2 - theta, phi + pi mod 2pi), whose
    # first-outcome projector is this point's second-outcome projector
    i, j = np.meshgrid(np.arange(GRID_THETA), np.arange(GRID_PHI), indexing="ij")
    pj = np.where(j == GRID_PHI - 1, (GRID_PHI - 1) // 2, (j + (GRID_PHI - 1) // 2) % (GRID_PHI - 1))
    partner = ((GRID_THETA - 1 - i) * GRID_PHI + pj).ravel()
    return tt.ravel(), pp.ravel(), partner


_GRID_TT, _GRID_PP, _GRID_PARTNER = _grid_points()

DISCORD_NOISE_FLOOR = 1e-7


def _validate_state(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {rho.shape}")
    if hermiticity_defect(rho) > 1e-8:
        raise ValueError(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-6:
        raise ValueError(f"{name} has trace {np.trace(rho).real:.9f}, expected 1")
    return rho


def _checked_spectrum(values: np.ndarray, clamp_floor: float) -> np.ndarray:
    low = float(values.min())
    if low < clamp_floor:
        raise ValueError(
            f"eigenvalue {low:.3e} below clamp floor {clamp_floor:.0e}: state corrupted"
        )
    return np.clip(values, 0.0, None)


def _entropy_from_spectrum(values: np.ndarray) -> float:
    lam = values[values > WEIGHT_FLOOR]
    if lam.size == 0:
        return 0.0
    return float(-np.sum(lam * np.log2(lam))) + 0.0


def von_neumann_entropy(rho: np.ndarray, clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> float:
    """S = -Tr rho log2 rho, with weights <= 1e-12 contributing zero."""
    rho = _validate_state(rho)
    values, _ = jacobi_eigh(rho, vectors=False)
    return _entropy_from_spectrum(_checked_spectrum(values, clamp_floor))


def concurrence(rho: np.ndarray, clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> float:
    """Two-qubit mixed-state entanglement from the spin-flipped product.

    The spectrum of rho * (sy(x)sy) rho^* (sy(x)sy) is obtained through the
    Hermitian similar form sqrt(rho) rho_flip sqrt(rho), which keeps small
    eigenvalues accurate enough to survive the square root.
    """
    rho = _validate_state(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"concurrence needs a 4x4 two-qubit state, got {rho.shape}")
    values, vectors = jacobi_eigh(rho)
    values = _checked_spectrum(values, clamp_floor)
    root = (vectors * np.sqrt(values)) @ vectors.conj().T
    flipped = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    product = root @ flipped @ root
    spectrum, _ = jacobi_eigh(product, vectors=False)
    spectrum = _checked_spectrum(spectrum, clamp_floor)
    # entries at the eigensolver noise floor are numerically zero; the square
    # root would otherwise amplify that noise by eight orders of magnitude
    spectrum[spectrum < 1e-14 * spectrum.max()] = 0.0
    lam = np.sqrt(spectrum[::-1])
    return float(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0))


@dataclass(frozen=True)
class MeasurementBasis:
    """One-parameter family of qubit projective measurements."""

    theta: float
    phi: float
    projectors: tuple[np.ndarray, np.ndarray]


def projective_basis(theta: float, phi: float) -> MeasurementBasis:
    """Projectors onto cos t|0> + sin t e^{i p}|1> and its orthogonal partner."""
    if not 0.0 <= theta <= np.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    if not 0.0 <= phi <= 2.0 * np.pi + 1e-12:
        raise ValueError(f"phi must lie in [0, 2*pi], got {phi}")
    b0 = np.array([np.cos(theta), np.sin(theta) * np.exp(1j * phi)])
    b1 = np.array([np.sin(theta) * np.exp(-1j * phi), -np.cos(theta)])
    p0 = np.outer(b0, b0.conj())
    p1 = np.outer(b1, b1.conj())
    p0.flags.writeable = False
    p1.flags.writeable = False
    return MeasurementBasis(theta=float(theta), phi=float(phi), projectors=(p0, p1))


def _split_dims(rho: np.ndarray, split: tuple[int, int]) -> tuple[int, int]:
    da, db = split
    if da * db != rho.shape[0]:
        raise ValueError(f"split {split} does not factor dimension {rho.shape[0]}")
    return da, db


def _measured_dim(split: tuple[int, int], measured: str) -> int:
    if measured not in ("A", "B"):
        raise ValueError(f"measured side must be 'A' or 'B', got {measured!r}")
    return split[0] if measured == "A" else split[1]


def conditional_ensemble(
    rho: np.ndarray,
    basis: MeasurementBasis,
    split: tuple[int, int] = (2, 2),
    measured: str = "A",
):
    """Outcome probabilities and post-measurement states of the other side.

    Returns [(p_0, sigma_0), (p_1, sigma_1)] with sigma_k normalized;
    outcomes with p_k <= 1e-12 carry sigma_k = None.
    """
    rho = _validate_state(rho)
    da, db = _split_dims(rho, split)
    if _measured_dim(split, measured) != 2:
        raise ValueError(f"measured side {measured} must be 2-dimensional")
    reshaped = rho.reshape(da, db, da, db)
    out = []
    for proj in basis.projectors:
        if measured == "A":
            sigma = np.einsum("cb,bjcl->jl", proj, reshaped)
        else:
            sigma = np.einsum("dc,icjd->ij", proj, reshaped)
        p = float(np.trace(sigma).real)
        if p <= WEIGHT_FLOOR:
            out.append((max(p, 0.0), None))
        else:
            out.append((p, sigma / p))
    total = sum(p for p, _ in out)
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"outcome probabilities sum to {total:.12f}")
    return out


def mutual_information(rho: np.ndarray, split: tuple[int, int] = (2, 2),
                       clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> float:
    """Total correlation S(A) + S(B) - S(AB)."""
    rho = _validate_state(rho)
    _split_dims(rho, split)
    s_a = von_neumann_entropy(partial_trace(rho, split, keep="A"), clamp_floor)
    s_b = von_neumann_entropy(partial_trace(rho, split, keep="B"), clamp_floor)
    s_ab = von_neumann_entropy(rho, clamp_floor)
    return s_a + s_b - s_ab


def _outcome_projectors(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """First-outcome projectors Pi_0(theta, phi), shape (n, 2, 2)."""
    vecs = np.stack([np.cos(thetas) + 0j, np.sin(thetas) * np.exp(1j * phis)], axis=-1)
    return vecs[:, :, None] * vecs[:, None, :].conj()


def _half_objective(
    reshaped: np.ndarray,
    thetas: np.ndarray,
    phis: np.ndarray,
    measured: str,
    clamp_floor: float,
) -> np.ndarray:
    """First-outcome share of the conditional entropy, per basis.

    Works on the unnormalized conditional state: p S(sigma/p) equals
    -sum_i lam_i log2 lam_i + p log2 p over its raw spectrum lam.
    """
    projs = _outcome_projectors(thetas, phis)
    if measured == "A":
        sig = np.einsum("gcb,bjcl->gjl", projs, reshaped)
    else:
        sig = np.einsum("gdc,icjd->gij", projs, reshaped)
    lam = eigvalsh_stack(sig)
    low = float(lam.min())
    if low < clamp_floor:
        raise ValueError(
            f"conditional eigenvalue {low:.3e} below clamp floor: state corrupted"
        )
    lam = np.clip(lam, 0.0, None)
    terms = np.where(lam > WEIGHT_FLOOR, -lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
    p = lam.sum(axis=-1)
    p_terms = np.where(p > WEIGHT_FLOOR, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1) + p_terms


def _conditional_entropy_batch(
    reshaped: np.ndarray,
    thetas: np.ndarray,
    phis: np.ndarray,
    measured: str,
    clamp_floor: float,
) -> np.ndarray:
    """Measurement-conditioned entropy sum for each basis in the batch.

    The second outcome's projector equals the first outcome's at the
    partner point (pi/2 - theta, phi + pi), so both shares come from one
    first-outcome evaluation over a doubled batch.
    """
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    both_t = np.concatenate([thetas, np.pi / 2 - thetas])
    both_p = np.concatenate([phis, np.mod(phis + np.pi, 2.0 * np.pi)])
    halves = _half_objective(reshaped, both_t, both_p, measured, clamp_floor)
    n = thetas.size
    return halves[:n] + halves[n:]


def _refine_minimum(
    reshaped: np.ndarray,
    theta: float,
    phi: float,
    value: float,
    steps: tuple[float, float],
    measured: str,
    clamp_floor: float,
):
    """Zooming coordinate descent around the best grid point (monotone)."""
    offsets = np.linspace(-1.0, 1.0, 17)
    h_theta, h_phi = steps
    for _ in range(REFINE_MAX_ROUNDS):
        before = value
        cand = np.clip(theta + offsets * h_theta, 0.0, np.pi / 2)
        vals = _conditional_entropy_batch(
            reshaped, cand, np.full_like(cand, phi), measured, clamp_floor
        )
        j = int(np.argmin(vals))
        if vals[j] < value:
            value, theta = float(vals[j]), float(cand[j])
        cand = np.clip(phi + offsets * h_phi, 0.0, 2.0 * np.pi)
        vals = _conditional_entropy_batch(
            reshaped, np.full_like(cand, theta), cand, measured, clamp_floor
        )
        j = int(np.argmin(vals))
        if vals[j] < value:
            value, phi = float(vals[j]), float(cand[j])
        h_theta /= 4.0
        h_phi /= 4.0
        if before - value < REFINE_TOL:
            break
    return value, theta, phi


def classical_correlation(
    rho: np.ndarray,
    split: tuple[int, int] = (2, 2),
    measured: str = "A",
    clamp_floor: float = DEFAULT_CLAMP_FLOOR,
):
    """Maximum information about the unmeasured side from a projective
    measurement of the measured side.

    Returns (bits, (theta, phi)) with the minimizing basis parameters.
    """
    rho = _validate_state(rho)
    da, db = _split_dims(rho, split)
    if _measured_dim(split, measured) != 2:
        raise ValueError(f"measured side {measured} must be 2-dimensional")
    other = "B" if measured == "A" else "A"
    s_other = von_neumann_entropy(partial_trace(rho, split, keep=other), clamp_floor)

    reshaped = rho.reshape(da, db, da, db)
    halves = _half_objective(reshaped, _GRID_TT, _GRID_PP, measured, clamp_floor)
    values = halves + halves[_GRID_PARTNER]
    best = int(np.argmin(values))
    value, theta, phi = float(values[best]), float(_GRID_TT[best]), float(_GRID_PP[best])
    steps = (np.pi / 2 / (GRID_THETA - 1), 2.0 * np.pi / (GRID_PHI - 1))
    value, theta, phi = _refine_minimum(
        reshaped, theta, phi, value, steps, measured, clamp_floor
    )
    return s_other - value, (theta, phi)


@dataclass(frozen=True)
class CorrelationReport:
    """All correlation quantities of one bipartite state, in bits."""

    s_a: float
    s_b: float
    s_ab: float
    concurrence: float | None
    mutual_info: float
    classical_corr: float
    discord: float
    argmax_basis: tuple[float, float]
    measured: str

    def validate(self, tol: float = DISCORD_NOISE_FLOOR) -> None:
        if abs(self.mutual_info - (self.s_a + self.s_b - self.s_ab)) > 1e-9:
            raise ValueError("mutual information breaks the entropy identity")
        if abs(self.discord - (self.mutual_info - self.classical_corr)) > 1e-9:
            raise ValueError("discord is not mutual_info - classical_corr")
        s_measured = self.s_a if self.measured == "A" else self.s_b
        margin = max(1e-6, tol)
        if not -tol <= self.discord <= s_measured + margin:
            raise ValueError(
                f"discord {self.discord:.3e} outside [0, S(measured)={s_measured:.6f}]"
            )


def discord(
    rho: np.ndarray,
    split: tuple[int, int] = (2, 2),
    measured: str = "A",
    clamp_floor: float = DEFAULT_CLAMP_FLOOR,
) -> CorrelationReport:
    """Quantum discord (total minus classical correlation) with full report."""
    rho = _validate_state(rho)
    da, db = _split_dims(rho, split)
    s_a = von_neumann_entropy(partial_trace(rho, split, keep="A"), clamp_floor)
    s_b = von_neumann_entropy(partial_trace(rho, split, keep="B"), clamp_floor)
    s_ab = von_neumann_entropy(rho, clamp_floor)
    info = s_a + s_b - s_ab
    classical, basis = classical_correlation(rho, split, measured, clamp_floor)
    d = info - classical
    # Eigenvalue defects admitted by clamp_floor propagate into the entropy
    # differences at a comparable scale, so the acceptable negative band for
    # the discord difference widens along with the clamp.
    noise = max(DISCORD_NOISE_FLOOR, abs(clamp_floor))
    if d < 0.0:
        if d < -noise:
            raise ValueError(f"discord {d:.3e} below noise tolerance {noise:.0e}")
        d = 0.0
        classical = info
    conc = concurrence(rho, clamp_floor) if (da, db) == (2, 2) else None
    report = CorrelationReport(
        s_a=s_a,
        s_b=s_b,
        s_ab=s_ab,
        concurrence=conc,
        mutual_info=info,
        classical_corr=classical,
        discord=d,
        argmax_basis=basis,
        measured=measured,
    )
    report.validate(noise)
    return report
