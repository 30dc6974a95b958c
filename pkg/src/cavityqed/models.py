"""Builders for the two cavity models and their parameter records.

Both systems live on tensor products of two-level factors with the
photon factor on the slow index.  Hamiltonians carry their hbar factors
already, so downstream code never rescales them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import kron

LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
RAISE = LOWER.conj().T
NUMBER = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
IDENT = np.eye(2, dtype=complex)
FLIP = LOWER + RAISE

RWA_THRESHOLD = 0.1


class RwaWarning(UserWarning):
    """Coupling too large for the rotating-wave form of the interaction."""


@dataclass(frozen=True)
class JcmParams:
    """Single-mode cavity coupled to one two-level emitter.

    Defaults reproduce the reference operating point: hbar = 1,
    cavity and emitter degenerate at omega = 1e8, coupling g = 1e6.
    """

    hbar: float = 1.0
    omega: float = 1e8
    g: float = 1e6
    gamma: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.hbar <= 0.0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.g < 0.0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if not 0.0 <= self.alpha <= np.pi / 4.0 + 1e-12:
            raise ValueError(f"alpha must lie in [0, pi/4], got {self.alpha}")


# Photon loss rate for the molecular model.  Roughly g_a1 / 30: slow
# enough that the early photon-electron swaps stay nearly coherent
# (transient discord above 0.9), fast enough to empty the cavity well
# inside a 0.15 ms horizon.
OHPLUS_GAMMA_DEFAULT = 7e4


@dataclass(frozen=True)
class OhPlusParams:
    """Cavity photon, molecular electron, and one bond coordinate.

    The bond coordinate is two-valued (near / stretched).  Couplings are
    conditional: the bond flip strength depends on the electronic state
    (g_b0 ground, g_b1 excited) and the photon exchange strength depends
    on the bond state (g_a0 near, g_a1 stretched).

    ``phonon_on_near`` picks which bond configuration carries the
    vibrational quantum omega_b: True (default) puts it on the near
    configuration, False on the stretched one.  The flip coupling is
    unaffected; only the diagonal energy moves.
    """

    hbar: float = 1.0
    omega: float = 1e9
    omega_b: float = 1e8
    g_b0: float = 1e4
    g_b1: float = 1e6
    g_a0: float = 2e8
    g_a1: float = 2e6
    gamma: float = OHPLUS_GAMMA_DEFAULT
    phonon_on_near: bool = True

    def __post_init__(self):
        if self.hbar <= 0.0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.omega <= 0.0 or self.omega_b <= 0.0:
            raise ValueError("frequencies must be positive")
        for name in ("g_b0", "g_b1", "g_a0", "g_a1"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")


@dataclass(frozen=True)
class ModelSystem:
    """Assembled system: Hamiltonian, photon-loss jump, bookkeeping."""

    name: str
    hamiltonian: np.ndarray
    jumps: tuple[tuple[np.ndarray, float], ...]
    split: tuple[int, int]
    basis_labels: tuple[str, ...]
    g_max: float
    hbar: float

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def index_to_label(index: int, factors: int) -> str:
    """Basis label for a product-basis index, one binary digit per factor."""
    if not 0 <= index < 2**factors:
        raise ValueError(f"index {index} out of range for {factors} two-level factors")
    return format(index, f"0{factors}b")


def label_to_index(label: str) -> int:
    """Inverse of :func:`index_to_label`."""
    if not label or any(c not in "01" for c in label):
        raise ValueError(f"label must be a string of 0/1 digits, got {label!r}")
    return int(label, 2)


def build_jcm(params: JcmParams) -> ModelSystem:
    """Cavity + emitter with excitation-swap coupling and photon loss."""
    p = params
    h = p.hbar * p.omega * (kron(NUMBER, IDENT) + kron(IDENT, NUMBER))
    h = h + p.g * (kron(RAISE, LOWER) + kron(LOWER, RAISE))
    jump = kron(LOWER, IDENT)
    return ModelSystem(
        name="jcm",
        hamiltonian=_freeze(h),
        jumps=((_freeze(jump), p.gamma),),
        split=(2, 2),
        basis_labels=tuple(index_to_label(i, 2) for i in range(4)),
        g_max=p.g,
        hbar=p.hbar,
    )


def _kron3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return kron(a, kron(b, c))


def build_ohplus(params: OhPlusParams) -> ModelSystem:
    """Photon, electron and bond coordinate with state-conditional couplings."""
    p = params
    proj = (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex))
    bond_occupied = proj[0] if p.phonon_on_near else proj[1]

    h = p.hbar * p.omega * _kron3(NUMBER, IDENT, IDENT)
    h = h + p.hbar * p.omega * _kron3(IDENT, NUMBER, IDENT)
    h = h + p.hbar * p.omega_b * _kron3(IDENT, IDENT, bond_occupied)
    for electron_state, strength in ((0, p.g_b0), (1, p.g_b1)):
        h = h + strength * _kron3(IDENT, proj[electron_state], FLIP)
    for bond_state, strength in ((0, p.g_a0), (1, p.g_a1)):
        swap = _kron3(RAISE, LOWER, proj[bond_state]) + _kron3(LOWER, RAISE, proj[bond_state])
        h = h + strength * swap

    jump = kron(LOWER, np.eye(4, dtype=complex))
    return ModelSystem(
        name="ohplus",
        hamiltonian=_freeze(h),
        jumps=((_freeze(jump), p.gamma),),
        split=(2, 4),
        basis_labels=tuple(index_to_label(i, 3) for i in range(8)),
        g_max=max(p.g_b0, p.g_b1, p.g_a0, p.g_a1),
        hbar=p.hbar,
    )


def initial_state_jcm(alpha: float) -> np.ndarray:
    """Density matrix of cos(alpha)|01> + sin(alpha)|10>."""
    if not 0.0 <= alpha <= np.pi / 4.0 + 1e-12:
        raise ValueError(f"alpha must lie in [0, pi/4], got {alpha}")
    psi = np.zeros(4, dtype=complex)
    psi[1] = np.cos(alpha)
    psi[2] = np.sin(alpha)
    return np.outer(psi, psi.conj())


def initial_state_ohplus() -> np.ndarray:
    """Density matrix of the photon-loaded ground-electron stretched-bond state |101>."""
    rho = np.zeros((8, 8), dtype=complex)
    rho[5, 5] = 1.0
    return rho


@dataclass(frozen=True)
class RwaReport:
    """Coupling-to-frequency ratios with the ratios that breach the threshold."""

    ratios: tuple[tuple[str, float], ...]
    threshold: float = RWA_THRESHOLD

    @property
    def violations(self) -> tuple[tuple[str, float], ...]:
        return tuple((n, r) for n, r in self.ratios if r > self.threshold)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_rwa(params: JcmParams | OhPlusParams) -> RwaReport:
    """Flag coupling/frequency ratios too large for the excitation-swap form.

    Ratios above 0.1 raise :class:`RwaWarning` (non-fatal); the report is
    returned either way so callers can log it.
    """
    if isinstance(params, JcmParams):
        ratios = (("g/(hbar*omega)", params.g / (params.hbar * params.omega)),)
    elif isinstance(params, OhPlusParams):
        ratios = (
            ("g_a0/(hbar*omega)", params.g_a0 / (params.hbar * params.omega)),
            ("g_a1/(hbar*omega)", params.g_a1 / (params.hbar * params.omega)),
            ("g_b0/(hbar*omega_b)", params.g_b0 / (params.hbar * params.omega_b)),
            ("g_b1/(hbar*omega_b)", params.g_b1 / (params.hbar * params.omega_b)),
        )
    else:
        raise TypeError(f"unsupported parameter record {type(params).__name__}")
    report = RwaReport(ratios)
    for name, ratio in report.violations:
        warnings.warn(
            f"coupling ratio {name} = {ratio:.3g} exceeds {RWA_THRESHOLD}; "
            "the excitation-swap interaction is only approximate here",
            RwaWarning,
            stacklevel=2,
        )
    return report
