"""Electromagnetic sector: two counter-propagating chiral fields.

A mode pair (psi, phi) at wave-vector k/2 evolves under W and W* each step.
The bilinear 3-vector G^i = phi^T sigma^i psi, projected transverse to the
helicity axis n_{k/2}, precesses rigidly about that axis at angular rate
2 |n_{k/2}|:

    G_T(t) = exp([2 n t]_x) G_T(0),   d/dt G_T = 2 n_{k/2} x G_T.

With E = |n|(G_T + conj G_T) and B = i |n| (conj G_T - G_T) the transverse
fields obey the same rotation equations, the wave-vector Maxwell form with
2 n_{k/2} playing the wave-vector; in the small-|k| limit 2 n_{k/2}
approaches the linearized helicity flow of the chosen variant.

All dynamics here is c-number (single-particle amplitudes); the operator
content enters only through the exact few-mode oracle in the fock module.
"""

from dataclasses import dataclass

import numpy as np

from . import weyl
from .evolution import FieldState
from .pauli import (
    PAULI,
    maxabs,
    rotation_about,
    su2_exp,
)

_DEFAULT_VARIANT = weyl.WeylVariant(3, kind="A", sign=1)


@dataclass(frozen=True)
class TwoFieldState:
    """Lattice pair: psi stepped by W, phi stepped by the conjugate W*."""

    psi: FieldState
    phi: FieldState

    def __post_init__(self):
        if self.psi.lattice != self.phi.lattice:
            raise ValueError("the two fields must share one lattice")
        if self.psi.internal_dim != 2 or self.phi.internal_dim != 2:
            raise ValueError("both fields must carry two components")


def bilinear_G(psi_amp, phi_amp):
    """G^i = phi^T sigma^i psi for two spinor amplitudes."""
    psi = np.asarray(psi_amp, dtype=complex)
    phi = np.asarray(phi_amp, dtype=complex)
    return np.einsum("a,iab,b->i", phi, PAULI, psi)


def helicity_half(k, variant=_DEFAULT_VARIANT):
    """Rotation axis n_{k/2} of the chosen chiral variant."""
    k = np.asarray(k, dtype=float)
    return weyl.helicity_vector(variant, k / 2.0)


def transverse_project(g_vec, k, variant=_DEFAULT_VARIANT):
    """Component of G orthogonal to n_{k/2}; raises at k = 0."""
    n = helicity_half(k, variant)
    norm = float(np.linalg.norm(n))
    if norm < 1e-12:
        raise ValueError("helicity direction undefined at k = 0")
    unit = n / norm
    g_vec = np.asarray(g_vec, dtype=complex)
    return g_vec - (unit @ g_vec) * unit


def evolve_pair(psi_amp, phi_amp, n, t):
    """Continuous-time interpolation: psi by exp(-i sigma.n t), phi conjugate."""
    u = su2_exp(np.asarray(n, dtype=float) * t)
    psi_t = u @ np.asarray(psi_amp, dtype=complex)
    phi_t = np.conj(u @ np.conj(np.asarray(phi_amp, dtype=complex)))
    return psi_t, phi_t


def transverse_bilinear(psi_amp, phi_amp, k, t, variant=_DEFAULT_VARIANT):
    """G_T(k, t) recomputed from the evolved spinors."""
    n = helicity_half(k, variant)
    psi_t, phi_t = evolve_pair(psi_amp, phi_amp, n, t)
    return transverse_project(bilinear_G(psi_t, phi_t), k, variant)


def precession_vector(k, variant=_DEFAULT_VARIANT):
    """Angular-velocity vector of G_T: Omega = 2 n_{k/2}."""
    return 2.0 * helicity_half(k, variant)


def rotation_form(psi_amp, phi_amp, k, t, variant=_DEFAULT_VARIANT):
    """G_T(k, t) predicted by rigid rotation of G_T(k, 0)."""
    g0 = transverse_bilinear(psi_amp, phi_amp, k, 0.0, variant)
    return rotation_about(precession_vector(k, variant) * t) @ g0


def electric_magnetic(g_t, k, variant=_DEFAULT_VARIANT):
    """E = |n|(G_T + conj G_T), B = i |n| (conj G_T - G_T)."""
    scale = float(np.linalg.norm(helicity_half(k, variant)))
    e_field = scale * (g_t + np.conj(g_t))
    b_field = 1j * scale * (np.conj(g_t) - g_t)
    return e_field, b_field


@dataclass(frozen=True)
class MaxwellReport:
    """Residuals of the transverse-field dynamics at one wave-vector."""

    rotation_vs_spinor: float
    finite_difference: float
    transversality_e: float
    transversality_b: float
    dynamics_e: float
    dynamics_b: float

    @property
    def max_residual(self):
        return max(
            self.rotation_vs_spinor,
            self.finite_difference,
            self.transversality_e,
            self.transversality_b,
            self.dynamics_e,
            self.dynamics_b,
        )

    def as_dict(self):
        return {
            "rotation_vs_spinor": self.rotation_vs_spinor,
            "finite_difference": self.finite_difference,
            "transversality_E": self.transversality_e,
            "transversality_B": self.transversality_b,
            "dynamics_E": self.dynamics_e,
            "dynamics_B": self.dynamics_b,
            "max_residual": self.max_residual,
        }


def mode_maxwell_residual(psi_amp, phi_amp, k, dt, times=(0.0, 1.0, 2.5),
                          t_max=10.0, variant=_DEFAULT_VARIANT):
    """Dynamics residuals for one mode pair.

    Central differences with step dt probe d/dt G_T = Omega x G_T and the
    four transverse-field equations; the rigid-rotation form is compared
    against spinor recomputation on a grid up to t_max.
    """
    k = np.asarray(k, dtype=float)
    omega_vec = precession_vector(k, variant)

    def g_t(t):
        return transverse_bilinear(psi_amp, phi_amp, k, t, variant)

    rot_res = 0.0
    for t in np.linspace(0.0, t_max, 9):
        rot_res = max(rot_res, maxabs(rotation_form(psi_amp, phi_amp, k, t, variant) - g_t(t)))

    fd_res = he_res = hb_res = de_res = db_res = 0.0
    n = helicity_half(k, variant)
    for t in times:
        plus, mid, minus = g_t(t + dt), g_t(t), g_t(t - dt)
        deriv = (plus - minus) / (2.0 * dt)
        fd_res = max(fd_res, maxabs(deriv - np.cross(omega_vec, mid)))
        e_mid, b_mid = electric_magnetic(mid, k, variant)
        e_deriv = (np.stack(electric_magnetic(plus, k, variant))
                   - np.stack(electric_magnetic(minus, k, variant))) / (2.0 * dt)
        he_res = max(he_res, maxabs(2.0 * n @ e_mid))
        hb_res = max(hb_res, maxabs(2.0 * n @ b_mid))
        de_res = max(de_res, maxabs(e_deriv[0] - np.cross(omega_vec, e_mid)))
        db_res = max(db_res, maxabs(e_deriv[1] - np.cross(omega_vec, b_mid)))

    return MaxwellReport(
        rotation_vs_spinor=rot_res,
        finite_difference=fd_res,
        transversality_e=he_res,
        transversality_b=hb_res,
        dynamics_e=de_res,
        dynamics_b=db_res,
    )


def maxwell_residual(state, k, dt, variant=_DEFAULT_VARIANT, **kwargs):
    """Residual report for the lattice mode of a TwoFieldState nearest k/2.

    k/2 must land on the state's wave-vector grid (within 1e-9 in group
    coordinates); otherwise use mode_maxwell_residual with explicit spinors.
    """
    pres = state.psi.lattice.presentation
    sizes = state.psi.lattice.sizes
    theta_half = pres.theta_of(np.asarray(k, dtype=float) / 2.0)
    idx = []
    for j, n_j in enumerate(sizes):
        pos = theta_half[j] * n_j / (2.0 * np.pi)
        nearest = int(np.rint(pos)) % n_j
        if abs(pos - np.rint(pos)) > 1e-9:
            raise ValueError("k/2 does not lie on the lattice wave-vector grid")
        idx.append(nearest)
    axes = tuple(range(len(sizes)))
    psi_hat = np.fft.fftn(state.psi.amplitudes, axes=axes)[tuple(idx)]
    phi_hat = np.fft.fftn(state.phi.amplitudes, axes=axes)[tuple(idx)]
    return mode_maxwell_residual(psi_hat, phi_hat, k, dt, variant=variant, **kwargs)


def angular_momentum_identity_residual(v):
    """Deviation of exp(-i v.sigma/2) sigma exp(i v.sigma/2) from the rotation
    Exp(-i v.J) applied to the Pauli vector.

    J is the spin-1 triplet (J_l)_{jk} = +i eps_{ljk}, the convention under
    which the identity is exact: Exp(-i v.J) = exp([-v]_x).
    """
    v = np.asarray(v, dtype=float)
    u = su2_exp(v / 2.0)
    udag = u.conj().T
    rot = rotation_about(-v)
    worst = 0.0
    for i in range(3):
        lhs = u @ PAULI[i] @ udag
        rhs = sum(rot[i, j] * PAULI[j] for j in range(3))
        worst = max(worst, maxabs(lhs - rhs))
    return worst


def precession_deviation(k, variant=_DEFAULT_VARIANT):
    """|2 n_{k/2} - L k| with L the variant's linearized helicity map.

    Vanishes as O(|k|^2); the growth of this deviation toward the zone scale
    is the distortion of the wave-vector substitution at large k.
    """
    k = np.asarray(k, dtype=float)
    _, jac = weyl._linearization(variant)
    return float(np.linalg.norm(2.0 * helicity_half(k, variant) - jac @ k))


def polarization_basis(k, variant=_DEFAULT_VARIANT):
    """Right-handed orthonormal pair transverse to the helicity axis n_k.

    Deterministic gauge: u1 = normalize(a x n) with a = z-hat, falling back
    to a = y-hat when n is within 1e-6 of the z axis; u2 = n-hat x u1.
    """
    k = np.asarray(k, dtype=float)
    n = weyl.helicity_vector(variant, k)
    norm = float(np.linalg.norm(n))
    if norm < 1e-12:
        raise ValueError("polarization undefined at k = 0")
    n_hat = n / norm
    axis = np.array([0.0, 0.0, 1.0])
    if np.linalg.norm(np.cross(n_hat, axis)) < 1e-6:
        axis = np.array([0.0, 1.0, 0.0])
    u1 = np.cross(axis, n_hat)
    u1 = u1 / np.linalg.norm(u1)
    u2 = np.cross(n_hat, u1)
    return u1, u2
