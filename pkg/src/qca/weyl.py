"""Closed-form chiral (s = 2) automata in one, two and three dimensions.

Every variant evaluates to an SU(2) step operator

    W(k) = u(k) I - i sigma . ntilde(k),   u^2 + |ntilde|^2 = 1,

with eigenphases +-arccos(u).  In three dimensions there are four variants
(two sign branches and their transposes) on the BCC graph; in two dimensions
an A/B pair on the square graph, extended by the exact one-parameter family
obtained by premultiplying with cos(theta) I + i sin(theta) sigma_x; in one
dimension the solution is unique and the dispersion is exactly linear.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BranchPointError
from .pauli import ID2, omega_over_sin, omega_over_sin_deriv, pauli_dot

_X_HAT = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class WeylVariant:
    """One member of the chiral automaton family.

    kind is "A" or "B" (B is the transpose of A at every k); sign selects
    the +- branch in three dimensions; theta parametrizes the residual
    unitary freedom of the two-dimensional family and must be 0 elsewhere.
    """

    dimension: int
    kind: str = "A"
    sign: int = 1
    theta: float = 0.0

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if self.kind not in ("A", "B"):
            raise ValueError("kind must be 'A' or 'B'")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.dimension != 2 and self.theta != 0.0:
            raise ValueError("theta is a two-dimensional parameter")
        if self.dimension == 1 and self.kind != "A":
            raise ValueError("the one-dimensional solution is unique")

    @property
    def name(self):
        if self.dimension == 1:
            return "weyl-1d"
        if self.dimension == 2:
            base = "weyl-2d" if self.kind == "A" else "weyl-2d-b"
            return base if self.theta == 0.0 else f"{base}(theta={self.theta})"
        tag = "plus" if self.sign > 0 else "minus"
        return f"bcc-{self.kind.lower()}-{tag}"

    @property
    def presentation_kind(self):
        return {1: "line", 2: "square_2d", 3: "bcc_3d"}[self.dimension]


@dataclass(frozen=True)
class DispersionSample:
    """Dispersion data at one wave-vector.

    omega holds the two eigenphase branches (+arccos u, -arccos u);
    group_velocity is the gradient of the positive branch; helicity is the
    rotation-axis vector n with |n| = omega and exp(-i sigma.n) = W(k).
    """

    k: tuple
    omega: tuple
    group_velocity: tuple
    helicity: tuple


def _base_closed_form(dimension, sign, k):
    """(u, ntilde, grad u, jacobian of ntilde) before theta/transpose."""
    k = np.asarray(k, dtype=float)
    if dimension == 1:
        c, s = np.cos(k[0]), np.sin(k[0])
        u = c
        ntilde = np.array([0.0, 0.0, s])
        grad_u = np.array([-s])
        jac = np.array([[0.0], [0.0], [c]])
        return u, ntilde, grad_u, jac
    if dimension == 2:
        r = 1.0 / np.sqrt(2.0)
        cx, cy = np.cos(k[0] * r), np.cos(k[1] * r)
        sx, sy = np.sin(k[0] * r), np.sin(k[1] * r)
        u = cx * cy
        ntilde = np.array([sx * cy, cx * sy, sx * sy])
        grad_u = r * np.array([-sx * cy, -cx * sy])
        jac = r * np.array(
            [
                [cx * cy, -sx * sy],
                [-sx * sy, cx * cy],
                [cx * sy, sx * cy],
            ]
        )
        return u, ntilde, grad_u, jac
    r = 1.0 / np.sqrt(3.0)
    cx, cy, cz = np.cos(k[0] * r), np.cos(k[1] * r), np.cos(k[2] * r)
    sx, sy, sz = np.sin(k[0] * r), np.sin(k[1] * r), np.sin(k[2] * r)
    g = float(sign)
    u = cx * cy * cz + g * sx * sy * sz
    ntilde = np.array(
        [
            sx * cy * cz - g * cx * sy * sz,
            -g * cx * sy * cz - sx * cy * sz,
            cx * cy * sz - g * sx * sy * cz,
        ]
    )
    grad_u = r * np.array(
        [
            -sx * cy * cz + g * cx * sy * sz,
            -cx * sy * cz + g * sx * cy * sz,
            -cx * cy * sz + g * sx * sy * cz,
        ]
    )
    jac = r * np.array(
        [
            [cx * cy * cz + g * sx * sy * sz, -sx * sy * cz - g * cx * cy * sz, -sx * cy * sz - g * cx * sy * cz],
            [g * sx * sy * cz - cx * cy * sz, -g * cx * cy * cz + sx * sy * sz, g * cx * sy * sz - sx * cy * cz],
            [-sx * cy * sz - g * cx * sy * cz, -cx * sy * sz - g * sx * cy * cz, cx * cy * cz + g * sx * sy * sz],
        ]
    )
    return u, ntilde, grad_u, jac


def closed_form(variant, k):
    """(u, ntilde, grad u, jac ntilde) including theta and transpose."""
    u, nt, gu, jac = _base_closed_form(variant.dimension, variant.sign, k)
    if variant.theta != 0.0:
        ct, st = np.cos(variant.theta), np.sin(variant.theta)
        u2 = ct * u + st * nt[0]
        nt2 = ct * nt - st * u * _X_HAT - st * np.cross(_X_HAT, nt)
        gu2 = ct * gu + st * jac[0, :]
        jac2 = ct * jac - st * np.outer(_X_HAT, gu)
        jac2 -= st * np.cross(_X_HAT, jac, axisa=0, axisb=0).T
        u, nt, gu, jac = u2, nt2, gu2, jac2
    if variant.kind == "B":
        flip = np.array([1.0, -1.0, 1.0])
        nt = nt * flip
        jac = jac * flip[:, None]
    return u, nt, gu, jac


def weyl_matrix(variant, k):
    """Step operator W(k) = u I - i sigma . ntilde."""
    u, nt, _, _ = closed_form(variant, k)
    return u * ID2 - 1j * pauli_dot(nt)


def _omega(u):
    return float(np.arccos(np.clip(u, -1.0, 1.0)))


def _group_velocity(variant, k, u, grad_u):
    sin_w = np.sqrt(max(1.0 - u * u, 0.0))
    if sin_w >= 1e-9:
        return -grad_u / sin_w
    # Band-touching point: fall back to symmetric differences, which return
    # the direction-averaged value at a cone tip.
    step = 1e-5
    k = np.asarray(k, dtype=float)
    grad = np.zeros_like(k)
    for j in range(k.size):
        offset = np.zeros_like(k)
        offset[j] = step
        up, _, _, _ = closed_form(variant, k + offset)
        um, _, _, _ = closed_form(variant, k - offset)
        grad[j] = (_omega(up) - _omega(um)) / (2.0 * step)
    return grad


def helicity_vector(variant, k):
    """Rotation-axis vector n = (omega / sin omega) ntilde; |n| = omega."""
    u, nt, _, _ = closed_form(variant, k)
    return omega_over_sin(_omega(u)) * nt


def dispersion(variant, k):
    """Eigenphase branches, group velocity and helicity at one wave-vector."""
    k = np.asarray(k, dtype=float)
    u, nt, gu, _ = closed_form(variant, k)
    w = _omega(u)
    velocity = _group_velocity(variant, k, u, gu)
    n = omega_over_sin(w) * nt
    return DispersionSample(
        k=tuple(float(v) for v in k),
        omega=(w, -w),
        group_velocity=tuple(float(v) for v in velocity),
        helicity=tuple(float(v) for v in n),
    )


def interpolating_hamiltonian(variant, k):
    """Hermitian H with exp(-i H) = W(k) exactly; eigenvalues +-omega."""
    u, nt, _, _ = closed_form(variant, k)
    w = _omega(u)
    if abs(w - np.pi) < 1e-6:
        raise BranchPointError(f"eigenphase {w} at the logarithm branch point")
    return pauli_dot(omega_over_sin(w) * nt)


@lru_cache(maxsize=None)
def _linearization(variant):
    """Constant term and Jacobian of the helicity vector n(k) at k = 0."""
    d = variant.dimension
    zero = np.zeros(d)
    u0, nt0, gu0, jac0 = closed_form(variant, zero)
    w0 = _omega(u0)
    f0 = omega_over_sin(w0)
    n0 = f0 * nt0
    if w0 < 1e-9:
        jac_n = jac0.copy()
    else:
        sin_w0 = np.sin(w0)
        grad_w = -gu0 / sin_w0
        jac_n = omega_over_sin_deriv(w0) * np.outer(nt0, grad_w) + f0 * jac0
    return n0, jac_n


def small_k_hamiltonian(variant, k):
    """First-order expansion of the interpolating Hamiltonian at k = 0.

    For the canonical variants (theta = 0) this is a pure linear map with
    eigenvalues exactly +-|k|/sqrt(d); nonzero theta adds the constant
    -theta sigma_x of the step operator's value at the origin.
    """
    k = np.asarray(k, dtype=float)
    n0, jac_n = _linearization(variant)
    return pauli_dot(n0 + jac_n @ k)


def named_variants():
    """The canonical family members keyed by their command-line names."""
    return {
        "weyl-1d": WeylVariant(1),
        "weyl-2d": WeylVariant(2, kind="A"),
        "weyl-2d-b": WeylVariant(2, kind="B"),
        "bcc-a-plus": WeylVariant(3, kind="A", sign=1),
        "bcc-a-minus": WeylVariant(3, kind="A", sign=-1),
        "bcc-b-plus": WeylVariant(3, kind="B", sign=1),
        "bcc-b-minus": WeylVariant(3, kind="B", sign=-1),
    }


def variant_by_name(name, theta=0.0):
    base = named_variants()
    if name not in base:
        raise ValueError(f"unknown variant {name!r}; choose from {sorted(base)}")
    v = base[name]
    if theta != 0.0:
        if v.dimension != 2:
            raise ValueError("theta applies to the two-dimensional variants only")
        v = WeylVariant(2, kind=v.kind, theta=theta)
    return v
