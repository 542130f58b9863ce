"""Named descriptor registry: canonical automata ready for the CLI and tests.

Transition matrices are recovered from the closed forms by exact Fourier
inversion, so each named descriptor is the literal neighborhood realization
of its wave-vector operator.
"""

from functools import lru_cache

import numpy as np

from . import dirac as dirac_mod
from . import weyl as weyl_mod
from .automaton import (
    AutomatonDescriptor,
    IsotropyGroup,
    TransitionRule,
    check_covariance,
    check_unitarity_conditions,
    extract_transition_matrices,
)
from .cayley import IDENTITY_LABEL, build_presentation, inverse_label

WEYL_NAMES = tuple(weyl_mod.named_variants().keys())
DIRAC_NAMES = ("dirac-1d", "dirac-2d", "dirac-3d")


def _perm_from_plus_map(presentation, mapping):
    """Extend a permutation of S_+ labels to all signed labels."""
    perm = {}
    for src, dst in mapping.items():
        perm[src] = dst
        perm[inverse_label(src)] = inverse_label(dst)
    return perm


def binary_rotation_group(presentation):
    """Order-4 group of binary rotations about the coordinate axes.

    Spatial action on the four body-diagonal generators paired with the
    spinor representation {I, i sigma_x, i sigma_y, i sigma_z}.
    """
    from .pauli import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z

    identity = {g.label: g.label for g in presentation.generators_plus}
    rot_x = {"h1": "h2", "h2": "h1", "h3": "h4", "h4": "h3"}
    rot_y = {"h1": "h3", "h3": "h1", "h2": "h4", "h4": "h2"}
    rot_z = {"h1": "h4", "h4": "h1", "h2": "h3", "h3": "h2"}
    elements = (
        (_perm_from_plus_map(presentation, identity), ID2),
        (_perm_from_plus_map(presentation, rot_x), 1j * SIGMA_X),
        (_perm_from_plus_map(presentation, rot_y), 1j * SIGMA_Y),
        (_perm_from_plus_map(presentation, rot_z), 1j * SIGMA_Z),
    )
    group = IsotropyGroup(elements=elements)
    group.check_against(presentation)
    return group


def swap_group(presentation):
    """Order-2 group exchanging the two square-lattice generators,
    represented by the spin rotation by pi about the x axis."""
    from .pauli import ID2, SIGMA_X

    identity = {"h1": "h1", "h2": "h2"}
    swap = {"h1": "h2", "h2": "h1"}
    elements = (
        (_perm_from_plus_map(presentation, identity), ID2),
        (_perm_from_plus_map(presentation, swap), -1j * SIGMA_X),
    )
    group = IsotropyGroup(elements=elements)
    group.check_against(presentation)
    return group


def _isotropy_for(variant, presentation):
    if variant.dimension == 3:
        return binary_rotation_group(presentation)
    if variant.dimension == 2:
        return swap_group(presentation)
    return None


@lru_cache(maxsize=None)
def weyl_descriptor(variant):
    """Neighborhood descriptor of a chiral variant, with its isotropy group."""
    presentation = build_presentation(variant.presentation_kind)
    rule = extract_transition_matrices(
        lambda k: weyl_mod.weyl_matrix(variant, k),
        presentation,
        presentation.signed_labels(),
        tol=1e-9,
    )
    return AutomatonDescriptor(
        presentation=presentation,
        rule=rule,
        isotropy=_isotropy_for(variant, presentation),
        name=variant.name,
    )


@lru_cache(maxsize=None)
def dirac_descriptor(dd):
    """Neighborhood descriptor of the mass-coupled automaton."""
    presentation = build_presentation(dd.weyl.presentation_kind)
    support = tuple(presentation.signed_labels()) + (IDENTITY_LABEL,)
    rule = extract_transition_matrices(
        lambda k: dirac_mod.dirac_matrix(dd, k),
        presentation,
        support,
        tol=1e-9,
    )
    name = f"dirac-{dd.weyl.dimension}d(m={dd.mass})"
    return AutomatonDescriptor(presentation=presentation, rule=rule, name=name)


def identity_descriptor(presentation, internal_dim=2):
    rule = TransitionRule(
        entries={IDENTITY_LABEL: np.eye(internal_dim, dtype=complex)},
        internal_dim=internal_dim,
    )
    return AutomatonDescriptor(presentation=presentation, rule=rule, name="identity")


def dirac_variant_for(name):
    dim = int(name.split("-")[1].rstrip("d"))
    return {1: weyl_mod.WeylVariant(1),
            2: weyl_mod.WeylVariant(2),
            3: weyl_mod.WeylVariant(3, kind="A", sign=1)}[dim]


def build_descriptor(name, mass=None, theta=0.0):
    """Descriptor for a registry name ('weyl-1d', 'bcc-a-plus', 'dirac-3d', ...)."""
    if name in WEYL_NAMES:
        if mass is not None:
            raise ValueError("mass applies to dirac descriptors only")
        return weyl_descriptor(weyl_mod.variant_by_name(name, theta=theta))
    if name in DIRAC_NAMES:
        base = dirac_variant_for(name)
        if theta != 0.0:
            if base.dimension != 2:
                raise ValueError("theta applies to two-dimensional descriptors only")
            base = weyl_mod.WeylVariant(2, theta=theta)
        m = 0.1 if mass is None else float(mass)
        return dirac_descriptor(dirac_mod.DiracDescriptor(weyl=base, mass=m))
    raise ValueError(
        f"unknown descriptor {name!r}; choose from {sorted(WEYL_NAMES + DIRAC_NAMES)}"
    )


def builtin_names():
    return WEYL_NAMES + DIRAC_NAMES


def validate_descriptor(descriptor, tolerance=1e-12):
    """Unitarity (and covariance, when an isotropy group is present) report."""
    unit = check_unitarity_conditions(descriptor.rule, descriptor.presentation)
    report = {
        "name": descriptor.name,
        "unitarity": unit.as_dict(),
        "tolerance": tolerance,
    }
    worst = unit.max_residual
    if descriptor.isotropy is not None:
        cov = check_covariance(descriptor)
        report["covariance"] = cov.as_dict()
        worst = max(worst, cov.max_residual)
    report["max_residual"] = worst
    report["passed"] = bool(worst <= tolerance)
    return report
