"""Generic lattice automaton: transition matrices and their algebra.

A rule assigns an s x s complex block to each signed generator label (plus
optionally the identity 'e' for self-interaction).  The wave-vector operator
is the trigonometric polynomial A(k) = sum_h exp(-i k.h) A_h; it is unitary
for every k exactly when the transition matrices satisfy the completeness
and off-diagonal conditions checked below.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.linalg

from .cayley import IDENTITY_LABEL, CayleyPresentation
from .errors import SupportMismatchError
from .pauli import dagger, maxabs, principal_phase


@dataclass
class TransitionRule:
    """Map from signed generator labels (or 'e') to s x s complex blocks."""

    entries: dict
    internal_dim: int

    def matrix(self, label):
        if label in self.entries:
            return self.entries[label]
        return np.zeros((self.internal_dim, self.internal_dim), dtype=complex)

    def labels(self):
        return tuple(self.entries.keys())

    def check_against(self, presentation):
        allowed = set(presentation.signed_labels()) | {IDENTITY_LABEL}
        for label, block in self.entries.items():
            if label not in allowed:
                raise ValueError(f"label {label!r} not in the presentation's S or 'e'")
            if block.shape != (self.internal_dim, self.internal_dim):
                raise ValueError(f"block for {label!r} has shape {block.shape}")
        if all(maxabs(b) == 0.0 for b in self.entries.values()):
            raise ValueError("rule has no nonzero transition matrix")


@dataclass
class IsotropyGroup:
    """Graph-automorphism group elements with their spinor representation.

    Each element is (permutation of signed labels, unitary s x s matrix);
    the permutation must fix 'e' and commute with inversion.
    """

    elements: tuple

    def check_against(self, presentation):
        labels = set(presentation.signed_labels())
        plus = [g.label for g in presentation.generators_plus]
        perms = []
        for perm, unitary in self.elements:
            if set(perm.keys()) != labels or set(perm.values()) != labels:
                raise ValueError("permutation must be a bijection of S")
            u = np.asarray(unitary)
            if maxabs(u @ dagger(u) - np.eye(u.shape[0])) > 1e-12:
                raise ValueError("representation matrix is not unitary")
            perms.append(perm)
        # closure and transitivity on S_+
        frozen = {tuple(sorted(p.items())) for p in perms}
        for p, q in product(perms, repeat=2):
            comp = {k: p[q[k]] for k in q}
            if tuple(sorted(comp.items())) not in frozen:
                raise ValueError("permutations are not closed under composition")
        reachable = {perm[plus[0]] for perm, _ in self.elements}
        if not set(plus) <= reachable:
            raise ValueError("group is not transitive on S_+")


@dataclass
class AutomatonDescriptor:
    """A presentation, a transition rule, and an optional isotropy group."""

    presentation: CayleyPresentation
    rule: TransitionRule
    isotropy: IsotropyGroup = None
    name: str = ""

    def __post_init__(self):
        self.rule.check_against(self.presentation)

    @property
    def internal_dim(self):
        return self.rule.internal_dim


def assemble_k_operator(descriptor, k):
    """A(k) = sum_h exp(-i k.h) A_h with h the Euclidean displacements."""
    pres = descriptor.presentation
    k = np.asarray(k, dtype=float)
    s = descriptor.internal_dim
    out = np.zeros((s, s), dtype=complex)
    for label, block in descriptor.rule.entries.items():
        out += np.exp(-1j * float(np.dot(k, pres.displacement_of(label)))) * block
    return out


def assemble_k_batch(descriptor, ks):
    """Stacked A(k) for an (N, d) array of wave-vectors; returns (N, s, s)."""
    pres = descriptor.presentation
    ks = np.atleast_2d(np.asarray(ks, dtype=float))
    s = descriptor.internal_dim
    out = np.zeros((ks.shape[0], s, s), dtype=complex)
    for label, block in descriptor.rule.entries.items():
        phases = np.exp(-1j * ks @ pres.displacement_of(label))
        out += phases[:, None, None] * block
    return out


def assemble_theta_operator(rule, presentation, theta):
    """A as a function of group-coordinate angles theta (theta_j = k . h_j)."""
    theta = np.asarray(theta, dtype=float)
    s = rule.internal_dim
    out = np.zeros((s, s), dtype=complex)
    for label, block in rule.entries.items():
        m = np.asarray(presentation.coordinates[label], dtype=float)
        out += np.exp(-1j * float(np.dot(theta, m))) * block
    return out


@dataclass
class UnitarityReport:
    """Max-norm residuals of the transition-matrix unitarity conditions."""

    completeness_left: float
    completeness_right: float
    offdiagonal: dict = field(default_factory=dict)  # group elt -> (left, right)

    @property
    def max_residual(self):
        worst = max(self.completeness_left, self.completeness_right)
        for left, right in self.offdiagonal.values():
            worst = max(worst, left, right)
        return worst

    def as_dict(self):
        return {
            "completeness_left": self.completeness_left,
            "completeness_right": self.completeness_right,
            "offdiagonal": {
                ",".join(str(v) for v in key): [left, right]
                for key, (left, right) in sorted(self.offdiagonal.items())
            },
            "max_residual": self.max_residual,
        }


def check_unitarity_conditions(rule, presentation):
    """Residuals of sum A_h^+ A_h = sum A_h A_h^+ = I and, for every nonzero
    group element reachable as h^-1 h', of the two interference sums."""
    labels = list(rule.entries.keys())
    coords = {lab: np.asarray(presentation.coordinates[lab], dtype=int) for lab in labels}
    s = rule.internal_dim
    left = sum(dagger(rule.entries[lab]) @ rule.entries[lab] for lab in labels)
    right = sum(rule.entries[lab] @ dagger(rule.entries[lab]) for lab in labels)
    eye = np.eye(s)
    acc_left, acc_right = {}, {}
    for ha, hb in product(labels, repeat=2):
        diff = tuple(coords[hb] - coords[ha])
        if all(v == 0 for v in diff):
            continue
        zero = np.zeros((s, s), dtype=complex)
        acc_left[diff] = acc_left.get(diff, zero) + dagger(rule.entries[ha]) @ rule.entries[hb]
        acc_right[diff] = acc_right.get(diff, zero) + rule.entries[hb] @ dagger(rule.entries[ha])
    offdiag = {
        diff: (maxabs(acc_left[diff]), maxabs(acc_right[diff])) for diff in acc_left
    }
    return UnitarityReport(
        completeness_left=maxabs(left - eye),
        completeness_right=maxabs(right - eye),
        offdiagonal=offdiag,
    )


@dataclass
class CovarianceReport:
    max_residual: float
    per_element: dict  # (element index, label) -> residual

    def as_dict(self):
        return {
            "max_residual": self.max_residual,
            "per_element": {
                f"{idx}:{label}": value
                for (idx, label), value in sorted(self.per_element.items())
            },
        }


def check_covariance(descriptor):
    """Residual of U_l A_h U_l^+ = A_{l(h)} over the whole isotropy group."""
    if descriptor.isotropy is None:
        raise ValueError("descriptor carries no isotropy group")
    rule = descriptor.rule
    labels = descriptor.presentation.signed_labels()
    per = {}
    for idx, (perm, unitary) in enumerate(descriptor.isotropy.elements):
        u = np.asarray(unitary, dtype=complex)
        for label in labels:
            lhs = u @ rule.matrix(label) @ dagger(u)
            per[(idx, label)] = maxabs(lhs - rule.matrix(perm[label]))
    worst = max(per.values()) if per else 0.0
    return CovarianceReport(max_residual=worst, per_element=per)


def extract_transition_matrices(f, presentation, support, tol=1e-9, drop_tol=1e-13):
    """Recover the transition matrices of a closed-form k -> A(k).

    Samples f on the minimal regular grid in group coordinates and inverts
    the discrete Fourier series exactly; entries outside the stated support
    and a random-k reconstruction check both feed the residual.
    """
    support = tuple(support)
    coords = {lab: np.asarray(presentation.coordinates[lab], dtype=int) for lab in support}
    d = presentation.dimension
    degree = [0] * d
    for m in coords.values():
        for j in range(d):
            degree[j] = max(degree[j], abs(int(m[j])))
    grid = [2 * g + 1 for g in degree]
    probe = f(presentation.k_of_theta(np.zeros(d)))
    s = probe.shape[0]

    samples = {}
    for idx in product(*[range(n) for n in grid]):
        theta = np.array([2.0 * np.pi * idx[j] / grid[j] for j in range(d)])
        samples[idx] = np.asarray(f(presentation.k_of_theta(theta)), dtype=complex)

    coeffs = {}
    freq_ranges = [range(-g, g + 1) for g in degree]
    for m in product(*freq_ranges):
        acc = np.zeros((s, s), dtype=complex)
        for idx, value in samples.items():
            phase = sum(2.0 * np.pi * idx[j] * m[j] / grid[j] for j in range(d))
            acc += np.exp(1j * phase) * value
        coeffs[m] = acc / np.prod(grid)

    support_coords = {tuple(int(v) for v in coords[lab]): lab for lab in support}
    residual = 0.0
    entries = {}
    for m, block in coeffs.items():
        if m in support_coords:
            if maxabs(block) > drop_tol:
                entries[support_coords[m]] = block
        else:
            residual = max(residual, maxabs(block))

    rule = TransitionRule(entries=entries, internal_dim=s)
    rng = np.random.default_rng(7)
    for _ in range(8):
        theta = rng.uniform(-np.pi, np.pi, size=d)
        k = presentation.k_of_theta(theta)
        rebuilt = assemble_theta_operator(rule, presentation, theta)
        residual = max(residual, maxabs(rebuilt - f(k)))
    if residual > tol:
        raise SupportMismatchError(
            f"closed form is not supported on the stated labels (residual {residual:.3e})"
        )
    return rule


def spectrum(descriptor, k, unitarity_tol=1e-9):
    """Eigenphases in (-pi, pi] (ascending) and orthonormal eigenvectors.

    Uses the complex Schur form; for a unitary operator it is diagonal, so
    the Schur vectors are an orthonormal eigenbasis even at degeneracies.
    """
    a = assemble_k_operator(descriptor, k)
    s = descriptor.internal_dim
    residual = maxabs(dagger(a) @ a - np.eye(s))
    if residual > unitarity_tol:
        raise ValueError(f"operator is not unitary at k={k}: residual {residual:.3e}")
    t, z = scipy.linalg.schur(a, output="complex")
    phases = principal_phase(np.diag(t))
    order = np.argsort(phases, kind="stable")
    return phases[order], z[:, order]
