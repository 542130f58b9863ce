"""Abelian Cayley-graph presentations of Z^d with Euclidean embedding.

A presentation carries the generating set S_+ with embedded displacement
vectors, the relators, a choice of d generators used as integer coordinates
(the free basis), and the wave-vector zone geometry.  The three canonical
presentations are the integer line, the 45-degree square lattice, and the
body-centered cubic lattice with four generators summing to zero.

Displacements are normalized so every component is +-1/sqrt(d); the
wave-vector operator of an automaton on these graphs is then a trigonometric
polynomial in the plain inner products k . h.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .errors import RadiusExceededError

IDENTITY_LABEL = "e"

_EDGE_TOL = 1e-9


def inverse_label(label):
    """Canonical label of the inverse generator ("h1" <-> "h1^-1")."""
    if label == IDENTITY_LABEL:
        return IDENTITY_LABEL
    if label.endswith("^-1"):
        return label[:-3]
    return label + "^-1"


@dataclass(frozen=True)
class Generator:
    """One generator: label, embedded displacement, and its inverse's label."""

    label: str
    displacement: tuple
    inverse_label: str


@dataclass(frozen=True)
class BrillouinZone:
    """Convex wave-vector zone cut out by half-spaces k . n <= c.

    The boundary convention is half-open: a face whose outward normal has a
    positive first nonzero component is included, the opposite face is not,
    which makes zone reduction single-valued on face points.
    """

    kind: str
    bounds: tuple  # of (normal tuple, scalar) pairs

    def _face_included(self, normal):
        for component in normal:
            if component > 0:
                return True
            if component < 0:
                return False
        return True

    def contains(self, k):
        k = np.asarray(k, dtype=float)
        for normal, c in self.bounds:
            s = float(np.dot(k, normal))
            if self._face_included(normal):
                if s > c + _EDGE_TOL:
                    return False
            else:
                if s >= c - _EDGE_TOL:
                    return False
        return True

    def bounding_radius(self):
        """Radius of a coordinate box guaranteed to contain the zone."""
        return max(c / max(np.max(np.abs(normal)), 1e-300) for normal, c in self.bounds)


@dataclass
class CayleyPresentation:
    """Presentation <S | R> of Z^d together with its Euclidean embedding."""

    dimension: int
    generators_plus: tuple
    relators: tuple  # integer coefficient vectors over generators_plus
    free_basis: tuple  # labels of d generators used as integer coordinates
    bz: BrillouinZone
    kind: str = "custom"

    @cached_property
    def basis_matrix(self):
        """d x d matrix whose columns are the free-basis displacements."""
        by_label = {g.label: g.displacement for g in self.generators_plus}
        return np.array([by_label[lab] for lab in self.free_basis], dtype=float).T

    @cached_property
    def dual_matrix(self):
        """Columns b_j with b_j . h_i = delta_ij; maps group-coordinate
        angles theta to Cartesian wave-vectors k = dual @ theta."""
        return np.linalg.inv(self.basis_matrix.T)

    @cached_property
    def reciprocal_basis(self):
        """Columns of 2*pi * dual: the reciprocal lattice basis."""
        return 2.0 * np.pi * self.dual_matrix

    @cached_property
    def coordinates(self):
        """Integer free-basis coordinates for every signed label and 'e'."""
        coords = {IDENTITY_LABEL: tuple([0] * self.dimension)}
        inv_basis = np.linalg.inv(self.basis_matrix)
        for g in self.generators_plus:
            x = inv_basis @ np.asarray(g.displacement)
            xi = np.rint(x)
            if np.max(np.abs(x - xi)) > 1e-9:
                raise ValueError(
                    f"generator {g.label} is not an integer combination of the free basis"
                )
            coords[g.label] = tuple(int(v) for v in xi)
            coords[g.inverse_label] = tuple(-int(v) for v in xi)
        return coords

    def signed_labels(self):
        """All generator labels and their inverses (the set S, without 'e')."""
        labels = []
        for g in self.generators_plus:
            labels.append(g.label)
            labels.append(g.inverse_label)
        return tuple(labels)

    def displacement_of(self, label):
        return self.basis_matrix @ np.asarray(self.coordinates[label], dtype=float)

    def theta_of(self, k):
        """Group-coordinate angles theta_j = k . h_j."""
        return self.basis_matrix.T @ np.asarray(k, dtype=float)

    def k_of_theta(self, theta):
        return self.dual_matrix @ np.asarray(theta, dtype=float)

    def check_invariants(self):
        """Raise if the relators, basis, or zone violate their contracts."""
        if len(self.free_basis) != self.dimension:
            raise ValueError("free basis must contain exactly d generators")
        if abs(np.linalg.det(self.basis_matrix)) < 1e-12:
            raise ValueError("free-basis displacements are linearly dependent")
        disp = np.array([g.displacement for g in self.generators_plus])
        for coeffs in self.relators:
            if float(np.max(np.abs(np.asarray(coeffs) @ disp))) > 1e-12:
                raise ValueError(f"relator {coeffs} does not embed to zero")
        labels = [g.label for g in self.generators_plus]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels are not unique")
        self.coordinates  # validates integer combinations
        if not self.bz.contains(np.zeros(self.dimension)):
            raise ValueError("zone does not contain k = 0")


def _zone_line():
    return BrillouinZone("interval_1d", (((1.0,), np.pi), ((-1.0,), np.pi)))


def _zone_square():
    c = np.sqrt(2.0) * np.pi
    bounds = (
        ((1.0, 0.0), c),
        ((-1.0, 0.0), c),
        ((0.0, 1.0), c),
        ((0.0, -1.0), c),
    )
    return BrillouinZone("square_2d", bounds)


def _zone_bcc():
    c = np.sqrt(3.0) * np.pi
    bounds = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for si, sj in product((1.0, -1.0), repeat=2):
            normal = [0.0, 0.0, 0.0]
            normal[i] = si
            normal[j] = sj
            bounds.append((tuple(normal), c))
    return BrillouinZone("rhombic_dodecahedron_3d", tuple(bounds))


def voronoi_zone(reciprocal_basis, kind="voronoi"):
    """Wigner-Seitz cell of the lattice spanned by the given basis columns.

    Candidate facet normals are short lattice vectors; a plane k.v = |v|^2/2
    is kept only when its midpoint v/2 is not cut off by another candidate.
    """
    basis = np.asarray(reciprocal_basis, dtype=float)
    d = basis.shape[0]
    vectors = []
    for coeffs in product(range(-2, 3), repeat=d):
        if any(coeffs):
            vectors.append(basis @ np.asarray(coeffs, dtype=float))
    bounds = []
    for v in vectors:
        mid = v / 2.0
        keep = True
        for w in vectors:
            if w is v:
                continue
            if np.dot(mid, w) > np.dot(w, w) / 2.0 + 1e-12:
                keep = False
                break
        if keep:
            bounds.append((tuple(v), float(np.dot(v, v) / 2.0)))
    return BrillouinZone(kind, tuple(bounds))


def build_presentation(kind):
    """Canonical presentation: 'line', 'square_2d' or 'bcc_3d'."""
    if kind == "line":
        gens = (Generator("h", (1.0,), "h^-1"),)
        pres = CayleyPresentation(1, gens, (), ("h",), _zone_line(), kind="line")
    elif kind == "square_2d":
        r = 1.0 / np.sqrt(2.0)
        gens = (
            Generator("h1", (r, r), "h1^-1"),
            Generator("h2", (r, -r), "h2^-1"),
        )
        pres = CayleyPresentation(2, gens, (), ("h1", "h2"), _zone_square(), kind="square_2d")
    elif kind == "bcc_3d":
        r = 1.0 / np.sqrt(3.0)
        gens = (
            Generator("h1", (r, r, r), "h1^-1"),
            Generator("h2", (r, -r, -r), "h2^-1"),
            Generator("h3", (-r, r, -r), "h3^-1"),
            Generator("h4", (-r, -r, r), "h4^-1"),
        )
        pres = CayleyPresentation(
            3, gens, ((1, 1, 1, 1),), ("h1", "h2", "h3"), _zone_bcc(), kind="bcc_3d"
        )
    else:
        raise ValueError(f"unknown presentation kind: {kind!r}")
    pres.check_invariants()
    return pres


def word_metric(presentation, a, b, max_radius=32):
    """Graph distance from a to b (free-basis integer coordinates) by BFS.

    Raises RadiusExceededError once the search passes max_radius without
    reaching b; the ball volume grows polynomially, so keep the radius sane.
    """
    a = tuple(int(v) for v in a)
    b = tuple(int(v) for v in b)
    if a == b:
        return 0
    steps = [np.asarray(presentation.coordinates[lab]) for lab in presentation.signed_labels()]
    visited = {a}
    frontier = [np.asarray(a)]
    dist = 0
    while frontier:
        dist += 1
        if dist > max_radius:
            raise RadiusExceededError(
                f"no word of length <= {max_radius} connects {a} to {b}"
            )
        next_frontier = []
        for point in frontier:
            for step in steps:
                nxt = tuple(int(v) for v in point + step)
                if nxt == b:
                    return dist
                if nxt not in visited:
                    visited.add(nxt)
                    next_frontier.append(np.asarray(nxt))
        frontier = next_frontier
    raise RadiusExceededError(f"graph disconnected between {a} and {b}")


def reduce_to_zone(presentation, k):
    """Translate k by reciprocal-lattice vectors into the zone (idempotent).

    Points already inside (per the half-open boundary rule) come back
    unchanged; otherwise the nearest-cell translate is searched over a small
    deterministic shell of lattice offsets.
    """
    k = np.asarray(k, dtype=float)
    zone = presentation.bz
    if zone.contains(k):
        return k.copy()
    recip = presentation.reciprocal_basis
    base = np.rint(np.linalg.solve(recip, k))
    d = presentation.dimension
    offsets = sorted(
        product(range(-2, 3), repeat=d),
        key=lambda o: (sum(x * x for x in o), o),
    )
    for off in offsets:
        candidate = k - recip @ (base + np.asarray(off, dtype=float))
        if zone.contains(candidate):
            return candidate
    raise RuntimeError(f"zone reduction failed for k = {k}")  # pragma: no cover


@dataclass(frozen=True)
class TilingMap:
    """Regrouping of a lattice onto a finite-index sublattice.

    subgroup_basis holds the sublattice basis vectors as matrix columns in
    the parent's free-basis coordinates; coset_reps are the canonical
    (lexicographically smallest non-negative) representatives.
    """

    parent: CayleyPresentation = field(compare=False)
    subgroup_basis: tuple
    coset_reps: tuple
    index: int

    @property
    def basis_matrix(self):
        return np.array(self.subgroup_basis, dtype=int).T  # columns

    def coset_key(self, x):
        """Exact integer coset invariant: adj(M) @ x mod det(M)."""
        m = self.basis_matrix
        det = int(round(np.linalg.det(m)))
        adj = np.rint(np.linalg.inv(m) * det).astype(int)
        return tuple((adj @ np.asarray(x, dtype=int)) % abs(det))

    def coset_index(self, x):
        key = self.coset_key(x)
        for i, rep in enumerate(self.coset_reps):
            if self.coset_key(rep) == key:
                return i
        raise ValueError(f"{x} matches no enumerated coset")  # pragma: no cover

    def decompose(self, x):
        """Split x = rep + M @ g' and return (coset index, sublattice coords g')."""
        i = self.coset_index(x)
        delta = np.asarray(x, dtype=int) - np.asarray(self.coset_reps[i], dtype=int)
        g = np.linalg.solve(self.basis_matrix, delta)
        gi = np.rint(g).astype(int)
        if np.max(np.abs(g - gi)) > 1e-9:  # pragma: no cover
            raise ValueError("coset decomposition failed")
        return i, gi


def make_tiling(presentation, subgroup_basis):
    """Enumerate the cosets of the sublattice spanned by subgroup_basis.

    Basis vectors are the columns of the matrix formed from the given
    sequence of d integer vectors.  Representatives are scanned over
    [0, r)^d, which always contains the lexicographically smallest
    non-negative representative because r * Z^d lies in the sublattice.
    """
    vectors = tuple(tuple(int(v) for v in vec) for vec in np.atleast_2d(subgroup_basis))
    m = np.array(vectors, dtype=int).T
    if m.shape != (presentation.dimension, presentation.dimension):
        raise ValueError("subgroup basis must contain d integer d-vectors")
    det = int(round(np.linalg.det(m)))
    if det == 0:
        raise ValueError("subgroup basis is singular")
    r = abs(det)
    if r > 4096:
        raise ValueError(f"sublattice index {r} too large to enumerate")
    adj = np.rint(np.linalg.inv(m) * det).astype(int)
    seen = {}
    for x in product(range(r), repeat=presentation.dimension):
        key = tuple((adj @ np.asarray(x, dtype=int)) % r)
        if key not in seen:
            seen[key] = x
        if len(seen) == r:
            break
    reps = tuple(sorted(seen.values()))
    return TilingMap(parent=presentation, subgroup_basis=vectors, coset_reps=reps, index=r)
