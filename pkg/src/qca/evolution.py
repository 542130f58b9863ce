"""Finite periodic-lattice field states and their unitary evolution.

States live on a torus of group coordinates with one complex amplitude per
(site, internal index).  Evolution is exact in the wave-vector picture:
an FFT block-diagonalizes the step into one small unitary per lattice mode.
A direct neighborhood-sum step is kept as the independent oracle.
"""

from dataclasses import dataclass, replace

import numpy as np

from .automaton import AutomatonDescriptor, TransitionRule
from .cayley import (
    CayleyPresentation,
    Generator,
    IDENTITY_LABEL,
    inverse_label,
    voronoi_zone,
)
from .errors import PacketBoundaryError, ZoneLeakError
from .pauli import maxabs

_POWER_STEP_LIMIT = 64


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic extent of the simulation torus, one size per free coordinate."""

    presentation: CayleyPresentation
    sizes: tuple

    def __post_init__(self):
        if len(self.sizes) != self.presentation.dimension:
            raise ValueError("one size per lattice dimension required")
        if any(n < 2 for n in self.sizes):
            raise ValueError("lattice sizes must be at least 2")

    @property
    def site_count(self):
        return int(np.prod(self.sizes))


@dataclass(frozen=True)
class FieldState:
    """Complex amplitudes over (site coordinates, internal index)."""

    lattice: LatticeSpec
    internal_dim: int
    amplitudes: np.ndarray
    time: int = 0

    def __post_init__(self):
        expected = tuple(self.lattice.sizes) + (self.internal_dim,)
        if self.amplitudes.shape != expected:
            raise ValueError(
                f"amplitude shape {self.amplitudes.shape} != expected {expected}"
            )

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


def random_state(lattice, internal_dim, rng, normalized=True):
    shape = tuple(lattice.sizes) + (internal_dim,)
    amps = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if normalized:
        amps /= np.linalg.norm(amps)
    return FieldState(lattice=lattice, internal_dim=internal_dim, amplitudes=amps)


def _check_compatible(state, descriptor):
    if state.lattice.presentation != descriptor.presentation:
        raise ValueError("state lattice and descriptor use different presentations")
    if state.internal_dim != descriptor.internal_dim:
        raise ValueError("internal dimension mismatch between state and rule")


def step_direct(state, descriptor):
    """One step by explicit neighborhood sums with periodic wraparound.

    psi'_g = sum_h A_h psi_{g-h}; the independent oracle for step_spectral.
    """
    _check_compatible(state, descriptor)
    d = state.lattice.presentation.dimension
    axes = tuple(range(d))
    out = np.zeros_like(state.amplitudes)
    for label, block in descriptor.rule.entries.items():
        shift = descriptor.presentation.coordinates[label]
        rolled = np.roll(state.amplitudes, shift=shift, axis=axes)
        out += rolled @ block.T
    return replace(state, amplitudes=out, time=state.time + 1)


def _theta_axes(sizes):
    return [2.0 * np.pi * np.fft.fftfreq(n) for n in sizes]


def mode_matrices(descriptor, sizes):
    """Stacked per-mode step operators over the FFT grid, shape (*sizes, s, s)."""
    pres = descriptor.presentation
    thetas = _theta_axes(sizes)
    d = pres.dimension
    s = descriptor.internal_dim
    out = np.zeros(tuple(sizes) + (s, s), dtype=complex)
    for label, block in descriptor.rule.entries.items():
        m = pres.coordinates[label]
        phase = np.zeros(tuple(sizes))
        for j in range(d):
            shape = [1] * d
            shape[j] = sizes[j]
            phase = phase + m[j] * thetas[j].reshape(shape)
        out += np.exp(-1j * phase)[..., None, None] * block
    return out


def step_spectral(state, descriptor, steps):
    """Evolve by `steps` applications of the global step, in the mode picture.

    Small step counts use stacked matrix powers; large counts switch to a
    per-mode eigendecomposition so cost and roundoff stay O(1) in steps.
    """
    _check_compatible(state, descriptor)
    if steps == 0:
        return replace(state)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    d = state.lattice.presentation.dimension
    axes = tuple(range(d))
    hat = np.fft.fftn(state.amplitudes, axes=axes)
    mats = mode_matrices(descriptor, state.lattice.sizes)
    if steps <= _POWER_STEP_LIMIT:
        powered = np.linalg.matrix_power(mats, steps)
        hat = np.einsum("...ab,...b->...a", powered, hat)
    else:
        vals, vecs = np.linalg.eig(mats)
        # Unit-modulus projection: the per-mode operators are unitary, so
        # only the phases may be raised to the step count safely.
        phases = np.angle(vals)
        coeff = np.linalg.solve(vecs, hat[..., None])[..., 0]
        coeff = coeff * np.exp(1j * steps * phases)
        hat = np.einsum("...ab,...b->...a", vecs, coeff)
    out = np.fft.ifftn(hat, axes=axes)
    return replace(state, amplitudes=out, time=state.time + steps)


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian wave packet in the wave-vector picture.

    center_k is Cartesian; sigma_k is the standard deviation of |psi_hat|^2;
    center_x is the site (group coordinates) where the packet localizes;
    branch selects the negative- ("plus", positive energy) or positive-
    eigenphase subspace of the step operator.
    """

    center_k: tuple
    sigma_k: float
    center_x: tuple
    branch: str = "plus"

    def __post_init__(self):
        if self.branch not in ("plus", "minus"):
            raise ValueError("branch must be 'plus' or 'minus'")
        if self.sigma_k <= 0:
            raise ValueError("sigma_k must be positive")


def _branch_projector(matrix, branch):
    """Spectral projector onto the negative- or positive-eigenphase subspace."""
    vals, vecs = np.linalg.eig(matrix)
    phases = np.angle(vals)
    want = phases <= 0 if branch == "plus" else phases > 0
    if not np.any(want):
        want = ~want
    cols = vecs[:, want]
    q, _ = np.linalg.qr(cols)
    return q @ q.conj().T


def make_packet(spec, descriptor, lattice):
    """Gaussian envelope times the branch eigenvector, localized at center_x.

    The envelope is checked to be below 1e-12 at the aliasing seam of the
    mode grid (the band edge); wider packets raise ZoneLeakError.
    """
    if lattice.presentation != descriptor.presentation:
        raise ValueError("lattice and descriptor use different presentations")
    pres = descriptor.presentation
    d = pres.dimension
    sizes = lattice.sizes
    s = descriptor.internal_dim
    k0 = np.asarray(spec.center_k, dtype=float)
    theta0 = pres.theta_of(k0)
    thetas = _theta_axes(sizes)

    wrapped = []
    for j in range(d):
        w = np.mod(thetas[j] - theta0[j] + np.pi, 2.0 * np.pi) - np.pi
        wrapped.append(w)
    # Cartesian offset of every mode from the packet center.
    dk2 = np.zeros(tuple(sizes))
    dual = pres.dual_matrix
    for i in range(d):
        comp = np.zeros(tuple(sizes))
        for j in range(d):
            shape = [1] * d
            shape[j] = sizes[j]
            comp = comp + dual[i, j] * wrapped[j].reshape(shape)
        dk2 = dk2 + comp * comp
    envelope = np.exp(-dk2 / (4.0 * spec.sigma_k ** 2))

    for j in range(d):
        seam = int(np.argmin(np.cos(thetas[j] - theta0[j])))
        slicer = [slice(None)] * d
        slicer[j] = seam
        if float(np.max(envelope[tuple(slicer)])) > 1e-12:
            raise ZoneLeakError(
                f"sigma_k={spec.sigma_k} leaks past the mode-grid seam on axis {j}"
            )

    mats = mode_matrices(descriptor, sizes)
    ref_proj = _branch_projector(np.asarray(
        sum(np.exp(-1j * float(theta0 @ np.asarray(pres.coordinates[lab], dtype=float))) * blk
            for lab, blk in descriptor.rule.entries.items())
    ), spec.branch)
    ref = ref_proj[:, int(np.argmax(np.linalg.norm(ref_proj, axis=0)))]
    ref = ref / np.linalg.norm(ref)

    hat = np.zeros(tuple(sizes) + (s,), dtype=complex)
    significant = np.argwhere(envelope > 1e-14)
    x0 = np.asarray(spec.center_x, dtype=float)
    for idx in significant:
        idx = tuple(idx)
        proj = _branch_projector(mats[idx], spec.branch)
        vec = proj @ ref
        nv = np.linalg.norm(vec)
        if nv < 1e-12:
            continue  # branch subspace orthogonal to the reference: tail mode
        theta = np.array([thetas[j][idx[j]] for j in range(d)])
        hat[idx] = envelope[idx] * np.exp(-1j * float(theta @ x0)) * (vec / nv)

    amps = np.fft.ifftn(hat, axes=tuple(range(d)))
    amps = amps / np.linalg.norm(amps)
    return FieldState(lattice=lattice, internal_dim=s, amplitudes=amps, time=0)


def _circular_means(state):
    """Per-coordinate circular mean and resultant length of |psi|^2."""
    d = state.lattice.presentation.dimension
    sizes = state.lattice.sizes
    weights = np.sum(np.abs(state.amplitudes) ** 2, axis=-1)
    total = float(np.sum(weights))
    means, resultants = [], []
    for j in range(d):
        angles = 2.0 * np.pi * np.arange(sizes[j]) / sizes[j]
        other = tuple(ax for ax in range(d) if ax != j)
        w = np.sum(weights, axis=other)
        z = np.sum(w * np.exp(1j * angles)) / total
        means.append((np.angle(z) % (2.0 * np.pi)) * sizes[j] / (2.0 * np.pi))
        resultants.append(abs(z))
    return np.array(means), np.array(resultants)


def mean_position(state):
    """Amplitude-weighted circular mean position, in group and Cartesian coords."""
    means, _ = _circular_means(state)
    cart = state.lattice.presentation.basis_matrix @ means
    return means, cart


def _check_seam_clearance(state):
    d = state.lattice.presentation.dimension
    sizes = state.lattice.sizes
    means, resultants = _circular_means(state)
    for j in range(d):
        r = min(max(resultants[j], 1e-300), 1.0)
        circ_std = np.sqrt(max(-2.0 * np.log(r), 0.0)) * sizes[j] / (2.0 * np.pi)
        if 3.0 * circ_std >= sizes[j] / 2.0:
            raise PacketBoundaryError(
                f"packet mass within 3 sigma of the wrap seam on axis {j}"
            )
    return means


def measure_packet_velocity(before, after, steps):
    """Cartesian displacement of the circular mean position per step."""
    if before.lattice != after.lattice:
        raise ValueError("states live on different lattices")
    if steps <= 0:
        raise ValueError("steps must be positive")
    m0 = _check_seam_clearance(before)
    m1 = _check_seam_clearance(after)
    sizes = np.asarray(before.lattice.sizes, dtype=float)
    delta = np.mod(m1 - m0 + sizes / 2.0, sizes) - sizes / 2.0
    return before.lattice.presentation.basis_matrix @ (delta / steps)


def coarse_presentation(tiling):
    """Presentation of the sublattice with the regrouped internal space.

    Generators are the standard sublattice basis directions plus any other
    coarse displacements the regrouped rule can reach; the zone is the
    Wigner-Seitz cell of the coarse reciprocal lattice.
    """
    parent = tiling.parent
    d = parent.dimension
    basis = tiling.basis_matrix  # columns, parent free coords
    embed = parent.basis_matrix @ basis  # columns, Cartesian

    needed = set()
    for rep in tiling.coset_reps:
        for label in list(parent.signed_labels()) + [IDENTITY_LABEL]:
            shift = np.asarray(rep, dtype=int) - np.asarray(
                parent.coordinates[label], dtype=int
            )
            _, g = tiling.decompose(shift)
            if any(g):
                needed.add(tuple(int(v) for v in -g))
    for j in range(d):
        unit = tuple(1 if i == j else 0 for i in range(d))
        needed.add(unit)

    def _canonical(coords):
        for v in coords:
            if v > 0:
                return coords
            if v < 0:
                return tuple(-w for w in coords)
        return coords

    positives = sorted({_canonical(coords) for coords in needed})

    gens = []
    for i, coords in enumerate(positives):
        label = f"t{i + 1}"
        disp = tuple(float(v) for v in embed @ np.asarray(coords, dtype=float))
        gens.append((label, disp, coords))

    # Free basis: the standard sublattice directions, which are always present
    # because the canonical ordering keeps the positive unit vectors.
    unit_labels = []
    for j in range(d):
        unit = tuple(1 if i == j else 0 for i in range(d))
        for label, _, coords in gens:
            if coords == unit:
                unit_labels.append(label)
                break

    generator_objs = tuple(
        Generator(label, disp, inverse_label(label)) for label, disp, _ in gens
    )
    zone = voronoi_zone(2.0 * np.pi * np.linalg.inv(embed.T), kind="voronoi")
    pres = CayleyPresentation(
        dimension=d,
        generators_plus=generator_objs,
        relators=(),
        free_basis=tuple(unit_labels),
        bz=zone,
        kind="tiled",
    )
    pres.check_invariants()
    return pres


def tile_descriptor(descriptor, tiling):
    """Regrouped automaton on the sublattice with internal dimension s * r.

    The coarse blocks are read off from psi_{c_i + g'} updates: for every
    coset representative c_i and fine label h, c_i - h = c_j + M g'' places
    A_h into the (i, j) block of the coarse matrix at coarse shift -g''.
    """
    pres = descriptor.presentation
    r = tiling.index
    s = descriptor.internal_dim
    coarse_pres = coarse_presentation(tiling)
    coords_to_label = {}
    for label in coarse_pres.signed_labels():
        coords_to_label[tuple(coarse_pres.coordinates[label])] = label
    coords_to_label[tuple([0] * pres.dimension)] = IDENTITY_LABEL

    blocks = {}
    for i, rep in enumerate(tiling.coset_reps):
        for label, block in descriptor.rule.entries.items():
            shift = np.asarray(rep, dtype=int) - np.asarray(
                pres.coordinates[label], dtype=int
            )
            j, g = tiling.decompose(shift)
            key = tuple(int(v) for v in -g)
            coarse_label = coords_to_label[key]
            if coarse_label not in blocks:
                blocks[coarse_label] = np.zeros((s * r, s * r), dtype=complex)
            blocks[coarse_label][i * s:(i + 1) * s, j * s:(j + 1) * s] += block

    rule = TransitionRule(entries=blocks, internal_dim=s * r)
    name = f"{descriptor.name}/tiled-x{r}" if descriptor.name else f"tiled-x{r}"
    return AutomatonDescriptor(presentation=coarse_pres, rule=rule, name=name)


def _coarse_sizes(tiling, sizes):
    basis = tiling.basis_matrix
    d = basis.shape[0]
    if np.any(basis != np.diag(np.diag(basis))):
        raise ValueError("state regrouping supports diagonal sublattice bases only")
    diag = np.abs(np.diag(basis))
    out = []
    for j in range(d):
        if sizes[j] % diag[j]:
            raise ValueError(
                f"lattice size {sizes[j]} not divisible by sublattice step {diag[j]}"
            )
        out.append(sizes[j] // int(diag[j]))
    return tuple(int(v) for v in out), diag.astype(int)


def apply_tiling(state, tiling):
    """Regroup amplitudes onto the sublattice: (coset, spinor) -> internal."""
    sizes = state.lattice.sizes
    coarse_sizes, diag = _coarse_sizes(tiling, sizes)
    s = state.internal_dim
    r = tiling.index
    d = len(sizes)
    coarse_pres = coarse_presentation(tiling)
    coarse_lattice = LatticeSpec(presentation=coarse_pres, sizes=coarse_sizes)
    out = np.zeros(tuple(coarse_sizes) + (s * r,), dtype=complex)
    for i, rep in enumerate(tiling.coset_reps):
        slicer = tuple(slice(int(rep[j]), None, int(diag[j])) for j in range(d))
        out[..., i * s:(i + 1) * s] = state.amplitudes[slicer]
    return FieldState(
        lattice=coarse_lattice, internal_dim=s * r, amplitudes=out, time=state.time
    )


def norm_drift(state):
    return abs(state.norm() - 1.0)


def unitarity_residual_of_step(descriptor, sizes):
    """Worst per-mode unitarity defect over the FFT grid (diagnostic)."""
    mats = mode_matrices(descriptor, sizes)
    s = descriptor.internal_dim
    prod = np.einsum("...ba,...bc->...ac", mats.conj(), mats)
    return maxabs(prod - np.eye(s))
