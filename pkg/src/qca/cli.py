"""Command-line front end: validation, dispersion sweeps, evolution runs,
electromagnetic-sector experiments, tiling and the coupling search.

Every subcommand has a JSON emit mode; numeric output is formatted at 17
significant digits, so a fixed configuration and seed reproduce output
byte for byte.  QCA_THREADS caps the worker pool used for grid sweeps
(results are assembled in input order regardless of completion order).
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import catalog, dirac, evolution, fock, maxwell, serialize, weyl
from .cayley import build_presentation, make_tiling
from .errors import QcaError

_FMT = "%.17g"


def _fmt(x):
    return format(float(x), ".17g")


def _pool_map(func, items):
    threads = int(os.environ.get("QCA_THREADS", "0") or 0)
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_report(payload, args):
    _write(serialize.report_document(payload), getattr(args, "output", None))


def _load_descriptor(args):
    if getattr(args, "descriptor", None):
        return serialize.load_descriptor(args.descriptor)
    name = getattr(args, "builtin", None)
    if not name:
        raise QcaError("pass --builtin NAME or --descriptor FILE")
    return catalog.build_descriptor(
        name, mass=getattr(args, "mass", None), theta=getattr(args, "theta", 0.0)
    )


def _parse_vector(text, dimension=None):
    parts = [float(v) for v in text.split(",") if v != ""]
    if dimension is not None and len(parts) != dimension:
        raise QcaError(f"expected {dimension} components, got {len(parts)}")
    return np.array(parts)


def _parse_sizes(text):
    return tuple(int(v) for v in text.split(",") if v != "")


def _parse_int_matrix(text):
    return tuple(tuple(int(v) for v in row.split(",")) for row in text.split(";"))


# ---------------------------------------------------------------- graph

def _cmd_graph(args):
    presentation = build_presentation(args.kind)
    _emit_report(serialize.presentation_to_dict(presentation), args)
    return 0


# ------------------------------------------------------------- validate

def _cmd_validate(args):
    descriptor = _load_descriptor(args)
    report = catalog.validate_descriptor(descriptor, tolerance=args.tolerance)
    _emit_report(report, args)
    return 0 if report["passed"] else 1


# ----------------------------------------------------------- dispersion

def _dispersion_rows(args, descriptor_like):
    d = descriptor_like["dimension"]
    grid = args.grid
    axes = [np.arange(grid) * (2.0 * np.pi / grid) - np.pi for _ in range(d)]
    pres = descriptor_like["presentation"]

    def row_for(index):
        theta = np.array([axes[j][index[j]] for j in range(d)])
        k = pres.k_of_theta(theta)
        sample = descriptor_like["sample"](k)
        return (
            [float(v) for v in k]
            + [sample.omega[0], sample.omega[1]]
            + [float(v) for v in sample.group_velocity]
        )

    indices = list(np.ndindex(*(grid,) * d))
    return d, _pool_map(row_for, indices)


def _cmd_dispersion(args):
    variant = weyl.variant_by_name(args.variant, theta=args.theta)
    pres = build_presentation(variant.presentation_kind)
    if args.dirac:
        dd = dirac.DiracDescriptor(weyl=variant, mass=args.mass)
        sampler = lambda k: dirac.dirac_dispersion(dd, k)  # noqa: E731
    else:
        sampler = lambda k: weyl.dispersion(variant, k)  # noqa: E731
    d, rows = _dispersion_rows(
        args,
        {"dimension": variant.dimension, "presentation": pres, "sample": sampler},
    )
    if args.emit == "csv":
        header = (
            [f"k{j + 1}" for j in range(d)]
            + ["omega_plus", "omega_minus"]
            + [f"v{j + 1}" for j in range(d)]
        )
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        _write("\n".join(lines) + "\n", args.output)
    else:
        _emit_report({"variant": args.variant, "dirac": bool(args.dirac),
                      "grid": args.grid, "rows": rows}, args)
    return 0


# --------------------------------------------------------------- evolve

def _parse_packet(text, dimension):
    # Fields separated by ';' or by ',' when the comma precedes a new key,
    # so both "k0=0.2,0,0;sigma=0.05" and "k0=0.2,0,0,sigma=0.05" parse.
    import re

    fields = {}
    for chunk in re.split(r";|,(?=\s*[A-Za-z_][A-Za-z0-9_]*\s*=)", text):
        if not chunk:
            continue
        key, _, value = chunk.partition("=")
        fields[key.strip()] = value.strip()
    missing = {"k0", "sigma"} - set(fields)
    if missing:
        raise QcaError(f"packet spec missing {sorted(missing)}")
    k0 = _parse_vector(fields["k0"], dimension)
    sigma = float(fields["sigma"])
    x0 = tuple(int(v) for v in fields.get("x0", ",".join(["0"] * dimension)).split(","))
    branch = fields.get("branch", "plus")
    return evolution.WavePacketSpec(
        center_k=tuple(k0), sigma_k=sigma, center_x=x0, branch=branch
    )


def _cmd_evolve(args):
    descriptor = _load_descriptor(args)
    sizes = _parse_sizes(args.sizes)
    lattice = evolution.LatticeSpec(presentation=descriptor.presentation, sizes=sizes)
    spec = _parse_packet(args.packet, descriptor.presentation.dimension)
    state = evolution.make_packet(spec, descriptor, lattice)

    stride = args.record_every or max(1, args.steps // 50)
    rows = []
    current = state
    recorded = 0
    while recorded < args.steps:
        advance = min(stride, args.steps - recorded)
        current = evolution.step_spectral(current, descriptor, advance)
        recorded += advance
        _, cart = evolution.mean_position(current)
        rows.append([current.time, current.norm()] + [float(v) for v in cart])

    if args.snapshot:
        serialize.save_snapshot(current, args.snapshot)

    velocity = evolution.measure_packet_velocity(state, current, args.steps)
    summary = {
        "steps": args.steps,
        "norm": current.norm(),
        "velocity": [float(v) for v in velocity],
        "packet": {"k0": list(spec.center_k), "sigma": spec.sigma_k,
                   "x0": list(spec.center_x), "branch": spec.branch},
    }
    if args.observables:
        d = descriptor.presentation.dimension
        header = ["step", "norm"] + [f"x{j + 1}" for j in range(d)]
        lines = [",".join(header)]
        lines += [",".join([str(int(r[0]))] + [_fmt(v) for v in r[1:]]) for r in rows]
        _write("\n".join(lines) + "\n", args.observables)
    _emit_report(summary, args)
    return 0


# -------------------------------------------------------------- maxwell

def _cmd_maxwell(args):
    variant = weyl.variant_by_name(args.variant)
    rng = np.random.default_rng(args.seed)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    phi /= np.linalg.norm(phi)
    k = _parse_vector(args.k, 3)
    report = maxwell.mode_maxwell_residual(
        psi, phi, k, args.dt, t_max=args.time, variant=variant
    )
    payload = report.as_dict()
    payload["k"] = [float(v) for v in k]
    payload["dt"] = args.dt
    payload["time"] = args.time
    payload["precession_deviation"] = maxwell.precession_deviation(k, variant)
    payload["identity_residual"] = maxwell.angular_momentum_identity_residual(
        rng.uniform(-np.pi, np.pi, size=3)
    )
    _emit_report(payload, args)
    return 0


# ----------------------------------------------------------------- fock

def _cmd_fock(args):
    oracle = fock.FockOracle(n_pair_modes=args.modes)
    if args.fill > args.modes:
        raise QcaError("--fill cannot exceed --modes")
    state = oracle.filled_psi_state(args.fill)
    table = []
    for i in range(2):
        for j in range(2):
            deviation, epsilon = fock.fock_commutator_deviation(oracle, state, (i, j))
            table.append({"i": i + 1, "j": j + 1, "deviation": deviation,
                          "epsilon": epsilon})
    payload = {
        "pair_modes": args.modes,
        "filled": args.fill,
        "anticommutator_residual": fock.anticommutator_residual(n_modes=6),
        "table": table,
    }
    _emit_report(payload, args)
    return 0


# ----------------------------------------------------------------- tile

def _cmd_tile(args):
    descriptor = _load_descriptor(args)
    basis = _parse_int_matrix(args.basis)
    tiling = make_tiling(descriptor.presentation, basis)
    coarse = evolution.tile_descriptor(descriptor, tiling)

    payload = {
        "index": tiling.index,
        "coset_reps": [list(rep) for rep in tiling.coset_reps],
        "coarse_internal_dim": coarse.internal_dim,
    }
    if args.sizes:
        sizes = _parse_sizes(args.sizes)
        lattice = evolution.LatticeSpec(
            presentation=descriptor.presentation, sizes=sizes
        )
        rng = np.random.default_rng(args.seed)
        state = evolution.random_state(lattice, descriptor.internal_dim, rng)
        fine = evolution.apply_tiling(evolution.step_direct(state, descriptor), tiling)
        coarse_step = evolution.step_direct(
            evolution.apply_tiling(state, tiling), coarse
        )
        payload["commuting_square_residual"] = float(
            np.max(np.abs(fine.amplitudes - coarse_step.amplitudes))
        )
    _emit_report(payload, args)
    return 0


# --------------------------------------------------------- dirac-search

def _cmd_dirac_search(args):
    variant = weyl.variant_by_name(args.variant)
    report = dirac.uniqueness_probe(
        variant=variant,
        n_seeds=args.samples,
        seed=args.seed,
        n_k_verify=args.k_samples,
        residual_tol=args.tolerance,
    )
    if report["best_nonfamily_residual"] == float("inf"):
        report["best_nonfamily_residual"] = 1.0
    _emit_report(report, args)
    return 0


# ----------------------------------------------------------------- main

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="qca",
        description="Lattice automata on Abelian Cayley graphs: validation, "
        "dispersion, evolution, electromagnetic checks, tiling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="emit a canonical graph presentation")
    p.add_argument("--kind", required=True, choices=["line", "square_2d", "bcc_3d"])
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("validate", help="check unitarity and covariance residuals")
    p.add_argument("--builtin", default=None, choices=list(catalog.builtin_names()))
    p.add_argument("--descriptor", default=None)
    p.add_argument("--mass", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("dispersion", help="sweep eigenphases over a zone grid")
    p.add_argument("--variant", required=True, choices=list(catalog.WEYL_NAMES))
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--dirac", action="store_true")
    p.add_argument("--mass", type=float, default=0.1)
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--emit", default="csv", choices=["csv", "json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("evolve", help="evolve a wave packet and record observables")
    p.add_argument("--builtin", default=None, choices=list(catalog.builtin_names()))
    p.add_argument("--descriptor", default=None)
    p.add_argument("--mass", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--sizes", required=True)
    p.add_argument("--packet", required=True,
                   help="k0=..;sigma=..;x0=..;branch=plus|minus")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--record-every", type=int, default=0)
    p.add_argument("--snapshot", default=None)
    p.add_argument("--observables", default=None)
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("maxwell", help="transverse-field dynamics residuals")
    p.add_argument("--k", required=True)
    p.add_argument("--time", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--variant", default="bcc-a-plus",
                   choices=[n for n in catalog.WEYL_NAMES if n.startswith("bcc")])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_maxwell)

    p = sub.add_parser("fock", help="pair-operator commutator deviations")
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--fill", type=int, default=1)
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_fock)

    p = sub.add_parser("tile", help="regroup an automaton on a sublattice")
    p.add_argument("--builtin", default=None, choices=list(catalog.builtin_names()))
    p.add_argument("--descriptor", default=None)
    p.add_argument("--mass", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--basis", required=True, help="e.g. '2' or '2,0;0,2'")
    p.add_argument("--sizes", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_tile)

    p = sub.add_parser("dirac-search",
                       help="randomized probe for couplings outside the mass family")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-samples", type=int, default=50)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--variant", default="bcc-a-plus",
                   choices=list(catalog.WEYL_NAMES))
    p.add_argument("--emit", default="json", choices=["json"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_dirac_search)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (QcaError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
