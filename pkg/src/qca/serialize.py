"""JSON document schemas and the binary state-snapshot format.

All emitted JSON renders floats at 17 significant digits with sorted keys,
so identical inputs produce byte-identical documents.  Snapshots use a
fixed little-endian layout: magic "QCAS", version, dimension, sizes,
internal dimension, time, then complex amplitudes with the internal index
fastest.
"""

import struct

import numpy as np

from .automaton import AutomatonDescriptor, IsotropyGroup, TransitionRule
from .cayley import BrillouinZone, CayleyPresentation, Generator
from .evolution import FieldState, LatticeSpec

SCHEMA_VERSION = 1
SNAPSHOT_MAGIC = b"QCAS"
SNAPSHOT_VERSION = 1


def _format_float(x):
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite value in a report")
    return format(float(x), ".17g")


def dumps_stable(obj, indent=0):
    """Deterministic JSON with fixed float formatting and sorted keys."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_format_float(obj.real)},{_format_float(obj.imag)}]"
    if isinstance(obj, np.ndarray):
        return dumps_stable(obj.tolist(), indent)
    if isinstance(obj, dict):
        items = ",".join(
            f'{dumps_stable(str(key))}:{dumps_stable(value, indent)}'
            for key, value in sorted(obj.items(), key=lambda kv: str(kv[0]))
        )
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_stable(v, indent) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def report_document(payload):
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(payload)
    return dumps_stable(doc) + "\n"


def _matrix_to_json(m):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def presentation_to_dict(presentation):
    return {
        "dimension": presentation.dimension,
        "generators": [
            {"label": g.label, "displacement": list(g.displacement)}
            for g in presentation.generators_plus
        ],
        "relators": [list(r) for r in presentation.relators],
        "free_basis": list(presentation.free_basis),
        "zone": {
            "kind": presentation.bz.kind,
            "bounds": [
                {"normal": list(normal), "bound": c} for normal, c in presentation.bz.bounds
            ],
        },
        "kind": presentation.kind,
    }


def presentation_from_dict(doc):
    gens = tuple(
        Generator(
            label=g["label"],
            displacement=tuple(float(v) for v in g["displacement"]),
            inverse_label=g.get("inverse_label", g["label"] + "^-1"),
        )
        for g in doc["generators"]
    )
    zone = BrillouinZone(
        kind=doc["zone"]["kind"],
        bounds=tuple(
            (tuple(float(v) for v in b["normal"]), float(b["bound"]))
            for b in doc["zone"]["bounds"]
        ),
    )
    pres = CayleyPresentation(
        dimension=int(doc["dimension"]),
        generators_plus=gens,
        relators=tuple(tuple(int(v) for v in r) for r in doc["relators"]),
        free_basis=tuple(doc["free_basis"]),
        bz=zone,
        kind=doc.get("kind", "custom"),
    )
    pres.check_invariants()
    return pres


def descriptor_to_dict(descriptor):
    doc = {
        "presentation": presentation_to_dict(descriptor.presentation),
        "internal_dim": descriptor.internal_dim,
        "matrices": {
            label: _matrix_to_json(block)
            for label, block in descriptor.rule.entries.items()
        },
        "name": descriptor.name,
    }
    if descriptor.isotropy is not None:
        doc["isotropy"] = {
            "elements": [
                {"permutation": dict(perm), "unitary": _matrix_to_json(u)}
                for perm, u in descriptor.isotropy.elements
            ]
        }
    return doc


def descriptor_from_dict(doc):
    presentation = presentation_from_dict(doc["presentation"])
    rule = TransitionRule(
        entries={label: _matrix_from_json(rows) for label, rows in doc["matrices"].items()},
        internal_dim=int(doc["internal_dim"]),
    )
    isotropy = None
    if doc.get("isotropy"):
        isotropy = IsotropyGroup(
            elements=tuple(
                (dict(e["permutation"]), _matrix_from_json(e["unitary"]))
                for e in doc["isotropy"]["elements"]
            )
        )
    return AutomatonDescriptor(
        presentation=presentation,
        rule=rule,
        isotropy=isotropy,
        name=doc.get("name", ""),
    )


def save_snapshot(state, path):
    """Write the fixed little-endian snapshot layout."""
    sizes = state.lattice.sizes
    header = SNAPSHOT_MAGIC
    header += struct.pack("<I", SNAPSHOT_VERSION)
    header += struct.pack("<I", len(sizes))
    header += struct.pack(f"<{len(sizes)}I", *sizes)
    header += struct.pack("<I", state.internal_dim)
    header += struct.pack("<q", state.time)
    body = np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def load_snapshot(path, presentation):
    """Read a snapshot back onto a lattice over the given presentation."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != SNAPSHOT_MAGIC:
        raise ValueError("not a state snapshot (bad magic)")
    offset = 4
    version, = struct.unpack_from("<I", raw, offset)
    offset += 4
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    d, = struct.unpack_from("<I", raw, offset)
    offset += 4
    sizes = struct.unpack_from(f"<{d}I", raw, offset)
    offset += 4 * d
    s, = struct.unpack_from("<I", raw, offset)
    offset += 4
    time, = struct.unpack_from("<q", raw, offset)
    offset += 8
    count = int(np.prod(sizes)) * s
    amps = np.frombuffer(raw, dtype="<c16", count=count, offset=offset)
    amps = amps.reshape(tuple(sizes) + (s,)).astype(complex)
    lattice = LatticeSpec(presentation=presentation, sizes=tuple(int(v) for v in sizes))
    return FieldState(lattice=lattice, internal_dim=int(s), amplitudes=amps, time=int(time))


def load_descriptor(path):
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return descriptor_from_dict(json.load(fh))


def save_descriptor(descriptor, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_document(descriptor_to_dict(descriptor)))
