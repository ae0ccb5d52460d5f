"""Versioned JSON documents for nets and scenes.

A scene document is self-contained: the circular net, the tangent frames and
the optional half-line points fully determine every patch, so reloading and
resampling reproduces meshes bit for bit.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import nets
from .cyclide import SphericalPatch
from .errors import SchemaMismatch
from .lie import INF, Line3D, is_infinite
from .mesh import merge_meshes, sample_patch
from .nets import (
    CircularNet,
    CyclidicNet,
    HalfLineTracker,
    check_c1_joints,
    frame_loop_residual,
    patches_of_net,
    propagate_half_lines,
    validate_circular,
)

NET_SCHEMA = "cyclidic-net/1"
CNET_SCHEMA = "cyclidic-cnet/1"
SCENE_SCHEMA = "cyclidic-scene/1"


def _require_schema(doc, want):
    got = doc.get("schema")
    if got != want:
        raise SchemaMismatch(f"expected schema '{want}', found '{got}'")


# ---------------------------------------------------------------------------
# nets


def net_to_dict(net: CircularNet) -> dict:
    return {
        "schema": NET_SCHEMA,
        "m": net.m,
        "extents": list(net.extents),
        "vertices": net.vertices.tolist(),
    }


def net_from_dict(doc) -> CircularNet:
    _require_schema(doc, NET_SCHEMA)
    return CircularNet(np.asarray(doc["vertices"], float))


def cnet_to_dict(cnet: CyclidicNet) -> dict:
    return {
        "schema": CNET_SCHEMA,
        "m": cnet.m,
        "extents": list(cnet.net.extents),
        "vertices": cnet.net.vertices.tolist(),
        "tangents": cnet.tangents.tolist(),
        "seed": list(cnet.seed_index) if cnet.seed_index else None,
    }


def cnet_from_dict(doc) -> CyclidicNet:
    _require_schema(doc, CNET_SCHEMA)
    net = CircularNet(np.asarray(doc["vertices"], float))
    seed = tuple(doc["seed"]) if doc.get("seed") else None
    return CyclidicNet(net, np.asarray(doc["tangents"], float), seed_index=seed)


# ---------------------------------------------------------------------------
# half-line trackers


def tracker_to_list(tracker: HalfLineTracker) -> list:
    out = []
    for (base, axis), point in sorted(tracker.points.items()):
        entry = {"base": list(base), "axis": axis}
        if is_infinite(point):
            entry["infinite"] = True
        else:
            entry["point"] = [float(v) for v in point]
        out.append(entry)
    return out


def tracker_from_list(items, seed=None) -> HalfLineTracker:
    tracker = HalfLineTracker(seed_index=tuple(seed) if seed else None)
    for entry in items:
        key = (tuple(entry["base"]), int(entry["axis"]))
        if entry.get("infinite"):
            tracker.points[key] = INF
            tracker.infinite.add(key)
        else:
            tracker.points[key] = np.asarray(entry["point"], float)
    return tracker


# ---------------------------------------------------------------------------
# arcs


def arc_descriptor(patch, edge, samples=9) -> dict:
    """Geometric description of one boundary arc: circle data with start/end
    angles, or a line with endpoints."""
    a = np.asarray(patch.edge_point(edge, 0.0), float)
    m = np.asarray(patch.edge_point(edge, 0.5), float)
    b = np.asarray(patch.edge_point(edge, 1.0), float)
    from . import lie

    carrier = lie.circle_through(a, m, b)
    if isinstance(carrier, Line3D):
        return {"kind": "line", "start": a.tolist(), "end": b.tolist()}
    u0 = a - carrier.center
    u0 = u0 / np.linalg.norm(u0)
    w0 = np.cross(carrier.normal, u0)

    def ang(p):
        d = p - carrier.center
        return math.atan2(float(d @ w0), float(d @ u0))

    th_m, th_b = ang(m), ang(b)
    # orient the angle span so it contains the midpoint sample
    span = th_b % (2 * math.pi)
    if not (0 < (th_m % (2 * math.pi)) < span):
        span = span - 2 * math.pi
    return {
        "kind": "circle",
        "center": carrier.center.tolist(),
        "radius": carrier.radius,
        "normal": carrier.normal.tolist(),
        "start_angle": 0.0,
        "end_angle": span,
        "frame_u": u0.tolist(),
        "start": a.tolist(),
        "end": b.tolist(),
    }


# ---------------------------------------------------------------------------
# scene documents


def patch_record(key, patch) -> dict:
    base, dirs = key
    rec = {
        "base": list(base),
        "directions": list(dirs),
        "kind": patch.kind,
        "corners": [np.asarray(p, float).tolist() for p in patch.quad.points()],
        "singular_parameters": [[fam, float(t)] for fam, t in patch.singular_parameters()],
        "arcs": {edge: arc_descriptor(patch, edge) for edge in ("v0", "v1", "u0", "u1")},
    }
    if isinstance(patch, SphericalPatch):
        from .lie import lift

        rec["support_sphere"] = lift(patch.support).tolist()
    else:
        rec["family1_supports"] = patch.family1.supports.tolist()
        rec["family2_supports"] = patch.family2.supports.tolist()
    return rec


def build_scene(cnet: CyclidicNet, half_lines=False, validate=True) -> dict:
    """Assembles the full scene document from a cyclidic net."""
    tracker = propagate_half_lines(cnet) if half_lines else None
    patches = patches_of_net(cnet, half_lines=tracker)
    doc = {
        "schema": SCENE_SCHEMA,
        "m": cnet.m,
        "extents": list(cnet.net.extents),
        "vertices": cnet.net.vertices.tolist(),
        "tangents": cnet.tangents.tolist(),
        "seed": list(cnet.seed_index) if cnet.seed_index else None,
        "half_lines": tracker_to_list(tracker) if tracker else None,
        "patches": [patch_record(k, p) for k, p in sorted(patches.items())],
        "patch_errors": {str(k): str(e) for k, e in sorted(patches.errors.items())},
    }
    if validate:
        doc["validation"] = validation_report(cnet, patches, tracker=tracker)
    return doc


def scene_cnet(doc) -> CyclidicNet:
    _require_schema(doc, SCENE_SCHEMA)
    net = CircularNet(np.asarray(doc["vertices"], float))
    seed = tuple(doc["seed"]) if doc.get("seed") else None
    return CyclidicNet(net, np.asarray(doc["tangents"], float), seed_index=seed)


def scene_tracker(doc):
    if doc.get("half_lines") is None:
        return None
    return tracker_from_list(doc["half_lines"], seed=doc.get("seed"))


def scene_patches(doc):
    cnet = scene_cnet(doc)
    return cnet, patches_of_net(cnet, half_lines=scene_tracker(doc))


def validation_report(cnet: CyclidicNet, patches=None, tracker=None) -> dict:
    """Every invariant suite, as a JSON-ready summary."""
    if patches is None:
        patches = patches_of_net(cnet, half_lines=tracker)
    circular = validate_circular(cnet.net)
    report = {
        "circular": {"ok": bool(circular.ok), "max_residual": circular.max_residual},
        "frames": {
            "gram_deviation": cnet.gram_deviation(),
            "loop_residual": frame_loop_residual(cnet),
        },
        "patches": {
            "count": len(patches),
            "errors": {str(k): str(e) for k, e in patches.errors.items()},
        },
    }
    corner_worst = 0.0
    for (base, dirs), patch in patches.items():
        for (u, v), corner in zip(((0, 0), (1, 0), (1, 1), (0, 1)), patch.quad.points()):
            p = patch.eval(u, v)
            if is_infinite(p):
                corner_worst = math.inf
                continue
            corner_worst = max(corner_worst, float(np.linalg.norm(p - corner)))
    report["patches"]["max_corner_gap"] = corner_worst
    if cnet.m == 2 and not patches.errors:
        joints = check_c1_joints(cnet, patches)
        report["joints"] = {
            "ok": bool(joints.ok),
            "max_arc_gap": joints.max_arc_gap,
            "max_normal_angle": joints.max_normal_angle,
        }
    if cnet.m == 3 and not patches.errors:
        import itertools as _it

        worst_sphere = 0.0
        for base in _it.product(*[range(n - 1) for n in cnet.net.extents]):
            cube = nets.cyclidic_cube(cnet, base, patches)
            worst_sphere = max(worst_sphere, cube.miquel_residual)
        report["cubes"] = {"max_miquel_residual": worst_sphere}
    if tracker is not None and not patches.errors:
        mismatch, _ = nets.half_line_continuity(cnet, tracker)
        report["half_lines"] = {"max_mismatch": mismatch}
    scale = 1 + cnet.net.diameter()
    report["ok"] = bool(
        report["circular"]["ok"]
        and not patches.errors
        and report["frames"]["loop_residual"] <= 1e-9 * scale
        and report["patches"]["max_corner_gap"] <= 1e-8 * scale
        and report.get("joints", {}).get("ok", True)
        and report.get("cubes", {}).get("max_miquel_residual", 0.0) <= 1e-7 * scale
        and report.get("half_lines", {}).get("max_mismatch", 0.0) <= 1e-8 * scale
    )
    return report


def sample_scene(doc, res: int):
    """Meshes of every patch at the given resolution, merged with one group
    per patch (row-major per patch, patches in lexicographic order)."""
    cnet, patches = scene_patches(doc)
    meshes = []
    for key in sorted(patches):
        base, dirs = key
        name = "patch_" + "_".join(str(v) for v in base)
        if cnet.m == 3:
            name += f"_d{dirs[0]}{dirs[1]}"
        meshes.append(sample_patch(patches[key], res, group=name))
    return merge_meshes(meshes)


# ---------------------------------------------------------------------------
# files


def _canon(obj):
    # normalize -0.0 to 0.0 so recomputation is byte-identical
    if isinstance(obj, float):
        return obj + 0.0
    if isinstance(obj, dict):
        return {k: _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def dumps(doc) -> str:
    return json.dumps(_canon(doc), sort_keys=True, separators=(",", ":"))


def save_json(doc, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(doc))
        fh.write("\n")


def load_json(path, schema=None) -> dict:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    if schema is not None:
        _require_schema(doc, schema)
    return doc
