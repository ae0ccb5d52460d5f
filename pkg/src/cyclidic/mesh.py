"""Quad meshes sampled from patches, and the text exporter."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfinitySample
from .lie import is_infinite


@dataclass
class QuadMesh:
    """Sampled patch grid: positions, unit normals, quad faces, grouping."""

    positions: np.ndarray  # (N, 3)
    normals: np.ndarray  # (N, 3)
    params: np.ndarray  # (N, 2) sampling parameters (t1, t2)
    quads: np.ndarray  # (M, 4) vertex indices
    quad_groups: np.ndarray  # (M,) group index
    group_names: list
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, float)
        self.normals = np.asarray(self.normals, float)
        self.params = np.asarray(self.params, float)
        self.quads = np.asarray(self.quads, int)
        self.quad_groups = np.asarray(self.quad_groups, int)
        if len(self.quads) and self.quads.max() >= len(self.positions):
            raise ValueError("quad index out of range")

    @property
    def n_vertices(self):
        return len(self.positions)

    @property
    def n_quads(self):
        return len(self.quads)


def sample_patch(patch, res: int, group="patch_0_0") -> QuadMesh:
    """Uniform (res+1)^2 sampling of a patch with contact-element normals.

    Corner samples are snapped to the exact patch vertices.  A sample at
    infinity aborts with its parameter location; singular parameters inside
    the domain are attached as warnings.
    """
    if res < 2:
        raise ValueError("sampling resolution must be at least 2")
    ts = np.linspace(0.0, 1.0, res + 1)
    n = (res + 1) * (res + 1)
    positions = np.empty((n, 3))
    normals = np.empty((n, 3))
    params = np.empty((n, 2))
    for a, u in enumerate(ts):
        for b, v in enumerate(ts):
            p = patch.eval(u, v)
            if is_infinite(p):
                raise InfinitySample(
                    f"patch sample at infinity at (t1,t2)=({u:.4f},{v:.4f})",
                    parameters=(u, v),
                )
            k = a * (res + 1) + b
            positions[k] = p
            normals[k] = patch.normal(u, v)
            params[k] = (u, v)
    corners = {(0, 0): patch.quad.x, (res, 0): patch.quad.x1,
               (res, res): patch.quad.x12, (0, res): patch.quad.x2}
    for (a, b), exact in corners.items():
        positions[a * (res + 1) + b] = exact

    quads = []
    for a in range(res):
        for b in range(res):
            k = a * (res + 1) + b
            quads.append((k, k + res + 1, k + res + 2, k + 1))
    mesh = QuadMesh(
        positions, normals, params, np.array(quads), np.zeros(len(quads), int), [group]
    )
    singular = patch.singular_parameters()
    if singular:
        mesh.warnings.append(f"singular parameters {singular}")
    return mesh


def merge_meshes(meshes) -> QuadMesh:
    """Concatenates meshes, keeping one group per input mesh."""
    positions, normals, params, quads, qgroups, names, warnings = [], [], [], [], [], [], []
    offset = 0
    for mesh in meshes:
        positions.append(mesh.positions)
        normals.append(mesh.normals)
        params.append(mesh.params)
        quads.append(mesh.quads + offset)
        qgroups.append(mesh.quad_groups + len(names))
        names.extend(mesh.group_names)
        warnings.extend(mesh.warnings)
        offset += mesh.n_vertices
    return QuadMesh(
        np.vstack(positions),
        np.vstack(normals),
        np.vstack(params),
        np.vstack(quads),
        np.concatenate(qgroups),
        names,
        warnings,
    )


def _fmt(x: float) -> str:
    # 9 significant digits: below the test tolerances, above float32 noise
    return format(float(x), ".9g")


def export_obj(mesh: QuadMesh, path) -> None:
    """Deterministic text export: v/vn records, quad faces with normal
    indices, one group per patch."""
    lines = []
    for p in mesh.positions:
        lines.append(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    for n in mesh.normals:
        lines.append(f"vn {_fmt(n[0])} {_fmt(n[1])} {_fmt(n[2])}")
    current = -1
    for q, g in zip(mesh.quads, mesh.quad_groups):
        if g != current:
            lines.append(f"g {mesh.group_names[g]}")
            current = g
        ids = " ".join(f"{k + 1}//{k + 1}" for k in q)
        lines.append(f"f {ids}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def parse_obj(path):
    """Reads back positions/normals/faces (testing aid)."""
    vs, ns, fs, gs = [], [], [], []
    group = None
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vs.append([float(x) for x in parts[1:4]])
            elif parts[0] == "vn":
                ns.append([float(x) for x in parts[1:4]])
            elif parts[0] == "g":
                group = parts[1]
                gs.append(group)
            elif parts[0] == "f":
                fs.append([int(tok.split("/")[0]) - 1 for tok in parts[1:]])
    return np.array(vs), np.array(ns), np.array(fs, int), gs
