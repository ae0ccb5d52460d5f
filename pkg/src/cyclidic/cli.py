"""Command line interface: generate | frames | build | sample | validate |
between | serve."""

from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from . import nets, scene
from .errors import GeometryError, SchemaMismatch
from .mesh import export_obj
from .nets import (
    complete_3d_from_coordinate_planes,
    patch_in_between,
    propagate_frames,
    rotational_net,
    sphere_grid_net,
    spherical_lattice_net,
    torus_sample_net,
)


def _parse_params(text):
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if not item:
            continue
        key, _, value = item.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value.strip()
    return out


def cmd_generate(args):
    params = _parse_params(args.params)
    kind = args.kind
    if kind == "rotational":
        n1 = args.nx or 4
        n2 = args.ny or 6
        if "seed" in params:
            rng = np.random.default_rng(int(params["seed"]))
            net = nets.random_rotational_net(rng, n1, n2)
        else:
            idx = np.arange(n1)
            radii = 2.0 + 0.5 * np.sin(0.7 * idx)
            heights = 0.6 * idx
            net = rotational_net(radii, heights, n2, params.get("step", 0.35))
    elif kind == "sphere-grid":
        net = sphere_grid_net(args.nx or 6, args.ny or 6,
                              params.get("lat0", 0.5), params.get("lat1", 2.2))
    elif kind == "torus-sample":
        net = torus_sample_net(args.nx or 4, args.ny or 4,
                               0.0, params.get("u1", 1.2), 0.0, params.get("v1", 1.2))
    elif kind == "miquel-3d":
        n1 = args.nx or 3
        n2 = args.ny or 3
        n3 = args.nz or 3
        lats = np.linspace(0.5, 1.3, n1)
        lons = np.linspace(0.2, 1.1, n2)
        radii = np.linspace(1.0, 2.0, n3)
        lattice = spherical_lattice_net(radii, lats, lons).vertices
        net = complete_3d_from_coordinate_planes(
            lattice[:, :, 0], lattice[:, 0, :], lattice[0, :, :]
        )
    else:  # pragma: no cover - argparse restricts choices
        raise SystemExit(2)
    scene.save_json(scene.net_to_dict(net), args.output)
    print(f"wrote {args.output}: m={net.m} extents={net.extents}")
    return 0


_SEED_RE = re.compile(r"(\w+)=\(([^)]*)\)")


def _parse_seed(text, m):
    fields = {k: np.array([float(v) for v in vec.split(",")])
              for k, vec in _SEED_RE.findall(text)}
    for key in ("z0", "t1", "t2") + (("t3",) if m == 3 else ()):
        if key not in fields:
            raise SystemExit(2)
    z0 = tuple(int(v) for v in fields["z0"])
    tangents = np.stack([fields[f"t{k}"] for k in range(1, m + 1)])
    norms = np.linalg.norm(tangents, axis=1)
    tangents = tangents / norms[:, None]
    gram = tangents @ tangents.T
    dev = float(np.max(np.abs(gram - np.eye(m))))
    if dev > 1e-6:
        print(f"error: seed frame is not orthonormal (Gram deviation {dev:.3e})",
              file=sys.stderr)
        raise SystemExit(2)
    return z0, tangents


def cmd_frames(args):
    doc = scene.load_json(args.net, schema=scene.NET_SCHEMA)
    net = scene.net_from_dict(doc)
    z0, tangents = _parse_seed(args.seed, net.m)
    cnet = propagate_frames(net, z0, tangents)
    scene.save_json(scene.cnet_to_dict(cnet), args.output)
    print(f"wrote {args.output}: frames propagated from {z0}")
    return 0


def cmd_build(args):
    doc = scene.load_json(args.cnet, schema=scene.CNET_SCHEMA)
    cnet = scene.cnet_from_dict(doc)
    built = scene.build_scene(cnet, half_lines=args.half_lines)
    scene.save_json(built, args.output)
    n_err = len(built["patch_errors"])
    print(f"wrote {args.output}: {len(built['patches'])} patches, {n_err} errors")
    return 0


def cmd_sample(args):
    doc = scene.load_json(args.scene, schema=scene.SCENE_SCHEMA)
    mesh = scene.sample_scene(doc, args.res)
    export_obj(mesh, args.output)
    print(f"wrote {args.output}: {mesh.n_vertices} vertices, {mesh.n_quads} quads")
    for w in mesh.warnings:
        print(f"warning: {w}")
    return 0


def cmd_validate(args):
    doc = scene.load_json(args.scene, schema=scene.SCENE_SCHEMA)
    cnet, patches = scene.scene_patches(doc)
    report = scene.validation_report(cnet, patches, tracker=scene.scene_tracker(doc))
    if args.report:
        scene.save_json({"schema": "cyclidic-report/1", **report}, args.report)
    _print_report(report)
    return 0 if report["ok"] else 1


def _print_report(report):
    rows = [
        ("circular quads ok", report["circular"]["ok"]),
        ("max circularity residual", report["circular"]["max_residual"]),
        ("frame gram deviation", report["frames"]["gram_deviation"]),
        ("frame loop residual", report["frames"]["loop_residual"]),
        ("patch count", report["patches"]["count"]),
        ("patch errors", len(report["patches"]["errors"])),
        ("max corner gap", report["patches"]["max_corner_gap"]),
    ]
    if "joints" in report:
        rows += [
            ("C1 joints ok", report["joints"]["ok"]),
            ("max shared-arc gap", report["joints"]["max_arc_gap"]),
            ("max normal angle", report["joints"]["max_normal_angle"]),
        ]
    if "cubes" in report:
        rows += [("max Miquel residual", report["cubes"]["max_miquel_residual"])]
    if "half_lines" in report:
        rows += [("max half-line mismatch", report["half_lines"]["max_mismatch"])]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        if isinstance(value, float):
            print(f"{name:<{width}}  {value:.3e}")
        else:
            print(f"{name:<{width}}  {value}")
    print("RESULT", "PASS" if report["ok"] else "FAIL")


def cmd_between(args):
    doc = scene.load_json(args.scene, schema=scene.SCENE_SCHEMA)
    cnet, patches = scene.scene_patches(doc)
    if cnet.m != 3:
        print("error: in-between patches need a 3D scene", file=sys.stderr)
        return 2
    base = tuple(int(v) for v in args.cube.split(","))
    cube = nets.cyclidic_cube(cnet, base, patches)
    patch = patch_in_between(cube, args.dir, args.s)
    record = {
        "schema": "cyclidic-patch/1",
        "cube": list(base),
        "direction": args.dir,
        "s": args.s,
        "corners": [np.asarray(p, float).tolist() for p in patch.quad.points()],
        "kind": patch.kind,
    }
    scene.save_json(record, args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_serve(args):
    from .server import serve

    doc = scene.load_json(args.scene, schema=scene.SCENE_SCHEMA)
    serve(doc, port=args.port, static_dir=args.static)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="cyclidic",
                                     description="cyclidic net construction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an exactly circular net")
    p.add_argument("--kind", required=True,
                   choices=["rotational", "sphere-grid", "torus-sample", "miquel-3d"])
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--params", default="")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("frames", help="propagate a seed frame over a net")
    p.add_argument("--net", required=True)
    p.add_argument("--seed", required=True,
                   help='e.g. "z0=(0,0);t1=(1,0,0);t2=(0,1,0)"')
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("build", help="build the patch scene of a cyclidic net")
    p.add_argument("--cnet", required=True)
    p.add_argument("--half-lines", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sample", help="sample every patch into a quad mesh")
    p.add_argument("--scene", required=True)
    p.add_argument("--res", type=int, default=16)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("validate", help="run every invariant suite")
    p.add_argument("--scene", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("between", help="in-between coordinate patch of a cube")
    p.add_argument("--scene", required=True)
    p.add_argument("--cube", required=True, help="i,j,k")
    p.add_argument("--dir", type=int, required=True, choices=[0, 1, 2])
    p.add_argument("--s", type=float, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_between)

    p = sub.add_parser("serve", help="serve the scene over HTTP")
    p.add_argument("--scene", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--static")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
