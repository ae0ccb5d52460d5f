"""HTTP service for the viewer: stateless recomputation over a fixed scene.

Every request is a pure function of the base scene and the posted
parameters; the server never mutates the loaded document, so identical
requests produce byte-identical responses and concurrent requests are safe.
"""

from __future__ import annotations

import json
import math
import mimetypes
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from . import scene
from .errors import GeometryError
from .mesh import sample_patch
from .nets import cyclidic_cube, patch_in_between, propagate_frames

DEFAULT_RES = 12


def _mesh_payload(mesh) -> dict:
    return {
        "positions": mesh.positions.tolist(),
        "normals": mesh.normals.tolist(),
        "params": mesh.params.tolist(),
        "quads": mesh.quads.tolist(),
        "groups": list(mesh.group_names),
        "quad_groups": mesh.quad_groups.tolist(),
        "warnings": list(mesh.warnings),
    }


def _rotation_matrix(spec) -> np.ndarray:
    if isinstance(spec, dict):
        axis = np.asarray(spec["axis"], float)
        angle = float(spec["angle"])
        n = np.linalg.norm(axis)
        if n == 0:
            raise ValueError("rotation axis must be nonzero")
        axis = axis / n
        k = np.array(
            [[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]
        )
        return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)
    rot = np.asarray(spec, float)
    if rot.shape != (3, 3):
        raise ValueError("rotation must be an axis-angle object or a 3x3 matrix")
    if np.max(np.abs(rot @ rot.T - np.eye(3))) > 1e-6:
        raise ValueError("rotation matrix is not orthogonal")
    return rot


class SceneApp:
    """Pure request handlers over an immutable base scene document."""

    def __init__(self, doc):
        self.doc = doc
        self.cnet = scene.scene_cnet(doc)
        self.half_lines = doc.get("half_lines") is not None

    # each handler returns (status, payload dict)

    def get_scene(self):
        return 200, self.doc

    def get_validate(self):
        cnet, patches = scene.scene_patches(self.doc)
        tracker = scene.scene_tracker(self.doc)
        return 200, scene.validation_report(cnet, patches, tracker=tracker)

    def post_frame(self, body):
        try:
            rot = _rotation_matrix(body["rotation"])
            z0 = tuple(int(v) for v in body.get("z0", self.cnet.seed_index or (0,) * self.cnet.m))
        except (KeyError, TypeError, ValueError) as exc:
            return 400, {"error": str(exc)}
        seed = self.cnet.seed_index or (0,) * self.cnet.m
        base_tangents = self.cnet.tangents[tuple(z0)]
        rotated = base_tangents @ rot.T
        try:
            cnet = propagate_frames(self.cnet.net, z0, rotated)
            rebuilt = scene.build_scene(cnet, half_lines=self.half_lines)
        except GeometryError as exc:
            return 422, {"error": str(exc)}
        return 200, rebuilt

    def post_between(self, body):
        if self.cnet.m != 3:
            return 422, {"error": "scene is not a 3D net"}
        try:
            base = tuple(int(v) for v in body["cube"])
            direction = int(body["dir"])
            s = float(body["s"])
            res = int(body.get("res", DEFAULT_RES))
            if direction not in (0, 1, 2) or not (0.0 <= s <= 1.0):
                raise ValueError("dir must be 0..2 and s in [0,1]")
        except (KeyError, TypeError, ValueError) as exc:
            return 400, {"error": str(exc)}
        try:
            cnet, patches = scene.scene_patches(self.doc)
            cube = cyclidic_cube(cnet, base, patches)
            patch = patch_in_between(cube, direction, s)
            mesh = sample_patch(patch, res, group=f"between_{direction}_{s:.6f}")
        except GeometryError as exc:
            payload = {"error": str(exc)}
            if getattr(exc, "residual", None) is not None:
                payload["residual"] = exc.residual
            return 422, payload
        return 200, {
            "mesh": _mesh_payload(mesh),
            "corners": [np.asarray(p, float).tolist() for p in patch.quad.points()],
        }

    def post_subpatch(self, body):
        try:
            base = tuple(int(v) for v in body["patch"])
            dirs = tuple(int(v) for v in body.get("directions", (0, 1)))
            u0 = float(body["u0"])
            v0 = float(body["v0"])
            res = int(body.get("res", DEFAULT_RES))
        except (KeyError, TypeError, ValueError) as exc:
            return 400, {"error": str(exc)}
        cnet, patches = scene.scene_patches(self.doc)
        patch = patches.get((base, dirs))
        if patch is None:
            return 400, {"error": f"no patch at {base} {dirs}"}
        try:
            sub = patch.subpatch(u0, v0)
            mesh = sample_patch(sub, res, group="subpatch")
        except GeometryError as exc:
            return 422, {"error": str(exc)}
        return 200, {
            "mesh": _mesh_payload(mesh),
            "corners": [np.asarray(p, float).tolist() for p in sub.quad.points()],
        }

    def dispatch(self, method, path, body):
        if method == "GET" and path == "/scene":
            return self.get_scene()
        if method == "GET" and path == "/validate":
            return self.get_validate()
        if method == "POST" and path == "/frame":
            return self.post_frame(body)
        if method == "POST" and path == "/between":
            return self.post_between(body)
        if method == "POST" and path == "/subpatch":
            return self.post_subpatch(body)
        return 404, {"error": f"unknown endpoint {method} {path}"}


def make_handler(app: SceneApp, static_dir=None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _send_json(self, status, payload):
            data = scene.dumps(payload).encode("ascii")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path in ("/scene", "/validate"):
                status, payload = app.dispatch("GET", self.path, None)
                self._send_json(status, payload)
                return
            if static_dir:
                self._send_static()
                return
            self._send_json(404, {"error": "not found"})

        def _send_static(self):
            rel = self.path.lstrip("/") or "index.html"
            full = os.path.realpath(os.path.join(static_dir, rel))
            if not full.startswith(os.path.realpath(static_dir)) or not os.path.isfile(full):
                self._send_json(404, {"error": "not found"})
                return
            ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
            with open(full, "rb") as fh:
                data = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                body = json.loads(raw)
            except json.JSONDecodeError as exc:
                self._send_json(400, {"error": f"invalid JSON body: {exc}"})
                return
            status, payload = app.dispatch("POST", self.path, body)
            self._send_json(status, payload)

    return Handler


def serve(doc, port=8080, static_dir=None, background=False):
    app = SceneApp(doc)
    httpd = ThreadingHTTPServer(("127.0.0.1", port), make_handler(app, static_dir))
    if background:
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        return httpd
    print(f"serving scene on http://127.0.0.1:{port}")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return None
