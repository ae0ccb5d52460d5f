/** Conversion of wire payloads into three.js renderables.  Only data
 * reshaping happens here; all geometric computation is server-side. */

import * as THREE from 'three';

import type { Arc, MeshPayload, PatchRecord, Vec3 } from './types.js';

export const FAMILY_COLORS = [0x4e79a7, 0xf28e2b, 0x59a14f];
export const FAIL_COLOR = 0xd62728;

export function meshToGeometry(mesh: MeshPayload): THREE.BufferGeometry {
  const geometry = new THREE.BufferGeometry();
  const positions = new Float32Array(mesh.positions.flat());
  const normals = new Float32Array(mesh.normals.flat());
  geometry.setAttribute('position', new THREE.BufferAttribute(positions, 3));
  geometry.setAttribute('normal', new THREE.BufferAttribute(normals, 3));
  const index: number[] = [];
  for (const quad of mesh.quads) {
    index.push(quad[0], quad[1], quad[2], quad[0], quad[2], quad[3]);
  }
  geometry.setIndex(index);
  return geometry;
}

/** Polyline samples of a boundary arc descriptor. */
export function arcPoints(arc: Arc, segments = 32): Vec3[] {
  if (arc.kind === 'line') {
    return [arc.start, arc.end];
  }
  const center = new THREE.Vector3(...arc.center);
  const u = new THREE.Vector3(...arc.frame_u);
  const n = new THREE.Vector3(...arc.normal);
  const w = new THREE.Vector3().crossVectors(n, u);
  const pts: Vec3[] = [];
  for (let k = 0; k <= segments; k++) {
    const th = arc.start_angle + ((arc.end_angle - arc.start_angle) * k) / segments;
    const p = center
      .clone()
      .addScaledVector(u, arc.radius * Math.cos(th))
      .addScaledVector(w, arc.radius * Math.sin(th));
    pts.push([p.x, p.y, p.z]);
  }
  return pts;
}

export function arcLine(arc: Arc, color: number): THREE.Line {
  const pts = arcPoints(arc).map((p) => new THREE.Vector3(...p));
  const geometry = new THREE.BufferGeometry().setFromPoints(pts);
  return new THREE.Line(geometry, new THREE.LineBasicMaterial({ color }));
}

/** Axis triad showing a vertex frame (t1 red-ish, t2 green-ish, n blue). */
export function frameTriad(origin: Vec3, tangents: number[][], size: number): THREE.Group {
  const group = new THREE.Group();
  const colors = [0xcc3333, 0x33aa33, 0x3333cc];
  const o = new THREE.Vector3(...origin);
  tangents.forEach((t, k) => {
    const dir = new THREE.Vector3(t[0], t[1], t[2]);
    group.add(new THREE.ArrowHelper(dir, o, size, colors[k % 3]));
  });
  return group;
}

/** Centroid and radius of the scene's patch corners, for camera framing. */
export function sceneBounds(patches: PatchRecord[]): { center: Vec3; radius: number } {
  const box = new THREE.Box3();
  for (const patch of patches) {
    for (const corner of patch.corners) {
      box.expandByPoint(new THREE.Vector3(...corner));
    }
  }
  const center = new THREE.Vector3();
  box.getCenter(center);
  const size = new THREE.Vector3();
  box.getSize(size);
  return { center: [center.x, center.y, center.z], radius: Math.max(size.length() / 2, 1) };
}
