/** three.js scene assembly for a cyclidic scene document. */

import * as THREE from 'three';

import { FAIL_COLOR, FAMILY_COLORS, arcLine, frameTriad, meshToGeometry, sceneBounds } from './geometry.js';
import { patchFamily, type ViewState } from './state.js';
import type { BetweenResponse, MeshPayload, PatchRecord, SceneDocument } from './types.js';

export interface RenderedScene {
  root: THREE.Group;
  patchGroups: Map<string, THREE.Group>;
}

function patchKey(rec: PatchRecord): string {
  return `${rec.base.join(',')}|${rec.directions.join(',')}`;
}

export class SceneRenderer {
  readonly root = new THREE.Group();
  private patchLayer = new THREE.Group();
  private arcLayer = new THREE.Group();
  private frameLayer = new THREE.Group();
  private betweenLayer = new THREE.Group();

  constructor(three: THREE.Scene) {
    this.root.add(this.patchLayer, this.arcLayer, this.frameLayer, this.betweenLayer);
    three.add(this.root);
  }

  /** Rebuilds all layers from scratch; the previous scene is dropped whole. */
  update(scene: SceneDocument, meshes: Map<string, MeshPayload>, view: ViewState): void {
    this.patchLayer.clear();
    this.arcLayer.clear();
    this.frameLayer.clear();
    const failing = new Set(Object.keys(scene.patch_errors));
    const jointsOk = scene.validation?.joints?.ok ?? true;
    for (const rec of scene.patches) {
      const family = patchFamily(scene.m, rec.base, rec.directions);
      if (!view.showFamily[family]) {
        continue;
      }
      let color = FAMILY_COLORS[family % FAMILY_COLORS.length];
      if (view.validationOverlay && (!jointsOk || failing.size > 0)) {
        color = FAIL_COLOR;
      }
      const payload = meshes.get(patchKey(rec));
      if (payload) {
        const material = new THREE.MeshStandardMaterial({
          color,
          side: THREE.DoubleSide,
          flatShading: false,
        });
        this.patchLayer.add(new THREE.Mesh(meshToGeometry(payload), material));
      }
      if (view.showArcs) {
        for (const arc of Object.values(rec.arcs)) {
          this.arcLayer.add(arcLine(arc, 0x222222));
        }
      }
      if (rec.singular_parameters.length > 0 && view.showArcs) {
        for (const corner of rec.corners) {
          const marker = new THREE.Mesh(
            new THREE.SphereGeometry(0.02),
            new THREE.MeshBasicMaterial({ color: FAIL_COLOR }),
          );
          marker.position.set(...corner);
          this.arcLayer.add(marker);
        }
      }
    }
    if (view.showFrames) {
      const tangents = scene.tangents as number[][][] | number[][][][];
      const vertices = scene.vertices as number[][][] | number[][][][];
      const { radius } = sceneBounds(scene.patches);
      this.addFrames(vertices, tangents, radius * 0.08);
    }
  }

  private addFrames(vertices: unknown, tangents: unknown, size: number): void {
    // vertex arrays are nested per grid axis; a leaf is a plain 3-vector
    const walk = (v: unknown, t: unknown): void => {
      if (Array.isArray(v) && typeof v[0] === 'number') {
        this.frameLayer.add(frameTriad(v as [number, number, number], t as number[][], size));
        return;
      }
      if (Array.isArray(v) && Array.isArray(t)) {
        (v as unknown[]).forEach((vv, k) => walk(vv, (t as unknown[])[k]));
      }
    };
    walk(vertices, tangents);
  }

  showBetween(response: BetweenResponse | null): void {
    this.betweenLayer.clear();
    if (!response) {
      return;
    }
    const material = new THREE.MeshStandardMaterial({
      color: 0xaa66cc,
      side: THREE.DoubleSide,
      transparent: true,
      opacity: 0.92,
    });
    this.betweenLayer.add(new THREE.Mesh(meshToGeometry(response.mesh), material));
  }
}

export function frameCamera(camera: THREE.PerspectiveCamera, scene: SceneDocument): void {
  const { center, radius } = sceneBounds(scene.patches);
  camera.position.set(center[0] + radius * 2.2, center[1] - radius * 2.2, center[2] + radius * 1.6);
  camera.lookAt(new THREE.Vector3(...center));
  camera.near = radius / 100;
  camera.far = radius * 50;
  camera.updateProjectionMatrix();
}
