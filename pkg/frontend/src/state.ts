/** View state: camera-independent UI inputs plus the authoritative scene.
 *
 * The scene document is replaced atomically when a response is acknowledged;
 * nothing in the viewer mutates geometry.
 */

import type { AxisAngle, SceneDocument, Vec3 } from './types.js';

export interface ViewState {
  rotation: AxisAngle; // normalized axis
  betweenS: Record<number, number>; // per direction, in [0,1]
  showFamily: [boolean, boolean, boolean];
  showArcs: boolean;
  showFrames: boolean;
  validationOverlay: boolean;
  selectedPatch: number | null;
}

export function initialViewState(): ViewState {
  return {
    rotation: { axis: [0, 0, 1], angle: 0 },
    betweenS: { 0: 0.5, 1: 0.5, 2: 0.5 },
    showFamily: [true, true, true],
    showArcs: true,
    showFrames: false,
    validationOverlay: false,
    selectedPatch: null,
  };
}

export function normalizeAxis(axis: Vec3): Vec3 {
  const n = Math.hypot(axis[0], axis[1], axis[2]);
  if (n === 0) {
    return [0, 0, 1];
  }
  return [axis[0] / n, axis[1] / n, axis[2] / n];
}

export function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

export function setRotation(state: ViewState, axis: Vec3, angle: number): ViewState {
  return { ...state, rotation: { axis: normalizeAxis(axis), angle } };
}

export function setBetween(state: ViewState, dir: number, s: number): ViewState {
  return { ...state, betweenS: { ...state.betweenS, [dir]: clamp01(s) } };
}

/** Holder for the current scene; replacement is all-or-nothing. */
export class SceneStore {
  private scene: SceneDocument | null = null;
  private listeners: Array<(scene: SceneDocument) => void> = [];
  generation = 0;

  get current(): SceneDocument | null {
    return this.scene;
  }

  replace(scene: SceneDocument): void {
    if (scene.schema !== 'cyclidic-scene/1') {
      throw new Error(`unsupported scene schema: ${scene.schema}`);
    }
    this.scene = scene;
    this.generation += 1;
    for (const listener of this.listeners) {
      listener(scene);
    }
  }

  subscribe(listener: (scene: SceneDocument) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}

/** Patch grouping for per-family coloring: 2D nets alternate a checker by
 * quad index, 3D nets color by the face's normal direction. */
export function patchFamily(m: number, base: number[], directions: number[]): number {
  if (m === 2) {
    return (base[0] + base[1]) % 2;
  }
  const missing = [0, 1, 2].filter((d) => !directions.includes(d));
  return missing.length === 1 ? missing[0] : 0;
}
