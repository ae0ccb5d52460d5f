/** Viewer entry point: loads the scene, wires the controls and keeps every
 * displayed mesh in sync with the latest acknowledged server response. */

import * as THREE from 'three';

import { SceneApi } from './api.js';
import { OrbitControl } from './camera.js';
import { DebouncedRequester } from './debounce.js';
import { sceneBounds } from './geometry.js';
import { SceneRenderer } from './render.js';
import { SceneStore, initialViewState, setBetween, setRotation } from './state.js';
import type { AxisAngle, MeshPayload, SceneDocument } from './types.js';

const api = new SceneApi('');
const store = new SceneStore();
let view = initialViewState();

const canvas = document.getElementById('view') as HTMLCanvasElement;
const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
const threeScene = new THREE.Scene();
threeScene.background = new THREE.Color(0xf4f4f0);
const camera = new THREE.PerspectiveCamera(45, 1, 0.01, 100);
const orbit = new OrbitControl(camera, canvas);
threeScene.add(new THREE.AmbientLight(0xffffff, 0.55));
const sun = new THREE.DirectionalLight(0xffffff, 1.2);
sun.position.set(4, -6, 8);
threeScene.add(sun);
const view3d = new SceneRenderer(threeScene);

function resize(): void {
  const w = canvas.clientWidth || canvas.parentElement!.clientWidth;
  const h = canvas.clientHeight || canvas.parentElement!.clientHeight;
  renderer.setSize(w, h, false);
  camera.aspect = w / h;
  camera.updateProjectionMatrix();
}
window.addEventListener('resize', resize);

function animate(): void {
  requestAnimationFrame(animate);
  renderer.render(threeScene, camera);
}

/** Sampled meshes are not part of the scene document; fetch them per patch
 * through the subpatch endpoint with the full domain. */
async function sampleAll(scene: SceneDocument): Promise<Map<string, MeshPayload>> {
  const out = new Map<string, MeshPayload>();
  for (const rec of scene.patches) {
    const key = `${rec.base.join(',')}|${rec.directions.join(',')}`;
    const resp = await api.postSubpatch(rec.base, rec.directions, 1.0, 1.0);
    out.set(key, resp.mesh);
  }
  return out;
}

async function refresh(scene: SceneDocument): Promise<void> {
  const meshes = await sampleAll(scene);
  view3d.update(scene, meshes, view);
}

store.subscribe((scene) => {
  void refresh(scene);
});

const frameRequester = new DebouncedRequester<AxisAngle, SceneDocument>(
  (rotation) => api.postFrame(rotation),
  (scene) => store.replace(scene),
  120,
);

const betweenRequester = new DebouncedRequester<{ dir: number; s: number }, unknown>(
  ({ dir, s }) => api.postBetween([0, 0, 0], dir, s),
  (resp) => view3d.showBetween(resp as never),
  120,
);

function bindSlider(id: string, handler: (value: number) => void): void {
  const el = document.getElementById(id) as HTMLInputElement | null;
  if (el) {
    el.addEventListener('input', () => handler(parseFloat(el.value)));
  }
}

bindSlider('rot-angle', (angle) => {
  view = setRotation(view, view.rotation.axis, angle);
  frameRequester.request(view.rotation);
});
for (const [id, axis] of [
  ['axis-x', [1, 0, 0]],
  ['axis-y', [0, 1, 0]],
  ['axis-z', [0, 0, 1]],
] as const) {
  const el = document.getElementById(id);
  if (el) {
    el.addEventListener('click', () => {
      view = setRotation(view, [...axis] as [number, number, number], view.rotation.angle);
      frameRequester.request(view.rotation);
    });
  }
}
for (const dir of [0, 1, 2]) {
  bindSlider(`between-${dir}`, (s) => {
    view = setBetween(view, dir, s);
    betweenRequester.request({ dir, s: view.betweenS[dir] });
  });
}
for (const [id, key] of [
  ['family-0', 0],
  ['family-1', 1],
  ['family-2', 2],
] as const) {
  const el = document.getElementById(id) as HTMLInputElement | null;
  if (el) {
    el.addEventListener('change', () => {
      view.showFamily[key] = el.checked;
      const scene = store.current;
      if (scene) {
        void refresh(scene);
      }
    });
  }
}
const overlay = document.getElementById('validation-overlay') as HTMLInputElement | null;
if (overlay) {
  overlay.addEventListener('change', () => {
    view.validationOverlay = overlay.checked;
    const scene = store.current;
    if (scene) {
      void refresh(scene);
    }
  });
}

async function boot(): Promise<void> {
  const scene = await api.getScene();
  store.replace(scene);
  const { center, radius } = sceneBounds(scene.patches);
  orbit.frame(new THREE.Vector3(...center), radius);
  const status = document.getElementById('status');
  if (status) {
    const patchCount = scene.patches.length;
    const ok = scene.validation?.ok;
    status.textContent = `m=${scene.m} patches=${patchCount} validation=${ok ? 'ok' : 'CHECK'}`;
  }
  resize();
  animate();
}

void boot();
