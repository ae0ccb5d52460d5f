/** Minimal orbit control: drag to orbit, wheel to dolly.  The only geometry
 * the viewer computes itself is this camera transform. */

import * as THREE from 'three';

export class OrbitControl {
  private theta = 0.8;
  private phi = 1.1;
  private radius = 8;
  target = new THREE.Vector3();
  private dragging = false;
  private lastX = 0;
  private lastY = 0;

  constructor(private camera: THREE.PerspectiveCamera, element: HTMLElement) {
    element.addEventListener('pointerdown', (ev) => {
      this.dragging = true;
      this.lastX = ev.clientX;
      this.lastY = ev.clientY;
      element.setPointerCapture(ev.pointerId);
    });
    element.addEventListener('pointerup', () => {
      this.dragging = false;
    });
    element.addEventListener('pointermove', (ev) => {
      if (!this.dragging) {
        return;
      }
      this.theta -= (ev.clientX - this.lastX) * 0.006;
      this.phi = Math.min(Math.PI - 0.05, Math.max(0.05, this.phi - (ev.clientY - this.lastY) * 0.006));
      this.lastX = ev.clientX;
      this.lastY = ev.clientY;
      this.apply();
    });
    element.addEventListener(
      'wheel',
      (ev) => {
        ev.preventDefault();
        this.radius *= Math.exp(ev.deltaY * 0.001);
        this.apply();
      },
      { passive: false },
    );
  }

  frame(center: THREE.Vector3, radius: number): void {
    this.target.copy(center);
    this.radius = radius * 2.8;
    this.apply();
  }

  apply(): void {
    const x = this.radius * Math.sin(this.phi) * Math.cos(this.theta);
    const y = this.radius * Math.sin(this.phi) * Math.sin(this.theta);
    const z = this.radius * Math.cos(this.phi);
    this.camera.position.set(this.target.x + x, this.target.y + y, this.target.z + z);
    this.camera.lookAt(this.target);
  }
}
