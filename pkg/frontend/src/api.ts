/** Thin HTTP client for the scene service; every answer is recomputed
 * server-side from the base net, the viewer never does geometry. */

import type { AxisAngle, BetweenResponse, SceneDocument } from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  const body = await resp.json();
  if (!resp.ok) {
    throw new ApiError(resp.status, body?.error ?? `HTTP ${resp.status}`);
  }
  return body as T;
}

export class SceneApi {
  constructor(
    private base: string = '',
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  getScene(): Promise<SceneDocument> {
    return this.fetchFn(`${this.base}/scene`).then((r) => asJson<SceneDocument>(r));
  }

  getValidation(): Promise<{ ok: boolean }> {
    return this.fetchFn(`${this.base}/validate`).then((r) => asJson<{ ok: boolean }>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(`${this.base}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    }).then((r) => asJson<T>(r));
  }

  postFrame(rotation: AxisAngle, z0?: number[]): Promise<SceneDocument> {
    return this.post('/frame', z0 ? { rotation, z0 } : { rotation });
  }

  postBetween(cube: number[], dir: number, s: number, res = 12): Promise<BetweenResponse> {
    return this.post('/between', { cube, dir, s, res });
  }

  postSubpatch(patch: number[], directions: number[], u0: number, v0: number): Promise<BetweenResponse> {
    return this.post('/subpatch', { patch, directions, u0, v0 });
  }
}
