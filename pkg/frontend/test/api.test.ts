import { describe, expect, it } from 'vitest';

import { ApiError, SceneApi } from '../src/api.js';

function fakeFetch(routes: Record<string, { status: number; body: unknown }>) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fn = (async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    const route = routes[url.replace(/^https?:\/\/[^/]+/, '')] ?? routes[url];
    if (!route) {
      return new Response(JSON.stringify({ error: 'not found' }), { status: 404 });
    }
    return new Response(JSON.stringify(route.body), { status: route.status });
  }) as typeof fetch;
  return { fn, calls };
}

describe('SceneApi', () => {
  it('fetches the scene document', async () => {
    const { fn } = fakeFetch({ '/scene': { status: 200, body: { schema: 'cyclidic-scene/1' } } });
    const api = new SceneApi('', fn);
    const scene = await api.getScene();
    expect(scene.schema).toBe('cyclidic-scene/1');
  });

  it('posts frame rotations as JSON', async () => {
    const { fn, calls } = fakeFetch({ '/frame': { status: 200, body: { schema: 'cyclidic-scene/1' } } });
    const api = new SceneApi('', fn);
    await api.postFrame({ axis: [0, 0, 1], angle: 0.25 });
    expect(calls).toHaveLength(1);
    const sent = JSON.parse(String(calls[0].init?.body));
    expect(sent.rotation.angle).toBe(0.25);
    expect(calls[0].init?.method).toBe('POST');
  });

  it('surfaces geometric rejections with their status', async () => {
    const { fn } = fakeFetch({ '/between': { status: 422, body: { error: 'singular cube' } } });
    const api = new SceneApi('', fn);
    await expect(api.postBetween([0, 0, 0], 1, 0.5)).rejects.toMatchObject({
      status: 422,
      message: 'singular cube',
    });
    await expect(api.postBetween([0, 0, 0], 1, 0.5)).rejects.toBeInstanceOf(ApiError);
  });
});
