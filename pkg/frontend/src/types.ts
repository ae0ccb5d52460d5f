/** Wire types of the scene service (mirrors the cyclidic-scene/1 schema). */

export type Vec3 = [number, number, number];

export interface ArcCircle {
  kind: 'circle';
  center: Vec3;
  radius: number;
  normal: Vec3;
  start_angle: number;
  end_angle: number;
  frame_u: Vec3;
  start: Vec3;
  end: Vec3;
}

export interface ArcLine {
  kind: 'line';
  start: Vec3;
  end: Vec3;
}

export type Arc = ArcCircle | ArcLine;

export interface PatchRecord {
  base: number[];
  directions: number[];
  kind: 'generic' | 'spherical';
  corners: Vec3[];
  singular_parameters: [number, number][];
  arcs: Record<'v0' | 'v1' | 'u0' | 'u1', Arc>;
}

export interface SceneDocument {
  schema: string;
  m: number;
  extents: number[];
  vertices: unknown;
  tangents: unknown;
  seed: number[] | null;
  half_lines: unknown;
  patches: PatchRecord[];
  patch_errors: Record<string, string>;
  validation?: {
    ok: boolean;
    joints?: { ok: boolean; max_arc_gap: number; max_normal_angle: number };
  };
}

export interface MeshPayload {
  positions: number[][];
  normals: number[][];
  params: number[][];
  quads: number[][];
  groups: string[];
  quad_groups: number[];
  warnings: string[];
}

export interface BetweenResponse {
  mesh: MeshPayload;
  corners: Vec3[];
}

export interface AxisAngle {
  axis: Vec3;
  angle: number;
}
