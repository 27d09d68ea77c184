/** Camera presets and world-to-screen projection for the skeleton view.
 *
 * front / side / top are deterministic axis-aligned orthographic views of
 * the Y-up world; free-orbit keeps whatever yaw/pitch the user dragged to.
 * A view matrix here is the 3x3 rotation applied to world points before
 * the orthographic drop to (x, y).
 */

export type CameraPreset = "front" | "side" | "top" | "orbit";

export interface CameraState {
  preset: CameraPreset;
  /** orbit parameters, preserved across preset switches */
  yawDeg: number;
  pitchDeg: number;
  zoom: number;
}

export const DEFAULT_CAMERA: CameraState = { preset: "front", yawDeg: 30, pitchDeg: 20, zoom: 1 };

type Mat3 = number[]; // row-major, length 9

const IDENTITY: Mat3 = [1, 0, 0, 0, 1, 0, 0, 0, 1];

function rotY(deg: number): Mat3 {
  const r = (deg * Math.PI) / 180;
  const c = Math.cos(r);
  const s = Math.sin(r);
  return [c, 0, s, 0, 1, 0, -s, 0, c];
}

function rotX(deg: number): Mat3 {
  const r = (deg * Math.PI) / 180;
  const c = Math.cos(r);
  const s = Math.sin(r);
  return [1, 0, 0, 0, c, -s, 0, s, c];
}

function matMul(a: Mat3, b: Mat3): Mat3 {
  const out = new Array(9).fill(0);
  for (let i = 0; i < 3; i++)
    for (let j = 0; j < 3; j++)
      for (let k = 0; k < 3; k++) out[3 * i + j] += a[3 * i + k] * b[3 * k + j];
  return out;
}

/** The world rotation for a camera state; presets are fixed matrices. */
export function viewMatrix(camera: CameraState): Mat3 {
  switch (camera.preset) {
    case "front":
      // looking along -z: world x right, world y up
      return IDENTITY;
    case "side":
      // looking along -x: world z right, world y up
      return rotY(90);
    case "top":
      // looking along -y: world x right, world z down-screen
      return rotX(-90);
    case "orbit":
      return matMul(rotX(camera.pitchDeg), rotY(camera.yawDeg));
  }
}

export function applyMat3(m: Mat3, p: number[]): [number, number, number] {
  return [
    m[0] * p[0] + m[1] * p[1] + m[2] * p[2],
    m[3] * p[0] + m[4] * p[1] + m[5] * p[2],
    m[6] * p[0] + m[7] * p[1] + m[8] * p[2],
  ];
}

/** Project a world point to canvas pixels (y flipped, centered). */
export function project(
  camera: CameraState,
  point: number[],
  width: number,
  height: number,
  scalePxPerMeter: number,
  center: number[],
): [number, number] {
  const m = viewMatrix(camera);
  const c = applyMat3(m, center);
  const v = applyMat3(m, point);
  const s = scalePxPerMeter * camera.zoom;
  return [width / 2 + (v[0] - c[0]) * s, height / 2 - (v[1] - c[1]) * s];
}
