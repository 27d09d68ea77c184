/** Multi-angle 3D skeleton playback: stick-figure segments drawn between
 * parent-child world joint positions served by the backend. Camera presets
 * are axis-aligned front/side/top plus a drag orbit. */
import { CameraPreset, project, viewMatrix, applyMat3 } from "../camera.js";
import { severityColor } from "../colors.js";
import { Store, ViewState } from "../state.js";

const PRESETS: { key: CameraPreset; label: string }[] = [
  { key: "front", label: "Front" },
  { key: "side", label: "Side" },
  { key: "top", label: "Top" },
  { key: "orbit", label: "Orbit" },
];

export function mountSkeletonView(root: HTMLElement, store: Store): void {
  root.classList.add("skeleton-view");
  root.innerHTML = `
    <div class="panel-title">Motion Viewer</div>
    <div class="camera-bar"></div>
    <canvas width="420" height="420"></canvas>
  `;
  const bar = root.querySelector(".camera-bar") as HTMLElement;
  const canvas = root.querySelector("canvas") as HTMLCanvasElement;

  for (const preset of PRESETS) {
    const button = document.createElement("button");
    button.textContent = preset.label;
    button.dataset.preset = preset.key;
    button.addEventListener("click", () => store.setCamera(preset.key));
    bar.appendChild(button);
  }

  let dragging = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    last = [e.clientX, e.clientY];
  });
  window.addEventListener("mouseup", () => (dragging = false));
  window.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    store.orbitBy((e.clientX - last[0]) * 0.5, (e.clientY - last[1]) * 0.5);
    last = [e.clientX, e.clientY];
  });

  store.subscribe((state) => render(root, bar, canvas, state));
  render(root, bar, canvas, store.state);
}

function render(
  root: HTMLElement,
  bar: HTMLElement,
  canvas: HTMLCanvasElement,
  state: ViewState,
): void {
  root.dataset.analysisId = state.analysisId ?? "";
  root.dataset.frame = String(state.cursorFrame);
  root.dataset.camera = state.camera.preset;

  for (const button of bar.querySelectorAll("button")) {
    button.classList.toggle("active", button.dataset.preset === state.camera.preset);
  }

  const frames = state.frames;
  const pose = frames?.frames[state.cursorFrame];
  if (!frames || !pose) {
    root.dataset.pose = "";
    clearCanvas(canvas);
    return;
  }

  // a cheap but motion-sensitive signature of the displayed pose, so an
  // end-to-end test can assert the 3D view tracks the cursor
  let signature = 0;
  for (const p of pose.positions_m) signature += Math.abs(p[0]) + Math.abs(p[1]) + Math.abs(p[2]);
  root.dataset.pose = signature.toFixed(5);

  const context = context2d(canvas);
  if (!context) return; // headless DOM: attributes above still describe the pose

  const width = canvas.width;
  const height = canvas.height;
  context.clearRect(0, 0, width, height);
  context.fillStyle = "#10161f";
  context.fillRect(0, 0, width, height);

  const center = poseCenter(pose.positions_m);
  const scale = 170;

  // ground grid through the minimum foot height
  context.strokeStyle = "#223043";
  context.lineWidth = 1;
  const floorY = Math.min(...pose.positions_m.map((p) => p[1]));
  for (let gx = -1; gx <= 1; gx += 0.25) {
    for (const [a, b] of [
      [
        [gx + center[0], floorY, -1 + center[2]],
        [gx + center[0], floorY, 1 + center[2]],
      ],
      [
        [-1 + center[0], floorY, gx + center[2]],
        [1 + center[0], floorY, gx + center[2]],
      ],
    ]) {
      const pa = project(state.camera, a, width, height, scale, center);
      const pb = project(state.camera, b, width, height, scale, center);
      context.beginPath();
      context.moveTo(pa[0], pa[1]);
      context.lineTo(pb[0], pb[1]);
      context.stroke();
    }
  }

  // bones
  const selected = state.selectedIncident !== null && state.report
    ? state.report.incidents[state.selectedIncident]
    : null;
  context.lineWidth = 3;
  for (let j = 0; j < frames.parents.length; j++) {
    const parent = frames.parents[j];
    if (parent < 0) continue;
    const a = project(state.camera, pose.positions_m[parent], width, height, scale, center);
    const b = project(state.camera, pose.positions_m[j], width, height, scale, center);
    context.strokeStyle = boneColor(frames.joint_names[j], selected?.region, selected?.severity);
    context.beginPath();
    context.moveTo(a[0], a[1]);
    context.lineTo(b[0], b[1]);
    context.stroke();
  }
  // joints
  context.fillStyle = "#c7d3e3";
  for (const p of pose.positions_m) {
    const q = project(state.camera, p, width, height, scale, center);
    context.beginPath();
    context.arc(q[0], q[1], 3, 0, Math.PI * 2);
    context.fill();
  }
}

function context2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  try {
    return canvas.getContext("2d");
  } catch {
    return null; // jsdom has no canvas backend
  }
}

function clearCanvas(canvas: HTMLCanvasElement): void {
  const context = context2d(canvas);
  if (!context) return;
  context.fillStyle = "#10161f";
  context.fillRect(0, 0, canvas.width, canvas.height);
}

function poseCenter(positions: number[][]): number[] {
  const c = [0, 0, 0];
  for (const p of positions) {
    c[0] += p[0] / positions.length;
    c[1] += p[1] / positions.length;
    c[2] += p[2] / positions.length;
  }
  return c;
}

/** Highlight the bones of the selected incident's region. */
const REGION_JOINT_HINTS: Record<string, string[]> = {
  ankle_l: ["LeftFoot"],
  ankle_r: ["RightFoot"],
  knee_l: ["LeftLeg", "LeftFoot"],
  knee_r: ["RightLeg", "RightFoot"],
  hip_l: ["LeftUpLeg", "LeftLeg"],
  hip_r: ["RightUpLeg", "RightLeg"],
  trunk: ["Spine", "Neck"],
};

function boneColor(
  jointName: string,
  region: string | undefined,
  severity: "low" | "medium" | "high" | undefined,
): string {
  if (region && severity) {
    const hints = REGION_JOINT_HINTS[region] ?? [];
    if (hints.some((h) => jointName.startsWith(h))) return severityColor(severity);
  }
  return "#5c87b8";
}

// re-export for tests: the deterministic preset matrices
export { viewMatrix, applyMat3 };
