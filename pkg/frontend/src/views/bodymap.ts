/** Body stress map: a schematic figure whose regions are colored purely
 * from the report's per-region stress scores via the documented scale. */
import { stressColor } from "../colors.js";
import { Store, ViewState } from "../state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/** region -> [x, y, rx, ry] ellipse on a 120x220 schematic body */
const REGION_SHAPES: Record<string, [number, number, number, number]> = {
  trunk: [60, 78, 22, 30],
  hip_l: [74, 114, 11, 10],
  hip_r: [46, 114, 11, 10],
  knee_l: [73, 158, 9, 10],
  knee_r: [47, 158, 9, 10],
  ankle_l: [72, 198, 8, 9],
  ankle_r: [48, 198, 8, 9],
};

export function mountBodyMapView(root: HTMLElement, store: Store): void {
  root.classList.add("bodymap-view");
  root.innerHTML = `<div class="panel-title">Body Stress Analysis</div>`;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 120 220");
  svg.setAttribute("width", "140");

  // static outline: head and limb lines
  const head = document.createElementNS(SVG_NS, "circle");
  head.setAttribute("cx", "60");
  head.setAttribute("cy", "26");
  head.setAttribute("r", "14");
  head.setAttribute("fill", "none");
  head.setAttribute("stroke", "#49607d");
  svg.appendChild(head);
  for (const d of [
    "M60 44 L60 108", // spine line
    "M38 60 L82 60", // shoulders
    "M46 114 L46 198", // right leg
    "M74 114 L74 198", // left leg
  ]) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", d);
    path.setAttribute("stroke", "#49607d");
    path.setAttribute("fill", "none");
    svg.appendChild(path);
  }

  const regionNodes: Record<string, SVGEllipseElement> = {};
  for (const [region, [cx, cy, rx, ry]] of Object.entries(REGION_SHAPES)) {
    const ellipse = document.createElementNS(SVG_NS, "ellipse") as SVGEllipseElement;
    ellipse.setAttribute("cx", String(cx));
    ellipse.setAttribute("cy", String(cy));
    ellipse.setAttribute("rx", String(rx));
    ellipse.setAttribute("ry", String(ry));
    ellipse.dataset.region = region;
    svg.appendChild(ellipse);
    regionNodes[region] = ellipse;
  }
  root.appendChild(svg);
  const legend = document.createElement("div");
  legend.className = "stress-legend";
  root.appendChild(legend);

  store.subscribe((state) => render(root, regionNodes, legend, state));
  render(root, regionNodes, legend, store.state);
}

function render(
  root: HTMLElement,
  regionNodes: Record<string, SVGEllipseElement>,
  legend: HTMLElement,
  state: ViewState,
): void {
  root.dataset.analysisId = state.analysisId ?? "";
  const scores = state.report?.stress_scores ?? {};
  for (const [region, node] of Object.entries(regionNodes)) {
    const score = scores[region] ?? 0;
    node.setAttribute("fill", stressColor(score));
    node.dataset.score = score.toFixed(3);
  }
  const hot = Object.entries(scores)
    .filter(([, score]) => score > 0)
    .sort((a, b) => b[1] - a[1])
    .map(([region, score]) => `${region} ${score.toFixed(2)}`);
  legend.textContent = hot.length ? `stress: ${hot.join(", ")}` : "no recorded stress";
}
