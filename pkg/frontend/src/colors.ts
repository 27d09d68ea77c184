/** The documented severity color scale.
 *
 * Severity levels and the body-map ramp share one palette:
 *   neutral  #2e4057  (no recorded stress)
 *   low      #f2c14e
 *   medium   #f78154
 *   high     #d64550
 *
 * Body-map region colors are a pure function of the report's stress score
 * (0..1): 0 is neutral, then thirds of the scale map to low / medium /
 * high.
 */
export const SEVERITY_COLORS: Record<string, string> = {
  neutral: "#2e4057",
  low: "#f2c14e",
  medium: "#f78154",
  high: "#d64550",
};

export function severityColor(severity: "low" | "medium" | "high"): string {
  return SEVERITY_COLORS[severity];
}

export function stressColor(score: number): string {
  if (!(score > 0)) return SEVERITY_COLORS.neutral;
  if (score <= 1 / 3) return SEVERITY_COLORS.low;
  if (score <= 2 / 3) return SEVERITY_COLORS.medium;
  return SEVERITY_COLORS.high;
}
