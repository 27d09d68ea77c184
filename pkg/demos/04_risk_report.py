"""The full pipeline on each shipped fixture, and what the rules flag.

Shows the risk layer end to end: angle/load streams -> per-rule masks ->
segmented incidents -> severity grading -> session report with the
per-region stress scores the body map renders.
"""
from pathlib import Path

from motionrisk import parse_mocap_text, run_analysis

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

for name in ("neutral_stand", "achilles_sweep", "acl_collapse"):
    skeleton, seq = parse_mocap_text((FIXTURES / f"{name}.bvh").read_text())
    result = run_analysis(skeleton, seq, source=name, body_mass_kg=70.0)
    report = result.report

    print(f"=== {name} " + "=" * (40 - len(name)))
    print(f"  {report.session.frame_count} frames at {report.session.frame_rate_hz:g} Hz, "
          f"{report.session.duration_s:.2f} s, {len(result.streams)} streams")
    if not report.incidents:
        print("  no incidents")
    for inc in report.incidents:
        gaps = f", bridged {len(inc.bridged_gaps)} gap(s)" if inc.bridged_gaps else ""
        print(f"  [{inc.severity:^6s}] {inc.label} @ {inc.region}: "
              f"{inc.start_s:.2f}-{inc.end_s:.2f} s, "
              f"peak {inc.peak_value:.1f} {inc.peak_unit} "
              f"({inc.peak_measure}) at t={inc.peak_frame / report.session.frame_rate_hz:.2f} s{gaps}")
    hot = {r: s for r, s in report.stress_scores.items() if s > 0}
    print(f"  stress scores: {hot if hot else 'all zero'}")
    print()
