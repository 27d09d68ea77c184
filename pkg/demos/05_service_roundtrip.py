"""Drive the HTTP service the way the review client does.

Starts the service in-process, uploads the Achilles fixture, polls the
handle, reads frames / streams / incidents / report, then re-evaluates
with a raised dorsiflexion threshold and shows the incidents disappear.
"""
import json
import time
import urllib.request
from importlib import resources
from pathlib import Path

from motionrisk.service import AnalysisService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def call(base, path, doc=None):
    data = json.dumps(doc).encode() if doc is not None else None
    req = urllib.request.Request(base + path, data=data,
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


service = AnalysisService(port=0)
service.start()
base = f"http://127.0.0.1:{service.port}"
print(f"service up at {base}, health: {call(base, '/health')['status']}")

content = (FIXTURES / "achilles_sweep.bvh").read_text()
handle = call(base, "/analyses", {"name": "achilles_sweep.bvh", "content": content,
                                  "params": {"body_mass_kg": 70.0}})
while handle["status"] == "pending":
    time.sleep(0.05)
    handle = call(base, f"/analyses/{handle['id']}")
print(f"analysis {handle['id'][:8]}... {handle['status']}, "
      f"{handle['incident_count']} incident(s)")

frames = call(base, f"/analyses/{handle['id']}/frames?start=120&end=120")
hips = frames["frames"][0]["positions_m"][0]
print(f"frame 120 hips at ({hips[0]:.2f}, {hips[1]:.2f}, {hips[2]:.2f}) m")

streams = call(base, f"/analyses/{handle['id']}/streams?ids=left_ankle_dorsiflexion_deg")
peak = max(streams["streams"][0]["samples"])
print(f"dorsiflexion peak over the wire: {peak:.1f} deg")

incidents = call(base, f"/analyses/{handle['id']}/incidents")["incidents"]
print(f"incidents: {[(i['label'], i['severity']) for i in incidents]}")

# raise the threshold past the sweep's peak and re-evaluate
rules = json.loads(resources.files("motionrisk.data")
                   .joinpath("rules_default.json").read_text())
for rule in rules["rules"]:
    for cond in rule["conditions"]:
        if cond["measure"].endswith("dorsiflexion_deg") and cond["comparator"] == "gt":
            cond["threshold"] = 80.0
new_handle = call(base, f"/analyses/{handle['id']}/reevaluate", rules)
remaining = call(base, f"/analyses/{new_handle['id']}/incidents")["incidents"]
print(f"after raising the threshold to 80 deg: {len(remaining)} incident(s)")

service.stop()
print("service stopped")
