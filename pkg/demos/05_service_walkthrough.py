"""The HTTP API end to end: a real server, a real client.

Starts the service on a free port in a background thread, then walks
through the two what-if modes the way a UI would: fetch the network,
run a stateless inference, open an analytic session, move to an
exploratory session locked to one target's Markov blanket, and exchange
evidence as XML.
"""

import socket
import threading
import time

import httpx
import uvicorn

from requisites.service import create_app

with socket.socket() as probe:
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]

server = uvicorn.Server(
    uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="error")
)
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)

base = f"http://127.0.0.1:{port}"
client = httpx.Client(base_url=base)
print(f"service up on {base}\n")

network = client.get("/network").json()
print(f"GET /network -> {len(network['variables'])} variables,",
      f"class variable {network['class_variable']!r}")

body = client.post("/infer", json={
    "evidence": {"homogeneity_of_description": "yes"},
    "targets": ["degree_of_revision"],
}).json()
print("POST /infer with homogeneity=yes ->",
      {s: round(v, 3) for s, v in body["revision"].items()},
      "prediction:", body["prediction"])

print("\n--- analytic session: free evidence over all variables ---")
session = client.post("/sessions", json={"mode": "analytic"}).json()
sid = session["id"]
client.patch(f"/sessions/{sid}/evidence", json={"evidence": {
    "homogeneity_of_description": "yes",
    "specificity": "high",
    "stakeholders_expertise": "low",
}})
result = client.post(f"/sessions/{sid}/propagate").json()
print("propagate ->", {s: round(v, 3) for s, v in result["revision"].items()},
      "prediction:", result["prediction"])

xml = client.get(f"/sessions/{sid}/evidence.xml").text
print("\nevidence as XML:")
print("  " + "\n  ".join(xml.strip().splitlines()))

print("\n--- exploratory session: locked to one target's blanket ---")
explore = client.post(
    "/sessions", json={"mode": "exploratory", "target": "specificity"}
).json()
eid = explore["id"]
blanket = client.get("/markov-blanket/specificity").json()["blanket"]
print("relevant variables for 'specificity':", blanket)

rejected = client.patch(f"/sessions/{eid}/evidence",
                        json={"evidence": {"stakeholders_expertise": "low"}})
print("evidence outside the blanket ->", rejected.status_code,
      rejected.json()["code"])

client.patch(f"/sessions/{eid}/evidence",
             json={"evidence": {"degree_of_commitment": "high"}})
result = client.post(f"/sessions/{eid}/propagate").json()
print("propagate with commitment=high -> specificity:",
      {s: round(v, 3) for s, v in result["posteriors"]["specificity"].items()})
print("revision tracked alongside:", {s: round(v, 3) for s, v in result["revision"].items()})

client.close()
server.should_exit = True
thread.join(timeout=10)
print("\nserver stopped.")
