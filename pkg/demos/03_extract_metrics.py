"""From raw project files to a revision verdict.

Writes a small dataset directory (the same shapes a requirements tool
would export), extracts evidence from it, and propagates the evidence
through the bundled network.
"""

import csv
import tempfile
from pathlib import Path

from requisites import CLASS_VARIABLE, default_network, map_predict, posterior
from requisites.dataset import load_dataset
from requisites.metrics import extract_evidence

root = Path(tempfile.mkdtemp(prefix="requisites-demo-")) / "project"
root.mkdir()

# a project with three objectives at different levels of refinement
hierarchy = [("id", "level", "parent")]
for o, (detailed, total) in enumerate([(4, 4), (2, 3), (1, 4)]):
    objective = f"obj{o}"
    hierarchy.append((objective, "objective", ""))
    for f in range(total):
        feature = f"{objective}.f{f}"
        hierarchy.append((feature, "feature", objective))
        if f < detailed:
            hierarchy.append((f"{feature}.s", "specific", feature))

ratings = [("stakeholder", "requirement", "rating"),
           ("ana", "obj0", 5), ("bo", "obj0", 4),
           ("ana", "obj1", 4), ("bo", "obj1", 5),
           ("ana", "obj2", 2), ("bo", "obj2", 3)]

recommendations = [("from", "to", "salience"),
                   ("ana", "bo", 2), ("cy", "bo", 3),
                   ("bo", "ana", 2), ("cy", "ana", 2),
                   ("ana", "cy", 7), ("bo", "cy", 8)]

activity = [("requirement", "event", "stakeholder", "timestamp"),
            ("obj0.f0", "comment", "ana", "2024-03-01"),
            ("obj0.f0", "comment", "bo", "2024-03-02"),
            ("obj0.f0", "accept", "ana", "2024-03-03"),
            ("obj1.f0", "change", "ana", "2024-03-04"),
            ("obj1.f0", "change", "bo", "2024-03-05"),
            ("obj2.f0", "accept", "ana", "2024-03-06"),
            ("obj2.f0", "reject", "bo", "2024-03-07"),
            ("obj2.f0", "accept", "ana", "2024-03-08")]

fills = [("requirement", "ratio"),
         ("obj0.f0", 1.0), ("obj1.f0", 0.7), ("obj2.f0", 0.3)]

for name, rows in [("hierarchy.csv", hierarchy), ("ratings.csv", ratings),
                   ("recommendations.csv", recommendations),
                   ("activity.csv", activity), ("template_fill.csv", fills)]:
    with open(root / name, "w", encoding="utf-8", newline="") as handle:
        csv.writer(handle).writerows(rows)

print(f"dataset written to {root}\n")

data = load_dataset(root)
report = extract_evidence(data.hierarchy, data.ratings, data.recommendations, data.activity)

print("extracted evidence report:")
for var, entry in report.entries.items():
    state = "MANUAL" if entry.is_manual else entry.state
    print(f"  {var:28s} {state:8s} {entry.note}")
    if entry.statistics:
        print(f"  {'':28s} stats: " + ", ".join(
            f"{k}={v:.3f}" if isinstance(v, float) else f"{k}={v}"
            for k, v in entry.statistics.items()))

evidence = report.evidence()
print("\ninjected as evidence:", evidence)

net = default_network()
p = posterior(net, evidence, CLASS_VARIABLE)
print(f"\nP({CLASS_VARIABLE} | evidence) =",
      {s: round(v, 3) for s, v in p.probabilities.items()})
print("prediction:", map_predict(net, evidence, CLASS_VARIABLE))
