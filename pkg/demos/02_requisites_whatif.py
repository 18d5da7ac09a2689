"""The bundled Requisites model, explored the way an engineer would.

Start from the priors, feed in what we know about the project one item
at a time, and watch the revision verdict move.  Then use the Markov
blanket to see which variables are worth measuring next.
"""

from requisites import (
    CLASS_VARIABLE,
    default_network,
    evidence_trajectory,
    map_predict,
    markov_blanket,
    posterior,
)

net = default_network()

print("variables:")
for v in net.structure.variables:
    print(f"  {v.id:28s} {', '.join(v.states)}")

steps = [
    ("homogeneity_of_description", "yes"),   # the SRS reads uniformly detailed
    ("specificity", "high"),                 # stakeholders agree on meanings
    ("stakeholders_expertise", "low"),       # ...but they are new to this
]

print("\nevidence trajectory for", CLASS_VARIABLE)
labels = ["(prior)"] + [f"+{var}={state}" for var, state in steps]
for label, p in zip(labels, evidence_trajectory(net, steps)):
    yes, no = p.probabilities["yes"], p.probabilities["no"]
    print(f"  {label:36s} yes={yes:.3f}  no={no:.3f}")

verdict = map_predict(net, dict(steps), CLASS_VARIABLE)
print(f"\nverdict: degree_of_revision = {verdict!r}")
print("a tidy document does not save an inexperienced stakeholder group:")
print("the model still calls for one more revision cycle.\n")

print("what should we measure to pin down requirement_completeness?")
blanket = sorted(markov_blanket(net, "requirement_completeness"))
print("  its Markov blanket:", blanket)

print("\nif completeness turned out low, the verdict would shift:")
for state in ("high", "low"):
    p = posterior(net, {"requirement_completeness": state}, CLASS_VARIABLE)
    print(f"  completeness={state:5s} -> P(revise)={p.probabilities['yes']:.3f}")
