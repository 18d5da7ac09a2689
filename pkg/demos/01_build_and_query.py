"""Engine basics: build a small network by hand and query it.

The classic sprinkler story: rain makes the sprinkler less likely to be
on, and either one leaves the grass wet.  Watch the rain posterior move
as evidence arrives.
"""

from requisites import (
    Cpt,
    Variable,
    build_network,
    joint_probability,
    map_predict,
    markov_blanket,
    posterior,
    prior_marginals,
)

variables = [
    Variable("rain", ("yes", "no")),
    Variable("sprinkler", ("on", "off")),
    Variable("grass", ("wet", "dry")),
]

cpts = [
    Cpt("rain", (), [[0.2, 0.8]]),
    # rain discourages the sprinkler
    Cpt("sprinkler", ("rain",), [[0.01, 0.99], [0.40, 0.60]]),
    # rows: (rain, sprinkler) = (yes,on), (yes,off), (no,on), (no,off)
    Cpt(
        "grass",
        ("rain", "sprinkler"),
        [[0.99, 0.01], [0.80, 0.20], [0.90, 0.10], [0.00, 1.00]],
    ),
]

net = build_network(
    variables,
    [("rain", "sprinkler"), ("rain", "grass"), ("sprinkler", "grass")],
    cpts,
)

print("prior marginals")
for var, p in prior_marginals(net).items():
    print(f"  {var:10s}", {s: round(v, 4) for s, v in p.probabilities.items()})

print("\none full world: rain=yes, sprinkler=off, grass=wet")
print("  joint probability =",
      joint_probability(net, {"rain": "yes", "sprinkler": "off", "grass": "wet"}))

print("\nthe grass is wet; what happened?")
p = posterior(net, {"grass": "wet"}, "rain")
print("  P(rain | grass=wet)      =", {s: round(v, 4) for s, v in p.probabilities.items()})

print("\n...and we see the sprinkler running (explaining away)")
p = posterior(net, {"grass": "wet", "sprinkler": "on"}, "rain")
print("  P(rain | wet, sprinkler) =", {s: round(v, 4) for s, v in p.probabilities.items()})

print("\nMAP prediction for rain given wet grass:",
      map_predict(net, {"grass": "wet"}, "rain"))
print("Markov blanket of sprinkler:", sorted(markov_blanket(net, "sprinkler")))
