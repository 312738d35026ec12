"""Forward and backward search over decomposable models of three binary variables."""
from itertools import product

from senselearn import decomposable as dm
from senselearn.events import ObservationSet

counts = [0, 1, 5, 12, 0, 3, 2, 1]  # events 000 .. 111 over (A, B, C)
rows = [list(e) for e, c in zip(product((0, 1), repeat=3), counts) for _ in range(c)]
data = ObservationSet.from_rows(rows, (2, 2, 2), ("A", "B", "C"), class_index=2)

for text in ["(A)(B)(C)", "(AB)(C)", "(AB)(BC)", "(ABC)"]:
    fit = dm.fit(dm.DecomposableModel.parse(text, ("A", "B", "C")), data)
    print(f"{text:10} G2={fit.g_squared:6.2f} dof={fit.adjusted_dof}")

for direction in (dm.FORWARD, dm.BACKWARD):
    res = dm.sequential_select(data, direction, dm.AIC, dof_kind="edges")
    print(direction, " -> ".join(res.sequence_strings))
    for i, step in enumerate(res.steps, 1):
        for s in step:
            print(f"  step {i} {str(s.candidate):10} dG2={s.delta_g2:5.2f} AIC={s.score:5.2f}")

# Naive Mix averages the class-bearing part of every model along the way
res = dm.sequential_select(data, dm.FORWARD, dm.AIC)
mix = dm.naive_mix(res.sequence, data)
print(mix.round(3))
print("classify (A=1,B=1):", dm.classify_joint(mix, (0, 0), 2))
