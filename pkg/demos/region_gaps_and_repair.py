# The collapse scenario drops three quarters of region r0's modes from the
# sampler while the reference set still remembers all of them, so every
# method starts with a recall hole in r0. Climb the ladder: no guidance,
# memory only, memory plus real-context exemplars. Small run; the shapes of
# the numbers, not their exact values, are the point.

from vendiguide import ExperimentConfig, default_collapse_scenario, run_experiment

common = dict(
    scenario=default_collapse_scenario(seed=0),
    seeds=(0, 1, 2),
    generations_per_cell=24,
    kernel_bandwidth=3.0,
    guide_every=2,
    grad_clip=3.0,
    exemplar_stratify="per_region",
    exemplars_per_object=5,
    keep_samples=False,
)

ladder = [
    ("baseline", dict(method="baseline", memory_weight=0.0, context_weight=0.0)),
    ("memory only", dict(method="vendi", memory_weight=1.0, context_weight=0.0)),
    ("memory+context", dict(method="vendi_context", memory_weight=1.0, context_weight=2.0)),
]

records = {}
for label, kw in ladder:
    rec = run_experiment(ExperimentConfig(**common, **kw))
    records[label] = rec
    agg = rec.aggregate
    print(f"{label:15s} P={agg.average.precision:.3f} R={agg.average.recall:.3f} "
          f"F1={agg.average.f1:.3f} worst[{agg.worst_region}] F1={agg.worst.f1:.3f} "
          f"diversity={rec.mean_output_vendi:.2f}")

print()
print("r0 recall along the ladder:")
for label, rec in records.items():
    print(f"  {label:15s} {rec.aggregate.per_region['r0'].recall:.3f}")
print()
print("Memory guidance buys diversity and recall; the context term claws")
print("back the precision that pure repulsion gives up.")
