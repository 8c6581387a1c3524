# Grid-sweep two guidance knobs on a small scenario, pick a config per
# held-out region, and dump the report files the CLI would produce. The
# selection rule scores each config on every region EXCEPT the held-out
# one, a cheap guard against tuning to the region you care about.

import pathlib
import tempfile

from vendiguide import (
    ExperimentConfig,
    ScenarioSpec,
    emit_reports,
    one_region_out_select,
    sweep,
)

base = ExperimentConfig(
    scenario=ScenarioSpec(
        regions=("r0", "r1"),
        objects=("o0", "o1"),
        modes_per_cell=3,
        collapse={("o0", "r0"): 0.34},
        reference_per_region=60,
        exemplar_pool_per_cell=8,
        seed=3,
    ),
    method="vendi_context",
    seeds=(0, 1),
    generations_per_cell=16,
    schedule_steps=30,
    kernel_bandwidth=3.0,
    guide_every=2,
    grad_clip=3.0,
    exemplars_per_object=3,
    keep_samples=False,
)

records = sweep(base, {"memory_weight": [0.5, 1.0], "context_weight": [1.0, 2.0]})
for rec in records:
    cfg = rec.config
    print(f"mw={cfg.memory_weight} cw={cfg.context_weight}  "
          f"F1={rec.aggregate.average.f1:.3f}  worst={rec.aggregate.worst.f1:.3f}")

print()
picks = one_region_out_select(records)
for region, rec in sorted(picks.items()):
    print(f"hold out {region}: pick mw={rec.config.memory_weight} "
          f"cw={rec.config.context_weight}")

out = pathlib.Path(tempfile.mkdtemp(prefix="sweepdemo-"))
paths = emit_reports(records, out)
print()
print("report files:")
for p in paths:
    print(" ", p.name, f"({p.stat().st_size} bytes)")
print("results.csv first lines:")
for line in (out / "results.csv").read_text().splitlines()[:3]:
    print(" ", line)
