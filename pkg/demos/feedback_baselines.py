# Classifier-feedback steering needs no memory bank and no exemplars: it
# reads the exact region posterior off the mixture and pushes the noised
# sample around with it. The two modes fail in different directions. loss
# mode climbs away from the prompted region's posterior, so samples defect
# to other regions outright. entropy mode climbs toward where regions are
# confusable, so samples stay nominally in-region but smear off the modes.

import numpy as np

from vendiguide import (
    Condition,
    KernelSpec,
    build_scenario,
    default_collapse_scenario,
    generate_feedback_sequence,
    make_schedule,
    sample_unguided_batch,
    vendi_score,
)

bundle = build_scenario(default_collapse_scenario(seed=0))
world = bundle.sampler_world
sched = make_schedule(num_steps=50)
cond = Condition("o0", "r0")
kspec = KernelSpec(kind="rbf", bandwidth=3.0)


def describe(xs):
    xs = np.asarray(xs)
    d = np.linalg.norm(xs[:, None] - world.means[None], axis=2)
    nearest = d.argmin(axis=1)
    in_r0 = np.mean([world.region_labels[i] == "r0" for i in nearest])
    off_mode = d.min(axis=1).mean()
    return (f"in-region {in_r0:4.0%}  dist-to-mode {off_mode:4.2f}  "
            f"diversity {vendi_score(xs, kspec).score:5.2f}")


plain = sample_unguided_batch(cond, world, sched, seed=5, count=120)
print("plain conditional:", describe(plain))
for mode in ("loss", "entropy"):
    for w in (1.0, 3.0):
        xs = generate_feedback_sequence(cond, mode, w, 120, world, sched, seed=5)
        print(f"{mode:8s} w={w:.0f}    :", describe(xs))

print()
print("The prompt asks for r0 every time. loss abandons the region; entropy")
print("keeps it but pays with off-mode samples, which is why it reads as")
print("high recall and low precision downstream.")
