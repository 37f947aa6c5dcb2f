#!/usr/bin/env python3
"""Regenerate data/sleepstudy_synth.csv.

A synthetic stand-in for the classic sleep-deprivation reaction-time data
(Belenky et al. 2003, distributed with the R package lme4), which is not
redistributed in this repository. The generator keeps the original schema
(Reaction, Days, Subject; 18 subjects x 10 days) and draws per-subject
effects from the widely published random-intercept/random-slope fit of
that dataset:

    Reaction ~ 251.405 + 10.467 * Days
    sd(subject intercept) = 24.741
    sd(subject slope)     = 5.922
    corr(intercept,slope) = 0.066
    residual sd           = 25.592

Deterministic: a fixed seed always reproduces the committed file.
"""

import math
import random

SUBJECTS = [308, 309, 310, 330, 331, 332, 333, 334, 335, 337,
            349, 350, 351, 352, 369, 370, 371, 372]
FIXED_INTERCEPT = 251.405
FIXED_SLOPE = 10.467
SD_INTERCEPT = 24.741
SD_SLOPE = 5.922
CORR = 0.066
SD_RESIDUAL = 25.592
SEED = 20220913


def main() -> None:
    rng = random.Random(SEED)
    rows = []
    for subject in SUBJECTS:
        z1, z2 = rng.gauss(0, 1), rng.gauss(0, 1)
        b0 = SD_INTERCEPT * z1
        b1 = SD_SLOPE * (CORR * z1 + math.sqrt(1 - CORR ** 2) * z2)
        for day in range(10):
            mean = FIXED_INTERCEPT + b0 + (FIXED_SLOPE + b1) * day
            reaction = mean + SD_RESIDUAL * rng.gauss(0, 1)
            rows.append((round(reaction, 4), day, subject))
    with open("data/sleepstudy_synth.csv", "w") as out:
        out.write("Reaction,Days,Subject\n")
        for reaction, day, subject in rows:
            out.write(f"{reaction},{day},{subject}\n")
    print(f"wrote {len(rows)} rows")


if __name__ == "__main__":
    main()
