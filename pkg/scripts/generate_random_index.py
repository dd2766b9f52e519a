"""Regenerate the frozen random-index table in ``src/cclab/_random_index.py``.

Each order n in 3..15 gets the mean consistency index of ``--samples`` random
reciprocal matrices whose upper-triangle judgments are drawn uniformly from
the 17-point scale {1/9, ..., 1/2, 1, 2, ..., 9}.

    python scripts/generate_random_index.py            # print the table
    python scripts/generate_random_index.py --write    # rewrite the module
"""

import argparse
from pathlib import Path

import numpy as np

SCALE = np.array([1.0 / k for k in range(9, 1, -1)] + [1.0] + [float(k) for k in range(2, 10)])
MAX_ORDER = 15
TARGET = Path(__file__).resolve().parents[1] / "src" / "cclab" / "_random_index.py"


def random_reciprocal(rng, n, size):
    mats = np.ones((size, n, n))
    iu, ju = np.triu_indices(n, k=1)
    draws = SCALE[rng.integers(0, SCALE.size, size=(size, iu.size))]
    mats[:, iu, ju] = draws
    mats[:, ju, iu] = 1.0 / draws
    return mats


def mean_ci(rng, n, samples, batch=20_000):
    total = 0.0
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        lam = np.linalg.eigvals(random_reciprocal(rng, n, size)).real.max(axis=1)
        total += ((lam - n) / (n - 1)).sum()
        done += size
    return total / samples


def generate(samples, seed):
    rng = np.random.default_rng(seed)
    table = {1: 0.0, 2: 0.0}
    for n in range(3, MAX_ORDER + 1):
        table[n] = round(float(mean_ci(rng, n, samples)), 4)
    return table


def render(table, samples, seed):
    rows = "\n".join(f"    {n}: {v!r}," for n, v in sorted(table.items()))
    return (
        '"""Random consistency index by matrix order.\n\n'
        "Generated by scripts/generate_random_index.py "
        f"(samples={samples}, seed={seed}). Do not edit by hand.\n"
        '"""\n\n'
        f"SAMPLES = {samples}\n"
        f"SEED = {seed}\n\n"
        "RANDOM_INDEX = {\n"
        f"{rows}\n"
        "}\n"
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument("--write", action="store_true")
    args = parser.parse_args()

    table = generate(args.samples, args.seed)
    text = render(table, args.samples, args.seed)
    if args.write:
        TARGET.write_text(text)
        print(f"wrote {TARGET}")
    else:
        print(text)


if __name__ == "__main__":
    main()
