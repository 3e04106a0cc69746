#!/usr/bin/env python3
"""Direct compression experiment: code at the entropy rate, keep fidelity.

The encoder projects each pure ensemble member onto the level-eps/2
high-probability subspace and routes lost weight to a fixed anchor state
inside it.  The construction obeys an exact finite-n inequality chain

    F  >=  2 phi(q) - 1  >=  1 - eps

where phi(q) is the subspace weight of the block state, so the fidelity
target is certified, not just observed.  The chain holds for every
extremal decomposition; we sample several mixing unitaries to show the
subspace and rate never move while the ensemble does.
"""

import numpy as np

from qsource import (
    correlated_source,
    direct_coding_experiment,
    example1_source,
    product_source,
)


def show(report, label):
    print(f"{label}:")
    print(
        f"  block length n={report.n}, level eps={report.eps}, "
        f"mixer seed {report.seed}"
    )
    print(
        f"  code dimension {report.hp_dim} (rate {report.rate:.4f} nats/site, "
        f"entropy estimate + delta = {report.h_hat + report.delta:.4f})"
    )
    print(
        f"  chain: F = {report.fidelity:.9f} >= 2 phi(q) - 1 = "
        f"{report.lower_bound:.9f} >= 1 - eps = {1 - report.eps:.9f}"
    )
    print(
        f"  square-root fidelity F' = {report.fidelity_sqrt:.9f} >= F, "
        f"exact checks {'pass' if report.all_exact_ok else 'FAIL'}"
    )
    print()


def main():
    biased = product_source(np.diag([2 / 3, 1 / 3]))
    report = direct_coding_experiment(biased, n=6, eps=0.1, delta=0.15, mixer_seed=0)
    show(report, "memoryless biased bit, n = 6")
    print(
        f"  6 sites span {2 ** 6} dimensions; the code keeps {report.hp_dim} "
        "of them at 90% fidelity\n"
    )

    memory = correlated_source(example1_source())
    report = direct_coding_experiment(memory, n=5, eps=0.1, delta=0.2, mixer_seed=0)
    show(report, "correlated three-symbol source, n = 5")
    print(
        f"  243 raw dimensions compress into {report.hp_dim}: the memory "
        "makes the source nearly deterministic at block level\n"
    )

    print("ensemble freedom: different mixers, same subspace and rate")
    for seed in range(4):
        rep = direct_coding_experiment(memory, n=4, eps=0.2, delta=0.2, mixer_seed=seed)
        print(
            f"  seed {seed}: dim {rep.hp_dim}, rate {rep.rate:.6f}, "
            f"F = {rep.fidelity:.9f} (>= {1 - rep.eps})"
        )


if __name__ == "__main__":
    main()
