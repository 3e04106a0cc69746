#!/usr/bin/env python3
"""Measured information never exceeds the Holevo quantity.

An ensemble of signal states carries at most chi = S(mixture) - mean
member entropy nats of classical information, whatever measurement the
receiver applies.  We sweep random ensembles and measurements to exhibit
the gap, then show the two classical extremes: orthogonal pure signals
(chi attained) and identical signals (nothing to learn).
"""

import numpy as np

from qsource import POVM, holevo_chi, measurement_joint, mutual_information


def random_density(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    d = g @ g.conj().T
    return d / np.trace(d).real


def random_povm(dim, count, rng):
    raw = np.stack([random_density(dim, rng) for _ in range(count)])
    total = raw.sum(axis=0)
    vals, vecs = np.linalg.eigh(total)
    inv_root = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return POVM(elements=np.einsum("ab,ibc,cd->iad", inv_root, raw, inv_root))


def main():
    rng = np.random.default_rng(12)

    print("random qutrit ensembles, random 4-outcome measurements:")
    print("   draw   accessible I   Holevo chi   slack")
    worst_slack = np.inf
    for draw in range(8):
        probs = rng.dirichlet(np.ones(3))
        states = [random_density(3, rng) for _ in range(3)]
        povm = random_povm(3, 4, rng)
        info = mutual_information(measurement_joint(probs, states, povm))
        chi = holevo_chi(probs, states)
        worst_slack = min(worst_slack, chi - info)
        print(f"   {draw:4d}   {info:12.6f}   {chi:10.6f}   {chi - info:.6f}")
    print(f"  smallest slack over draws: {worst_slack:.6f} (never negative)")
    print()

    print("orthogonal pure signals read out in their own basis:")
    dim = 4
    signal = [np.zeros((dim, dim), dtype=complex) for _ in range(dim)]
    for i in range(dim):
        signal[i][i, i] = 1.0
    povm = POVM(elements=np.stack(signal))
    probs = np.full(dim, 1 / dim)
    info = mutual_information(measurement_joint(probs, signal, povm))
    chi = holevo_chi(probs, signal)
    print(
        f"  I = {info:.6f} = chi = {chi:.6f} = ln {dim} = {np.log(dim):.6f}: "
        "the bound is attained"
    )
    print()

    print("identical signals carry nothing:")
    d = random_density(3, rng)
    chi = holevo_chi([0.5, 0.5], [d, d])
    print(f"  chi = {chi:.2e}")


if __name__ == "__main__":
    main()
