"""Independent estimate of P(AP_r(n, m) projects to a simple hypergraph)."""
import sys
import numpy as np


def simple_fraction(n, m, r, trials, seed=0):
    rng = np.random.default_rng(seed)
    ok = 0
    for _ in range(trials):
        e = np.sort(rng.integers(0, n, size=(m, r)), axis=1)
        if (np.diff(e, axis=1) == 0).any():
            continue
        if len({tuple(x) for x in e}) == m:
            ok += 1
    return ok / trials


def poisson_approx(n, m, r):
    p_loopfree = np.prod([1 - i / n for i in range(r)])
    from math import comb
    return p_loopfree ** m * np.exp(-comb(m, 2) / comb(n, r))


if __name__ == "__main__":
    for n, m, r in [(100, 150, 3), (1000, 1000, 3)]:
        print(n, m, r, "sim", simple_fraction(n, m, r, 100000), "approx", poisson_approx(n, m, r))
