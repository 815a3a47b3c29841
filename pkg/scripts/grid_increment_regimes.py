"""How the largest grid increment D(A_n, k, T) behaves as k grows.

For sparse clocks (few jumps per unit time) D decreases to the largest jump
and stays there.  For dense clocks many small jumps share a grid cell at small
k, so D starts large and then falls.  On nested grids D is nonincreasing in k
for any nondecreasing path, and it reaches the largest jump once the grid
separates every pair of jumps.
"""

import numpy as np

from cadlag_lab.paths import max_jump
from cadlag_lab.simulators import (ChainSpec, InterarrivalDist, Scenario, ScenarioConfig,
                                   compensator_path, simulate_scenario, substream)
from cadlag_lab.topology import grid_increment_max

K_GRID = (10, 100, 1000, 10_000, 100_000)


def main(paths=5, seed=20240601):
    chain = ChainSpec([[0.9, 0.1], [0.1, 0.9]], [1, -1])
    for n in (20, 10_000):
        cfg = ScenarioConfig(Scenario.RENEWAL_STABLE_SUB1, n, 1.0, 0.01, InterarrivalDist.pareto(0.7), chain, seed)
        print(f"\nn = {n}")
        print("path  max_jump " + "".join(f"{'k=' + str(k):>12}" for k in K_GRID))
        for r in range(paths):
            A = simulate_scenario(cfg, substream(seed, 8, 0, r)).A
            D = [grid_increment_max(A, k, 1.0) for k in K_GRID]
            print(f"{r:<6d}{max_jump(A, 1.0):9.4f}" + "".join(f"{d:12.4f}" for d in D)
                  + ("" if np.all(np.diff(D) >= -1e-12) else "   (not monotone)"))


if __name__ == "__main__":
    main()
