"""Dispersive transport done right: rigid translation and clean overtaking.

Two experiments.  First a single soliton carried to t = 10: mass and
energy hold to 1e-8, and the final field is a pure translate of the
initial one.  Then the classic overtake: a speed-2 soliton launched
behind a speed-1 soliton passes through it, and both emerge with their
speeds intact to about a percent.  No fitting tricks -- the post-collision
parameters come from the same modulation solve the stability runs use.
"""

import argparse

import numpy as np

from bolab import (
    EvolutionConfig,
    Grid,
    RealField,
    SolitonParams,
    SolitonTrain,
    decompose,
    evolve,
    l2_norm,
    soliton_profile,
)


def single_transport(grid: Grid) -> None:
    q = soliton_profile(grid, SolitonParams(1.0, -20.0))
    traj = evolve(q, EvolutionConfig(dt=0.0025, t_end=10.0, record_every=400))
    n0, e0 = traj.mass_series[0], traj.energy_series[0]
    print("single soliton, c = 1, t in [0, 10]:")
    print(f"  mass drift   {abs(traj.mass_series[-1] - n0) / n0:.2e}")
    print(f"  energy drift {abs(traj.energy_series[-1] - e0) / abs(e0):.2e}")
    final = traj.snapshots[-1]
    state = decompose(final, SolitonTrain((SolitonParams(1.0, -10.0),)))
    shift = soliton_profile(grid, SolitonParams(1.0, float(state.centers[0])))
    err = l2_norm(RealField(grid, final.values - shift.values)) / l2_norm(q)
    print(f"  fitted center {state.centers[0]:+.6f} (exact -10)")
    print(f"  distance to the pure translate: {err:.2e} relative\n")


def overtaking(grid: Grid, plot: bool) -> None:
    fast = soliton_profile(grid, SolitonParams(2.0, -90.0))
    slow = soliton_profile(grid, SolitonParams(1.0, -42.0))
    u0 = RealField(grid, fast.values + slow.values)
    t_end = 78.0
    print("overtaking collision, c = (2 behind, 1 ahead), t in [0, 78]:")
    traj = evolve(u0, EvolutionConfig(dt=0.005, t_end=t_end, record_every=1560))

    from scipy.signal import find_peaks

    for i, t in enumerate(traj.times):
        u = traj.snapshots[i]
        peaks, props = find_peaks(u.values, height=0.5)
        desc = ", ".join(
            f"{2 * h:.2f}@{grid.x[p]:+.1f}" for p, h in
            sorted(zip(peaks, 0.5 * props["peak_heights"]), key=lambda s: grid.x[s[0]])
        )
        print(f"  t = {t:5.1f}: peaks (2c@x) {desc}")

    final = traj.snapshots[-1]
    peaks, props = find_peaks(final.values, height=0.5)
    order = np.argsort(grid.x[peaks])
    guess = SolitonTrain(
        tuple(
            SolitonParams(float(props["peak_heights"][order][j]) / 2.0,
                          float(grid.x[peaks][order][j]))
            for j in range(2)
        )
    )
    state = decompose(final, guess)
    print(f"  recovered speeds {state.speeds[0]:.4f}, {state.speeds[1]:.4f} "
          "(slow now behind, fast ahead)")

    if plot:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 4))
        for i in (0, len(traj.times) // 2, len(traj.times) - 1):
            ax.plot(grid.x, traj.snapshots[i].values, label=f"t = {traj.times[i]:g}")
        ax.set_xlim(-110, 110)
        ax.set_xlabel("x")
        ax.legend()
        ax.set_title("speed-2 soliton passing through a speed-1 soliton")
        fig.tight_layout()
        fig.savefig("overtaking.png", dpi=120)
        print("  wrote overtaking.png")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--plot", action="store_true")
    args = parser.parse_args()
    grid = Grid(256.0, 4096)
    single_transport(grid)
    overtaking(grid, args.plot)


if __name__ == "__main__":
    main()
