"""How a trigger term reshapes the minimum gap of a 12-spin instance.

Scans the lowest part of the annealing spectrum for the bundled
nonstoquastic instance "709" under no trigger, a ferromagnetic trigger,
and an antiferromagnetic trigger at a few strengths. The ferromagnetic
trigger widens the single avoided crossing monotonically with g. The
antiferromagnetic trigger instead splits it: at g=2 the gap profile
carries two separate near-closings, and the sweep prints where they sit.

Runtime is a few minutes on one core (seven 201-point Lanczos scans of
a 4096-dimensional spectrum).

Run: python3 demos/trigger_gap_demo.py
"""

from triganneal import (
    TriggerSpec,
    counted_anticrossings,
    gap_profile,
    load_fixture,
)

LABEL = "709"
GRID = 201
STRENGTHS = (0.5, 1.0, 2.0)


def main():
    problem = load_fixture(LABEL)
    print(f"instance {LABEL}: n={problem.n}, nonstoquastic problem "
          f"(y couplings on the J graph)")
    print()
    print(f"{'trigger':>10} {'g':>4} {'delta_min':>10} {'s_min':>7} "
          f"{'crossings':>9}")

    rows = [(TriggerSpec("none", 0.0),)]
    rows += [(TriggerSpec(kind, g),)
             for kind in ("ferro", "antiferro") for g in STRENGTHS]
    profiles = {}
    for (trigger,) in rows:
        profile = gap_profile(problem, trigger, grid_points=GRID, k=2)
        profiles[(trigger.kind, trigger.g)] = profile
        print(f"{trigger.kind:>10} {trigger.g:4.1f} "
              f"{profile.delta_min:10.5f} {profile.s_min:7.3f} "
              f"{profile.n_anticrossings:9d}")

    print()
    print("antiferro g=2.0 counted anticrossings:")
    for s_loc, d_loc, prom in counted_anticrossings(
            profiles[("antiferro", 2.0)]):
        print(f"  s={s_loc:.4f}  delta={d_loc:.5f}  "
              f"log-prominence={prom:.2f}")

    d_none = profiles[("none", 0.0)].delta_min
    d_ferro = profiles[("ferro", 2.0)].delta_min
    print()
    print(f"gap ratio ferro g=2 vs no trigger: {d_ferro / d_none:.2f}")


if __name__ == "__main__":
    main()
