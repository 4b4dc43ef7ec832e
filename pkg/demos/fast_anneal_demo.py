"""A case where annealing faster wins.

Instance "950" with an antiferromagnetic trigger at g=0.5 develops a
narrow anticrossing late in the sweep. Amplitude that leaks out of the
ground state earlier partially returns to the ground branch there, so a
fast sweep (T=10) ends with more ground-state population than a slow
one (T=100), which arrives fully in the ground state and loses nearly
all of it in the jump. This script runs both schedules at a converged
Trotter step and prints the success probabilities with the level
populations along the way.

Runtime is about half a minute on one core.

Run: python3 demos/fast_anneal_demo.py
"""

from triganneal import (
    EvolutionConfig,
    TriggerSpec,
    evolve,
    load_fixture,
    overlap_trace,
)

LABEL = "950"
TRIGGER = TriggerSpec("antiferro", 0.5)
TAU = 0.01


def run_schedule(problem, t_anneal):
    config = EvolutionConfig(t_anneal=t_anneal, tau=TAU,
                             record_stride=max(1, int(t_anneal / TAU) // 8))
    result = evolve(problem, TRIGGER, config)
    trace = overlap_trace(problem, TRIGGER, config, k_levels=3,
                          result=result)
    print(f"T_A = {t_anneal:g}")
    print(f"{'s':>5} {'pop0':>8} {'pop1':>8} {'pop2':>8}")
    for t in range(len(trace.s)):
        p0, p1, p2 = trace.overlaps[t]
        print(f"{trace.s[t]:5.2f} {p0:8.4f} {p1:8.4f} {p2:8.4f}")
    print(f"success probability: {result.success_probability:.6f}")
    print()
    return result.success_probability


def main():
    problem = load_fixture(LABEL)
    print(f"instance {LABEL} with {TRIGGER.kind} trigger, g={TRIGGER.g}, "
          f"tau={TAU}")
    print()
    p_fast = run_schedule(problem, 10.0)
    p_slow = run_schedule(problem, 100.0)
    print(f"p(T=10) / p(T=100) = {p_fast / p_slow:.1f}")
    print("both sweeps jump the narrow anticrossing near s=0.7, but the "
          "fast sweep\narrives with amplitude already leaked into the "
          "low excited states and part\nof it returns to the ground "
          "branch at the crossing; the slow sweep arrives\nfully in the "
          "ground state and the jump takes essentially all of it.")


if __name__ == "__main__":
    main()
