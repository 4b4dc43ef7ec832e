"""Two-spin model: closed-form spectrum against exact diagonalization.

Walks the analytic branches across the anneal for a strongly triggered
antiferromagnetic pair and prints where they succeed and where they are
known to drift:

  * at s=1 the closed form is exact for any coupling choice,
  * near s=1 the leading-order gap formulas track the true splittings,
  * at s=0 the analytic branches give +-sqrt(2) while the true
    eigenvalues are +-2 (both spins see the full transverse field),
  * with the nonstoquastic trigger sign the low branch pinches twice.

Run: python3 demos/two_spin_demo.py
"""

import numpy as np

from triganneal import (
    TwoSpinParams,
    twospin_eigenvalues_paper,
    twospin_gap_leading_order,
    twospin_spectrum_numeric,
)

G = 3.0
JX = -1.0
JY = -1.0
JZ = 1.0


def branch_table(trigger_sign):
    print(f"trigger_sign={trigger_sign:+d}  "
          f"(g={G}, jx={JX}, jy={JY}, jz={JZ})")
    print(f"{'s':>6} {'gap01 exact':>12} {'gap01 analytic':>15} "
          f"{'worst branch err':>17}")
    for s in (0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0):
        params = TwoSpinParams(g=G, j_x=JX, j_y=JY, j_z=JZ, s=s)
        num = twospin_spectrum_numeric(params, trigger_sign=trigger_sign)
        lam = np.sort(twospin_eigenvalues_paper(params))
        err = np.max(np.abs(lam - num))
        print(f"{s:6.2f} {num[1] - num[0]:12.6f} "
              f"{lam[1] - lam[0]:15.6f} {err:17.3e}")
    print()


def crossing_scan(trigger_sign):
    s_grid = np.linspace(0.0, 1.0, 4001)
    gaps = np.empty_like(s_grid)
    for i, s in enumerate(s_grid):
        params = TwoSpinParams(g=G, j_x=JX, j_y=JY, j_z=JZ, s=s)
        num = twospin_spectrum_numeric(params, trigger_sign=trigger_sign)
        gaps[i] = num[1] - num[0]
    inner = (gaps[1:-1] < gaps[:-2]) & (gaps[1:-1] < gaps[2:])
    dips = [(s_grid[i + 1], gaps[i + 1])
            for i in np.nonzero(inner)[0] if gaps[i + 1] < 0.05]
    print(f"trigger_sign={trigger_sign:+d}: "
          f"{len(dips)} near-closing dips in the 0-1 gap")
    for s_loc, d_loc in dips:
        print(f"  s={s_loc:.4f}  gap={d_loc:.2e}")
    print()


def main():
    for sign in (-1, 1):
        branch_table(sign)

    print("late-anneal check at s=0.999:")
    params = TwoSpinParams(g=G, j_x=JX, j_y=JY, j_z=JZ, s=0.999)
    d12, d34 = twospin_gap_leading_order(params)
    num = twospin_spectrum_numeric(params, trigger_sign=-1)
    print(f"  |d34| leading order = {abs(d34):.6e}")
    print(f"  exact e3 - e2       = {num[3] - num[2]:.6e}")
    print()

    for sign in (-1, 1):
        crossing_scan(sign)

    print("note: with trigger_sign=-1 the pair spectrum pinches near "
          "s=1/3 and s=0.61;\nflipping the sign removes both closings "
          "without touching the s=1 spectrum.")


if __name__ == "__main__":
    main()
