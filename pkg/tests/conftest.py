"""Shared helpers for the test suite.

dense_by_enumeration builds H(s) entry by entry from the definition, with
plain bit arithmetic and none of the package's operator code, so comparing
it against the library exercises two independent routes to the same matrix.
"""

import numpy as np

from triganneal import (
    SpinProblem,
    TriggerSpec,
    generate_2sat_instance,
    map_formula_to_problem,
)


def dense_by_enumeration(problem, trigger, s):
    """H(s) as an explicit real matrix, built from the definition.

    H = -(1-s) sum_i sigma^x_i
        + s(1-s) * (-g) sum_pairs J^x sigma^x sigma^x
        + s * (-sum h sigma^z - sum J sigma^z sigma^z - sum v sigma^y sigma^y)

    Basis: bit (i-1) of the index holds spin i, bit 0 means sigma^z = +1.
    The sigma^y sigma^y element between k and k with both bits flipped is
    -1 when the two bits agree and +1 when they differ.
    """
    n = problem.n
    dim = 1 << n
    a, b, c = (1.0 - s), s, s * (1.0 - s)
    w_trig = trigger.j_x * trigger.g if trigger.kind != "none" else 0.0
    v_y = problem.y_coupling_strength
    h = np.zeros((dim, dim))
    for k in range(dim):
        sz = [1.0 - 2.0 * ((k >> i) & 1) for i in range(n)]
        diag = -sum(problem.h_z[i] * sz[i] for i in range(n))
        for (i, j, jz) in problem.z_couplings:
            diag -= jz * sz[i - 1] * sz[j - 1]
        h[k, k] += b * diag
        for i in range(n):
            h[k ^ (1 << i), k] += -a
        for (i, j) in problem.coupled_pairs():
            flip = (1 << (i - 1)) | (1 << (j - 1))
            if w_trig != 0.0:
                h[k ^ flip, k] += -c * w_trig
            if v_y != 0.0:
                bi = (k >> (i - 1)) & 1
                bj = (k >> (j - 1)) & 1
                elem = -1.0 if bi == bj else 1.0
                h[k ^ flip, k] += -b * v_y * elem
    return h


def random_problem(n, rng, density=0.6, nonstoquastic=False):
    """Random integer-valued SpinProblem on a random graph."""
    h = rng.integers(-2, 3, size=n).astype(float)
    couplings = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rng.random() < density:
                jz = float(rng.choice([-2, -1, 1, 2]))
                couplings.append((i, j, jz))
    if not couplings:
        couplings.append((1, 2, 1.0))
    problem = SpinProblem(n=n, h_z=h, z_couplings=tuple(couplings))
    if nonstoquastic:
        problem = problem.with_y_couplings(0.5)
    return problem


def random_sat_problem(n, seed, nonstoquastic=False, label=""):
    formula, truth = generate_2sat_instance(n, seed=seed)
    problem = map_formula_to_problem(formula, nonstoquastic=nonstoquastic,
                                     label=label)
    return formula, problem, truth


def four_configs(problem):
    """The four trigger/problem configurations used throughout the tests:
    {stoquastic, nonstoquastic problem} x {ferro, antiferro trigger}."""
    plain = problem if problem.y_coupling_strength == 0.0 \
        else SpinProblem(n=problem.n, h_z=problem.h_z,
                         z_couplings=problem.z_couplings, label=problem.label)
    nonstoq = plain.with_y_couplings(0.5)
    return [
        (plain, TriggerSpec("ferro", 1.0)),
        (plain, TriggerSpec("antiferro", 1.0)),
        (nonstoq, TriggerSpec("ferro", 1.0)),
        (nonstoq, TriggerSpec("antiferro", 1.0)),
    ]
