"""Landau-Zener fits, overlap traces and the closed-form two-spin model."""

import numpy as np
import pytest

from triganneal import (
    EvolutionConfig,
    SpinProblem,
    TriggerSpec,
    TwoSpinParams,
    ValidationError,
    average_energy_trace,
    evolve,
    lz_fit,
    overlap_trace,
    twospin_eigenvalues_paper,
    twospin_gap_leading_order,
    twospin_spectrum_numeric,
    twospin_table,
)

from conftest import random_sat_problem


def lz_points(a, b, deltas):
    return [(d, 1.0 - np.exp(-a * d**b)) for d in deltas]


DELTAS = np.linspace(0.08, 0.6, 12)


# ---------------------------------------------------------------------------
# lz_fit


def test_fit_recovers_exact_parameters():
    fit = lz_fit(lz_points(3.7, 2.0, DELTAS))
    assert fit.converged
    assert fit.a == pytest.approx(3.7, rel=1e-6)
    assert fit.b == pytest.approx(2.0, abs=1e-6)
    assert fit.rms_residual < 1e-9


def test_fit_tracks_a_scaling():
    fit1 = lz_fit(lz_points(2.0, 2.0, DELTAS))
    fit10 = lz_fit(lz_points(20.0, 2.0, DELTAS))
    assert fit10.a / fit1.a == pytest.approx(10.0, rel=1e-5)


def test_fit_recovers_nonquadratic_exponent():
    fit = lz_fit(lz_points(5.0, 1.6, DELTAS))
    assert fit.converged
    assert fit.b == pytest.approx(1.6, abs=1e-6)


def test_fit_with_noise_stays_near_truth():
    rng = np.random.default_rng(17)
    pts = [(d, min(1.0, max(0.0, p + rng.normal(scale=0.004))))
           for d, p in lz_points(4.0, 2.0, np.linspace(0.05, 0.7, 30))]
    fit = lz_fit(pts)
    assert fit.converged
    assert 1.85 < fit.b < 2.15
    assert fit.rms_residual < 0.02


def test_fit_clips_saturated_points():
    pts = lz_points(3.0, 2.0, DELTAS) + [(1.5, 1.0)]
    fit = lz_fit(pts)
    assert np.isfinite(fit.a) and np.isfinite(fit.b)
    assert fit.a == pytest.approx(3.0, rel=1e-2)


def test_fit_validation():
    with pytest.raises(ValidationError):
        lz_fit(lz_points(1.0, 2.0, DELTAS[:4]))
    with pytest.raises(ValidationError):
        lz_fit([(-0.1, 0.5)] + lz_points(1.0, 2.0, DELTAS))
    with pytest.raises(ValidationError):
        lz_fit([(0.1, 1.5)] + lz_points(1.0, 2.0, DELTAS))


def test_fit_degenerate_inputs_flagged_not_raised():
    flat_p = lz_fit([(d, 0.5) for d in DELTAS])
    assert not flat_p.converged
    assert "degenerate" in flat_p.message
    assert flat_p.b == 2.0
    flat_d = lz_fit([(0.3, p) for p in np.linspace(0.2, 0.8, 7)])
    assert not flat_d.converged
    assert "exponent unconstrained" in flat_d.message


def test_fit_converges_at_the_residual_floor():
    """A fit with a nonzero residual floor stalls under strict descent
    once the cost hits the double-precision floor; the scaled gradient
    tolerance must still report it as converged."""
    pts = [(0.42243, 0.92225), (0.41458, 0.91213), (0.30231, 0.70823),
           (0.41035, 0.90901), (0.26422, 0.60336), (0.40032, 0.89619),
           (0.55015, 0.98567), (0.34937, 0.82446), (0.39301, 0.89002),
           (0.43363, 0.93236)]
    fit = lz_fit(pts)
    assert fit.converged
    assert fit.message == ""
    assert fit.n_iter < 20
    assert 1.9 < fit.b < 2.4


# ---------------------------------------------------------------------------
# overlap and energy traces


def trace_setup(seed=4, nonstoquastic=False):
    _, problem, truth = random_sat_problem(4, seed=seed,
                                           nonstoquastic=nonstoquastic)
    cfg = EvolutionConfig(t_anneal=20.0, tau=0.02, record_stride=100)
    return problem, truth, cfg


def test_overlap_trace_basic_properties():
    problem, _, cfg = trace_setup()
    trig = TriggerSpec("ferro", 1.0)
    tr = overlap_trace(problem, trig, cfg, k_levels=3)
    assert tr.s[0] == 0.0 and tr.s[-1] == 1.0
    assert tr.overlaps.shape == (len(tr.s), 3)
    assert np.all(tr.overlaps >= 0.0)
    assert np.all(tr.overlaps.sum(axis=1) <= 1.0 + 1e-9)
    assert np.all(tr.avg_energy >= tr.ground_energy - 1e-9)
    assert tr.k_levels == 3


def test_overlap_trace_starts_in_the_initial_ground_state():
    problem, _, cfg = trace_setup()
    tr = overlap_trace(problem, TriggerSpec("none", 0.0), cfg, k_levels=2)
    assert tr.overlaps[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert tr.avg_energy[0] == pytest.approx(-problem.n, abs=1e-10)
    assert tr.ground_energy[0] == pytest.approx(-problem.n, abs=1e-10)


def test_overlap_trace_final_population_equals_success_probability():
    problem, truth, cfg = trace_setup()
    trig = TriggerSpec("ferro", 0.5)
    result = evolve(problem, trig, cfg)
    tr = overlap_trace(problem, trig, cfg, result=result)
    assert truth.degeneracy == 1
    assert tr.overlaps[-1, 0] == pytest.approx(result.success_probability,
                                               abs=1e-9)


def test_overlap_trace_reuses_recorded_result():
    problem, _, cfg = trace_setup(seed=6)
    trig = TriggerSpec("antiferro", 1.0)
    result = evolve(problem, trig, cfg)
    fresh = overlap_trace(problem, trig, cfg, k_levels=2)
    reused = overlap_trace(problem, trig, cfg, k_levels=2, result=result)
    assert np.allclose(fresh.s, reused.s)
    assert np.allclose(fresh.overlaps, reused.overlaps, atol=1e-12)


def test_overlap_trace_requires_recorded_states():
    problem, _, _ = trace_setup()
    bare = evolve(problem, TriggerSpec("none", 0.0),
                  EvolutionConfig(t_anneal=1.0, tau=0.1))
    with pytest.raises(ValidationError):
        overlap_trace(problem, TriggerSpec("none", 0.0),
                      EvolutionConfig(t_anneal=1.0, tau=0.1), result=bare)


def test_overlap_trace_k_levels_validation():
    problem, _, cfg = trace_setup()
    with pytest.raises(ValidationError):
        overlap_trace(problem, TriggerSpec("none", 0.0), cfg, k_levels=0)
    with pytest.raises(ValidationError):
        overlap_trace(problem, TriggerSpec("none", 0.0), cfg, k_levels=5)


def test_average_energy_trace_matches_overlap_trace():
    problem, _, cfg = trace_setup(seed=8, nonstoquastic=True)
    trig = TriggerSpec("antiferro", 1.0)
    result = evolve(problem, trig, cfg)
    pairs = average_energy_trace(problem, trig, cfg, result=result)
    tr = overlap_trace(problem, trig, cfg, result=result)
    assert len(pairs) == len(tr.s)
    for (s, e), s_ref, e_ref in zip(pairs, tr.s, tr.avg_energy):
        assert s == s_ref
        assert e == pytest.approx(e_ref, abs=1e-12)


# ---------------------------------------------------------------------------
# two-spin closed forms
#
# One coupled pair with h_z = 0. The printed eigenvalue branches are exact
# at s = 1 and drift away from diagonalization elsewhere; the tests pin the
# agreement and the disagreement both.

GRID = [(g, jx, jy, jz)
        for g in (0.0, 0.5, 1.0, 3.0)
        for jx in (-1.0, 1.0)
        for jy in (-1.0, 1.0)
        for jz in (-1.0, 1.0, 2.0)]


def test_twospin_params_validation():
    with pytest.raises(ValidationError):
        TwoSpinParams(g=1.0, j_x=1.0, j_y=1.0, j_z=1.0, s=1.5)
    with pytest.raises(ValidationError):
        TwoSpinParams(g=np.inf, j_x=1.0, j_y=1.0, j_z=1.0, s=0.5)
    with pytest.raises(ValidationError):
        twospin_spectrum_numeric(
            TwoSpinParams(g=1.0, j_x=1.0, j_y=1.0, j_z=1.0, s=0.5),
            trigger_sign=2)


def test_twospin_closed_forms_exact_at_final_time():
    for (g, jx, jy, jz) in GRID:
        p = TwoSpinParams(g=g, j_x=jx, j_y=jy, j_z=jz, s=1.0)
        lam = np.sort(twospin_eigenvalues_paper(p))
        for sign in (-1, 1):
            num = np.array(twospin_spectrum_numeric(p, trigger_sign=sign))
            assert np.allclose(lam, num, atol=1e-12), (g, jx, jy, jz, sign)


def test_twospin_endpoint_discrepancy_is_pinned():
    """At s=0 the printed forms give (-sqrt(2), 0, 0, sqrt(2)) although the
    true transverse-field spectrum is (-2, 0, 0, 2). Kept as printed."""
    p = TwoSpinParams(g=1.0, j_x=1.0, j_y=-1.0, j_z=1.0, s=0.0)
    lam = np.sort(twospin_eigenvalues_paper(p))
    assert np.allclose(lam, [-np.sqrt(2.0), 0.0, 0.0, np.sqrt(2.0)],
                       atol=1e-12)
    num = twospin_spectrum_numeric(p)
    assert np.allclose(num, [-2.0, 0.0, 0.0, 2.0], atol=1e-12)


def test_twospin_numeric_against_hand_solution_without_trigger():
    """With g=0 the 4x4 model diagonalizes by hand: the antisymmetric state
    gives +-s j_z and the symmetric block +-sqrt(s^2 j_z^2 + 4 (1-s)^2)."""
    for jz in (-1.5, 1.0, 2.0):
        for s in np.linspace(0.0, 1.0, 21):
            p = TwoSpinParams(g=0.0, j_x=1.0, j_y=1.0, j_z=jz, s=float(s))
            big = np.sqrt((s * jz) ** 2 + 4.0 * (1.0 - s) ** 2)
            want = np.sort([-big, -s * jz, s * jz, big])
            num = np.array(twospin_spectrum_numeric(p))
            assert np.allclose(num, want, atol=1e-12)
            # the printed branches keep the +-s j_z pair but carry
            # 2 (1-s)^2 instead of 4 (1-s)^2 under their square root
            lam = twospin_eigenvalues_paper(p)
            assert {round(lam[1], 12), round(lam[2], 12)} == \
                {round(-s * jz, 12), round(s * jz, 12)}
            lam_big = np.sqrt((s * jz) ** 2 + 2.0 * (1.0 - s) ** 2)
            assert lam[0] == pytest.approx(-lam_big, abs=1e-12)
            assert lam[3] == pytest.approx(lam_big, abs=1e-12)


def test_twospin_branches_track_numeric_near_final_time():
    for (g, jx, jy, jz) in GRID:
        p = TwoSpinParams(g=g, j_x=jx, j_y=jy, j_z=jz, s=0.999)
        lam = np.sort(twospin_eigenvalues_paper(p))
        num = np.array(twospin_spectrum_numeric(p))
        assert np.max(np.abs(lam - num)) < 1e-4, (g, jx, jy, jz)


def test_twospin_radicand_never_negative_on_parameter_grid():
    for (g, jx, jy, jz) in GRID:
        for s in np.linspace(0.0, 1.0, 101):
            twospin_eigenvalues_paper(
                TwoSpinParams(g=g, j_x=jx, j_y=jy, j_z=jz, s=float(s)))


def crossing_minima(g, jx, jy, jz, pair, sign):
    """Grid local minima of a sorted-spectrum gap that dip below 0.05."""
    s_grid = np.linspace(0.0, 1.0, 4001)
    e = np.array([twospin_spectrum_numeric(
        TwoSpinParams(g=g, j_x=jx, j_y=jy, j_z=jz, s=float(s)),
        trigger_sign=sign) for s in s_grid])
    gap = e[:, pair[1]] - e[:, pair[0]]
    return [(float(s_grid[i]), float(gap[i])) for i in range(1, len(gap) - 1)
            if gap[i] < gap[i - 1] and gap[i] <= gap[i + 1] and gap[i] < 0.05]


def test_twospin_strong_antiferro_crossing_pattern():
    """g=3, j_x=j_y=-1, j_z=1 with the default sign: the two lowest levels
    touch twice and the next pair once; the bare positive coupling shows
    no near-touching at all."""
    lows = crossing_minima(3.0, -1.0, -1.0, 1.0, (0, 1), sign=-1)
    assert len(lows) == 2
    assert lows[0][0] == pytest.approx(1.0 / 3.0, abs=2e-3)
    assert lows[1][0] == pytest.approx(0.6077, abs=2e-3)
    mids = crossing_minima(3.0, -1.0, -1.0, 1.0, (1, 2), sign=-1)
    assert len(mids) == 1
    assert mids[0][0] == pytest.approx(2.0 / 3.0, abs=2e-3)
    for (_, depth) in lows + mids:
        assert depth < 1e-3
    assert crossing_minima(3.0, -1.0, -1.0, 1.0, (0, 1), sign=1) == []
    assert crossing_minima(3.0, -1.0, -1.0, 1.0, (1, 2), sign=1) == []


def test_twospin_leading_order_gaps():
    """Near s=1 the trigger-dominated gap follows the leading-order formula
    to well under a percent. Which adjacent numeric gap it describes flips
    with the sign of j_z (the closed-form branch ordering flips there)."""
    s = 0.999
    cases = [
        # (params, formula index 0 = d12 / 1 = d34, numeric gap pair)
        ((2.0, 1.0, -1.0, 1.0), 0, (0, 1)),
        ((2.0, -1.0, 1.0, 1.0), 0, (0, 1)),
        ((1.5, 1.0, 1.0, 1.0), 1, (2, 3)),
        ((3.0, -1.0, -1.0, 1.0), 1, (2, 3)),
        ((2.0, 1.0, -1.0, -1.0), 0, (2, 3)),
        ((2.0, 1.0, 1.0, -1.0), 1, (0, 1)),
    ]
    for (g, jx, jy, jz), which, pair in cases:
        p = TwoSpinParams(g=g, j_x=jx, j_y=jy, j_z=jz, s=s)
        d = abs(twospin_gap_leading_order(p)[which])
        num = twospin_spectrum_numeric(p)
        gap = num[pair[1]] - num[pair[0]]
        assert gap == pytest.approx(d, rel=0.01), (g, jx, jy, jz)


def test_twospin_leading_order_misses_factor_two_without_trigger_split():
    """When g (j_x - j_y) = 0 the Delta_12 formula degenerates to its
    (1-s)^2 term and sits at half the numeric gap. Pinned, not hidden."""
    p = TwoSpinParams(g=1.5, j_x=1.0, j_y=1.0, j_z=1.0, s=0.999)
    d12 = abs(twospin_gap_leading_order(p)[0])
    num = twospin_spectrum_numeric(p)
    ratio = (num[1] - num[0]) / d12
    assert 1.9 < ratio < 2.1


def test_twospin_leading_order_validation():
    with pytest.raises(ValidationError):
        twospin_gap_leading_order(
            TwoSpinParams(g=1.0, j_x=1.0, j_y=1.0, j_z=0.0, s=0.5))
    with pytest.raises(ValidationError):
        twospin_gap_leading_order(
            TwoSpinParams(g=1.0, j_x=1.0, j_y=1.0, j_z=1.0, s=0.0))


def test_twospin_table_layout():
    text = twospin_table(2.0, -1.0, -1.0, 1.0, s_values=[0.0, 0.5, 1.0])
    lines = text.splitlines()
    assert lines[0] == "s l1 l2 l3 l4 e1 e2 e3 e4"
    assert len(lines) == 4
    last = [float(x) for x in lines[-1].split()]
    assert last[0] == 1.0
    assert sorted(last[1:5]) == pytest.approx(last[5:9], abs=1e-12)
