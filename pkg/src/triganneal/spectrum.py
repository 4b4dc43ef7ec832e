"""Low-lying spectra along the annealing path.

Lanczos with full reorthogonalization, seeded random start vectors and
deflation restarts. A single reorthogonalized sweep can only ever produce
one Ritz copy per eigenspace (the Krylov space meets each eigenspace in at
most one direction), so converged pairs are locked, projected out, and
restarts in the complement recover degenerate copies; a final verification
restart confirms that nothing in the complement lies below the k-th locked
value. The s=0 spectrum, with its n-fold degenerate first excited level,
exercises all of this.

Everything runs in real float64 arithmetic; in the shared basis convention
the Hamiltonian is a real symmetric matrix even with y couplings present.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import LanczosError, ValidationError
from .operator import OperatorTerms, apply_hamiltonian, schedule_coeffs

GOLDEN_TOL = 1e-4
RESIDUAL_TOL = 1e-9
_CHECK_EVERY = 12
_CLUSTER_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumSample:
    """k lowest eigenvalues (with multiplicity) of H(s) at one s."""

    s: float
    energies: tuple
    eigenvectors: tuple | None = None

    @property
    def gap(self):
        return self.energies[1] - self.energies[0]


@dataclass(frozen=True)
class GapProfile:
    """Scan of the low spectrum over an s grid, with gap annotations.

    anticrossings holds (s_loc, delta_loc, prominence) for every interior
    local minimum of Delta(s); locations and depths are golden-section
    refined when the profile was built with refine=True. The prominence is
    measured on log Delta (the rise, in log units, from the dip to the
    lower of its two adjacent maxima), because the gap at a near-closing
    sits orders of magnitude below its shoulders while remaining a tiny
    fraction of the large-s gap on a linear scale. n_anticrossings and
    count_anticrossings filter this list by prominence; the raw candidates
    stay available for inspection and recounting at other ratios.
    """

    s: np.ndarray
    energies: np.ndarray  # shape (len(s), k)
    delta_min: float
    s_min: float
    anticrossings: tuple
    stretch_width: float
    prominence_ratio: float

    @property
    def delta(self):
        return self.energies[:, 1] - self.energies[:, 0]

    @property
    def samples(self):
        return [SpectrumSample(float(si), tuple(row))
                for si, row in zip(self.s, self.energies)]

    @property
    def n_anticrossings(self):
        return count_anticrossings(self)


def _lanczos_sweep(matvec, dim, rng, locked, needed, tol, maxiter):
    """One Lanczos run in the orthogonal complement of the locked rows.

    Returns (pairs, best): pairs is the bottom-up prefix of Ritz pairs whose
    true residual ||Hy - ty|| passed tol, as (value, vector, residual)
    tuples, cut off at the first unconverged value and at ``needed``; best
    is the smallest residual seen, for diagnostics.
    """
    q = np.empty((maxiter + 1, dim))
    alpha = np.zeros(maxiter)
    beta = np.zeros(maxiter)

    v = rng.standard_normal(dim)
    if locked.shape[0]:
        v -= locked.T @ (locked @ v)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise LanczosError("start vector vanished after deflation")
    q[0] = v / nv

    best = np.inf
    j = 0
    while j < maxiter:
        w = matvec(q[j])
        alpha[j] = q[j] @ w
        w -= alpha[j] * q[j]
        if j > 0:
            w -= beta[j - 1] * q[j - 1]
        # full reorthogonalization, two passes, against both the current
        # Krylov basis and the locked eigenvectors
        basis = q[: j + 1]
        for _ in range(2):
            w -= basis.T @ (basis @ w)
            if locked.shape[0]:
                w -= locked.T @ (locked @ w)
        beta[j] = np.linalg.norm(w)
        breakdown = beta[j] < 1e-13
        if not breakdown:
            q[j + 1] = w / beta[j]
        j += 1
        if breakdown or j % _CHECK_EVERY == 0 or j == maxiter:
            vals, vecs = eigh_tridiagonal(alpha[:j], beta[: j - 1])
            pairs = []
            for idx in range(min(j, needed)):
                est = 0.0 if breakdown else abs(beta[j - 1] * vecs[-1, idx])
                if not breakdown:
                    best = min(best, est)
                if est > tol:
                    break
                y = q[:j].T @ vecs[:, idx]
                y /= np.linalg.norm(y)
                resid = float(np.linalg.norm(matvec(y) - vals[idx] * y))
                best = min(best, resid)
                if resid > tol:
                    break
                pairs.append((float(vals[idx]), y, resid))
            if len(pairs) >= needed or breakdown or j == maxiter:
                return pairs, best
    return [], best


def lanczos_lowest(terms, coeffs, k=3, seed=0, tol=RESIDUAL_TOL,
                   want_vectors=False, maxiter=None):
    """k lowest eigenvalues of H(s), degenerate copies counted.

    Raises LanczosError with the best residuals seen if the restart budget
    is exhausted before k verified pairs are locked.
    """
    dim = terms.dim
    if not (1 <= k <= 8):
        raise ValidationError("k must be between 1 and 8")
    if k > dim:
        raise ValidationError(f"k={k} exceeds dimension {dim}")
    if maxiter is None:
        maxiter = min(dim, 260)
    rng = np.random.default_rng(seed)

    buf = np.empty(dim)

    def matvec(x):
        return apply_hamiltonian(terms, coeffs, x, out=buf).copy()

    locked = []  # (value, vector, residual), unordered during assembly
    best_seen = []

    def locked_matrix():
        if not locked:
            return np.empty((0, dim))
        return np.array([p[1] for p in locked])

    def admit(val, vec, resid):
        lk = locked_matrix()
        if lk.shape[0]:
            vec = vec - lk.T @ (lk @ vec)
            nv = np.linalg.norm(vec)
            if nv < 1e-8:
                return False
            vec = vec / nv
        locked.append((val, vec, resid))
        return True

    restarts = 2 * k + 10
    fills = 0
    verified = False
    cur_maxiter = maxiter
    for _ in range(restarts):
        if len(locked) < k:
            pairs, best = _lanczos_sweep(matvec, dim, rng, locked_matrix(),
                                         k - len(locked), tol, cur_maxiter)
            best_seen.append(best)
            if not pairs:
                cur_maxiter = min(dim, cur_maxiter + cur_maxiter // 2 + 1)
            for val, vec, resid in pairs:
                if len(locked) >= k:
                    break
                admit(val, vec, resid)
        elif len(locked) >= dim:
            verified = True
            break
        else:
            # verification: the complement must hold nothing below the
            # k-th locked value, or a degenerate copy was skipped
            pairs, best = _lanczos_sweep(matvec, dim, rng, locked_matrix(),
                                         1, tol, cur_maxiter)
            best_seen.append(best)
            if not pairs:
                cur_maxiter = min(dim, cur_maxiter + cur_maxiter // 2 + 1)
                continue
            val, vec, resid = pairs[0]
            top = max(p[0] for p in locked)
            if val < top - _CLUSTER_TOL:
                locked.pop(max(range(k), key=lambda i: locked[i][0]))
                admit(val, vec, resid)
                fills += 1
                if fills > k:
                    raise LanczosError(
                        "verification keeps displacing locked values")
            else:
                verified = True
                break
    if len(locked) < k or not verified:
        raise LanczosError(
            f"{len(locked)}/{k} verified eigenpairs "
            f"(best residual estimates {sorted(best_seen)[:3]})",
            best_residuals=tuple(sorted(best_seen)))
    locked.sort(key=lambda p: p[0])
    energies = tuple(p[0] for p in locked)
    vectors = tuple(p[1] for p in locked) if want_vectors else None
    return SpectrumSample(s=coeffs.b_prob, energies=energies,
                          eigenvectors=vectors)


def _golden_minimize(f, a, b, tol=GOLDEN_TOL):
    """Golden-section search for the minimum of f on [a, b]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    if f1 <= f2:
        return x1, f1
    return x2, f2


def _local_minima(delta):
    """Indices of interior local minima (leftmost point of any plateau)."""
    idx = []
    for i in range(1, len(delta) - 1):
        if delta[i] < delta[i - 1] and delta[i] <= delta[i + 1]:
            idx.append(i)
    return idx


def _prominence(values, i):
    """Rise from minimum i to the lower of its two adjacent maxima.

    Works on any 1-D array; the gap machinery passes log Delta. The walks
    cross flat stretches so a clamped plateau does not hide its shoulders.
    """
    j = i
    while j > 0 and values[j - 1] >= values[j]:
        j -= 1
    left = values[j]
    j = i
    while j < len(values) - 1 and values[j + 1] >= values[j]:
        j += 1
    right = values[j]
    return min(left, right) - values[i]


def _log_clamped(delta):
    """log of Delta with a relative floor, so exact crossings stay finite."""
    top = float(np.max(delta))
    floor = max(1e-10 * top, 1e-300)
    return np.log(np.maximum(delta, floor)), floor


def _log_span(profile):
    """Log-scale span of the profile: from the grid maximum down to the
    refined minimum, with the same floor used for prominences."""
    logd, floor = _log_clamped(profile.delta)
    return float(logd.max() - np.log(max(profile.delta_min, floor)))


def gap_profile(problem, trigger, grid_points=1001, refine=True, k=3, seed=0,
                prominence_ratio=0.1, terms=None):
    """Scan E_0..E_{k-1} over a uniform s grid and annotate the gap.

    Every interior local minimum of Delta(s) becomes an anticrossing
    candidate; with refine=True their locations are sharpened by
    golden-section search to 1e-4 in s, and delta_min / s_min report the
    refined global minimum. Candidates carry their log-scale prominence
    (see GapProfile); counting against prominence_ratio happens in
    count_anticrossings, so the stored list is unfiltered.
    """
    if grid_points < 101:
        raise ValidationError("grid_points must be at least 101")
    if terms is None:
        terms = OperatorTerms(problem, trigger)
    s_grid = np.linspace(0.0, 1.0, grid_points)
    energies = np.empty((grid_points, k))
    for t, s in enumerate(s_grid):
        sample = lanczos_lowest(terms, schedule_coeffs(s), k=k, seed=seed)
        energies[t] = sample.energies

    # continuity guard: where a level jumps by far more than the typical
    # per-step change, refine the grid with midpoints instead of failing
    s_list = list(s_grid)
    e_list = [row.copy() for row in energies]
    steps = np.abs(np.diff(energies, axis=0)).max(axis=1)
    scale = max(float(np.median(steps)) * 50.0, 1e-6)
    inserted = 0
    t = 0
    while t < len(s_list) - 1 and inserted < grid_points // 4:
        jump = float(np.abs(e_list[t + 1] - e_list[t]).max())
        if jump > scale and s_list[t + 1] - s_list[t] > 1e-7:
            s_mid = 0.5 * (s_list[t] + s_list[t + 1])
            sample = lanczos_lowest(terms, schedule_coeffs(s_mid), k=k,
                                    seed=seed + 1)
            s_list.insert(t + 1, s_mid)
            e_list.insert(t + 1, np.array(sample.energies))
            inserted += 1
            continue
        t += 1
    s_grid = np.array(s_list)
    energies = np.asarray(e_list)

    delta = energies[:, 1] - energies[:, 0]
    logd, floor = _log_clamped(delta)

    def gap_fn(s):
        sample = lanczos_lowest(terms, schedule_coeffs(s), k=k, seed=seed)
        return sample.energies[1] - sample.energies[0]

    minima = _local_minima(delta)
    grid_arg = int(np.argmin(delta))
    refine_set = set(minima)
    if len(minima) > 32:
        # pathological jitter guard: refine only the most prominent dips
        ranked = sorted(minima, key=lambda i: _prominence(logd, i),
                        reverse=True)
        refine_set = set(ranked[:32])
        refine_set.add(grid_arg)
    anticrossings = []
    extremes = []
    for i in minima:
        if refine and i in refine_set:
            s_loc, d_loc = _golden_minimize(gap_fn, s_grid[i - 1],
                                            s_grid[i + 1])
        else:
            s_loc, d_loc = float(s_grid[i]), float(delta[i])
        # shoulder heights come from the grid, the dip from the refined value
        prom = _prominence(logd, i) + float(logd[i]) \
            - float(np.log(max(d_loc, floor)))
        anticrossings.append((float(s_loc), float(d_loc), float(prom)))
        extremes.append((float(s_loc), float(d_loc)))

    # global minimum over refined interior candidates and the grid itself
    # (the endpoints, in particular, are legitimate minimum locations)
    if refine and grid_arg not in minima and 0 < grid_arg < len(s_grid) - 1:
        s_loc, d_loc = _golden_minimize(gap_fn, s_grid[grid_arg - 1],
                                        s_grid[grid_arg + 1])
        extremes.append((float(s_loc), float(d_loc)))
    extremes.append((float(s_grid[grid_arg]), float(delta[grid_arg])))
    extremes.append((float(s_grid[0]), float(delta[0])))
    extremes.append((float(s_grid[-1]), float(delta[-1])))
    s_min, delta_min = min(extremes, key=lambda c: c[1])

    width = _stretch_width_from_grid(s_grid, delta, s_min, delta_min)
    return GapProfile(
        s=s_grid,
        energies=energies,
        delta_min=float(delta_min),
        s_min=float(s_min),
        anticrossings=tuple(anticrossings),
        stretch_width=float(width),
        prominence_ratio=prominence_ratio,
    )


def _stretch_width_from_grid(s_grid, delta, s_min, delta_min):
    """Width of the maximal interval around s_min with Delta <= 2 delta_min.

    Interval ends are linearly interpolated between grid samples.
    """
    thr = 2.0 * delta_min
    i0 = int(np.argmin(np.abs(s_grid - s_min)))
    if delta[i0] > thr:
        # the refined minimum lies between two samples that both sit above
        # the threshold, so the region is narrower than one grid cell
        lo = max(i0 - 1, 0)
        hi = min(i0 + 1, len(s_grid) - 1)
        return 0.5 * float(s_grid[hi] - s_grid[lo])
    left = i0
    while left > 0 and delta[left - 1] <= thr:
        left -= 1
    right = i0
    while right < len(s_grid) - 1 and delta[right + 1] <= thr:
        right += 1
    if left > 0:
        f = (thr - delta[left]) / (delta[left - 1] - delta[left])
        s_left = s_grid[left] + f * (s_grid[left - 1] - s_grid[left])
    else:
        s_left = float(s_grid[0])
    if right < len(s_grid) - 1:
        f = (thr - delta[right]) / (delta[right + 1] - delta[right])
        s_right = s_grid[right] + f * (s_grid[right + 1] - s_grid[right])
    else:
        s_right = float(s_grid[-1])
    return s_right - s_left


def counted_anticrossings(profile, prominence_ratio=None):
    """Anticrossing candidates passing the prominence filter.

    A candidate counts when its log-scale prominence exceeds
    prominence_ratio times the log-scale span of the whole profile. A dip
    must therefore carve a gap orders of magnitude below its shoulders to
    register, which matches what the eye picks out on a log plot: shallow
    ripples on the large-gap flanks never count, while near-closings do
    regardless of how small the surrounding gap scale is.
    """
    if prominence_ratio is None:
        prominence_ratio = profile.prominence_ratio
    threshold = prominence_ratio * _log_span(profile)
    return tuple(a for a in profile.anticrossings if a[2] > threshold)


def count_anticrossings(profile, prominence_ratio=None):
    """Number of prominence-filtered interior local minima of Delta(s)."""
    return len(counted_anticrossings(profile, prominence_ratio))


def stretch_width(profile):
    """Width in s of the region around s_min with Delta <= 2 delta_min."""
    return profile.stretch_width


def profile_table(profile):
    """Plot-ready text table: s, E_0..E_{k-1}, Delta."""
    k = profile.energies.shape[1]
    header = "s " + " ".join(f"E{i}" for i in range(k)) + " delta"
    lines = [header]
    for s, row in zip(profile.s, profile.energies):
        cols = [f"{s:.6f}"] + [f"{e:.12g}" for e in row]
        cols.append(f"{row[1] - row[0]:.12g}")
        lines.append(" ".join(cols))
    return "\n".join(lines) + "\n"
