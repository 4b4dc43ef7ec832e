"""The annealing Hamiltonian H(s) = (1-s) H_I + s(1-s) H_T + s H_P.

H_I = -sum_i h^x_i sigma^x_i (h^x = 1), H_T = -g sum J^x sigma^x sigma^x on
the problem graph, H_P = -sum h^z sigma^z - sum (J^z sigma^z sigma^z
+ v sigma^y sigma^y) with v = y_coupling_strength on the same graph.

In the shared basis convention every term of H(s) is real, so H is a real
symmetric matrix; apply_hamiltonian accepts real or complex vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError

_EMPTY_I = np.zeros(0, dtype=np.int64)
_EMPTY_W = np.zeros(0, dtype=np.float64)


@dataclass(frozen=True)
class ScheduleCoefficients:
    """Linear-scheme prefactors at annealing parameter s."""

    a_init: float
    b_prob: float
    c_trig: float

    @property
    def s(self):
        return self.b_prob


def schedule_coeffs(s):
    """Coefficients ((1-s), s, s(1-s)) of the three Hamiltonian terms."""
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValidationError(f"annealing parameter s={s} outside [0, 1]")
    return ScheduleCoefficients(a_init=1.0 - s, b_prob=s, c_trig=s * (1.0 - s))


class OperatorTerms:
    """Precomputed, schedule-independent pieces of H(s) for one problem.

    diag_energy holds the z-part diagonal over all 2^n basis states;
    xx_pairs carries (i, j, J^x * g) with 1-based i < j, yy_pairs
    (i, j, y_strength). Pair lists are canonically sorted. Zero-J couplings
    of the problem are skipped and carry neither trigger nor y terms.
    """

    def __init__(self, problem, trigger):
        self.n = problem.n
        self.problem = problem
        self.trigger = trigger
        pairs = problem.coupled_pairs()
        jz = {(i, j): v for (i, j, v) in problem.z_couplings}

        p_lo = np.array([i - 1 for (i, j, v) in problem.z_couplings if v != 0.0],
                        dtype=np.int64)
        p_hi = np.array([j - 1 for (i, j, v) in problem.z_couplings if v != 0.0],
                        dtype=np.int64)
        p_w = np.array([v for (i, j, v) in problem.z_couplings if v != 0.0],
                       dtype=np.float64)
        self.diag_energy = kernels.build_diagonal(self.n, problem.h_z, p_lo, p_hi, p_w)

        self.x_field = np.ones(self.n)

        if trigger.kind == "none" or trigger.g == 0.0:
            self.xx_pairs = ()
        else:
            w = trigger.j_x * trigger.g
            self.xx_pairs = tuple((i, j, w) for (i, j) in pairs)
        if problem.y_coupling_strength != 0.0:
            self.yy_pairs = tuple((i, j, problem.y_coupling_strength) for (i, j) in pairs)
        else:
            self.yy_pairs = ()

        # packed 0-based arrays for the kernels
        self._xx_lo = np.array([i - 1 for (i, j, w) in self.xx_pairs], dtype=np.int64)
        self._xx_hi = np.array([j - 1 for (i, j, w) in self.xx_pairs], dtype=np.int64)
        self._xx_w = np.array([w for (i, j, w) in self.xx_pairs], dtype=np.float64)
        self._yy_lo = np.array([i - 1 for (i, j, w) in self.yy_pairs], dtype=np.int64)
        self._yy_hi = np.array([j - 1 for (i, j, w) in self.yy_pairs], dtype=np.int64)
        self._yy_w = np.array([w for (i, j, w) in self.yy_pairs], dtype=np.float64)

    @property
    def dim(self):
        return 1 << self.n


def build_operator_terms(problem, trigger):
    return OperatorTerms(problem, trigger)


def apply_hamiltonian(terms, coeffs, psi, out=None):
    """H(s) psi without forming a matrix. psi may be real or complex."""
    psi = np.asarray(psi)
    if psi.shape != (terms.dim,):
        raise ValidationError(
            f"state has shape {psi.shape}, expected ({terms.dim},)")
    if out is None:
        out = np.empty_like(psi)
    kernels.apply_h(out, psi, terms.diag_energy, terms.n, terms.x_field,
                    terms._xx_lo, terms._xx_hi, terms._xx_w,
                    terms._yy_lo, terms._yy_hi, terms._yy_w,
                    coeffs.a_init, coeffs.b_prob, coeffs.c_trig)
    return out


def is_stoquastic(terms, coeffs):
    """True iff every computational-basis off-diagonal element is <= 0.

    The check is per off-diagonal entry, which matters when xx and yy terms
    sit on the same pair: their contributions land on the same matrix
    elements and may cancel. For a pair with trigger weight w and y weight
    v the two off-diagonal variants are -c*w -/+ b*v, so the pair is
    stoquastic iff c*w >= |b*v|. Single sigma^x entries are -a*h^x.
    """
    a, b, c = coeffs.a_init, coeffs.b_prob, coeffs.c_trig
    for hx in terms.x_field:
        if a * hx < 0.0:
            return False
    xx = {(i, j): w for (i, j, w) in terms.xx_pairs}
    yy = {(i, j): w for (i, j, w) in terms.yy_pairs}
    for pair in set(xx) | set(yy):
        w = xx.get(pair, 0.0)
        v = yy.get(pair, 0.0)
        if c * w < abs(b * v):
            return False
    return True


# ---------------------------------------------------------------------------
# dense reference construction
#
# Built from explicit Pauli tensor products, on purpose not sharing any code
# with the kernels above; tests compare the two routes.
# ---------------------------------------------------------------------------

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _kron_site_op(n, ops):
    """Tensor product placing 2x2 ``ops[i]`` on 1-based spin i.

    numpy.kron(A, B) puts B on the fast (low bit) index, so building from
    spin n down to spin 1 leaves spin 1 on the least significant bit.
    """
    mat = np.eye(1, dtype=complex)
    for i in range(n, 0, -1):
        op = ops.get(i, np.eye(2, dtype=complex))
        mat = np.kron(mat, op)
    return mat


def dense_hamiltonian(terms, coeffs):
    """Explicit 2^n x 2^n matrix of H(s), for small-n validation."""
    n = terms.n
    if n > 12:
        raise ValidationError("dense construction capped at n=12")
    a, b, c = coeffs.a_init, coeffs.b_prob, coeffs.c_trig
    h = np.zeros((terms.dim, terms.dim), dtype=complex)
    for i in range(1, n + 1):
        h -= a * terms.x_field[i - 1] * _kron_site_op(n, {i: _SX})
    for i in range(1, n + 1):
        h -= b * terms.problem.h_z[i - 1] * _kron_site_op(n, {i: _SZ})
    for (i, j, jz) in terms.problem.z_couplings:
        if jz != 0.0:
            h -= b * jz * _kron_site_op(n, {i: _SZ, j: _SZ})
    for (i, j, w) in terms.xx_pairs:
        h -= c * w * _kron_site_op(n, {i: _SX, j: _SX})
    for (i, j, w) in terms.yy_pairs:
        h -= b * w * _kron_site_op(n, {i: _SY, j: _SY})
    return h
