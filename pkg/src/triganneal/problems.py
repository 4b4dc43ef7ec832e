"""2-SAT formulas, Ising problem Hamiltonians and the mapping between them.

Conventions used throughout the package:

* Spins are indexed 1..n. Basis index k stores spin i in bit (i-1), so the
  least significant bit is spin 1. Bit value 0 encodes sigma^z = +1.
* A Boolean variable is true when its spin is +1.
* The diagonal problem energy is E(sigma) = -sum_i h_i sigma_i
  - sum_(i<j) J_ij sigma_i sigma_j. Mapped 2-SAT problems drop the constant
  +1 per clause, so E(sigma) + M = 4 * (number of violated clauses).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import CapacityError, GenerationError, ValidationError

BRUTE_FORCE_MAX_N = 24
GENERATE_MAX_ATTEMPTS = 10**6

# minimizer lists larger than this are not stored on GroundTruth
_MAX_STORED_MINIMIZERS = 1 << 16


@dataclass(frozen=True)
class Clause:
    """Disjunction of two literals over distinct variables.

    ``neg_a`` / ``neg_b`` mark negated literals. Indices are 1-based.
    """

    var_a: int
    neg_a: bool
    var_b: int
    neg_b: bool

    def __post_init__(self):
        if self.var_a == self.var_b:
            raise ValidationError(f"clause uses variable {self.var_a} twice")
        if self.var_a < 1 or self.var_b < 1:
            raise ValidationError("variable indices are 1-based")

    def key(self):
        """Identity of the clause up to literal order."""
        lits = sorted([(self.var_a, self.neg_a), (self.var_b, self.neg_b)])
        return tuple(lits)

    def is_satisfied(self, assignment):
        """Evaluate on a length-n sequence of +-1 spins (+1 = true)."""
        val_a = assignment[self.var_a - 1] == (-1 if self.neg_a else 1)
        val_b = assignment[self.var_b - 1] == (-1 if self.neg_b else 1)
        return val_a or val_b


@dataclass(frozen=True)
class SatFormula:
    """Conjunction of M clauses over n_vars Boolean variables."""

    n_vars: int
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if c.var_a > self.n_vars or c.var_b > self.n_vars:
                raise ValidationError(
                    f"clause ({c.var_a},{c.var_b}) exceeds n_vars={self.n_vars}")

    @property
    def n_clauses(self):
        return len(self.clauses)

    def count_satisfying(self):
        """Number of satisfying assignments, by exhaustive enumeration."""
        if self.n_vars > BRUTE_FORCE_MAX_N:
            raise CapacityError(f"n_vars={self.n_vars} too large to enumerate")
        sigma = _all_assignments(self.n_vars)
        ok = np.ones(sigma.shape[0], dtype=bool)
        for c in self.clauses:
            want_a = -1 if c.neg_a else 1
            want_b = -1 if c.neg_b else 1
            ok &= (sigma[:, c.var_a - 1] == want_a) | (sigma[:, c.var_b - 1] == want_b)
        return int(ok.sum())


@dataclass(frozen=True)
class SpinProblem:
    """Ising problem Hamiltonian data.

    h_z is a length-n array; z_couplings is a tuple of (i, j, J) with
    1 <= i < j <= n and no duplicate pairs. y_coupling_strength is 0 for
    plain 2-SAT problems and 0.5 for the nonstoquastic variants (y couplings
    sit on the pairs of the z-coupling graph, i.e. the pairs with J != 0).
    Explicit J = 0 entries are legal and kept; the operator layer skips them.
    """

    n: int
    h_z: np.ndarray
    z_couplings: tuple
    y_coupling_strength: float = 0.0
    label: str = ""

    def __post_init__(self):
        h = np.asarray(self.h_z, dtype=float)
        if h.shape != (self.n,):
            raise ValidationError(f"h_z must have length n={self.n}")
        object.__setattr__(self, "h_z", h)
        seen = set()
        zc = []
        for (i, j, jz) in self.z_couplings:
            i, j = int(i), int(j)
            if i == j:
                raise ValidationError(f"coupling ({i},{j}) has i = j")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValidationError(f"coupling ({i},{j}) out of range for n={self.n}")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise ValidationError(f"duplicate coupling pair ({i},{j})")
            seen.add((i, j))
            zc.append((i, j, float(jz)))
        zc.sort(key=lambda t: (t[0], t[1]))
        object.__setattr__(self, "z_couplings", tuple(zc))

    def coupled_pairs(self):
        """Pairs of the problem graph: z couplings with J != 0."""
        return tuple((i, j) for (i, j, jz) in self.z_couplings if jz != 0.0)

    def with_y_couplings(self, strength=0.5):
        return replace(self, y_coupling_strength=float(strength))


@dataclass(frozen=True)
class TriggerSpec:
    """Trigger Hamiltonian choice: kind in {'none', 'ferro', 'antiferro'}.

    ferro puts J^x = +1 on every coupled pair, antiferro J^x = -1; g scales
    the whole trigger term. g is ignored for kind 'none'.
    """

    kind: str = "none"
    g: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "ferro", "antiferro"):
            raise ValidationError(f"unknown trigger kind {self.kind!r}")
        if self.kind != "none" and self.g < 0:
            raise ValidationError("trigger strength g must be nonnegative")

    @property
    def j_x(self):
        if self.kind == "ferro":
            return 1.0
        if self.kind == "antiferro":
            return -1.0
        return 0.0


@dataclass(frozen=True)
class GroundTruth:
    """Exact diagonal ground-state data from brute force.

    bitstring is one minimizing assignment as +-1 spins; minimizer_indices
    lists the basis indices of all minimizers when the degeneracy is small
    enough to store (None otherwise).
    """

    bitstring: tuple
    energy: float
    degeneracy: int
    first_excited_energy: float
    first_excited_degeneracy: int
    minimizer_indices: tuple | None = None

    @property
    def index(self):
        """Basis index of ``bitstring`` (bit i-1 set when spin i is -1)."""
        k = 0
        for i, s in enumerate(self.bitstring):
            if s == -1:
                k |= 1 << i
        return k


def _all_assignments(n):
    """(2^n, n) array of +-1 spins; row k follows the bit convention."""
    k = np.arange(1 << n, dtype=np.int64)
    bits = (k[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def diagonal_energies(problem):
    """Diagonal z-part energy of every basis state, as a float array.

    y couplings are off-diagonal and do not enter.
    """
    if problem.n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"n={problem.n} exceeds diagonal-enumeration capacity")
    sigma = _all_assignments(problem.n).astype(np.float64)
    energy = -(sigma @ problem.h_z)
    for (i, j, jz) in problem.z_couplings:
        if jz != 0.0:
            energy -= jz * sigma[:, i - 1] * sigma[:, j - 1]
    return energy


def map_clause_to_terms(clause):
    """Additive Ising contributions of one clause.

    Returns ((var_a, eps_a), (var_b, eps_b), (i, j, -eps_a*eps_b)) where
    eps = +1 for a plain literal and -1 for a negated one. The clause cost
    under the +1 = true convention is
    eps_a*eps_b*s_a*s_b - eps_a*s_a - eps_b*s_b + 1, which is 0 when
    satisfied and 4 when violated; the +1 is dropped by the mapping.
    """
    eps_a = -1.0 if clause.neg_a else 1.0
    eps_b = -1.0 if clause.neg_b else 1.0
    i, j = clause.var_a, clause.var_b
    if i > j:
        i, j = j, i
    return ((clause.var_a, eps_a), (clause.var_b, eps_b), (i, j, -eps_a * eps_b))


def map_formula_to_problem(formula, nonstoquastic=False, label=""):
    """Accumulate clause contributions into a SpinProblem.

    Pairs whose accumulated J cancels to zero are left out of the coupling
    list (a cancelled pair is not part of the problem graph). With
    nonstoquastic=True the y_coupling_strength is set to 0.5.
    """
    h = np.zeros(formula.n_vars)
    jmap = {}
    for c in formula.clauses:
        (ia, ea), (ib, eb), (i, j, jz) = map_clause_to_terms(c)
        h[ia - 1] += ea
        h[ib - 1] += eb
        jmap[(i, j)] = jmap.get((i, j), 0.0) + jz
    couplings = tuple((i, j, v) for (i, j), v in sorted(jmap.items()) if v != 0.0)
    return SpinProblem(
        n=formula.n_vars,
        h_z=h,
        z_couplings=couplings,
        y_coupling_strength=0.5 if nonstoquastic else 0.0,
        label=label,
    )


def brute_force_solve(problem):
    """Exact ground-state data of the diagonal z-part, by enumeration.

    Ignores y couplings. Refuses n > 24.
    """
    if problem.n > BRUTE_FORCE_MAX_N:
        raise CapacityError(
            f"brute force capped at n={BRUTE_FORCE_MAX_N}, got n={problem.n}")
    energy = diagonal_energies(problem)
    order = np.argsort(energy, kind="stable")
    e0 = energy[order[0]]
    # tolerance keeps exact integer fixtures exact while tolerating float h/J
    tol = 1e-9 * max(1.0, float(np.abs(energy).max()))
    is_min = np.abs(energy - e0) <= tol
    degeneracy = int(is_min.sum())
    above = energy[~is_min]
    if above.size:
        e1 = float(above.min())
        deg1 = int((np.abs(above - e1) <= tol).sum())
    else:
        # fully degenerate problem: report the single level twice
        e1 = float(e0)
        deg1 = degeneracy
    k0 = int(order[0])
    bits = [(k0 >> (i)) & 1 for i in range(problem.n)]
    bitstring = tuple(1 - 2 * b for b in bits)
    minimizers = None
    if degeneracy <= _MAX_STORED_MINIMIZERS:
        minimizers = tuple(int(k) for k in np.nonzero(is_min)[0])
    return GroundTruth(
        bitstring=bitstring,
        energy=float(e0),
        degeneracy=degeneracy,
        first_excited_energy=e1,
        first_excited_degeneracy=deg1,
        minimizer_indices=minimizers,
    )


def generate_2sat_instance(n, seed):
    """Random threshold 2-SAT instance with a unique satisfying assignment.

    Draws M = n+1 clauses (variable pair uniform over unordered distinct
    pairs, negation pattern uniform, duplicate clauses redrawn), counts the
    satisfying assignments by brute force and redraws the whole formula
    until exactly one remains. Deterministic in (n, seed).

    Returns (SatFormula, GroundTruth) where the ground truth belongs to the
    mapped SpinProblem.
    """
    if not (2 <= n <= BRUTE_FORCE_MAX_N):
        raise CapacityError(f"generator supports 2 <= n <= {BRUTE_FORCE_MAX_N}")
    rng = np.random.default_rng(seed)
    m = n + 1
    for _ in range(GENERATE_MAX_ATTEMPTS):
        clauses = []
        keys = set()
        guard = 0
        while len(clauses) < m:
            guard += 1
            if guard > 100 * m + 1000:
                break  # pathological duplicate streak, redraw formula
            a = int(rng.integers(1, n + 1))
            b = int(rng.integers(1, n + 1))
            if a == b:
                continue
            c = Clause(a, bool(rng.integers(2)), b, bool(rng.integers(2)))
            if c.key() in keys:
                continue
            keys.add(c.key())
            clauses.append(c)
        if len(clauses) < m:
            continue
        formula = SatFormula(n, tuple(clauses))
        if formula.count_satisfying() == 1:
            problem = map_formula_to_problem(formula)
            return formula, brute_force_solve(problem)
    raise GenerationError(
        f"no unique-assignment instance found in {GENERATE_MAX_ATTEMPTS} attempts")


# ---------------------------------------------------------------------------
# instance files
#
# Two formats are understood. The tabular text format mirrors the layout of
# the printed problem tables:
#
#     n 12
#     h 1 0
#     h 2 1
#     J 1 4 1
#     J 1 11 1
#
# The structured JSON format is self-describing and carries optional
# metadata: {"n": .., "h_z": [..], "z_couplings": [[i, j, J], ..],
# "y_coupling_strength": .., "label": ..}.
# ---------------------------------------------------------------------------


def _format_value(v):
    return repr(int(v)) if float(v).is_integer() else repr(float(v))


def serialize_instance(problem, fmt="table"):
    """Render a SpinProblem to text. fmt is 'table' or 'json'."""
    if fmt == "table":
        lines = [f"n {problem.n}"]
        if problem.label:
            lines.insert(0, f"# {problem.label}")
        for i in range(1, problem.n + 1):
            lines.append(f"h {i} {_format_value(problem.h_z[i - 1])}")
        for (i, j, jz) in problem.z_couplings:
            lines.append(f"J {i} {j} {_format_value(jz)}")
        if problem.y_coupling_strength != 0.0:
            lines.append(f"y {_format_value(problem.y_coupling_strength)}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "n": problem.n,
            "h_z": [float(v) for v in problem.h_z],
            "z_couplings": [[i, j, jz] for (i, j, jz) in problem.z_couplings],
            "y_coupling_strength": problem.y_coupling_strength,
            "label": problem.label,
        }
        return json.dumps(doc, indent=1) + "\n"
    raise ValidationError(f"unknown format {fmt!r}")


def parse_instance(text):
    """Parse instance text in either supported format into a SpinProblem."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json_instance(text)
    return _parse_table_instance(text)


def load_instance(path):
    """Read and parse an instance file."""
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(problem, path, fmt=None):
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "table"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(problem, fmt=fmt))


def _parse_json_instance(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad JSON instance: {exc}") from exc
    try:
        n = int(doc["n"])
        h_z = np.asarray(doc["h_z"], dtype=float)
        couplings = tuple((int(i), int(j), float(v)) for (i, j, v) in doc["z_couplings"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad JSON instance: {exc}") from exc
    return SpinProblem(
        n=n,
        h_z=h_z,
        z_couplings=couplings,
        y_coupling_strength=float(doc.get("y_coupling_strength", 0.0)),
        label=str(doc.get("label", "")),
    )


def _parse_table_instance(text):
    n = None
    h_entries = {}
    couplings = []
    label = ""
    y_strength = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if not label:
                label = line[1:].strip()
            continue
        parts = line.split()
        try:
            if parts[0] == "n" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "h" and len(parts) == 3:
                h_entries[int(parts[1])] = float(parts[2])
            elif parts[0] == "J" and len(parts) == 4:
                couplings.append((int(parts[1]), int(parts[2]), float(parts[3])))
            elif parts[0] == "y" and len(parts) == 2:
                y_strength = float(parts[1])
            else:
                raise ValueError("unrecognized record")
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: cannot parse {raw!r} ({exc})") from exc
    if n is None:
        raise ValidationError("missing 'n <N>' header line")
    h = np.zeros(n)
    for i, v in h_entries.items():
        if not (1 <= i <= n):
            raise ValidationError(f"field index {i} out of range for n={n}")
        h[i - 1] = v
    return SpinProblem(n=n, h_z=h, z_couplings=tuple(couplings),
                       y_coupling_strength=y_strength, label=label)
