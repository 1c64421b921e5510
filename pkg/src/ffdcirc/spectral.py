"""Eigenphase extraction and the free-fermion spectrum test.

The classifier counts distinct eigenphases and distinct pairwise phase
differences (mod 2*pi).  A spectrum built from n generic fermionic modes has
2**n distinct values and 3**n distinct differences; a generic
reflection-symmetric spectrum with the same number of values has
2*4**(n-1) + 1 distinct differences.  The counts coincide for n <= 2, where
any reflection-symmetric spectrum with uniform degeneracy decomposes into
modes directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ModeExtractionError, NonUnitaryError

#: default absolute tolerance on phases; solver noise is ~1e-12 at dim <= 256
PHASE_TOL = 1e-7
UNITARY_TOL = 1e-9


class Verdict(str, Enum):
    FREE_FERMIONIC = "FreeFermionic"
    GENERIC_REFLECTION_SYMMETRIC = "GenericReflectionSymmetric"
    INTERMEDIATE = "Intermediate"
    INCONCLUSIVE = "Inconclusive"


def wrap_phase(x):
    """Reduce to (-pi, pi]."""
    return np.angle(np.exp(1j * np.asarray(x, dtype=float)))


def eigenphases(u: np.ndarray, unitary_tol: float = UNITARY_TOL) -> np.ndarray:
    """Sorted eigenvalue phases of a unitary matrix, multiplicity preserved."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    defect = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
    if defect > unitary_tol:
        raise NonUnitaryError(f"matrix is not unitary (defect {defect:.3e})")
    lam = np.linalg.eigvals(u)
    lam = lam / np.abs(lam)  # strip radial solver noise before clustering
    return np.sort(np.angle(lam))


def cluster_distinct(values, tol: float, circular: bool = False):
    """Single-linkage clustering with gap threshold ``tol`` on sorted values.

    Returns (representatives, counts).  With ``circular=True`` the points
    live on (-pi, pi] and the two ends may merge across the seam.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size == 0:
        return np.array([]), np.array([], dtype=int)
    splits = np.nonzero(np.diff(vals) > tol)[0]
    starts = np.concatenate(([0], splits + 1))
    ends = np.concatenate((splits + 1, [vals.size]))
    reps = [vals[a:b].mean() for a, b in zip(starts, ends)]
    counts = [b - a for a, b in zip(starts, ends)]
    if circular and len(reps) > 1 and (vals[0] + 2 * np.pi - vals[-1]) <= tol:
        merged = np.concatenate((vals[starts[-1] :] - 2 * np.pi, vals[: ends[0]]))
        reps[0] = float(wrap_phase(merged.mean()))
        counts[0] += counts[-1]
        reps.pop()
        counts.pop()
    return np.array(reps), np.array(counts, dtype=int)


def ratio_signature(phases, tol: float = PHASE_TOL):
    """(number of distinct phases, number of distinct pairwise differences).

    Differences run over all ordered pairs including j = k, reduced mod 2*pi,
    so the zero difference always contributes one cluster.
    """
    reps, _ = cluster_distinct(phases, tol, circular=True)
    if reps.size == 0:
        return 0, 0
    diffs = wrap_phase(reps[:, None] - reps[None, :]).ravel()
    dreps, _ = cluster_distinct(diffs, tol, circular=True)
    return reps.size, dreps.size


@dataclass(frozen=True, eq=False)
class SpectralSignature:
    """Eigenphase multiset of a unitary plus the counting-test verdict."""

    phases: np.ndarray
    distinct_phases: np.ndarray
    multiplicities: np.ndarray
    n_distinct: int
    n_distinct_diffs: int
    uniform_degeneracy: int | None
    verdict: Verdict
    modes: np.ndarray | None
    tol: float

    @property
    def n_modes(self) -> int | None:
        n = self.n_distinct
        if n > 0 and n & (n - 1) == 0:
            return n.bit_length() - 1
        return None

    def to_dict(self) -> dict:
        return {
            "phases": [float(p) for p in self.phases],
            "n_distinct": int(self.n_distinct),
            "n_distinct_diffs": int(self.n_distinct_diffs),
            "degeneracy": None
            if self.uniform_degeneracy is None
            else int(self.uniform_degeneracy),
            "verdict": self.verdict.value,
            "modes": None if self.modes is None else [float(x) for x in self.modes],
            "tol": self.tol,
        }

    def phases_csv(self) -> str:
        lines = ["phase"] + [f"{p:.15g}" for p in self.phases]
        return "\n".join(lines) + "\n"


def _is_reflection_symmetric(reps, tol):
    neg = np.sort(wrap_phase(-reps))
    pos = np.sort(reps)
    if neg.size != pos.size:
        return False
    d = np.abs(wrap_phase(neg - pos))
    return bool(np.all(d <= 2 * tol))


def classify(u: np.ndarray, tol: float = PHASE_TOL,
             unitary_tol: float = UNITARY_TOL) -> SpectralSignature:
    """Run the counting test on the spectrum of a unitary matrix.

    Verdicts: FreeFermionic when the counts fit 2**n / 3**n for n >= 3 and a
    signed-sum mode decomposition exists; for n <= 2 the two reference counts
    coincide, and the verdict is FreeFermionic exactly when the spectrum is
    reflection symmetric with uniform degeneracy (such spectra are free by
    construction), Inconclusive otherwise.  A single distinct eigenvalue is
    always Inconclusive.
    """
    phases = eigenphases(u, unitary_tol)
    return classify_phases(phases, tol)


def classify_phases(phases: np.ndarray, tol: float = PHASE_TOL) -> SpectralSignature:
    """classify() for a precomputed phase multiset."""
    reps, counts = cluster_distinct(phases, tol, circular=True)
    n_distinct = int(reps.size)
    if n_distinct == 0:
        raise ValueError("empty spectrum")
    diffs = wrap_phase(reps[:, None] - reps[None, :]).ravel()
    dreps, _ = cluster_distinct(diffs, tol, circular=True)
    n_diffs = int(dreps.size)
    degeneracy = int(counts[0]) if np.all(counts == counts[0]) else None

    n = None
    if n_distinct & (n_distinct - 1) == 0:
        n = n_distinct.bit_length() - 1

    verdict = Verdict.INTERMEDIATE
    modes = None
    if n is None:
        verdict = Verdict.INTERMEDIATE
    elif n == 0:
        verdict = Verdict.INCONCLUSIVE
        modes = np.array([]) if abs(wrap_phase(reps[0])) <= tol else None
    elif n >= 3:
        if n_diffs == 3**n:
            try:
                modes = extract_mode_angles(reps, tol)
                verdict = Verdict.FREE_FERMIONIC
            except ModeExtractionError:
                verdict = Verdict.INTERMEDIATE
        elif n_diffs == 2 * 4 ** (n - 1) + 1:
            verdict = Verdict.GENERIC_REFLECTION_SYMMETRIC
        else:
            verdict = Verdict.INTERMEDIATE
    else:  # n = 1, 2: counting cannot separate the two reference classes
        if n_diffs == 3**n:
            if degeneracy is not None and _is_reflection_symmetric(reps, tol):
                try:
                    modes = extract_mode_angles(reps, tol)
                    verdict = Verdict.FREE_FERMIONIC
                except ModeExtractionError:
                    verdict = Verdict.INCONCLUSIVE
            else:
                verdict = Verdict.INCONCLUSIVE
        else:
            verdict = Verdict.INTERMEDIATE

    return SpectralSignature(
        phases=np.asarray(phases, dtype=float),
        distinct_phases=reps,
        multiplicities=counts,
        n_distinct=n_distinct,
        n_distinct_diffs=n_diffs,
        uniform_degeneracy=degeneracy,
        verdict=verdict,
        modes=modes,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# mode extraction
# ---------------------------------------------------------------------------

def signed_sums(modes) -> np.ndarray:
    """All 2**n signed sums of the mode angles, wrapped, sorted, with repeats."""
    modes = np.asarray(modes, dtype=float)
    n = modes.size
    if n == 0:
        return np.zeros(1)
    signs = np.array(
        [[1 if (i >> k) & 1 else -1 for k in range(n)] for i in range(2**n)]
    )
    return np.sort(wrap_phase(signs @ modes))


def extract_modes(sig: SpectralSignature, tol: float | None = None) -> np.ndarray:
    """Nonnegative mode angles whose signed sums reproduce sig.distinct_phases."""
    return extract_mode_angles(sig.distinct_phases, sig.tol if tol is None else tol)


def extract_mode_angles(distinct_phases, tol: float = PHASE_TOL) -> np.ndarray:
    """Solve the signed-sum system for a set of distinct phases.

    Peels one mode at a time: a rotation d = 2*eps maps the tau = -1 half of
    the set onto the tau = +1 half; candidates for d are differences to the
    first phase.  Deterministic: candidates are tried in ascending order.
    """
    reps = np.sort(np.asarray(distinct_phases, dtype=float))
    if reps.size == 0 or reps.size & (reps.size - 1):
        raise ModeExtractionError(f"{reps.size} distinct phases is not a power of two")
    found = _peel(list(reps), tol)
    if found is None:
        raise ModeExtractionError("no consistent mode decomposition found")
    modes = np.sort(np.abs(np.array(found)))[::-1]
    # verify: the reconstruction must reproduce every distinct phase
    rec = np.unique(np.round(signed_sums(modes), 12))
    if not _phase_sets_match(rec, reps, tol):
        raise ModeExtractionError("reconstructed signed sums do not match the spectrum")
    return modes


def _phase_sets_match(a, b, tol):
    def covered(x, y):
        return all(np.min(np.abs(wrap_phase(y - v))) <= 4 * tol for v in x)

    a = np.sort(wrap_phase(a))
    b = np.sort(wrap_phase(b))
    return covered(a, b) and covered(b, a)


def _find_near(values, target, tol):
    errs = np.abs(wrap_phase(np.asarray(values) - target))
    i = int(np.argmin(errs))
    return i if errs[i] <= tol else None


def _pairings(values, d, tol):
    """Yield every split of the set into A and rot_d(A).

    Rotation by d decomposes the set into chains and cycles; a chain forces
    its alternation, a cycle allows two.  Cycles only occur for non-generic
    phase sets, so the enumeration is effectively a single candidate.
    """
    n = len(values)
    nxt = [_find_near(values, v + d, tol) for v in values]
    targets = [t for t in nxt if t is not None]
    if len(set(targets)) != len(targets):  # rotation not injective on the set
        return
    has_pre = [False] * n
    for t in nxt:
        if t is not None:
            has_pre[t] = True
    comps = []
    seen = [False] * n
    for start in range(n):
        if seen[start] or has_pre[start]:
            continue
        chain = []
        i = start
        while i is not None and not seen[i]:
            seen[i] = True
            chain.append(i)
            i = nxt[i]
        comps.append(("chain", chain))
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = nxt[i]
        comps.append(("cycle", cyc))
    if any(len(c) % 2 for _, c in comps):
        return
    cycles = [c for kind, c in comps if kind == "cycle"]
    if len(cycles) > 6:  # combinatorial blow-up guard; not a generic spectrum
        return
    chains_lower = [c[0::2] for kind, c in comps if kind == "chain"]
    for mask in range(2 ** len(cycles)):
        lower = [i for part in chains_lower for i in part]
        for b, cyc in enumerate(cycles):
            lower.extend(cyc[(mask >> b) & 1 :: 2])
        yield [values[i] for i in lower]


def _peel(values, tol):
    if len(values) == 1:
        return [] if abs(wrap_phase(values[0])) <= tol else None
    p0 = values[0]
    cands = []
    for q in values:
        for d in ((q - p0) % (2 * np.pi), (p0 - q) % (2 * np.pi)):
            if d > tol:
                cands.append(d)
    for d in sorted(set(np.round(cands, 12))):
        for lower in _pairings(values, d, tol):
            reduced = sorted(wrap_phase(np.array(lower) + d / 2.0))
            rest = _peel(list(reduced), tol)
            if rest is not None:
                return rest + [d / 2.0]
    return None
