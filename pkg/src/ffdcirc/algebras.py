"""Bond-algebra representations, central elements, normal ordering and boundary operators.

Two families are supported.  The Ising family has generators that square to
one, anticommute at distance 1 and commute beyond.  The FFD family ("free
fermions in disguise") anticommutes at distances 1 and 2 and commutes beyond.
All relation checks are exact symbolic computations on Pauli strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConstructionError
from .pauli import PauliString


class RepKind(str, Enum):
    ISING_STANDARD = "ising"
    ISING_HOMOGENEOUS = "ising-hom"
    FFD_BASIC = "ffd-basic"
    FFD_CUT = "ffd-cut"
    FFD_SHIFT6 = "ffd-shift6"
    FFD_MINIMAL = "ffd-min"


_FFD_KINDS = {
    RepKind.FFD_BASIC,
    RepKind.FFD_CUT,
    RepKind.FFD_SHIFT6,
    RepKind.FFD_MINIMAL,
}


def anticommuting_distances(kind: RepKind | str) -> frozenset:
    """Generator-index distances at which a pair must anticommute."""
    kind = RepKind(kind)
    return frozenset({1, 2}) if kind in _FFD_KINDS else frozenset({1})


@dataclass(frozen=True)
class Representation:
    """A named embedding of M bond-algebra generators on a spin chain."""

    kind: RepKind
    m: int
    n_sites: int
    generators: tuple

    def generator(self, j: int) -> PauliString:
        """1-based access, matching the index conventions of the formulas."""
        if not 1 <= j <= self.m:
            raise IndexError(f"generator index {j} outside [1, {self.m}]")
        return self.generators[j - 1]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "m": self.m,
            "n_sites": self.n_sites,
            "generators": [g.to_text() for g in self.generators],
        }

    @classmethod
    def from_dict(cls, record: dict) -> "Representation":
        gens = tuple(
            PauliString.from_text(t, record["n_sites"]) for t in record["generators"]
        )
        return cls(RepKind(record["kind"]), record["m"], record["n_sites"], gens)


@lru_cache(maxsize=None)
def generator_matrices(rep: Representation) -> tuple:
    """Dense matrices of all generators, cached per representation."""
    return tuple(g.to_dense() for g in rep.generators)


# ---------------------------------------------------------------------------
# representation tables
# ---------------------------------------------------------------------------

def _shift6_entry(j: int) -> dict:
    """j-th operator (1-based) of the period-6 family; block k starts at site 3k+1."""
    block, r = divmod(j - 1, 6)
    n = 3 * block + 1
    if r == 0:
        return {n: "X"}
    if r == 1:
        return {n: "Z", n + 2: "Z"}
    if r == 2:
        return {n: "Z", n + 1: "X", n + 2: "Y"}
    if r == 3:
        return {n + 2: "X"}
    if r == 4:
        return {n + 2: "Z", n + 3: "Z"}
    return {n + 1: "Z", n + 2: "Z", n + 3: "Y", n + 4: "Z"}


def _minimal_entry(j: int) -> dict:
    # same family started two slots earlier, with the left boundary cut off
    if j == 1:
        return {1: "Z"}
    if j == 2:
        return {1: "Y", 2: "Z"}
    return _shift6_entry(j - 2)


def _ops_to_generators(ops_list) -> tuple:
    n_sites = max(max(ops) for ops in ops_list)
    return n_sites, tuple(PauliString.from_ops(n_sites, ops) for ops in ops_list)


def build_representation(kind: RepKind | str, m: int) -> Representation:
    """Construct one of the built-in representations with ``m`` generators."""
    kind = RepKind(kind)
    if m < 1:
        raise ConstructionError("need at least one generator")

    if kind is RepKind.ISING_STANDARD:
        ops = []
        for j in range(1, m + 1):
            k = (j + 1) // 2
            if j % 2 == 1:
                ops.append({k: "Z"})
            else:
                ops.append({k: "X", k + 1: "X"})
        n_sites, gens = _ops_to_generators(ops)
    elif kind is RepKind.ISING_HOMOGENEOUS:
        ops = [{j: "X", j + 1: "Y"} for j in range(1, m + 1)]
        n_sites, gens = _ops_to_generators(ops)
    elif kind is RepKind.FFD_BASIC:
        ops = [{j: "X", j + 1: "X", j + 2: "Z"} for j in range(1, m + 1)]
        n_sites, gens = _ops_to_generators(ops)
    elif kind is RepKind.FFD_CUT:
        if m == 1:
            ops = [{1: "X"}]
        else:
            ops = [{1: "X", 2: "Z"}]
            ops += [{j - 1: "X", j: "X", j + 1: "Z"} for j in range(2, m)]
            ops.append({m - 1: "X", m: "X"})
        n_sites, gens = _ops_to_generators(ops)
    elif kind is RepKind.FFD_SHIFT6:
        ops = [_shift6_entry(j) for j in range(1, m + 1)]
        n_sites, gens = _ops_to_generators(ops)
    elif kind is RepKind.FFD_MINIMAL:
        ops = _minimal_ops(m)
        n_sites, gens = _ops_to_generators(ops)
    else:  # pragma: no cover
        raise ConstructionError(f"unsupported kind {kind}")

    return Representation(kind, m, n_sites, gens)


def _minimal_ops(m: int):
    if m == 2:
        # one qubit carries two anticommuting involutions
        return [{1: "X"}, {1: "Z"}]
    if m % 6 == 2:
        # shortest faithful embedding for this residue: prepend/append edge
        # operators and chop the trailing factor of the last bulk entry
        k = (m - 2) // 6
        ops = [{1: "Y", 2: "Z"}]
        ops += [_shift6_entry(j) for j in range(1, 6 * k)]
        last = dict(_shift6_entry(6 * k))
        del last[3 * k + 2]
        ops.append(last)  # Z_{3k-1} Z_{3k} Y_{3k+1}
        ops.append({3 * k + 1: "X"})
        return ops
    return [_minimal_entry(j) for j in range(1, m + 1)]


def ffd_basic_second_copy(m: int) -> tuple:
    """The commuting second embedding Z_j X_{j+1} X_{j+2} alongside the basic one."""
    n_sites = m + 2
    return tuple(
        PauliString.from_ops(n_sites, {j: "Z", j + 1: "X", j + 2: "X"})
        for j in range(1, m + 1)
    )


# ---------------------------------------------------------------------------
# relation checks
# ---------------------------------------------------------------------------

def verify_relations(rep: Representation) -> list:
    """Return the violated (j, k) pairs; empty list when the algebra holds.

    Pairs (j, j) flag a generator whose square is not exactly +1.
    """
    anti = anticommuting_distances(rep.kind)
    violations = []
    gens = rep.generators
    for j in range(rep.m):
        sq = gens[j].multiply(gens[j])
        if not sq.is_identity:
            violations.append((j + 1, j + 1))
        for k in range(j + 1, rep.m):
            should_commute = (k - j) not in anti
            if gens[j].commutes(gens[k]) != should_commute:
                violations.append((j + 1, k + 1))
    return violations


# ---------------------------------------------------------------------------
# words in the algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraWord:
    """A scalar multiple of a product of generators, indices as written."""

    indices: tuple
    coefficient: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "coefficient", complex(self.coefficient))


def normal_order(word: AlgebraWord, kind: RepKind | str = RepKind.FFD_MINIMAL) -> AlgebraWord:
    """Sort generator indices ascending, cancelling squares, tracking the sign."""
    anti = anticommuting_distances(kind)
    idx = list(word.indices)
    coef = word.coefficient
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(idx) - 1:
            a, b = idx[i], idx[i + 1]
            if a == b:
                del idx[i : i + 2]
                changed = True
                i = max(i - 1, 0)
            elif a > b:
                idx[i], idx[i + 1] = b, a
                if a - b in anti:
                    coef = -coef
                changed = True
                i += 1
            else:
                i += 1
    return AlgebraWord(tuple(idx), coef)


def transpose_sign(word: AlgebraWord, kind: RepKind | str = RepKind.FFD_MINIMAL) -> int:
    """Sign picked up when a normal-ordered word is reversed.

    Reversal transposes every pair once, so the sign is -1 to the number of
    anticommuting pairs in the word.
    """
    idx = word.indices
    if list(idx) != sorted(set(idx)):
        raise ValueError("transpose_sign expects a normal-ordered word")
    anti = anticommuting_distances(kind)
    count = sum(
        1
        for i in range(len(idx))
        for j in range(i + 1, len(idx))
        if idx[j] - idx[i] in anti
    )
    return -1 if count % 2 else 1


_PHASE_OF_COEF = {1 + 0j: 0, 1j: 1, -1 + 0j: 2, -1j: 3}


def realize(word: AlgebraWord, rep: Representation) -> PauliString:
    """Multiply out a word whose coefficient is a power of i."""
    if word.coefficient not in _PHASE_OF_COEF:
        raise ValueError("realize() needs a coefficient in {1, i, -1, -i}")
    out = PauliString.identity(rep.n_sites)
    for j in word.indices:
        out = out.multiply(rep.generator(j))
    return out.with_phase(_PHASE_OF_COEF[word.coefficient])


def word_dense(word: AlgebraWord, rep: Representation) -> np.ndarray:
    """Dense matrix of a word with an arbitrary complex coefficient."""
    out = PauliString.identity(rep.n_sites)
    for j in word.indices:
        out = out.multiply(rep.generator(j))
    return word.coefficient * out.to_dense()


# ---------------------------------------------------------------------------
# central elements and boundary operators
# ---------------------------------------------------------------------------

def _block_word(starts) -> AlgebraWord:
    """Product of (i h_s h_{s+1} h_{s+2}) blocks at the given start indices."""
    indices = []
    for s in starts:
        indices.extend((s, s + 1, s + 2))
    return AlgebraWord(tuple(indices), 1j ** len(starts))


def central_elements(m: int) -> list:
    """Hermitian central words of the FFD algebra with ``m`` generators.

    Empty for m = 6k and m = 6k + 2; these residues admit faithful
    representations of minimal length.
    """
    if m < 1:
        raise ConstructionError("need at least one generator")
    r = m % 6
    words = []
    if r == 3:
        words.append(_block_word(range(1, m - 1, 6)))
    elif r == 4:
        words.append(_block_word(range(1, m - 2, 6)))
        words.append(_block_word(range(2, m - 1, 6)))
    elif r == 5:
        words.append(_block_word(range(2, m - 2, 6)))
    if m % 3 == 1:
        words.append(AlgebraWord(tuple(range(1, m + 1, 3)), 1.0))
    return words


def boundary_operator(rep: Representation) -> PauliString:
    """An operator anticommuting with h_M and commuting with all other generators."""
    m = rep.m
    if rep.kind is RepKind.FFD_BASIC:
        return PauliString.from_ops(rep.n_sites, {m + 2: "X"})
    if rep.kind is RepKind.FFD_CUT:
        return PauliString.from_ops(rep.n_sites, {m: "Z"})
    if rep.kind is RepKind.FFD_MINIMAL and m % 6 == 0:
        return realize(_block_word(range(2, m - 3, 6)), rep)
    if rep.kind is RepKind.FFD_MINIMAL and m % 6 == 2:
        return realize(AlgebraWord(tuple(range(1, m, 3)), 1.0), rep)
    raise ConstructionError(
        f"no boundary operator available for kind {rep.kind.value} with m={m}"
    )
