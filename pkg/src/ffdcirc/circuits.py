"""Local unitary gates, circuit geometries and dense circuit assembly.

A geometry stores gates in application order: ``gates[0]`` acts first.  The
conventional right-to-left operator-product notation is used only when
printing.  For the palindromic ``G . G^T`` words the two conventions agree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .algebras import Representation, generator_matrices
from .errors import AngleConsistencyError, ConstructionError

TWO_PI = 2.0 * math.pi


def reduce_angle(angle: float) -> float:
    """Reduce to (-pi, pi]; gates are 2*pi periodic in their angle."""
    r = float(angle) % TWO_PI
    if r > math.pi:
        r -= TWO_PI
    return r


@dataclass(frozen=True)
class Gate:
    index: int
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", reduce_angle(self.angle))


@dataclass(frozen=True)
class CircuitGeometry:
    """An ordered word of gates; ``constrained`` enforces one angle per index."""

    gates: tuple
    label: str | None = None
    constrained: bool = True

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.constrained:
            seen = {}
            for g in self.gates:
                if g.index in seen and seen[g.index] != g.angle:
                    raise AngleConsistencyError(
                        f"gate u{g.index} appears with angles "
                        f"{seen[g.index]} and {g.angle}"
                    )
                seen.setdefault(g.index, g.angle)

    def __len__(self):
        return len(self.gates)

    def indices(self) -> tuple:
        return tuple(g.index for g in self.gates)

    def angle_map(self) -> dict:
        out = {}
        for g in self.gates:
            out.setdefault(g.index, g.angle)
        return out

    def concat(self, other: "CircuitGeometry") -> "CircuitGeometry":
        """self followed by other (application order)."""
        return CircuitGeometry(
            self.gates + other.gates,
            constrained=self.constrained and other.constrained,
        )

    def to_text(self) -> str:
        return " ".join(f"u{g.index}:{g.angle!r}" for g in self.gates)

    def __str__(self):
        prod = " ".join(f"u{g.index}" for g in reversed(self.gates))
        return prod if prod else "1"


# ---------------------------------------------------------------------------
# angle sources
# ---------------------------------------------------------------------------

def resolve_angles(angles, indices) -> dict:
    """Map generator indices to angles.

    ``angles`` may be the string ``"sin"`` (angle of u_j is sin(j), matching
    the convention of the bundled reference runs), a scalar (homogeneous), a
    mapping, or a sequence indexed by j - 1.
    """
    distinct = sorted(set(indices))
    if isinstance(angles, str):
        if angles == "sin":
            return {j: math.sin(j) for j in distinct}
        raise ValueError(f"unknown angle rule {angles!r}")
    if isinstance(angles, dict):
        missing = [j for j in distinct if j not in angles]
        if missing:
            raise ValueError(f"no angle given for gates {missing}")
        return {j: float(angles[j]) for j in distinct}
    if np.isscalar(angles):
        return {j: float(angles) for j in distinct}
    seq = list(angles)
    if distinct and max(distinct) > len(seq):
        raise ValueError(f"angle list of length {len(seq)} too short")
    return {j: float(seq[j - 1]) for j in distinct}


def geometry_from_word(word, angles, label=None, constrained=True) -> CircuitGeometry:
    amap = resolve_angles(angles, word)
    return CircuitGeometry(
        tuple(Gate(j, amap[j]) for j in word), label=label, constrained=constrained
    )


def ggt_word(word) -> list:
    """The word followed by its reversal; every gate reuses its angle."""
    word = list(word)
    return word + word[::-1]


# ---------------------------------------------------------------------------
# named geometries
# ---------------------------------------------------------------------------

def _g1_word(m):
    if m % 2:
        raise ConstructionError("g1 pattern needs even m")
    return list(range(1, m, 2)) + list(range(2, m + 1, 2))


def _g2_word(m):
    if m % 3:
        raise ConstructionError("g2 pattern needs m divisible by 3")
    return sum((list(range(r, m + 1, 3)) for r in (1, 2, 3)), [])


def _g3_word(m):
    if m % 4:
        raise ConstructionError("g3 pattern needs m divisible by 4")
    return sum((list(range(r, m + 1, 4)) for r in (1, 2, 3, 4)), [])


_NAMED = {
    # application-order words
    "full_product": lambda m: list(range(1, m + 1)),
    "staircase_ggt": lambda m: ggt_word(range(1, m + 1)),
    "g1_ggt": lambda m: ggt_word(_g1_word(m)),
    "g2_ggt": lambda m: ggt_word(_g2_word(m)),
    "g3_ggt": lambda m: ggt_word(_g3_word(m)),
    # even layer first, then odd layer, each internally commuting
    "ising_brickwork": lambda m: list(range(2, m + 1, 2)) + list(range(1, m + 1, 2)),
}

NAMED_GEOMETRIES = tuple(sorted(_NAMED))


def named_geometry(name: str, m: int, angles) -> CircuitGeometry:
    if name not in _NAMED:
        raise ConstructionError(
            f"unknown geometry {name!r}; known: {', '.join(NAMED_GEOMETRIES)}"
        )
    word = _NAMED[name](m)
    return geometry_from_word(word, angles, label=f"{name}(m={m})")


_TOKEN_RE = re.compile(r"^u(\d+)(?::([-+0-9.eE]+))?$")
_NAMED_CALL_RE = re.compile(r"^(\w+)\(\s*m\s*=\s*(\d+)\s*(?:,\s*angles\s*=\s*(\S+?)\s*)?\)$")


def parse_geometry(text: str, angles=None, m: int | None = None) -> CircuitGeometry:
    """Parse the geometry mini-language.

    Accepted forms: whitespace-separated gate tokens ``u<j>`` or
    ``u<j>:<angle>``, with ``|`` as a cosmetic layer separator and a trailing
    ``ggt`` token appending the reversed word with shared angles; a bare
    pattern name like ``g1_ggt`` (needs ``m``); or the call form
    ``g1_ggt(m=12, angles=sin)``.
    """
    text = text.strip()
    call = _NAMED_CALL_RE.match(text)
    if call:
        name, m_call, angle_rule = call.group(1), int(call.group(2)), call.group(3)
        return named_geometry(name, m_call, angle_rule if angle_rule else angles)
    if text in _NAMED:
        if m is None:
            raise ConstructionError(f"geometry {text!r} needs m")
        return named_geometry(text, m, angles)

    word = []
    explicit = {}
    ggt = False
    for tok in text.split():
        if tok == "|":
            continue
        if tok == "ggt":
            ggt = True
            continue
        match = _TOKEN_RE.match(tok)
        if match is None:
            raise ConstructionError(f"bad geometry token {tok!r}")
        j = int(match.group(1))
        word.append(j)
        if match.group(2) is not None:
            a = float(match.group(2))
            if j in explicit and explicit[j] != a:
                raise AngleConsistencyError(f"two angles for u{j} in {text!r}")
            explicit[j] = a
    if ggt:
        word = ggt_word(word)
    if not word:
        return CircuitGeometry((), label="empty")
    if explicit and len(explicit) < len(set(word)):
        raise ConstructionError("mixed explicit and implicit angles in geometry text")
    return geometry_from_word(word, explicit if explicit else angles, label=text)


# ---------------------------------------------------------------------------
# dense assembly
# ---------------------------------------------------------------------------

def gate_unitary(rep: Representation, j: int, angle: float) -> np.ndarray:
    """exp(i * angle * h_j) as a dense matrix."""
    if not 1 <= j <= rep.m:
        raise IndexError(f"gate index {j} outside [1, {rep.m}]")
    h = generator_matrices(rep)[j - 1]
    dim = h.shape[0]
    return math.cos(angle) * np.eye(dim) + 1j * math.sin(angle) * h


def assemble(rep: Representation, geo: CircuitGeometry) -> np.ndarray:
    """Dense product of the gate unitaries, first gate applied first."""
    dim = 2**rep.n_sites
    out = np.eye(dim, dtype=complex)
    for g in geo.gates:
        out = gate_unitary(rep, g.index, g.angle) @ out
    return out


# ---------------------------------------------------------------------------
# geometry simplification
# ---------------------------------------------------------------------------

def simplify(geo: CircuitGeometry, rep: Representation):
    """Apply the spectrum-preserving rewrites: merge repeated gates, reorder
    commuting neighbours ascending, rotate cyclically to expose more merges.

    Returns (geometry, cyclic_shift_applied).  The output has the same
    eigenphase multiset as the input; the matrix itself changes when a cyclic
    shift was used.
    """

    def commutes(a, b):
        return rep.generator(a).commutes(rep.generator(b))

    def merge_adjacent(gates):
        changed = False
        i = 0
        while i < len(gates) - 1:
            if gates[i].index == gates[i + 1].index:
                merged = Gate(gates[i].index, gates[i].angle + gates[i + 1].angle)
                gates[i : i + 2] = [merged]
                changed = True
                i = max(i - 1, 0)
            else:
                i += 1
        return changed

    gates = list(geo.gates)
    shifted = False
    changed = True
    while changed:
        changed = merge_adjacent(gates)
        # a cyclic shift exposes a merge across the ends; do it before any
        # reordering so palindromic words collapse the way Properties 1-3 allow
        if len(gates) >= 2 and gates[0].index == gates[-1].index:
            gates = [gates[-1]] + gates[:-1]
            shifted = True
            changed = True
            continue
        for i in range(len(gates) - 1):
            a, b = gates[i], gates[i + 1]
            if a.index > b.index and commutes(a.index, b.index):
                gates[i], gates[i + 1] = b, a
                changed = True
    out = CircuitGeometry(tuple(gates), label=geo.label, constrained=False)
    return out, shifted
