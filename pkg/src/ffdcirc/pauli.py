"""Exact phase-tracked Pauli strings and their dense realizations.

A string is stored as a pair of bit masks (X part, Z part) plus a global
phase exponent ``k`` meaning a factor ``i**k``.  All algebra in this module
is integer arithmetic, so products, commutators and Hermiticity checks are
exact.  Site 1 is the most significant tensor factor of the dense matrix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import DenseSizeError, DimensionMismatchError

#: Largest chain length for which a dense matrix may be requested.
DENSE_SITE_CAP = 14

# single-site factors keyed by (x bit, z bit); (1, 1) is X.Z = -i Y
_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1], [1, 0]], dtype=complex),
}

_PHASE_LABEL = {0: "+1", 1: "+i", 2: "-1", 3: "-i"}
_LABEL_PHASE = {"+1": 0, "+i": 1, "-1": 2, "-i": 3, "1": 0, "i": 1}
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_SITE_RE = re.compile(r"^([IXYZ])(\d+)$")


@dataclass(frozen=True)
class PauliString:
    """``i**phase_exp`` times a tensor product of ``X^x Z^z`` site factors."""

    n_sites: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_sites < 0:
            raise ValueError("n_sites must be nonnegative")
        mask = (1 << self.n_sites) - 1
        if (self.x_mask | self.z_mask) & ~mask:
            raise ValueError("mask bits outside the chain")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n_sites: int) -> "PauliString":
        return cls(n_sites, 0, 0, 0)

    @classmethod
    def from_ops(cls, n_sites: int, ops: dict, phase_exp: int = 0) -> "PauliString":
        """Build from a ``{site: letter}`` map, sites 1-based.

        ``Y`` contributes a factor ``i`` to the stored phase so that the
        resulting string really is the Pauli Y on that site.
        """
        x = z = 0
        extra = 0
        for site, letter in ops.items():
            if not 1 <= site <= n_sites:
                raise ValueError(f"site {site} outside chain of length {n_sites}")
            bit = 1 << (site - 1)
            if (x | z) & bit:
                raise ValueError(f"duplicate operator on site {site}")
            bx, bz = _LETTER_BITS[letter.upper()]
            x |= bit if bx else 0
            z |= bit if bz else 0
            if letter.upper() == "Y":
                extra += 1
        return cls(n_sites, x, z, (phase_exp + extra) % 4)

    @classmethod
    def from_text(cls, text: str, n_sites: int | None = None) -> "PauliString":
        """Parse the text form, e.g. ``"+i X1 X2 Z3"``; round-trips with to_text."""
        tokens = text.split()
        if not tokens:
            raise ValueError("empty Pauli string text")
        phase = 0
        if tokens[0] in _LABEL_PHASE:
            phase = _LABEL_PHASE[tokens[0]]
            tokens = tokens[1:]
        ops = {}
        max_site = 0
        for tok in tokens:
            m = _SITE_RE.match(tok)
            if m is None:
                raise ValueError(f"bad site token {tok!r}")
            letter, site = m.group(1), int(m.group(2))
            max_site = max(max_site, site)
            if letter != "I":
                ops[site] = letter
        if n_sites is None:
            n_sites = max_site
        return cls.from_ops(n_sites, ops, phase_exp=phase)

    # -- algebra -----------------------------------------------------------

    def multiply(self, other: "PauliString") -> "PauliString":
        """Exact product self * other (matrix order: self acts after other)."""
        if self.n_sites != other.n_sites:
            raise DimensionMismatchError(
                f"cannot multiply strings on {self.n_sites} and {other.n_sites} sites"
            )
        phase = (
            self.phase_exp
            + other.phase_exp
            + 2 * (self.z_mask & other.x_mask).bit_count()
        )
        return PauliString(
            self.n_sites,
            self.x_mask ^ other.x_mask,
            self.z_mask ^ other.z_mask,
            phase % 4,
        )

    __mul__ = multiply

    def commutes(self, other: "PauliString") -> bool:
        """True iff the binary symplectic form of the two strings vanishes."""
        if self.n_sites != other.n_sites:
            raise DimensionMismatchError(
                f"cannot compare strings on {self.n_sites} and {other.n_sites} sites"
            )
        overlap = (self.x_mask & other.z_mask).bit_count() + (
            self.z_mask & other.x_mask
        ).bit_count()
        return overlap % 2 == 0

    def is_hermitian(self) -> bool:
        y_count = (self.x_mask & self.z_mask).bit_count()
        return (self.phase_exp + y_count) % 2 == 0

    def adjoint(self) -> "PauliString":
        y_count = (self.x_mask & self.z_mask).bit_count()
        return PauliString(
            self.n_sites, self.x_mask, self.z_mask, (-self.phase_exp + 2 * y_count) % 4
        )

    def with_phase(self, k: int) -> "PauliString":
        """Multiply by ``i**k``."""
        return PauliString(self.n_sites, self.x_mask, self.z_mask, self.phase_exp + k)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0 and self.phase_exp == 0

    def sites(self) -> tuple:
        """1-based sites on which the string acts nontrivially."""
        support = self.x_mask | self.z_mask
        return tuple(s + 1 for s in range(self.n_sites) if support >> s & 1)

    # -- realizations ------------------------------------------------------

    def to_dense(self, cap: int = DENSE_SITE_CAP) -> np.ndarray:
        """Dense ``2**n_sites`` matrix; site 1 is the leftmost kron factor."""
        if self.n_sites > cap:
            raise DenseSizeError(
                f"dense realization of {self.n_sites} sites exceeds cap {cap}"
            )
        out = np.array([[1.0 + 0.0j]])
        for s in range(self.n_sites):
            bits = (self.x_mask >> s & 1, self.z_mask >> s & 1)
            out = np.kron(out, _SINGLE[bits])
        return (1j**self.phase_exp) * out

    def to_text(self) -> str:
        """Human-readable form like ``"+i X1 X2 Z3"``; identity prints ``"+1"``."""
        y_count = (self.x_mask & self.z_mask).bit_count()
        shown = (self.phase_exp - y_count) % 4
        parts = [_PHASE_LABEL[shown]]
        for s in range(self.n_sites):
            bits = (self.x_mask >> s & 1, self.z_mask >> s & 1)
            if bits == (0, 0):
                continue
            letter = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[bits]
            parts.append(f"{letter}{s + 1}")
        return " ".join(parts)

    def __str__(self):
        return self.to_text()
