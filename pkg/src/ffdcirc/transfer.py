"""Transfer-matrix machinery for the 4-fermion bond algebra.

Covers the commuting charges Q^(s), the transfer matrix T(v) and its
characteristic polynomial P(v^2), quasi-energies, the staircase
factorization T = G . G^T in both the Hermitian and the unitary regime,
closed-form commuting charges for the brickwork and g1 circuits, and the
fermionic ladder operators built from a boundary operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
import scipy.linalg

from .algebras import (
    Representation,
    boundary_operator,
    generator_matrices,
)
from .circuits import named_geometry, assemble
from .errors import (
    ConditioningError,
    GaugeAmbiguityError,
    OracleInapplicableError,
    RecursionDomainError,
    SingularAngleError,
)
from .pauli import PauliString
from .spectral import signed_sums, wrap_phase


def n_charges(m: int) -> int:
    """Number of independent charges: largest s admitting an index tuple."""
    return (m + 2) // 3


class Regime(str, Enum):
    HERMITIAN = "hermitian-real-v"
    UNITARY = "unitary-imaginary-v"


# ---------------------------------------------------------------------------
# charges and transfer matrix
# ---------------------------------------------------------------------------

def hamiltonian(rep: Representation, alpha) -> np.ndarray:
    """Dense sum of alpha_j h_j."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size != rep.m:
        raise ValueError(f"need {rep.m} couplings, got {alpha.size}")
    mats = generator_matrices(rep)
    out = np.zeros_like(mats[0])
    for a, h in zip(alpha, mats):
        out = out + a * h
    return out


def _gap_tuples(m: int, s: int):
    """All 1-based index tuples m_1 < ... < m_s with gaps m_{r+1} > m_r + 2."""
    if s == 0:
        yield ()
        return

    def rec(start, remaining, prefix):
        if remaining == 0:
            yield tuple(prefix)
            return
        for j in range(start, m - 3 * (remaining - 1) + 1):
            yield from rec(j + 3, remaining - 1, prefix + [j])

    yield from rec(1, s, [])


def charge(rep: Representation, alpha, s: int) -> np.ndarray:
    """The order-s commuting charge: products of s mutually commuting terms."""
    smax = n_charges(rep.m)
    if not 0 <= s <= smax:
        raise ValueError(f"charge order {s} outside [0, {smax}] for m={rep.m}")
    alpha = np.asarray(alpha, dtype=float)
    dim = 2**rep.n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for tup in _gap_tuples(rep.m, s):
        word = PauliString.identity(rep.n_sites)
        coef = 1.0
        for j in tup:
            word = word.multiply(rep.generator(j))
            coef *= alpha[j - 1]
        out += coef * word.to_dense()
    return out


def transfer_dense(rep: Representation, alpha, v: complex) -> np.ndarray:
    """T_M(v) by the three-step recursion T_M = T_{M-1} - v H_M T_{M-3}."""
    alpha = np.asarray(alpha, dtype=float)
    dim = 2**rep.n_sites
    eye = np.eye(dim, dtype=complex)
    mats = generator_matrices(rep)
    history = [eye, eye, eye]  # T_{M-3}, T_{M-2}, T_{M-1}
    t = eye
    for j in range(1, rep.m + 1):
        t = history[-1] - v * alpha[j - 1] * (mats[j - 1] @ history[-3])
        history = history[1:] + [t]
    return t


def transfer_from_charges(rep: Representation, alpha, v: complex) -> np.ndarray:
    """Independent construction of T(v) as sum of (-v)^s Q^(s)."""
    out = np.zeros((2**rep.n_sites,) * 2, dtype=complex)
    for s in range(n_charges(rep.m) + 1):
        out += (-v) ** s * charge(rep, alpha, s)
    return out


# ---------------------------------------------------------------------------
# characteristic polynomial and quasi-energies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharPolynomial:
    """P(u) with u = v^2, ascending coefficients, exact rationals kept."""

    coeffs: tuple  # Fractions, ascending powers of u
    m: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, u):
        return np.polyval(self.as_floats()[::-1], u)


def char_poly(alpha) -> CharPolynomial:
    """Exact recursion P_M = P_{M-1} - u alpha_M^2 P_{M-3} over rationals."""
    alpha = list(alpha)
    one = [Fraction(1)]
    hist = [one, one, one]
    p = one
    for a in alpha:
        a2 = Fraction(float(a)) ** 2
        prev, back3 = hist[-1], hist[-3]
        shifted = [Fraction(0)] + [a2 * c for c in back3]  # u * alpha^2 * P_{M-3}
        width = max(len(prev), len(shifted))
        p = [
            (prev[i] if i < len(prev) else Fraction(0))
            - (shifted[i] if i < len(shifted) else Fraction(0))
            for i in range(width)
        ]
        hist = hist[1:] + [p]
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return CharPolynomial(tuple(p), len(alpha))


@dataclass(frozen=True)
class QuasiEnergySet:
    """Roots of the characteristic polynomial as one-particle data.

    eps = 1 / v_tilde are the mode energies of the Hamiltonian, eps_angle =
    arctan(eps) the mode angles of the unitary circuit.  Sorted descending
    in eps.
    """

    v_tilde: np.ndarray
    eps: np.ndarray
    eps_angle: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.eps.size


def _positive_real_roots(coeffs, residual_tol=1e-10, degeneracy_rtol=1e-8):
    """Roots in u of an ascending-coefficient polynomial, validated real > 0."""
    c = np.array([float(x) for x in coeffs])
    while c.size > 1 and c[-1] == 0.0:
        c = c[:-1]
    if c.size <= 1:
        return np.array([])
    roots = np.roots(c[::-1])  # companion-matrix eigenvalues
    dc = np.polyder(c[::-1])
    for _ in range(2):  # Newton polish
        val = np.polyval(c[::-1], roots)
        der = np.polyval(dc, roots)
        roots = roots - np.where(der != 0, val / np.where(der == 0, 1, der), 0)
    # backward-error criterion: compare against the term sizes at the root
    res = np.abs(np.polyval(c[::-1], roots))
    term_scale = np.polyval(np.abs(c)[::-1], np.abs(roots))
    if np.any(res > residual_tol * term_scale):
        raise ConditioningError(f"root residual {res.max():.3e} too large")
    mag = np.maximum(np.abs(roots), 1.0)
    if np.any(np.abs(roots.imag) > 1e-10 * mag):
        raise ConditioningError("complex root of the characteristic polynomial")
    u = roots.real
    if np.any(u <= 0):
        raise ConditioningError("non-positive root of the characteristic polynomial")
    su = np.sort(u)
    if su.size > 1 and np.any(np.diff(su) < degeneracy_rtol * su[1:]):
        raise ConditioningError("degenerate roots beyond tolerance")
    return u


def quasi_energies(alpha) -> QuasiEnergySet:
    """One-particle energies from the characteristic polynomial roots."""
    poly = char_poly(alpha)
    u = _positive_real_roots(poly.coeffs)
    v_tilde = np.sqrt(u)
    eps = 1.0 / v_tilde
    order = np.argsort(eps)[::-1]
    eps = eps[order]
    return QuasiEnergySet(v_tilde[order], eps, np.arctan(eps))


def predicted_phases(alpha, n_sites: int) -> np.ndarray:
    """Eigenphase multiset of the unitary staircase built from these couplings.

    The 2**S signed sums of the mode angles, each repeated 2**n_sites / 2**S
    times, sorted ascending.
    """
    qes = quasi_energies(alpha)
    sums = signed_sums(qes.eps_angle)
    reps = 2**n_sites // sums.size
    return np.sort(np.repeat(sums, reps))


def predicted_energies(alpha, n_sites: int) -> np.ndarray:
    """Eigenvalue multiset of the Hamiltonian: signed sums of eps."""
    qes = quasi_energies(alpha)
    n = qes.n_modes
    signs = np.array([[1 if (i >> k) & 1 else -1 for k in range(n)] for i in range(2**n)])
    sums = np.sort(signs @ qes.eps) if n else np.zeros(1)
    reps = 2**n_sites // sums.size
    return np.sort(np.repeat(sums, reps))


# ---------------------------------------------------------------------------
# staircase factorization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StaircaseAngles:
    """Gate angles of the factorized transfer matrix; seeds phi_0 = phi_-1 = 0."""

    phi: np.ndarray
    regime: Regime

    @property
    def m(self) -> int:
        return self.phi.size


def hermitian_staircase_angles(alpha, v: float) -> StaircaseAngles:
    """Solve sin(phi_{j+1}) = -v alpha_{j+1} / (cos phi_j cos phi_{j-1})."""
    alpha = np.asarray(alpha, dtype=float)
    phi = np.zeros(alpha.size)
    prev = prev2 = 0.0
    for j, a in enumerate(alpha, start=1):
        rhs = -v * a / (math.cos(prev) * math.cos(prev2))
        if abs(rhs) > 1.0:
            raise RecursionDomainError(
                f"staircase recursion left its domain at j={j} (|sin|={abs(rhs):.3f})",
                index=j,
            )
        phi[j - 1] = math.asin(rhs)
        prev2, prev = prev, phi[j - 1]
    return StaircaseAngles(phi, Regime.HERMITIAN)


def staircase_residuals(angles: StaircaseAngles, alpha, v: float) -> np.ndarray:
    """Residuals of the defining recursion, one per angle."""
    alpha = np.asarray(alpha, dtype=float)
    phi = angles.phi
    out = np.zeros_like(phi)
    prev = prev2 = 0.0
    for j in range(phi.size):
        if angles.regime is Regime.HERMITIAN:
            out[j] = math.sin(phi[j]) * math.cos(prev) * math.cos(prev2) + v * alpha[j]
        else:
            out[j] = math.tan(2 * phi[j]) + alpha[j] * math.cos(2 * prev) * math.cos(
                2 * prev2
            )
        prev2, prev = prev, phi[j]
    return out


def _staircase_product(rep, phi, reverse=False):
    mats = generator_matrices(rep)
    dim = mats[0].shape[0]
    out = np.eye(dim, dtype=complex)
    order = range(rep.m - 1, -1, -1) if reverse else range(rep.m)
    # paper-order product g_1 g_2 ... g_M: rightmost factor multiplies last
    for j in order:
        g = math.cos(phi[j] / 2) * np.eye(dim) + math.sin(phi[j] / 2) * mats[j]
        out = out @ g
    return out


def hermitian_staircase(rep: Representation, alpha, v: float):
    """(angles, G) with T(v) = G . G^T; G^T via staircase_transpose."""
    angles = hermitian_staircase_angles(alpha, v)
    return angles, _staircase_product(rep, angles.phi)


def staircase_transpose(rep: Representation, angles: StaircaseAngles) -> np.ndarray:
    """The reversed product G^T = g_M ... g_1 (word reversal, not adjoint)."""
    return _staircase_product(rep, angles.phi, reverse=True)


def unitary_angles_from_couplings(alpha) -> StaircaseAngles:
    """tan(2 phi_{j+1}) = -alpha_{j+1} cos(2 phi_j) cos(2 phi_{j-1}); always solvable."""
    alpha = np.asarray(alpha, dtype=float)
    phi = np.zeros(alpha.size)
    prev = prev2 = 0.0
    for j, a in enumerate(alpha):
        phi[j] = 0.5 * math.atan(-a * math.cos(2 * prev) * math.cos(2 * prev2))
        prev2, prev = prev, phi[j]
    return StaircaseAngles(phi, Regime.UNITARY)


def couplings_from_angles(phi) -> np.ndarray:
    """Invert the unitary-regime recursion; needs |phi_j| < pi/4."""
    phi = np.asarray(phi, dtype=float)
    alpha = np.zeros(phi.size)
    prev = prev2 = 0.0
    for j in range(phi.size):
        denom = math.cos(2 * prev) * math.cos(2 * prev2)
        if abs(denom) < 1e-12:
            raise SingularAngleError(f"cos(2 phi) vanishes before j={j + 1}")
        alpha[j] = -math.tan(2 * phi[j]) / denom
        prev2, prev = prev, phi[j]
    return alpha


def unitary_staircase(rep: Representation, phi) -> np.ndarray:
    """The circuit (u_1 ... u_M)(u_M ... u_1) with u_j = exp(i phi_j h_j)."""
    phi = np.asarray(phi, dtype=float)
    geo = named_geometry("staircase_ggt", rep.m, phi)
    return assemble(rep, geo)


def staircase_normalization(phi) -> float:
    """Scalar C with T(i) = C * V: one factor 1/cos(2 phi_j) per generator."""
    phi = np.asarray(phi, dtype=float)
    return float(np.prod(1.0 / np.cos(2 * phi)))


# ---------------------------------------------------------------------------
# closed-form commuting charges
# ---------------------------------------------------------------------------

def homogeneous_commuting_H(rep: Representation, phi: float) -> np.ndarray:
    """cos^2(2 phi) h_1 + cos(2 phi) h_2 + sum_{j>=3} h_j.

    Commutes with the homogeneous unitary staircase at angle phi.
    """
    if rep.m < 3:
        raise ValueError("needs at least three generators")
    mats = generator_matrices(rep)
    c = math.cos(2 * phi)
    out = c**2 * mats[0] + c * mats[1]
    for h in mats[2:]:
        out = out + h
    return out


def ising_charge(rep: Representation, phis) -> np.ndarray:
    """Quadratic conserved charge of the brickwork circuit on the Ising algebra.

    phi_0 = phi_{M+1} = 0 pad the angle list at both ends.
    """
    phis = np.asarray(phis, dtype=float)
    m = rep.m
    if phis.size != m:
        raise ValueError(f"need {m} angles")
    mats = generator_matrices(rep)
    pad = np.concatenate(([0.0], phis, [0.0]))  # pad[j] = phi_j, 1-based
    dim = mats[0].shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(1, m + 1):
        out += (
            math.sin(2 * pad[j])
            * (math.cos(2 * pad[j - 1]) + math.cos(2 * pad[j + 1]))
            * mats[j - 1]
        )
    for j in range(1, m):
        coef = (-1) ** (j + 1) * math.sin(2 * pad[j]) * math.sin(2 * pad[j + 1])
        pair = rep.generator(j).multiply(rep.generator(j + 1))
        out += coef * 1j * pair.to_dense()
    return out


def g1_commuting_charge(rep: Representation, phi: float) -> np.ndarray:
    """Lowest-order charge commuting with the homogeneous g1_ggt circuit.

    Needs even m >= 6.  The bulk is homogeneous; boundary terms and two
    families of triple products carry the angle dependence.
    """
    m = rep.m
    if m % 2 or m < 6:
        raise ValueError("g1 charge needs even m >= 6")
    mats = generator_matrices(rep)
    c = math.cos(2 * phi)
    s2 = math.sin(2 * phi) ** 2

    def triple(a, b, cc):
        w = rep.generator(a).multiply(rep.generator(b)).multiply(rep.generator(cc))
        return w.to_dense()

    out = c**3 * mats[0] + c * mats[1]
    for j in range(3, m - 2, 2):
        out = out + c**2 * mats[j - 1] + mats[j]
    out = out + c**2 * mats[m - 2] + c * mats[m - 1]
    out = out + s2 * c * triple(2, 3, 5)
    for j in range(4, m - 3, 2):
        out = out + s2 * triple(j, j + 1, j + 3)
    return out


# ---------------------------------------------------------------------------
# fermionic operators
# ---------------------------------------------------------------------------

def fermion_ops(rep: Representation, alpha):
    """Ladder operator pairs (Psi_{+k}, Psi_{-k}) from the transfer matrix.

    Psi_{+k} is proportional to T(-v_k) chi T(+v_k) with chi the boundary
    operator; the normalization is fixed by {Psi_{+k}, Psi_{-k}} = 1.
    Returns (quasi_energy_set, [(Psi_plus, Psi_minus), ...]) ordered as the
    quasi-energies (descending eps).
    """
    try:
        qes = quasi_energies(alpha)
    except ConditioningError as exc:
        raise GaugeAmbiguityError(f"quasi-energies unavailable: {exc}") from exc
    chi = boundary_operator(rep).to_dense()
    dim = chi.shape[0]
    pairs = []
    for vk in qes.v_tilde:
        plus = transfer_dense(rep, alpha, -vk) @ chi @ transfer_dense(rep, alpha, vk)
        minus = plus.conj().T
        anti = plus @ minus + minus @ plus
        c = float(np.trace(anti).real) / dim
        off = np.linalg.norm(anti - c * np.eye(dim))
        if c <= 0 or off > 1e-8 * max(1.0, abs(c)) * dim:
            raise GaugeAmbiguityError(
                f"anticommutator not proportional to identity at v~={vk:.6g}"
            )
        norm = math.sqrt(c)
        pairs.append((plus / norm, minus / norm))
    return qes, pairs


def ladder_oracle(a: np.ndarray, mode_values, kind: str = "auto", tol: float = 1e-9):
    """Direct ladder construction from the eigenbasis of a normal operator.

    ``mode_values`` are eps_k for a Hermitian input (eigenvalues are signed
    sums) or mode angles for a unitary input (eigenphases are signed sums mod
    2 pi).  Degenerate levels are handled by summing over a deterministically
    ordered basis inside each level.  Raises OracleInapplicableError when the
    spectrum does not carry the signed-sum structure.
    """
    a = np.asarray(a, dtype=complex)
    dim = a.shape[0]
    if kind == "auto":
        if np.allclose(a, a.conj().T, atol=1e-10):
            kind = "hermitian"
        elif np.max(np.abs(a.conj().T @ a - np.eye(dim))) < 1e-9:
            kind = "unitary"
        else:
            raise OracleInapplicableError("operator is neither Hermitian nor unitary")

    modes = np.asarray(mode_values, dtype=float)
    n = modes.size
    if dim % (2**n):
        raise OracleInapplicableError(f"dimension {dim} not divisible by 2^{n}")
    deg = dim // 2**n

    t_mat, z_mat = scipy.linalg.schur(a, output="complex")
    if np.linalg.norm(t_mat - np.diag(np.diag(t_mat))) > 1e-8 * max(
        1.0, np.linalg.norm(t_mat)
    ):
        raise OracleInapplicableError("operator is not normal")
    eigvals = np.diag(t_mat)

    taus = [tuple(1 if (i >> k) & 1 else -1 for k in range(n)) for i in range(2**n)]
    if kind == "hermitian":
        targets = {tau: float(np.dot(tau, modes)) for tau in taus}

        def dist(lam, t):
            return abs(lam.real - t) + abs(lam.imag)

    else:
        targets = {tau: float(wrap_phase(np.dot(tau, modes))) for tau in taus}

        def dist(lam, t):
            return abs(wrap_phase(np.angle(lam) - t))

    vals = list(targets.values())
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            gap = abs(vals[i] - vals[j]) if kind == "hermitian" else abs(
                wrap_phase(vals[i] - vals[j])
            )
            if gap < 10 * tol:
                raise OracleInapplicableError(
                    "mode signed sums collide; level assignment is ambiguous"
                )

    buckets = {tau: [] for tau in taus}
    for idx in range(dim):
        lam = eigvals[idx]
        tau = min(taus, key=lambda t: dist(lam, targets[t]))
        if dist(lam, targets[tau]) > 1e4 * tol:
            raise OracleInapplicableError(
                f"eigenvalue {lam:.6g} matches no signed sum"
            )
        buckets[tau].append(idx)
    if any(len(b) != deg for b in buckets.values()):
        raise OracleInapplicableError("levels are not uniformly degenerate")

    def canonical(vec):
        k = int(np.argmax(np.abs(vec)))
        phase = vec[k] / abs(vec[k])
        return vec / phase

    basis = {}
    for tau, idxs in buckets.items():
        vecs = [canonical(z_mat[:, i]) for i in idxs]
        keys = [tuple(np.round(np.concatenate([v.real, v.imag]), 9)) for v in vecs]
        basis[tau] = [v for _, v in sorted(zip(keys, vecs), key=lambda p: p[0])]

    ops = []
    for k in range(n):
        psi = np.zeros((dim, dim), dtype=complex)
        for tau in taus:
            if tau[k] != -1:
                continue
            sign = 1
            for ell in range(k):
                sign *= tau[ell]
            upper = tuple(1 if ell == k else tau[ell] for ell in range(n))
            for va, vb in zip(basis[upper], basis[tau]):
                psi += sign * np.outer(va, vb.conj())
        ops.append(psi)
    return ops


# ---------------------------------------------------------------------------
# pipeline report
# ---------------------------------------------------------------------------

def transfer_report(rep: Representation, alpha, check_vs=(0.2, 0.5)) -> dict:
    """Full couplings -> polynomial -> angles -> circuit run with residuals."""
    alpha = np.asarray(alpha, dtype=float)
    poly = char_poly(alpha)
    qes = quasi_energies(alpha)
    angles = unitary_angles_from_couplings(alpha)
    circuit = unitary_staircase(rep, angles.phi)
    h = hamiltonian(rep, alpha)

    comm = float(np.linalg.norm(circuit @ h - h @ circuit))
    actual = np.sort(np.angle(np.linalg.eigvals(circuit)))
    predicted = predicted_phases(alpha, rep.n_sites)
    spectrum = float(np.max(np.abs(wrap_phase(actual - predicted))))
    norm_c = staircase_normalization(angles.phi)
    ti = transfer_dense(rep, alpha, 1j)
    fact = float(np.linalg.norm(ti - norm_c * circuit))
    consistency = {}
    for v in check_vs:
        t1 = transfer_dense(rep, alpha, v)
        t2 = transfer_from_charges(rep, alpha, v)
        consistency[v] = float(np.linalg.norm(t1 - t2) / np.linalg.norm(t2))

    return {
        "alpha": [float(a) for a in alpha],
        "poly_coeffs": [float(c) for c in poly.as_floats()],
        "v_tilde": [float(x) for x in qes.v_tilde],
        "eps": [float(x) for x in qes.eps],
        "eps_angle": [float(x) for x in qes.eps_angle],
        "angles": [float(x) for x in angles.phi],
        "residuals": {
            "commutator": comm,
            "spectrum_match": spectrum,
            "unitary_factorization": fact,
            "charge_consistency": consistency,
            "normalization": norm_c,
        },
    }
