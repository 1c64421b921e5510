"""The generalized three-family chain and its factorized transfer matrix.

The chain of length L lives on sites 0 .. L+1 and carries three species of
local terms built from two coupling sequences a_j, b_j:

    A_j = a_{j-1} a_j X_{j-1} X_j Z_{j+1}
    B_j = b_{j-1} b_j Z_{j-2} Y_{j-1} Y_j
    C_j = a_j b_j Z_{j-1} Z_{j+1}

The couplings are tied together so that A_j B_j + C_{j-1} C_j = 0; this
fine tuning is what makes H = C_1 + sum_{j>=2} (A_j + B_j + C_j) free
fermionic.  Three transfer-matrix families obey closed recursions, factorize
into local gates g^B g^A g^C, and turn into a unitary circuit at imaginary
spectral parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import RecursionDomainError
from .pauli import PauliString
from .spectral import signed_sums, wrap_phase
from .transfer import QuasiEnergySet, Regime, _positive_real_roots


def n_gen_modes(length: int) -> int:
    return (length + 1) // 2


@dataclass(frozen=True)
class GenCouplings:
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("need equal-length nonempty coupling sequences")

    @property
    def length(self) -> int:
        return len(self.a)

    @property
    def n_sites(self) -> int:
        return self.length + 2


@dataclass(frozen=True)
class GenOperators:
    """Coupling-free Pauli strings t^A_j (j=1..L), t^B_j (j=2..L), t^C_j (j=1..L)."""

    length: int
    t_a: dict
    t_b: dict
    t_c: dict

    @property
    def n_sites(self) -> int:
        return self.length + 2


def gen_operators(length: int) -> GenOperators:
    """Site labels follow the 0 .. L+1 convention; storage is 1-based inside."""
    if length < 1:
        raise ValueError("need length >= 1")
    n = length + 2

    def site(lbl):  # external label -> internal 1-based site
        return lbl + 1

    t_a = {
        j: PauliString.from_ops(n, {site(j - 1): "X", site(j): "X", site(j + 1): "Z"})
        for j in range(1, length + 1)
    }
    t_b = {
        j: PauliString.from_ops(n, {site(j - 2): "Z", site(j - 1): "Y", site(j): "Y"})
        for j in range(2, length + 1)
    }
    t_c = {
        j: PauliString.from_ops(n, {site(j - 1): "Z", site(j + 1): "Z"})
        for j in range(1, length + 1)
    }
    return GenOperators(length, t_a, t_b, t_c)


def _term_matrices(c: GenCouplings):
    """Dense A_j (j>=2), B_j (j>=2), C_j (j>=1) with their couplings."""
    ops = gen_operators(c.length)
    a, b = (0.0,) + c.a, (0.0,) + c.b  # 1-based
    amats = {j: a[j - 1] * a[j] * ops.t_a[j].to_dense() for j in range(2, c.length + 1)}
    bmats = {j: b[j - 1] * b[j] * ops.t_b[j].to_dense() for j in range(2, c.length + 1)}
    cmats = {j: a[j] * b[j] * ops.t_c[j].to_dense() for j in range(1, c.length + 1)}
    return amats, bmats, cmats


def gen_hamiltonian(c: GenCouplings) -> np.ndarray:
    """H = C_1 + sum_{j=2}^L (A_j + B_j + C_j) on 2**(L+2) dimensions."""
    amats, bmats, cmats = _term_matrices(c)
    out = cmats[1].copy()
    for j in range(2, c.length + 1):
        out += amats[j] + bmats[j] + cmats[j]
    return out


def verify_gen_commutation(length: int, ops: GenOperators | None = None) -> list:
    """Exact pairwise (anti)commutation table of the t operators.

    Anticommuting pairs: A with A at distance 1 or 2 (same for B), A or B
    with C at offsets -2, -1, 0, +1, and A with B at distance 1.  Everything
    else commutes.  Returns the violating pairs; empty on success.  A custom
    ``ops`` table may be supplied (negative controls in tests).
    """
    if ops is None:
        ops = gen_operators(length)
    labelled = [("A", j, p) for j, p in ops.t_a.items()]
    labelled += [("B", j, p) for j, p in ops.t_b.items()]
    labelled += [("C", j, p) for j, p in ops.t_c.items()]

    def should_anticommute(x1, j1, x2, j2):
        if x1 > x2 or (x1 == x2 and j1 > j2):
            x1, j1, x2, j2 = x2, j2, x1, j1
        d = j2 - j1
        if x1 == x2 in ("A", "B"):
            return abs(d) in (1, 2)
        if x1 == "A" and x2 == "B":
            return abs(d) == 1
        if x2 == "C" and x1 in ("A", "B"):
            return d in (-2, -1, 0, 1)  # C_k vs A_j or B_j at k = j-2 .. j+1
        return False

    bad = []
    for i, (x1, j1, p1) in enumerate(labelled):
        for x2, j2, p2 in labelled[i + 1 :]:
            expected = not should_anticommute(x1, j1, x2, j2)
            if p1.commutes(p2) != expected:
                bad.append(((x1, j1), (x2, j2)))
    return bad


# ---------------------------------------------------------------------------
# transfer matrices and polynomials
# ---------------------------------------------------------------------------

def gen_transfer(c: GenCouplings, v: complex):
    """(T_L, T^A_L, T^B_L) from the coupled recursions.

    T_j = T^A_j + T^B_j - T_{j-1} - v C_j T_{j-2}
    T^A_{j+1} = T_j - v A_{j+1} T^B_{j-1},  T^B_{j+1} = T_j - v B_{j+1} T^A_{j-1}
    with unit seeds at j <= 1 (and T_0 = T_{-1} = 1).
    """
    amats, bmats, cmats = _term_matrices(c)
    dim = 2**c.n_sites
    eye = np.eye(dim, dtype=complex)
    t = {0: eye, -1: eye}
    t_a = {0: eye, 1: eye}
    t_b = {0: eye, 1: eye}
    for j in range(1, c.length + 1):
        t[j] = t_a[j] + t_b[j] - t[j - 1] - v * (cmats[j] @ t[j - 2])
        if j + 1 <= c.length:
            t_a[j + 1] = t[j] - v * (amats[j + 1] @ t_b[j - 1])
            t_b[j + 1] = t[j] - v * (bmats[j + 1] @ t_a[j - 1])
    ell = c.length
    return t[ell], t_a[ell], t_b[ell]


@dataclass(frozen=True)
class GenCharPolys:
    """The three polynomial families in u = v^2, exact rationals, ascending."""

    p: tuple
    p_a: tuple
    p_b: tuple
    length: int

    def as_floats(self):
        return tuple(np.array([float(x) for x in c]) for c in (self.p, self.p_a, self.p_b))


def gen_char_polys(c: GenCouplings) -> GenCharPolys:
    a, b = (0.0,) + c.a, (0.0,) + c.b

    def shift_scale(coeffs, w):
        return [Fraction(0)] + [Fraction(float(w)) ** 2 * x for x in coeffs]

    def add(*polys):
        width = max(len(p) for p in polys)
        return [
            sum((p[i] if i < len(p) else Fraction(0)) for p in polys)
            for i in range(width)
        ]

    def neg(p):
        return [-x for x in p]

    one = [Fraction(1)]
    p = {0: one, -1: one}
    pa = {0: one, 1: one}
    pb = {0: one, 1: one}
    for j in range(1, c.length + 1):
        p[j] = add(pa[j], pb[j], neg(p[j - 1]), neg(shift_scale(p[j - 2], a[j] * b[j])))
        if j + 1 <= c.length:
            pa[j + 1] = add(p[j], neg(shift_scale(pb[j - 1], a[j] * a[j + 1])))
            pb[j + 1] = add(p[j], neg(shift_scale(pa[j - 1], b[j] * b[j + 1])))
    ell = c.length

    def trim(coeffs):
        out = list(coeffs)
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return tuple(out)

    return GenCharPolys(trim(p[ell]), trim(pa[ell]), trim(pb[ell]), ell)


def gen_quasi_energies(c: GenCouplings) -> QuasiEnergySet:
    """One-particle data from the roots of P_L; empty set when P_L = 1."""
    polys = gen_char_polys(c)
    u = _positive_real_roots(polys.p)
    if u.size == 0:
        return QuasiEnergySet(np.array([]), np.array([]), np.array([]))
    v_tilde = np.sqrt(u)
    eps = 1.0 / v_tilde
    order = np.argsort(eps)[::-1]
    return QuasiEnergySet(v_tilde[order], eps[order], np.arctan(eps[order]))


def gen_predicted_phases(c: GenCouplings, y: float = 1.0) -> np.ndarray:
    """Eigenphase multiset of the unitary circuit at parameter y.

    The circuit realizes T(iy) up to a scalar, so the mode angles are
    arctan(y * eps_k).
    """
    qes = gen_quasi_energies(c)
    sums = signed_sums(np.arctan(y * qes.eps))
    reps = 2**c.n_sites // sums.size
    return np.sort(np.repeat(sums, reps))


# ---------------------------------------------------------------------------
# angles and factorization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenAngles:
    """Species-resolved gate angles, arrays indexed 0..L with zero seeds."""

    phi_a: np.ndarray
    phi_b: np.ndarray
    phi_c: np.ndarray
    regime: Regime

    @property
    def length(self) -> int:
        return self.phi_a.size - 1

    def to_dict(self) -> dict:
        return {
            "phiA": [float(x) for x in self.phi_a[1:]],
            "phiB": [float(x) for x in self.phi_b[1:]],
            "phiC": [float(x) for x in self.phi_c[1:]],
            "regime": self.regime.value,
        }


def gen_angles(c: GenCouplings, v: float) -> GenAngles:
    """Hermitian-regime angle recursion; fails fast when |sin| would exceed 1."""
    a, b = (0.0,) + c.a, (0.0,) + c.b
    ell = c.length
    pa = np.zeros(ell + 1)
    pb = np.zeros(ell + 1)
    pc = np.zeros(ell + 1)

    def asin_checked(x, species, idx):
        if abs(x) > 1.0:
            raise RecursionDomainError(
                f"angle recursion out of domain for phi^{species}_{idx} "
                f"(|sin| = {abs(x):.4f})",
                index=idx,
                species=species,
            )
        return math.asin(x)

    # j = 0 step only defines phi^C_1; A and B start from their zero seeds
    pc[1] = asin_checked(-v * a[1] * b[1], "C", 1)
    for j in range(1, ell):
        denom = (
            math.cos(pc[j - 1])
            * math.cos(pa[j - 1])
            * math.cos(pa[j])
            * math.cos(pb[j])
            * math.cos(pc[j])
        )
        pa[j + 1] = asin_checked(-v * a[j] * a[j + 1] / denom, "A", j + 1)
        denom = (
            math.cos(pc[j - 1])
            * math.cos(pb[j - 1])
            * math.cos(pa[j])
            * math.cos(pb[j])
            * math.cos(pc[j])
        )
        pb[j + 1] = asin_checked(-v * b[j] * b[j + 1] / denom, "B", j + 1)
        denom = (
            math.cos(pc[j]) ** 2
            * math.cos(pa[j])
            * math.cos(pb[j])
            * math.cos(pa[j + 1])
            * math.cos(pb[j + 1])
        )
        pc[j + 1] = asin_checked(-v * a[j + 1] * b[j + 1] / denom, "C", j + 1)
    return GenAngles(pa, pb, pc, Regime.HERMITIAN)


def gen_angle_relation_residuals(angles: GenAngles) -> np.ndarray:
    """sin phi^C_{j-1} sin phi^C_j - tan phi^A_j tan phi^B_j for j = 1..L."""
    pa, pb, pc = angles.phi_a, angles.phi_b, angles.phi_c
    ell = angles.length
    out = np.zeros(ell)
    for j in range(1, ell + 1):
        prev_c = pc[j - 1] if j >= 1 else 0.0
        out[j - 1] = math.sin(prev_c) * math.sin(pc[j]) - math.tan(pa[j]) * math.tan(
            pb[j]
        )
    return out


def _gen_gate(op: PauliString, phi: float, unitary: bool) -> np.ndarray:
    dim = 2**op.n_sites
    if unitary:
        return math.cos(phi) * np.eye(dim) + 1j * math.sin(phi) * op.to_dense()
    return math.cos(phi / 2) * np.eye(dim) + math.sin(phi / 2) * op.to_dense()


def _gen_products(angles: GenAngles, unitary: bool, upto: int | None = None):
    """(G_k, G_k^T) with G = g^C_1 (g^B_2 g^A_2 g^C_2) ... (g^B_k g^A_k g^C_k).

    ``upto`` truncates the product at index k < L while staying on the full
    2**(L+2)-dimensional space, as the recursion proofs require.
    """
    ell = angles.length
    k = ell if upto is None else upto
    ops = gen_operators(ell)
    dim = 2 ** (ell + 2)
    ga = {j: _gen_gate(ops.t_a[j], angles.phi_a[j], unitary) for j in range(2, k + 1)}
    gb = {j: _gen_gate(ops.t_b[j], angles.phi_b[j], unitary) for j in range(2, k + 1)}
    gc = {j: _gen_gate(ops.t_c[j], angles.phi_c[j], unitary) for j in range(1, k + 1)}
    g = gc[1].copy() if k >= 1 else np.eye(dim, dtype=complex)
    for j in range(2, k + 1):
        g = g @ gb[j] @ ga[j] @ gc[j]
    gt = np.eye(dim, dtype=complex)
    for j in range(k, 1, -1):
        gt = gt @ gc[j] @ ga[j] @ gb[j]
    if k >= 1:
        gt = gt @ gc[1]
    return g, gt


def gen_factor_G(angles: GenAngles, upto: int | None = None):
    """Dense (G, G^T); in the Hermitian regime T_L(v) = G_L G_L^T."""
    return _gen_products(angles, unitary=False, upto=upto)


def gen_half_gates(angles: GenAngles, j: int | None = None):
    """Squares (g^A_j)^2, (g^B_j)^2 used by the factored T^A/T^B forms:
    T^A_j = G_{j-1} (g^A_j)^2 G_{j-1}^T and likewise for B.  Default j = L."""
    ell = angles.length
    if j is None:
        j = ell
    ops = gen_operators(ell)
    unitary = angles.regime is Regime.UNITARY
    ga = _gen_gate(ops.t_a[j], angles.phi_a[j], unitary)
    gb = _gen_gate(ops.t_b[j], angles.phi_b[j], unitary)
    return ga @ ga, gb @ gb


def gen_unitary_angles(c: GenCouplings, y: float = 1.0) -> GenAngles:
    """Unitary-regime recursion tan(2 phi) = -y (couplings) (cos products)."""
    a, b = (0.0,) + c.a, (0.0,) + c.b
    ell = c.length
    pa = np.zeros(ell + 1)
    pb = np.zeros(ell + 1)
    pc = np.zeros(ell + 1)
    pc[1] = 0.5 * math.atan(-y * a[1] * b[1])
    for j in range(1, ell):
        prod = (
            math.cos(2 * pc[j - 1])
            * math.cos(2 * pa[j - 1])
            * math.cos(2 * pa[j])
            * math.cos(2 * pb[j])
            * math.cos(2 * pc[j])
        )
        pa[j + 1] = 0.5 * math.atan(-y * a[j] * a[j + 1] * prod)
        prod = (
            math.cos(2 * pc[j - 1])
            * math.cos(2 * pb[j - 1])
            * math.cos(2 * pa[j])
            * math.cos(2 * pb[j])
            * math.cos(2 * pc[j])
        )
        pb[j + 1] = 0.5 * math.atan(-y * b[j] * b[j + 1] * prod)
        prod = (
            math.cos(2 * pc[j]) ** 2
            * math.cos(2 * pa[j])
            * math.cos(2 * pb[j])
            * math.cos(2 * pa[j + 1])
            * math.cos(2 * pb[j + 1])
        )
        pc[j + 1] = 0.5 * math.atan(-y * a[j + 1] * b[j + 1] * prod)
    return GenAngles(pa, pb, pc, Regime.UNITARY)


def gen_unitary_circuit(c: GenCouplings, y: float = 1.0):
    """(angles, V) with V the unitary staircase circuit; [V, H] = 0."""
    angles = gen_unitary_angles(c, y)
    u, ut = _gen_products(angles, unitary=True)
    return angles, u @ ut


def gen_normalization(angles: GenAngles) -> float:
    """Scalar C with T(iy) = C * V."""
    cprod = 1.0 / math.cos(2 * angles.phi_c[1])
    for j in range(2, angles.length + 1):
        cprod /= (
            math.cos(2 * angles.phi_a[j])
            * math.cos(2 * angles.phi_b[j])
            * math.cos(2 * angles.phi_c[j])
        )
    return cprod


def check_angle_constraint(angles: GenAngles, tol: float = 1e-9):
    """tan(2 phi^C_{j-1}) tan(2 phi^C_j) = sin(2 phi^A_j) sin(2 phi^B_j), j=2..L.

    The admissibility test for angle sets that claim to come from some
    coupling pair (a, b).  Returns (ok, residuals).
    """
    pa, pb, pc = angles.phi_a, angles.phi_b, angles.phi_c
    ell = angles.length
    res = np.zeros(max(ell - 1, 0))
    for j in range(2, ell + 1):
        res[j - 2] = math.tan(2 * pc[j - 1]) * math.tan(2 * pc[j]) - math.sin(
            2 * pa[j]
        ) * math.sin(2 * pb[j])
    return bool(np.all(np.abs(res) < tol)), res


# ---------------------------------------------------------------------------
# pipeline report
# ---------------------------------------------------------------------------

def gen_report(c: GenCouplings, y: float = 1.0, check_vs=(0.1, 0.2, 0.3)) -> dict:
    polys = gen_char_polys(c)
    qes = gen_quasi_energies(c)
    angles, circuit = gen_unitary_circuit(c, y)
    h = gen_hamiltonian(c)
    dim = 2**c.n_sites

    comm = float(np.linalg.norm(circuit @ h - h @ circuit))
    actual = np.sort(np.angle(np.linalg.eigvals(circuit)))
    predicted = gen_predicted_phases(c, y)
    spectrum = float(np.max(np.abs(wrap_phase(actual - predicted))))
    ok, constraint = check_angle_constraint(angles)

    inversion = {}
    pl = np.array([float(x) for x in polys.p])
    for v in check_vs:
        t, _, _ = gen_transfer(c, v)
        tm, _, _ = gen_transfer(c, -v)
        inversion[v] = float(
            np.linalg.norm(t @ tm - np.polyval(pl[::-1], v**2) * np.eye(dim))
        )

    p, pa, pb = polys.as_floats()
    return {
        "a": list(c.a),
        "b": list(c.b),
        "y": y,
        "poly_coeffs": {"P": p.tolist(), "PA": pa.tolist(), "PB": pb.tolist()},
        "v_tilde": [float(x) for x in qes.v_tilde],
        "eps": [float(x) for x in qes.eps],
        "eps_angle": [float(x) for x in qes.eps_angle],
        "angles": angles.to_dict(),
        "residuals": {
            "commutator": comm,
            "spectrum_match": spectrum,
            "inversion": inversion,
            "constraint_max": float(np.max(np.abs(constraint))) if constraint.size else 0.0,
            "constraint_ok": ok,
        },
    }
