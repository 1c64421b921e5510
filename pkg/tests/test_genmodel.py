import math

import numpy as np
import pytest

from conftest import circular_multiset_error, comm_norm

from ffdcirc.algebras import build_representation
from ffdcirc.errors import RecursionDomainError
from ffdcirc.genmodel import (
    GenAngles,
    GenCouplings,
    GenOperators,
    check_angle_constraint,
    gen_angle_relation_residuals,
    gen_angles,
    gen_char_polys,
    gen_factor_G,
    gen_half_gates,
    gen_hamiltonian,
    gen_normalization,
    gen_operators,
    gen_predicted_phases,
    gen_quasi_energies,
    gen_report,
    gen_transfer,
    gen_unitary_angles,
    gen_unitary_circuit,
    verify_gen_commutation,
)
from ffdcirc.genmodel import _term_matrices
from ffdcirc.pauli import PauliString
from ffdcirc.spectral import cluster_distinct
from ffdcirc.transfer import quasi_energies as ffd_quasi_energies
from ffdcirc.transfer import unitary_angles_from_couplings, unitary_staircase


def random_couplings(rng, length, lo=-1.0, hi=1.0):
    return GenCouplings(rng.uniform(lo, hi, length), rng.uniform(lo, hi, length))


# ---------------------------------------------------------------------------
# operators and relations
# ---------------------------------------------------------------------------

def test_gen_operator_tables():
    ops = gen_operators(3)
    n = ops.n_sites
    # chain sites are labelled 0..L+1; internal storage is 1-based
    assert ops.t_a[2] == PauliString.from_ops(n, {2: "X", 3: "X", 4: "Z"})
    assert ops.t_b[2] == PauliString.from_ops(n, {1: "Z", 2: "Y", 3: "Y"})
    assert ops.t_c[2] == PauliString.from_ops(n, {2: "Z", 4: "Z"})
    assert set(ops.t_a) == {1, 2, 3}
    assert set(ops.t_b) == {2, 3}
    assert set(ops.t_c) == {1, 2, 3}


@pytest.mark.parametrize("length", [4, 5, 6])
def test_commutation_table_holds(length):
    assert verify_gen_commutation(length) == []


def test_commutation_table_negative_control():
    ops = gen_operators(5)
    bad_tb = dict(ops.t_b)
    n = ops.n_sites
    # wrong species content: Y Y -> Y X on the last two sites of t^B_3
    bad_tb[3] = PauliString.from_ops(n, {2: "Z", 3: "Y", 4: "X"})
    corrupted = GenOperators(5, ops.t_a, bad_tb, ops.t_c)
    assert verify_gen_commutation(5, corrupted) != []


@pytest.mark.parametrize("length", [2, 3, 4, 5, 6])
def test_fine_tuning_identity_exact(length, rng):
    # A_j B_j + C_{j-1} C_j = 0 holds symbolically: the two Pauli products
    # agree up to a sign that the couplings make opposite
    ops = gen_operators(length)
    for j in range(2, length + 1):
        ab = ops.t_a[j].multiply(ops.t_b[j])
        cc = ops.t_c[j - 1].multiply(ops.t_c[j])
        assert (ab.x_mask, ab.z_mask) == (cc.x_mask, cc.z_mask)
        assert (ab.phase_exp - cc.phase_exp) % 4 == 2  # relative sign -1
    c = random_couplings(rng, length)
    amats, bmats, cmats = _term_matrices(c)
    for j in range(2, length + 1):
        np.testing.assert_allclose(
            amats[j] @ bmats[j] + cmats[j - 1] @ cmats[j], 0.0, atol=1e-12
        )


def test_commuting_partners_within_a_cell(rng):
    c = random_couplings(rng, 4)
    amats, bmats, cmats = _term_matrices(c)
    for j in (2, 3, 4):
        assert comm_norm(amats[j], bmats[j]) < 1e-12
        assert comm_norm(cmats[j - 1], cmats[j]) < 1e-12


def test_gen_hamiltonian_zero_and_reduction(rng):
    zero = GenCouplings([0.0] * 3, [0.0] * 3)
    np.testing.assert_allclose(gen_hamiltonian(zero), 0.0)
    a = rng.uniform(-1, 1, 4)
    c = GenCouplings(a, np.zeros(4))
    ops = gen_operators(4)
    expected = sum(a[j - 2] * a[j - 1] * ops.t_a[j].to_dense() for j in (2, 3, 4))
    np.testing.assert_allclose(gen_hamiltonian(c), expected, atol=1e-13)


# ---------------------------------------------------------------------------
# transfer recursions and polynomials
# ---------------------------------------------------------------------------

def test_gen_transfer_identity_at_zero(rng):
    c = random_couplings(rng, 3)
    t, ta, tb = gen_transfer(c, 0.0)
    np.testing.assert_allclose(t, np.eye(2**5))


def test_gen_transfer_l1_seed():
    c = GenCouplings([0.7], [0.4])
    t, _, _ = gen_transfer(c, 0.3)
    _, _, cmats = _term_matrices(c)
    np.testing.assert_allclose(t, np.eye(8) - 0.3 * cmats[1], atol=1e-14)


@pytest.mark.parametrize("length", [2, 3, 4, 5])
def test_gen_transfer_family_commutes(length, rng):
    c = random_couplings(rng, length)
    t1, _, _ = gen_transfer(c, 0.2)
    t2, _, _ = gen_transfer(c, 0.5)
    assert comm_norm(t1, t2) < 1e-10


def test_gen_transfer_linear_term_is_hamiltonian(rng):
    c = random_couplings(rng, 4)
    h = gen_hamiltonian(c)
    step = 1e-6
    tp, _, _ = gen_transfer(c, step)
    tm, _, _ = gen_transfer(c, -step)
    np.testing.assert_allclose((tp - tm) / (2 * step), -h, atol=1e-7)


def test_gen_char_polys_trivial():
    c = GenCouplings([0.0, 0.0], [0.0, 0.0])
    polys = gen_char_polys(c)
    assert [float(x) for x in polys.p] == [1.0]


def test_gen_char_polys_l2_closed_form():
    a1, a2, b1, b2 = 0.3, -0.8, 0.5, 0.9
    polys = gen_char_polys(GenCouplings([a1, a2], [b1, b2]))
    expected = [
        1.0,
        -((a1 * b1) ** 2 + (a2 * b2) ** 2 + (a1 * a2) ** 2 + (b1 * b2) ** 2),
    ]
    np.testing.assert_allclose([float(x) for x in polys.p], expected, atol=1e-15)


@pytest.mark.parametrize("length", [1, 2, 3, 4, 5])
def test_inversion_relation(length, rng):
    c = random_couplings(rng, length)
    polys = gen_char_polys(c)
    coeffs = np.array([float(x) for x in polys.p])
    dim = 2**c.n_sites
    for v in (0.1, 0.3, 0.45):
        t, _, _ = gen_transfer(c, v)
        tm, _, _ = gen_transfer(c, -v)
        target = np.polyval(coeffs[::-1], v**2) * np.eye(dim)
        assert np.linalg.norm(t @ tm - target) < 1e-10


def test_gen_degree():
    for length in (1, 2, 3, 4, 5):
        c = GenCouplings(np.linspace(0.5, 1.0, length), np.linspace(0.9, 0.4, length))
        polys = gen_char_polys(c)
        assert len(polys.p) - 1 == (length + 1) // 2


@pytest.mark.parametrize("length", [2, 3, 4, 5])
def test_gen_quasi_energies_match_dense(length, rng):
    c = random_couplings(rng, length)
    qes = gen_quasi_energies(c)
    n = qes.n_modes
    signs = np.array(
        [[1 if (i >> k) & 1 else -1 for k in range(n)] for i in range(2**n)]
    )
    sums = np.sort(signs @ qes.eps) if n else np.zeros(1)
    pred = np.sort(np.repeat(sums, 2**c.n_sites // sums.size))
    evals = np.sort(np.linalg.eigvalsh(gen_hamiltonian(c)))
    np.testing.assert_allclose(evals, pred, atol=1e-9)


def test_gen_quasi_energies_b_zero_reduces_to_ffd(rng):
    length = 5
    a = rng.uniform(0.3, 1.0, length)
    qg = gen_quasi_energies(GenCouplings(a, np.zeros(length)))
    alpha = [a[i] * a[i + 1] for i in range(length - 1)]
    qf = ffd_quasi_energies(alpha)
    np.testing.assert_allclose(np.sort(qg.eps), np.sort(qf.eps), atol=1e-10)


def test_gen_zero_couplings_empty_modes():
    c = GenCouplings([0.0] * 3, [0.0] * 3)
    qes = gen_quasi_energies(c)
    assert qes.n_modes == 0
    np.testing.assert_allclose(gen_hamiltonian(c), 0.0)


# ---------------------------------------------------------------------------
# angles and factorization
# ---------------------------------------------------------------------------

def test_gen_angles_zero_v(rng):
    c = random_couplings(rng, 4)
    angles = gen_angles(c, 0.0)
    np.testing.assert_allclose(angles.phi_a, 0.0)
    np.testing.assert_allclose(angles.phi_b, 0.0)
    np.testing.assert_allclose(angles.phi_c, 0.0)


def test_gen_angles_first_step():
    c = GenCouplings([0.8, 0.2], [0.5, 0.3])
    angles = gen_angles(c, 0.1)
    assert angles.phi_c[1] == pytest.approx(math.asin(-0.1 * 0.8 * 0.5))
    assert angles.phi_a[1] == 0.0 and angles.phi_b[1] == 0.0


def test_gen_angles_relation(rng):
    c = random_couplings(rng, 4)
    angles = gen_angles(c, 0.05)
    assert np.max(np.abs(gen_angle_relation_residuals(angles))) < 1e-10


def test_gen_angles_domain_error_carries_species():
    c = GenCouplings([3.0, 3.0, 3.0], [3.0, 3.0, 3.0])
    with pytest.raises(RecursionDomainError) as err:
        gen_angles(c, 0.9)
    assert err.value.species in ("A", "B", "C")
    assert err.value.index is not None


def test_gen_factor_l1():
    c = GenCouplings([0.7], [0.4])
    angles = gen_angles(c, 0.2)
    g, gt = gen_factor_G(angles)
    np.testing.assert_allclose(g, gt, atol=1e-14)
    t, _, _ = gen_transfer(c, 0.2)
    assert np.linalg.norm(g @ gt - t) < 1e-12


@pytest.mark.parametrize("length", [2, 3, 4, 5])
def test_gen_factorization_all_three(length, rng):
    c = random_couplings(rng, length)
    v = 0.05
    angles = gen_angles(c, v)
    g, gt = gen_factor_G(angles)
    t, ta, tb = gen_transfer(c, v)
    assert np.linalg.norm(g @ gt - t) < 1e-10
    gm, gmt = gen_factor_G(angles, upto=length - 1)
    ga2, gb2 = gen_half_gates(angles)
    assert np.linalg.norm(gm @ ga2 @ gmt - ta) < 1e-10
    assert np.linalg.norm(gm @ gb2 @ gmt - tb) < 1e-10


def test_gen_factor_zero_v(rng):
    c = random_couplings(rng, 3)
    angles = gen_angles(c, 0.0)
    g, gt = gen_factor_G(angles)
    np.testing.assert_allclose(g, np.eye(2**5))
    np.testing.assert_allclose(gt, np.eye(2**5))


def test_recursion_identities_with_factorized_operators(rng):
    # the three defining recursions evaluated with factorized members vanish
    length = 5
    c = random_couplings(rng, length)
    v = 0.04
    angles = gen_angles(c, v)
    amats, bmats, cmats = _term_matrices(c)

    def t_of(k):
        g, gt = gen_factor_G(angles, upto=k)
        return g @ gt

    def ta_of(k):
        g, gt = gen_factor_G(angles, upto=k - 1)
        ga2, _ = gen_half_gates(angles, k)
        return g @ ga2 @ gt

    def tb_of(k):
        g, gt = gen_factor_G(angles, upto=k - 1)
        _, gb2 = gen_half_gates(angles, k)
        return g @ gb2 @ gt

    ell = length
    r1 = (
        t_of(ell)
        - ta_of(ell)
        - tb_of(ell)
        + t_of(ell - 1)
        + v * cmats[ell] @ t_of(ell - 2)
    )
    r2 = ta_of(ell) - t_of(ell - 1) + v * amats[ell] @ tb_of(ell - 2)
    r3 = tb_of(ell) - t_of(ell - 1) + v * bmats[ell] @ ta_of(ell - 2)
    assert np.linalg.norm(r1) < 1e-10
    assert np.linalg.norm(r2) < 1e-10
    assert np.linalg.norm(r3) < 1e-10


# ---------------------------------------------------------------------------
# unitary circuit
# ---------------------------------------------------------------------------

def test_gen_unitary_identity_at_zero(rng):
    c = random_couplings(rng, 3)
    angles, v = gen_unitary_circuit(c, 0.0)
    np.testing.assert_allclose(v, np.eye(2**5), atol=1e-14)


@pytest.mark.parametrize("length", [1, 2, 3, 4, 5])
def test_gen_unitary_commutes_and_matches(length, rng):
    c = random_couplings(rng, length)
    for y in (1.0, 0.2):
        angles, v = gen_unitary_circuit(c, y)
        dim = 2**c.n_sites
        assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-12
        assert comm_norm(v, gen_hamiltonian(c)) < 1e-10
        actual = np.sort(np.angle(np.linalg.eigvals(v)))
        predicted = gen_predicted_phases(c, y)
        assert circular_multiset_error(actual, predicted) < 1e-9


def test_gen_unitary_normalization(rng):
    c = random_couplings(rng, 3)
    y = 0.7
    angles, v = gen_unitary_circuit(c, y)
    t, _, _ = gen_transfer(c, 1j * y)
    assert np.linalg.norm(t - gen_normalization(angles) * v) < 1e-9


def test_gen_unitary_l3_ones():
    c = GenCouplings([1.0] * 3, [1.0] * 3)
    angles, v = gen_unitary_circuit(c, 0.2)
    assert comm_norm(v, gen_hamiltonian(c)) < 1e-10
    actual = np.sort(np.angle(np.linalg.eigvals(v)))
    assert circular_multiset_error(actual, gen_predicted_phases(c, 0.2)) < 1e-9


def test_gen_unitary_b_zero_matches_ffd_staircase(rng):
    length = 5
    a = rng.uniform(0.4, 1.0, length)
    c = GenCouplings(a, np.zeros(length))
    _, v = gen_unitary_circuit(c, 1.0)
    reps_gen, _ = cluster_distinct(np.angle(np.linalg.eigvals(v)), 1e-7, circular=True)
    alpha = [a[i] * a[i + 1] for i in range(length - 1)]
    rep = build_representation("ffd-basic", length - 1)
    v2 = unitary_staircase(rep, unitary_angles_from_couplings(alpha).phi)
    reps_ffd, _ = cluster_distinct(np.angle(np.linalg.eigvals(v2)), 1e-7, circular=True)
    np.testing.assert_allclose(reps_gen, reps_ffd, atol=1e-9)


def test_gen_spectrum_uniform_degeneracy(rng):
    c = random_couplings(rng, 4)
    _, v = gen_unitary_circuit(c, 1.0)
    phases = np.angle(np.linalg.eigvals(v))
    _, counts = cluster_distinct(phases, 1e-7, circular=True)
    qes = gen_quasi_energies(c)
    assert set(counts.tolist()) == {2**c.n_sites // 2**qes.n_modes}


# ---------------------------------------------------------------------------
# angle constraint
# ---------------------------------------------------------------------------

def test_constraint_holds_for_recursion_angles(rng):
    c = random_couplings(rng, 5)
    angles = gen_unitary_angles(c, 1.0)
    ok, res = check_angle_constraint(angles)
    assert ok
    assert np.max(np.abs(res)) < 1e-9


def test_constraint_all_zero():
    angles = GenAngles(np.zeros(4), np.zeros(4), np.zeros(4), None)
    ok, _ = check_angle_constraint(angles)
    assert ok


def test_constraint_detects_perturbation(rng):
    c = random_couplings(rng, 4)
    angles = gen_unitary_angles(c, 1.0)
    pc = angles.phi_c.copy()
    pc[2] += 0.01
    ok, res = check_angle_constraint(
        GenAngles(angles.phi_a, angles.phi_b, pc, angles.regime)
    )
    assert not ok
    # the damage is localized to the two relations touching phi^C_2
    assert np.count_nonzero(np.abs(res) > 1e-9) <= 2


def test_gen_report(rng):
    c = random_couplings(rng, 3)
    report = gen_report(c, 0.5)
    res = report["residuals"]
    assert res["commutator"] < 1e-10
    assert res["spectrum_match"] < 1e-9
    assert res["constraint_ok"]
    assert all(x < 1e-10 for x in res["inversion"].values())
    assert set(report["angles"]) == {"phiA", "phiB", "phiC", "regime"}
