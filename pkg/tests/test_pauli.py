import itertools

import numpy as np
import pytest

from ffdcirc.errors import DenseSizeError, DimensionMismatchError
from ffdcirc.pauli import PauliString

X = PauliString.from_ops(1, {1: "X"})
Y = PauliString.from_ops(1, {1: "Y"})
Z = PauliString.from_ops(1, {1: "Z"})


def all_strings(n_sites, phases=(0,)):
    """Every mask combination on n_sites with the given phase exponents."""
    out = []
    for x in range(2**n_sites):
        for z in range(2**n_sites):
            for p in phases:
                out.append(PauliString(n_sites, x, z, p))
    return out


def test_multiplication_table_single_site():
    assert X.multiply(X) == PauliString.identity(1)
    xz = X.multiply(Z)
    # XZ = -i Y: same masks as Y, phase three quarters ahead
    assert (xz.x_mask, xz.z_mask) == (Y.x_mask, Y.z_mask)
    assert xz.phase_exp == (Y.phase_exp + 3) % 4
    np.testing.assert_array_equal(xz.to_dense(), -1j * Y.to_dense())


def test_two_site_product_matches_dense():
    p = PauliString.from_ops(2, {1: "X", 2: "Z"})
    q = PauliString.from_ops(2, {1: "Z", 2: "Z"})
    prod = p.multiply(q)
    np.testing.assert_array_equal(prod.to_dense(), p.to_dense() @ q.to_dense())
    # (X o Z)(Z o Z) = -i (Y o I)
    expected = -1j * PauliString.from_ops(2, {1: "Y"}).to_dense()
    np.testing.assert_array_equal(prod.to_dense(), expected)


def test_dense_basics():
    np.testing.assert_array_equal(X.to_dense(), np.array([[0, 1], [1, 0]]))
    np.testing.assert_array_equal(PauliString.identity(2).to_dense(), np.eye(4))
    minus_i_y = Y.with_phase(3)
    np.testing.assert_array_equal(minus_i_y.to_dense(), np.array([[0, -1], [1, 0]]))


def test_dense_is_unitary():
    for p in all_strings(2, phases=(0, 1, 2, 3)):
        u = p.to_dense()
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-15)


def test_commutes_single_site():
    assert not X.commutes(Z)
    assert X.commutes(X)


def test_commutes_basic_rep_pattern():
    n = 6
    h1 = PauliString.from_ops(n, {1: "X", 2: "X", 3: "Z"})
    h2 = PauliString.from_ops(n, {2: "X", 3: "X", 4: "Z"})
    h4 = PauliString.from_ops(n, {4: "X", 5: "X", 6: "Z"})
    assert not h1.commutes(h2)
    assert h1.commutes(h4)


def test_associativity_exhaustive_two_sites():
    strings = all_strings(2)
    for p, q, r in itertools.product(strings, repeat=3):
        assert p.multiply(q).multiply(r) == p.multiply(q.multiply(r))


def test_dense_homomorphism_three_sites():
    strings = all_strings(3)
    dense = {s: s.to_dense() for s in strings}
    for p, q in itertools.product(strings, repeat=2):
        np.testing.assert_array_equal(
            p.multiply(q).to_dense(), dense[p] @ dense[q]
        )


def test_commutes_agrees_with_dense_three_sites():
    strings = all_strings(3)
    dense = {s: s.to_dense() for s in strings}
    for p, q in itertools.combinations(strings, 2):
        zero = np.allclose(dense[p] @ dense[q] - dense[q] @ dense[p], 0)
        assert p.commutes(q) == zero


def test_hermiticity_rule():
    for p in all_strings(2, phases=(0, 1, 2, 3)):
        u = p.to_dense()
        assert p.is_hermitian() == np.allclose(u, u.conj().T)


def test_adjoint_matches_dense():
    for p in all_strings(2, phases=(0, 1, 2, 3)):
        np.testing.assert_array_equal(p.adjoint().to_dense(), p.to_dense().conj().T)


def test_text_round_trip():
    p = PauliString.from_text("+i X1 X2 Z3")
    assert p.to_text() == "+i X1 X2 Z3"
    assert PauliString.from_text(p.to_text(), 3) == p
    assert PauliString.identity(4).to_text() == "+1"
    q = PauliString.from_ops(3, {2: "Y"}, phase_exp=2)
    assert PauliString.from_text(q.to_text(), 3) == q


def test_text_round_trip_random(rng):
    for _ in range(200):
        p = PauliString(4, int(rng.integers(16)), int(rng.integers(16)),
                        int(rng.integers(4)))
        assert PauliString.from_text(p.to_text(), 4) == p


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        X.multiply(PauliString.identity(2))
    with pytest.raises(DimensionMismatchError):
        X.commutes(PauliString.identity(2))


def test_dense_cap():
    big = PauliString.identity(15)
    with pytest.raises(DenseSizeError):
        big.to_dense()
    # explicit cap override
    assert PauliString.identity(4).to_dense(cap=4).shape == (16, 16)
    with pytest.raises(DenseSizeError):
        PauliString.identity(5).to_dense(cap=4)


def test_sites_support():
    p = PauliString.from_ops(5, {2: "X", 4: "Z"})
    assert p.sites() == (2, 4)
