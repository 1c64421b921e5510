import numpy as np
import pytest


def comm_norm(a, b):
    """Frobenius norm of the commutator."""
    return np.linalg.norm(a @ b - b @ a)


def circular_multiset_error(a, b):
    """Worst matched distance between two phase multisets on the circle.

    Both inputs are sorted ascending; circular order allows the lists to be
    rotated against each other when entries sit at the +/- pi seam.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    assert a.size == b.size
    best = np.inf
    for shift in range(a.size):
        d = np.abs(np.angle(np.exp(1j * (a - np.roll(b, shift)))))
        best = min(best, float(np.max(d)))
        if best < 1e-12:
            break
    return best


def car_residual(pairs, dim):
    """Largest violation of the canonical anticommutation relations."""
    eye = np.eye(dim)
    worst = 0.0
    for k, (pk, mk) in enumerate(pairs):
        for kp, (pkp, mkp) in enumerate(pairs):
            worst = max(worst, np.max(np.abs(pk @ pkp + pkp @ pk)))
            worst = max(worst, np.max(np.abs(mk @ mkp + mkp @ mk)))
            target = eye if k == kp else 0.0
            worst = max(worst, np.max(np.abs(pk @ mkp + mkp @ pk - target)))
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
