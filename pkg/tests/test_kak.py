"""KAK decomposition, Weyl-cell canonicalization, and 3-CNOT synthesis."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twirlbench import groups, kak, streams


def _phase_dist(u, v):
    ph = np.vdot(u.reshape(-1), v.reshape(-1))
    if abs(ph) < 1e-12:
        return 2.0
    ph /= abs(ph)
    return float(np.max(np.abs(ph * u - v)))


def _in_weyl_cell(coeffs, tol=1e-9):
    a, b, c = coeffs
    return (
        np.pi / 4 + tol >= a >= b >= abs(c) - tol
        and (c >= -tol or a < np.pi / 4 - tol)
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decompose_reconstruct_and_cell(seed):
    u = groups.sample_haar_su4(np.random.default_rng(seed))
    dec = kak.kak_decompose(u)
    assert _phase_dist(dec.reconstruct(), u) < 1e-9
    assert _in_weyl_cell(dec.coeffs)
    for m in (dec.a1, dec.a2, dec.b1, dec.b2):
        assert np.allclose(m @ m.conj().T, np.eye(2), atol=1e-9)


@pytest.mark.parametrize(
    "u, coeffs",
    [
        (np.eye(4), (0.0, 0.0, 0.0)),
        (groups.CX_AB, (np.pi / 4, 0.0, 0.0)),
        (groups.CX_BA, (np.pi / 4, 0.0, 0.0)),
        (np.diag([1, 1, 1, -1]), (np.pi / 4, 0.0, 0.0)),  # CZ
        (np.eye(4)[[0, 2, 1, 3]], (np.pi / 4, np.pi / 4, np.pi / 4)),  # SWAP
    ],
)
def test_known_canonical_coefficients(u, coeffs):
    dec = kak.kak_decompose(np.asarray(u, dtype=complex))
    assert np.allclose(dec.coeffs, coeffs, atol=1e-9)


def test_locally_equivalent_gates_share_coefficients():
    rng = streams.stream(0, "test-kak")
    u = groups.sample_haar_su4(rng)
    base = kak.kak_decompose(u).coeffs
    for _ in range(5):
        l1 = groups.sample_haar_unitary(rng, 2)
        l2 = groups.sample_haar_unitary(rng, 2)
        r1 = groups.sample_haar_unitary(rng, 2)
        r2 = groups.sample_haar_unitary(rng, 2)
        v = np.kron(l1, l2) @ u @ np.kron(r1, r2)
        assert np.allclose(kak.kak_decompose(v).coeffs, base, atol=1e-8)


def test_canonical_unitary_round_trip():
    coeffs = (0.61, 0.32, 0.11)
    dec = kak.kak_decompose(kak.canonical_unitary(*coeffs))
    assert np.allclose(dec.coeffs, coeffs, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cnot_synthesis_reconstructs(seed):
    u = groups.sample_haar_su4(np.random.default_rng(seed))
    syn = kak.synthesize_cnot_circuit(u)
    assert syn.orientations == ("ab", "ba", "ab")
    assert len(syn.locals) == 4
    for la, lb in syn.locals:
        assert np.allclose(la @ la.conj().T, np.eye(2), atol=1e-9)
        assert np.allclose(lb @ lb.conj().T, np.eye(2), atol=1e-9)
    assert _phase_dist(syn.reconstruct(), u) < 1e-7


def test_cnot_synthesis_handles_boundary_gates():
    for u in (np.eye(4), groups.CX_AB, groups.CX_BA, np.eye(4)[[0, 2, 1, 3]]):
        syn = kak.synthesize_cnot_circuit(np.asarray(u, dtype=complex))
        assert _phase_dist(syn.reconstruct(), np.asarray(u, dtype=complex)) < 1e-7


def test_fractional_power_identities():
    from twirlbench.noise import fractional_power

    rng = streams.stream(1, "test-kak")
    u = groups.sample_haar_su4(rng)
    assert np.allclose(fractional_power(u, 1.0), u, atol=1e-10)
    half = fractional_power(u, 0.5)
    assert np.allclose(half @ half, u, atol=1e-10)
