"""Self-consistent-gauge edge channels, polar splitting, and SCG fidelity."""

import numpy as np
import pytest

from twirlbench import channels, gauge, groups, noise
from twirlbench.gauge import (
    GaugeChoice,
    NoLeadingKrausError,
    channel_polar_decompose,
    estimate_edge_channels,
    gauge_from_edges,
    gauge_report,
    scg_average_fidelity,
)
from twirlbench.noise import Custom, FixedCoherent, IDEAL
from twirlbench.protocols import TwirlGroup


def test_noiseless_edges_are_identity():
    for group in (TwirlGroup.PAULI, TwirlGroup.LOCAL_CLIFFORD):
        edges = estimate_edge_channels(IDEAL, group)
        assert edges.exact
        assert np.allclose(edges.left, np.eye(16), atol=1e-10)
        assert np.allclose(edges.right, np.eye(16), atol=1e-10)
    edges = estimate_edge_channels(IDEAL, TwirlGroup.CLIFFORD, n=200, seed=0)
    assert not edges.exact
    assert np.allclose(edges.left, np.eye(16), atol=1e-9)
    assert np.allclose(edges.right, np.eye(16), atol=1e-9)


def test_gate_independent_error_gives_left_edge_equal_error():
    # noisy(G) = E . ideal(G) with E independent of G, so
    # Phi(X) = E . average and L = Phi^4(I) = E (for unital twirl-invariant X)
    p = 0.98
    err = channels.depolarizing_ptm(p, 4)
    model = Custom(twoq=err)
    edges = estimate_edge_channels(model, TwirlGroup.CLIFFORD, n=400, seed=3)
    # depolarizing commutes with everything: both edges equal dep(p)^4... no:
    # each layer multiplies by E once, so L = E^4
    expect = channels.depolarizing_ptm(p**4, 4)
    assert np.allclose(edges.left, expect, atol=5e-3)
    assert np.allclose(edges.right, expect, atol=5e-3)


def test_polar_decompose_recovers_unitary_factor():
    u = noise.coherent_error_unitary("ZZ", 0.12)
    dep = channels.depolarizing_ptm(0.97, 4)
    ptm = channels.ptm_from_unitary(u) @ dep
    fac = channel_polar_decompose(ptm)
    assert np.allclose(fac.unitary_part, channels.ptm_from_unitary(u), atol=1e-8)
    assert np.allclose(fac.decoherent_part, dep, atol=1e-8)
    # factors recompose to the original channel
    assert np.allclose(fac.unitary_part @ fac.decoherent_part, ptm, atol=1e-10)


def test_polar_decompose_rejects_too_noisy():
    with pytest.raises(NoLeadingKrausError):
        channel_polar_decompose(channels.depolarizing_ptm(0.01, 4))


def test_gauge_origins():
    edges = estimate_edge_channels(
        FixedCoherent(theta2=np.deg2rad(10.0)), TwirlGroup.CLIFFORD, n=300, seed=1
    )
    g_r = gauge_from_edges(edges, origin="U_R")
    g_li = gauge_from_edges(edges, origin="U_L_inverse")
    g_id = gauge_from_edges(edges, origin="identity")
    assert np.allclose(g_id.s, np.eye(16))
    for g in (g_r, g_li):
        # gauge matrices are unitary PTMs, hence orthogonal
        assert np.allclose(g.s @ g.s.T, np.eye(16), atol=1e-10)
    with pytest.raises(ValueError):
        gauge_from_edges(edges, origin="bogus")


def test_scg_fidelity_depolarizing_pulse_oracle():
    # per-pulse depolarizing noise on the Pauli-twirl layers (two X90 pulses
    # per single-qubit gate) is gauge-invariant: SCG infidelity equals the
    # plain per-layer process infidelity in any gauge
    p = 0.995
    model = Custom(pulse=channels.depolarizing_ptm(p, 2))
    # per-qubit layer channel is dep(p^2); two-qubit layer fidelity follows
    eps = 1.0 - (1 + 3 * p**2) ** 2 / 16.0
    for origin in ("identity", "U_R"):
        edges = estimate_edge_channels(model, TwirlGroup.PAULI)
        g = gauge_from_edges(edges, origin=origin)
        fid = scg_average_fidelity(model, TwirlGroup.PAULI, g)
        assert 1.0 - fid == pytest.approx(eps, abs=1e-10)
    # edge oracle: four layers of dep(p^2) per qubit
    q = p**8
    expect = np.kron(channels.depolarizing_ptm(q, 2), channels.depolarizing_ptm(q, 2))
    assert np.allclose(edges.left, expect, atol=1e-10)


def test_exact_clifford_edge_oracle_for_coherent_error():
    # noisy(G) = U . ideal(G) with fixed U = e^{i theta ZZ}.  Each edge layer
    # applies U then Clifford-twirls the accumulated channel, and a full
    # two-qubit Clifford twirl depolarizes at the channel's own fidelity, so
    # L = U_ptm . dep(q)^3 with q = (16 F(U) - 1)/15.  Polar splitting must
    # recover U exactly.
    theta = 0.05
    u = noise.coherent_error_unitary("ZZ", theta)
    u_ptm = channels.ptm_from_unitary(u)
    model = Custom(twoq=u_ptm)
    edges = estimate_edge_channels(model, TwirlGroup.CLIFFORD, exact=True)
    fid = channels.process_fidelity(u_ptm)
    q = (16 * fid - 1) / 15
    expect_l = u_ptm @ channels.depolarizing_ptm(q**3, 4)
    assert np.allclose(edges.left, expect_l, atol=1e-9)
    # with the error placed after the gate, the right edge is fully
    # depolarized: R = Psi^4(I) = dep(q)^4 with no coherent factor
    assert np.allclose(edges.right, channels.depolarizing_ptm(q**4, 4), atol=1e-9)
    fac = channel_polar_decompose(edges.left)
    assert np.allclose(fac.unitary_part, u_ptm, atol=1e-8)


def test_gauge_report_shape_and_determinism():
    model = FixedCoherent(theta2=np.deg2rad(10.0), dep2=0.999)
    rep = gauge_report(model, TwirlGroup.PAULI, seed=5)
    assert set(rep) == {"group", "gauge_origin", "scg_infidelity", "edge_choi_floor", "N", "M"}
    assert rep["group"] == "pauli"
    assert rep["N"] == 16 and rep["M"] == 16
    rep2 = gauge_report(model, TwirlGroup.PAULI, seed=5)
    assert rep == rep2
    mc = gauge_report(model, TwirlGroup.CLIFFORD, n=200, m=200, seed=5)
    assert mc["N"] == 200 and mc["M"] == 200
    assert 0.0 < mc["scg_infidelity"] < 0.05
