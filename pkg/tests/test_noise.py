"""Error models, fractional powers, and noisy-gate factories."""

import numpy as np
import pytest

from twirlbench import channels, groups, noise, streams
from twirlbench.noise import (
    Adversarial,
    BranchCutWarning,
    Custom,
    FixedCoherent,
    GateNoiseFactory,
    IDEAL,
    Overrotation,
    coherent_error_unitary,
    fractional_power,
    pauli_string_unitary,
)


def test_pauli_string_unitary():
    assert np.allclose(pauli_string_unitary("Z"), np.diag([1, -1]))
    assert np.allclose(pauli_string_unitary("ZZ"), np.diag([1, -1, -1, 1]))
    with pytest.raises(ValueError):
        pauli_string_unitary("Q")


def test_coherent_error_unitary_infidelity():
    # process infidelity of e^{i angle P} is sin^2(angle)
    for angle in (0.05, 0.1, 0.5):
        u = coherent_error_unitary("ZZ", angle)
        eps = channels.process_infidelity(channels.ptm_from_unitary(u))
        assert eps == pytest.approx(np.sin(angle) ** 2, abs=1e-12)


def test_fixed_coherent_rotation_convention():
    # theta2 is a rotation angle: the error unitary is exp(i (theta/2) ZZ),
    # so the per-gate error infidelity is sin^2(theta/2)
    theta = np.deg2rad(10.0)
    model = FixedCoherent(theta2=theta)
    err = model.twoq_error_ptm(groups.CX_AB, "twirl")
    assert channels.process_infidelity(err) == pytest.approx(
        np.sin(theta / 2) ** 2, abs=1e-12
    )
    assert abs(channels.unitarity(err) - 1.0) < 1e-10


def test_fixed_coherent_with_depolarizing():
    model = FixedCoherent(theta2=np.deg2rad(10.0), dep2=0.995)
    err = model.twoq_error_ptm(groups.CX_AB, "twirl")
    pure = channels.ptm_from_unitary(coherent_error_unitary("ZZ", np.deg2rad(5.0)))
    assert np.allclose(err, channels.depolarizing_ptm(0.995, 4) @ pure, atol=1e-12)


def test_overrotation_identities():
    assert Overrotation(delta2=0.0).twoq_error_ptm(groups.CX_AB, "twirl") is None
    with pytest.warns(BranchCutWarning):
        err = Overrotation(delta2=0.05).twoq_error_ptm(groups.CX_AB, "interleaved")
    # eps(CNOT^delta) = (3/8)(1 - cos(pi delta))
    assert channels.process_infidelity(err) == pytest.approx(
        3 / 8 * (1 - np.cos(np.pi * 0.05)), abs=1e-10
    )
    # overrotation error commutes with its ideal gate
    ideal = channels.ptm_from_unitary(groups.CX_AB)
    assert np.allclose(err @ ideal, ideal @ err, atol=1e-10)


def test_overrotation_pulse_is_quarter_delta_rotation():
    # X90^delta is an X rotation by delta * 90 degrees
    err = Overrotation(delta1=0.01).pulse_error_ptm()
    expect = channels.ptm_from_unitary(groups.rx(0.01 * np.pi / 2))
    assert np.allclose(err, expect, atol=1e-10)


def test_fractional_power_oracles():
    rng = streams.stream(0, "test-noise")
    u = groups.sample_haar_su4(rng)
    assert np.allclose(fractional_power(u, 0.0), np.eye(4), atol=1e-12)
    third = fractional_power(u, 1 / 3)
    assert np.allclose(third @ third @ third, u, atol=1e-9)
    # result stays unitary even for degenerate spectra
    with pytest.warns(BranchCutWarning):
        w = fractional_power(groups.CX_AB, 0.05)
    assert np.allclose(w @ w.conj().T, np.eye(4), atol=1e-12)


def test_adversarial_sign_structure():
    model = Adversarial()
    inter = model.twoq_error_ptm(groups.CX_AB, "interleaved")
    twirl = model.twoq_error_ptm(None, "twirl")
    theta = np.deg2rad(10.0)
    assert np.allclose(
        inter, channels.ptm_from_unitary(coherent_error_unitary("XZ", theta))
    )
    assert np.allclose(
        twirl, channels.ptm_from_unitary(coherent_error_unitary("YY", theta))
    )
    neg = Adversarial(twirl_sign=-1).twoq_error_ptm(None, "twirl")
    assert np.allclose(
        neg, channels.ptm_from_unitary(coherent_error_unitary("YY", -theta))
    )
    with pytest.raises(ValueError):
        Adversarial(twirl_sign=2)


def test_adversarial_conjugation_identity():
    # CX (YY) CX = -XZ: the twirl error commuted through the interleaved
    # gate matches the interleaved error generator up to sign
    yy = pauli_string_unitary("YY")
    xz = pauli_string_unitary("XZ")
    assert np.allclose(groups.CX_AB @ yy @ groups.CX_AB, -xz, atol=1e-12)


def test_named_models_produce_unitary_errors():
    theta = np.deg2rad(7.0)
    errs = [
        FixedCoherent(theta2=theta).twoq_error_ptm(groups.CX_AB, "twirl"),
        Adversarial(theta=theta).twoq_error_ptm(groups.CX_AB, "interleaved"),
    ]
    with pytest.warns(BranchCutWarning):
        errs.append(Overrotation(delta2=0.03).twoq_error_ptm(groups.CX_AB, "twirl"))
    for e in errs:
        assert abs(channels.unitarity(e) - 1.0) < 1e-10


# ---------------------------------------------------------------------------
# factory


def test_ideal_factory_reproduces_ideal_gates():
    factory = GateNoiseFactory(IDEAL)
    rng = streams.stream(1, "test-noise")
    i = int(rng.integers(11520))
    assert np.allclose(
        factory.clifford2_ptm(i), groups.clifford2_element(i).ptm(), atol=1e-9
    )
    u = groups.sample_haar_su4(rng)
    assert np.allclose(factory.haar_ptm(u), channels.ptm_from_unitary(u), atol=1e-9)
    assert np.allclose(
        factory.cnot_ptm("ab"), channels.ptm_from_unitary(groups.CX_AB), atol=1e-12
    )


def test_compiled_ideal_haar_matches_monolithic():
    # with no error, compiling through the 3-CNOT circuit is exact
    factory = GateNoiseFactory(FixedCoherent(placement="compiled"))
    u = groups.sample_haar_su4(streams.stream(2, "test-noise"))
    assert np.allclose(factory.haar_ptm(u), channels.ptm_from_unitary(u), atol=1e-7)


def test_monolithic_error_placement():
    theta = np.deg2rad(10.0)
    model = FixedCoherent(theta2=theta, placement="monolithic")
    factory = GateNoiseFactory(model)
    i = 137
    err = model.twoq_error_ptm(None, "twirl")
    expect = err @ groups.clifford2_element(i).ptm()
    assert np.allclose(factory.clifford2_ptm(i), expect, atol=1e-9)


def test_compiled_clifford_counts_cnot_errors():
    # a purely depolarizing per-CNOT error lets us count entangling gates
    model = Custom(twoq=channels.depolarizing_ptm(0.9, 4), placement="compiled")
    factory = GateNoiseFactory(model)
    for i in (0, 911, 4242):
        _, skel, _ = groups.synthesize_clifford2(i)
        fid = channels.process_fidelity(factory.clifford2_ptm(i))
        # each noisy CNOT multiplies the trace overlap by the same factor
        expect = channels.process_fidelity(
            channels.depolarizing_ptm(0.9**len(skel), 4)
            @ groups.clifford2_element(i).ptm()
        )
        assert fid == pytest.approx(expect, abs=1e-9)


def test_pulse_errors_attach_per_x90():
    theta1 = np.deg2rad(1.0)
    model = FixedCoherent(theta1=theta1)
    factory = GateNoiseFactory(model)
    # every 1q gate compiles to exactly two X90 pulses; with a Z-generated
    # pulse error the layer infidelity is gate-independent to first order
    err = model.pulse_error_ptm()
    assert channels.process_infidelity(err) == pytest.approx(
        np.sin(theta1 / 2) ** 2, abs=1e-12
    )
    noisy = factory.clifford_pair_ptm(0, 0)
    ideal = np.kron(*(channels.ptm_from_unitary(groups.clifford1_unitaries()[0]),) * 2)
    assert not np.allclose(noisy, ideal, atol=1e-8)


def test_custom_model_channels():
    dep = channels.depolarizing_ptm(0.97, 4)
    model = Custom(twoq=dep)
    assert np.allclose(model.twoq_error_ptm(None, "twirl"), dep)
    assert model.pulse_error_ptm() is None
