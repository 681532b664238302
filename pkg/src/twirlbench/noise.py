"""Error models and noisy-gate construction.

A model describes how errors attach to physical operations.  The convention
everywhere is noisy = error AFTER ideal.  Two placements exist:

* ``compiled`` — gates are realized physically: single-qubit gates as
  Z-X90-Z-X90-Z pulse trains where only the X90 pulses carry error, and
  two-qubit gates as CNOT (or, for arbitrary SU(4), three two-qubit Pauli
  rotations) where each entangling primitive carries one error.
* ``monolithic`` — each logical gate carries a single error channel,
  regardless of how it would be compiled.

:class:`GateNoiseFactory` turns group elements into noisy transfer matrices
and caches them per discrete gate identity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from . import channels, groups, kak

__all__ = [
    "BranchCutWarning",
    "FixedCoherent",
    "Overrotation",
    "Adversarial",
    "Custom",
    "IDEAL",
    "pauli_string_unitary",
    "coherent_error_unitary",
    "fractional_power",
    "NoisyGate",
    "GateNoiseFactory",
]


class BranchCutWarning(RuntimeWarning):
    """Fractional power taken through an eigenvalue at -1."""


def pauli_string_unitary(label: str) -> np.ndarray:
    """Pauli matrix for a label like ``"Z"`` or ``"ZZ"``."""
    d = 2 ** len(label)
    labels = channels.pauli_labels(d)
    if label not in labels:
        raise ValueError(f"unknown Pauli label {label!r}")
    return channels.pauli_matrices(d)[labels.index(label)]


def coherent_error_unitary(label: str, angle: float) -> np.ndarray:
    """exp(i * angle * P) for the Pauli string ``label``."""
    p = pauli_string_unitary(label)
    d = p.shape[0]
    return np.cos(angle) * np.eye(d) + 1j * np.sin(angle) * p


def fractional_power(u: np.ndarray, delta: float) -> np.ndarray:
    """U^delta through the principal branch, eigenphases in (-pi, pi].

    Warns if an eigenvalue sits on the branch cut at -1, where the principal
    choice is a convention rather than a limit.
    """
    u = np.asarray(u, dtype=complex)
    # Schur of a normal matrix gives a unitary eigenbasis, stable even for
    # degenerate spectra (eig need not)
    t, q = scipy.linalg.schur(u, output="complex")
    vals = np.diag(t)
    phases = np.angle(vals)
    if np.any(np.abs(np.abs(phases) - np.pi) < 1e-12):
        warnings.warn(
            "fractional power through eigenvalue -1; using principal branch",
            BranchCutWarning,
            stacklevel=2,
        )
    return (q * np.exp(1j * phases * delta)) @ q.conj().T


@dataclass(frozen=True)
class NoisyGate:
    """Ideal unitary paired with the error channel applied after it."""

    ideal: np.ndarray
    error_ptm: np.ndarray

    def ptm(self) -> np.ndarray:
        return channels.compose(self.error_ptm, channels.ptm_from_unitary(self.ideal))


@dataclass(frozen=True)
class FixedCoherent:
    """Gate-independent coherent rotations, optionally with depolarizing.

    Angles follow the rotation-gate convention: an angle theta produces the
    unitary exp(i*(theta/2)*G), i.e. a G-rotation by theta, which is how a
    miscalibrated rotation of that size is realized on hardware.  Every
    two-qubit element gets a theta2 rotation about generator2 (composed with
    a depolarizing channel of parameter dep2 when dep2 < 1); every X90 pulse
    gets a theta1 rotation about generator1 composed with dep1.
    """

    theta2: float = 0.0
    theta1: float = 0.0
    generator2: str = "ZZ"
    generator1: str = "Z"
    dep2: float = 1.0
    dep1: float = 1.0
    placement: str = "monolithic"

    def pulse_error_ptm(self) -> np.ndarray | None:
        if self.theta1 == 0.0 and self.dep1 == 1.0:
            return None
        e = channels.ptm_from_unitary(
            coherent_error_unitary(self.generator1, self.theta1 / 2.0)
        )
        if self.dep1 != 1.0:
            e = channels.compose(channels.depolarizing_ptm(self.dep1, 2), e)
        return e

    def twoq_error_ptm(self, ideal: np.ndarray, role: str) -> np.ndarray | None:
        if self.theta2 == 0.0 and self.dep2 == 1.0:
            return None
        e = channels.ptm_from_unitary(
            coherent_error_unitary(self.generator2, self.theta2 / 2.0)
        )
        if self.dep2 != 1.0:
            e = channels.compose(channels.depolarizing_ptm(self.dep2, 4), e)
        return e


@dataclass(frozen=True)
class Overrotation:
    """Each gate overshoots to U^(1+delta); the error is U^delta."""

    delta2: float = 0.0
    delta1: float = 0.0
    placement: str = "compiled"
    gate_dependent = True

    def pulse_error_ptm(self) -> np.ndarray | None:
        if self.delta1 == 0.0:
            return None
        return channels.ptm_from_unitary(fractional_power(groups.X90, self.delta1))

    def twoq_error_ptm(self, ideal: np.ndarray, role: str) -> np.ndarray | None:
        if self.delta2 == 0.0:
            return None
        return channels.ptm_from_unitary(fractional_power(ideal, self.delta2))


@dataclass(frozen=True)
class Adversarial:
    """Coherent errors arranged to interfere across the interleaved gate.

    Twirl two-qubit gates get exp(+/- i*theta*YY); the interleaved gate gets
    exp(i*theta*XZ).  Single-qubit operations are error-free.  Always
    monolithic: the sign structure is defined per logical gate.
    """

    theta: float = np.deg2rad(10.0)
    twirl_sign: int = 1
    placement: str = "monolithic"

    def __post_init__(self):
        if self.twirl_sign not in (1, -1):
            raise ValueError("twirl_sign must be +1 or -1")

    def pulse_error_ptm(self) -> np.ndarray | None:
        return None

    def twoq_error_ptm(self, ideal: np.ndarray, role: str) -> np.ndarray | None:
        if role == "interleaved":
            u = coherent_error_unitary("XZ", self.theta)
        else:
            u = coherent_error_unitary("YY", self.twirl_sign * self.theta)
        return channels.ptm_from_unitary(u)


@dataclass(frozen=True, eq=False)
class Custom:
    """Explicit error channels per gate class (always monolithic)."""

    twoq: np.ndarray | None = None
    pulse: np.ndarray | None = None
    placement: str = "monolithic"

    def pulse_error_ptm(self) -> np.ndarray | None:
        return None if self.pulse is None else np.array(self.pulse)

    def twoq_error_ptm(self, ideal: np.ndarray, role: str) -> np.ndarray | None:
        return None if self.twoq is None else np.array(self.twoq)


IDEAL = FixedCoherent()

_EYE4 = np.eye(4)
_EYE16 = np.eye(16)


def _compose_right_to_left(mats) -> np.ndarray:
    """Product of PTMs listed in application order (first applied first)."""
    return reduce(lambda acc, m: m @ acc, mats)


class GateNoiseFactory:
    """Builds and caches noisy transfer matrices for the gates a protocol uses.

    All returned matrices are 16x16 two-qubit PTMs; single-qubit layers are
    lifted with the tensor-lexicographic Pauli ordering (qubit a major).
    """

    def __init__(self, model):
        self.model = model
        self._pulse = model.pulse_error_ptm()
        self._oneq_cache: dict = {}
        self._pair_cache: dict = {}
        self._c2_cache: dict = {}
        self._cnot_cache: dict = {}

    # -- single-qubit layers ------------------------------------------------

    def _noisy_oneq_ptm(self, u: np.ndarray, key=None) -> np.ndarray:
        """4x4 PTM of a single-qubit gate run as Z-X90-Z-X90-Z pulses."""
        if key is not None and key in self._oneq_cache:
            return self._oneq_cache[key]
        comp = groups.compile_single_qubit(u)
        x90 = channels.ptm_from_unitary(groups.X90)
        if self._pulse is not None:
            x90 = channels.compose(self._pulse, x90)
        steps = [
            channels.ptm_from_unitary(groups.rz(comp.phi)),
            x90,
            channels.ptm_from_unitary(groups.rz(comp.omega)),
            x90,
            channels.ptm_from_unitary(groups.rz(comp.theta)),
        ]
        out = _compose_right_to_left(steps)
        if key is not None:
            self._oneq_cache[key] = out
        return out

    def local_layer_ptm(self, ua: np.ndarray, ub: np.ndarray, key=None) -> np.ndarray:
        """Noisy PTM of a simultaneous pair of single-qubit gates."""
        if key is not None and key in self._pair_cache:
            return self._pair_cache[key]
        ka, kb = (None, None) if key is None else ((key, "a"), (key, "b"))
        out = np.kron(self._noisy_oneq_ptm(ua, ka), self._noisy_oneq_ptm(ub, kb))
        if key is not None:
            self._pair_cache[key] = out
        return out

    def clifford_pair_ptm(self, i: int, j: int) -> np.ndarray:
        u1 = groups.clifford1_unitaries()
        return self.local_layer_ptm(u1[i], u1[j], key=("c1", i, j))

    def pauli_pair_ptm(self, i: int, j: int) -> np.ndarray:
        return self.local_layer_ptm(
            groups.pauli_unitary_1q(i), groups.pauli_unitary_1q(j), key=("p", i, j)
        )

    # -- two-qubit primitives ----------------------------------------------

    def _primitive_ptm(self, ideal: np.ndarray, role: str) -> np.ndarray:
        out = channels.ptm_from_unitary(ideal)
        err = self.model.twoq_error_ptm(ideal, role)
        if err is not None:
            out = channels.compose(err, out)
        return out

    def cnot_ptm(self, orientation: str = "ab", role: str = "interleaved") -> np.ndarray:
        key = (orientation, role)
        if key not in self._cnot_cache:
            ideal = groups.CX_AB if orientation == "ab" else groups.CX_BA
            self._cnot_cache[key] = self._primitive_ptm(ideal, role)
        return self._cnot_cache[key]

    # -- whole twirl gates --------------------------------------------------

    def clifford2_ptm(self, index: int) -> np.ndarray:
        """Noisy PTM of a two-qubit Clifford twirl gate."""
        if index in self._c2_cache:
            return self._c2_cache[index]
        if self.model.placement == "monolithic":
            if getattr(self.model, "gate_dependent", False):
                out = self._primitive_ptm(groups.clifford2_unitary(index), "twirl")
            else:
                # gate-independent error: the ideal PTM is the exact signed
                # permutation, no concrete unitary needed
                out = groups.clifford2_element(index).ptm()
                err = self.model.twoq_error_ptm(None, "twirl")
                if err is not None:
                    out = channels.compose(err, out)
        else:
            pre, skel, post = groups.synthesize_clifford2(index)
            mats = [self.clifford_pair_ptm(*pre)]
            for orient in skel:
                mats.append(self.cnot_ptm(orient, role="twirl"))
            if post is not None:
                mats.append(self.clifford_pair_ptm(*post))
            out = _compose_right_to_left(mats)
        self._c2_cache[index] = out
        return out

    def haar_ptm(self, u: np.ndarray) -> np.ndarray:
        """Noisy PTM of an arbitrary two-qubit unitary twirl gate.

        Compiled placement realizes the gate as its standard 3-CNOT circuit
        (four local layers with CNOTs between them), so the entangling
        primitives carry the same error as everywhere else in the experiment.
        """
        if self.model.placement == "monolithic":
            return self._primitive_ptm(u, "twirl")
        syn = kak.synthesize_cnot_circuit(u)
        mats = [self.local_layer_ptm(*syn.locals[0])]
        for layer, orient in zip(syn.locals[1:], syn.orientations):
            mats.append(self.cnot_ptm(orient, role="twirl"))
            mats.append(self.local_layer_ptm(*layer))
        return _compose_right_to_left(mats)

    def interleaved_cnot_ptm(self, orientation: str = "ab") -> np.ndarray:
        return self.cnot_ptm(orientation, role="interleaved")

    def interleaved_unitary_ptm(self, u: np.ndarray) -> np.ndarray:
        """Noisy PTM of an arbitrary interleaved gate (single primitive)."""
        return self._primitive_ptm(u, "interleaved")
