"""Circuit generation for the four interleaved benchmarking protocol pairs.

Each protocol pair twirls with a different group (Haar-random SU(4),
two-qubit Cliffords, local Cliffords, Paulis) and closes the sequence so
that a noiseless run returns the initial state (survival protocols) or the
tracked Pauli sign (Pauli protocol).  Interleaved variants insert the gate
under test after every twirl layer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import groups, streams
from .groups import Clifford

__all__ = [
    "TwirlGroup",
    "UnsupportedCombinationError",
    "ProtocolSpec",
    "Op",
    "CircuitInstance",
    "default_depths",
    "build_circuit",
    "build_xrb_circuit",
    "schedule",
    "circuit_to_json",
    "circuit_from_json",
    "PAULI_STATE_COUNT",
]

PAULI_STATE_COUNT = 15


class TwirlGroup(str, Enum):
    HAAR = "haar"
    CLIFFORD = "clifford"
    LOCAL_CLIFFORD = "local_clifford"
    PAULI = "pauli"


class UnsupportedCombinationError(ValueError):
    """Interleaved gate incompatible with the chosen twirl group."""


def default_depths(group: TwirlGroup, interleaved: bool) -> tuple[int, ...]:
    if group in (TwirlGroup.HAAR, TwirlGroup.CLIFFORD):
        return (4, 6, 8, 12, 14)
    if interleaved:
        return (4, 8, 12, 20, 30)
    return (4, 8, 12, 16, 20)


@dataclass(frozen=True)
class ProtocolSpec:
    """One arm (reference or interleaved) of a protocol pair."""

    group: TwirlGroup
    interleaved: object = None  # None (reference), "cnot", or a 4x4 unitary
    depths: tuple[int, ...] = ()
    shots: int = 1500
    seed: int = 0

    def __post_init__(self):
        group = TwirlGroup(self.group)
        object.__setattr__(self, "group", group)
        depths = tuple(self.depths) or default_depths(group, self.interleaved is not None)
        if any(m < 1 for m in depths) or any(
            b <= a for a, b in zip(depths, depths[1:])
        ):
            raise ValueError(f"depths must be strictly increasing and >= 1: {depths}")
        object.__setattr__(self, "depths", depths)
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if group is TwirlGroup.PAULI and self.shots % PAULI_STATE_COUNT:
            raise ValueError(
                f"Pauli protocol shots must divide evenly over the "
                f"{PAULI_STATE_COUNT} input states, got {self.shots}"
            )
        _resolve_interleaved(self)  # validate the combination early


@dataclass(frozen=True, eq=False)
class Op:
    """One physical operation slot.

    kind: "local" (pair of C1 indices), "pauli" (pair of Pauli labels),
    "clifford2" (C2 index), "cnot" (orientation), "unitary" (4x4 matrix).
    role: "twirl", "interleaved", "prep", or "closure"; only "interleaved"
    changes which error the noise model attaches.
    """

    kind: str
    role: str
    data: object


@dataclass(eq=False)
class CircuitInstance:
    depth: int
    index: int
    ops: tuple[Op, ...]
    measurement: tuple  # ("survival",) | ("pauli", pauli_idx, sign) | ("tomography",)
    ideal_outcome: float
    input_label: str = "00"


def _resolve_interleaved(spec: ProtocolSpec):
    """Return (op, unitary, clifford_element) for the interleaved gate."""
    if spec.interleaved is None:
        return None
    if isinstance(spec.interleaved, str):
        if spec.interleaved != "cnot":
            raise ValueError(f"unknown interleaved gate name {spec.interleaved!r}")
        return (
            Op("cnot", "interleaved", "ab"),
            groups.CX_AB,
            Clifford.from_unitary(groups.CX_AB),
        )
    u = np.asarray(spec.interleaved, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"interleaved gate must be 4x4, got {u.shape}")
    if spec.group is TwirlGroup.HAAR:
        return Op("unitary", "interleaved", u), u, None
    try:
        el = Clifford.from_unitary(u)
    except ValueError:
        raise UnsupportedCombinationError(
            f"{spec.group.value} twirl requires a Clifford interleaved gate; "
            "only the Haar twirl closes over arbitrary unitaries"
        ) from None
    return Op("unitary", "interleaved", u), u, el


def _circuit_stream(spec: ProtocolSpec, depth: int, index: int) -> np.random.Generator:
    return streams.stream(spec.seed, spec.group.value, depth, index)


def _build_haar(spec, m, rng, index):
    inter = _resolve_interleaved(spec)
    ops, seq = [], []
    for _ in range(m):
        u = groups.sample_haar_su4(rng)
        ops.append(Op("unitary", "twirl", u))
        seq.append(u)
        if inter is not None:
            ops.append(inter[0])
            seq.append(inter[1])
    ops.append(Op("unitary", "closure", groups.invert_sequence(seq)))
    return CircuitInstance(m, index, tuple(ops), ("survival",), 1.0)


def _build_clifford(spec, m, rng, index):
    inter = _resolve_interleaved(spec)
    ops = []
    total = Clifford.identity(2)
    for _ in range(m):
        idx = groups.sample_clifford2(rng)
        ops.append(Op("clifford2", "twirl", idx))
        total = groups.clifford2_element(idx).compose(total)
        if inter is not None:
            ops.append(inter[0])
            total = inter[2].compose(total)
    ops.append(Op("clifford2", "closure", groups.clifford2_index(total.inverse())))
    return CircuitInstance(m, index, tuple(ops), ("survival",), 1.0)


def _build_local_clifford(spec, m, rng, index):
    inter = _resolve_interleaved(spec)
    ops = []
    if inter is None:
        c1 = groups.clifford1_elements()
        tot_a = tot_b = Clifford.identity(1)
        for _ in range(m):
            i, j = groups.sample_local_clifford(rng)
            ops.append(Op("local", "twirl", (i, j)))
            tot_a = c1[i].compose(tot_a)
            tot_b = c1[j].compose(tot_b)
        imap = groups._clifford1_index_map()
        closure = (imap[tot_a.inverse().key()], imap[tot_b.inverse().key()])
        ops.append(Op("local", "closure", closure))
    else:
        c1 = groups.clifford1_elements()
        total = Clifford.identity(2)
        for _ in range(m):
            i, j = groups.sample_local_clifford(rng)
            ops.append(Op("local", "twirl", (i, j)))
            total = groups._tensor_clifford(c1[i], c1[j]).compose(total)
            ops.append(inter[0])
            total = inter[2].compose(total)
        ops.append(Op("clifford2", "closure", groups.clifford2_index(total.inverse())))
    return CircuitInstance(m, index, tuple(ops), ("survival",), 1.0)


@lru_cache(maxsize=None)
def _pauli_layer_element(i: int, j: int) -> Clifford:
    return Clifford.from_unitary(
        np.kron(groups.pauli_unitary_1q(i), groups.pauli_unitary_1q(j))
    )


def _prep_clifford1_index(component: int) -> int:
    """Index of a fixed C1 element mapping +Z to the +1 axis ``component``."""
    if component in (0, 3):
        target = 3
    else:
        target = component
    for i, el in enumerate(groups.clifford1_elements()):
        if el.conjugate_pauli(3) == (1, target):
            return i
    raise RuntimeError("no preparation Clifford found")  # pragma: no cover


def _build_pauli(spec, m, rng, index, input_pauli):
    if input_pauli is None or not 1 <= input_pauli <= 15:
        raise ValueError("Pauli protocol needs an input Pauli index in 1..15")
    inter = _resolve_interleaved(spec)
    ca, cb = input_pauli // 4, input_pauli % 4
    ops = [Op("local", "prep", (_prep_clifford1_index(ca), _prep_clifford1_index(cb)))]
    total = Clifford.identity(2)
    for _ in range(m):
        i, j = groups.sample_pauli_layer(rng)
        ops.append(Op("pauli", "twirl", (i, j)))
        # Pauli layers conjugate Paulis with signs only; track them exactly.
        total = _pauli_layer_element(i, j).compose(total)
        if inter is not None:
            ops.append(inter[0])
            total = inter[2].compose(total)
    sign, meas_idx = total.conjugate_pauli(input_pauli)
    labels = ("I", "X", "Y", "Z")
    label = labels[ca] + labels[cb]
    return CircuitInstance(
        m,
        index,
        tuple(ops),
        ("pauli", meas_idx, sign),
        1.0,
        input_label=label,
    )


def build_circuit(
    spec: ProtocolSpec, m: int, index: int, input_pauli: int | None = None
) -> CircuitInstance:
    """Deterministically build circuit ``index`` at depth ``m``.

    The randomness stream is keyed by (seed, group, depth, index), so any
    circuit can be rebuilt independently of the others.
    """
    rng = _circuit_stream(spec, m, index)
    if spec.group is TwirlGroup.HAAR:
        return _build_haar(spec, m, rng, index)
    if spec.group is TwirlGroup.CLIFFORD:
        return _build_clifford(spec, m, rng, index)
    if spec.group is TwirlGroup.LOCAL_CLIFFORD:
        return _build_local_clifford(spec, m, rng, index)
    return _build_pauli(spec, m, rng, index, input_pauli)


def build_xrb_circuit(spec: ProtocolSpec, m: int, index: int) -> CircuitInstance:
    """Purity-benchmarking circuit: random Cliffords, tomographic readout."""
    if spec.group is not TwirlGroup.CLIFFORD:
        raise UnsupportedCombinationError(
            "purity benchmarking is defined for the two-qubit Clifford twirl"
        )
    rng = streams.stream(spec.seed, "xrb", m, index)
    ops = tuple(
        Op("clifford2", "twirl", groups.sample_clifford2(rng)) for _ in range(m)
    )
    return CircuitInstance(m, index, ops, ("tomography",), 1.0)


def schedule(spec: ProtocolSpec) -> list[tuple[int, int | None, int]]:
    """(depth, input Pauli or None, circuit count) with one shot per circuit.

    Shots divide evenly over depths (and, for the Pauli protocol, first over
    the 15 input states); remainders go to the smallest depths.
    """
    depths = sorted(spec.depths)

    def split(total: int) -> list[int]:
        base, rem = divmod(total, len(depths))
        return [base + (1 if k < rem else 0) for k in range(len(depths))]

    if spec.group is not TwirlGroup.PAULI:
        return [(m, None, c) for m, c in zip(depths, split(spec.shots)) if c]
    per_state = spec.shots // PAULI_STATE_COUNT
    out = []
    for p in range(1, PAULI_STATE_COUNT + 1):
        out.extend((m, p, c) for m, c in zip(depths, split(per_state)) if c)
    return out


# ---------------------------------------------------------------------------
# JSON export


def _op_to_doc(op: Op) -> dict:
    if op.kind == "unitary":
        u = np.asarray(op.data)
        data = [[[float(z.real), float(z.imag)] for z in row] for row in u]
    elif op.kind in ("local", "pauli"):
        data = list(op.data)
    else:
        data = op.data
    return {"kind": op.kind, "role": op.role, "data": data}


def _op_from_doc(doc: dict) -> Op:
    data = doc["data"]
    if doc["kind"] == "unitary":
        data = np.array([[complex(re, im) for re, im in row] for row in data])
    elif doc["kind"] in ("local", "pauli"):
        data = tuple(data)
    return Op(doc["kind"], doc["role"], data)


def circuit_to_json(circ: CircuitInstance) -> str:
    return json.dumps(
        {
            "depth": circ.depth,
            "index": circ.index,
            "input_label": circ.input_label,
            "measurement": list(circ.measurement),
            "ideal_outcome": circ.ideal_outcome,
            "ops": [_op_to_doc(op) for op in circ.ops],
        }
    )


def circuit_from_json(text: str) -> CircuitInstance:
    doc = json.loads(text)
    return CircuitInstance(
        depth=int(doc["depth"]),
        index=int(doc["index"]),
        ops=tuple(_op_from_doc(d) for d in doc["ops"]),
        measurement=tuple(doc["measurement"]),
        ideal_outcome=float(doc["ideal_outcome"]),
        input_label=doc["input_label"],
    )
