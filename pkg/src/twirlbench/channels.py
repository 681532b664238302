"""Quantum channel algebra for one- and two-qubit systems.

Channels are represented by their Pauli transfer matrix (PTM): the real
d^2 x d^2 matrix of the channel in the normalized Pauli basis {P / sqrt(d)},
with Paulis ordered lexicographically (I, X, Y, Z per qubit, tensor
lexicographic).  States are carried either as d x d density matrices or as
real length-d^2 Pauli coefficient vectors v_i = Tr(P_i rho) / sqrt(d), so
that probabilities are plain dot products with measurement vectors.

All functions are pure; arrays returned are freshly allocated.
"""

from __future__ import annotations

import json
from functools import lru_cache

import numpy as np

__all__ = [
    "DimensionError",
    "InvalidChannelError",
    "pauli_matrices",
    "pauli_labels",
    "ptm_from_unitary",
    "ptm_from_kraus",
    "ptm_to_choi",
    "choi_to_ptm",
    "choi_to_kraus",
    "kraus_to_choi",
    "compose",
    "identity_ptm",
    "depolarizing_ptm",
    "process_infidelity",
    "process_fidelity",
    "unitarity",
    "depolarizing_from_infidelity",
    "infidelity_from_depolarizing",
    "purity",
    "state_to_pauli_vec",
    "pauli_vec_to_state",
    "is_trace_preserving",
    "choi_eigenvalue_floor",
    "is_cptp",
    "ptm_to_json",
    "ptm_from_json",
    "choi_to_json",
    "choi_from_json",
]

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI_1Q = (_I, _X, _Y, _Z)
_LABELS_1Q = "IXYZ"


class DimensionError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class InvalidChannelError(ValueError):
    """Input does not represent a valid quantum channel."""


def _check_dim(d: int) -> None:
    if d not in (2, 4):
        raise DimensionError(f"only 1- and 2-qubit channels supported, got d={d}")


@lru_cache(maxsize=None)
def pauli_matrices(d: int) -> tuple[np.ndarray, ...]:
    """Unnormalized Pauli basis for Hilbert dimension ``d`` (2 or 4)."""
    _check_dim(d)
    if d == 2:
        return _PAULI_1Q
    return tuple(np.kron(a, b) for a in _PAULI_1Q for b in _PAULI_1Q)


@lru_cache(maxsize=None)
def pauli_labels(d: int) -> tuple[str, ...]:
    _check_dim(d)
    if d == 2:
        return tuple(_LABELS_1Q)
    return tuple(a + b for a in _LABELS_1Q for b in _LABELS_1Q)


@lru_cache(maxsize=None)
def _vec_basis(d: int) -> np.ndarray:
    """Rows are row-major vectorized normalized Paulis, shape (d^2, d^2)."""
    paulis = pauli_matrices(d)
    return np.array([p.reshape(-1) / np.sqrt(d) for p in paulis])


def _as_square(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def _hilbert_dim_from_ptm(ptm: np.ndarray) -> int:
    d2 = ptm.shape[0]
    d = int(round(np.sqrt(d2)))
    if d * d != d2:
        raise DimensionError(f"PTM side {d2} is not a perfect square")
    _check_dim(d)
    return d


def ptm_from_unitary(u: np.ndarray) -> np.ndarray:
    """PTM of the unitary channel rho -> U rho U^dag."""
    u = _as_square(u, "unitary")
    d = u.shape[0]
    _check_dim(d)
    t = _vec_basis(d)
    m = t.conj() @ np.kron(u, u.conj()) @ t.T
    return np.ascontiguousarray(m.real)


def ptm_from_kraus(ops) -> np.ndarray:
    ops = [np.asarray(k) for k in ops]
    d = ops[0].shape[0]
    _check_dim(d)
    t = _vec_basis(d)
    m = sum(t.conj() @ np.kron(k, k.conj()) @ t.T for k in ops)
    return np.ascontiguousarray(m.real)


def identity_ptm(d: int) -> np.ndarray:
    _check_dim(d)
    return np.eye(d * d)


def depolarizing_ptm(p: float, d: int) -> np.ndarray:
    """Depolarizing channel rho -> p rho + (1-p) I/d, as a PTM."""
    _check_dim(d)
    m = np.eye(d * d) * p
    m[0, 0] = 1.0
    return m


def compose(*ptms: np.ndarray) -> np.ndarray:
    """Composition of channels; ``compose(a, b)`` applies ``b`` first."""
    if not ptms:
        raise ValueError("compose requires at least one channel")
    dims = {m.shape for m in ptms}
    if len(dims) != 1:
        raise DimensionError(f"cannot compose PTMs with shapes {sorted(dims)}")
    out = ptms[0]
    for m in ptms[1:]:
        out = out @ m
    return np.array(out)


def process_fidelity(ptm: np.ndarray) -> float:
    ptm = _as_square(ptm, "ptm")
    d = _hilbert_dim_from_ptm(ptm)
    return float(np.trace(ptm)) / (d * d)


def process_infidelity(ptm: np.ndarray) -> float:
    """1 - Tr[PTM] / d^2.

    Defined for arbitrary trace-class inputs; estimated channels may give
    values outside [0, 1] and they are returned unclamped.
    """
    return 1.0 - process_fidelity(ptm)


def unitarity(ptm: np.ndarray) -> float:
    """Normalized Frobenius norm of the unital block: Tr[Eu^T Eu] / (d^2-1)."""
    ptm = _as_square(ptm, "ptm")
    d2 = ptm.shape[0]
    _hilbert_dim_from_ptm(ptm)
    eu = ptm[1:, 1:]
    return float(np.sum(eu * eu)) / (d2 - 1)


def depolarizing_from_infidelity(eps: float, d: int) -> float:
    """Decay parameter p = 1 - d^2/(d^2-1) * eps."""
    _check_dim(d)
    d2 = d * d
    return 1.0 - d2 / (d2 - 1) * eps


def infidelity_from_depolarizing(p: float, d: int) -> float:
    """Inverse of :func:`depolarizing_from_infidelity`."""
    _check_dim(d)
    d2 = d * d
    return (1.0 - p) * (d2 - 1) / d2


def ptm_to_choi(ptm: np.ndarray) -> np.ndarray:
    """Choi matrix (trace normalized to 1) of a channel given as a PTM."""
    ptm = _as_square(ptm, "ptm")
    d = _hilbert_dim_from_ptm(ptm)
    paulis = pauli_matrices(d)
    d2 = d * d
    choi = np.zeros((d2, d2), dtype=complex)
    for i in range(d2):
        for j in range(d2):
            if ptm[i, j] != 0.0:
                choi += ptm[i, j] * np.kron(paulis[i], paulis[j].T)
    return choi / d2


def choi_to_ptm(choi: np.ndarray, atol: float = 1e-8) -> np.ndarray:
    choi = _as_square(choi, "choi")
    d2 = choi.shape[0]
    d = int(round(np.sqrt(d2)))
    _check_dim(d)
    if np.max(np.abs(choi - choi.conj().T)) > atol:
        raise InvalidChannelError("Choi matrix is not Hermitian within tolerance")
    paulis = pauli_matrices(d)
    ptm = np.empty((d2, d2))
    for i in range(d2):
        for j in range(d2):
            ptm[i, j] = np.trace(choi @ np.kron(paulis[i], paulis[j].T)).real
    return ptm


def kraus_to_choi(ops) -> np.ndarray:
    ops = [np.asarray(k) for k in ops]
    d = ops[0].shape[0]
    _check_dim(d)
    vecs = np.array([k.reshape(-1) for k in ops])
    return vecs.T @ vecs.conj() / d  # sum_a |k_a>><<k_a| / d


def choi_to_kraus(choi: np.ndarray, atol: float = 1e-8, cp_floor: float = -1e-10):
    """Eigendecompose a Choi matrix into weighted Kraus operators.

    Returns ``(kraus_ops, weights)`` sorted by decreasing weight; the leading
    operator is first.  Weights are the Choi eigenvalues.
    """
    choi = _as_square(choi, "choi")
    d2 = choi.shape[0]
    d = int(round(np.sqrt(d2)))
    _check_dim(d)
    if np.max(np.abs(choi - choi.conj().T)) > atol:
        raise InvalidChannelError("Choi matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(choi)
    if vals[0] < cp_floor:
        raise InvalidChannelError(
            f"Choi matrix has eigenvalue {vals[0]:.3e} below the CP tolerance"
        )
    order = np.argsort(vals)[::-1]
    ops, weights = [], []
    for idx in order:
        lam = max(vals[idx], 0.0)
        if lam <= 1e-14:
            continue
        k = np.sqrt(lam * d) * vecs[:, idx].reshape(d, d)
        ops.append(k)
        weights.append(lam)
    return ops, np.array(weights)


def state_to_pauli_vec(rho: np.ndarray) -> np.ndarray:
    rho = _as_square(rho, "rho")
    d = rho.shape[0]
    _check_dim(d)
    paulis = pauli_matrices(d)
    return np.array([np.trace(p @ rho).real for p in paulis]) / np.sqrt(d)


def pauli_vec_to_state(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec)
    d = int(round(np.sqrt(vec.shape[0])))
    _check_dim(d)
    paulis = pauli_matrices(d)
    rho = sum(v * p for v, p in zip(vec, paulis)) / np.sqrt(d)
    return np.asarray(rho, dtype=complex)


def purity(rho: np.ndarray) -> float:
    rho = _as_square(rho, "rho")
    return float(np.trace(rho @ rho).real)


def is_trace_preserving(ptm: np.ndarray, atol: float = 1e-12) -> bool:
    ptm = _as_square(ptm, "ptm")
    first = np.zeros(ptm.shape[0])
    first[0] = 1.0
    return bool(np.allclose(ptm[0], first, atol=atol))


def choi_eigenvalue_floor(ptm: np.ndarray) -> float:
    """Smallest Choi eigenvalue; >= 0 up to numerical noise for CP maps."""
    return float(np.linalg.eigvalsh(ptm_to_choi(ptm))[0])


def is_cptp(ptm: np.ndarray, atol: float = 1e-8) -> bool:
    return is_trace_preserving(ptm, atol=atol) and choi_eigenvalue_floor(ptm) > -atol


def ptm_to_json(ptm: np.ndarray) -> str:
    ptm = _as_square(ptm, "ptm")
    d = _hilbert_dim_from_ptm(ptm)
    return json.dumps(
        {
            "dim": d,
            "basis": "pauli-normalized",
            "entries": [float(x) for x in ptm.reshape(-1)],
        }
    )


def ptm_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    d = int(doc["dim"])
    _check_dim(d)
    if doc.get("basis") != "pauli-normalized":
        raise InvalidChannelError(f"unsupported basis {doc.get('basis')!r}")
    entries = np.array(doc["entries"], dtype=float)
    return entries.reshape(d * d, d * d)


def choi_to_json(choi: np.ndarray) -> str:
    choi = _as_square(choi, "choi")
    d = int(round(np.sqrt(choi.shape[0])))
    _check_dim(d)
    entries = [[float(z.real), float(z.imag)] for z in choi.reshape(-1)]
    return json.dumps({"dim": d, "basis": "pauli-normalized", "entries": entries})


def choi_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    d = int(doc["dim"])
    _check_dim(d)
    entries = np.array([complex(re, im) for re, im in doc["entries"]])
    return entries.reshape(d * d, d * d)
