"""Twirling groups: sampling, exact Clifford representations, and compilation.

Clifford elements are stored by their conjugation action on the Pauli basis
(a signed permutation of the d^2 Pauli labels), which is phase-free and
exact over the integers.  The one- and two-qubit Clifford groups are
enumerated once by closure from generators and cached; sampling is then an
index draw, and two-qubit elements are lazily synthesized into the normal
form  (1q layer) . CNOT skeleton . (1q layer)  with 0 to 3 CNOTs.

Single-qubit gates are compiled into the virtual-Z primitive form
Z(theta) X(pi/2) Z(omega) X(pi/2) Z(phi); only the X(pi/2) pulses are
treated as error-bearing by the noise models.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import DimensionError, pauli_matrices

__all__ = [
    "Clifford",
    "Compiled1Q",
    "CLIFFORD2_ORDER",
    "CLIFFORD1_ORDER",
    "H",
    "S",
    "CX_AB",
    "CX_BA",
    "X90",
    "rz",
    "clifford1_elements",
    "clifford1_unitaries",
    "clifford2_elements",
    "clifford2_element",
    "clifford2_index",
    "clifford2_from_unitary",
    "synthesize_clifford2",
    "clifford2_unitary",
    "sample_haar_unitary",
    "sample_haar_su4",
    "sample_clifford2",
    "sample_local_clifford",
    "sample_pauli_layer",
    "compile_single_qubit",
    "invert_sequence",
    "pauli_unitary_1q",
]

CLIFFORD1_ORDER = 24
CLIFFORD2_ORDER = 11520

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
CX_AB = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CX_BA = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


def rz(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def rx(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


X90 = rx(np.pi / 2)


@dataclass(frozen=True)
class Clifford:
    """Signed permutation action P_j -> signs[j] * P_perm[j] under U . U^dag."""

    n: int
    perm: tuple
    signs: tuple

    @property
    def dim(self) -> int:
        return 2**self.n

    def key(self):
        return (self.perm, self.signs)

    def compose(self, other: "Clifford") -> "Clifford":
        """self applied after other."""
        if self.n != other.n:
            raise DimensionError("qubit count mismatch in Clifford composition")
        perm = tuple(self.perm[p] for p in other.perm)
        signs = tuple(
            other.signs[j] * self.signs[other.perm[j]] for j in range(len(self.perm))
        )
        return Clifford(self.n, perm, signs)

    def inverse(self) -> "Clifford":
        k = len(self.perm)
        perm = [0] * k
        signs = [1] * k
        for j in range(k):
            perm[self.perm[j]] = j
            signs[self.perm[j]] = self.signs[j]
        return Clifford(self.n, tuple(perm), tuple(signs))

    def conjugate_pauli(self, idx: int) -> tuple[int, int]:
        """Image of Pauli ``idx``: returns (sign, pauli index)."""
        return self.signs[idx], self.perm[idx]

    def ptm(self) -> np.ndarray:
        k = len(self.perm)
        m = np.zeros((k, k))
        for j in range(k):
            m[self.perm[j], j] = self.signs[j]
        return m

    @staticmethod
    def identity(n: int) -> "Clifford":
        k = 4**n
        return Clifford(n, tuple(range(k)), (1,) * k)

    @staticmethod
    def from_unitary(u: np.ndarray, atol: float = 1e-9) -> "Clifford":
        u = np.asarray(u)
        d = u.shape[0]
        n = {2: 1, 4: 2}.get(d)
        if n is None:
            raise DimensionError(f"unsupported dimension {d}")
        paulis = pauli_matrices(d)
        perm, signs = [], []
        for p in paulis:
            img = u @ p @ u.conj().T
            hit = None
            for k, q in enumerate(paulis):
                c = np.trace(q @ img).real / d
                if abs(abs(c) - 1.0) < atol:
                    hit = (k, 1 if c > 0 else -1)
                    break
            if hit is None:
                raise ValueError("unitary is not a Clifford element")
            perm.append(hit[0])
            signs.append(hit[1])
        return Clifford(n, tuple(perm), tuple(signs))


def _tensor_clifford(a: Clifford, b: Clifford) -> Clifford:
    """Two-qubit element a (x) b from single-qubit elements."""
    perm, signs = [], []
    for i in range(4):
        for j in range(4):
            perm.append(4 * a.perm[i] + b.perm[j])
            signs.append(a.signs[i] * b.signs[j])
    return Clifford(2, tuple(perm), tuple(signs))


def _closure(generators: list[Clifford], n: int) -> list[Clifford]:
    ident = Clifford.identity(n)
    seen = {ident.key(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for el in frontier:
            for g in generators:
                cand = g.compose(el)
                if cand.key() not in seen:
                    seen[cand.key()] = cand
                    nxt.append(cand)
        frontier = nxt
    return list(seen.values())


@lru_cache(maxsize=1)
def clifford1_elements() -> tuple[Clifford, ...]:
    gens = [Clifford.from_unitary(H), Clifford.from_unitary(S)]
    els = _closure(gens, 1)
    if len(els) != CLIFFORD1_ORDER:
        raise RuntimeError(f"C1 closure produced {len(els)} elements")
    return tuple(els)


@lru_cache(maxsize=1)
def clifford1_unitaries() -> tuple[np.ndarray, ...]:
    """Concrete unitaries for the 24 single-qubit Cliffords, matching
    :func:`clifford1_elements` order."""
    gens = {Clifford.from_unitary(H).key(): H, Clifford.from_unitary(S).key(): S}
    ident = Clifford.identity(1)
    reps = {ident.key(): np.eye(2, dtype=complex)}
    frontier = [ident]
    gen_els = [Clifford.from_unitary(H), Clifford.from_unitary(S)]
    gen_mats = [H, S]
    while frontier:
        nxt = []
        for el in frontier:
            for g_el, g_mat in zip(gen_els, gen_mats):
                cand = g_el.compose(el)
                if cand.key() not in reps:
                    reps[cand.key()] = g_mat @ reps[el.key()]
                    nxt.append(cand)
        frontier = nxt
    return tuple(reps[el.key()] for el in clifford1_elements())


@lru_cache(maxsize=1)
def _clifford1_index_map() -> dict:
    return {el.key(): i for i, el in enumerate(clifford1_elements())}


@lru_cache(maxsize=1)
def clifford2_elements() -> tuple[Clifford, ...]:
    h1 = Clifford.from_unitary(np.kron(H, np.eye(2)))
    h2 = Clifford.from_unitary(np.kron(np.eye(2), H))
    s1 = Clifford.from_unitary(np.kron(S, np.eye(2)))
    s2 = Clifford.from_unitary(np.kron(np.eye(2), S))
    cx = Clifford.from_unitary(CX_AB)
    els = _closure([h1, h2, s1, s2, cx], 2)
    if len(els) != CLIFFORD2_ORDER:
        raise RuntimeError(f"C2 closure produced {len(els)} elements")
    return tuple(els)


@lru_cache(maxsize=1)
def _clifford2_index_map() -> dict:
    return {el.key(): i for i, el in enumerate(clifford2_elements())}


def clifford2_element(index: int) -> Clifford:
    return clifford2_elements()[index]


def clifford2_index(el: Clifford) -> int:
    return _clifford2_index_map()[el.key()]


def clifford2_from_unitary(u: np.ndarray) -> int:
    return clifford2_index(Clifford.from_unitary(u))


@lru_cache(maxsize=1)
def _local_pair_map() -> dict:
    """key of A (x) B -> (index of A, index of B) over the 576 local elements."""
    els = clifford1_elements()
    out = {}
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            out[_tensor_clifford(a, b).key()] = (i, j)
    return out


# CNOT skeletons in application order; SWAP = CX_ab CX_ba CX_ab.
_SKELETONS = ((), ("ab",), ("ab", "ba"), ("ab", "ba", "ab"))


def _skeleton_clifford(skel: tuple) -> Clifford:
    el = Clifford.identity(2)
    for orient in skel:
        mat = CX_AB if orient == "ab" else CX_BA
        el = Clifford.from_unitary(mat).compose(el)
    return el


@lru_cache(maxsize=8)
def _skeleton_inverse(skel: tuple) -> Clifford:
    return _skeleton_clifford(skel).inverse()


@lru_cache(maxsize=4)
def _skeleton_core_arrays(skel: tuple):
    """(s . local_b)^-1 for all 576 locals b, as perm/sign arrays."""
    els1 = clifford1_elements()
    s = _skeleton_clifford(skel)
    perms = np.empty((576, 16), dtype=np.int64)
    signs = np.empty((576, 16), dtype=np.int64)
    pairs = []
    k = 0
    for i in range(CLIFFORD1_ORDER):
        for j in range(CLIFFORD1_ORDER):
            core = s.compose(_tensor_clifford(els1[i], els1[j])).inverse()
            perms[k] = core.perm
            signs[k] = core.signs
            pairs.append((i, j))
            k += 1
    return perms, signs, tuple(pairs)


# indices of the qubit-a Pauli block (X I, Y I, Z I): a 2-qubit Clifford is
# local exactly when it preserves this block and its qubit-b counterpart
_A_BLOCK = np.array([4, 8, 12])
_B_BLOCK = np.array([1, 2, 3])


@lru_cache(maxsize=None)
def synthesize_clifford2(index: int):
    """Normal form of a two-qubit Clifford element.

    Returns ``(pre, skeleton, post)`` where ``pre`` and ``post`` are pairs of
    C1 indices (applied before/after the skeleton) and ``skeleton`` is a
    tuple of CNOT orientations ("ab" = control on the first qubit) in
    application order.  Local elements get an empty skeleton and a merged
    single local layer (``post`` is None).
    """
    el = clifford2_element(index)
    locals_map = _local_pair_map()
    hit = locals_map.get(el.key())
    if hit is not None:
        return hit, (), None
    el_perm = np.array(el.perm)
    el_signs = np.array(el.signs)
    for skel in _SKELETONS[1:]:
        core_perms, core_signs, pairs = _skeleton_core_arrays(skel)
        # post candidate a = el . (s . b)^-1, vectorized over all pre layers b
        a_perms = el_perm[core_perms]
        local_mask = (a_perms[:, _A_BLOCK] % 4 == 0).all(axis=1) & (
            a_perms[:, _B_BLOCK] < 4
        ).all(axis=1)
        rows = np.nonzero(local_mask)[0]
        if rows.size:
            b = int(rows[0])
            a_signs = core_signs[b] * el_signs[core_perms[b]]
            key = (tuple(int(x) for x in a_perms[b]), tuple(int(x) for x in a_signs))
            return pairs[b], skel, locals_map[key]
    raise RuntimeError(f"no synthesis found for Clifford element {index}")


def clifford2_unitary(index: int) -> np.ndarray:
    """Unitary realization (fixed phase convention) via the normal form."""
    pre, skel, post = synthesize_clifford2(index)
    u1 = clifford1_unitaries()
    u = np.kron(u1[pre[0]], u1[pre[1]])
    for orient in skel:
        u = (CX_AB if orient == "ab" else CX_BA) @ u
    if post is not None:
        u = np.kron(u1[post[0]], u1[post[1]]) @ u
    return u


# ---------------------------------------------------------------------------
# sampling


def sample_haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed U(d) element via Ginibre + QR with phase correction."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def sample_haar_su4(rng: np.random.Generator) -> np.ndarray:
    """Haar sample projected to SU(4) by removing the determinant phase."""
    u = sample_haar_unitary(rng, 4)
    return u * np.exp(-1j * np.angle(np.linalg.det(u)) / 4)


def sample_clifford2(rng: np.random.Generator) -> int:
    """Uniform index into the 11520-element two-qubit Clifford group."""
    return int(rng.integers(CLIFFORD2_ORDER))


def sample_local_clifford(rng: np.random.Generator) -> tuple[int, int]:
    """Uniform pair of C1 indices, one per qubit."""
    return int(rng.integers(CLIFFORD1_ORDER)), int(rng.integers(CLIFFORD1_ORDER))


def sample_pauli_layer(rng: np.random.Generator) -> tuple[int, int]:
    """Uniform pair of single-qubit Pauli labels (0=I, 1=X, 2=Y, 3=Z)."""
    return int(rng.integers(4)), int(rng.integers(4))


def pauli_unitary_1q(label: int) -> np.ndarray:
    return pauli_matrices(2)[label]


# ---------------------------------------------------------------------------
# single-qubit compilation


@dataclass(frozen=True)
class Compiled1Q:
    """Virtual-Z form Z(theta) X90 Z(omega) X90 Z(phi), rightmost applied first."""

    phi: float
    omega: float
    theta: float

    def unitary(self) -> np.ndarray:
        return rz(self.theta) @ X90 @ rz(self.omega) @ X90 @ rz(self.phi)


def _euler_zyz(u: np.ndarray, atol: float = 1e-12):
    """Angles (a, b, c) with U proportional to Rz(a) Ry(b) Rz(c)."""
    b = 2.0 * np.arctan2(abs(u[1, 0]), abs(u[0, 0]))
    if abs(u[1, 0]) < atol:
        a = float(np.angle(u[1, 1] / u[0, 0]))
        c = 0.0
    elif abs(u[0, 0]) < atol:
        a = float(np.angle(-u[1, 0] / u[0, 1]))
        c = 0.0
    else:
        apc = float(np.angle(u[1, 1] / u[0, 0]))
        amc = float(np.angle(-u[1, 0] / u[0, 1]))
        a = 0.5 * (apc + amc)
        c = 0.5 * (apc - amc)
        # halving the wrapped angles can flip the off-diagonal sign
        rec10 = np.exp(0.5j * (a - c)) * np.sin(b / 2)
        target10 = u[1, 0] / (u[0, 0] / (np.exp(-0.5j * (a + c)) * np.cos(b / 2)))
        if abs(rec10 - target10) > abs(rec10 + target10):
            a += np.pi
            c -= np.pi
    return a, b, c


def compile_single_qubit(u: np.ndarray) -> Compiled1Q:
    """Compile any single-qubit unitary into the two-pulse virtual-Z form.

    Every gate, including the identity and Paulis, uses exactly two X(pi/2)
    pulses so that all single-qubit layers carry the same error budget.
    """
    u = np.asarray(u)
    if u.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 unitary, got shape {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(2))) > 1e-9:
        raise ValueError("input is not unitary")
    a, b, c = _euler_zyz(u)
    # Ry(b) = -Rz(pi) Rx(pi/2) Rz(b + pi) Rx(pi/2)
    return Compiled1Q(phi=c, omega=b + np.pi, theta=a + np.pi)


def invert_sequence(ideal_gates) -> np.ndarray:
    """Exact correction gate for motion reversal: (G_m ... G_1)^-1.

    ``ideal_gates`` are in application order (first applied first).
    """
    gates = list(ideal_gates)
    if not gates:
        raise ValueError("cannot invert an empty sequence")
    prod = gates[0]
    for g in gates[1:]:
        prod = g @ prod
    return np.asarray(prod).conj().T
