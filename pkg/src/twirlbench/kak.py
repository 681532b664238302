"""Cartan (KAK) decomposition of two-qubit unitaries.

Any U in U(4) factors as

    U = phase * (A1 (x) A2) . exp(i (a XX + b YY + c ZZ)) . (B1 (x) B2)

The nonlocal part is handled as three commuting two-qubit Pauli rotations,
which is also how the simulator costs an arbitrary SU(4) gate: three
entangling pulses plus single-qubit layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KakDecomposition",
    "kak_decompose",
    "canonical_unitary",
    "pauli_rotation",
    "CnotSynthesis",
    "synthesize_cnot_circuit",
]

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_XX = np.kron(_X, _X)
_YY = np.kron(_Y, _Y)
_ZZ = np.kron(_Z, _Z)

# Magic basis: columns are Bell-like states in which SU(2)xSU(2) ~ SO(4).
_M = (
    np.array(
        [
            [1, 0, 0, 1j],
            [0, 1j, 1, 0],
            [0, 1j, -1, 0],
            [1, 0, 0, -1j],
        ],
        dtype=complex,
    )
    / np.sqrt(2)
)

# Diagonal phases of exp(i(a XX + b YY + c ZZ)) in the magic basis are
# exp(i P @ (a, b, c)) with this sign pattern.
_PHASE_PATTERN = np.array(
    [
        [1, -1, 1],
        [1, 1, -1],
        [-1, -1, -1],
        [-1, 1, 1],
    ],
    dtype=float,
)


def pauli_rotation(axis: str, angle: float) -> np.ndarray:
    """exp(i * angle * P) for a two-qubit Pauli product P in {XX, YY, ZZ}."""
    gen = {"XX": _XX, "YY": _YY, "ZZ": _ZZ}[axis]
    return np.cos(angle) * np.eye(4) + 1j * np.sin(angle) * gen


def canonical_unitary(a: float, b: float, c: float) -> np.ndarray:
    return pauli_rotation("XX", a) @ pauli_rotation("YY", b) @ pauli_rotation("ZZ", c)


@dataclass(frozen=True)
class KakDecomposition:
    a1: np.ndarray
    a2: np.ndarray
    coeffs: tuple[float, float, float]
    b1: np.ndarray
    b2: np.ndarray
    phase: complex

    def reconstruct(self) -> np.ndarray:
        a, b, c = self.coeffs
        return (
            self.phase
            * np.kron(self.a1, self.a2)
            @ canonical_unitary(a, b, c)
            @ np.kron(self.b1, self.b2)
        )


_CX_AB = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CX_BA = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


def _ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


@dataclass(frozen=True)
class CnotSynthesis:
    """Realization of a two-qubit unitary as four local layers and 3 CNOTs.

    The circuit reads, in application order,

        (l0a (x) l0b) CX_ab (l1a (x) l1b) CX_ba (l2a (x) l2b) CX_ab (l3a (x) l3b)

    and reproduces the target up to global phase.
    """

    locals: tuple  # four (2x2, 2x2) pairs, in application order
    orientations = ("ab", "ba", "ab")

    def reconstruct(self) -> np.ndarray:
        cx = {"ab": _CX_AB, "ba": _CX_BA}
        out = np.kron(*self.locals[0])
        for layer, orient in zip(self.locals[1:], self.orientations):
            out = np.kron(*layer) @ cx[orient] @ out
        return out


def _canonical_cnot_core(a: float, b: float, c: float) -> np.ndarray:
    """3-CNOT circuit whose canonical (Weyl chamber) coefficients are (a,b,c)."""
    t1 = -2.0 * a - np.pi / 2
    t2 = 2.0 * b + np.pi / 2
    t3 = -2.0 * c + np.pi / 2
    m1 = np.kron(_ry(t2), _rz(t1))
    m2 = np.kron(_ry(t3), np.eye(2))
    return _CX_AB @ m2 @ _CX_BA @ m1 @ _CX_AB


def synthesize_cnot_circuit(u: np.ndarray) -> CnotSynthesis:
    """Decompose an arbitrary two-qubit unitary into 3 CNOTs + local layers.

    The middle local layers carry the canonical coefficients; the outer layers
    absorb the local parts of both the target and the core circuit.
    """
    target = kak_decompose(u)
    a, b, c = target.coeffs
    core = _canonical_cnot_core(a, b, c)
    mdec = kak_decompose(core)
    if np.max(np.abs(np.array(mdec.coeffs) - np.array(target.coeffs))) > 1e-9:
        raise np.linalg.LinAlgError("core circuit left the Weyl chamber cell")
    # u = ph (a1 x a2) N (b1 x b2),  core = ph' (m1 x m2) N (n1 x n2)
    # => u ~ (a1 m1^-1 x a2 m2^-1) core (n1^-1 b1 x n2^-1 b2)
    t1 = -2.0 * a - np.pi / 2
    t2 = 2.0 * b + np.pi / 2
    t3 = -2.0 * c + np.pi / 2
    mh = lambda m: m.conj().T
    locals_ = (
        (mh(mdec.b1) @ target.b1, mh(mdec.b2) @ target.b2),
        (_ry(t2), _rz(t1)),
        (_ry(t3), np.eye(2, dtype=complex)),
        (target.a1 @ mh(mdec.a1), target.a2 @ mh(mdec.a2)),
    )
    syn = CnotSynthesis(locals=locals_)
    rec = syn.reconstruct()
    scale = np.vdot(rec.reshape(-1), u.reshape(-1))
    if abs(abs(scale) / 4.0 - 1.0) > 1e-7:
        raise np.linalg.LinAlgError("CNOT synthesis failed to reproduce the target")
    return syn


def _nearest_kron_factors(m: np.ndarray):
    """Split a 4x4 unitary known to be A (x) B into unitary factors."""
    r = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    a = np.sqrt(s[0]) * u[:, 0].reshape(2, 2)
    b = np.sqrt(s[0]) * vh[0, :].reshape(2, 2)
    # fix scales so both factors are unitary with unit determinant phase split
    da = np.linalg.det(a)
    a = a / np.sqrt(da)
    b = b * np.sqrt(da)
    resid = np.kron(a, b) - m
    if np.max(np.abs(resid)) > 1e-8:
        raise ValueError("matrix is not a tensor product of single-qubit unitaries")
    return a, b


def _real_orthogonal_diagonalize(w: np.ndarray, rng_salt: int = 0):
    """Real orthogonal O with O.T @ w @ O diagonal, for unitary symmetric w."""
    re, im = w.real, w.imag
    rng = np.random.default_rng(12345 + rng_salt)
    for _ in range(24):
        t = rng.normal()
        _, o = np.linalg.eigh(re * np.cos(t) + im * np.sin(t))
        d = o.T @ w @ o
        if np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-9:
            return o
    raise np.linalg.LinAlgError("failed to find a real orthogonal eigenbasis")


_EYE2 = np.eye(2, dtype=complex)
# single-qubit Pauli attached to the right locals when coefficient k is
# shifted by pi/2 (exp(i pi/2 PP) = i P (x) P)
_SHIFT_PAULI = (_X, _Y, _Z)
# conjugating Pauli (on qubit a) that flips the signs of the two coefficients
# other than k
_FLIP_PAULI = {frozenset({0, 1}): _Z, frozenset({1, 2}): _X, frozenset({0, 2}): _Y}


def _rot(p: np.ndarray, t: float) -> np.ndarray:
    return np.cos(t / 2) * _EYE2 - 1j * np.sin(t / 2) * p


def _canonicalize(coeffs, a1, a2, b1, b2, phase):
    """Move canonical coefficients into the cell pi/4 >= a >= b >= |c|.

    Each move rewrites N(coeffs) through an exactly equivalent form and folds
    the corrective single-qubit factors into the surrounding local layers, so
    the reconstruction is unchanged.
    """
    c = np.array(coeffs, dtype=float)

    def shift(k, n=None):
        # reduce coefficient k into [-pi/4, pi/4] by multiples of pi/2
        if n is None:
            n = int(np.round(c[k] / (np.pi / 2)))
        if n == 0:
            return a1, a2, b1, b2, phase
        c[k] -= n * np.pi / 2
        p = _SHIFT_PAULI[k]
        pw = p if n % 2 else _EYE2
        return a1, a2, pw @ b1, pw @ b2, phase * 1j**n

    def flip(j, k):
        c[j], c[k] = -c[j], -c[k]
        q = _FLIP_PAULI[frozenset({j, k})]
        return a1 @ q, a2, q @ b1, b2, phase

    def swap(j, k):
        c[j], c[k] = c[k], c[j]
        q = _FLIP_PAULI[frozenset({j, k})]  # rotation axis orthogonal to j,k
        r = _rot(q, np.pi / 2)
        rd = r.conj().T
        return a1 @ rd, a2 @ rd, r @ b1, r @ b2, phase

    for k in range(3):
        a1, a2, b1, b2, phase = shift(k)
    # order by decreasing magnitude
    if abs(c[0]) < abs(c[1]):
        a1, a2, b1, b2, phase = swap(0, 1)
    if abs(c[1]) < abs(c[2]):
        a1, a2, b1, b2, phase = swap(1, 2)
    if abs(c[0]) < abs(c[1]):
        a1, a2, b1, b2, phase = swap(0, 1)
    # make a and b nonnegative, pushing any leftover sign onto c
    if c[0] < 0 and c[1] < 0:
        a1, a2, b1, b2, phase = flip(0, 1)
    elif c[0] < 0:
        a1, a2, b1, b2, phase = flip(0, 2)
    elif c[1] < 0:
        a1, a2, b1, b2, phase = flip(1, 2)
    # boundary convention: at a = pi/4 the cell identifies +/- c; choose c >= 0
    if c[2] < -1e-12 and c[0] > np.pi / 4 - 1e-12:
        a1, a2, b1, b2, phase = shift(0, n=1)  # a -> -pi/4
        a1, a2, b1, b2, phase = flip(0, 2)
    return tuple(c), a1, a2, b1, b2, phase


def kak_decompose(u: np.ndarray) -> KakDecomposition:
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected 4x4 unitary, got shape {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(4))) > 1e-9:
        raise ValueError("input is not unitary")

    det = np.linalg.det(u)
    global_phase = det ** (1 / 4)
    su = u / global_phase

    v = _M.conj().T @ su @ _M
    w = v.T @ v
    o_right = _real_orthogonal_diagonalize(w)
    if np.linalg.det(o_right) < 0:
        o_right = o_right.copy()
        o_right[:, 0] *= -1
    d = np.diag(o_right.T @ w @ o_right)
    half_phases = 0.5 * np.angle(d)

    for attempt in range(2):
        d_half = np.exp(1j * half_phases)
        q_left = v @ o_right @ np.diag(1 / d_half)
        if np.max(np.abs(q_left.imag)) < 1e-7 and np.linalg.det(q_left.real) > 0:
            break
        # flip one square-root branch to land in SO(4)
        half_phases = half_phases.copy()
        half_phases[0] += np.pi
    q_left = q_left.real

    # The sign columns of the phase pattern plus the all-ones vector form an
    # orthogonal basis of R^4, so the half-phases split exactly into canonical
    # coefficients plus a constant that joins the global phase.
    coeffs = np.linalg.lstsq(_PHASE_PATTERN, half_phases, rcond=None)[0]
    fitted = _PHASE_PATTERN @ coeffs
    extra = np.mean(half_phases - fitted)

    left = _M @ q_left @ _M.conj().T
    right = _M @ o_right.T @ _M.conj().T
    a1, a2 = _nearest_kron_factors(left)
    b1, b2 = _nearest_kron_factors(right)

    coeffs, a1, a2, b1, b2, phase = _canonicalize(
        coeffs, a1, a2, b1, b2, global_phase * np.exp(1j * extra)
    )
    dec = KakDecomposition(
        a1=a1,
        a2=a2,
        coeffs=(float(coeffs[0]), float(coeffs[1]), float(coeffs[2])),
        b1=b1,
        b2=b2,
        phase=phase,
    )
    rec = dec.reconstruct()
    scale = np.vdot(rec.reshape(-1), u.reshape(-1))
    scale /= abs(scale)
    dec = KakDecomposition(
        a1=a1, a2=a2, coeffs=dec.coeffs, b1=b1, b2=b2, phase=dec.phase * scale
    )
    if np.max(np.abs(dec.reconstruct() - u)) > 1e-7:
        raise np.linalg.LinAlgError("KAK reconstruction failed")
    return dec
