"""Deterministic counter-based random streams.

Every stochastic component of the simulator draws from a stream keyed by a
coordinate tuple (experiment seed, depth index, circuit index, ...).  Streams
are independent of execution order, so parallel and serial runs of the same
experiment produce identical results.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream", "child_seed"]


def _digest(coords: tuple) -> bytes:
    parts = []
    for c in coords:
        if isinstance(c, (int, np.integer)):
            parts.append(b"i" + int(c).to_bytes(16, "little", signed=True))
        elif isinstance(c, str):
            parts.append(b"s" + c.encode())
        else:
            raise TypeError(f"stream coordinates must be int or str, got {type(c)}")
    return hashlib.blake2b(b"|".join(parts), digest_size=16).digest()


def child_seed(*coords: int | str) -> int:
    """128-bit integer seed derived from a coordinate tuple."""
    return int.from_bytes(_digest(tuple(coords)), "little")


def stream(*coords: int | str) -> np.random.Generator:
    """Return an independent Philox generator keyed by ``coords``.

    The same coordinates always give a generator producing the same draws,
    regardless of how many other streams were consumed before it.
    """
    return np.random.Generator(np.random.Philox(key=child_seed(*coords)))
