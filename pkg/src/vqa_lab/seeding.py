"""Deterministic 64-bit seed derivation for grid cells and samplers.

``mix64`` chains the splitmix64 finalizer over its arguments:
``state <- splitmix64(state XOR word)`` for each 64-bit word, where integers
contribute one word and strings contribute their UTF-8 bytes in 8-byte
little-endian chunks plus a length word.  Purpose tags (e.g. "init",
"ernft", "grad") keep optimization and diagnostics streams disjoint.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _words(part: int | str):
    if isinstance(part, str):
        data = part.encode("utf-8")
        yield len(data)
        for i in range(0, len(data), 8):
            yield int.from_bytes(data[i : i + 8], "little")
    else:
        yield part & _MASK


def mix64(*parts: int | str) -> int:
    """Collision-resistant 64-bit mix of integers and string tags."""
    state = 0x243F6A8885A308D3  # pi fractional bits, an arbitrary fixed start
    for part in parts:
        for word in _words(part):
            state = splitmix64(state ^ word)
    return state
