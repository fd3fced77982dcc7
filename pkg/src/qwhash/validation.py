"""Input validation helpers for messages."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .exceptions import InvalidInputError

__all__ = ["check_message", "check_messages", "check_message_matrix", "bytes_to_bits", "bits_to_str"]


def check_message(message) -> np.ndarray:
    """Coerce a message into a 1-D ``uint8`` array of 0/1 values.

    Accepts a ``'0'/'1'`` string (whitespace ignored), any sequence of ints or
    bools, or a 1-D numpy array.
    """
    if isinstance(message, bytes):
        raise InvalidInputError("raw bytes are not a bit message; use bytes_to_bits() first")
    if isinstance(message, str):
        text = "".join(message.split())
        if text.strip("01"):
            raise InvalidInputError(f"message may only contain '0' and '1', got {message!r}")
        arr = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(message)
        if arr.ndim != 1:
            raise InvalidInputError(f"message must be one-dimensional, got shape {arr.shape}")
        if arr.dtype.kind not in "biu":
            raise InvalidInputError(f"message must hold integers or bools, got dtype {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise InvalidInputError("message bits must be 0 or 1")
    if arr.size == 0:
        raise InvalidInputError("message must contain at least one bit")
    return arr.astype(np.uint8)


def check_messages(messages: Iterable) -> list[np.ndarray]:
    if isinstance(messages, np.ndarray) and messages.ndim == 2:
        return [check_message(row) for row in messages]
    if isinstance(messages, (str, bytes)):
        raise InvalidInputError("expected a collection of messages, got a single message")
    out = [check_message(m) for m in messages]
    if not out:
        raise InvalidInputError("no messages given")
    return out


def check_message_matrix(messages) -> np.ndarray:
    """Validate a ``(n_messages, length)`` array of equal-length messages."""
    arr = np.asarray(messages)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty 2-D bit matrix, got shape {arr.shape}")
    if arr.dtype.kind not in "biu" or arr.min() < 0 or arr.max() > 1:
        raise InvalidInputError("bit matrix entries must be 0 or 1")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def bytes_to_bits(data: bytes) -> np.ndarray:
    """Expand bytes into bits, most-significant bit first."""
    if not data:
        raise InvalidInputError("empty byte input")
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join("1" if b else "0" for b in bits)
