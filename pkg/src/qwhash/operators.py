"""
Walk operators on the coin (x) position space of a path graph.

Basis layout is coin-major: the amplitude of ``|c, v>`` lives at index
``c * n + v`` with coin order Left=0, Right=1, SelfLoop=2. Under this layout
the CTQW embedding is the block column ``[0_{2n x n}; I_n]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import (
    ContractViolationError,
    DegenerateStateError,
    InvalidDimensionError,
    InvalidParameterError,
)

__all__ = [
    "LEFT",
    "RIGHT",
    "LOOP",
    "COIN_DIM",
    "COIN_UNITARY_TOL",
    "CoinKind",
    "Boundary",
    "build_coin",
    "build_shift",
    "build_lqw",
    "build_p_embed",
    "WalkOperators",
    "hybrid_step",
]

LEFT, RIGHT, LOOP = 0, 1, 2
COIN_DIM = 3
COIN_UNITARY_TOL = 1e-12
# Squared norm at or below which the CTQW projection counts as the zero vector.
DEGENERATE_NORM_SQ = 1e-300


class CoinKind(str, enum.Enum):
    GROVER = "grover"
    FOURIER = "fourier"


class Boundary(str, enum.Enum):
    REFLECT = "reflect"
    CYCLE = "cycle"


def build_coin(kind: CoinKind | str, l: float = 1.0) -> np.ndarray:
    """Return the 3x3 coin.

    ``grover`` is the lackadaisical Grover coin ``2|s><s| - I`` with
    ``|s> = (1, 1, sqrt(l)) / sqrt(2 + l)``; ``l`` weights the self-loop.
    ``fourier`` is the 3-point DFT matrix and ignores ``l``.
    """
    kind = CoinKind(kind)
    if kind is CoinKind.FOURIER:
        omega = np.exp(2j * np.pi / COIN_DIM)
        jk = np.outer(np.arange(COIN_DIM), np.arange(COIN_DIM))
        return omega**jk / np.sqrt(COIN_DIM)

    if not np.isfinite(l) or l < 0:
        raise InvalidParameterError(f"laziness l must be >= 0, got {l!r}")
    s = np.array([1.0, 1.0, np.sqrt(l)]) / np.sqrt(2.0 + l)
    return (2.0 * np.outer(s, s) - np.eye(COIN_DIM)).astype(np.complex128)


def _shift_targets(n: int, boundary: Boundary) -> np.ndarray:
    """``targets[i]`` is the basis index that ``|i>`` is sent to by the shift."""
    v = np.arange(n)
    left = LEFT * n + v - 1
    right = RIGHT * n + v + 1
    if boundary is Boundary.REFLECT:
        left[0] = RIGHT * n
        right[-1] = LEFT * n + n - 1
    else:
        left[0] = LEFT * n + n - 1
        right[-1] = RIGHT * n
    loop = LOOP * n + v
    return np.concatenate([left, right, loop])


def build_shift(n: int, boundary: Boundary | str = Boundary.REFLECT) -> np.ndarray:
    """Conditional shift: Left steps to v-1, Right to v+1, SelfLoop stays.

    With ``reflect`` the walker bounces at the endpoints and its coin flips
    (``|L,0> -> |R,0>``, ``|R,n-1> -> |L,n-1>``); ``cycle`` wraps around.
    """
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"shift needs n >= 2 vertices, got {n!r}")
    n = int(n)
    targets = _shift_targets(n, Boundary(boundary))
    s = np.zeros((COIN_DIM * n, COIN_DIM * n), dtype=np.complex128)
    s[targets, np.arange(COIN_DIM * n)] = 1.0
    return s


def build_lqw(coin: np.ndarray, n: int, boundary: Boundary | str = Boundary.REFLECT) -> np.ndarray:
    coin = linalg.as_matrix(coin)
    if coin.shape != (COIN_DIM, COIN_DIM):
        raise InvalidDimensionError(f"coin must be 3x3, got {coin.shape}")
    if linalg.unitarity_error(coin) >= COIN_UNITARY_TOL:
        raise ContractViolationError("coin is not unitary")
    return build_shift(n, boundary) @ np.kron(coin, np.eye(n))


def build_p_embed(n: int) -> np.ndarray:
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"embedding needs n >= 1, got {n!r}")
    n = int(n)
    p = np.zeros((COIN_DIM * n, n), dtype=np.complex128)
    p[LOOP * n + np.arange(n), np.arange(n)] = 1.0
    return p


@dataclass(frozen=True)
class WalkOperators:
    """The three operators of one parameter set, built once and shared."""

    n: int
    t: float
    l: float
    coin_kind: CoinKind
    boundary: Boundary
    coin: np.ndarray = field(repr=False)
    u_ctqw: np.ndarray = field(repr=False)
    u_lqw: np.ndarray = field(repr=False)
    p_embed: np.ndarray = field(repr=False)
    shift_targets: np.ndarray = field(repr=False)

    @classmethod
    def build(
        cls,
        n: int,
        t: float,
        l: float,
        coin: CoinKind | str = CoinKind.GROVER,
        boundary: Boundary | str = Boundary.REFLECT,
    ) -> "WalkOperators":
        coin_kind, boundary = CoinKind(coin), Boundary(boundary)
        c = build_coin(coin_kind, l)
        arrays = dict(
            coin=c,
            u_ctqw=linalg.expm_hermitian_scaled(linalg.path_adjacency(n), t),
            u_lqw=build_lqw(c, n, boundary),
            p_embed=build_p_embed(n),
            shift_targets=_shift_targets(n, boundary),
        )
        for a in arrays.values():
            a.setflags(write=False)
        return cls(n=int(n), t=float(t), l=float(l), coin_kind=coin_kind, boundary=boundary, **arrays)

    @property
    def dim(self) -> int:
        return COIN_DIM * self.n


def hybrid_step(state: np.ndarray, bit: int, ops: WalkOperators, renormalize: bool = True) -> np.ndarray:
    """One message-controlled step using the dense operators.

    ``bit == 1`` applies the coined walk. ``bit == 0`` extracts the self-loop
    block, evolves it under the CTQW and re-embeds it; this discards the
    Left/Right amplitudes, so the result is rescaled to unit norm when
    ``renormalize`` is set.
    """
    psi = linalg.as_vector(state)
    if psi.shape[0] != ops.dim:
        raise InvalidDimensionError(f"state has dimension {psi.shape[0]}, expected {ops.dim}")
    if bit == 1:
        return linalg.apply(ops.u_lqw, psi)
    if bit != 0:
        raise InvalidParameterError(f"message bits must be 0 or 1, got {bit!r}")

    phi = linalg.apply(ops.p_embed.conj().T, psi)
    out = linalg.apply(ops.p_embed, linalg.apply(ops.u_ctqw, phi))
    if renormalize:
        norm_sq = float(np.vdot(out, out).real)
        if norm_sq <= DEGENERATE_NORM_SQ:
            raise DegenerateStateError("CTQW step received a state with no self-loop amplitude")
        out = out / np.sqrt(norm_sq)
    return out
