"""
Hybrid quantum-walk hash: message bits drive a sequence of CTQW / coined
walk steps on a path graph, and the final position distribution is encoded
into ``n`` fixed-width binary segments.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractViolationError, DegenerateStateError, InvalidParameterError
from .operators import COIN_DIM, DEGENERATE_NORM_SQ, LEFT, LOOP, RIGHT, Boundary, CoinKind, WalkOperators
from .validation import bits_to_str, check_message, check_message_matrix

__all__ = [
    "DEFAULT_SCALE",
    "PROBABILITY_SLACK",
    "FLOOR_GUARD_DIGITS",
    "SUM_TOL",
    "COIN_NAMES",
    "QhfParams",
    "HashValue",
    "operators_for",
    "initial_state",
    "evolve",
    "evolve_batch",
    "measure_positions",
    "encode_segment",
    "encode_segments",
    "qhf",
    "qhf_batch",
    "render_hex",
    "render_ascii",
    "hex_groups",
]

DEFAULT_SCALE = 20_000
PROBABILITY_SLACK = 1e-12
FLOOR_GUARD_DIGITS = 12
SUM_TOL = 1e-9

COIN_NAMES = {"left": LEFT, "right": RIGHT, "loop": LOOP}


def _fmt_number(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


@dataclass(frozen=True)
class QhfParams:
    """All tunable constants of the hash.

    ``initial_vertex=None`` resolves to ``n // 2``.
    """

    n: int = 15
    k: int = 11
    t: float = 1.0
    l: float = 2.0
    coin: CoinKind = CoinKind.GROVER
    boundary: Boundary = Boundary.REFLECT
    initial_vertex: int | None = None
    initial_coin: str = "loop"
    scale: int = DEFAULT_SCALE
    renormalize: bool = True

    def __post_init__(self):
        set_ = functools.partial(object.__setattr__, self)
        try:
            set_("coin", CoinKind(self.coin))
            set_("boundary", Boundary(self.boundary))
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from None
        for name in ("n", "k", "scale"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
            set_(name, int(value))
        if self.n < 2:
            raise InvalidParameterError(f"n must be >= 2, got {self.n}")
        if self.k < 1:
            raise InvalidParameterError(f"k must be >= 1, got {self.k}")
        if self.scale < 1:
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")
        if not math.isfinite(self.t) or self.t <= 0:
            raise InvalidParameterError(f"t must be > 0, got {self.t!r}")
        if not math.isfinite(self.l) or self.l < 0:
            raise InvalidParameterError(f"l must be >= 0, got {self.l!r}")
        set_("t", float(self.t))
        set_("l", float(self.l))
        iv = self.n // 2 if self.initial_vertex is None else self.initial_vertex
        if int(iv) != iv or not 0 <= iv < self.n:
            raise InvalidParameterError(f"initial_vertex must lie in [0, {self.n}), got {iv!r}")
        set_("initial_vertex", int(iv))
        if self.initial_coin not in COIN_NAMES:
            raise InvalidParameterError(f"initial_coin must be one of {sorted(COIN_NAMES)}, got {self.initial_coin!r}")
        set_("renormalize", bool(self.renormalize))

    @property
    def n_bits(self) -> int:
        return self.n * self.k

    def fingerprint(self) -> str:
        """Canonical ``key=value;...`` string identifying this parameter set."""
        return ";".join(f"{key}={value}" for key, value in self.as_config().items())

    def as_config(self) -> dict[str, str]:
        return {
            "n": str(self.n),
            "k": str(self.k),
            "t": _fmt_number(self.t),
            "l": _fmt_number(self.l),
            "coin": self.coin.value,
            "boundary": self.boundary.value,
            "iv": str(self.initial_vertex),
            "ic": self.initial_coin,
            "scale": str(self.scale),
            "renorm": "1" if self.renormalize else "0",
        }

    @classmethod
    def from_config(cls, config: dict[str, str], base: "QhfParams | None" = None) -> "QhfParams":
        """Build params from fingerprint-style keys, overriding ``base``."""
        keymap = {
            "n": ("n", int),
            "k": ("k", int),
            "t": ("t", float),
            "l": ("l", float),
            "coin": ("coin", str),
            "boundary": ("boundary", str),
            "iv": ("initial_vertex", int),
            "ic": ("initial_coin", str),
            "scale": ("scale", int),
            "renorm": ("renormalize", _parse_flag),
        }
        kwargs = {}
        for key, raw in config.items():
            if key not in keymap:
                raise InvalidParameterError(f"unknown parameter key {key!r}")
            name, conv = keymap[key]
            try:
                kwargs[name] = conv(str(raw).strip())
            except ValueError:
                raise InvalidParameterError(f"bad value for {key}: {raw!r}") from None
        if base is None:
            return cls(**kwargs)
        fields = {f: getattr(base, f) for f in cls.__dataclass_fields__}
        if "n" in kwargs and "initial_vertex" not in kwargs:
            fields["initial_vertex"] = None
        fields.update(kwargs)
        return cls(**fields)

    @classmethod
    def from_fingerprint(cls, text: str) -> "QhfParams":
        pairs = (item.split("=", 1) for item in text.strip().split(";") if item)
        return cls.from_config({k.strip(): v for k, v in pairs})


def _parse_flag(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


@dataclass(frozen=True)
class HashValue:
    """An ``n*k``-bit hash output."""

    bits: str
    n: int = field(default=15, compare=False)
    k: int = field(default=11, compare=False)

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def hex(self) -> str:
        return render_hex(self)

    @property
    def ascii(self) -> bytes:
        return render_ascii(self)

    def hex_groups(self, width: int = 4) -> list[str]:
        return hex_groups(self, width)

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.bits.encode("ascii"), dtype=np.uint8) - ord("0")

    def segments(self) -> list[int]:
        return [int(self.bits[i : i + self.k], 2) for i in range(0, len(self.bits), self.k)]

    def __str__(self) -> str:
        return self.bits


def _padded(bits: str, group: int) -> str:
    return bits + "0" * (-len(bits) % group)


def render_hex(h: HashValue | str) -> str:
    """Upper-case hex, 4 bits per digit, final partial nibble zero-padded."""
    bits = _padded(str(h), 4)
    return "".join("%X" % int(bits[i : i + 4], 2) for i in range(0, len(bits), 4))


def render_ascii(h: HashValue | str) -> bytes:
    """Bytes built from 8-bit groups, final partial byte zero-padded."""
    bits = _padded(str(h), 8)
    return bytes(int(bits[i : i + 8], 2) for i in range(0, len(bits), 8))


def hex_groups(h: HashValue | str, width: int = 4) -> list[str]:
    text = render_hex(h)
    return [text[i : i + width] for i in range(0, len(text), width)]


@functools.lru_cache(maxsize=64)
def _cached_operators(n: int, t: float, l: float, coin: CoinKind, boundary: Boundary) -> WalkOperators:
    return WalkOperators.build(n, t, l, coin, boundary)


def operators_for(params: QhfParams) -> WalkOperators:
    return _cached_operators(params.n, params.t, params.l, params.coin, params.boundary)


def initial_state(params: QhfParams) -> np.ndarray:
    psi = np.zeros(COIN_DIM * params.n, dtype=np.complex128)
    psi[COIN_NAMES[params.initial_coin] * params.n + params.initial_vertex] = 1.0
    return psi


# Batched kernel. Complex arithmetic is spelled out on separate real and
# imaginary float arrays, accumulated in a fixed order, so every row's result
# is bit-identical no matter how many rows are processed together.


def _coin_step(re: np.ndarray, im: np.ndarray, ops: WalkOperators) -> tuple[np.ndarray, np.ndarray]:
    cr, ci = ops.coin.real, ops.coin.imag
    out_re = np.empty_like(re)
    out_im = np.empty_like(im)
    for c in range(COIN_DIM):
        acc_re = np.zeros_like(re[:, 0])
        acc_im = np.zeros_like(im[:, 0])
        for j in range(COIN_DIM):
            xr, xi = re[:, j], im[:, j]
            acc_re = acc_re + (cr[c, j] * xr - ci[c, j] * xi)
            acc_im = acc_im + (cr[c, j] * xi + ci[c, j] * xr)
        out_re[:, c] = acc_re
        out_im[:, c] = acc_im
    b = re.shape[0]
    shifted_re = np.empty((b, COIN_DIM * ops.n))
    shifted_im = np.empty((b, COIN_DIM * ops.n))
    shifted_re[:, ops.shift_targets] = out_re.reshape(b, -1)
    shifted_im[:, ops.shift_targets] = out_im.reshape(b, -1)
    return shifted_re.reshape(re.shape), shifted_im.reshape(im.shape)


def _ctqw_step(
    re: np.ndarray, im: np.ndarray, ops: WalkOperators, renormalize: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ur, ui = ops.u_ctqw.real, ops.u_ctqw.imag
    pr, pi = re[:, LOOP, :], im[:, LOOP, :]
    acc_re = np.zeros_like(pr)
    acc_im = np.zeros_like(pi)
    for j in range(ops.n):
        xr, xi = pr[:, j : j + 1], pi[:, j : j + 1]
        acc_re = acc_re + (ur[:, j] * xr - ui[:, j] * xi)
        acc_im = acc_im + (ur[:, j] * xi + ui[:, j] * xr)
    failed = np.zeros(re.shape[0], dtype=bool)
    if renormalize:
        norm_sq = _row_sq_norm(acc_re, acc_im)
        failed = norm_sq <= DEGENERATE_NORM_SQ
        norm = np.sqrt(np.where(failed, 1.0, norm_sq))[:, None]
        acc_re = acc_re / norm
        acc_im = acc_im / norm
    out_re = np.zeros_like(re)
    out_im = np.zeros_like(im)
    out_re[:, LOOP, :] = acc_re
    out_im[:, LOOP, :] = acc_im
    return out_re, out_im, failed


def _row_sq_norm(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    acc = np.zeros(re.shape[0])
    for j in range(re.shape[1]):
        acc = acc + (re[:, j] * re[:, j] + im[:, j] * im[:, j])
    return acc


def evolve_batch(messages, params: QhfParams) -> tuple[np.ndarray, np.ndarray]:
    """Evolve many equal-length messages at once.

    Returns ``(states, failed)``: complex states of shape ``(B, 3n)`` and a
    boolean mask of rows that hit a degenerate (zero) state on the way.
    """
    bits = check_message_matrix(messages)
    ops = operators_for(params)
    b = bits.shape[0]
    psi0 = initial_state(params).reshape(COIN_DIM, params.n)
    re = np.broadcast_to(psi0.real, (b, COIN_DIM, params.n)).copy()
    im = np.broadcast_to(psi0.imag, (b, COIN_DIM, params.n)).copy()
    failed = np.zeros(b, dtype=bool)
    for step in range(bits.shape[1]):
        col = bits[:, step]
        ones = np.flatnonzero(col == 1)
        zeros = np.flatnonzero(col == 0)
        if ones.size:
            re[ones], im[ones] = _coin_step(re[ones], im[ones], ops)
        if zeros.size:
            r0, i0, bad = _ctqw_step(re[zeros], im[zeros], ops, params.renormalize)
            re[zeros], im[zeros] = r0, i0
            failed[zeros[bad]] = True
    states = np.empty((b, COIN_DIM * params.n), dtype=np.complex128)
    states.real = re.reshape(b, -1)
    states.imag = im.reshape(b, -1)
    return states, failed


def evolve(message, params: QhfParams) -> np.ndarray:
    """Final state after one walk step per message bit, in message order."""
    states, failed = evolve_batch(check_message(message)[None, :], params)
    if failed[0]:
        raise DegenerateStateError("walk state collapsed to zero during a CTQW step")
    return states[0]


def _position_probs_batch(states: np.ndarray, n: int, renormalize: bool) -> tuple[np.ndarray, np.ndarray]:
    b = states.shape[0]
    re = states.real.reshape(b, COIN_DIM, n)
    im = states.imag.reshape(b, COIN_DIM, n)
    probs = np.zeros((b, n))
    for c in range(COIN_DIM):
        probs = probs + (re[:, c] * re[:, c] + im[:, c] * im[:, c])
    failed = np.zeros(b, dtype=bool)
    if renormalize:
        total = np.zeros(b)
        for v in range(n):
            total = total + probs[:, v]
        failed = total <= DEGENERATE_NORM_SQ
        probs = probs / np.where(failed, 1.0, total)[:, None]
    return probs, failed


def measure_positions(state, renormalize: bool = True, n: int | None = None) -> np.ndarray:
    """Position distribution ``P(v) = sum_c |<c, v|psi>|^2``.

    With ``renormalize`` the distribution is divided by the squared norm of
    ``state``.
    """
    psi = np.asarray(state, dtype=np.complex128)
    if psi.ndim != 1 or psi.size % COIN_DIM:
        raise ContractViolationError(f"state length must be a multiple of {COIN_DIM}, got shape {psi.shape}")
    n = psi.size // COIN_DIM if n is None else n
    probs, failed = _position_probs_batch(psi[None, :], n, renormalize)
    if failed[0]:
        raise DegenerateStateError("cannot normalize the zero state")
    return probs[0]


def encode_segments(probs, k: int, scale: int = DEFAULT_SCALE) -> np.ndarray:
    """Integer segment values ``min(floor(p * scale), 2**k - 1)``.

    ``p * scale`` is rounded to ``FLOOR_GUARD_DIGITS`` decimals before the
    floor so binary-inexact inputs such as 0.05 land on the intended integer.
    """
    p = np.asarray(probs, dtype=np.float64)
    if not np.all(np.isfinite(p)) or np.any(p < -PROBABILITY_SLACK) or np.any(p > 1 + PROBABILITY_SLACK):
        raise ContractViolationError("probabilities must lie in [0, 1]")
    cap = (1 << k) - 1
    scaled = np.clip(p, 0.0, 1.0) * scale
    vals = [min(math.floor(round(float(x), FLOOR_GUARD_DIGITS)), cap) for x in scaled.ravel()]
    return np.array(vals, dtype=np.int64).reshape(p.shape)


def encode_segment(p: float, k: int, scale: int = DEFAULT_SCALE) -> str:
    value = int(encode_segments([p], k, scale)[0])
    return format(value, f"0{k}b")


def _segments_to_bits(values: np.ndarray, k: int) -> np.ndarray:
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    bits = (values[..., None] >> shifts) & 1
    return bits.reshape(values.shape[0], -1).astype(np.uint8)


def qhf_batch(messages, params: QhfParams) -> tuple[np.ndarray, np.ndarray]:
    """Hash equal-length messages.

    Returns ``(bits, failed)`` where ``bits`` is a ``(B, n*k)`` uint8 array.
    Rows flagged in ``failed`` hit a degenerate state and hold zeros.
    """
    states, failed = evolve_batch(messages, params)
    probs, bad = _position_probs_batch(states, params.n, params.renormalize)
    failed = failed | bad
    probs[failed] = 0.0
    values = encode_segments(probs, params.k, params.scale)
    return _segments_to_bits(values, params.k), failed


def qhf(message, params: QhfParams | None = None) -> HashValue:
    """Hash one bit message."""
    params = QhfParams() if params is None else params
    bits, failed = qhf_batch(check_message(message)[None, :], params)
    if failed[0]:
        raise DegenerateStateError("walk state collapsed to zero; no hash for this message")
    return HashValue(bits_to_str(bits[0]), n=params.n, k=params.k)
