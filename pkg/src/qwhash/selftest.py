"""Built-in invariant checks run by ``qwhash selftest``."""

from __future__ import annotations

import time
from fractions import Fraction
from typing import Callable

import numpy as np

from . import linalg
from .hashing import QhfParams, encode_segments, evolve, initial_state, operators_for, qhf, qhf_batch
from .operators import Boundary, CoinKind, WalkOperators, build_shift, hybrid_step

TAYLOR_TERMS = 40
TAYLOR_TOL = 1e-8


def taylor_expm(m: np.ndarray, t: float, terms: int = TAYLOR_TERMS) -> np.ndarray:
    """Truncated series ``sum_{j<=terms} (-i M t)^j / j!``."""
    x = -1j * t * np.asarray(m, dtype=np.complex128)
    term = np.eye(x.shape[0], dtype=np.complex128)
    total = term.copy()
    for j in range(1, terms + 1):
        term = term @ x / j
        total = total + term
    return total


def exact_segment_value(p: float, k: int, scale: int) -> int:
    """Segment value in exact rational arithmetic on the double ``p``."""
    x = min(max(Fraction(p), Fraction(0)), Fraction(1)) * scale
    guarded = round(x, 12)
    return min(guarded.numerator // guarded.denominator, (1 << k) - 1)


def _check_unitarity() -> str:
    worst = 0.0
    for n in (2, 3, 8, 15, 32):
        for coin in CoinKind:
            for boundary in Boundary:
                ops = WalkOperators.build(n, 1.0, 1.0, coin, boundary)
                for u in (ops.u_ctqw, ops.coin, build_shift(n, boundary), ops.u_lqw):
                    worst = max(worst, linalg.unitarity_error(u))
    assert worst < linalg.UNITARY_TOL, worst
    return f"max |U^H U - I| = {worst:.2e}"


def _check_taylor() -> str:
    worst = 0.0
    for n in range(1, 9):
        for t in (0.3, 1.0, 2.7):
            a = linalg.path_adjacency(n)
            worst = max(worst, float(np.max(np.abs(linalg.expm_hermitian_scaled(a, t) - taylor_expm(a, t)))))
    assert worst < TAYLOR_TOL, worst
    return f"max entry error vs {TAYLOR_TERMS}-term series = {worst:.2e}"


def _check_spectrum() -> str:
    worst = 0.0
    for n in (1, 2, 5, 15, 40):
        a = linalg.path_adjacency(n)
        dec = linalg.eig_hermitian(a)
        exact = np.sort(2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
        worst = max(worst, float(np.max(np.abs(dec.eigenvalues - exact))), float(np.max(np.abs(dec.reconstruct() - a))))
    assert worst < linalg.RECONSTRUCTION_TOL, worst
    return f"path spectrum / reconstruction error = {worst:.2e}"


def _check_kernel() -> str:
    params = QhfParams()
    ops = operators_for(params)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        msg = rng.integers(0, 2, 48)
        psi = initial_state(params)
        for b in msg:
            psi = hybrid_step(psi, int(b), ops)
        worst = max(worst, float(np.max(np.abs(psi - evolve(msg, params)))))
    assert worst < 1e-10, worst
    return f"batched kernel vs dense steps = {worst:.2e}"


def _check_determinism() -> str:
    params = QhfParams()
    rng = np.random.default_rng(11)
    msgs = rng.integers(0, 2, (200, 64))
    batch, failed = qhf_batch(msgs, params)
    assert not failed.any()
    for i in range(0, 200, 9):
        single = qhf(msgs[i], params)
        assert np.array_equal(single.to_array(), batch[i])
        assert single == qhf(msgs[i], params)
    assert len(single) == params.n_bits and len(single.hex) == -(-params.n_bits // 4)
    return f"{params.n_bits}-bit hashes identical across batch sizes and repeats"


def _check_encoding() -> str:
    rng = np.random.default_rng(3)
    ps = np.concatenate([rng.random(2000), [0.0, 1.0, 0.05]])
    got = encode_segments(ps, 11, 20000)
    want = [exact_segment_value(float(p), 11, 20000) for p in ps]
    assert list(got) == want
    return f"{len(ps)} segment encodings match rational arithmetic"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("unitarity", _check_unitarity),
    ("expm-taylor", _check_taylor),
    ("spectrum", _check_spectrum),
    ("kernel", _check_kernel),
    ("determinism", _check_determinism),
    ("encoding", _check_encoding),
]


def run_selftest(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            detail = check()
            status = "PASS"
        except Exception as exc:  # noqa: BLE001 - report every failure, keep going
            detail = f"{type(exc).__name__}: {exc}"
            status = "FAIL"
            ok = False
        echo(f"[{status}] {name:<12} {detail} ({time.perf_counter() - start:.2f}s)")
    return ok
