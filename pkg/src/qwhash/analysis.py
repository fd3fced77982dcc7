"""
Seeded evaluation battery for the hash: collision (omega count), avalanche
statistics, per-bit toggle uniformity, the C1-C4 sensitivity suite and the
birthday bound.

Every trial ``i`` of a run with seed ``s`` draws from its own generator,
``PCG64(SeedSequence(entropy=s, spawn_key=(i,)))``. numpy's SeedSequence
hashes the (seed, index) pair, so a trial's message and flip position depend
only on ``(s, i)``; runs are identical for any chunking or thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DegenerateStateError, InvalidInputError
from .hashing import HashValue, QhfParams, _fmt_number, qhf, qhf_batch
from .validation import bits_to_str, check_message

__all__ = [
    "DEFAULT_MSG_LEN",
    "MAX_FAILURE_RATE",
    "ASCII_CONVENTION",
    "STD_CONVENTION",
    "REFERENCE_COLLISION",
    "REFERENCE_COLLISION_MEAN_PCT",
    "REFERENCE_AVALANCHE",
    "trial_rng",
    "draw_trials",
    "TrialData",
    "run_trials",
    "omega_count",
    "CollisionReport",
    "AvalancheReport",
    "UniformityReport",
    "SensitivityReport",
    "BirthdayReport",
    "AnalysisResult",
    "collision_test",
    "avalanche_test",
    "uniformity_test",
    "analyze",
    "sensitivity_variants",
    "sensitivity_suite",
    "birthday_report",
    "write_reports",
]

DEFAULT_MSG_LEN = 64
MAX_FAILURE_RATE = 0.001
DEFAULT_CHUNK = 2048

ASCII_CONVENTION = "8-bit bytes, MSB first, final partial byte zero-padded; match = byte equality"
STD_CONVENTION = "population (divide by N)"

# Published figures for this construction; their walk parameters (t, l, coin,
# initial state) were never reported, so they are comparison points only.
REFERENCE_COLLISION = {
    10000: {"w0": 9928, "rate_pct": 0.72},
    20000: {"w0": 19863, "rate_pct": 0.69},
    30000: {"w0": 29800, "rate_pct": 0.67},
    40000: {"w0": 39719, "rate_pct": 0.71},
}
REFERENCE_COLLISION_MEAN_PCT = 0.70
REFERENCE_AVALANCHE = {"mean_bits": 84.90, "change_rate_pct": 51.46, "std_bits": 7.52, "std_rate_pct": 4.56}
REFERENCE_CAVEAT = "reference values come from unreported walk parameters; compare qualitatively only"


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))))


def draw_trials(n_trials: int, msg_len: int, seed: int, start: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Messages ``(n_trials, msg_len)`` and one flip position per trial."""
    messages = np.empty((n_trials, msg_len), dtype=np.uint8)
    flips = np.empty(n_trials, dtype=np.int64)
    for row in range(n_trials):
        rng = trial_rng(seed, start + row)
        messages[row] = rng.integers(0, 2, size=msg_len, dtype=np.uint8)
        flips[row] = rng.integers(0, msg_len)
    return messages, flips


@dataclass
class TrialData:
    """Original/modified hash bits of a seeded run of single-bit-flip trials."""

    params: QhfParams
    seed: int
    msg_len: int
    messages: np.ndarray
    flips: np.ndarray
    original: np.ndarray
    modified: np.ndarray
    failed: np.ndarray

    @property
    def n_trials(self) -> int:
        return len(self.flips)

    @property
    def n_failed(self) -> int:
        return int(self.failed.sum())

    def valid(self) -> tuple[np.ndarray, np.ndarray]:
        ok = ~self.failed
        return self.original[ok], self.modified[ok]


def _run_chunk(start: int, size: int, msg_len: int, params: QhfParams, seed: int):
    messages, flips = draw_trials(size, msg_len, seed, start)
    modified_msgs = messages.copy()
    modified_msgs[np.arange(size), flips] ^= 1
    original, f1 = qhf_batch(messages, params)
    modified, f2 = qhf_batch(modified_msgs, params)
    return messages, flips, original, modified, f1 | f2


def run_trials(
    n_trials: int,
    msg_len: int = DEFAULT_MSG_LEN,
    params: QhfParams | None = None,
    seed: int = 0,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> TrialData:
    """Run ``n_trials`` random-message / random-single-bit-flip trials.

    Raises ``DegenerateStateError`` when more than ``MAX_FAILURE_RATE`` of the
    trials collapse to a zero state.
    """
    params = QhfParams() if params is None else params
    if n_trials < 1:
        raise InvalidInputError(f"need at least one trial, got {n_trials}")
    if msg_len < 1:
        raise InvalidInputError(f"message length must be >= 1, got {msg_len}")
    starts = range(0, n_trials, chunk_size)
    jobs = [(s, min(chunk_size, n_trials - s), msg_len, params, seed) for s in starts]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: _run_chunk(*job), jobs))
    else:
        parts = [_run_chunk(*job) for job in jobs]
    data = TrialData(params, int(seed), int(msg_len), *(np.concatenate(cols) for cols in zip(*parts)))
    if data.n_failed > MAX_FAILURE_RATE * n_trials:
        raise DegenerateStateError(
            f"{data.n_failed} of {n_trials} trials hit a degenerate state "
            f"(limit {MAX_FAILURE_RATE:.1%}); review the walk parameters"
        )
    return data


def omega_count(a: bytes, b: bytes) -> int:
    """Number of positions where two equal-length byte strings agree."""
    if len(a) != len(b):
        raise InvalidInputError(f"omega count needs equal lengths, got {len(a)} and {len(b)}")
    return sum(x == y for x, y in zip(a, b))


def _kv(items: dict) -> str:
    return "".join(f"{key}={value}\n" for key, value in items.items())


def _hist_csv(counts, meta: dict) -> str:
    head = "".join(f"# {key}={value}\n" for key, value in meta.items())
    rows = "".join(f"{i},{int(c)}\n" for i, c in enumerate(counts))
    return head + "index,count\n" + rows


@dataclass
class _RunMeta:
    params: QhfParams
    seed: int
    msg_len: int
    n_trials: int
    failed: int

    def items(self) -> dict:
        return {
            "params": self.params.fingerprint(),
            "seed": self.seed,
            "msg_len": self.msg_len,
            "trials": self.n_trials,
            "failed": self.failed,
        }


def _meta(data: TrialData) -> _RunMeta:
    return _RunMeta(data.params, data.seed, data.msg_len, data.n_trials, data.n_failed)


@dataclass
class CollisionReport:
    meta: _RunMeta
    omega_histogram: np.ndarray
    omegas: np.ndarray = field(repr=False)

    @classmethod
    def from_trials(cls, data: TrialData) -> "CollisionReport":
        a, b = data.valid()
        omegas = (np.packbits(a, axis=1) == np.packbits(b, axis=1)).sum(axis=1)
        n_chars = math.ceil(data.params.n_bits / 8)
        hist = np.bincount(omegas, minlength=n_chars + 1)
        return cls(_meta(data), hist, omegas)

    @property
    def n_trials(self) -> int:
        return int(self.omega_histogram.sum())

    @property
    def w0(self) -> int:
        return int(self.omega_histogram[0])

    @property
    def collision_rate_pct(self) -> float:
        return 100.0 * (self.n_trials - self.w0) / self.n_trials

    def metrics(self) -> dict:
        return {
            **self.meta.items(),
            "w0": self.w0,
            "collision_rate_pct": f"{self.collision_rate_pct:.6f}",
            "mean_omega": f"{self.omegas.mean():.6f}",
            "ascii_convention": ASCII_CONVENTION,
            "reference_collision_rate_pct": REFERENCE_COLLISION_MEAN_PCT,
        }

    def to_kv(self) -> str:
        return _kv(self.metrics())

    def histogram_csv(self) -> str:
        return _hist_csv(self.omega_histogram, self.meta.items())

    def to_text(self) -> str:
        ref = REFERENCE_COLLISION.get(self.n_trials)
        lines = [
            f"Collision test  (N={self.n_trials}, failed={self.meta.failed})",
            f"  W_N(omega=0) = {self.w0}",
            f"  collision rate = {self.collision_rate_pct:.2f}%",
            f"  mean omega = {self.omegas.mean():.3f} of {len(self.omega_histogram) - 1} chars",
            f"  reference average rate = {REFERENCE_COLLISION_MEAN_PCT:.2f}%"
            + (f"; at N={self.n_trials}: W_N={ref['w0']}, {ref['rate_pct']:.2f}%" if ref else ""),
            f"  ({REFERENCE_CAVEAT})",
        ]
        return "\n".join(lines)


@dataclass
class AvalancheReport:
    meta: _RunMeta
    n_bits: int
    distances: np.ndarray = field(repr=False)

    @classmethod
    def from_trials(cls, data: TrialData) -> "AvalancheReport":
        a, b = data.valid()
        return cls(_meta(data), data.params.n_bits, (a ^ b).sum(axis=1).astype(np.int64))

    @classmethod
    def from_distances(cls, distances, n_bits: int, meta: _RunMeta | None = None) -> "AvalancheReport":
        d = np.asarray(distances, dtype=np.int64)
        if meta is None:
            meta = _RunMeta(QhfParams(), 0, 0, len(d), 0)
        return cls(meta, n_bits, d)

    @property
    def n_trials(self) -> int:
        return len(self.distances)

    @property
    def total_flipped(self) -> int:
        return int(self.distances.sum())

    @property
    def mean_bits(self) -> float:
        return self.total_flipped / self.n_trials

    @property
    def change_rate_pct(self) -> float:
        return 100.0 * self.mean_bits / self.n_bits

    @property
    def std_bits(self) -> float:
        return float(np.sqrt(np.mean((self.distances - self.mean_bits) ** 2)))

    @property
    def std_rate_pct(self) -> float:
        return 100.0 * self.std_bits / self.n_bits

    def metrics(self) -> dict:
        return {
            **self.meta.items(),
            "mean_bits": f"{self.mean_bits:.6f}",
            "change_rate_pct": f"{self.change_rate_pct:.6f}",
            "std_bits": f"{self.std_bits:.6f}",
            "std_rate_pct": f"{self.std_rate_pct:.6f}",
            "total_flipped": self.total_flipped,
            "std_convention": STD_CONVENTION,
            **{f"reference_{key}": value for key, value in REFERENCE_AVALANCHE.items()},
        }

    def to_kv(self) -> str:
        return _kv(self.metrics())

    def to_text(self) -> str:
        ref = REFERENCE_AVALANCHE
        return "\n".join(
            [
                f"Avalanche test  (N={self.n_trials}, {self.n_bits}-bit output)",
                f"  {'metric':<10}{'measured':>12}{'reference':>12}",
                f"  {'B':<10}{self.mean_bits:>12.2f}{ref['mean_bits']:>12.2f}",
                f"  {'P (%)':<10}{self.change_rate_pct:>12.2f}{ref['change_rate_pct']:>12.2f}",
                f"  {'dB':<10}{self.std_bits:>12.2f}{ref['std_bits']:>12.2f}",
                f"  {'dP (%)':<10}{self.std_rate_pct:>12.2f}{ref['std_rate_pct']:>12.2f}",
                f"  (std: {STD_CONVENTION}; {REFERENCE_CAVEAT})",
            ]
        )


@dataclass
class UniformityReport:
    meta: _RunMeta
    toggle_counts: np.ndarray

    @classmethod
    def from_trials(cls, data: TrialData) -> "UniformityReport":
        a, b = data.valid()
        return cls(_meta(data), (a ^ b).sum(axis=0).astype(np.int64))

    @property
    def total(self) -> int:
        return int(self.toggle_counts.sum())

    @property
    def min(self) -> int:
        return int(self.toggle_counts.min())

    @property
    def max(self) -> int:
        return int(self.toggle_counts.max())

    @property
    def mean(self) -> float:
        return float(self.toggle_counts.mean())

    @property
    def coefficient_of_variation(self) -> float:
        return float(self.toggle_counts.std() / self.mean) if self.mean else float("inf")

    @property
    def max_share(self) -> float:
        """Largest fraction of all toggles owned by a single output bit."""
        return self.max / self.total if self.total else 0.0

    def metrics(self) -> dict:
        return {
            **self.meta.items(),
            "total_toggles": self.total,
            "min": self.min,
            "max": self.max,
            "mean": f"{self.mean:.6f}",
            "coefficient_of_variation": f"{self.coefficient_of_variation:.6f}",
            "max_share": f"{self.max_share:.6f}",
        }

    def to_kv(self) -> str:
        return _kv(self.metrics())

    def histogram_csv(self) -> str:
        return _hist_csv(self.toggle_counts, self.meta.items())

    def to_text(self) -> str:
        return "\n".join(
            [
                f"Toggle uniformity  (N={self.meta.n_trials}, {len(self.toggle_counts)} output bits)",
                f"  toggles per bit: min={self.min} max={self.max} mean={self.mean:.1f}",
                f"  coefficient of variation = {self.coefficient_of_variation:.4f}",
                f"  largest single-bit share = {100 * self.max_share:.3f}% of {self.total} toggles",
            ]
        )


@dataclass
class SensitivityReport:
    params: QhfParams
    messages: dict[str, str]
    hashes: dict[str, HashValue]

    @property
    def distances(self) -> dict[str, int]:
        base = self.hashes["C1"].to_array()
        return {key: int((h.to_array() ^ base).sum()) for key, h in self.hashes.items() if key != "C1"}

    def metrics(self) -> dict:
        out = {"params": self.params.fingerprint()}
        for key, h in self.hashes.items():
            out[f"{key}_message"] = self.messages[key]
            out[f"{key}_hex"] = h.hex
        for key, d in self.distances.items():
            out[f"{key}_distance"] = d
        return out

    def to_kv(self) -> str:
        return _kv(self.metrics())

    def to_text(self) -> str:
        labels = {
            "C1": "original",
            "C2": "insert '0' at start",
            "C3": "flip 5th bit",
            "C4": "delete 3rd bit",
        }
        lines = ["Sensitivity suite"]
        dist = self.distances
        for key, h in self.hashes.items():
            tail = "" if key == "C1" else f"  d={dist[key]}"
            lines.append(f"  {key} ({labels[key]}): {h.hex_groups()}{tail}")
        return "\n".join(lines)


@dataclass(frozen=True)
class BirthdayReport:
    n: int
    k: int

    @property
    def total_bits(self) -> int:
        return self.n * self.k

    @property
    def attack_exponent(self) -> float:
        return self.total_bits / 2

    @property
    def complexity(self) -> str:
        return f"O(2^{_fmt_number(self.attack_exponent)})"

    def metrics(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "total_bits": self.total_bits,
            "attack_exponent": _fmt_number(self.attack_exponent),
            "complexity": self.complexity,
        }

    def to_kv(self) -> str:
        return _kv(self.metrics())

    def to_text(self) -> str:
        return f"Birthday bound for a {self.total_bits}-bit hash ({self.n} x {self.k}): {self.complexity}"


@dataclass
class AnalysisResult:
    """Collision, avalanche and uniformity reports over one shared trial stream."""

    collision: CollisionReport
    avalanche: AvalancheReport
    uniformity: UniformityReport

    @classmethod
    def from_trials(cls, data: TrialData) -> "AnalysisResult":
        return cls(
            CollisionReport.from_trials(data),
            AvalancheReport.from_trials(data),
            UniformityReport.from_trials(data),
        )

    def to_text(self) -> str:
        head = f"params: {self.avalanche.meta.params.fingerprint()}\nseed: {self.avalanche.meta.seed}"
        body = [self.collision.to_text(), self.avalanche.to_text(), self.uniformity.to_text()]
        return "\n\n".join([head, *body]) + "\n"


def collision_test(n_trials, msg_len=DEFAULT_MSG_LEN, params=None, seed=0, threads=1) -> CollisionReport:
    return CollisionReport.from_trials(run_trials(n_trials, msg_len, params, seed, threads))


def avalanche_test(n_trials, msg_len=DEFAULT_MSG_LEN, params=None, seed=0, threads=1) -> AvalancheReport:
    if n_trials < 2:
        raise InvalidInputError("avalanche statistics need at least two trials")
    return AvalancheReport.from_trials(run_trials(n_trials, msg_len, params, seed, threads))


def uniformity_test(n_trials, msg_len=DEFAULT_MSG_LEN, params=None, seed=0, threads=1) -> UniformityReport:
    return UniformityReport.from_trials(run_trials(n_trials, msg_len, params, seed, threads))


def analyze(n_trials, msg_len=DEFAULT_MSG_LEN, params=None, seed=0, threads=1) -> AnalysisResult:
    return AnalysisResult.from_trials(run_trials(n_trials, msg_len, params, seed, threads))


def sensitivity_variants(base_message) -> dict[str, str]:
    """The four C1-C4 messages derived from ``base_message``."""
    bits = bits_to_str(check_message(base_message))
    if len(bits) < 5:
        raise InvalidInputError(f"sensitivity suite needs a message of >= 5 bits, got {len(bits)}")
    flipped = bits[:4] + ("0" if bits[4] == "1" else "1") + bits[5:]
    return {
        "C1": bits,
        "C2": "0" + bits,
        "C3": flipped,
        "C4": bits[:2] + bits[3:],
    }


def sensitivity_suite(base_message, params: QhfParams | None = None) -> SensitivityReport:
    params = QhfParams() if params is None else params
    messages = sensitivity_variants(base_message)
    return SensitivityReport(params, messages, {key: qhf(m, params) for key, m in messages.items()})


def birthday_report(params: QhfParams | None = None) -> BirthdayReport:
    params = QhfParams() if params is None else params
    return BirthdayReport(params.n, params.k)


def write_reports(result: AnalysisResult, out_dir: str | os.PathLike) -> list[Path]:
    """Write text, key=value and CSV files for an analysis run; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report.txt": result.to_text(),
        "collision.kv": result.collision.to_kv(),
        "omega_histogram.csv": result.collision.histogram_csv(),
        "avalanche.kv": result.avalanche.to_kv(),
        "uniformity.kv": result.uniformity.to_kv(),
        "toggle_counts.csv": result.uniformity.histogram_csv(),
    }
    paths = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths
