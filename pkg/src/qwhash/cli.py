"""
Command-line interface.

Exit status: 0 on success, 1 on usage errors (bad flags, bad parameter
values, unreadable inputs), 2 on runtime failures such as a degenerate walk
state or a failing self-test.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import DEFAULT_MSG_LEN, analyze, birthday_report, sensitivity_suite, trial_rng, write_reports
from .exceptions import DegenerateStateError, InvalidInputError, InvalidParameterError, QWHashError
from .hashing import QhfParams, qhf
from .selftest import run_selftest
from .validation import bits_to_str, bytes_to_bits, check_message

log = logging.getLogger("qwhash")

CONFIG_ENV = "QWHASH_CONFIG"
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

# CLI flag dest -> parameter-fingerprint key.
_PARAM_FLAGS = {
    "n": "n",
    "k": "k",
    "t": "t",
    "l": "l",
    "coin": "coin",
    "boundary": "boundary",
    "initial_vertex": "iv",
    "initial_coin": "ic",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_config(path: str | os.PathLike) -> dict[str, str]:
    """Parse a flat ``key=value`` file (``#`` comments and blank lines allowed)."""
    config = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for item in line.split(";"):
            if not item.strip():
                continue
            if "=" not in item:
                raise InvalidParameterError(f"{path}:{lineno}: expected key=value, got {item.strip()!r}")
            key, value = item.split("=", 1)
            config[key.strip()] = value.strip()
    return config


def resolve_params(args: argparse.Namespace, environ=os.environ) -> QhfParams:
    """Defaults, then the config file, then explicit flags."""
    params = QhfParams()
    if not args.params_default:
        path = args.config or environ.get(CONFIG_ENV)
        if path:
            if not Path(path).is_file():
                raise InvalidInputError(f"config file not found: {path}")
            params = QhfParams.from_config(read_config(path), base=params)
    overrides = {key: getattr(args, dest) for dest, key in _PARAM_FLAGS.items() if getattr(args, dest) is not None}
    if args.no_renormalize:
        overrides["renorm"] = "0"
    if overrides:
        params = QhfParams.from_config(overrides, base=params)
    return params


def _param_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("walk parameters")
    g.add_argument("--n", type=int, help="path-graph vertices (default 15)")
    g.add_argument("--k", type=int, help="bits per output segment (default 11)")
    g.add_argument("--t", type=float, help="CTQW evolution time (default 1.0)")
    g.add_argument("--l", type=float, help="self-loop laziness weight (default 2.0)")
    g.add_argument("--coin", choices=["grover", "fourier"])
    g.add_argument("--boundary", choices=["reflect", "cycle"])
    g.add_argument("--initial-vertex", type=int)
    g.add_argument("--initial-coin", choices=["left", "right", "loop"])
    g.add_argument("--no-renormalize", action="store_true", help="skip rescaling after CTQW steps")
    g.add_argument("--config", help=f"key=value parameter file (default: ${CONFIG_ENV})")
    g.add_argument("--params-default", action="store_true", help="ignore any config file")
    p.add_argument("--out-dir", help="directory for report files")
    p.add_argument("--format", choices=["text", "kv", "csv"], default="text", help="stdout format")
    return p


def build_parser() -> argparse.ArgumentParser:
    parent = _param_parent()
    parser = _Parser(prog="qwhash", description="Hybrid quantum-walk hash function and its evaluation battery.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("hash", parents=[parent], help="hash a bit message")
    src = h.add_mutually_exclusive_group(required=True)
    src.add_argument("--message", help="inline message of 0/1 characters")
    src.add_argument("--input-file", help="file holding the message")
    h.add_argument("--bytes", action="store_true", help="read --input-file as raw bytes, MSB first")

    trial_flags = argparse.ArgumentParser(add_help=False)
    trial_flags.add_argument("--trials", type=int, default=10000)
    trial_flags.add_argument("--msg-len", type=int, default=DEFAULT_MSG_LEN)
    trial_flags.add_argument("--seed", type=int, default=0)
    trial_flags.add_argument("--threads", type=int, default=1)

    sub.add_parser("analyze", parents=[parent, trial_flags], help="collision, avalanche and uniformity tests")

    s = sub.add_parser("sensitivity", parents=[parent], help="C1-C4 single-edit sensitivity suite")
    s.add_argument("--message", help="base message (default: random, drawn from --seed)")
    s.add_argument("--msg-len", type=int, default=DEFAULT_MSG_LEN)
    s.add_argument("--seed", type=int, default=0)

    sub.add_parser("birthday", parents=[parent], help="birthday-attack complexity")
    sub.add_parser("selftest", help="run built-in invariant checks")
    return parser


def _read_message(args) -> np.ndarray:
    if args.message is not None:
        if args.bytes:
            raise UsageError("--bytes applies to --input-file only")
        return check_message(args.message)
    path = Path(args.input_file)
    if not path.is_file():
        raise InvalidInputError(f"input file not found: {path}")
    if args.bytes:
        return bytes_to_bits(path.read_bytes())
    return check_message(path.read_text(encoding="ascii"))


def _emit(args, text: str, kv: str, name: str, csv: str | None = None) -> None:
    if args.format == "kv":
        sys.stdout.write(kv)
    elif args.format == "csv" and csv is not None:
        sys.stdout.write(csv)
    else:
        print(text)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.txt").write_text(text + "\n", encoding="utf-8")
        (out / f"{name}.kv").write_text(kv, encoding="utf-8")


def _cmd_hash(args, params: QhfParams) -> int:
    message = _read_message(args)
    h = qhf(message, params)
    text = "\n".join(
        [
            f"bits:   {h.bits}",
            f"hex:    {h.hex}",
            f"groups: {' '.join(h.hex_groups())}",
            f"params: {params.fingerprint()}",
        ]
    )
    kv = f"bits={h.bits}\nhex={h.hex}\nmessage_bits={len(message)}\nparams={params.fingerprint()}\n"
    _emit(args, text, kv, "hash")
    return EXIT_OK


def _cmd_analyze(args, params: QhfParams) -> int:
    if args.trials < 2 or args.msg_len < 1 or args.threads < 1:
        raise UsageError("--trials must be >= 2, --msg-len and --threads >= 1")
    out_dir = Path(args.out_dir or "qwhash_reports")
    log.info("running %d trials (msg_len=%d, seed=%d, threads=%d)", args.trials, args.msg_len, args.seed, args.threads)
    result = analyze(args.trials, args.msg_len, params, args.seed, args.threads)
    paths = write_reports(result, out_dir)
    if args.format == "kv":
        sys.stdout.write(result.collision.to_kv() + result.avalanche.to_kv() + result.uniformity.to_kv())
    elif args.format == "csv":
        sys.stdout.write(result.uniformity.histogram_csv())
    else:
        print(result.to_text(), end="")
        print(f"wrote {len(paths)} files to {out_dir}")
    return EXIT_OK


def _cmd_sensitivity(args, params: QhfParams) -> int:
    if args.message is not None:
        message = args.message
    else:
        if args.msg_len < 5:
            raise UsageError("--msg-len must be >= 5")
        message = bits_to_str(trial_rng(args.seed, 0).integers(0, 2, args.msg_len))
    report = sensitivity_suite(message, params)
    _emit(args, report.to_text(), report.to_kv(), "sensitivity")
    return EXIT_OK


def _cmd_birthday(args, params: QhfParams) -> int:
    report = birthday_report(params)
    _emit(args, report.to_text(), report.to_kv(), "birthday")
    return EXIT_OK


COMMANDS = {
    "hash": _cmd_hash,
    "analyze": _cmd_analyze,
    "sensitivity": _cmd_sensitivity,
    "birthday": _cmd_birthday,
}


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        if args.command == "selftest":
            return EXIT_OK if run_selftest() else EXIT_RUNTIME
        params = resolve_params(args)
        return COMMANDS[args.command](args, params)
    except (UsageError, InvalidParameterError, InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateStateError, QWHashError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
