"""Command-line interface.

Subcommands:
  run     execute a seeded protocol session and emit the report
  oracle  print exact enumeration statistics for an attack strategy
  table   print the deterministic unitary/Bell-outcome table

Exit codes: 0 on accept, 2 when the run aborted (eavesdropper detected or
key check failed), 1 on usage or configuration errors.
"""

import argparse
import json
import sys
from fractions import Fraction

from .adversary import ChannelLeg, EveBasisPolicy, InterceptResend, NoAttack
from .errors import ConfigError
from .oracle import exact_oracle
from .protocol import KeyCheckPolicy, KeyMode
from .simulate import SimConfig, render_unitary_table, run_simulation, serialize_report

USAGE_ERROR = 1
ABORT_EXIT = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this tool reserves 2 for
    # protocol aborts.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _add_attack_flags(parser):
    parser.add_argument(
        "--attack",
        choices=["none", "forward-ir", "backward-ir"],
        default="none",
        help="channel adversary: intercept-resend on a leg, or none (default)",
    )
    parser.add_argument(
        "--eve-basis",
        choices=["z", "x", "random"],
        default="z",
        help="basis policy of the intercept-resend measurement (default z)",
    )


def _build_attack(args):
    if args.attack == "none":
        return NoAttack()
    leg = ChannelLeg.FORWARD if args.attack == "forward-ir" else ChannelLeg.BACKWARD
    return InterceptResend(leg, EveBasisPolicy(args.eve_basis))


def _build_key_mode(args) -> KeyMode:
    if args.key_mode == "combined":
        return KeyMode.COMBINED
    return KeyMode.SINGLE_BOB if args.single_keep == "bob" else KeyMode.SINGLE_ALICE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded protocol session")
    run.add_argument("--rounds", type=int, default=1000, help="protocol rounds (default 1000)")
    run.add_argument(
        "--control-prob", type=float, default=0.5, help="per-round control-mode probability"
    )
    run.add_argument("--key-mode", choices=["combined", "single"], default="combined")
    run.add_argument(
        "--single-keep",
        choices=["alice", "bob"],
        default="alice",
        help="which party's bits the single key mode keeps (default alice)",
    )
    run.add_argument(
        "--check-fraction", type=float, default=0.1, help="key fraction compared publicly"
    )
    run.add_argument("--mismatch-threshold", type=int, default=0)
    _add_attack_flags(run)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--format", choices=["json", "csv"], default="json")
    run.add_argument("--out", metavar="PATH", default=None, help="write the report to a file")

    oracle = sub.add_parser("oracle", help="print exact enumeration statistics")
    _add_attack_flags(oracle)
    oracle.add_argument("--key-mode", choices=["combined", "single"], default="combined")
    oracle.add_argument("--single-keep", choices=["alice", "bob"], default="alice")
    oracle.add_argument("--check-fraction", type=float, default=0.1)
    oracle.add_argument("--mismatch-threshold", type=int, default=0)
    oracle.add_argument(
        "--message-rounds",
        type=int,
        default=None,
        help="key length context for the exact abort probability (omitted: not computed)",
    )

    sub.add_parser("table", help="print the unitary/Bell-outcome table")
    return parser


def _cmd_run(args) -> int:
    config = SimConfig(
        rounds=args.rounds,
        control_prob=args.control_prob,
        key_mode=_build_key_mode(args),
        check_fraction=args.check_fraction,
        mismatch_threshold=args.mismatch_threshold,
        attack=_build_attack(args),
        seed=args.seed,
        output_format=args.format,
        output_path=args.out,
    )
    report = run_simulation(config)
    payload = serialize_report(report, config.output_format)
    if config.output_path:
        try:
            with open(config.output_path, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            raise ConfigError(f"cannot write report to {config.output_path!r}: {exc}") from exc
    else:
        sys.stdout.write(payload.decode())
    return ABORT_EXIT if report.aborted else 0


def _fraction_fields(value: Fraction | None, name: str) -> dict:
    if value is None:
        return {name: None, f"{name}_exact": None}
    return {name: float(value), f"{name}_exact": str(value)}


def _cmd_oracle(args) -> int:
    policy = None
    if args.message_rounds is not None:
        policy = KeyCheckPolicy(args.check_fraction, args.mismatch_threshold)
    result = exact_oracle(
        _build_attack(args),
        check_policy=policy,
        message_rounds=args.message_rounds,
        key_mode=_build_key_mode(args),
    )
    out = {}
    out.update(
        _fraction_fields(result.detection_prob_per_control_round, "detection_prob_per_control_round")
    )
    out.update(_fraction_fields(result.key_error_rate_overall, "key_error_rate_overall"))
    out.update(
        _fraction_fields(result.key_error_rate_amplitude_bit, "key_error_rate_amplitude_bit")
    )
    out.update(_fraction_fields(result.key_error_rate_phase_bit, "key_error_rate_phase_bit"))
    out.update(_fraction_fields(result.abort_probability, "abort_probability"))
    print(json.dumps(out, indent=2))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        print(render_unitary_table())
        return 0
    except ConfigError as exc:
        print(f"qdkd: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
