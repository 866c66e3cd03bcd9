"""
Command-line surface of :module:`begfad`.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 box over the enumeration cap, 4 invariant violation.
"""
import sys
from logging import getLogger
from argparse import SUPPRESS, ArgumentParser, ArgumentTypeError, Namespace
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence
from begfad import STREAM_ALGORITHM, __version__, configure_logging
from begfad.errors import ConfigCodecError, EnumerationCapError, InvariantViolation, LatticeError
from begfad.experiments import EstimatorKind, SamplerKind, draw_samples, estimate_rows, sweep, validate_sides
from begfad.io import FileManager
from begfad.lattice import build_box
from begfad.oracle import DFS_SITE_LIMIT, census_report, enumerate_ground_states, lemma1_sides
from begfad.percolation import PercCoupledPair, perc_cluster_tail, run_containment, tail_fit
from begfad.sampler import sandwich_run
from begfad.spins import dumps, is_feasible
from begfad.utils.settings import Settings

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_VIOLATION = 4

_logger = getLogger(__name__)


@dataclass
class RunManifest:
    """
    Everything needed to re-derive an output, written as comment lines at the top of it.
    """

    subcommand: str
    flags: Dict[str, object]
    seed: Optional[int]
    version: str = __version__
    stream_algorithm: str = STREAM_ALGORITHM
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"))

    def to_lines(self) -> List[str]:
        lines = [f"# begfad {self.version}",
                 f"# subcommand: {self.subcommand}",
                 f"# seed: {self.seed}",
                 f"# stream: {self.stream_algorithm}",
                 f"# timestamp: {self.timestamp}"]
        lines.extend(f"# {key}: {value}" for key, value in sorted(self.flags.items()))
        return lines


def _odd_side(text: str) -> int:
    try:
        side = int(text)
    except ValueError:
        raise ArgumentTypeError(f"invalid side {text!r}") from None
    if side < 1:
        raise ArgumentTypeError("side must be at least 1")
    if side % 2 == 0:
        raise ArgumentTypeError("side must be odd")
    return side


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentTypeError(f"invalid count {text!r}") from None
    if value < 1:
        raise ArgumentTypeError("must be at least 1")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentTypeError(f"invalid count {text!r}") from None
    if value < 0:
        raise ArgumentTypeError("must not be negative")
    return value


def _side_list(text: str) -> List[int]:
    parts = [part for part in text.split(",") if part.strip()]
    if not parts:
        raise ArgumentTypeError("at least one side is required")
    try:
        return validate_sides([int(part) for part in parts])
    except ValueError as error:
        raise ArgumentTypeError(str(error)) from None


def _common_flags(suppress: bool) -> ArgumentParser:
    """
    Returns a parent parser with the flags accepted both before and after the sub-command.

    Sub-commands get ``SUPPRESS`` defaults so a flag given before the sub-command is not reset by it.
    """
    parent = ArgumentParser(add_help=False)
    switch = SUPPRESS if suppress else False
    parent.add_argument("--workers", type=_positive, default=SUPPRESS if suppress else None,
                        help="worker processes (default: all cores)")
    parent.add_argument("--quiet", action="store_true", default=switch,
                        help="no progress output; the manifest is always written")
    parent.add_argument("--verbose", action="store_true", default=switch, help="debug logging")
    parent.add_argument("--no-timing", action="store_true", default=switch,
                        help="write zero wall times and no timestamp")
    return parent


def build_parser() -> ArgumentParser:
    """
    Creates the argument parser with one sub-command per experiment.

    :rtype: ArgumentParser
    """
    parser = ArgumentParser(prog="begfad", description="Ground states of the BEG model at the FAD point.",
                            parents=[_common_flags(suppress=False)])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    common = [_common_flags(suppress=True)]

    sample = commands.add_parser("sample", help="draw perfect samples", parents=common)
    sample.add_argument("--dim", type=_positive, required=True)
    sample.add_argument("--side", type=_odd_side, required=True)
    sample.add_argument("--sampler", choices=[kind.value for kind in SamplerKind], default=SamplerKind.CFTP.value)
    sample.add_argument("--seed", type=int, default=None)
    sample.add_argument("--count", type=_positive, default=1)
    sample.add_argument("--horizon", type=_positive, default=None, help="forward horizon (default |box|^2)")
    sample.add_argument("--output", default="-")
    sample.set_defaults(func=cmd_sample)

    sweep_parser = commands.add_parser("sweep", help="central magnetization against the box side",
                                       parents=common)
    sweep_parser.add_argument("--dim", type=_positive, required=True)
    sweep_parser.add_argument("--sides", type=_side_list, default=None, help="comma separated odd sides")
    sweep_parser.add_argument("--samples", type=_positive, default=None)
    sweep_parser.add_argument("--sampler", choices=[kind.value for kind in SamplerKind],
                              default=SamplerKind.CFTP.value)
    sweep_parser.add_argument("--estimator", choices=[kind.value for kind in EstimatorKind],
                              default=EstimatorKind.SPIN_AVERAGE.value)
    sweep_parser.add_argument("--seed", type=int, default=None)
    sweep_parser.add_argument("--horizon", type=_positive, default=None)
    sweep_parser.add_argument("--output", default="-")
    sweep_parser.set_defaults(func=cmd_sweep)

    oracle = commands.add_parser("oracle", help="exact ground-state census", parents=common)
    oracle.add_argument("--dim", type=_positive, required=True)
    oracle.add_argument("--side", type=_odd_side, required=True)
    oracle.add_argument("--check-lemma1", action="store_true", help="compare both sides of the connectivity identity")
    oracle.add_argument("--method", choices=("auto", "dfs", "transfer"), default="auto")
    oracle.add_argument("--output", default="-")
    oracle.set_defaults(func=cmd_oracle)

    couple = commands.add_parser("couple-check", help="run the coupled chains and check their invariants",
                                  parents=common)
    couple.add_argument("--dim", type=_positive, required=True)
    couple.add_argument("--side", type=_odd_side, required=True)
    couple.add_argument("--steps", type=_non_negative, required=True)
    couple.add_argument("--seed", type=int, default=None)
    couple.add_argument("--checkpoint", type=_positive, default=None, help="steps between cluster checks")
    couple.add_argument("--output", default="-")
    couple.set_defaults(func=cmd_couple_check)

    tail = commands.add_parser("perc-tail", help="origin cluster sizes of p = 1/2 site percolation", parents=common)
    tail.add_argument("--dim", type=_positive, default=2)
    tail.add_argument("--side", type=_odd_side, required=True)
    tail.add_argument("--samples", type=_positive, required=True)
    tail.add_argument("--seed", type=int, default=None)
    tail.add_argument("--max-size", type=_positive, default=40, help="largest size used in the fit")
    tail.add_argument("--output", default="-")
    tail.set_defaults(func=cmd_perc_tail)
    return parser


def _manifest(args: Namespace) -> RunManifest:
    flags = {key: value for key, value in vars(args).items() if key not in ("func", "command", "seed")}
    manifest = RunManifest(args.command, flags, getattr(args, "seed", None))
    if args.no_timing:
        manifest.timestamp = "none"
    return manifest


def cmd_sample(args: Namespace) -> int:
    """
    Writes ``--count`` serialized perfect samples.
    """
    lattice = build_box(args.dim, args.side)
    batch = draw_samples(lattice, SamplerKind(args.sampler), args.count, args.seed, args.horizon, args.workers,
                         keep_configs=True, progress=not args.quiet)
    for config in batch.configs:
        if not is_feasible(config):
            raise InvariantViolation("sampled configuration is not a ground state", 0, dump=dumps(config))
    manifest = _manifest(args)
    manifest.flags["wasted"] = batch.wasted
    FileManager().write_output(args.output, manifest.to_lines(), [dumps(config) for config in batch.configs])
    return EXIT_OK


def cmd_sweep(args: Namespace) -> int:
    """
    Writes one CSV row per side.
    """
    settings = Settings()
    if args.sides is None:
        args.sides = list(settings.get("sides_2d") if args.dim == 2 else settings.get("sides_3d"))
    if args.samples is None:
        args.samples = int(settings.get("samples_per_side"))
    result = sweep(args.dim, args.sides, SamplerKind(args.sampler), args.samples, args.seed,
                   EstimatorKind(args.estimator), args.horizon, args.workers, progress=not args.quiet)
    body = estimate_rows(result.estimates, timing=not args.no_timing)
    if result.fit is not None:
        body.append(f"# fit_log_mean_slope: {result.fit.slope:.10f}")
        body.append(f"# fit_log_mean_intercept: {result.fit.intercept:.10f}")
        body.append(f"# fit_r_squared: {result.fit.r_squared:.10f}")
    FileManager().write_output(args.output, _manifest(args).to_lines(), body)
    return EXIT_OK


def cmd_oracle(args: Namespace) -> int:
    """
    Writes the census of a small box and, on request, both sides of the connectivity identity.
    """
    lattice = build_box(args.dim, args.side)
    dfs = args.method == "dfs" or (args.method == "auto" and lattice.site_count <= DFS_SITE_LIMIT)
    store = args.check_lemma1 and dfs
    census = enumerate_ground_states(lattice, store_configs=store, method=args.method)
    body = census_report(census)
    status = EXIT_OK
    if args.check_lemma1:
        left, right = lemma1_sides(census)
        body.append(f"lemma1_source={'listed-states' if census.configs is not None else 'census'}")
        body.append(f"lemma1_sum_origin_spin={left}")
        body.append(f"lemma1_count_connected={right}")
        body.append(f"lemma1={'PASS' if left == right else 'FAIL'}")
        if left != right:
            status = EXIT_VIOLATION
    FileManager().write_output(args.output, _manifest(args).to_lines(), body)
    return status


def cmd_couple_check(args: Namespace) -> int:
    """
    Runs the bottom, zero and top chains and the spin/percolation pair for ``--steps`` steps.
    """
    lattice = build_box(args.dim, args.side)
    body = []
    low, middle, high = sandwich_run(lattice, args.steps, args.seed, key=(lattice.dimension, lattice.side, 0))
    body.append(f"order_steps={args.steps}")
    body.append(f"order=PASS coalesced={'yes' if (low.spins == high.spins).all() else 'no'}")
    pair = PercCoupledPair.start(lattice, args.seed, lattice.dimension, lattice.side, 1)
    checkpoints = run_containment(pair, args.steps, args.checkpoint, progress=not args.quiet)
    body.append(f"containment_steps={args.steps}")
    body.append(f"containment_checkpoints={checkpoints}")
    body.append(f"coverage={pair.coverage():.6f}")
    body.append("containment=PASS")
    FileManager().write_output(args.output, _manifest(args).to_lines(), body)
    return EXIT_OK


def cmd_perc_tail(args: Namespace) -> int:
    """
    Writes the origin cluster size histogram and the fitted log-tail slope.
    """
    lattice = build_box(args.dim, args.side)
    histogram = perc_cluster_tail(lattice, args.samples, args.seed, progress=not args.quiet)
    fit = tail_fit(histogram, args.max_size)
    body = histogram.to_frame().to_csv(index=False, float_format="%.10f").splitlines()
    body.append(f"# fit_slope: {fit.slope:.10f}")
    body.append(f"# fit_intercept: {fit.intercept:.10f}")
    body.append(f"# fit_r_squared: {fit.r_squared:.10f}")
    body.append(f"# fit_points: {fit.points}")
    FileManager().write_output(args.output, _manifest(args).to_lines(), body)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses the command line, runs the sub-command and returns its exit code.

    :param argv: Arguments without the program name; ``sys.argv[1:]`` when omitted.
    :type argv: Optional[Sequence[str]]
    :rtype: int
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return EXIT_USAGE if error.code not in (0, None) else EXIT_OK
    configure_logging(args.verbose, args.quiet)
    settings = Settings()
    if getattr(args, "seed", "absent") is None:
        args.seed = settings.seed
    if args.workers is None:
        args.workers = settings.workers
    _logger.debug("Running %s with %s", args.command, vars(args))
    try:
        return args.func(args)
    except ConfigCodecError as error:
        print(f"begfad: {error}", file=sys.stderr)
        return EXIT_IO
    except (LatticeError, ValueError) as error:
        print(f"begfad: {error}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationCapError as error:
        print(f"begfad: {error}", file=sys.stderr)
        return EXIT_CAP
    except InvariantViolation as error:
        print(f"begfad: invariant violation: {error}", file=sys.stderr)
        if error.dump:
            print(error.dump, file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as error:
        print(f"begfad: {error}", file=sys.stderr)
        return EXIT_IO

