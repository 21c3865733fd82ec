"""
Main entry point for the Γ-contraction command-line tool.
"""

import argparse
import dataclasses
import logging
import sys
from typing import Any, Dict, List

from .analysis import (
    PairAnalysisError,
    PreconditionFailed,
    StrictPreconditionFailed,
    fundamental_operator,
    is_gamma_contraction,
    is_gamma_isometry,
    is_gamma_unitary,
    normality_transfer,
    strict_criterion_value,
    von_neumann_check,
)
from .config import ConfigLoader, ConfigurationError, MatrixFileError, load_matrix
from .dilation import (
    DegreeTooHigh,
    TruncationTooSmall,
    build_dilation,
    central_gamma_unitary_check,
    compression_residual,
    require_window,
)
from .exporters import RegionCSVExporter, ReportExporter
from .geometry import SLICE_PRESETS, RegionSlice, SliceSpecError, classify, region_label
from .linalg import LinalgError
from .models import (
    AnalysisConfig,
    NotCommuting,
    OperatorPair,
    PointPair,
    UnitaryMethod,
    Verdict,
    matrix_to_document,
)
from .repro import EXAMPLES, UnknownExample, run_example
from .reporter import ReproReporter
from .symmetrization import (
    NormBoundViolated,
    NotGammaContraction,
    decompose,
    embed_and_split,
    factorization_search,
    half_embedding,
    symmetrize_ops,
)

logger = logging.getLogger(__name__)

VERDICT_EXIT_CODES = {
    Verdict.CERTIFIED_CONTRACTION: 0,
    Verdict.CERTIFIED_NOT: 1,
    Verdict.INCONCLUSIVE: 4,
}


def _scan_spec(value: str) -> tuple:
    """Parse ``RxA`` into (radial, angular) step counts."""
    try:
        radial, angular = (int(part) for part in value.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"scan must look like 32x64, got '{value}'"
        ) from None
    if radial < 1 or angular < 1:
        raise argparse.ArgumentTypeError(f"scan steps must be positive, got '{value}'")
    return radial, angular


def _common_flags() -> argparse.ArgumentParser:
    """Flags accepted by every subcommand; unset flags keep the configured value."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", type=str, help="YAML configuration file", metavar="CONFIG-PATH"
    )
    common.add_argument(
        "--tol", type=float, help="assertion tolerance (default 1e-8)", metavar="X"
    )
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument(
        "--scan",
        type=_scan_spec,
        help="ρ-scan resolution as RADIALxANGULAR (default 32x64)",
        metavar="RxA",
    )
    common.add_argument(
        "--blocks", type=int, help="dilation window size (default 8)", metavar="N"
    )
    common.add_argument(
        "--max-degree",
        type=int,
        help="compression word degree (default 6)",
        metavar="D",
    )
    common.add_argument(
        "--branch-search",
        action="store_true",
        default=None,
        help="try every square-root branch when decomposing",
    )
    common.add_argument(
        "--out", type=str, help="write the result to a file", metavar="PATH"
    )
    common.add_argument(
        "--verbose", action="store_true", help="debug logging on stderr"
    )
    return common


def _pair_arguments(parser: argparse.ArgumentParser, first: str, second: str):
    parser.add_argument(first, type=str, help=f"MatrixFile holding {first}")
    parser.add_argument(second, type=str, help=f"MatrixFile holding {second}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamma-contract",
        description="Analyse commuting matrix pairs against the symmetrized bidisc",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Where does a scalar pair (s, p) sit?
  gamma-contract classify-point 0 0 -1 0

  # Certify a pair of matrices read from MatrixFile documents
  gamma-contract analyze-pair S.yaml P.yaml --strict

  # Check the truncated dilation of a pair
  gamma-contract dilate S.yaml P.yaml --blocks 8 --max-degree 6

  # Reproduce every worked example as a summary table
  gamma-contract repro all --table

  # Sample a real slice of C^2 into a CSV file
  gamma-contract region --grid 101 --slice real --out region.csv
        """,
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    cmd = sub.add_parser(
        "classify-point", parents=[common], help="classify a scalar pair (s, p)"
    )
    for name in ("s_re", "s_im", "p_re", "p_im"):
        cmd.add_argument(name, type=float)

    cmd = sub.add_parser(
        "analyze-pair", parents=[common], help="certify (S, P) as a Γ-contraction"
    )
    _pair_arguments(cmd, "S", "P")
    cmd.add_argument(
        "--strict", action="store_true", help="also run the invertible-defect test"
    )
    cmd.add_argument(
        "--von-neumann",
        action="store_true",
        help="also sample polynomial norms against the distinguished boundary",
    )

    cmd = sub.add_parser(
        "fundamental-op", parents=[common], help="solve for the fundamental operator"
    )
    _pair_arguments(cmd, "S", "P")
    cmd.add_argument(
        "--adjoint", action="store_true", help="also solve for the pair (S*, P*)"
    )

    cmd = sub.add_parser(
        "symmetrize", parents=[common], help="compute (T1 + T2, T1 T2)"
    )
    _pair_arguments(cmd, "T1", "T2")

    cmd = sub.add_parser(
        "decompose", parents=[common], help="split (S, P) on the same space"
    )
    _pair_arguments(cmd, "S", "P")
    cmd.add_argument(
        "--search",
        action="store_true",
        help="also run the seeded Newton search for every factorization",
    )

    cmd = sub.add_parser(
        "embed", parents=[common], help="split (S, P) on the doubled space"
    )
    _pair_arguments(cmd, "S", "P")
    cmd.add_argument(
        "--half",
        action="store_true",
        help="treat (S, P) as a symmetrized half-bidisc pair and return contractions",
    )

    cmd = sub.add_parser(
        "dilate", parents=[common], help="verify the truncated Γ-unitary dilation"
    )
    _pair_arguments(cmd, "S", "P")

    cmd = sub.add_parser("repro", parents=[common], help="reproduce worked examples")
    cmd.add_argument(
        "example", type=str, help=f"one of {', '.join([*EXAMPLES, 'all'])}"
    )
    cmd.add_argument("--table", action="store_true", help="print summary tables")
    cmd.add_argument("--epsilon", type=float, help="scale of the ε example")
    cmd.add_argument("--r", type=float, help="parameter of the r family, in (0, 0.01)")
    cmd.add_argument("--delta", type=float, help="target gap of the δ-chase")
    cmd.add_argument("--z", type=complex, help="scale of the nilpotent factors")
    cmd.add_argument("--trials", type=int, help="factorization search restarts")

    cmd = sub.add_parser(
        "region", parents=[common], help="classify a 2-D grid of scalar pairs"
    )
    cmd.add_argument("--grid", type=int, default=51, help="points per axis")
    cmd.add_argument(
        "--slice",
        type=str,
        default="real",
        help=f"preset ({', '.join(SLICE_PRESETS)}) or axis=lo:hi,axis=lo:hi[,axis=v]",
        metavar="SPEC",
    )
    cmd.add_argument(
        "--half", action="store_true", help="classify against the half-bidisc"
    )
    return parser


def resolve_config(args: argparse.Namespace) -> AnalysisConfig:
    """Loaded (or default) configuration with every given flag applied."""
    config = ConfigLoader(args.config).load() if args.config else AnalysisConfig()
    overrides: Dict[str, Any] = {}

    if args.tol is not None:
        tol = config.tolerances
        overrides["tolerances"] = dataclasses.replace(
            tol, assert_tol=args.tol, rank_cutoff=min(tol.rank_cutoff, args.tol)
        )
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.scan is not None:
        overrides["scan_radial"], overrides["scan_angular"] = args.scan
    if args.blocks is not None:
        overrides["blocks"] = args.blocks
    if args.max_degree is not None:
        overrides["max_degree"] = args.max_degree
    if args.branch_search:
        overrides["branch_search"] = True

    examples: Dict[str, Any] = {}
    for flag, name in (
        ("epsilon", "epsilon"),
        ("r", "r"),
        ("delta", "delta"),
        ("z", "z"),
        ("trials", "search_trials"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            examples[name] = value
    if getattr(args, "trials", None) is not None:
        overrides["search_trials"] = args.trials
    if args.seed is not None:
        examples["seed"] = args.seed
    if examples:
        overrides["examples"] = dataclasses.replace(config.examples, **examples)

    return dataclasses.replace(config, **overrides) if overrides else config


def _load_pair(first: str, second: str, config: AnalysisConfig) -> OperatorPair:
    return OperatorPair(load_matrix(first), load_matrix(second), config.tolerances)


def _emit(documents: Dict[str, Any] | List[Dict[str, Any]], out: str | None):
    exporter = ReportExporter(documents)
    if out:
        exporter.export(out)
    else:
        exporter.write(sys.stdout)


def cmd_classify_point(args, config: AnalysisConfig) -> int:
    pt = PointPair(complex(args.s_re, args.s_im), complex(args.p_re, args.p_im))
    report = classify(pt)
    _emit(report.to_dict(), args.out)
    return 0


def cmd_analyze_pair(args, config: AnalysisConfig) -> int:
    pair = _load_pair(args.S, args.P, config)
    report = is_gamma_contraction(
        pair, config.scan_radial, config.scan_angular, seed=config.seed
    )
    doc: Dict[str, Any] = {
        "command": "analyze-pair",
        "dim": pair.dim,
        "gamma_contraction": report.to_dict(),
        "gamma_unitary": {
            method.value: is_gamma_unitary(pair, method) for method in UnitaryMethod
        },
        "gamma_isometry": is_gamma_isometry(pair),
    }
    if args.strict:
        try:
            value = strict_criterion_value(pair)
            doc["strict"] = {
                "value": value,
                "certified": value <= 1 + config.tolerances.assert_tol,
            }
        except StrictPreconditionFailed as e:
            doc["strict"] = {"value": None, "precondition": str(e)}
    try:
        doc["normality_transfer"] = normality_transfer(pair)
    except PreconditionFailed:
        logger.debug("S = S*P does not hold; normality transfer not applicable")
    if args.von_neumann:
        doc["von_neumann_ratio"] = von_neumann_check(pair, seed=config.seed)
    _emit(doc, args.out)
    return VERDICT_EXIT_CODES[report.overall]


def cmd_fundamental_op(args, config: AnalysisConfig) -> int:
    pair = _load_pair(args.S, args.P, config)
    pairs = [("pair", pair)]
    if args.adjoint:
        pairs.append(("adjoint", pair.adjoint()))
    doc: Dict[str, Any] = {"command": "fundamental-op"}
    for label, target in pairs:
        F = fundamental_operator(target)
        doc[label] = {**F.summary(), "F": matrix_to_document(F.full())}
    _emit(doc, args.out)
    return 0


def cmd_symmetrize(args, config: AnalysisConfig) -> int:
    pair = symmetrize_ops(load_matrix(args.T1), load_matrix(args.T2), config.tolerances)
    _emit(
        {
            "command": "symmetrize",
            "S": matrix_to_document(pair.S),
            "P": matrix_to_document(pair.P),
        },
        args.out,
    )
    return 0


def cmd_decompose(args, config: AnalysisConfig) -> int:
    pair = _load_pair(args.S, args.P, config)
    result = decompose(pair, branch_search=config.branch_search)
    doc: Dict[str, Any] = {"command": "decompose", **result.to_dict()}
    if args.search:
        solutions = factorization_search(
            pair,
            trials=config.search_trials,
            seed=config.seed,
            iterations=config.newton_iterations,
        )
        doc["search"] = {
            "trials": config.search_trials,
            "seed": config.seed,
            "solutions": [
                {"T1": matrix_to_document(T1), "T2": matrix_to_document(T2)}
                for T1, T2 in solutions
            ],
        }
    _emit(doc, args.out)
    return 0 if result.ok else 1


def cmd_embed(args, config: AnalysisConfig) -> int:
    pair = _load_pair(args.S, args.P, config)
    result = half_embedding(pair) if args.half else embed_and_split(pair)
    _emit({"command": "embed", **result.to_dict()}, args.out)
    return 0


def cmd_dilate(args, config: AnalysisConfig) -> int:
    pair = _load_pair(args.S, args.P, config)
    N, degree = config.blocks, config.max_degree
    require_window(N, degree)
    trunc = build_dilation(pair, N)
    residual = compression_residual(trunc, pair, degree)
    tol = config.tolerances.assert_tol
    doc: Dict[str, Any] = {
        "command": "dilate",
        "blocks": N,
        "max_degree": degree,
        "defect_dims": [trunc.dim_defect, trunc.dim_defect_star],
        "window_dim": int(trunc.T0.shape[0]),
        "compression_residual": residual,
    }
    passed = residual <= tol
    if N >= 3:
        central = central_gamma_unitary_check(trunc)
        doc["central_check"] = central.to_dict()
        passed = passed and central.max_violation <= tol
    doc["passed"] = passed
    _emit(doc, args.out)
    return 0 if passed else 1


def cmd_repro(args, config: AnalysisConfig) -> int:
    reports = run_example(args.example, config.examples)
    if args.table and args.out:
        with open(args.out, "w") as f:
            ReproReporter(reports, f).print_report()
        logger.info("Wrote reproduction tables to %s", args.out)
    elif args.table:
        ReproReporter(reports).print_report()
    else:
        _emit([report.to_dict() for report in reports], args.out)
    return 0 if all(report.passed for report in reports) else 1


def cmd_region(args, config: AnalysisConfig) -> int:
    region_slice = RegionSlice.parse(args.slice)
    samples = [
        (pt, region_label(pt, half=args.half)) for pt in region_slice.points(args.grid)
    ]
    exporter = RegionCSVExporter(samples)
    if args.out:
        exporter.export(args.out)
    else:
        exporter.write(sys.stdout)
    return 0


COMMANDS = {
    "classify-point": cmd_classify_point,
    "analyze-pair": cmd_analyze_pair,
    "fundamental-op": cmd_fundamental_op,
    "symmetrize": cmd_symmetrize,
    "decompose": cmd_decompose,
    "embed": cmd_embed,
    "dilate": cmd_dilate,
    "repro": cmd_repro,
    "region": cmd_region,
}


def main(argv: List[str] | None = None):
    """Main entry point for the CLI."""
    args = build_parser().parse_args(argv)

    if args.verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )

    try:
        config = resolve_config(args)
        logger.debug("Running %s", args.command)
        sys.exit(COMMANDS[args.command](args, config))

    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(2)

    except MatrixFileError as e:
        print(f"Matrix File Error: {e}", file=sys.stderr)
        print(
            "\n Tip: a MatrixFile holds rows, cols and data as [re, im] pairs.",
            file=sys.stderr,
        )
        sys.exit(2)

    except ConfigurationError as e:
        print(f"Configuration Error: {e}", file=sys.stderr)
        sys.exit(2)

    except NotCommuting as e:
        print(f"Commutation Error: {e}", file=sys.stderr)
        sys.exit(3)

    except (UnknownExample, SliceSpecError, DegreeTooHigh, TruncationTooSmall) as e:
        print(f"Argument Error: {e}", file=sys.stderr)
        sys.exit(2)

    except (NotGammaContraction, NormBoundViolated, PairAnalysisError) as e:
        print(f"Analysis Error: {e}", file=sys.stderr)
        sys.exit(1)

    except LinalgError as e:
        print(f"Linear Algebra Error: {e}", file=sys.stderr)
        sys.exit(1)

    except ValueError as e:
        print(f"Validation Error: {e}", file=sys.stderr)
        sys.exit(2)

    except Exception as e:
        print(f"Unexpected Error: {e}", file=sys.stderr)
        import traceback

        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
