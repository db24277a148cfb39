"""Command-line interface for loopfinder."""

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import RunConfig, create_default_config, default_config_path, load_config
from .database import ResultStore
from .depgraph import build_graph
from .models import TRS, LoopCriterion, Strategy, TRSParseError
from .parser import read_trs_file
from .prover import LoopProver, Verdict, VerdictKind
from .terms import NameAllocator, format_position, format_rule, format_substitution
from .terms import format_term

logger = logging.getLogger(__name__)

EXIT_CODES = {
    VerdictKind.NO: 0,
    VerdictKind.DONT_KNOW: 1,
    VerdictKind.TIMEOUT: 2,
}
EXIT_INPUT_ERROR = 3


@dataclass
class ProofResult:
    """Outcome of analysing one file: a verdict or an error message."""

    file: Path
    verdict: Optional[Verdict] = None
    error: Optional[str] = None
    trs: Optional[TRS] = None
    graph: Optional[str] = None

    @property
    def label(self) -> str:
        """Return the verdict token, or ERROR."""
        return self.verdict.kind.value if self.verdict is not None else "ERROR"


class LoopFinderCLI:
    """Command-line interface for loopfinder."""

    def __init__(
        self,
        config: Optional[RunConfig] = None,
        record: bool = False,
        dump_graph: bool = False,
        db_path: Optional[Path] = None,
    ) -> None:
        """Initialize the CLI.

        Args:
            config: Run settings
            record: Store every verdict in the results database
            dump_graph: Print the dependency graph of each analysed TRS
            db_path: Results database location (default ~/.loopfinder/results.db)
        """
        self.config = config or RunConfig()
        self.record = record
        self.dump_graph = dump_graph
        self.db_path = db_path

    def _prover(self) -> LoopProver:
        return LoopProver(
            strategy=self.config.strategy,
            budget=self.config.budget(),
            verify_bounds=self.config.verify_bounds(),
            criterion=self.config.criterion,
            limits=self.config.cycle_limits(),
        )

    def analyze(self, path: Path) -> ProofResult:
        """Parse and prove one file, turning input problems into an error result."""
        result = ProofResult(path)
        try:
            result.trs = read_trs_file(path)
            if self.dump_graph:
                result.graph = build_graph(result.trs).dump()
            result.verdict = self._prover().prove(result.trs)
        except (FileNotFoundError, TRSParseError, ValueError) as e:
            result.error = str(e)
        except Exception as e:
            logger.error(f"Failed to analyse {path}: {e}", exc_info=True)
            result.error = f"internal error: {e}"
        return result

    def prove(self, path: Path) -> int:
        """Analyse a .trs file, or every .trs file below a directory.

        Returns:
            Exit code: 0 for NO, 1 for DON'T KNOW, 2 for TIMEOUT, 3 for an
            input error; for a directory, 3 if any file failed, else 0
        """
        if os.environ.get("LOOPFINDER_SEED") is not None:
            logger.debug("LOOPFINDER_SEED is set but the prover uses no randomness")
        if path.is_dir():
            return self._prove_batch(path)

        result = self.analyze(path)
        self._record([result])
        if self.config.output_format == "json":
            print(json.dumps(self.to_json(result)))
        else:
            print("\n".join(self.render_plain(result)))
        if result.graph is not None:
            print(result.graph, file=sys.stderr)
        if result.verdict is None:
            return EXIT_INPUT_ERROR
        return EXIT_CODES[result.verdict.kind]

    def _prove_batch(self, directory: Path) -> int:
        files = sorted(directory.rglob("*.trs"))
        logger.info(f"Analysing {len(files)} file(s) with {self.config.jobs} job(s)")
        with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
            results = list(pool.map(self.analyze, files))
        self._record(results)

        if self.config.output_format == "json":
            for result in results:
                print(json.dumps(self.to_json(result)))
            print(json.dumps({"summary": self.summarize(results)}))
        else:
            for result in results:
                line = f"{result.label}  {result.file}"
                if result.error is not None:
                    line += f": {result.error}"
                print(line)
            print()
            print("\n".join(self.render_summary(results)))
        for result in results:
            if result.graph is not None:
                print(f"{result.file}:\n{result.graph}", file=sys.stderr)
        return EXIT_INPUT_ERROR if any(r.verdict is None for r in results) else 0

    def _record(self, results: list) -> None:
        if not self.record:
            return
        with ResultStore(self.db_path) as store:
            for result in results:
                if result.verdict is not None:
                    store.record(
                        str(result.file),
                        result.verdict,
                        self.config.strategy,
                        self.config.criterion,
                    )

    def summarize(self, results: list) -> dict:
        """Count verdicts and total the effort over a batch."""
        counts = {kind.value: 0 for kind in VerdictKind}
        counts["ERROR"] = 0
        generated = 0
        elapsed = 0.0
        for result in results:
            counts[result.label] += 1
            if result.verdict is not None:
                generated += result.verdict.stats.generated
                elapsed += result.verdict.stats.elapsed
        summary = {
            "strategy": self.config.strategy.value,
            "files": len(results),
            "counts": counts,
            "generated": generated,
        }
        if self.config.show_timing:
            summary["elapsed"] = round(elapsed, 3)
        return summary

    def render_summary(self, results: list) -> list:
        """Render the batch summary table."""
        summary = self.summarize(results)
        lines = [f"Summary (strategy {summary['strategy']}, {summary['files']} files)"]
        for label, count in summary["counts"].items():
            lines.append(f"  {label:<12}{count:>8}")
        lines.append(f"  {'generated':<12}{summary['generated']:>8}")
        if "elapsed" in summary:
            lines.append(f"  {'time':<12}{summary['elapsed']:>7.2f}s")
        return lines

    def _names(self, result: ProofResult) -> NameAllocator:
        reserved = {s.name for s in result.trs.signature} if result.trs else set()
        allocator = NameAllocator(reserved=reserved)
        witness = result.verdict.witness
        rule = witness.compressed_rule
        allocator.names_for(witness.witness_term, rule.lhs, rule.rhs)
        for theta in (witness.theta1, witness.theta2):
            for v, t in theta.items():
                allocator.names_for(v, t)
        return allocator

    def render_plain(self, result: ProofResult) -> list:
        """Render a single-file result; the first line is the verdict."""
        if result.verdict is None:
            return [f"ERROR: {result.file}: {result.error}"]
        verdict = result.verdict
        lines = [verdict.kind.value]
        if verdict.witness is not None:
            witness = verdict.witness
            names = self._names(result).names
            lines += [
                f"witness: {format_term(witness.witness_term, names)}",
                f"theta1: {format_substitution(witness.theta1, names)}",
                f"theta2: {format_substitution(witness.theta2, names)}",
                f"compressed rule: {format_rule(witness.compressed_rule, names)}",
            ]
        lines += [
            f"iterations: {verdict.stats.iterations}",
            f"generated loops: {verdict.stats.generated}",
        ]
        if self.config.show_timing:
            lines.append(f"elapsed: {verdict.stats.elapsed:.3f}s")
        if verdict.witness is not None:
            trace = verdict.witness.verification
            if trace is None:
                lines.append("UNVERIFIED")
            else:
                lines.append("certificate:")
                current = trace.start
                for p, number, term in trace.steps:
                    lines.append(
                        f"  {format_term(current, names)}  "
                        f"--[rule {number} @ {format_position(p)}]-->  "
                        f"{format_term(term, names)}"
                    )
                    current = term
                lines.append(
                    f"  closing at {format_position(trace.closing_position)} "
                    f"with {format_substitution(trace.closing_substitution, names)}"
                )
        return lines

    def to_json(self, result: ProofResult) -> dict:
        """Return the data of plain output as a JSON-compatible object."""
        if result.verdict is None:
            return {"file": str(result.file), "verdict": "ERROR", "error": result.error}
        verdict = result.verdict
        data = {
            "file": str(result.file),
            "verdict": verdict.kind.value,
            "iterations": verdict.stats.iterations,
            "generated": verdict.stats.generated,
        }
        if self.config.show_timing:
            data["elapsed"] = round(verdict.stats.elapsed, 6)
        if verdict.witness is not None:
            witness = verdict.witness
            names = self._names(result).names
            data.update(
                witness=format_term(witness.witness_term, names),
                theta1=format_substitution(witness.theta1, names),
                theta2=format_substitution(witness.theta2, names),
                compressed_rule=format_rule(witness.compressed_rule, names),
                verified=witness.verified,
            )
            trace = witness.verification
            if trace is not None:
                data["certificate"] = {
                    "start": format_term(trace.start, names),
                    "steps": [
                        {
                            "position": format_position(p),
                            "rule": number,
                            "term": format_term(term, names),
                        }
                        for p, number, term in trace.steps
                    ],
                    "closing_position": format_position(trace.closing_position),
                    "closing_substitution": format_substitution(
                        trace.closing_substitution, names
                    ),
                }
        return data

    def history(
        self,
        strategy: Optional[Strategy] = None,
        criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
    ) -> int:
        """Print per-strategy summaries of the results recorded with one criterion.

        Returns:
            Exit code (0 for success, non-zero for failure)
        """
        with ResultStore(self.db_path) as store:
            strategies = [strategy] if strategy else store.strategies(criterion)
            if not strategies:
                print("No recorded results.")
                return 0
            print(
                f"{'strategy':<10}{'NO':>8}{'DONT_KNOW':>11}{'TIMEOUT':>9}"
                f"{'generated':>11}{'time':>10}"
            )
            for s in strategies:
                summary = store.summary(s, criterion)
                print(
                    f"{summary.strategy:<10}{summary.no:>8}{summary.dont_know:>11}"
                    f"{summary.timeout:>9}{summary.generated:>11}"
                    f"{summary.elapsed:>9.2f}s"
                )
        return 0

    def compare(
        self,
        a: Strategy,
        b: Strategy,
        criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
    ) -> int:
        """Print which files two strategies answered NO with one criterion.

        Returns:
            Exit code (0 for success, non-zero for failure)
        """
        with ResultStore(self.db_path) as store:
            comparison = store.compare(a, b, criterion)
        rows = (
            (f"NO({a.value}) & NO({b.value})", comparison.both),
            (f"NO({a.value}) \\ NO({b.value})", comparison.only_a),
            (f"NO({b.value}) \\ NO({a.value})", comparison.only_b),
        )
        for title, files in rows:
            print(f"{title}: {len(files)}")
            for file in files:
                print(f"  {file}")
        return 0

    def config_init(self, config_path: Optional[Path] = None) -> int:
        """Create the default configuration file.

        Returns:
            Exit code (0 for success, non-zero for failure)
        """
        try:
            path = create_default_config(config_path)
        except OSError as e:
            print(f"ERROR: {e}")
            return 1
        print(f"✓ Configuration file: {path}")
        return 0


def _run_config(args: argparse.Namespace) -> RunConfig:
    """Combine the configuration file with command-line overrides.

    Raises:
        FileNotFoundError: If an explicitly given configuration file is missing
        ValueError: If a setting is invalid
    """
    if args.config is not None:
        config = load_config(args.config)
    elif default_config_path().exists():
        config = load_config()
    else:
        config = RunConfig()

    overrides = {
        "strategy": args.strategy,
        "timeout": args.timeout,
        "max_iterations": args.max_iterations,
        "max_generated": args.max_generated,
        "max_cycles": args.max_cycles,
        "max_cycle_len": args.max_cycle_len,
        "verify_depth": args.verify_depth,
        "verify_nodes": args.verify_nodes,
        "output_format": args.format,
        "criterion": args.criterion,
        "jobs": args.jobs,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.hide_time:
        overrides["show_timing"] = False
    return dataclasses.replace(config, input_path=args.path, **overrides)


def main() -> int:
    """Main entry point for loopfinder CLI.

    Returns:
        Exit code
    """
    parser = argparse.ArgumentParser(
        description="loopfinder - Find loops in term rewrite systems"
    )
    parser.add_argument(
        "--log-level",
        dest="log_level",
        choices=["debug", "info", "warning", "error", "critical"],
        default="warning",
        help="Set the logging level (default: warning)",
    )
    parser.add_argument(
        "--verbose", action="store_true", help="Shorthand for --log-level debug"
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    prove_parser = subparsers.add_parser(
        "prove", help="Search a .trs file (or a directory of them) for loops"
    )
    prove_parser.add_argument("path", type=Path, help="TRS file or directory")
    prove_parser.add_argument(
        "--strategy", choices=[s.value for s in Strategy], help="Selection strategy"
    )
    prove_parser.add_argument("--timeout", type=float, help="Time limit in seconds")
    prove_parser.add_argument("--max-iterations", type=int, dest="max_iterations")
    prove_parser.add_argument("--max-generated", type=int, dest="max_generated")
    prove_parser.add_argument(
        "--max-cycles", type=int, dest="max_cycles", help="Simple cycles to start from"
    )
    prove_parser.add_argument(
        "--max-cycle-len", type=int, dest="max_cycle_len", help="Longest simple cycle"
    )
    prove_parser.add_argument("--verify-depth", type=int, dest="verify_depth")
    prove_parser.add_argument("--verify-nodes", type=int, dest="verify_nodes")
    prove_parser.add_argument("--format", choices=["plain", "json"])
    prove_parser.add_argument(
        "--criterion", choices=[c.value for c in LoopCriterion]
    )
    prove_parser.add_argument("--jobs", type=int, help="Files analysed in parallel")
    prove_parser.add_argument(
        "--dump-graph",
        action="store_true",
        help="Print the dependency graph to stderr",
    )
    prove_parser.add_argument(
        "--record", action="store_true", help="Store verdicts in the results database"
    )
    prove_parser.add_argument("--config", type=Path, help="Configuration file")
    prove_parser.add_argument(
        "--hide-time", action="store_true", help="Omit elapsed times from the output"
    )
    prove_parser.add_argument("--db", type=Path, help="Results database")

    history_parser = subparsers.add_parser(
        "history", help="Summarize recorded verdicts per strategy"
    )
    history_parser.add_argument("--strategy", choices=[s.value for s in Strategy])
    history_parser.add_argument(
        "--criterion",
        choices=[c.value for c in LoopCriterion],
        default=LoopCriterion.SEMI_UNIFICATION.value,
    )
    history_parser.add_argument("--db", type=Path, help="Results database")

    compare_parser = subparsers.add_parser(
        "compare", help="Compare the NO answers of two strategies"
    )
    compare_parser.add_argument("a", choices=[s.value for s in Strategy])
    compare_parser.add_argument("b", choices=[s.value for s in Strategy])
    compare_parser.add_argument(
        "--criterion",
        choices=[c.value for c in LoopCriterion],
        default=LoopCriterion.SEMI_UNIFICATION.value,
    )
    compare_parser.add_argument("--db", type=Path, help="Results database")

    config_parser = subparsers.add_parser("config", help="Configuration commands")
    config_subparsers = config_parser.add_subparsers(
        dest="config_command", help="Configuration command"
    )
    init_parser = config_subparsers.add_parser(
        "init", help="Write the default configuration file"
    )
    init_parser.add_argument("--path", type=Path, help="Configuration file")

    args = parser.parse_args()

    level = "debug" if args.verbose else args.log_level
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    if not args.command:
        parser.print_help()
        return 1

    if args.command == "prove":
        try:
            config = _run_config(args)
        except (FileNotFoundError, ValueError) as e:
            print(f"ERROR: {args.path}: {e}")
            return EXIT_INPUT_ERROR
        cli = LoopFinderCLI(config, args.record, args.dump_graph, args.db)
        return cli.prove(args.path)
    elif args.command == "history":
        strategy = Strategy.from_name(args.strategy) if args.strategy else None
        criterion = LoopCriterion.from_name(args.criterion)
        return LoopFinderCLI(db_path=args.db).history(strategy, criterion)
    elif args.command == "compare":
        cli = LoopFinderCLI(db_path=args.db)
        return cli.compare(
            Strategy.from_name(args.a),
            Strategy.from_name(args.b),
            LoopCriterion.from_name(args.criterion),
        )
    elif args.command == "config":
        if args.config_command == "init":
            return LoopFinderCLI().config_init(args.path)
        config_parser.print_help()
        return 1
    else:
        parser.print_help()
        return 1


if __name__ == "__main__":
    sys.exit(main())
