"""Storage of prover results for comparing strategies across runs."""

import logging
import sqlite3
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Optional

from .models import LoopCriterion, Strategy
from .prover import Verdict, VerdictKind
from .terms import NameAllocator, format_term

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StoredResult:
    """One recorded analysis of a file."""

    file: str
    strategy: str
    criterion: str
    verdict: str
    witness: Optional[str]
    iterations: int
    generated: int
    elapsed: float
    verified: bool
    recorded_at: Optional[datetime] = None


@dataclass
class StrategySummary:
    """Verdict counts and totals for one strategy."""

    strategy: str
    no: int = 0
    dont_know: int = 0
    timeout: int = 0
    generated: int = 0
    elapsed: float = 0.0
    criterion: str = LoopCriterion.SEMI_UNIFICATION.value

    @property
    def total(self) -> int:
        """Return the number of analysed files."""
        return self.no + self.dont_know + self.timeout


@dataclass
class StrategyComparison:
    """Files answered NO by two strategies: by both, or by only one of them."""

    strategy_a: str
    strategy_b: str
    both: list = field(default_factory=list)
    only_a: list = field(default_factory=list)
    only_b: list = field(default_factory=list)
    criterion: str = LoopCriterion.SEMI_UNIFICATION.value


class ResultStore:
    """SQLite store of prover results."""

    def __init__(self, db_path: Optional[Path] = None) -> None:
        """Initialize the store.

        Args:
            db_path: Path to the database file. If None, uses default location
                     (~/.loopfinder/results.db)
        """
        if db_path is None:
            db_dir = Path.home() / ".loopfinder"
            db_dir.mkdir(mode=0o700, exist_ok=True)
            db_path = db_dir / "results.db"

        self.db_path = db_path
        self._connection: Optional[sqlite3.Connection] = None

    def connect(self) -> sqlite3.Connection:
        """Get or create database connection.

        Returns:
            SQLite connection object
        """
        if self._connection is None:
            self._connection = sqlite3.connect(
                str(self.db_path), check_same_thread=False
            )
            self._connection.row_factory = sqlite3.Row
            self._initialize_schema()
        return self._connection

    def close(self) -> None:
        """Close the database connection."""
        if self._connection is not None:
            self._connection.close()
            self._connection = None

    def _initialize_schema(self) -> None:
        """Initialize database schema if it doesn't exist."""
        conn = self.connect()
        conn.execute(
            """
            CREATE TABLE IF NOT EXISTS results (
                file TEXT NOT NULL,
                strategy TEXT NOT NULL,
                criterion TEXT NOT NULL,
                verdict TEXT NOT NULL,
                witness TEXT,
                iterations INTEGER NOT NULL DEFAULT 0,
                generated INTEGER NOT NULL DEFAULT 0,
                elapsed REAL NOT NULL DEFAULT 0,
                verified INTEGER NOT NULL DEFAULT 0,
                recorded_at TEXT,
                PRIMARY KEY (file, strategy, criterion)
            )
        """
        )
        conn.commit()

    def record(
        self,
        file: str,
        verdict: Verdict,
        strategy: Strategy,
        criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
    ) -> None:
        """Store the verdict for a file, replacing an earlier one for the same settings.

        Args:
            file: Path of the analysed file
            verdict: Prover verdict
            strategy: Strategy used
            criterion: Loop criterion used
        """
        witness = None
        verified = False
        if verdict.witness is not None:
            names = NameAllocator().names_for(verdict.witness.witness_term)
            witness = format_term(verdict.witness.witness_term, names)
            verified = verdict.witness.verified

        conn = self.connect()
        conn.execute(
            """
            INSERT OR REPLACE INTO results
                (file, strategy, criterion, verdict, witness, iterations,
                 generated, elapsed, verified, recorded_at)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        """,
            (
                str(file),
                strategy.value,
                criterion.value,
                verdict.kind.value,
                witness,
                verdict.stats.iterations,
                verdict.stats.generated,
                verdict.stats.elapsed,
                int(verified),
                datetime.now().isoformat(),
            ),
        )
        conn.commit()
        logger.debug(f"Recorded {verdict.kind.value} for {file} ({strategy.value})")

    def get_results(
        self,
        strategy: Optional[Strategy] = None,
        criterion: Optional[LoopCriterion] = None,
    ) -> list:
        """Return stored results ordered by file, strategy and criterion.

        Args:
            strategy: Only results of this strategy (None for all)
            criterion: Only results of this loop criterion (None for all)

        Returns:
            List of StoredResult objects
        """
        conditions = []
        params = []
        if strategy is not None:
            conditions.append("strategy = ?")
            params.append(strategy.value)
        if criterion is not None:
            conditions.append("criterion = ?")
            params.append(criterion.value)
        where = f"WHERE {' AND '.join(conditions)} " if conditions else ""
        rows = self.connect().execute(
            f"SELECT * FROM results {where}ORDER BY file, strategy, criterion",
            params,
        )
        return [self._to_result(row) for row in rows.fetchall()]

    @staticmethod
    def _to_result(row: sqlite3.Row) -> StoredResult:
        recorded_at = None
        if row["recorded_at"]:
            try:
                recorded_at = datetime.fromisoformat(row["recorded_at"])
            except (ValueError, TypeError):
                recorded_at = None
        return StoredResult(
            file=row["file"],
            strategy=row["strategy"],
            criterion=row["criterion"],
            verdict=row["verdict"],
            witness=row["witness"],
            iterations=int(row["iterations"]),
            generated=int(row["generated"]),
            elapsed=float(row["elapsed"]),
            verified=bool(row["verified"]),
            recorded_at=recorded_at,
        )

    def strategies(self, criterion: Optional[LoopCriterion] = None) -> list:
        """Return the strategies with stored results, sorted by name."""
        if criterion is None:
            rows = self.connect().execute(
                "SELECT DISTINCT strategy FROM results ORDER BY strategy"
            )
        else:
            rows = self.connect().execute(
                "SELECT DISTINCT strategy FROM results WHERE criterion = ? "
                "ORDER BY strategy",
                (criterion.value,),
            )
        return [Strategy.from_name(row["strategy"]) for row in rows.fetchall()]

    def summary(
        self,
        strategy: Strategy,
        criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
    ) -> StrategySummary:
        """Count the verdicts and total the effort recorded for a strategy.

        Only results obtained with the given loop criterion are counted, so
        every file contributes at most once.
        """
        summary = StrategySummary(strategy.value, criterion=criterion.value)
        for result in self.get_results(strategy, criterion):
            if result.verdict == VerdictKind.NO.value:
                summary.no += 1
            elif result.verdict == VerdictKind.DONT_KNOW.value:
                summary.dont_know += 1
            else:
                summary.timeout += 1
            summary.generated += result.generated
            summary.elapsed += result.elapsed
        return summary

    def compare(
        self,
        a: Strategy,
        b: Strategy,
        criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
    ) -> StrategyComparison:
        """Compare the files answered NO under two strategies with one criterion."""
        no_a = self._no_files(a, criterion)
        no_b = self._no_files(b, criterion)
        return StrategyComparison(
            a.value,
            b.value,
            both=sorted(no_a & no_b),
            only_a=sorted(no_a - no_b),
            only_b=sorted(no_b - no_a),
            criterion=criterion.value,
        )

    def _no_files(self, strategy: Strategy, criterion: LoopCriterion) -> set:
        return {
            r.file
            for r in self.get_results(strategy, criterion)
            if r.verdict == VerdictKind.NO.value
        }

    def __enter__(self) -> "ResultStore":
        """Context manager entry."""
        self.connect()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:  # type: ignore
        """Context manager exit."""
        self.close()
