"""
Tabular summaries of reproduced examples.
"""

import pandas as pd
from typing import List, TextIO

from .models import ReproReport


class ReproReporter:
    """Formats and displays reproduction results as tables."""

    def __init__(self, reports: List[ReproReport], stream: TextIO | None = None):
        self.reports = reports
        self.stream = stream

    def print_report(self) -> None:
        """Print the overview table, then one assertion table per example."""
        self._print_summary()
        for report in self.reports:
            self._print_assertions(report)

    def _print_title(self, title: str) -> None:
        print("=" * 80, file=self.stream)
        print(title, file=self.stream)
        print("=" * 80, file=self.stream)

    def summary_frame(self) -> pd.DataFrame:
        """One row per example: pass state and assertion counts."""
        data = []
        for report in self.reports:
            failed = [label for label, ok in report.assertions.items() if not ok]
            data.append(
                {
                    "Example": report.name,
                    "Passed": report.passed,
                    "Assertions": len(report.assertions),
                    "Failed": len(failed),
                    "Notes": len(report.informational),
                }
            )
        return pd.DataFrame(
            data, columns=["Example", "Passed", "Assertions", "Failed", "Notes"]
        ).set_index("Example")

    def _print_summary(self) -> None:
        self._print_title("REPRODUCTION SUMMARY")
        print(self.summary_frame().to_string(), file=self.stream)
        total = len(self.reports)
        passed = sum(report.passed for report in self.reports)
        print(f"\n{passed} of {total} example(s) passed", file=self.stream)
        print(file=self.stream)

    def _print_assertions(self, report: ReproReport) -> None:
        self._print_title(f"EXAMPLE {report.name}")

        if report.assertions:
            df = pd.DataFrame(
                [
                    {"Claim": label, "Result": "pass" if ok else "FAIL"}
                    for label, ok in report.assertions.items()
                ]
            ).set_index("Claim")
            print(df.to_string(), file=self.stream)
        else:
            print("\n  No assertions recorded", file=self.stream)

        for note in report.informational:
            print(f"  • {note}", file=self.stream)
        print(file=self.stream)
