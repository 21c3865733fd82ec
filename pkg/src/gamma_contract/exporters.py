"""
Export strategies for analysis results.

This module implements the Strategy Pattern for writing results: structured
YAML report documents and the region-sampling CSV. Each exporter writes to
any text stream, or to a file through ``export``.
"""

import csv
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, List, TextIO, Tuple

import yaml

from .models import PointPair, Region, encode

logger = logging.getLogger(__name__)


class ExportStrategy(ABC):
    """Abstract base class for result export strategies.

    Subclasses implement ``write`` for one output format; ``export`` wraps it
    for a file path.
    """

    @abstractmethod
    def write(self, stream: TextIO) -> None:
        """Write the payload to an open text stream.

        Args:
            stream: Destination stream (a file or standard output)
        """
        pass

    def export(self, filepath: str) -> None:
        """Export the payload to the specified file.

        Args:
            filepath: Path to the output file
        """
        with open(filepath, "w", newline="") as f:
            self.write(f)
        logger.info("Exported %s to %s", type(self).__name__, filepath)


class ReportExporter(ExportStrategy):
    """Writes one or more report documents as YAML with a stable field order.

    A single document is written as-is; several documents are written as a
    multi-document stream separated by ``---``.
    """

    def __init__(self, documents: Dict[str, Any] | List[Dict[str, Any]]):
        """Initialize the report exporter.

        Args:
            documents: A report document, or a list of them
        """
        if isinstance(documents, dict):
            documents = [documents]
        self.documents = [encode(doc) for doc in documents]

    def write(self, stream: TextIO) -> None:
        if len(self.documents) == 1:
            yaml.safe_dump(
                self.documents[0], stream, sort_keys=False, allow_unicode=True
            )
        else:
            yaml.safe_dump_all(
                self.documents, stream, sort_keys=False, allow_unicode=True
            )


class RegionCSVExporter(ExportStrategy):
    """Exports region samples as CSV.

    Output format: s_re, s_im, p_re, p_im, region
    One row per grid point, in the order the samples were produced.
    """

    FIELDS = ["s_re", "s_im", "p_re", "p_im", "region"]

    def __init__(self, samples: Iterable[Tuple[PointPair, Region]]):
        """Initialize the region CSV exporter.

        Args:
            samples: (point, region) pairs in output order
        """
        self.samples = list(samples)

    def write(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.FIELDS)
        for pt, region in self.samples:
            writer.writerow(
                [
                    repr(float(pt.s.real)),
                    repr(float(pt.s.imag)),
                    repr(float(pt.p.real)),
                    repr(float(pt.p.imag)),
                    Region(region).value,
                ]
            )
