#!/usr/bin/env python3
"""
Census cache and CSV export.

The cache is an append-only JSON-lines file with one record per classified
form: {"form", "disc", "class_rep", "flags", "height", "version"}. A census
row is taken from the cache only when every one of its forms has a record
under the current key.
"""

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Tuple

from errors import CacheError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheKey:
    """Identifies the census a record belongs to."""
    degree: int
    height: int
    flags: str
    version: str


@dataclass
class CacheStats:
    """Counters of one cache load."""
    records_read: int = 0
    records_matched: int = 0
    malformed_lines: int = 0


class CensusCache:
    """Append-only JSONL store of form -> class representative assignments."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.stats = CacheStats()

    def load(self, key: CacheKey) -> Dict[str, Tuple[str, str]]:
        """Map encoded form -> (discriminant, class representative) for records under key."""
        assignments: Dict[str, Tuple[str, str]] = {}
        self.stats = CacheStats()
        if not self.path.exists():
            return assignments

        with open(self.path, 'r', encoding='utf-8') as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                self.stats.records_read += 1
                try:
                    record = json.loads(line)
                    form = record["form"]
                    matches = (
                        record["flags"] == key.flags
                        and record["version"] == key.version
                        and int(record["height"]) == key.height
                        and int(form.split(":", 1)[0]) == key.degree
                    )
                except (ValueError, KeyError, TypeError, AttributeError) as e:
                    # A torn trailing line from an interrupted run is expected
                    self.stats.malformed_lines += 1
                    logger.warning(f"Skipping malformed cache line {line_number} in {self.path}: {e}")
                    continue
                if matches:
                    assignments[form] = (record["disc"], record["class_rep"])
                    self.stats.records_matched += 1

        logger.info(f"Loaded {self.stats.records_matched} cached assignments from {self.path}")
        return assignments

    def append(self, key: CacheKey, records: Iterable[Tuple[str, int, str]]):
        """Append (form, discriminant, class representative) records."""
        lines = [
            json.dumps({
                "form": form,
                "disc": str(disc),
                "class_rep": rep,
                "flags": key.flags,
                "height": key.height,
                "version": key.version,
            }, sort_keys=True)
            for form, disc, rep in records
        ]
        if not lines:
            return
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, 'a', encoding='utf-8') as handle:
                handle.write("\n".join(lines) + "\n")
        except OSError as e:
            raise CacheError(f"cannot append to census cache {self.path}: {e}") from e


def export_csv(rows: List[Dict], file_path: str):
    """Write census rows (disc, form_count, class_count, representatives) to CSV."""
    fieldnames = ['discriminant', 'form_count', 'class_count', 'representatives']
    with open(file_path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({
                'discriminant': str(row['discriminant']),
                'form_count': row['form_count'],
                'class_count': row['class_count'],
                'representatives': ' '.join(row['representatives']),
            })
    logger.info(f"Wrote {len(rows)} census rows to {file_path}")


def read_csv(file_path: str) -> List[Dict]:
    """Read rows written by export_csv back."""
    with open(file_path, 'r', newline='', encoding='utf-8') as handle:
        return [
            {
                'discriminant': int(row['discriminant']),
                'form_count': int(row['form_count']),
                'class_count': int(row['class_count']),
                'representatives': row['representatives'].split(),
            }
            for row in csv.DictReader(handle)
        ]
