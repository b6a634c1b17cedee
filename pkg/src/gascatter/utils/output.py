"""
Output Writers

CSV, text-report and netCDF writers. Every output starts with the run
manifest; data rows use 17 significant digits and ``\\n`` line endings so
identical manifests give byte-identical files.
"""

import sys
import csv
import logging
from pathlib import Path
from contextlib import contextmanager
from typing import IO, Iterable, Iterator, Optional, Sequence

import xarray as xr

from gascatter.utils.manifest import RunManifest, format_number

logger = logging.getLogger(__name__)

STDOUT = '-'


@contextmanager
def open_output(path: Optional[Path | str]) -> Iterator[IO[str]]:
    """
    Open an output path for writing; ``-`` or None selects stdout.

    Stdout is flushed but never closed.
    """
    if path is None or str(path) == STDOUT:
        yield sys.stdout
        sys.stdout.flush()
        return

    with open(path, 'w', encoding='utf-8', newline='') as handle:
        yield handle
    logger.info(f"Wrote {path}")


def write_csv(
    stream: IO[str],
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
    manifest: Optional[RunManifest] = None,
) -> int:
    """
    Write a manifest header, a column header and numeric rows.

    Returns
    -------
    int
        Number of data rows written
    """
    if manifest is not None:
        for line in manifest.header_lines():
            stream.write(line + '\n')

    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_number(value) for value in row])
        count += 1
    return count


def write_report(
    stream: IO[str],
    lines: Iterable[str],
    manifest: Optional[RunManifest] = None,
) -> None:
    """Write a text report, preceded by the manifest header."""
    if manifest is not None:
        for line in manifest.header_lines():
            stream.write(line + '\n')
    for line in lines:
        stream.write(line + '\n')


def write_netcdf(ds: xr.Dataset, path: Path | str, manifest: Optional[RunManifest] = None) -> None:
    """Write a spectrum dataset to netCDF with the manifest as global attributes."""
    if manifest is not None:
        ds = ds.assign_attrs(manifest.attrs())
    ds.to_netcdf(path, engine='netcdf4')
    logger.info(f"Wrote netCDF dataset {path}")
