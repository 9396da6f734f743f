#!/usr/bin/env python3
"""Fetch the three UCI benchmark datasets into the data directory.

The library itself never downloads anything; this script documents the
source URLs and places the files where the builtin scenarios expect them:

    adult.data                UCI adult (census income), no header row
    processed.cleveland.data  UCI heart disease (processed Cleveland subset)
    student-mat.csv           UCI student performance (math course), inside
                              student.zip, semicolon-separated

Usage:
    python scripts/fetch_datasets.py [--data-dir data]

Requires outbound network access to archive.ics.uci.edu.
"""

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

UCI_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

FLAT_FILES = {
    "adult.data": f"{UCI_BASE}/adult/adult.data",
    "processed.cleveland.data": f"{UCI_BASE}/heart-disease/processed.cleveland.data",
}

STUDENT_ZIP = f"{UCI_BASE}/00320/student.zip"
STUDENT_MEMBER = "student-mat.csv"


def fetch(url: str) -> bytes:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="data")
    args = parser.parse_args(argv)
    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)

    for name, url in FLAT_FILES.items():
        target = data_dir / name
        if target.exists():
            print(f"{target} already present, skipping")
            continue
        target.write_bytes(fetch(url))
        print(f"wrote {target}")

    student_target = data_dir / STUDENT_MEMBER
    if student_target.exists():
        print(f"{student_target} already present, skipping")
    else:
        archive = zipfile.ZipFile(io.BytesIO(fetch(STUDENT_ZIP)))
        student_target.write_bytes(archive.read(STUDENT_MEMBER))
        print(f"wrote {student_target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
