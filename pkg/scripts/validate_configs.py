#!/usr/bin/env python3
"""
Validate that parameter files are:
- Valid UTF-8 (no invalid byte sequences; BOM tolerated and stripped)
- Well formed (key = value lines, known keys, no duplicates, numeric values)
- Physically consistent (positive capacitances, non-positive anharmonicities)

Frequency-ordering and capacitance-hierarchy warnings are printed but do not
fail the file.

Usage:
  python3 scripts/validate_configs.py configs/*.conf

Exit codes:
  0 - all files valid or no files provided
  1 - one or more files invalid
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Iterable, List, Tuple

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, BASE_DIR)

from config_utils import load_config  # noqa: E402
from errors import ConfigError  # noqa: E402


def validate_file(path: str) -> Tuple[List[str], List[str]]:
    """Return (errors, warnings) for a parameter file."""
    try:
        config = load_config(path)
    except ConfigError as e:
        return [str(e)], []
    warnings = [*config.params.warnings, *config.params.ordering_warnings(config.bias)]
    return [], list(dict.fromkeys(warnings))


def main(argv: Iterable[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Validate coupler parameter files")
    parser.add_argument("files", nargs="*", help="parameter files to validate")
    parser.add_argument("--verbose", "-v", action="store_true", help="Print success messages for valid files")
    args = parser.parse_args(list(argv) if argv is not None else None)

    if not args.files:
        return 0

    had_errors = False
    for fpath in args.files:
        errors, warnings = validate_file(fpath)
        rel = os.path.relpath(fpath)
        if errors:
            had_errors = True
            print(f"✗ {rel}", file=sys.stderr)
            for err in errors:
                print(f"  - {err}", file=sys.stderr)
            continue
        for warning in warnings:
            print(f"! {rel}: {warning}", file=sys.stderr)
        if args.verbose:
            print(f"✓ {rel}")

    if had_errors:
        print("\nParameter file validation failed. Fix the above issues before running sweeps.", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
