"""Validate hyperham JSON reports against schemas/report.schema.json.

Usage: check_reports.py report.json [report.json ...]
Exits 0 when every report is valid, 1 otherwise.
"""
import json
import pathlib
import sys

import jsonschema

SCHEMA = pathlib.Path(__file__).resolve().parent.parent / "schemas" / "report.schema.json"


def main(paths):
    validator = jsonschema.Draft202012Validator(json.loads(SCHEMA.read_text()))
    bad = 0
    for path in paths:
        errors = sorted(validator.iter_errors(json.loads(pathlib.Path(path).read_text())), key=str)
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            print(f"{path}: {where}: {err.message}")
        bad += bool(errors)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
