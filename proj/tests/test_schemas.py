"""Validates example configs and a freshly written report against the JSON schemas."""
import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--root", required=True)
    ap.add_argument("--work", required=True)
    a = ap.parse_args()
    root = pathlib.Path(a.root)
    work = pathlib.Path(a.work)
    work.mkdir(parents=True, exist_ok=True)

    run_schema = json.loads((root / "schemas/run_config.schema.json").read_text())
    report_schema = json.loads((root / "schemas/report.schema.json").read_text())
    jsonschema.Draft7Validator.check_schema(run_schema)
    jsonschema.Draft7Validator.check_schema(report_schema)
    failures = 0

    for p in sorted((root / "configs").glob("*.json")):
        cfg = json.loads(p.read_text())
        if "pieces" in cfg:  # cover description, not a run config
            continue
        errs = list(jsonschema.Draft7Validator(run_schema).iter_errors(cfg))
        print(f"{p.name}: {'ok' if not errs else errs[0].message}")
        failures += bool(errs)

    bad = json.loads((root / "tests/data/bad_config.json").read_text())
    if jsonschema.Draft7Validator(run_schema).is_valid(bad):
        print("bad_config.json unexpectedly valid")
        failures += 1

    subprocess.run([a.cli, "verify", "algebra", "--n", "2", "--out", str(work), "--format", "json"],
                   check=True, stdout=subprocess.DEVNULL)
    report = json.loads((work / "algebra.json").read_text())
    errs = list(jsonschema.Draft7Validator(report_schema).iter_errors(report))
    print(f"algebra.json: {'ok' if not errs else errs[0].message}")
    failures += bool(errs)
    # the report's embedded config must itself be a valid run config
    cfg = dict(report["config"])
    errs = list(jsonschema.Draft7Validator(run_schema).iter_errors(cfg))
    print(f"embedded config: {'ok' if not errs else errs[0].message}")
    failures += bool(errs)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
