"""Validates the bundled configs and emitted diagnostics with the reference
jsonschema implementation, independently of the built-in validator."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main(cli: str, source: str) -> int:
    root = pathlib.Path(source)
    config_schema = json.loads((root / "docs" / "config.schema.json").read_text())
    diag_schema = json.loads((root / "docs" / "diagnostics.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(config_schema)
    jsonschema.Draft202012Validator.check_schema(diag_schema)
    failures = 0
    for cfg in sorted((root / "configs").glob("*.json")):
        errors = list(jsonschema.Draft202012Validator(config_schema).iter_errors(json.loads(cfg.read_text())))
        for e in errors:
            print(f"{cfg.name}: {e.json_path}: {e.message}")
        failures += len(errors)
    # One successful and one failed run; both must emit schema-valid reports.
    with tempfile.TemporaryDirectory() as tmp:
        for name, expected in (("zero.json", 0), ("outside_sector.json", 3)):
            out = pathlib.Path(tmp) / name
            rc = subprocess.run([cli, "solve", "--config", str(root / "configs" / name), "--out", str(out)]).returncode
            if rc != expected:
                print(f"{name}: exit {rc}, expected {expected}")
                failures += 1
            doc = json.loads((out / "diagnostics.json").read_text())
            errors = list(jsonschema.Draft202012Validator(diag_schema).iter_errors(doc))
            for e in errors:
                print(f"{name} diagnostics: {e.json_path}: {e.message}")
            failures += len(errors)
    print("ok" if failures == 0 else f"{failures} problems")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
