"""Validate JSON reports against the shipped schemas.

usage: validate_reports.py SCHEMA_DIR FILE=SCHEMA [FILE=SCHEMA ...]
"""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def registry(schema_dir):
    resources = []
    for path in sorted(schema_dir.glob("*.schema.json")):
        resources.append((path.name, Resource.from_contents(json.loads(path.read_text()))))
    return Registry().with_resources(resources)


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    reg = registry(schema_dir)
    failures = 0
    for pair in argv[2:]:
        report, schema_name = pair.split("=", 1)
        schema = json.loads((schema_dir / schema_name).read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        validator = jsonschema.Draft202012Validator(schema, registry=reg)
        errors = sorted(validator.iter_errors(json.loads(pathlib.Path(report).read_text())), key=str)
        for e in errors:
            print(f"{report}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        failures += len(errors)
        print(f"{'ok' if not errors else 'INVALID'} {report} ({schema_name})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
