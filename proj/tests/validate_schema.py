"""Validate JSON documents against a schema from the schemas/ directory.

usage: validate_schema.py SCHEMA_DIR SCHEMA_NAME FILE...
"""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    registry = Registry()
    schemas = {}
    for p in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(p.read_text())
        jsonschema.Draft202012Validator.check_schema(doc)
        schemas[p.name] = doc
        registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    validator = jsonschema.Draft202012Validator(schemas[argv[2]], registry=registry)
    failed = 0
    for name in argv[3:]:
        errors = sorted(validator.iter_errors(json.loads(pathlib.Path(name).read_text())), key=str)
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.absolute_path)) or '(root)'}: {e.message}")
        failed += bool(errors)
        if not errors:
            print(f"{name}: ok")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
