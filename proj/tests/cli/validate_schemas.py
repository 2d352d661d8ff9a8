#!/usr/bin/env python3
"""Run the CLI with --json and validate each document against schemas/."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
BDNE = "<p*>(x | (y & [p]x) | (z & <p>~x)) | ~y"
cases = [
    ("parse", ["parse", "x | [p]y, <p;q*>~x"], 0),
    ("prove", ["prove", "x, ~x"], 0),
    ("prove", ["prove", "[p]x"], 1),
    ("prove", ["prove", "--system", "seq0", "<p>x, [p]~x"], 0),
    ("decide_bcne", ["decide-bcne", "<p*>(x | <p>x) | ~x"], 0),
    ("decide_bcne", ["decide-bcne", "<p*>(x | [p]y)"], 1),
    ("decide_bdne", ["decide-bdne", "--via", "f", BDNE], 1),
    ("decide_bdne", ["decide-bdne", "--via", "expansion", BDNE], 1),
    ("decide_bdne", ["decide-bdne", "--via", "qbf", BDNE], 1),
    ("emit_qbf", ["emit-qbf", BDNE], 1),
    ("countermodel", ["countermodel", "[p]x"], 0),
    ("countermodel", ["countermodel", "x, ~x"], 1),
]
bad = 0
for schema_name, args, code in cases:
    schema = json.loads((schema_dir / f"{schema_name}.schema.json").read_text())
    run = subprocess.run([cli, "--json", *args], capture_output=True, text=True)
    try:
        if run.returncode != code:
            raise AssertionError(f"exit {run.returncode}, expected {code}: {run.stderr.strip()}")
        jsonschema.validate(json.loads(run.stdout), schema)
        print(f"ok   {' '.join(args)}")
    except (AssertionError, json.JSONDecodeError, jsonschema.ValidationError) as e:
        bad += 1
        print(f"FAIL {' '.join(args)}: {str(e).splitlines()[0]}")
sys.exit(1 if bad else 0)
