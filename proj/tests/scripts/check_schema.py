# Copyright 2026 The FlowSim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Checks docs/workflow.schema.json against the strict workflow fixtures."""

import json
import pathlib
import sys

import jsonschema

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"


def documents():
    yield "sample_flow.json", json.loads((DATA / "sample_flow.json").read_text())
    for name in ("gate_batch.jsonl", "pipeline/dataset.jsonl"):
        for line in (DATA / name).read_text().splitlines():
            if line.strip():
                row = json.loads(line)
                yield f"{name}:{row['id']}", row["expected"]


REJECTED = [
    {"steps": []},
    {"trigger": {"type": "x"}, "steps": [{"kind": "action", "name": "a", "children": [{"name": "b"}]}]},
    {"trigger": {"type": "x"}, "steps": [{"kind": "flowlogic", "name": "loop"}]},
    {"trigger": {"type": "x"}, "steps": [{"name": "a", "inputs": [{"key": "t", "kind": "data_pill", "value": "s"}]}]},
    {"trigger": {"type": "x"}, "steps": [{"name": "a", "inputs": [{"key": "t", "value": {"condition": []}}]}]},
]


def main():
    schema = json.loads((ROOT / "docs" / "workflow.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    count = 0
    for name, doc in documents():
        count += 1
        for error in validator.iter_errors(doc):
            failures += 1
            print(f"{name}: {list(error.absolute_path)}: {error.message}")
    for i, doc in enumerate(REJECTED):
        if validator.is_valid(doc):
            failures += 1
            print(f"rejected[{i}] validated")
    print(f"{count} workflows, {len(REJECTED)} rejections, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
