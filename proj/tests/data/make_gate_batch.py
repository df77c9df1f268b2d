#!/usr/bin/env python3
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
"""Writes tests/data/gate_batch.jsonl: 10 samples, 2 structurally broken.

Every sample expects the same flow E: trigger record_create on incident
(2 inputs), then log (1 input), then send_email (3 inputs). Tree sizes are 4
(outline) and 10 (full). Hand-computed distances d and scores 100*(n-d)/n:

  id   change                                outline        full
  g01  none                                  d0 n4 100      d0 n10 100
  g02  none                                  100            100
  g03  none                                  100            100
  g04  none                                  100            100
  g05  none                                  100            100
  g06  send_email renamed post_slack_message d1 n4 75       d1 n10 90
  g07  send_email dropped                    d1 n4 75       d4 n10 60
  g08  subject changed                       100            d1 n10 90
  g09  ELSE(log) appended, no IF (R1)        d2 n6 400/6    d3 n13 1000/13
  g10  PARALLEL with one branch (R2)         d3 n7 400/7    d4 n14 1000/14

Gated means: outline (500+75+75+100)/10 = 75, full (500+90+60+90)/10 = 74.
"""

import copy
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent / "gate_batch.jsonl"

EXPECTED = {
    "trigger": {
        "type": "record_create",
        "annotation": "when an incident is created",
        "inputs": [
            {"key": "table", "kind": "table_ref", "value": "incident"},
            {"key": "condition", "kind": "literal",
             "value": {"condition": [{"column": "priority", "operator": "=", "operand": "1"}]}},
        ],
    },
    "steps": [
        {"id": "step_1", "name": "log", "kind": "action", "annotation": "log the incident",
         "inputs": [{"key": "message", "kind": "literal", "value": "P1 incident"}]},
        {"id": "step_2", "name": "send_email", "kind": "action", "annotation": "email the team",
         "inputs": [
             {"key": "to", "kind": "literal", "value": "oncall@example.com"},
             {"key": "subject", "kind": "literal", "value": "P1 incident"},
             {"key": "body", "kind": "data_pill",
              "value": {"pill": {"step": "trigger", "path": "incident_record.number"}}},
         ]},
    ],
}

LOG = {"id": "step_9", "name": "log", "kind": "action", "annotation": "log",
       "inputs": [{"key": "message", "kind": "literal", "value": "x"}]}


def variant(sample_id):
    flow = copy.deepcopy(EXPECTED)
    if sample_id == "g06":
        flow["steps"][1]["name"] = "post_slack_message"
    elif sample_id == "g07":
        flow["steps"].pop()
    elif sample_id == "g08":
        flow["steps"][1]["inputs"][1]["value"] = "Urgent incident"
    elif sample_id == "g09":
        flow["steps"].append({"id": "step_3", "name": "ELSE", "kind": "flowlogic",
                              "logic": "ELSE", "annotation": "", "inputs": [],
                              "children": [copy.deepcopy(LOG)]})
    elif sample_id == "g10":
        flow["steps"].append({
            "id": "step_3", "name": "PARALLEL", "kind": "flowlogic", "logic": "PARALLEL",
            "annotation": "in parallel", "inputs": [],
            "children": [{"id": "step_4", "name": "PARALLEL_BRANCH", "kind": "flowlogic",
                          "logic": "PARALLEL_BRANCH", "annotation": "", "inputs": [],
                          "children": [copy.deepcopy(LOG)]}]})
    return flow


def main():
    with open(OUT, "w") as f:
        for i in range(1, 11):
            sample_id = f"g{i:02d}"
            row = {"id": sample_id, "requirement": "When a P1 incident is created, log it and "
                   "email the on-call team.", "split_tag": "TEST",
                   "expected": EXPECTED, "generated": variant(sample_id)}
            f.write(json.dumps(row, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
