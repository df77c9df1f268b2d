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
"""Writes the scripted pipeline fixtures under tests/data/pipeline/.

dataset.jsonl holds 20 requirements with expected workflows. responses.jsonl
holds the mock generator's replies keyed "<id>/createFlow" and
"<id>/populateInputs/<step id>". Most replies reproduce the expected
workflow; a few deviate on purpose (see DEVIATIONS).
"""

import copy
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent / "pipeline"

# Steps whose catalog entry declares no inputs.
NO_INPUT_ACTIONS = {"end_flow"}
NO_INPUT_LOGIC = {"ELSE", "PARALLEL", "PARALLEL_BRANCH", "TRY", "CATCH"}


def lit(key, value):
    return {"key": key, "kind": "literal", "value": value}


def table(key, name):
    return {"key": key, "kind": "table_ref", "value": name}


def pill(key, step, path):
    return {"key": key, "kind": "data_pill", "value": {"pill": {"step": step, "path": path}}}


def cond(key, *clauses):
    items = []
    for i, clause in enumerate(clauses):
        column, op, operand = clause[:3]
        item = {"column": column, "operator": op, "operand": operand}
        if i > 0:
            item["join"] = clause[3] if len(clause) > 3 else "AND"
        items.append(item)
    return {"key": key, "kind": "literal", "value": {"condition": items}}


def ref(step, path):
    return {"pill": {"step": step, "path": path}}


def trigger(kind, annotation, *inputs):
    return {"type": kind, "annotation": annotation, "inputs": list(inputs)}


NULL_TRIGGER = {"type": None, "annotation": "", "inputs": []}


def action(sid, name, annotation, *inputs):
    return {"id": sid, "name": name, "kind": "action", "annotation": annotation,
            "inputs": list(inputs)}


def logic(sid, kind, annotation, inputs=(), children=()):
    return {"id": sid, "name": kind, "kind": "flowlogic", "logic": kind,
            "annotation": annotation, "inputs": list(inputs), "children": list(children)}


SAMPLES = [
    ("s01", "TEST",
     "When an incident is created with priority 1, send an email to the assignment group.",
     trigger("record_create", "when an incident is created with priority 1",
             table("table", "incident"), cond("condition", ("priority", "=", "1"))),
     [action("step_1", "send_email", "send an email to the assignment group",
             pill("to", "trigger", "incident_record.assignment_group.email"),
             lit("subject", "Priority 1 incident created"),
             pill("body", "trigger", "incident_record.short_description"))]),
    ("s02", "TEST",
     "Every time a user becomes inactive, find all incidents where the user is the assignee. "
     "Assign them to their manager.",
     None, None),  # Filled from sample_flow.json.
    ("s03", "TEST",
     "When a change request is closed, log its number.",
     trigger("record_update", "when a change request is closed",
             table("table", "change_request"), cond("condition", ("state", "=", "closed"))),
     [action("step_1", "log", "log its number",
             pill("message", "trigger", "change_request_record.number"))]),
    ("s04", "TEST",
     "When an incident is resolved, if the priority is 1 post a Teams message to the major "
     "incident channel, otherwise add a work note.",
     trigger("record_update", "when an incident is resolved",
             table("table", "incident"), cond("condition", ("state", "=", "resolved"))),
     [logic("step_1", "IF", "if the priority is 1",
            [cond("condition", ("priority", "=", "1"))],
            [action("step_2", "post_teams_message", "post a Teams message to the major incident channel",
                    lit("channel", "major-incidents"),
                    pill("message", "trigger", "incident_record.number"))]),
      logic("step_3", "ELSE", "", [],
            [action("step_4", "add_worknote", "add a work note",
                    pill("record", "trigger", "incident_record"),
                    lit("note", "Incident resolved"))])]),
    ("s05", "TEST",
     "Every day, look up catalog tasks that are open and post a Slack message with the count.",
     trigger("daily", "every day", table("table", "sc_task"),
             cond("condition", ("state", "=", "open"))),
     [action("step_1", "look_up_records", "look up catalog tasks that are open",
             table("table", "sc_task"), cond("conditions", ("state", "=", "open"))),
      action("step_2", "post_slack_message", "post a Slack message with the count",
             lit("channel", "service-desk"), pill("message", "step_1", "count"))]),
    ("s06", "OOD",
     "When a service catalog item is requested, get its variables and ask the requester's "
     "manager for approval.",
     trigger("service_catalog", "when a service catalog item is requested",
             table("table", "sc_req_item"), cond("condition", ("stage", "=", "waiting_for_approval"))),
     [action("step_1", "get_catalog_variables", "get its variables",
             pill("requested_item", "trigger", "request_item"), lit("variables", "all")),
      action("step_2", "ask_for_approval", "ask the requester's manager for approval",
             pill("record", "trigger", "request_item"),
             pill("approvers", "trigger", "request_item.requested_for.manager"))]),
    ("s07", "TEST",
     "When a high risk change is created, notify the change managers and create a review task.",
     trigger("record_create", "when a high risk change is created",
             table("table", "change_request"), cond("condition", ("risk", "=", "high"))),
     [action("step_1", "send_notification", "notify the change managers",
             lit("notification", "high_risk_change"), lit("recipients", "change_managers")),
      action("step_2", "create_task", "create a review task",
             table("table", "sc_task"), lit("fields", "short_description=Review change"))]),
    ("s08", "TEST",
     "For every incident that is on hold, update its state to in progress.",
     NULL_TRIGGER,
     [action("step_1", "look_up_records", "every incident that is on hold",
             table("table", "incident"), cond("conditions", ("state", "=", "on_hold"))),
      logic("step_2", "FOREACH", "for every incident", [pill("items", "step_1", "records")],
            [action("step_3", "record_update", "update its state to in progress",
                    pill("record", "step_2", "item"), table("table", "incident"),
                    lit("fields", "state=in_progress"))])]),
    ("s09", "OOD",
     "When an SLA breaches, email the assignee and add a work note to the task.",
     trigger("sla_task", "when an SLA breaches", table("table", "task_sla"),
             cond("condition", ("has_breached", "=", True))),
     [action("step_1", "send_email", "email the assignee",
             pill("to", "trigger", "task_sla_record.task.assigned_to.email"),
             lit("subject", "SLA breached"), lit("body", "The SLA on your task has breached.")),
      action("step_2", "add_worknote", "add a work note to the task",
             pill("record", "trigger", "task_sla_record.task"), lit("note", "SLA breached"))]),
    ("s10", "TEST",
     "When an incident is created, in parallel notify the assignee and log the incident number.",
     trigger("record_create", "when an incident is created", table("table", "incident"),
             cond("condition", ("state", "=", "new"))),
     [logic("step_1", "PARALLEL", "in parallel", [],
            [logic("step_2", "PARALLEL_BRANCH", "", [],
                   [action("step_3", "send_notification", "notify the assignee",
                           lit("notification", "incident_assigned"),
                           pill("recipients", "trigger", "incident_record.assigned_to"))]),
             logic("step_4", "PARALLEL_BRANCH", "", [],
                   [action("step_5", "log", "log the incident number",
                           pill("message", "trigger", "incident_record.number"))])])]),
    ("s11", "TEST",
     "When a user is created, create an onboarding task.",
     trigger("record_create", "when a user is created", table("table", "sys_user"),
             cond("condition", ("active", "=", True))),
     [action("step_1", "create_task", "create an onboarding task",
             table("table", "sc_task"), lit("fields", "short_description=Onboard new user"))]),
    ("s12", "TEST",
     "Try to update the incident priority to 2 and if that fails log an error.",
     trigger("record_update", "when an incident is updated", table("table", "incident"),
             cond("condition", ("priority", "=", "1"))),
     [logic("step_1", "TRY", "try to update the incident priority", [],
            [action("step_2", "record_update", "update the incident priority to 2",
                    pill("record", "trigger", "incident_record"), table("table", "incident"),
                    lit("fields", "priority=2"))]),
      logic("step_3", "CATCH", "if that fails", [],
            [action("step_4", "log", "log an error", lit("message", "Priority update failed"))])]),
    ("s13", "TEST",
     "When an incident is closed, if it was priority 1 email the manager, else if priority 2 "
     "post to Slack, otherwise do nothing.",
     trigger("record_update", "when an incident is closed", table("table", "incident"),
             cond("condition", ("state", "=", "closed"))),
     [logic("step_1", "IF", "if it was priority 1", [cond("condition", ("priority", "=", "1"))],
            [action("step_2", "send_email", "email the manager",
                    pill("to", "trigger", "incident_record.assigned_to.manager.email"),
                    lit("subject", "P1 closed"), lit("body", "A priority 1 incident was closed."))]),
      logic("step_3", "ELSEIF", "else if priority 2", [cond("condition", ("priority", "=", "2"))],
            [action("step_4", "post_slack_message", "post to Slack",
                    lit("channel", "incidents"), pill("message", "trigger", "incident_record.number"))]),
      logic("step_5", "ELSE", "otherwise do nothing", [],
            [action("step_6", "end_flow", "do nothing")])]),
    ("s14", "OOD",
     "Every week, delete inactive user groups.",
     trigger("weekly", "every week", table("table", "sys_user_group"),
             cond("condition", ("active", "=", False))),
     [action("step_1", "look_up_records", "inactive user groups",
             table("table", "sys_user_group"), cond("conditions", ("active", "=", False))),
      logic("step_2", "FOREACH", "for each inactive group", [pill("items", "step_1", "records")],
            [action("step_3", "delete_record", "delete the group", pill("record", "step_2", "item"))])]),
    ("s15", "TEST",
     "When an incident is assigned, wait one hour and then email the assignee if it is still new.",
     trigger("record_update", "when an incident is assigned", table("table", "incident"),
             cond("condition", ("assigned_to", "!=", ""))),
     [action("step_1", "wait_for_duration", "wait one hour", lit("duration", "1h")),
      action("step_2", "look_up_record", "check if it is still new",
             table("table", "incident"),
             cond("conditions", ("sys_id", "=", ref("trigger", "incident_record.sys_id")),
                  ("state", "=", "new"))),
      logic("step_3", "IF", "if it is still new",
            [cond("condition", ("state", "=", "new"))],
            [action("step_4", "send_email", "email the assignee",
                    pill("to", "trigger", "incident_record.assigned_to.email"),
                    lit("subject", "Reminder"), lit("body", "Please pick up your incident."))])]),
    ("s16", "TEST",
     "Create an incident for the network team.",
     NULL_TRIGGER,
     [action("step_1", "create_record", "create an incident for the network team",
             table("table", "incident"), lit("fields", "assignment_group=Network"))]),
    ("s17", "OOD",
     "When a requested item is complete, close its catalog tasks.",
     trigger("record_update", "when a requested item is complete", table("table", "sc_req_item"),
             cond("condition", ("stage", "=", "complete"))),
     [action("step_1", "look_up_records", "its catalog tasks", table("table", "sc_task"),
             cond("conditions", ("request_item", "=", ref("trigger", "sc_req_item_record.sys_id")))),
      logic("step_2", "FOREACH", "for each task", [pill("items", "step_1", "records")],
            [action("step_3", "record_update", "close the task", pill("record", "step_2", "item"),
                    table("table", "sc_task"), lit("fields", "state=closed_complete"))])]),
    ("s18", "TEST",
     "Keep asking for approval of the change until it is approved.",
     trigger("record_create", "when a change is created", table("table", "change_request"),
             cond("condition", ("state", "=", "new"))),
     [logic("step_1", "DOUNTIL", "until it is approved",
            [cond("condition", ("state", "=", "authorize"))],
            [action("step_2", "ask_for_approval", "ask for approval of the change",
                    pill("record", "trigger", "change_request_record"),
                    lit("approvers", "cab"))])]),
    ("s19", "TEST",
     "When a priority 1 or priority 2 incident is created, post a Teams message.",
     trigger("record_create", "when a priority 1 or priority 2 incident is created",
             table("table", "incident"),
             cond("condition", ("priority", "=", "1"), ("priority", "=", "2", "OR"))),
     [action("step_1", "post_teams_message", "post a Teams message",
             lit("channel", "incidents"), pill("message", "trigger", "incident_record.number"))]),
    ("s20", "OOD",
     "When an Acme widget is created, set its status to registered.",
     trigger("record_create", "when an Acme widget is created", table("table", "acme_widget"),
             cond("condition", ("status", "=", "new"))),
     [action("step_1", "acme_widget_update", "set its status to registered",
             pill("widget", "trigger", "acme_widget_record"), lit("fields", "status=registered"))]),
]

# Sample id -> what the scripted replies do differently from the expected flow.
DEVIATIONS = {
    "s03": "outline reply wrapped in prose and a code fence",
    "s05": "step_2 inputs use a different channel",
    "s07": "outline drops step_2",
    "s09": "no reply scripted for populateInputs/step_2",
    "s11": "outline reply contains no JSON",
    "s13": "outline puts ELSE before ELSEIF",
    "s15": "outline adds an extra log step",
    "s17": "no reply scripted for createFlow",
}


def walk(steps):
    for step in steps:
        yield step
        yield from walk(step.get("children", []))


def inputful(step):
    if step["kind"] == "flowlogic":
        return step["logic"] not in NO_INPUT_LOGIC
    return step["name"] not in NO_INPUT_ACTIONS


def strip_inputs(steps):
    for step in steps:
        step["inputs"] = []
        strip_inputs(step.get("children", []))


def outline_of(flow):
    outline = copy.deepcopy(flow)
    outline["trigger"]["inputs"] = []
    strip_inputs(outline["steps"])
    return outline


def responses_for(sid, flow):
    out = []
    outline = outline_of(flow)
    if sid == "s07":
        outline["steps"] = outline["steps"][:1]
    if sid == "s13":
        outline["steps"] = [outline["steps"][0], outline["steps"][2], outline["steps"][1]]
    if sid == "s15":
        outline["steps"].append({"id": "step_9", "name": "log", "kind": "action",
                                 "annotation": "log the reminder", "inputs": [], "children": []})
    if sid == "s03":
        create = ("Here is the workflow outline:\n```json\n" + json.dumps(outline, indent=2) +
                  "\n```\nLet me know if you need changes.")
    elif sid == "s11":
        create = "I am sorry, I cannot build this workflow."
    else:
        create = json.dumps(outline, sort_keys=True)
    if sid != "s17":
        out.append({"key": f"{sid}/createFlow", "response": create})

    by_id = {s["id"]: s for s in walk(flow["steps"])}
    if sid == "s15":
        by_id["step_9"] = {"id": "step_9", "name": "log", "kind": "action",
                           "inputs": [lit("message", "Reminder sent")]}
    if flow["trigger"]["type"] is not None:
        out.append({"key": f"{sid}/populateInputs/trigger",
                    "response": {"inputs": flow["trigger"]["inputs"]}})
    for step in walk(outline["steps"]):
        if not inputful(step):
            continue
        if sid == "s09" and step["id"] == "step_2":
            continue
        inputs = copy.deepcopy(by_id[step["id"]]["inputs"])
        if sid == "s05" and step["id"] == "step_2":
            inputs[0]["value"] = "general"
        out.append({"key": f"{sid}/populateInputs/{step['id']}", "response": {"inputs": inputs}})
    return out


def main():
    OUT.mkdir(exist_ok=True)
    sample_flow = json.loads((OUT.parent / "sample_flow.json").read_text())
    dataset, responses = [], []
    for sid, split, requirement, trig, steps in SAMPLES:
        flow = sample_flow if sid == "s02" else {"trigger": trig, "steps": steps}
        dataset.append({"id": sid, "requirement": requirement, "split_tag": split,
                        "expected": flow})
        responses.extend(responses_for(sid, flow))
    with open(OUT / "dataset.jsonl", "w") as f:
        for row in dataset:
            f.write(json.dumps(row, sort_keys=True) + "\n")
    with open(OUT / "responses.jsonl", "w") as f:
        for row in responses:
            f.write(json.dumps(row, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
