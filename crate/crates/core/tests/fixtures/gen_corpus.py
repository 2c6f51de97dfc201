#!/usr/bin/env python3
"""Generate the miniature requirements corpus and its expected numbers.

Writes into corpus/:
  requirements.xml      instance document for ../schema/requirements.xsd
  requirements_cve.xml  the same document plus invalidating_cve elements
  expected.json         element, duplicate and instance counts, computed here
                        with a fingerprint model written independently of the
                        Rust code
  ground_truth.json     same-class pair universe and true synonym pairs
  stub_oracle.json      canned oracle answers
  reqonto.toml          config for running the CLI by hand

Run from this directory: python3 gen_corpus.py
"""

import itertools
import json
import random
from pathlib import Path
from xml.sax.saxutils import escape

SEED = 20240917
NS = "http://example.org/requirements/schema"
OUT = Path(__file__).parent / "corpus"

# element name -> (declared type, property name) inside each enclosing type
REQ_COMMON = {
    "actor_in_charge": ("Actor", "actor_in_charge"),
    "related_event": ("Event", "related_event"),
    "source": ("Standard", "source"),
}
CHILDREN = {
    "EnsuringRequirement": {
        **REQ_COMMON,
        "ensured_concept": ("Content", "EnsuringRequirement_choice"),
        "ensured_action": ("Action", "EnsuringRequirement_choice"),
        "compliance_with_standard": ("Standard", "EnsuringRequirement_choice"),
        "ensured_property": ("ContentProperty", "EnsuringRequirement_choice"),
    },
    "DocumentationRequirement": {
        **REQ_COMMON,
        "documented_concept": ("Content", "DocumentationRequirement_choice"),
        "documented_action": ("Action", "DocumentationRequirement_choice"),
        "documented_analysis": ("Analysis", "DocumentationRequirement_choice"),
        "recipient": ("Actor", "recipient"),
    },
    "MitigationRequirement": {
        **REQ_COMMON,
        "mitigated_risk": ("Risk", "mitigated_risk"),
        "mitigating_action": ("Action", "mitigating_action"),
    },
    "EvaluationRequirement": {**REQ_COMMON, "evaluated_analysis": ("Analysis", "evaluated_analysis")},
    "DesignGoalRequirement": {
        **REQ_COMMON,
        "design_goal": ("Content", "design_goal"),
        "concerned_component": ("Component", "concerned_component"),
    },
    "Tradeoff": {"first_concept": ("Content", "first_concept"), "second_concept": ("Risk", "second_concept")},
    "Analysis": {"analysed_tradeoff": ("Tradeoff", "analysed_tradeoff")},
    "Action": {"performed_on": ("Content", "Action_choice"), "produced_record": ("Record", "Action_choice")},
    "ContentProperty": {"of_concept": ("Content", "of_concept")},
}
# simple leaves: name -> (datatype, default)
LEAVES = {
    "name": ("string", None),
    "action_type": ("string", None),
    "residual": ("boolean", "false"),
    "accepted": ("boolean", "false"),
    "unacceptable": ("boolean", "false"),
    "identified": ("boolean", "false"),
    "invalidating_cve": ("string", None),
}
ATTRS = {"modality": ("string", "shall"), "uri": ("anyURI", None)}
ROOT_CHILDREN = {
    "ensuring_requirement": "EnsuringRequirement",
    "documentation_requirement": "DocumentationRequirement",
    "mitigation_requirement": "MitigationRequirement",
    "evaluation_requirement": "EvaluationRequirement",
    "design_goal_requirement": "DesignGoalRequirement",
}


class E:
    """A complex element: tag, attributes, ordered children (E or leaf tuples)."""

    def __init__(self, tag, attrs=None, children=()):
        self.tag = tag
        self.attrs = dict(attrs or {})
        self.children = list(children)

    def xml(self, indent):
        pad = "  " * indent
        attrs = "".join(f' {k}="{escape(v)}"' for k, v in self.attrs.items())
        lines = [f"{pad}<{self.tag}{attrs}>"]
        for c in self.children:
            if isinstance(c, E):
                lines.extend(c.xml(indent + 1))
            else:
                lines.append(f"{pad}  <{c[0]}>{escape(c[1])}</{c[0]}>")
        lines.append(f"{pad}</{self.tag}>")
        return lines


def leaf(tag, value):
    return (tag, value)


# vocabulary ---------------------------------------------------------------
# Each name always carries the same structure, so equal names mean equal
# fingerprints unless a collision is built on purpose further down.

ACTORS = [
    "manufacturer", "device manufacturer", "producer",
    "end user", "user",
    "clinician", "medical practitioner",
    "notified body", "conformity assessment body",
    "healthcare provider", "care provider",
    "IT administrator", "system administrator",
    "patient", "importer", "distributor", "service technician", "maintenance technician",
]
CONTENTS = [
    "patient data", "patient information", "health data",
    "personal data", "personal information",
    "audit log", "audit trail",
    "software update", "firmware update",
    "instructions for use", "user manual",
    "technical documentation", "technical file",
    "encryption key", "cryptographic key",
    "security patch", "security fix",
    "access credentials", "login credentials",
    "device configuration", "device settings",
    "clinical evaluation report", "risk management file",
    "network traffic", "vulnerability report", "incident report",
    "clinical benefit", "software bill of materials", "SBOM",
    "risk management documentation",
]
RECORDS = ["access record", "access log entry", "maintenance record", "audit log"]
RISKS = {
    "unauthorised access": {"identified": "true"},
    "unauthorized access": {"identified": "true"},
    "data breach": {"identified": "true", "unacceptable": "true"},
    "data leak": {"identified": "true", "unacceptable": "true"},
    "malware infection": {"identified": "true"},
    "malware infestation": {"identified": "true"},
    "denial of service": {"accepted": "true"},
    "tampering": {},
    "manipulation": {},
    "DoS attack": {"accepted": "true"},
    "loss of availability": {"residual": "true", "accepted": "true"},
}
EVENTS = ["system failure", "system malfunction", "security incident", "security event", "power loss", "power outage", "firmware change"]
STANDARDS = {
    "IEC 62304": "https://www.iso.org/standard/38421.html",
    "IEC 62304:2006": "https://www.iso.org/standard/38421.html",
    "ISO 14971": "https://www.iso.org/standard/72704.html",
    "ISO 14971:2019": "https://www.iso.org/standard/72704.html",
    "IEC 81001-5-1": "https://www.iso.org/standard/76097.html",
    "ISO/IEC 27001": "https://www.iso.org/standard/27001",
    "MDCG 2019-16": "https://health.ec.europa.eu/document/download/b1f28ab2",
}
COMPONENTS = ["data storage", "storage unit", "communication module", "cloud backend", "cloud server", "user interface", "UI"]
ACTIONS = {
    "encrypt data": ("protection", ("performed_on", "patient data")),
    "authenticate user": ("access control", ("performed_on", "access credentials")),
    "user authentication": ("access control", ("performed_on", "login credentials")),
    "back up data": ("maintenance", ("performed_on", "health data")),
    "data backup": ("maintenance", ("performed_on", "patient information")),
    "log access": ("monitoring", ("produced_record", "access record")),
    "record access": ("monitoring", ("produced_record", "access log entry")),
    "verify software signature": ("integrity", ("performed_on", "software update")),
    "service device": (None, ("produced_record", "maintenance record")),
    "write audit entry": ("monitoring", ("produced_record", "audit log")),
    "apply patch": ("maintenance", None),
    "install patch": ("maintenance", None),
}
PROPERTIES = {
    "confidentiality of patient data": "patient data",
    "confidentiality of patient information": "patient information",
    "integrity of audit log": "audit log",
    "integrity of audit trail": "audit trail",
    "availability of device configuration": "device configuration",
}
TRADEOFFS = {
    "clinical benefit vs data breach": ("clinical benefit", "data breach"),
    "usability vs unauthorised access": ("user manual", "unauthorised access"),
}
ANALYSES = {
    "benefit-risk analysis": "clinical benefit vs data breach",
    "usability analysis": "usability vs unauthorised access",
    "threat analysis": None,
    "threat assessment": None,
    "risk assessment": None,
    "risk analysis": None,
}

# Synonym sets the ground truth treats as the same real-world entity, per
# class. "judged" says how the stub oracle answers inside the set.
SYNONYMS = [
    ("Actor", ["manufacturer", "device manufacturer", "producer"], "true"),
    ("Actor", ["end user", "user"], "true"),
    ("Actor", ["clinician", "medical practitioner"], "true"),
    ("Actor", ["notified body", "conformity assessment body"], "true"),
    ("Actor", ["healthcare provider", "care provider"], "true"),
    ("Actor", ["IT administrator", "system administrator"], "false"),
    ("Content", ["patient data", "patient information", "health data"], "true"),
    ("Content", ["personal data", "personal information"], "true"),
    ("Content", ["audit log", "audit trail"], "true"),
    ("Content", ["software update", "firmware update"], "true"),
    ("Content", ["instructions for use", "user manual"], "true"),
    ("Content", ["technical documentation", "technical file"], "true"),
    ("Content", ["encryption key", "cryptographic key"], "true"),
    ("Content", ["security patch", "security fix"], "true"),
    ("Content", ["access credentials", "login credentials"], "true"),
    ("Content", ["device configuration", "device settings"], "false"),
    ("Record", ["access record", "access log entry"], "true"),
    ("Risk", ["unauthorised access", "unauthorized access"], "true"),
    ("Risk", ["data breach", "data leak"], "true"),
    ("Risk", ["malware infection", "malware infestation"], "true"),
    ("Event", ["system failure", "system malfunction"], "true"),
    ("Event", ["security incident", "security event"], "true"),
    ("Standard", ["ISO 14971", "ISO 14971:2019"], "true"),
    ("Component", ["data storage", "storage unit"], "true"),
    ("Action", ["authenticate user", "user authentication"], "true"),
    ("Action", ["back up data", "data backup"], "true"),
    ("Action", ["log access", "record access"], "true"),
    ("ContentProperty", ["confidentiality of patient data", "confidentiality of patient information"], "true"),
    ("ContentProperty", ["integrity of audit log", "integrity of audit trail"], "true"),
    ("Analysis", ["risk assessment", "risk analysis"], "true"),
    ("Analysis", ["threat analysis", "threat assessment"], "true"),
    ("Actor", ["service technician", "maintenance technician"], "true"),
    ("Content", ["software bill of materials", "SBOM"], "true"),
    ("Content", ["risk management file", "risk management documentation"], "true"),
    ("Risk", ["tampering", "manipulation"], "true"),
    ("Risk", ["denial of service", "DoS attack"], "true"),
    ("Event", ["power loss", "power outage"], "true"),
    ("Standard", ["IEC 62304", "IEC 62304:2006"], "true"),
    ("Component", ["user interface", "UI"], "true"),
    ("Component", ["cloud backend", "cloud server"], "true"),
    ("Action", ["apply patch", "install patch"], "true"),
]
# Pairs the oracle wrongly calls mergeable.
FALSE_POSITIVES = [
    ("Actor", ["importer", "distributor"]),
    ("Content", ["vulnerability report", "incident report"]),
]
# Pairs the oracle answers with something that is neither true nor false.
UNPARSEABLE = [
    ("Actor", "patient", "end user", "It depends on the context."),
    ("Content", "network traffic", "device configuration", "Maybe"),
    ("Component", "cloud backend", "communication module", ""),
]


def content(tag, name):
    return E(tag, children=[leaf("name", name)])


def risk(tag, name, flags=None, explicit_defaults=False, one_for_true=False):
    flags = RISKS[name] if flags is None else flags
    kids = [leaf("name", name)]
    for f in ("residual", "accepted", "unacceptable", "identified"):
        if f in flags:
            v = flags[f]
            if one_for_true and v == "true":
                v = "1"
            kids.append(leaf(f, v))
        elif explicit_defaults:
            kids.append(leaf(f, "false"))
    return E(tag, children=kids)


def standard(tag, name):
    return E(tag, {"uri": STANDARDS[name]}, [leaf("name", name)])


def action(tag, name):
    kind, target = ACTIONS[name]
    kids = [leaf("name", name)]
    if kind:
        kids.append(leaf("action_type", kind))
    if target:
        t, v = target
        kids.append(content(t, v))
    return E(tag, children=kids)


def prop(tag, name):
    return E(tag, children=[leaf("name", name), content("of_concept", PROPERTIES[name])])


def analysis(tag, name):
    kids = [leaf("name", name)]
    t = ANALYSES[name]
    if t:
        first, second = TRADEOFFS[t]
        kids.append(E("analysed_tradeoff", children=[
            leaf("name", t), content("first_concept", first), risk("second_concept", second)]))
    return E(tag, children=kids)


def build(rng, n_requirements, cve=False):
    """Requirements list; every vocabulary entry occurs at least once."""
    covered = {c for _, t in ACTIONS.values() if t for c in [t[1]]}
    covered |= set(PROPERTIES.values()) | {c for pair in TRADEOFFS.values() for c in pair}
    pending = {
        "concept": [c for c in CONTENTS if c not in covered],
        "risk": [r for r in RISKS if r not in covered],
        "standard": list(STANDARDS),
        "action": list(ACTIONS),
        "property": list(PROPERTIES),
        "analysis": list(ANALYSES),
        "component": list(COMPONENTS),
    }
    for v in pending.values():
        rng.shuffle(v)
    actors = list(ACTORS)
    events = list(EVENTS)
    rng.shuffle(actors)
    rng.shuffle(events)

    def take(kind, fallback):
        return pending[kind].pop() if pending[kind] else rng.choice(fallback)

    reqs = []
    while len(reqs) < n_requirements or any(pending.values()):
        open_kinds = [k for k, v in pending.items() if v]
        kind = rng.choice(open_kinds) if open_kinds else rng.choice(["concept", "risk", "standard", "action", "analysis"])
        name = f"REQ-{len(reqs) + 1:03d}"
        actor = actors.pop() if actors else rng.choice(["manufacturer", "manufacturer", "user", "clinician", "patient"])
        kids = [leaf("name", name), content("actor_in_charge", actor)]
        if events and rng.random() < 0.5:
            kids.append(content("related_event", events.pop()))
        elif rng.random() < 0.15:
            kids.append(content("related_event", rng.choice(EVENTS)))
        if rng.random() < 0.4:
            kids.append(standard("source", rng.choice(["IEC 62304", "ISO 14971", "IEC 81001-5-1"])))
        attrs = {}
        roll = rng.random()
        if roll < 0.15:
            attrs["modality"] = "should"
        elif roll < 0.3:
            attrs["modality"] = "shall"
        if kind == "concept":
            value = take("concept", CONTENTS[:8])
            roll = rng.random()
            if roll < 0.4:
                tag = "documentation_requirement"
                kids.append(content("documented_concept", value))
                if rng.random() < 0.4:
                    kids.append(content("recipient", rng.choice(["user", "notified body", "patient"])))
            elif roll < 0.8:
                tag = "ensuring_requirement"
                kids.append(content("ensured_concept", value))
            else:
                tag = "design_goal_requirement"
                kids.append(content("design_goal", value))
        elif kind == "component":
            tag = "design_goal_requirement"
            kids.append(content("design_goal", take("concept", CONTENTS[:8])))
            kids.append(content("concerned_component", take("component", COMPONENTS)))
        elif kind == "risk":
            tag = "mitigation_requirement"
            kids.append(risk("mitigated_risk", take("risk", list(RISKS)[:4]), explicit_defaults=rng.random() < 0.3,
                             one_for_true=rng.random() < 0.3))
            if pending["action"] or rng.random() < 0.4:
                kids.append(action("mitigating_action", take("action", ["encrypt data", "authenticate user", "apply patch"])))
        elif kind == "standard":
            tag = "ensuring_requirement"
            kids.append(standard("compliance_with_standard", take("standard", list(STANDARDS)[:3])))
        elif kind == "action":
            value = take("action", list(ACTIONS)[:4])
            tag = rng.choice(["ensuring_requirement", "documentation_requirement"])
            kids.append(action("ensured_action" if tag == "ensuring_requirement" else "documented_action", value))
        elif kind == "property":
            tag = "ensuring_requirement"
            kids.append(prop("ensured_property", take("property", list(PROPERTIES))))
        else:
            value = take("analysis", ["benefit-risk analysis"])
            if rng.random() < 0.5:
                tag = "evaluation_requirement"
                kids.append(analysis("evaluated_analysis", value))
            else:
                tag = "documentation_requirement"
                kids.append(analysis("documented_analysis", value))
        reqs.append(E(tag, attrs, kids))

    # same name, different structure: residual risk with two flag sets
    reqs.append(E("mitigation_requirement", {}, [
        leaf("name", f"REQ-{len(reqs) + 1:03d}"), content("actor_in_charge", "manufacturer"),
        risk("mitigated_risk", "residual risk", {"residual": "true"})]))
    reqs.append(E("mitigation_requirement", {}, [
        leaf("name", f"REQ-{len(reqs) + 1:03d}"), content("actor_in_charge", "manufacturer"),
        risk("mitigated_risk", "residual risk", {"residual": "true", "accepted": "true"})]))

    if cve:
        cves = ["CVE-2019-10964", "CVE-2020-27252", "CVE-2021-27410", "CVE-2022-22765"]
        for r, c in zip(reqs[:3], [cves[:2], cves[2:3], cves[3:]]):
            # after the Requirement base content, before the subtype's own children
            pos = 2 + sum(1 for k in r.children[2:4] if isinstance(k, E) and k.tag in ("related_event", "source"))
            for j, v in enumerate(c):
                r.children.insert(pos + j, leaf("invalidating_cve", v))
    return reqs


# independent fingerprint model --------------------------------------------

def values_of(elem, type_name):
    vals = set()
    for k, v in elem.attrs.items():
        dt, default = ATTRS[k]
        if dt == "anyURI":
            v = v.strip()
        if v != default:
            vals.add((k, v, dt))
    for c in elem.children:
        if not isinstance(c, E):
            dt, default = LEAVES[c[0]]
            v = c[1]
            if dt == "boolean":
                v = {"1": "true", "0": "false"}.get(v.strip(), v.strip())
            if v != default:
                vals.add((c[0], v, dt))
    return frozenset(vals)


def type_of_child(parent_type, tag):
    return CHILDREN[parent_type][tag]


def mint(name):
    out = []
    for b in name.strip().encode("utf-8"):
        ch = chr(b)
        if ch == " ":
            out.append("_")
        elif ch.isascii() and (ch.isalnum() or ch in "-._~"):
            out.append(ch)
        else:
            out.append(f"%{b:02X}")
    return "".join(out)


SCHEMA_TERMS = set()


def populate(reqs):
    """Post-order walk mirroring the documented dedup and naming rules."""
    registry = {}
    instances = {}  # local name -> (class, label)
    unnamed = {}
    stats = {"elements_seen": 0, "duplicates_referenced": 0, "instances_created": 0}
    collisions = []

    def visit(elem, type_name):
        children = set()
        for c in elem.children:
            if isinstance(c, E):
                ctype, p = type_of_child(type_name, c.tag)
                children.add((p, visit(c, ctype)))
        fp = (type_name, values_of(elem, type_name), frozenset(children))
        stats["elements_seen"] += 1
        if fp in registry:
            stats["duplicates_referenced"] += 1
            return fp
        label = next((c[1].strip() for c in elem.children if not isinstance(c, E) and c[0] == "name"), "")
        if not label:
            unnamed[type_name] = unnamed.get(type_name, 0) + 1
            label = f"{type_name}_{unnamed[type_name]}"
        local = mint(label)
        if local in instances or local in SCHEMA_TERMS:
            k = 2
            while f"{local}_{k}" in instances or f"{local}_{k}" in SCHEMA_TERMS:
                k += 1
            local = f"{local}_{k}"
            collisions.append(local)
        instances[local] = (type_name, label)
        registry[fp] = local
        stats["instances_created"] += 1
        return fp

    for r in reqs:
        visit(r, ROOT_CHILDREN[r.tag])
    return stats, instances, collisions


def main():
    global SCHEMA_TERMS
    schema_terms = set(CHILDREN) | {"AbstractContent", "Content", "Password", "Record", "Role", "Skill", "Threat",
                                    "Constraint", "Assurance", "Decision", "Risk", "Actor", "Standard", "Event",
                                    "ChangeEvent", "FailureEvent", "SuccessEvent", "Component", "StorageComponent",
                                    "Requirement", "RequirementList", "mergedInto"}
    for table in CHILDREN.values():
        for tag, (_, p) in table.items():
            schema_terms |= {tag, p}
    schema_terms |= set(LEAVES) | set(ATTRS) | set(ROOT_CHILDREN)
    SCHEMA_TERMS = schema_terms

    rng = random.Random(SEED)
    reqs = build(rng, 50)
    stats, instances, collisions = populate(reqs)
    rng_cve = random.Random(SEED)
    reqs_cve = build(rng_cve, 50, cve=True)
    stats_cve, _, _ = populate(reqs_cve)

    by_label = {}
    for local, (cls, label) in instances.items():
        by_label.setdefault((cls, label), []).append(local)

    def iri_of(cls, label):
        hits = by_label.get((cls, label), [])
        assert len(hits) == 1, (cls, label, hits)
        return hits[0]

    # ground truth
    classes = {}
    for local, (cls, _) in instances.items():
        classes.setdefault(cls, []).append(local)
    # ground-truth ids are instance names; suffixed collision copies go by local name
    def gt_id(local):
        label = instances[local][1]
        return label if mint(label) == local else local

    universe = sorted(tuple(sorted(map(gt_id, p))) for locs in classes.values() for p in itertools.combinations(locs, 2))
    positives = sorted(
        tuple(sorted((gt_id(iri_of(cls, a)), gt_id(iri_of(cls, b)))))
        for cls, group, _ in SYNONYMS
        for a, b in itertools.combinations(group, 2)
    )

    # stub oracle
    answers = []
    latency = random.Random(SEED + 1)
    true_forms = ["True", "true", "True.", "TRUE"]
    merged = 0
    for cls, group, judged in SYNONYMS:
        for a, b in itertools.combinations(group, 2):
            resp = latency.choice(true_forms) if judged == "true" else "False."
            answers.append({"a": a, "b": b, "response": resp, "latency_seconds": round(latency.uniform(2.5, 20.0), 2)})
        if judged == "true":
            merged += len(group) - 1
    for cls, group in FALSE_POSITIVES:
        for a, b in itertools.combinations(group, 2):
            answers.append({"a": a, "b": b, "response": "True", "latency_seconds": round(latency.uniform(2.5, 20.0), 2)})
        merged += len(group) - 1
    for cls, a, b, resp in UNPARSEABLE:
        iri_of(cls, a), iri_of(cls, b)
        answers.append({"a": a, "b": b, "response": resp, "latency_seconds": round(latency.uniform(2.5, 20.0), 2)})
    for cls, group, _ in SYNONYMS + [(c, g, None) for c, g in FALSE_POSITIVES]:
        for name in group:
            iri_of(cls, name)

    n = stats["instances_created"]
    expected = {
        **stats,
        "duplicate_ratio": stats["duplicates_referenced"] / stats["elements_seen"],
        "name_collisions": collisions,
        "instances_by_class": {c: len(v) for c, v in sorted(classes.items())},
        "candidate_pairs": len(universe),
        "positive_pairs": len(positives),
        "stub_merged_instances": merged,
        "instances_after_merge": n - merged,
        "reduction_ratio": merged / n,
        "cve": stats_cve,
    }

    OUT.mkdir(exist_ok=True)
    header = f'<?xml version="1.0" encoding="UTF-8"?>\n<requirements xmlns="{NS}">\n'
    for fname, rs in (("requirements.xml", reqs), ("requirements_cve.xml", reqs_cve)):
        body = "\n".join(line for r in rs for line in r.xml(1))
        (OUT / fname).write_text(header + body + "\n</requirements>\n")
    (OUT / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    (OUT / "ground_truth.json").write_text(json.dumps(
        {"universe": [list(p) for p in universe], "positives": [list(p) for p in positives]}, indent=1) + "\n")
    (OUT / "stub_oracle.json").write_text(json.dumps(
        {"default": "false", "default_latency_seconds": 4.0, "answers": answers}, indent=1) + "\n")
    (OUT / "reqonto.toml").write_text(
        'schema_path = "../schema/requirements.xsd"\n'
        'xml_path = "requirements.xml"\n'
        'ground_truth_path = "ground_truth.json"\n'
        'output_dir = "out"\n\n'
        "[oracle]\n"
        'kind = "stub"\n'
        'stub_path = "stub_oracle.json"\n'
        "price_per_call = 0.002\n"
    )
    print(json.dumps({k: v for k, v in expected.items() if k not in ("instances_by_class",)}, indent=1))


if __name__ == "__main__":
    main()
