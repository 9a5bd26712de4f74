"""Regenerates the bundled disaster-assistance example: schema, ground truth
and the recorded LLM responses used by the offline tests."""

import csv
import json
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent
ROWS = 200

FIELDS = [
    ("registration_id", "Unique registration number", "free_text"),
    ("state", "State of the damaged dwelling", None),
    ("county", "County of the damaged dwelling", None),
    ("disaster_number", "Declared disaster number", None),
    ("incident_type", "Type of incident", None),
    ("household_size", "People in the household", None),
    ("age_of_applicant", "Applicant age", None),
    ("damage_amount", "Verified damage in USD", None),
    ("approved_amount", "Assistance approved in USD", None),
    ("inspected", "Whether an inspection took place", None),
    ("days_to_inspection", "Days from registration to inspection", None),
    ("zip_code", "Five digit ZIP code", "free_text"),
    ("occupancy", "Owner or renter", None),
    ("registration_date", "Date of registration", None),
]

COUNTIES = ["Harris", "Lee", "Orleans", "Pinellas", "Jefferson", "Polk", "Brazoria", "Collier"]


def ground_truth(rng):
    rows = []
    for i in range(ROWS):
        damage = "" if rng.random() < 0.05 else f"{rng.lognormal(8.5, 1.0):.2f}"
        inspected = rng.random() < 0.6
        rows.append({
            "registration_id": f"REG-{100001 + i:07d}",
            "state": rng.choice(["TX", "FL", "LA", "CA", "NC"], p=[0.35, 0.25, 0.15, 0.1, 0.15]),
            "county": f"{rng.choice(COUNTIES)} County",
            "disaster_number": str(rng.integers(4300, 4701)),
            "incident_type": rng.choice(["Hurricane", "Flood", "Severe Storm", "Fire"],
                                        p=[0.5, 0.25, 0.15, 0.1]),
            "household_size": str(min(12, max(1, rng.poisson(2.6)))),
            "age_of_applicant": str(int(round(min(95, max(18, rng.normal(48, 15)))))),
            "damage_amount": damage,
            "approved_amount": f"{rng.exponential(5000):.2f}",
            "inspected": "true" if inspected else "false",
            "days_to_inspection": str(int(round(rng.uniform(0, 30)))),
            "zip_code": f"{rng.integers(0, 100000):05d}",
            "occupancy": rng.choice(["Owner", "Renter", "Unknown"]),
            "registration_date": f"2024-{rng.choice(['08', '09', '10'])}-{rng.integers(10, 29)}",
        })
    return rows


def fenced(doc):
    return "```json\n" + json.dumps(doc) + "\n```"


def response(content, prompt, completion):
    return {"content": content, "prompt_tokens": prompt, "completion_tokens": completion}


SPECS = {
    "registration_id": {"kind": "free_text", "unique": True, "pattern": {
        "seq": ["REG-", {"counter": {"start": 100001, "width": 7}}]}},
    "state": {"kind": "categorical", "categories": [
        {"value": "TX", "prob": 0.35}, {"value": "FL", "prob": 0.25},
        {"value": "LA", "prob": 0.15}, {"value": "CA", "prob": 0.1},
        {"value": "NC", "prob": 0.15}]},
    "county": {"kind": "free_text", "pattern": {
        "seq": [{"one_of": COUNTIES}, " County"]}},
    "disaster_number": {"kind": "numerical",
                        "distribution": {"uniform_int": {"min": 4300, "max": 4700}}},
    "incident_type": {"kind": "categorical", "categories": [
        {"value": "Hurricane", "prob": 0.5}, {"value": "Flood", "prob": 0.25},
        {"value": "Severe Storm", "prob": 0.15}, {"value": "Fire", "prob": 0.1}]},
    "household_size": {"kind": "numerical", "distribution": {"poisson": {"lambda": 2.6}},
                       "rounding": "integer", "clamp": [1, 12]},
    "age_of_applicant": {"kind": "numerical",
                         "distribution": {"normal": {"mean": 48, "std": 15}},
                         "rounding": "integer", "clamp": [18, 95]},
    "damage_amount": {"kind": "numerical", "distribution": {"lognormal": {"mu": 8.5, "sigma": 1.0}},
                      "rounding": {"decimals": 2}, "null_rate": 0.05},
    "approved_amount": {"kind": "numerical", "distribution": {"exponential": {"rate": 0.0002}},
                        "rounding": {"decimals": 2}},
    "inspected": {"kind": "categorical", "categories": [
        {"value": "true", "prob": 0.6}, {"value": "false", "prob": 0.4}]},
    "days_to_inspection": {"kind": "numerical", "distribution": {"uniform": {"min": 0, "max": 30}},
                           "rounding": "integer"},
    "zip_code": {"kind": "free_text", "pattern": {"chars": {"class": "digits", "length": 5}}},
    "occupancy": {"kind": "categorical", "categories": ["Owner", "Renter", "Unknown"]},
    "registration_date": {"kind": "free_text", "pattern": {"seq": [
        "2024-", {"one_of": ["08", "09", "10"]}, "-", {"int_range": {"lo": 10, "hi": 28}}]}},
}

# First answers that the validator rejects, so the bundled run exercises repair.
INVALID_FIRST = {
    "state": {"kind": "categorical", "categories": [
        {"value": "TX", "prob": 0.35}, {"value": "FL", "prob": 0.25},
        {"value": "LA", "prob": 0.15}, {"value": "CA", "prob": 0.15}]},
    "damage_amount": {"kind": "numerical",
                      "distribution": {"lognormal": {"mu": 8.5, "sigma": -1.0}}},
}


def main():
    rng = np.random.default_rng(20241014)
    rows = ground_truth(rng)
    with open(HERE / "ground_truth.csv", "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=[name for name, _, _ in FIELDS], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    schema = {"dataset_name": "disaster_assistance", "fields": []}
    for name, description, kind in FIELDS:
        entry = {"name": name, "description": description}
        if kind:
            entry["declared_kind"] = kind
        schema["fields"].append(entry)
    (HERE / "schema.json").write_text(json.dumps(schema, indent=2) + "\n")

    enrich = []
    for i, (name, description, _) in enumerate(FIELDS):
        text = f"{description}. Values follow the formats seen in the registration records."
        enrich.append(response(text, 180 + 7 * i, 30 + i))
    (HERE / "enrich_fixtures.json").write_text(json.dumps(enrich, indent=2) + "\n")

    labels = {name: SPECS[name]["kind"] for name, _, _ in FIELDS}
    plan = [response(fenced(labels), 640, 210)]
    for i, (name, _, _) in enumerate(FIELDS):
        if name in INVALID_FIRST:
            plan.append(response(fenced({"spec_version": 1, **INVALID_FIRST[name]}), 900 + i, 70))
        plan.append(response(fenced({"spec_version": 1, **SPECS[name]}), 850 + 11 * i, 60 + 3 * i))
    (HERE / "plan_fixtures.json").write_text(json.dumps(plan, indent=2) + "\n")


if __name__ == "__main__":
    main()
