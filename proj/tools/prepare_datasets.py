#!/usr/bin/env python3
"""Convert the benchmark datasets into LIBSVM text files under data/.

svmguide3: CSV with a header row, label first, 21 numeric features.
german:    the categorical Statlog German credit table (20 attributes plus
           credit_risk, 1 = good, 2 = bad). Ordered categorical attributes
           become integer codes, purpose becomes five indicators, numeric
           attributes are copied, giving 24 features. good -> +1, bad -> -1.
"""

import argparse
import csv
import pathlib
import sys

ORDINAL = [
    ("status_of_existing_checking_account", "A1"),
    ("duration_in_month", None),
    ("credit_history", "A3"),
    ("credit_amount", None),
    ("savings_account/bonds", "A6"),
    ("present_employment_since", "A7"),
    ("installment_rate_in_percentage_of_disposable_income", None),
    ("personal_status_and_sex", "A9"),
    ("other_debtors/guarantors", "A10"),
    ("present_residence_since", None),
    ("property", "A12"),
    ("age_in_years", None),
    ("other_installment_plans", "A14"),
    ("housing", "A15"),
    ("number_of_existing_credits_at_this_bank", None),
    ("job", "A17"),
    ("number_of_people_being_liable_to_provide_maintenance_for", None),
    ("telephone", "A19"),
    ("foreign_worker", "A20"),
]
PURPOSE_INDICATORS = ["A40", "A41", "A42", "A43", "A49"]


def number(v):
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def libsvm_line(label, values):
    feats = " ".join(f"{i}:{number(v)}" for i, v in enumerate(values, start=1) if v != 0)
    return f"{label:+d} {feats}".rstrip()


def convert_svmguide3(src, dst):
    lines = []
    with open(src, newline="") as fh:
        rows = csv.reader(fh)
        next(rows)
        for row in rows:
            if not row:
                continue
            label = int(float(row[0]))
            lines.append(libsvm_line(label, [float(v) for v in row[1:]]))
    dst.write_text("\n".join(lines) + "\n")
    return len(lines)


def category_code(value, prefix):
    if not value.startswith(prefix):
        raise ValueError(f"unexpected category {value!r} for prefix {prefix}")
    return int(value[len(prefix):])


def convert_german(src, dst):
    lines = []
    with open(src, newline="") as fh:
        for row in csv.DictReader(fh):
            values = []
            for column, prefix in ORDINAL:
                raw = row[column]
                values.append(float(category_code(raw, prefix)) if prefix else float(raw))
            values.extend(1.0 if row["purpose"] == code else 0.0 for code in PURPOSE_INDICATORS)
            label = 1 if row["credit_risk"] == "1" else -1
            lines.append(libsvm_line(label, values))
    dst.write_text("\n".join(lines) + "\n")
    return len(lines)


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--svmguide3-csv", type=pathlib.Path, required=True)
    ap.add_argument("--german-csv", type=pathlib.Path, required=True)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    n = convert_svmguide3(args.svmguide3_csv, args.out / "svmguide3")
    print(f"svmguide3: {n} examples")
    n = convert_german(args.german_csv, args.out / "german")
    print(f"german: {n} examples")


if __name__ == "__main__":
    main(sys.argv[1:])
