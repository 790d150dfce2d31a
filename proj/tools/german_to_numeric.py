#!/usr/bin/env python3
# Copyright 2026 The prlab Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts the categorical Statlog German Credit file (german.data) into a
24-column integer layout with a trailing class column in {1, 2}.

Ordered categorical attributes are coded as integers; the purpose attribute
is expanded into five indicator columns. The column order is documented in
data/README.md and mirrored by data/german_space.json.

Usage: german_to_numeric.py data/german.data > data/german.data-numeric
"""

import sys


def code(token, prefix, base):
    return int(token[len(prefix):]) - base


PURPOSE_GROUPS = [
    {"A40"},                        # new car
    {"A41"},                        # used car
    {"A42", "A43", "A44", "A45"},   # furniture, radio/tv, appliances, repairs
    {"A46", "A47", "A48"},          # education, vacation, retraining
    {"A49", "A410"},                # business, others
]


def convert(fields):
    (checking, duration, history, purpose, amount, savings, employment,
     installment, status_sex, debtors, residence, prop, age, plans, housing,
     credits, job, liable, telephone, foreign, klass) = fields
    row = [
        code(checking, "A1", 0),       # 1..4
        int(duration),
        code(history, "A3", 0),        # 0..4
        int(amount),
        code(savings, "A6", 0),        # 1..5
        code(employment, "A7", 0),     # 1..5
        int(installment),
        code(status_sex, "A9", 0),     # 1..5
        code(debtors, "A10", 0),       # 1..3
        int(residence),
        code(prop, "A12", 0),          # 1..4
        int(age),
        code(plans, "A14", 0),         # 1..3
        code(housing, "A15", 0),       # 1..3
        int(credits),
        code(job, "A17", 0),           # 1..4
        int(liable),
        code(telephone, "A19", 0),     # 1..2
        code(foreign, "A20", 0),       # 1..2
    ]
    row += [1 if purpose in group else 0 for group in PURPOSE_GROUPS]
    row.append(int(klass))
    return row


def main():
    with open(sys.argv[1]) as f:
        for line in f:
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 21:
                sys.exit(f"expected 21 fields, got {len(fields)}")
            print(" ".join(f"{v:4d}" for v in convert(fields)))


if __name__ == "__main__":
    main()
