"""Counting models with nothing but a leakage comparison oracle.

A formula's model count is recovered by binary search: each step compares
a program built from the formula with the same program built from a
reference formula that has exactly n models.  The trace shows the search
interval and the number of oracle consultations against the proved bound.

Run: python3 demos/counting_with_oracles.py
"""
import random

from qifcheck.counting import ORACLE_KINDS, count_via_oracle, gen_count_formula, sharp_sat_enum
from qifcheck.lang import parse_formula, render_formula
from qifcheck.randprog import random_formula

print("Reference formulas with an exact number of models over x1..x3:")
names = ["x1", "x2", "x3"]
for k in (0, 1, 5, 8):
    f = gen_count_formula(k, names)
    print(f"  k={k}: {render_formula(f)}  ({sharp_sat_enum(f, names)} models)")

phi = parse_formula("(a | b) & !(c & d) & (e => a)")
print(f"\nphi = {render_formula(phi)}")
print(f"enumeration: {sharp_sat_enum(phi)} models")
for kind in ORACLE_KINDS:
    run = count_via_oracle(phi, kind)
    steps = " ".join(f"[{l},{r})" for l, r, _ in run.trace)
    print(f"  {kind}: count {run.count}, {run.oracle_calls} calls (bound {run.call_bound})  {steps}")

rng = random.Random(7)
vars10 = [f"v{i}" for i in range(10)]
print("\nTen random 10-variable formulas under the GE oracle:")
for _ in range(10):
    f = random_formula(rng, vars10, 14)
    run = count_via_oracle(f, "GE", vars10)
    print(f"  count {run.count:5d}  enumeration {sharp_sat_enum(f, vars10):5d}  calls {run.oracle_calls}")
