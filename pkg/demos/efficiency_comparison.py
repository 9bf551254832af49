"""
Intrinsic efficiency of two-way schemes
=======================================

eta = message qubits / (channel qubits + auxiliary qubits + classical bits),
recomputed from the column counts of the bundled comparison table.
"""
from twoway_teleport import cli

rows = cli.evaluate_schemes(cli.load_schemes(cli.default_schemes_path()))
print(f"{'scheme':<15} {'bqt':<9} {'eta':>7} {'claimed':>8}")
for r in rows:
    mark = "" if r["matches_claim"] else "  <- does not reproduce"
    print(f"{r['label']:<15} {r['bqt']:<9} {r['eta']:>7.4f} {r['claimed_eta']:>8.4f}{mark}")

best = max(rows, key=lambda r: r["eta"])
print("\nhighest eta:", ", ".join(r["label"] for r in rows if r["eta"] == best["eta"]))
