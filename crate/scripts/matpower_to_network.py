#!/usr/bin/env python3
"""Convert MATPOWER's case69.m into the network JSON document.

The MATPOWER case only carries the 68 radial sections of the Baran & Wu
69-bus feeder. The five normally-open tie switches are added from the
original publication. Impedances are converted from ohms to per unit on a
10 kVA / 12.66 kV base, loads from kW/kvar to per unit on the same base.

usage: matpower_to_network.py path/to/case69.m > baran_wu_69.json
"""
import json
import re
import sys

BASE_KVA = 10.0
BASE_KV = 12.66
TIES = [(11, 43, 0.5, 0.5), (13, 21, 0.5, 0.5), (15, 46, 1.0, 1.0),
        (50, 59, 2.0, 2.0), (27, 65, 1.0, 1.0)]


def table(text, name):
    body = re.search(r"mpc\.%s = \[[^\n]*\n(.*?)\];" % name, text, re.S).group(1)
    return [line.replace(";", " ").split() for line in body.strip().splitlines()
            if line.strip() and not line.strip().startswith("%")]


def main(path):
    text = open(path).read()
    z_base = BASE_KV ** 2 / (BASE_KVA / 1000.0)
    nodes = []
    for f in table(text, "bus"):
        bus, kind = int(f[0]), int(f[1])
        supply = kind == 3
        nodes.append({
            "id": str(bus),
            "kind": "supply" if supply else "load",
            "p_pu": 0.0 if supply else float(f[2]) / BASE_KVA,
            "q_pu": 0.0 if supply else float(f[3]) / BASE_KVA,
            "v_min": float(f[12]),
            "v_max": float(f[11]),
        })
    rows = [(int(f[0]), int(f[1]), float(f[2]), float(f[3]), False)
            for f in table(text, "branch")]
    rows += [(a, b, r, x, True) for a, b, r, x in TIES]
    branches = [{
        "id": str(k + 1),
        "from": str(a),
        "to": str(b),
        "r_pu": r / z_base,
        "x_pu": x / z_base,
        "initially_open": tie,
    } for k, (a, b, r, x, tie) in enumerate(rows)]
    doc = {
        "base_power_kVA": BASE_KVA,
        "base_voltage_kV": BASE_KV,
        "nodes": nodes,
        "branches": branches,
    }
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
