#!/usr/bin/env python3
# Copyright (c) 2026, The cfdlab Authors
# SPDX-License-Identifier: Apache-2.0
"""Counts head parameters by listing every layer shape.

Usage: param_audit.py M DIM IN_DIM NUM_CLS DIS_PS MOE LING
Prints the total on stdout.
"""

import sys
from itertools import combinations


def dense(fan_in, fan_out):
    return fan_in * fan_out + fan_out


def layers(m, dim, in_dim, num_cls, dis_ps, moe, ling):
    mods = range(m)
    subsets = [frozenset(mods)]
    subsets += [frozenset([j]) for j in mods]
    if dis_ps:
        for size in range(2, m):
            subsets += [frozenset(c) for c in combinations(mods, size)]
    k = len(subsets)

    out = []
    for s in subsets:
        out.append(("encoder " + ",".join(str(j + 1) for j in sorted(s)), in_dim, dim))
    if moe:
        for i in range(k):
            out.append((f"expert {i}", dim, dim))
        out.append(("gate_fc", k * dim, dim if ling else k))
    out.append(("classifier.0", k * dim, dim))
    out.append(("classifier.1", dim, dim))
    out.append(("classifier.2", dim, num_cls))
    return out


def main(argv):
    if len(argv) != 8:
        print(__doc__, file=sys.stderr)
        return 2
    m, dim, in_dim, num_cls = (int(a) for a in argv[1:5])
    dis_ps, moe, ling = (a not in ("0", "off", "false") for a in argv[5:8])
    print(sum(dense(i, o) for _, i, o in layers(m, dim, in_dim, num_cls, dis_ps, moe, ling)))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
