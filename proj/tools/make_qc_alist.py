#!/usr/bin/env python3
"""Expand a quasi-cyclic base matrix into an alist parity-check file.

Usage: make_qc_alist.py > data/qc_1296_r12.alist

The base matrix is the 12x24 rate-1/2 prototype with circulant size 54
(802.11n-class, n = 1296). Entry -1 is the all-zero block, s >= 0 is the
identity cyclically shifted right by s.
"""
import sys

Z = 54
BASE = """
40 -1 -1 -1 22 -1 49 23 43 -1 -1 -1  1  0 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1
50  1 -1 -1 48 35 -1 -1 13 -1 30 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1 -1
39 50 -1 -1  4 -1  2 -1 -1 -1 -1 49 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1 -1
33 -1 -1 38 37 -1 -1  4  1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1 -1
45 -1 -1 -1  0 22 -1 -1 20 42 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1 -1
51 -1 -1 48 35 -1 -1 -1 44 -1 18 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1 -1
47 11 -1 -1 -1 17 -1 -1 51 -1 -1 -1  0 -1 -1 -1 -1 -1  0  0 -1 -1 -1 -1
 5 -1 25 -1  6 -1 45 -1 13 40 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1 -1
33 -1 -1 34 24 -1 -1 -1 23 -1 -1 46 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1 -1
 1 -1 27 -1  1 -1 -1 -1 38 -1 44 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0 -1
-1 18 -1 -1 23 -1 -1  8  0 35 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0  0
49 -1 17 -1 30 -1 -1 -1 34 -1 -1 19  1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1  0
"""


def main():
    base = [[int(t) for t in line.split()] for line in BASE.strip().splitlines()]
    mb, nb = len(base), len(base[0])
    m, n = mb * Z, nb * Z
    rows = [[] for _ in range(m)]
    cols = [[] for _ in range(n)]
    for br, line in enumerate(base):
        for bc, shift in enumerate(line):
            if shift < 0:
                continue
            for r in range(Z):
                row = br * Z + r
                col = bc * Z + (r + shift) % Z
                rows[row].append(col)
                cols[col].append(row)
    for lst in rows + cols:
        lst.sort()
    max_col = max(len(c) for c in cols)
    max_row = max(len(r) for r in rows)
    out = sys.stdout
    out.write(f"{n} {m}\n{max_col} {max_row}\n")
    out.write(" ".join(str(len(c)) for c in cols) + "\n")
    out.write(" ".join(str(len(r)) for r in rows) + "\n")
    for c in cols:
        out.write(" ".join(str(x + 1) for x in c + [-1] * (max_col - len(c))) + "\n")
    for r in rows:
        out.write(" ".join(str(x + 1) for x in r + [-1] * (max_row - len(r))) + "\n")


if __name__ == "__main__":
    main()
