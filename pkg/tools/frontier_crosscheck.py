#!/usr/bin/env python3
"""Independent audit of the frontier fixture by direct probability summation.

Recomputes tests/fixtures/frontier_reference.csv from scratch — plain dicts
and math.fsum, no imports from the package under test — and exits non-zero on
any disagreement.  The audit has four parts:

1. rebuild the five-variable source law of models/reference_tree.json from its
   defining constants;
2. re-run the per-encoder search the collapsed bound permits on a tree: for
   each encoder, scan every 2x2 test channel on the 0.05 probability grid,
   keep those whose optimal decoder meets the distortion ceiling, and minimize
   I(X;W) - I(W;Z,F) directly;
3. confirm the fixture row's channels are feasible and reproduce its printed
   rates and total at output precision;
4. confirm the decomposition that step 2 relies on, on the fixture's own
   channels: I(W_m; W_rest, Z, F) equals I(W_m; Z, F), and each channel is a
   valid test channel given its source alone.
"""

from __future__ import annotations

import csv
import math
import sys
from itertools import product
from pathlib import Path

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "frontier_reference.csv"

# generating constants of models/reference_tree.json
F_PRIOR = (0.5, 0.5)
Z_GIVEN_F = 0.1   # crossover probabilities down the chain
X1_GIVEN_Z = 0.1
X2_GIVEN_Z = 0.2
X3_GIVEN_F = 0.1

TARGETS = (0.1, 0.1, 0.1)
GRID_STEP = 0.05
ROUNDING = 1e-6        # printed at six significant digits, values here are < 1
SLACK = 1e-9


def flip(p):
    """Binary channel matrix with crossover p, as row tuples."""
    return ((1.0 - p, p), (p, 1.0 - p))


def source_law():
    """p(f, z, x1, x2, x3) as a dict keyed by symbol tuples."""
    z_f = flip(Z_GIVEN_F)
    x1_z = flip(X1_GIVEN_Z)
    x2_z = flip(X2_GIVEN_Z)
    x3_f = flip(X3_GIVEN_F)
    law = {}
    for f, z, x1, x2, x3 in product(range(2), repeat=5):
        law[(f, z, x1, x2, x3)] = (
            F_PRIOR[f] * z_f[f][z] * x1_z[z][x1] * x2_z[z][x2] * x3_f[f][x3]
        )
    return law


def marginal(law, axes):
    out = {}
    for key, p in law.items():
        sub = tuple(key[a] for a in axes)
        out[sub] = out.get(sub, 0.0) + p
    return out


def entropy(law):
    return -math.fsum(p * math.log2(p) for p in law.values() if p > 0.0)


def entropy_of(law, axes):
    return entropy(marginal(law, axes))


def mutual_information(law, a_axes, b_axes):
    return (entropy_of(law, a_axes) + entropy_of(law, b_axes)
            - entropy_of(law, tuple(a_axes) + tuple(b_axes)))


def conditional_mi(law, a_axes, b_axes, c_axes):
    c = tuple(c_axes)
    return (entropy_of(law, tuple(a_axes) + c) + entropy_of(law, tuple(b_axes) + c)
            - entropy_of(law, tuple(a_axes) + tuple(b_axes) + c) - entropy_of(law, c))


def attach_channel(law3, rows):
    """p(x, z, f) -> p(x, z, f, w) for a channel given by row tuples."""
    out = {}
    for (x, z, f), p in law3.items():
        for w, q in enumerate(rows[x]):
            out[(x, z, f, w)] = p * q
    return out


def bayes_distortion(law4):
    """Expected Hamming loss of the optimal decoder seeing (w, z, f)."""
    joint = {}
    for (x, z, f, w), p in law4.items():
        joint.setdefault((w, z, f), {})[x] = joint.get((w, z, f), {}).get(x, 0.0) + p
    total = 0.0
    for cell in joint.values():
        total += sum(cell.values()) - max(cell.values())
    return total


def encoder_rate(law4):
    """I(X;W) - I(W;Z,F) on axes (x, z, f, w)."""
    return mutual_information(law4, (0,), (3,)) - mutual_information(law4, (3,), (1, 2))


def grid_channels(step):
    ticks = [i * step for i in range(int(round(1.0 / step)) + 1)]
    rows = [(a, 1.0 - a) for a in ticks]
    return [ (r0, r1) for r0 in rows for r1 in rows ]


def per_encoder_minimum(law5, encoder, target, step):
    # law5 axes: (f, z, x1, x2, x3); encoder m reads axis m + 1
    law3 = marginal(law5, (encoder + 1, 1, 0))  # -> (x, z, f)
    best = None
    for rows in grid_channels(step):
        law4 = attach_channel(law3, rows)
        if bayes_distortion(law4) > target + SLACK:
            continue
        rate = encoder_rate(law4)
        if best is None or rate < best:
            best = rate
    return best


def full_law_with_channels(law5, channel_rows):
    """p(f, z, x1, x2, x3, w1, w2, w3) for per-source channels."""
    out = {}
    for (f, z, x1, x2, x3), p in law5.items():
        xs = (x1, x2, x3)
        for w1 in range(2):
            for w2 in range(2):
                for w3 in range(2):
                    ws = (w1, w2, w3)
                    q = p
                    for m in range(3):
                        q *= channel_rows[m][xs[m]][ws[m]]
                    if q:
                        out[(f, z, x1, x2, x3, w1, w2, w3)] = q
    return out


def fail(msg):
    print(f"frontier cross-check FAILED: {msg}", file=sys.stderr)
    return 1


def main(path=FIXTURE):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) != 2:
        return fail(f"expected a header and one data row, found {len(rows)} rows")
    header, row = rows
    if header[:8] != ["D1", "D2", "D3", "R1", "R2", "R3", "sum_rate", "bound_form"]:
        return fail(f"unexpected header {header[:8]}")
    if len(row) != 8 + 12:
        return fail(f"expected 12 channel parameters for 2x2 channels, row has {len(row) - 8}")

    targets = tuple(float(v) for v in row[0:3])
    printed_rates = tuple(float(v) for v in row[3:6])
    printed_total = float(row[6])
    params = [float(v) for v in row[8:]]
    channel_rows = [
        ((params[4 * m + 0], params[4 * m + 1]), (params[4 * m + 2], params[4 * m + 3]))
        for m in range(3)
    ]

    if targets != TARGETS:
        return fail(f"distortion targets {targets} differ from frozen {TARGETS}")
    for m, rows_m in enumerate(channel_rows, start=1):
        for i, r in enumerate(rows_m):
            if abs(sum(r) - 1.0) > 1e-9 or min(r) < 0.0:
                return fail(f"encoder {m} row {i} is not a distribution: {r}")

    law5 = source_law()

    # part 2: independent per-encoder search
    for m in range(3):
        best = per_encoder_minimum(law5, m + 1, TARGETS[m], GRID_STEP)
        if best is None:
            return fail(f"encoder {m + 1}: no feasible channel on the grid, fixture claims one")
        if abs(best - printed_rates[m]) > ROUNDING:
            return fail(
                f"encoder {m + 1}: independent minimum {best!r} vs fixture {printed_rates[m]!r}"
            )

    # part 3: the fixture's own channels reproduce the printed row
    recomputed = []
    for m in range(3):
        law3 = marginal(law5, (m + 2, 1, 0))
        law4 = attach_channel(law3, channel_rows[m])
        d = bayes_distortion(law4)
        if d > TARGETS[m] + SLACK:
            return fail(f"encoder {m + 1}: fixture channel distortion {d} exceeds {TARGETS[m]}")
        recomputed.append(encoder_rate(law4))
    for m in range(3):
        if abs(recomputed[m] - printed_rates[m]) > ROUNDING:
            return fail(
                f"encoder {m + 1}: fixture channel rate {recomputed[m]!r} "
                f"vs printed {printed_rates[m]!r}"
            )
    if abs(sum(recomputed) - printed_total) > 3 * ROUNDING:
        return fail(f"sum rate {sum(recomputed)!r} vs printed {printed_total!r}")

    # part 4: the decomposition the search relies on, on the fixture's channels
    law8 = full_law_with_channels(law5, channel_rows)
    w_axes = (5, 6, 7)
    for m in range(3):
        w = (w_axes[m],)
        rest = tuple(a for a in w_axes if a != w_axes[m]) + (1, 0)
        gap = mutual_information(law8, w, rest) - mutual_information(law8, w, (1, 0))
        if abs(gap) > 1e-10:
            return fail(f"encoder {m + 1}: I(W;W_rest,Z,F) - I(W;Z,F) = {gap!r}, not 0")
        x = (m + 2,)
        other_x = tuple(a for a in (2, 3, 4) if a != m + 2) + (1, 0)
        leak = conditional_mi(law8, w, other_x, x)
        if abs(leak) > 1e-10:
            return fail(f"encoder {m + 1}: channel leaks beyond its source, I = {leak!r}")

    print("frontier cross-check passed: per-encoder minima, fixture channel rates, "
          "distortions, and the tree decomposition all agree")
    return 0


if __name__ == "__main__":
    sys.exit(main(Path(sys.argv[1]) if len(sys.argv) > 1 else FIXTURE))
