"""Generate the bundled BG1-pattern base graph asset.

The shipped table reproduces the structural conventions of the 5G NR base
graph 1 (46 rows x 68 columns, 22 information columns, a dual-diagonal core
in columns 22-25 whose weight-3 column is column 22, one degree-1 extension
parity column per row from row 4 on, high-degree leading columns that are
punctured at transmission). The circulant shift coefficients are drawn from
a fixed-seed generator rather than copied from TS 38.212, which is not
redistributable here; any table in the same "rows cols / row col shift"
format can be dropped in instead.

Run from the repository root:

    python scripts/gen_bg1_table.py > src/ldpcsched/assets/bg1.csv
"""

import numpy as np

ROWS, COLS = 46, 68
INFO_COLS = 22
CORE_ROWS = 4
MAX_SHIFT = 384
SEED = 20250614

# Dense core rows: information-column supports plus the dual-diagonal
# parity part {22,23}/{22,23,24}/{24,25}/{22,25}. Row degree 19 each.
CORE_SUPPORT = [
    [0, 1, 2, 3, 5, 6, 9, 10, 11, 12, 13, 15, 16, 18, 19, 20, 21, 22, 23],
    [0, 2, 3, 4, 5, 7, 8, 9, 11, 12, 14, 15, 16, 17, 19, 21, 22, 23, 24],
    [0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 13, 14, 15, 17, 18, 19, 20, 24, 25],
    [0, 1, 3, 4, 6, 7, 8, 10, 11, 12, 13, 14, 16, 17, 18, 20, 21, 22, 25],
]

# Row degrees (including the degree-1 extension column) for rows 5..45.
# Chosen to taper like the NR profile and to land on 316 entries total.
EXT_PROFILE = [
    8, 9, 7, 10, 9, 7, 8, 7,
    6, 7, 7, 6, 6, 6, 6, 5,
    5, 6, 5, 5, 5, 5, 4, 5,
    5, 4, 5, 5, 4, 5, 4, 5,
    6, 5, 5, 5, 5, 5, 5, 5, 5,
]

TARGET_ENTRIES = 316


def build_entries():
    rng = np.random.default_rng(SEED)
    entries = []
    for r, support in enumerate(CORE_SUPPORT):
        for c in support:
            entries.append((r, c))
    # Row 4 opens the extension part: both punctured columns plus its parity.
    entries += [(4, 0), (4, 1), (4, 26)]

    assert len(EXT_PROFILE) == ROWS - 5
    for i, deg in enumerate(EXT_PROFILE):
        r = 5 + i
        cols = [26 + (r - CORE_ROWS)]
        # Keep the punctured columns heavy, alternating between them.
        cols.append(r % 2)
        pool = [c for c in range(2, 26)]
        picks = rng.choice(len(pool), size=deg - 2, replace=False)
        cols.extend(pool[p] for p in sorted(picks))
        assert len(set(cols)) == deg
        entries += [(r, c) for c in cols]

    assert len(entries) == TARGET_ENTRIES, len(entries)
    shifts = rng.integers(0, MAX_SHIFT, size=len(entries))
    table = sorted((r, c, int(s)) for (r, c), s in zip(entries, shifts))
    return table


def main():
    table = build_entries()
    print(f"{ROWS} {COLS}")
    for r, c, s in table:
        print(f"{r} {c} {s}")


if __name__ == "__main__":
    main()
