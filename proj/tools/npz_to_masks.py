#!/usr/bin/env python3
"""Convert Geom-GCN split files (*_split_0.6_0.2_<i>.npz) into the mask text
format read by `gesn` and the acceptance suite: one line per node with three
0/1 flags "train val test".

    tools/npz_to_masks.py texas_split_0.6_0.2_*.npz --out $GESN_DATA_DIR/texas
"""

import argparse
import pathlib
import re

import numpy as np


def split_index(path: pathlib.Path) -> int:
    m = re.search(r"_(\d+)\.npz$", path.name)
    if not m:
        raise SystemExit(f"{path}: cannot read split index from file name")
    return int(m.group(1))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("npz", nargs="+", type=pathlib.Path)
    parser.add_argument("--out", type=pathlib.Path, required=True)
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for path in sorted(args.npz, key=split_index):
        with np.load(path) as data:
            masks = np.stack([data["train_mask"], data["val_mask"], data["test_mask"]], axis=1).astype(int)
        target = args.out / f"split_mask_{split_index(path)}.txt"
        np.savetxt(target, masks, fmt="%d")
        print(f"{path.name} -> {target} ({masks.shape[0]} nodes, train/val/test {masks.sum(axis=0).tolist()})")


if __name__ == "__main__":
    main()
