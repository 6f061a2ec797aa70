"""Prepare and verify benchmark CSV files under ``data/``.

Wine is rebuilt from the copy bundled with scikit-learn. The remaining tables
come from Kaggle, which needs an account, so they must be downloaded by hand
and placed under the file names listed below; this script then reports
their shape so it can be compared with the expected one.

Usage::

    python scripts/fetch_datasets.py            # verify what is present
    python scripts/fetch_datasets.py --wine     # rebuild data/wine.csv
"""

import argparse
import hashlib
import os
import sys

import numpy as np

from lmphnn import Dataset, DatasetError, load_csv
from lmphnn.dataset import write_csv

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "data")
CHECKSUMS = os.path.join(DATA, "checksums.sha256")

# file name -> (description, samples, attributes, classes) after cleaning
MANUAL = {
    "pm.csv": ("Predictive Maintenance", 10000, 12, 2),
    "sl.csv": ("Sleep health and lifestyle", 378, 12, 3),
    "titanic.csv": ("Titanic", 889, 8, 3),
    "aps.csv": ("Airline Passenger Satisfaction", 981, 23, 3),
    "bm.csv": ("Bank Marketing", 4878, 17, 2),
    "bc.csv": ("Breast Cancer", 4024, 16, 2),
    "tc.csv": ("Telecom Churn", 2666, 20, 2),
    "mqp.csv": ("Milk Quality Prediction", 1059, 8, 3),
}


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def read_checksums():
    if not os.path.exists(CHECKSUMS):
        return {}
    out = {}
    with open(CHECKSUMS) as fh:
        for line in fh:
            if line.strip():
                digest, name = line.split()
                out[name] = digest
    return out


def build_wine(path):
    from sklearn.datasets import load_wine

    raw = load_wine()
    y = np.array([str(t + 1) for t in raw.target])
    names = tuple(n.replace("/", "_") for n in raw.feature_names)
    ds = Dataset(raw.data, y, ("1", "2", "3"), name="wine", feature_names=names)
    write_csv(ds, path, label_name="class")


def verify():
    ok = True
    for name, digest in read_checksums().items():
        path = os.path.join(DATA, name)
        if not os.path.exists(path):
            print(f"missing   {name}")
            ok = False
        elif sha256(path) != digest:
            print(f"MISMATCH  {name}")
            ok = False
        else:
            print(f"ok        {name}")
    for name, (desc, n, d, m) in MANUAL.items():
        path = os.path.join(DATA, name)
        if not os.path.exists(path):
            print(f"absent    {name}: place the Kaggle '{desc}' table here (expected N={n} d={d} classes={m})")
            continue
        try:
            ds = load_csv(path)
        except DatasetError as exc:
            print(f"invalid   {name}: {exc}")
            ok = False
            continue
        shape = (ds.n_samples, ds.dim, len(ds.classes))
        tag = "ok" if shape == (n, d, m) else "differs"
        print(f"{tag:<9} {name}: N={shape[0]} d={shape[1]} classes={shape[2]} (expected N={n} d={d} classes={m})")
    return ok


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--wine", action="store_true", help="rebuild data/wine.csv from scikit-learn")
    args = parser.parse_args(argv)
    if args.wine:
        build_wine(os.path.join(DATA, "wine.csv"))
    return 0 if verify() else 1


if __name__ == "__main__":
    sys.exit(main())
