#!/usr/bin/env python3
"""Download benchmark datasets from OpenML as ARFF files.

usage: fetch_datasets.py [-o OUT_DIR] NAME [NAME ...]

Each NAME is an OpenML dataset name (e.g. vote, kr-vs-kp, monks-problems-2);
the first active version is fetched and written to OUT_DIR/NAME.arff. The
files under data/ were produced offline by make_synthetic.py and
convert_keel.py; this helper is only a convenience for users with network
access and nothing in the build or tests depends on it. Files fetched here
may differ row-for-row from the shipped copies.
"""
import argparse
import json
import os
import sys
import urllib.request

API = "https://www.openml.org/api/v1/json"


def get_json(url):
    with urllib.request.urlopen(url, timeout=60) as r:
        return json.load(r)


def fetch(name, out_dir):
    listing = get_json(f"{API}/data/list/data_name/{name}/status/active/limit/1")
    data_id = listing["data"]["dataset"][0]["did"]
    desc = get_json(f"{API}/data/{data_id}")["data_set_description"]
    path = os.path.join(out_dir, f"{name}.arff")
    with urllib.request.urlopen(desc["url"], timeout=300) as r, open(path, "wb") as f:
        f.write(r.read())
    print(f"{name}: OpenML id {data_id} -> {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="+")
    ap.add_argument("-o", "--out-dir", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    failed = 0
    for name in args.names:
        try:
            fetch(name, args.out_dir)
        except Exception as e:  # report and continue with the rest
            print(f"{name}: {e}", file=sys.stderr)
            failed += 1
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
