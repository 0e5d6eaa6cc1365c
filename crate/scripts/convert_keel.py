#!/usr/bin/env python3
"""Write kr-vs-kp.arff and heart-statlog.arff from the KEEL copies shipped in
the keel-ds wheel (`pip download keel-ds --no-deps`).

usage: convert_keel.py <keel_ds-*.whl> [out_dir]
"""
import os
import sys
import zipfile

KRKP = ("bkblk bknwy bkon8 bkona bkspr bkxbq bkxcr bkxwp blxwp bxqsq cntxt dsopp dwipd "
        "hdchk katri mulch qxmsq r2ar8 reskd reskr rimmx rkxwp rxmsq simpl skach skewr "
        "skrxp spcop stlmt thrsk wkcti wkna8 wknck wkovl wkpos wtoeg").split()
KRKP_DOMS = {"dwipd": ["g", "l"], "katri": ["b", "n", "w"], "wtoeg": ["n", "t"]}

HEART = ["age", "sex", "chest", "resting_blood_pressure", "serum_cholestoral",
         "fasting_blood_sugar", "resting_electrocardiographic_results",
         "maximum_heart_rate_achieved", "exercise_induced_angina", "oldpeak", "slope",
         "number_of_major_vessels", "thal"]


def rows(z, name):
    text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    return [[c.strip() for c in l.split(",")] for l in text.splitlines() if l and not l.startswith("@")]


def main():
    z = zipfile.ZipFile(sys.argv[1])
    out = sys.argv[2] if len(sys.argv) > 2 else os.path.join(os.path.dirname(__file__), "..", "data")

    with open(os.path.join(out, "kr-vs-kp.arff"), "w", newline="\n") as f:
        f.write("% Chess end-game King+Rook versus King+Pawn on a7 (UCI), 3196 rows.\n")
        f.write("@relation kr-vs-kp\n\n")
        for a in KRKP:
            f.write(f"@attribute {a} {{{','.join(KRKP_DOMS.get(a, ['f', 't']))}}}\n")
        f.write("@attribute class {won,nowin}\n\n@data\n")
        for r in rows(z, "chess"):
            f.write(",".join(r) + "\n")

    with open(os.path.join(out, "heart-statlog.arff"), "w", newline="\n") as f:
        f.write("% Statlog heart disease (UCI), 270 rows.\n")
        f.write("@relation heart-statlog\n\n")
        for a in HEART:
            f.write(f"@attribute {a} real\n")
        f.write("@attribute class {absent,present}\n\n@data\n")
        for r in rows(z, "heart"):
            label = {"1": "absent", "2": "present"}[r[-1]]
            f.write(",".join(r[:-1] + [label]) + "\n")


if __name__ == "__main__":
    main()
