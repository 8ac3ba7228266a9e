#!/usr/bin/env python3
"""Fetch the benchmark data sets (KEEL copies from the keel-ds wheel) and write plain CSV files."""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

# output name -> (path inside the wheel, label filter or None)
DATASETS = {
    "iris2": ("keel_ds/data/balanced/raw/iris.dat", {"Iris-setosa", "Iris-versicolor"}),
    "sonar": ("keel_ds/data/balanced/raw/sonar.dat", None),
    "breast_cancer": ("keel_ds/data/balanced/raw/wisconsin.dat", None),
    "bupa": ("keel_ds/data/balanced/raw/bupa.dat", None),
    "pima": ("keel_ds/data/balanced/raw/pima.dat", None),
    "ecoli1": ("keel_ds/data/imbalanced/raw/ecoli1.dat", None),
    "ecoli2": ("keel_ds/data/imbalanced/raw/ecoli2.dat", None),
    "glass2": ("keel_ds/data/imbalanced/raw/glass2.dat", None),
    "glass4": ("keel_ds/data/imbalanced/raw/glass4.dat", None),
}


def keel_to_csv(text, keep):
    header = []
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("@"):
            parts = line.split()
            if parts[0].lower() == "@attribute":
                header.append(parts[1].split("{")[0])
            continue
        fields = [f.strip() for f in line.split(",")]
        if keep is not None and fields[-1] not in keep:
            continue
        rows.append(fields)
    out = io.StringIO()
    if len(header) == len(rows[0]):
        out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(r) + "\n")
    return out.getvalue(), len(rows)


def find_wheel(directory):
    wheels = sorted(pathlib.Path(directory).glob("keel_ds-*.whl"))
    return wheels[-1] if wheels else None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", type=pathlib.Path)
    ap.add_argument("--wheel", type=pathlib.Path, help="use an already downloaded keel-ds wheel")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    if all((args.out / f"{name}.csv").exists() for name in DATASETS):
        print(f"data sets already present in {args.out}")
        return 0

    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel
        if wheel is None:
            cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary", ":all:",
                   "--dest", tmp, "--quiet", "keel-ds==0.2.5"]
            if subprocess.run(cmd).returncode != 0:
                print("NOTICE: could not download keel-ds; data sets unavailable", file=sys.stderr)
                return 0
            wheel = find_wheel(tmp)
            if wheel is None:
                print("NOTICE: keel-ds wheel not found after download", file=sys.stderr)
                return 0
        with zipfile.ZipFile(wheel) as zf:
            for name, (member, keep) in DATASETS.items():
                text = zf.read(member).decode("utf-8")
                csv, n = keel_to_csv(text, keep)
                (args.out / f"{name}.csv").write_text(csv)
                print(f"{name}: {n} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
