#!/usr/bin/env python3
# Copyright 2026 The hqb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Assemble the benchmark inputs under data/ in the layout the harness expects.

  data/breastcancer.csv        30 features + label (copied from scikit-learn)
  data/banknote.csv            4 features + label (UCI download, if reachable)
  data/mnist/*-idx?-ubyte      IDX files; real MNIST if given via --mnist-dir,
                               otherwise a 9000/1000 split of the 10k digits
                               shipped in the npm `mnist` package
"""
import argparse
import csv
import gzip
import json
import os
import random
import shutil
import struct
import subprocess
import sys
import tarfile
import tempfile
import urllib.request

BANKNOTE_URL = ("https://archive.ics.uci.edu/ml/machine-learning-databases/"
                "00267/data_banknote_authentication.txt")


def breast_cancer(out):
    import sklearn
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data",
                       "breast_cancer.csv")
    with open(src) as f:
        rows = list(csv.reader(f))
    n, d = int(rows[0][0]), int(rows[0][1])
    path = os.path.join(out, "breastcancer.csv")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"f{i}" for i in range(d)] + ["label"])
        for r in rows[1:1 + n]:
            w.writerow(r[:d] + [r[d]])
    print(f"breastcancer: {n} rows -> {path}")


def banknote(out):
    path = os.path.join(out, "banknote.csv")
    if os.path.exists(path):
        print(f"banknote: using existing {path}")
        return
    try:
        with urllib.request.urlopen(BANKNOTE_URL, timeout=15) as r:
            body = r.read().decode()
    except Exception as e:  # offline sandboxes end up here
        print(f"banknote: download failed ({e}); place the UCI file at {path}")
        return
    with open(path, "w") as f:
        f.write(body)
    print(f"banknote: downloaded -> {path}")


def write_idx(path, images, labels):
    with open(path + "images", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with open(path + "labels", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def mnist_from_npm(out):
    tmp = tempfile.mkdtemp()
    try:
        subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=tmp, check=True,
                       stdout=subprocess.DEVNULL)
        tgz = [p for p in os.listdir(tmp) if p.endswith(".tgz")][0]
        with tarfile.open(os.path.join(tmp, tgz)) as t:
            t.extractall(tmp)
        train, test = [], []
        for digit in range(10):
            with open(os.path.join(tmp, "package", "src", "digits",
                                   f"{digit}.json")) as f:
                flat = json.load(f)["data"]
            samples = [flat[i:i + 784] for i in range(0, len(flat), 784)]
            pix = [[min(255, max(0, round(v * 255))) for v in s]
                   for s in samples]
            cut = len(pix) * 9 // 10
            train += [(p, digit) for p in pix[:cut]]
            test += [(p, digit) for p in pix[cut:]]
        rng = random.Random(20231)
        rng.shuffle(train)
        rng.shuffle(test)
    finally:
        shutil.rmtree(tmp)
    d = os.path.join(out, "mnist")
    os.makedirs(d, exist_ok=True)
    _write_split(d, train, test)
    print(f"mnist (npm subset): {len(train)} train / {len(test)} test -> {d}")


def _write_split(d, train, test):
    write_idx(os.path.join(d, "train-"), [p for p, _ in train],
              [l for _, l in train])
    write_idx(os.path.join(d, "t10k-"), [p for p, _ in test],
              [l for _, l in test])
    for prefix in ("train-", "t10k-"):
        os.replace(os.path.join(d, prefix + "images"),
                   os.path.join(d, prefix + "images-idx3-ubyte"))
        os.replace(os.path.join(d, prefix + "labels"),
                   os.path.join(d, prefix + "labels-idx1-ubyte"))


def mnist_from_dir(src, out):
    d = os.path.join(out, "mnist")
    os.makedirs(d, exist_ok=True)
    for name in ("train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                 "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"):
        for cand in (name, name + ".gz"):
            p = os.path.join(src, cand)
            if os.path.exists(p):
                opener = gzip.open if cand.endswith(".gz") else open
                with opener(p, "rb") as fi, open(os.path.join(d, name), "wb") as fo:
                    shutil.copyfileobj(fi, fo)
                break
        else:
            sys.exit(f"missing {name} in {src}")
    print(f"mnist: copied from {src} -> {d}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data"))
    ap.add_argument("--mnist-dir", help="directory with the original IDX files")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    breast_cancer(args.out)
    banknote(args.out)
    if args.mnist_dir:
        mnist_from_dir(args.mnist_dir, args.out)
    else:
        mnist_from_npm(args.out)


if __name__ == "__main__":
    main()
