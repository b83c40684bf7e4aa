"""Regenerate the benchmark CSVs under data/ from the copies bundled with
scikit-learn. thyroid (new-thyroid, 215x5, 3 classes) and seeds (210x7,
3 classes) are not bundled by any installed package; place them as
data/thyroid.csv and data/seeds.csv (features then label column, with a
header row) to enable their benchmark rows.
"""

import argparse
import csv
import os

import sklearn


def copy_sklearn(name, out, header):
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data", name)
    with open(src) as f:
        rows = list(csv.reader(f))[1:]
    with open(out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    print("iris", copy_sklearn("iris.csv", os.path.join(args.out, "iris.csv"),
                               ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"]))
    print("wine", copy_sklearn("wine_data.csv", os.path.join(args.out, "wine.csv"),
                               [f"a{i}" for i in range(13)] + ["class"]))


if __name__ == "__main__":
    main()
