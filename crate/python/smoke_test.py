"""Smoke test for the `dbs` extension module.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import json
import os
import sys
import tempfile

import dbs


def check(cond, msg):
    if not cond:
        print(f"FAIL: {msg}")
        sys.exit(1)
    print(f"ok   {msg}")


def main():
    check("Hepta" in dbs.fcps_names(), "fcps_names lists Hepta")

    ds = dbs.Dataset.fcps("Hepta", seed=1)
    check(len(ds) == 212 and ds.dim == 3, f"{ds!r}")
    d = ds.dissimilarity()
    check(d.get(0, 0) == 0.0 and d.get(0, 1) == d.get(1, 0), "dissimilarity is symmetric")

    p1 = dbs.project(d, seed=7)
    p2 = dbs.project(d, seed=7)
    check(p1.to_json() == p2.to_json(), "projection is deterministic per seed")
    check(len(set(p1.positions)) == len(ds), "one bot per cell")
    check(p1.safeguard_exits() == 0, f"{len(p1.epochs)} epochs, no safeguard exits")

    model = dbs.Model.from_projection(d, p1)
    result = model.cluster(7, "compact")
    acc = dbs.accuracy(result.labels, ds.labels)
    check(acc >= 0.95, f"Hepta compact k=7 accuracy {acc:.3f}")
    check(abs(dbs.error_rate(result.labels, ds.labels) - (1 - acc)) < 1e-15, "error_rate = 1 - accuracy")
    check(len(result.merges()) == len(ds) - 1, "dendrogram has n - 1 merges")

    marked = result.with_marked([0, 1])
    check(marked.outlier_label is not None and marked.labels[0] == marked.outlier_label, "marking moves points")
    check(marked.with_marked([]) == marked and result.with_marked([]) == result, "empty mark is identity")
    body = json.loads(result.to_json())
    check(body["k"] == 7 and body["mode"] == "compact", "ClusterResult JSON")

    topo = model.topomap
    check(len(topo.grid_heights) == topo.lines * topo.columns, "heightmap covers the grid")
    check(min(topo.grid_heights) >= 0.0 and max(topo.grid_heights) <= 1.0, "heights normalized")
    with tempfile.TemporaryDirectory() as tmp:
        png = os.path.join(tmp, "map.png")
        topo.write_png(png, scale=2)
        with open(png, "rb") as f:
            check(f.read(4) == b"\x89PNG", "PNG written")

    check(model.tendency_gap("connected") > 0.0, "tendency gap")
    check(model.geodesic(0, 1) >= 0.0 and len(model.edges()) == 3 * len(ds), "neighbour graph")

    try:
        model.cluster(0, "compact")
    except dbs.DbsError as e:
        check("k = 0" in str(e), "k = 0 raises DbsError")
    else:
        check(False, "k = 0 raises DbsError")
    try:
        dbs.DissimilarityMatrix([[0.0, 1.0], [2.0, 0.0]])
    except ValueError:
        check(True, "asymmetric matrix raises ValueError")
    else:
        check(False, "asymmetric matrix raises ValueError")

    km = dbs.kmeans(dbs.Dataset.fcps("Chainlink", seed=1), 2, seed=1)
    check(len(km) == 1000, "k-means baseline runs")
    print("smoke test passed")


if __name__ == "__main__":
    main()
