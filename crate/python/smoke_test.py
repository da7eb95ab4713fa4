#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Build the extension first:

    cargo build -p cacti-py --release

then run this script; it locates the compiled module under target/release.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    release = ROOT / "target" / "release"
    candidates = list(release.glob("libcacti_py.so")) + list(release.glob("cacti_py.so"))
    if not candidates:
        sys.exit("build the bindings first: cargo build -p cacti-py --release")
    stage = Path(tempfile.mkdtemp(prefix="cacti_py_"))
    shutil.copy(candidates[0], stage / "cacti_py.so")
    sys.path.insert(0, str(stage))
    import cacti_py

    return cacti_py


def main():
    m = load_module()

    # tree census: four trees in arity two, split by dimension
    census = m.tree_census(2)
    assert len(census) == 4, census
    assert sorted(d for d, _ in census) == [0, 0, 1, 1]

    # homology of the cacti complexes over both fields
    assert m.betti(2, "f2") == [1, 1]
    assert m.betti(3, "f2") == [1, 3, 2]
    assert m.betti(3, "q") == [1, 3, 2]
    assert m.betti(4, "f2") == [1, 6, 11, 6]

    # composition: inserting a one-lobe cactus changes nothing
    star2 = m.star_cactus(2)
    star1 = m.star_cactus(1)
    composed = m.compose_cacti(star2, 1, star1)
    assert json.loads(composed) == json.loads(star2)

    # membership gate and projection
    star = {"intervals": [["-1", "0"], ["0", "1"]], "order": []}
    assert m.ov_member(json.dumps(star)) == "b(w1w2)"
    projected = json.loads(m.ov_project(json.dumps(star)))
    assert projected["tree"]["colors"] == "bww"

    nested = {"intervals": [["-1", "0"], ["0", "1"], ["-1/2", "1/2"]],
              "order": [[1, 3], [2, 3]]}
    assert m.ov_member(json.dumps(nested)) is None

    # fibers over every arity-two cell are nonempty and acyclic
    for idx in range(4):
        counts, acyclic = m.fiber_summary(2, idx)
        assert acyclic, (idx, counts)

    # the action evaluates and its output directions are unit vectors
    dirs = m.act(star2, ["trefoil", "frame-twist"], ["-1/2", "1/4", "3/4"])
    assert len(dirs) == 3  # three pairs among three points
    for v in dirs:
        norm = sum(x * x for x in v) ** 0.5
        assert abs(norm - 1.0) < 1e-9, v

    # the collapsed insertion tree of the corolla at interior times
    key = m.insertion_tree(star2, ["-1/2", "1/4"])
    assert key == "v0(v1(t1,),v2(t2,),)", key

    # knot action sampling: the identity knots stay on the axis
    rows = m.knot_action_samples(json.dumps(star), ["identity", "identity"], 9)
    for t, p in rows:
        assert abs(p[0] - t) < 1e-12 and abs(p[1]) < 1e-12 and abs(p[2]) < 1e-12

    # a couple of verification suites through the bindings
    for suite in ["pcact-operad", "action-axioms"]:
        passed, cases, max_dev, report = m.verify(suite, seed=5, cases=25)
        assert passed, report
        assert cases > 0

    print("python smoke test: all checks passed")


if __name__ == "__main__":
    main()
