"""Smoke test for the compiled extension.

Build and run from the repository root:

    cargo build --release -p alggraph-py --features extension-module
    cp target/release/libpyalggraph.so python/pyalggraph.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyalggraph as ag


def main():
    names = ag.corpus_names()
    assert {"s2", "m2", "z2", "proj2", "c3"} <= set(names), names

    expected = {"s2": "semilattice", "m2": "majority", "z2": "affine", "proj2": "unary"}
    for name, kind in expected.items():
        rec = json.loads(ag.Algebra.corpus(name).classify_pair(0, 1))
        assert rec["resolved"] == kind, (name, rec["resolved"])

    s2 = ag.Algebra.corpus("s2")
    assert s2.size == 2 and s2.apply(0, [0, 1]) == 1
    assert s2.sg([1]) == [1]
    assert ag.Algebra.from_json(s2.to_json()) == s2
    assert len(s2.congruences()) == 2

    report = json.loads(s2.verify_connectivity())
    assert report["verdict"] == "pass", report
    analysis = json.loads(ag.Algebra.corpus("proj2").analyze())
    assert analysis["omits_type1"] is False

    qm = json.loads(ag.Algebra.corpus("m2").quasi_majority())
    assert qm["report"]["verdict"] == "pass"

    parity = {"factors": ["z2", "z2", "z2"], "arity": 3,
              "tuples": [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]}
    q2d = json.loads(ag.verify_relation("q2d", json.dumps(parity)))
    assert q2d["verdict"] == "pass", q2d

    a = [x.to_json() for x in ag.random_algebras(5, "n=2..3;ops=2;filter=smooth", 3)]
    b = [x.to_json() for x in ag.random_algebras(5, "n=2..3;ops=2;filter=smooth", 3)]
    assert a == b

    assert ag.campaign("rect", 2, 2) == ag.campaign("rect", 2, 2)

    try:
        ag.Algebra.from_json('{"name":"bad","size":2,"operations":[{"name":"f","arity":2,"table":[1,0,0,1]}]}')
    except ag.AlgGraphError:
        pass
    else:
        raise AssertionError("non-idempotent algebra accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
