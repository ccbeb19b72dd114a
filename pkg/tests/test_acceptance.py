"""Exit criteria.  Each test prints one ``criterion N PASS|FAIL`` line.

Run alone with ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``.
"""

import statistics
import sys
import time
from contextlib import contextmanager
from math import comb
from pathlib import Path

import pytest

from helpers import paired_corpus, planted_instance
from lltemporal.closure import is_dual_ll_closed, is_ll_closed
from lltemporal.core import tp, verify_assignment
from lltemporal.hardness import euler_orient, gen_regular_girth, girth_check, path_consistency, rmin_instance
from lltemporal.io import parse_instance
from lltemporal.oracle import brute_solve, enumerate_weak_orders
from lltemporal.relations import BETWEENNESS, EQ, LEQ, LT, NEQ, R_MAX, R_MIN
from lltemporal.solver import build_graph, sinks_and_sink_components, solve

ROOT = Path(__file__).resolve().parents[1]
CORPUS_SIZE = 10_000
CORPUS_SEED = 20240601
HARD_SEEDS = (1, 2, 3)


@contextmanager
def criterion(capsys, number, title):
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        with capsys.disabled():
            print(f"\ncriterion {number} FAIL: {title}: {type(exc).__name__}: {exc}")
        raise
    with capsys.disabled():
        extra = ", ".join(f"{k}={v}" for k, v in detail.items())
        print(f"\ncriterion {number} PASS: {title}" + (f" ({extra})" if extra else ""))


# -- shared runs -----------------------------------------------------------------


@pytest.fixture(scope="module")
def paired_runs():
    runs = []
    for clauses, relations in paired_corpus(CORPUS_SEED, CORPUS_SIZE):
        runs.append((clauses, relations, solve(clauses), solve(relations), brute_solve(clauses)))
    return runs


@pytest.fixture(scope="module")
def hard_runs():
    runs = []
    for seed in HARD_SEEDS:
        graph = gen_regular_girth(7, seed)
        oriented = euler_orient(graph)
        inst = rmin_instance(oriented)
        start = time.perf_counter()
        out = solve(inst)
        elapsed = time.perf_counter() - start
        runs.append((graph, oriented, inst, out, elapsed, path_consistency(inst)))
    return runs


@pytest.fixture(scope="module")
def timing_runs():
    runs = []
    for seed in (1, 2, 3):
        small = planted_instance(2000, 20000, seed)
        large = planted_instance(4000, 40000, seed)
        t0 = time.perf_counter()
        out_small = solve(small)
        t1 = time.perf_counter()
        out_large = solve(large)
        t2 = time.perf_counter()
        runs.append(((small, out_small, t1 - t0), (large, out_large, t2 - t1)))
    return runs


def phi1():
    return parse_instance((ROOT / "instances" / "phi1.tcsp").read_text())


# -- criteria ---------------------------------------------------------------------------


def test_criterion_1_phi1(capsys):
    with criterion(capsys, 1, "worked example: model, classes, first graph") as d:
        inst = phi1()
        start = time.perf_counter()
        dumps = []
        out = solve(inst, trace=dumps.append)
        elapsed = time.perf_counter() - start
        assert out.satisfiable
        assert tp(out.assignment) == tp((0, 0, 1, 1, 1))
        assert {frozenset(c) for c in out.classes} == {frozenset({"x1", "x2"}), frozenset({"y1", "y2", "y3"})}
        g0 = dumps[0]
        assert g0 == build_graph(inst)
        idx = {name: i for i, name in enumerate(g0.names)}
        sinks, _ = sinks_and_sink_components(g0)
        assert sinks == [idx["x1"]]
        ys = {idx[y] for y in ("y1", "y2", "y3")}
        assert g0.blocked == ys
        edges = set(g0.edges())
        for y in ys:
            assert {v for u, v in edges if u == y} == set(range(5)) - {y}
        assert (idx["x2"], idx["x1"]) in edges
        assert {v for u, v in edges if u == idx["x2"]} == {idx["x1"]}
        assert not any(u == idx["x1"] for u, _ in edges)
        assert elapsed < 1.0
        d["seconds"] = f"{elapsed:.4f}"


def test_criterion_2_closure_table(capsys):
    with criterion(capsys, 2, "closure table") as d:
        start = time.perf_counter()
        ll = {r.name: is_ll_closed(r) for r in (R_MIN, R_MAX, LT, LEQ, EQ, NEQ, BETWEENNESS)}
        dual = {r.name: is_dual_ll_closed(r) for r in (R_MIN, R_MAX, LT, LEQ, EQ, NEQ)}
        elapsed = time.perf_counter() - start
        assert ll == {"Rmin": True, "Rmax": False, "lt": True, "leq": True, "eq": True, "neq": True, "Betw": False}
        assert dual == {"Rmin": False, "Rmax": True, "lt": True, "leq": True, "eq": True, "neq": True}
        assert elapsed < 1.0
        d["seconds"] = f"{elapsed:.4f}"


def _merged_within_forced(outcome, oracle):
    group = {v: i for i, g in enumerate(oracle.forced_equal) for v in g}
    return all(len({group[v] for v in cls}) == 1 for cls in outcome.classes)


def test_criterion_3_oracle_equivalence(capsys, paired_runs):
    with criterion(capsys, 3, "solver verdicts equal brute force") as d:
        assert len(paired_runs) >= 10_000
        assert all(c.n <= 5 for c, *_ in paired_runs)
        mismatches = merged_bad = sat = 0
        for _, _, a, b, oracle in paired_runs:
            mismatches += (a.satisfiable != oracle.satisfiable) + (b.satisfiable != oracle.satisfiable)
            if oracle.satisfiable:
                sat += 1
                for out in (a, b):
                    if out.satisfiable and not _merged_within_forced(out, oracle):
                        merged_bad += 1
        d.update(instances=len(paired_runs), sat=sat, unsat=len(paired_runs) - sat)
        assert mismatches == 0, f"{mismatches} verdict mismatches"
        assert merged_bad == 0, f"{merged_bad} merged pairs not forced equal"


def test_criterion_4_representation_agreement(capsys, paired_runs):
    with criterion(capsys, 4, "clause and relation forms agree") as d:
        diffs = 0
        for _, _, a, b, _ in paired_runs:
            same = a.satisfiable == b.satisfiable and a.classes == b.classes
            if a.satisfiable and b.satisfiable:
                same = same and tp(a.assignment) == tp(b.assignment)
            diffs += not same
        d["instances"] = len(paired_runs)
        assert diffs == 0, f"{diffs} disagreements"


def _recurrence(n):
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def test_criterion_5_enumeration_counts(capsys):
    with criterion(capsys, 5, "weak order counts") as d:
        counts = [sum(1 for _ in enumerate_weak_orders(n)) for n in range(1, 7)]
        assert counts == [1, 3, 13, 75, 541, 4683]
        assert counts == [_recurrence(n) for n in range(1, 7)]
        d["counts"] = "/".join(map(str, counts))


def test_criterion_6_hardness(capsys, hard_runs):
    with criterion(capsys, 6, "girth-7 instances: unsat, yet path-consistent") as d:
        assert len(hard_runs) >= 3
        worst = 0.0
        for graph, oriented, inst, out, elapsed, pc in hard_runs:
            assert all(deg == 4 for deg in graph.degrees())
            assert oriented.in_degrees() == [2] * graph.n
            assert oriented.out_degrees() == [2] * graph.n
            assert girth_check(graph) >= 7
            assert not out.satisfiable
            assert elapsed < 1.0
            assert pc.consistent
            worst = max(worst, elapsed)
        d.update(seeds=len(hard_runs), vertices=hard_runs[0][0].n, slowest=f"{worst:.3f}s")


def test_criterion_7_performance(capsys, timing_runs):
    with criterion(capsys, 7, "n=2000/m=20000 under 5 s, doubling ratio at most 5") as d:
        ratios = []
        for (small, out_small, t_small), (large, out_large, t_large) in timing_runs:
            assert (small.n, len(small.constraints)) == (2000, 20000)
            assert (large.n, len(large.constraints)) == (4000, 40000)
            assert out_small.satisfiable and out_large.satisfiable
            assert t_small < 5.0
            ratios.append(t_large / t_small)
        d["small"] = "/".join(f"{s[2]:.2f}" for s, _ in timing_runs) + "s"
        d["ratios"] = "/".join(f"{r:.2f}" for r in ratios)
        d["median ratio"] = f"{statistics.median(ratios):.2f}"
        assert all(r <= 5.0 for r in ratios), ratios


def test_criterion_8_model_soundness(capsys, paired_runs, hard_runs, timing_runs):
    with criterion(capsys, 8, "every model verifies, every small unsat confirmed") as d:
        checked_sat = checked_unsat = 0
        records = [(phi1(), solve(phi1()))]
        for clauses, relations, a, b, _ in paired_runs:
            records += [(clauses, a), (relations, b)]
        records += [(inst, out) for _, _, inst, out, _, _ in hard_runs]
        for pair in timing_runs:
            records += [(inst, out) for inst, out, _ in pair]
        for inst, out in records:
            if out.satisfiable:
                assert verify_assignment(inst, out.assignment)
                checked_sat += 1
            elif inst.n <= 5:
                assert not brute_solve(inst).satisfiable
                checked_unsat += 1
        d.update(sat_verified=checked_sat, unsat_confirmed=checked_unsat)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
