import pytest

from jrplab.bench import Report, battery_instances, bench, worker_count
from jrplab.generate import GenSpec, generate
from jrplab.model import make_instance, LinearCost


@pytest.fixture(scope="module")
def report():
    return bench(battery_instances(2), ["2srp", "1srp", "full"], trials=50, seed=3)


def test_report_shape(report):
    assert len(report.rows) == 2 * 3 * 4 and not report.failures
    assert report.to_csv().splitlines()[0] == ",".join(Report.COLUMNS)
    assert len(report.to_text().splitlines()) == 1 + len(report.rows)


def test_exact_column_dominates_lp(report):
    for row in report.rows:
        if row["component"] == "total":
            assert row["exact"] >= row["lp"] - 1e-9
            assert row["ratio_exact"] <= row["ratio_lp"] + 1e-12


def test_worst_picks_the_largest_ratio(report):
    worst, se = report.worst("full", "total")
    assert worst == max(r["ratio_lp"] for r in report.rows if r["algorithm"] == "full" and r["component"] == "total")
    assert report.worst("nope", "total") == (None, None)


def test_parallel_run_matches_serial(monkeypatch):
    insts = battery_instances(2)
    serial = bench(insts, ["2srp"], trials=20, seed=1)
    monkeypatch.setenv("JRP_THREADS", "2")
    assert worker_count() == 2
    assert bench(insts, ["2srp"], trials=20, seed=1).to_csv() == serial.to_csv()


def test_worker_count_ignores_garbage(monkeypatch):
    monkeypatch.setenv("JRP_THREADS", "many")
    assert worker_count() == 1


def test_oracle_limit_leaves_the_exact_column_empty():
    big = generate(GenSpec(variant="linear", retailers=2, orders=18, horizon=10.0, seed=0))
    rep = bench([big], ["2srp"], trials=2, seed=0)
    assert all(r["exact"] is None and r["ratio_exact"] is None for r in rep.rows)


def test_zero_lp_component_has_no_ratio():
    inst = make_instance(1, {"A": 0}, [("A", 0, LinearCost())])
    rep = bench([inst], ["2srp"], trials=3, seed=0)
    rship = next(r for r in rep.rows if r["component"] == "retailer_ship")
    assert rship["lp"] == 0 and rship["ratio_lp"] is None
