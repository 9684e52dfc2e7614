"""Smoke tests for the python bindings: one happy path per exposed operation,
cross-checked against each other rather than against golden values."""

import math

import pytest

import uavtour


@pytest.fixture(scope="module")
def inst():
    return uavtour.generate(4, area_m=800.0, seed=11)


def test_generate_shape_and_determinism(inst):
    again = uavtour.generate(4, area_m=800.0, seed=11)
    assert again == inst
    assert uavtour.generate(4, area_m=800.0, seed=12) != inst
    assert len(inst["sensors"]) == 4
    assert inst["depot"] == [400.0, 400.0]
    assert all(len(p) == 2 for p in inst["sensors"])


def test_evaluate_matches_solver_metrics(inst):
    point = uavtour.solve(inst, lam=0.5)
    metrics = uavtour.evaluate(inst, point["cycles"])
    assert metrics["avg_aoi_s"] == pytest.approx(point["avg_aoi_s"], rel=1e-9)
    assert metrics["energy_j"] == pytest.approx(point["energy_j"], rel=1e-9)
    assert metrics["n_cycles"] == point["n_cycles"]
    assert len(metrics["aoi_s"]) == 4
    assert metrics["avg_aoi_s"] == pytest.approx(
        sum(metrics["aoi_s"]) / 4.0, rel=1e-12
    )


def test_solvers_agree_and_anchor_to_extremes(inst):
    ext = uavtour.extremes(inst)
    assert ext["aoi_min"] <= ext["aoi_max"]
    assert ext["energy_min"] <= ext["energy_max"]

    fastest = uavtour.solve(inst, lam=1.0)
    cheapest = uavtour.solve(inst, lam=0.0, solver="monolithic")
    assert fastest["avg_aoi_s"] == pytest.approx(ext["aoi_min"], rel=1e-9)
    assert cheapest["energy_j"] == pytest.approx(ext["energy_min"], rel=1e-9)

    mono = uavtour.solve(inst, lam=0.5, solver="monolithic")
    bend = uavtour.solve(inst, lam=0.5, solver="benders")
    span_a = ext["aoi_max"] - ext["aoi_min"]
    span_e = ext["energy_max"] - ext["energy_min"]

    def scalarized(p):
        return 0.5 * (p["avg_aoi_s"] - ext["aoi_min"]) / span_a + 0.5 * (
            p["energy_j"] - ext["energy_min"]
        ) / span_e

    assert scalarized(mono) == pytest.approx(scalarized(bend), abs=2e-6)


def test_benders_trace_brackets(inst):
    point = uavtour.solve(inst, lam=0.5, with_trace=True)
    trace = point["trace"]
    assert trace, "expected at least one iteration"
    lbs = [row["lb"] for row in trace]
    assert lbs == sorted(lbs)
    last = trace[-1]
    assert math.isfinite(last["ub"])
    assert last["ub"] - last["lb"] <= 1e-6 + 1e-12


def test_sweep_monotone(inst):
    rows = uavtour.sweep(inst, uavtour.lambda_grid(0.0, 0.25, 1.0))
    assert 1 <= len(rows) <= 5
    for prev, cur in zip(rows, rows[1:]):
        assert cur["avg_aoi_s"] <= prev["avg_aoi_s"] * (1 + 1e-9)
        assert cur["energy_j"] >= prev["energy_j"] * (1 - 1e-9)


def test_oracle_confirms_solver(inst):
    ext = uavtour.extremes(inst)
    front = uavtour.oracle_front(inst)
    assert front
    span_a = ext["aoi_max"] - ext["aoi_min"]
    span_e = ext["energy_max"] - ext["energy_min"]
    best = min(
        0.5 * (p["avg_aoi_s"] - ext["aoi_min"]) / span_a
        + 0.5 * (p["energy_j"] - ext["energy_min"]) / span_e
        for p in front
    )
    point = uavtour.solve(inst, lam=0.5)
    got = 0.5 * (point["avg_aoi_s"] - ext["aoi_min"]) / span_a + 0.5 * (
        point["energy_j"] - ext["energy_min"]
    ) / span_e
    assert got == pytest.approx(best, abs=2e-6)


def test_refine_dominates_flyhover(inst):
    point = uavtour.solve(inst, lam=0.5)
    refined = uavtour.refine(inst, point["cycles"], lam=0.5)
    assert refined["avg_aoi_s"] <= refined["flyhover_avg_aoi_s"] * (1 + 1e-9)
    assert refined["energy_j"] <= refined["flyhover_energy_j"] * (1 + 1e-9)
    assert refined["flyhover_avg_aoi_s"] == pytest.approx(
        point["avg_aoi_s"], rel=1e-9
    )
    sns = sorted(v["sn"] for v in refined["visits"])
    assert sns == [1, 2, 3, 4]
    for visit in refined["visits"]:
        assert len(visit["waypoints"]) == len(visit["speeds_ms"]) + 1
        assert visit["bits"] >= inst["data_mbits"][visit["sn"] - 1] * 1e6 * (1 - 1e-9)


def test_errors_surface_as_python_exceptions(inst):
    with pytest.raises(ValueError):
        uavtour.solve(inst, lam=1.5)
    with pytest.raises(ValueError):
        uavtour.evaluate(inst, [[1, 1, 2]])
    with pytest.raises(ValueError):
        uavtour.generate(0)
