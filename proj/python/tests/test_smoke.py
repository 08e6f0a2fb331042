import json
import pathlib

import numpy as np
import pytest

import drosplit as ds

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_simplex_projection():
    p = ds.proj_simplex(np.array([2.0, 0.0]))
    np.testing.assert_allclose(p, [1.0, 0.0])
    q = ds.proj_simplex(np.array([0.3, -0.1, 0.9, 0.2]))
    assert q.min() >= 0.0
    assert abs(q.sum() - 1.0) < 1e-12


def test_ambiguity_projection_lands_in_set():
    box = ds.AmbiguitySet.moment_box(np.array([0.1, 0.5, 0.9]), 0.3, 0.4)
    p = ds.proj_ambiguity(np.array([0.0, 0.0, 1.0]), box)
    assert box.violation(p) <= 1e-9
    assert box.kind == "moment"


def test_concave_allocation_hand_case():
    s = ds.solve_concave_allocation(np.array([1.0, 4.0]), 0.5)
    np.testing.assert_allclose(s["weights"], [0.0, 1.0], atol=1e-12)
    assert s["cut"] == 1
    assert s["kkt_residual"] <= 1e-10


def test_prox_single_scenario():
    x = np.array([[0.3], [0.3]])
    a = np.array([[1.0], [-2.0]])
    out = ds.prox_sup_affine(x, 0.7, a, np.array([0.5]), ds.AmbiguitySet.full_simplex(1))
    np.testing.assert_allclose(out, x - 0.7 * a, atol=1e-12)
    anchors = np.array([[1.0, -1.0], [0.0, 2.0]])
    np.testing.assert_allclose(ds.prox_sup_quadratic(anchors, 1.0, anchors), anchors, atol=1e-12)


def test_solvers_agree_and_match_dual_lp():
    inst = ds.ProblemInstance.generate(8, 3, h="linear", P="moment", seed=3)
    lp_value, x_lp = ds.dual_lp_optimum(inst)
    assert abs(inst.objective(x_lp.reshape(-1, 1)) - lp_value) <= 1e-6
    for name in ds.SOLVERS:
        rep = ds.solve(inst, solver=name)
        assert rep["converged"], name
        assert abs(rep["objective"] - lp_value) <= 1e-4 * max(1.0, abs(lp_value)), name


def test_instance_json_round_trip():
    text = (DATA / "tiny_instance.json").read_text()
    inst = ds.ProblemInstance.from_json(text)
    again = ds.ProblemInstance.from_json(inst.to_json())
    assert json.loads(again.to_json()) == json.loads(inst.to_json())
    assert ds.solve(inst)["converged"]


def test_bad_input_raises():
    with pytest.raises(ValueError):
        ds.solve(ds.ProblemInstance.generate(4, 2), solver="nope")
    with pytest.raises(ValueError):
        ds.AmbiguitySet.full_simplex(0)


def test_applications():
    x, weights, converged = ds.couette_solve((DATA / "couette.json").read_text())
    assert converged
    assert x.shape == (3,)
    assert abs(weights.sum() - 1.0) < 1e-8
    b = np.array([[0.0, 0.1], [1.0, 0.9], [1.0, 1.1], [0.0, 0.0]])
    rep = ds.denoise(b, 0.5)
    assert rep["converged"]
    assert rep["x"].shape == (4, 2)
