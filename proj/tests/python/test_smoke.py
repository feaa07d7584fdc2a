import json
import math

import numpy as np
import pytest

import wavinv

ROBIN = wavinv.BoundaryVariant.ROBIN


def free_pi():
    return wavinv.make_scenario(math.pi, wavinv.LeftBoundary.robin(0.0), 0.0, 0.5, lambda x: 0.0)


def test_free_eigenvalues():
    lam, alpha = wavinv.eigenvalues(free_pi(), 6)
    np.testing.assert_allclose(lam, [0, 1, 4, 9, 16, 25], atol=1e-9)
    np.testing.assert_allclose(alpha, [math.pi] + [math.pi / 2] * 5, rtol=1e-9)


def test_b_closed_form_vectorized():
    b = wavinv.b_closed_form(np.array([0.0, math.pi**2]), 1.0, ROBIN)
    np.testing.assert_allclose(b, [2.0 / 6.0, 2.0 / math.pi**2], rtol=1e-12)


def test_trace_roundtrip_and_reconstruction():
    s = wavinv.make_scenario(math.pi, wavinv.LeftBoundary.robin(0.0), 0.0, 0.5, lambda x: 1.0)
    trace = wavinv.synthesize_trace(s, 20)
    assert trace["channel"] == "U0"
    ex = wavinv.detect_modes(trace["samples"], trace["dt"])
    lam, alpha = wavinv.spectral_data_from_modes(ex["modes"], 0.5, ROBIN)
    lam_ref, alpha_ref = wavinv.eigenvalues(s, 20)
    np.testing.assert_allclose(lam, lam_ref, rtol=1e-8, atol=1e-8)
    np.testing.assert_allclose(alpha, alpha_ref, rtol=1e-8)
    ell = wavinv.estimate_length(lam, ROBIN)
    assert abs(ell - math.pi) < 1e-4
    gl = wavinv.gl_reconstruct(lam, alpha, ell, ROBIN)
    assert np.max(np.abs(gl["q"] - 1.0)) < 0.05


def test_far_end_free():
    lam = np.arange(30.0) ** 2
    far = wavinv.far_end_profile(lam, 0.5, math.pi, ROBIN, 0.01, 500)
    ref = wavinv.field_at(free_pi(), math.pi, 0.01, 500, 30)
    assert far["channel"] == "UL"
    assert np.max(np.abs(far["samples"] - ref["samples"])) < 1e-4
    assert wavinv.phi(lam, math.pi, ROBIN, 2.25) == pytest.approx(1.5, rel=1e-10)


def test_errors_are_python_exceptions():
    with pytest.raises(wavinv.ValidationError, match="epsilon"):
        wavinv.make_scenario(math.pi, wavinv.LeftBoundary.robin(0.0), 0.0, 1.5, lambda x: 0.0)
    with pytest.raises(ValueError):
        wavinv.detect_modes(np.zeros(100), 0.01, "UL")


def test_cli_roundtrip(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "version": 1,
        "scenario": {"length": math.pi, "left": {"type": "robin", "h": 0.0}, "H": 0.0,
                     "epsilon": 0.5, "q": {"kind": "constant", "value": 0.0}},
        "numeric": {"modes": 20},
    }))
    metrics = wavinv.roundtrip(cfg, tmp_path / "out")
    assert metrics["ell_abs_error"] < 1e-4
    assert metrics["q_sup_error"] < 0.05
    assert (tmp_path / "out" / "report.json").exists()
