import copy
import json

import numpy as np
import pytest

from equideg.errors import (
    EquivarianceViolation,
    NonMonotoneCurve,
    NonScalarIsotypicBlock,
    SchemaError,
)
from equideg.model_io import (
    bundled_config,
    coupling_spectrum,
    load_model,
    model_kernel_mode,
    report_json,
    run_report,
)

W1 = np.array([-1.0, 1.0, -1.0, 1.0, 0.0, 0.0])
W2 = np.array([1.0, 0.0, 1.0, 0.0, -1.0, -1.0])


def test_bundled_weights_and_multiplicities(model):
    assert {j: round(w, 9) for j, w in model.weights.items()} == {0: 16.0, 2: 22.0, 3: 20.0}
    spec = coupling_spectrum(model)
    assert [(j, round(w, 9), mult) for j, w, mult in spec] == [(0, 16.0, 1), (2, 22.0, 2), (3, 20.0, 3)]
    # numeric eigensolve oracle on the assembled 6x6 coupling
    vals = sorted(np.linalg.eigvalsh(model.coupling).round(9))
    assert vals == [16.0, 20.0, 20.0, 20.0, 22.0, 22.0]


def test_crossing_eigenspace_contains_reference_vectors(model):
    basis = model.component(2).basis
    for w in (W1, W2):
        proj = basis @ (basis.T @ w)
        assert np.abs(proj - w).max() < 1e-9


def test_identity_coupling_gives_equal_curves():
    cfg = copy.deepcopy(bundled_config("six_membranes"))
    cfg["linearization"]["coupling_matrix"] = np.eye(6).tolist()
    cfg["linearization"]["a"] = 2.0
    m = load_model(cfg)
    assert all(abs(w - 1.0) < 1e-12 for w in m.weights.values())
    for c in m.curves:
        assert abs(c.value(0.3) - (2.0 + 1.0 / (1.0 + np.exp(-0.3)))) < 1e-12


def test_non_equivariant_coupling_rejected():
    cfg = copy.deepcopy(bundled_config("six_membranes"))
    C = np.eye(6)
    C[0, 1] = C[1, 0] = 0.5  # couples one adjacent pair only
    cfg["linearization"]["coupling_matrix"] = C.tolist()
    with pytest.raises(EquivarianceViolation):
        load_model(cfg)


def test_asymmetric_coupling_rejected():
    cfg = copy.deepcopy(bundled_config("six_membranes"))
    C = np.eye(6)
    C[0, 1] = 1.0
    cfg["linearization"]["coupling_matrix"] = C.tolist()
    with pytest.raises(SchemaError):
        load_model(cfg)


def test_non_scalar_isotypic_block_rejected():
    cfg = {
        "name": "two-copies",
        "group": {"degree": 1, "gamma_generators": [], "antipodal": True},
        "action": {"type": "matrices", "generator_matrices": [], "dimension": 2},
        "linearization": {"a": 1.0, "coupling_matrix": [[1.0, 0.0], [0.0, 2.0]],
                          "zeta": "sigmoid"},
        "horizon": {"m_max": 4, "n_max": 4},
    }
    with pytest.raises(NonScalarIsotypicBlock):
        load_model(cfg)


def test_constant_curve_rejected():
    cfg = copy.deepcopy(bundled_config("six_membranes"))
    cfg["linearization"]["coupling_matrix"] = {
        "template": "adjacency", "c": 4.0, "d": -1.0,
        "adjacency": cfg["linearization"]["coupling_matrix"]["adjacency"]}
    # c + 4d = 0 makes the radial curve constant
    with pytest.raises(NonMonotoneCurve):
        load_model(cfg)


def test_schema_errors():
    with pytest.raises(SchemaError):
        load_model({"group": {"degree": 4}})
    with pytest.raises(SchemaError):
        load_model("{ not json")


def test_text_variant_has_empty_critical_set():
    m = load_model(bundled_config("six_membranes_text_variant"))
    assert m.critical == []
    rep = run_report(m)
    assert rep["critical_points"] == []
    assert rep["rabinowitz_sum"]["terms"] == []
    assert all(v["conclusion"] == "Inconclusive" for v in rep["verdicts"])


def test_report_roundtrip_and_determinism(model):
    rep = run_report(model)
    text = report_json(rep)
    assert json.loads(text) == rep
    assert report_json(run_report(model)) == text
    assert {e["status"] for e in rep["fast_path_checks"]} == {"ok"}
    assert rep["warnings"]


def test_kernel_mode_symmetry_condition(model):
    km = model_kernel_mode(model, (1, 3, 2), "(D6^D3 x^D4 D4p)")
    assert np.abs(km.b_vec).max() < 1e-9
    a = km.a_vec / np.linalg.norm(km.a_vec)
    target = W1 + 2 * W2
    target = target / np.linalg.norm(target)
    assert min(np.abs(a - target).max(), np.abs(a + target).max()) < 1e-9


def test_kernel_mode_default_vector(model):
    km = model_kernel_mode(model, (1, 3, 0))
    # radial block: the mode is theta-independent up to the cos factor and
    # proportional to the constant vector
    a = km.a_vec / np.linalg.norm(km.a_vec)
    assert np.abs(np.abs(a) - 1 / np.sqrt(6)).max() < 1e-9


def test_config_echo_roundtrip():
    cfg = bundled_config("six_membranes")
    m = load_model(json.dumps(cfg))
    assert m.config == cfg


def test_report_command_exit_3_on_mismatch(monkeypatch, capsys):
    import equideg.cli as cli
    from equideg.errors import CrossCheckMismatch

    def boom(model):
        raise CrossCheckMismatch("forced for the error-path test")

    monkeypatch.setattr(cli, "run_report", boom)
    code = cli.main(["--config", "bundled:six_membranes", "report"])
    assert code == 3
    assert "computation error" in capsys.readouterr().err


def test_multiplicity_two_block_with_scalar_coupling():
    cfg = {
        "name": "two-copies-scalar",
        "group": {"degree": 1, "gamma_generators": [], "antipodal": True},
        "action": {"type": "matrices", "generator_matrices": [], "dimension": 2},
        "linearization": {"a": 10.0, "coupling_matrix": [[2.0, 0.0], [0.0, 2.0]],
                          "zeta": "sigmoid"},
        "horizon": {"m_max": 4, "n_max": 4},
    }
    m = load_model(cfg)
    assert [c.multiplicity for c in m.components] == [2]
    assert list(m.weights.values()) == [2.0]
    assert m.critical == []  # window (10, 12) holds no squared zero
