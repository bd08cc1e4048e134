import json
import os
import pathlib
import subprocess

import numpy as np
import pytest

import mpstomo

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMA = json.loads((ROOT / "schema" / "manifest.schema.json").read_text())


def validator():
    jsonschema = pytest.importorskip("jsonschema")
    return jsonschema.Draft202012Validator(SCHEMA)


def test_ghz_round_trip():
    state = mpstomo.build(mpstomo.ghz(6, phi=1.1))
    result = mpstomo.run_protocol(state, mpstomo.ProtocolConfig(chi=2))
    assert result.k == 2
    assert result.windows == 5
    assert result.measurement_settings == 45
    assert np.allclose(result.probabilities, 1.0)
    tensors = mpstomo.extract_tensors(result)
    ratio = mpstomo.amplitude(tensors, "111111") / mpstomo.amplitude(tensors, "000000")
    assert abs(np.angle(ratio) - 1.1) < 1e-10
    assert mpstomo.fidelity(state, mpstomo.to_mps(tensors)) > 1 - 1e-9


def test_amplitudes_match_statevector():
    state = mpstomo.build(mpstomo.random_mps(6, 3, seed=4))
    tensors = mpstomo.extract_tensors(mpstomo.run_protocol(state, mpstomo.ProtocolConfig(chi=3)))
    amps = np.array([mpstomo.amplitude(tensors, format(i, "06b")) for i in range(64)])
    exact = state.amplitudes
    phase = np.vdot(amps, exact)
    phase /= abs(phase)
    assert np.max(np.abs(amps * phase - exact)) < 1e-8


def test_isometries_and_rdm():
    u = np.linalg.qr(np.random.default_rng(0).normal(size=(4, 4)) + 0j)[0]
    v = mpstomo.extract_V(u, 2, 2)
    assert np.allclose(sum(m.conj().T @ m for m in v), np.eye(2))
    rho = mpstomo.reduced_density_matrix(mpstomo.build(mpstomo.ghz(5)), 1, 2)
    assert np.allclose(rho, np.diag([0.5, 0, 0, 0.5]))


def test_mps_backend_and_certificate():
    result = mpstomo.run_protocol_mps(mpstomo.build_mps(mpstomo.random_mps(40, 4, seed=1)), mpstomo.ProtocolConfig(chi=4))
    assert result.windows == 38
    assert mpstomo.certify(result, 1e-6).accepted
    config = mpstomo.ProtocolConfig(chi=2)
    config.truncation_abort_threshold = 1.0
    haar = mpstomo.run_protocol(mpstomo.build(mpstomo.haar_random(10, seed=3)), config)
    assert not mpstomo.certify(haar, 0.1).accepted


def test_errors_carry_kind():
    with pytest.raises(mpstomo.MpstomoError) as info:
        mpstomo.ProtocolConfig(chi=0).resolved_k(2, 5)
    assert info.value.kind == "ConfigError"
    with pytest.raises(mpstomo.MpstomoError) as info:
        mpstomo.cmd_run({"protocol": {"chi": 0}})
    assert "protocol.chi" in str(info.value)


def test_error_bound_report():
    report = mpstomo.check_error_bound(6, 1e-3, 4, seed=2)
    assert len(report.trials) == 4
    assert report.max_ratio <= 1.0


@pytest.mark.parametrize(
    "records",
    [
        lambda: mpstomo.cmd_run({"trials": 2, "protocol": {"noise": {"mode": "perturb", "epsilon": 1e-3}}}),
        lambda: mpstomo.cmd_certify({"state": {"family": "haar_random", "n": 8}, "threshold": 0.1}),
        lambda: mpstomo.cmd_bench({"bench": {"sizes": [8, 16], "repeats": 1}}),
        lambda: mpstomo.cmd_demo("w", {"trials": 2}),
    ],
)
def test_manifests_validate(records):
    v = validator()
    out = records()
    assert out[0]["record"] == "header" and out[-1]["record"] == "summary"
    for record in out:
        assert not list(v.iter_errors(record)), record
        assert mpstomo.check_record(record) == []


def test_schema_rejects_broken_record():
    v = validator()
    trial = mpstomo.cmd_run()[1]
    del trial["certificate"]["accepted"]
    assert list(v.iter_errors(trial))
    assert mpstomo.check_record(trial)


def test_command_line_output_validates(tmp_path):
    cli = os.environ.get("MPSTOMO_CLI", str(ROOT / "build" / "tools" / "mpstomo"))
    if not os.path.exists(cli):
        pytest.skip("command-line tool not built")
    v = validator()
    out = tmp_path / "run.jsonl"
    proc = subprocess.run([cli, "run", "--state", "ghz", "--n", "6", "--trials", "2", "--out", str(out)])
    assert proc.returncode == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    for line in lines:
        assert not list(v.iter_errors(json.loads(line)))
    rejected = subprocess.run([cli, "certify", "--state", "haar_random", "--n", "10", "--threshold", "0.1"],
                              capture_output=True)
    assert rejected.returncode == 2
