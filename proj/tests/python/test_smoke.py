"""Smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import loopsim


def test_compile_balanced_two_mode():
    schedule = loopsim.ReflectivitySchedule(m=2, reflectivities=[0.5])
    matrix = loopsim.compile_network(schedule)
    assert matrix.shape == (2, 2)
    np.testing.assert_allclose(np.abs(matrix) ** 2, 0.5 * np.ones((2, 2)), atol=1e-12)
    np.testing.assert_allclose(matrix.conj().T @ matrix, np.eye(2), atol=1e-12)


def test_compile_is_banded_and_unitary():
    schedule = loopsim.ReflectivitySchedule(
        m=6, reflectivities=loopsim.staircase_reflectivities(6)
    )
    matrix = loopsim.compile_network(schedule)
    np.testing.assert_allclose(matrix.conj().T @ matrix, np.eye(6), atol=1e-12)
    for j in range(6):
        for i in range(6):
            if j < i - 1:
                assert matrix[j, i] == 0


def test_permanent_values():
    assert loopsim.permanent(np.eye(3, dtype=complex)) == pytest.approx(1.0)
    assert loopsim.permanent(np.ones((3, 3), dtype=complex)) == pytest.approx(6.0)


def test_preview_is_transmitted_fraction():
    schedule = loopsim.ReflectivitySchedule(m=16, reflectivities=loopsim.staircase_reflectivities(16))
    preview = loopsim.preview_intensity(schedule)
    assert preview == pytest.approx([1.0 / (k + 1) for k in range(1, 16)])


def test_hom_bin_states():
    ind = loopsim.hom_bin_state(0.5, loopsim.PhotonModel.indistinguishable)
    assert ind.probabilities == pytest.approx([0.5, 0.0, 0.5])
    dis = loopsim.hom_bin_state(0.5, loopsim.PhotonModel.distinguishable)
    assert dis.probabilities == pytest.approx([0.25, 0.5, 0.25])


def test_visibility_endpoints():
    assert loopsim.visibility(0.0, 0.0, 100.0) == pytest.approx(1.0)
    assert loopsim.visibility(25.0, 25.0, 50.0) == pytest.approx(0.0)


def test_output_distribution_and_fidelity():
    spec = loopsim.standard_experiment(3, loopsim.Parity.odd)
    matrix = loopsim.compile_network(spec.schedule)
    dist = loopsim.output_distribution(
        matrix, spec.input, loopsim.Subspace.collision_free,
        loopsim.PhotonModel.indistinguishable,
    )
    assert len(dist) == math.comb(6, 3)
    assert sum(dist.probabilities) == pytest.approx(1.0)
    assert loopsim.statistical_fidelity(dist, dist) == pytest.approx(1.0)


def test_stream_round_trip():
    spec = loopsim.standard_experiment(2, loopsim.Parity.odd)
    matrix = loopsim.compile_network(spec.schedule)
    dist = loopsim.output_distribution(
        matrix, spec.input, loopsim.Subspace.collision_free,
        loopsim.PhotonModel.indistinguishable,
    )
    outcomes = loopsim.draw_outcomes(dist, 200, 42)
    stream = loopsim.synthesize_stream(dist, spec, 1.0, 0.0, 200, 42)
    records = loopsim.bin_tags(stream, spec, 3.0)
    assert len(records) == 200
    reconstructed = [
        [1 if b in r.occupied_bins else 0 for b in range(1, 5)] for r in records
    ]
    assert reconstructed == outcomes
    events = loopsim.extract_events(records, 2, 4)
    assert events.total() == 200


def test_rne_counter_monotone_for_ideal_sampler():
    spec = loopsim.standard_experiment(5, loopsim.Parity.even,
                                       [0.5, 0.6, 0.7, 0.8, 0.8, 0.8, 0.7, 0.5, 0.4])
    matrix = loopsim.compile_network(spec.schedule)
    ideal = loopsim.output_distribution(
        matrix, spec.input, loopsim.Subspace.collision_free,
        loopsim.PhotonModel.indistinguishable,
    )
    threshold = loopsim.rne_threshold(matrix, spec.input)
    events = loopsim.sample_patterns(ideal, 300, 7)
    trace = loopsim.rne_counter(events, matrix, spec.input, threshold)
    assert trace[-1] > 3 * math.sqrt(300)


def test_chi2_and_validation_report():
    result = loopsim.chi2_two_sample([50, 50], [90, 10])
    assert result.chi2 == pytest.approx(800.0 / 21.0)
    assert result.p_value < 0.001

    spec = loopsim.standard_experiment(3, loopsim.Parity.odd)
    matrix = loopsim.compile_network(spec.schedule)
    ideal = loopsim.output_distribution(
        matrix, spec.input, loopsim.Subspace.collision_free,
        loopsim.PhotonModel.indistinguishable,
    )
    events = {}
    for p in loopsim.sample_patterns(ideal, 900, 11):
        events[tuple(p)] = events.get(tuple(p), 0) + 1
    report = loopsim.validate_distinguishable(events, ideal, k=4, sample_size=300,
                                              repeats=20, seed=3)
    assert report.method == "kmeans_chi2"
    assert 0.0 <= report.p_value <= 1.0


def test_cmd_simulate_round_trip(tmp_path):
    config = {
        "experiment": {
            "label": "smoke",
            "schedule": {"m": 4, "reflectivities": [0.5, 0.6, 0.5]},
            "input": [1, 0, 1, 0],
            "sequence_period_ns": 800.0,
        },
        "simulation": {"n_frames": 400, "seed": 5},
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    cfg = loopsim.load_config(str(config_path))
    out_dir = tmp_path / "out"
    loopsim.cmd_simulate(cfg, str(out_dir))
    for name in ["distribution.csv", "tags.bin", "frequencies.csv", "summary.json"]:
        assert (out_dir / name).exists()
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["events_extracted"] == 400
    assert summary["config_hash"] == cfg.hash()
