"""Experiment configs, runs, sweeps, selection, and report files."""

import dataclasses

import numpy as np
import pytest

from vendiguide import (
    ContractViolation,
    ExperimentConfig,
    MetricsReport,
    RegionMetrics,
    RunRecord,
    ScenarioSpec,
    build_scenario,
    config_flat,
    config_from_flat,
    config_hash,
    config_text,
    default_collapse_scenario,
    emit_reports,
    load_records,
    one_region_out_select,
    parse_config_file,
    parse_results_table,
    resolve_kernel,
    run_experiment,
    save_records,
    sweep,
)


def tiny_scenario(**overrides):
    base = dict(
        regions=("r0", "r1"),
        objects=("o0", "o1"),
        modes_per_cell=2,
        reference_per_region=40,
        exemplar_pool_per_cell=6,
        seed=0,
    )
    base.update(overrides)
    return ScenarioSpec(**base)


def tiny_config(**overrides):
    base = dict(
        scenario=tiny_scenario(),
        method="vendi_context",
        seeds=(0,),
        generations_per_cell=5,
        schedule_steps=20,
        kernel_bandwidth=3.0,
        exemplars_per_object=2,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def fake_record(f1_by_region: dict, memory_weight: float = 1.0) -> RunRecord:
    config = ExperimentConfig(
        method="vendi", context_weight=0.0, memory_weight=memory_weight
    )
    metrics = {
        r: RegionMetrics(precision=f, recall=f, f1=f, consistency=1.0)
        for r, f in f1_by_region.items()
    }
    fs = sorted(f1_by_region)
    avg = float(np.mean([f1_by_region[r] for r in fs]))
    worst = min(fs, key=lambda r: (f1_by_region[r], r))
    rec = RunRecord(config=config, config_hash=config_hash(config))
    rec.aggregate = MetricsReport(
        per_region=metrics,
        average=RegionMetrics(avg, avg, avg, 1.0),
        worst_region=worst,
        worst=metrics[worst],
    )
    return rec


# ---------------------------------------------------------------------------
# config plumbing


def test_config_flat_round_trip():
    cfg = ExperimentConfig(
        scenario=ScenarioSpec(
            collapse={("o0", "r0"): 0.25, ("o1", "r2"): 0.5},
            imbalance={"r1": 1.5},
            seed=4,
        ),
        method="vendi_context",
        seeds=(0, 1, 2),
        kernel_bandwidth=None,
        class_weight=None,
    )
    back = config_from_flat(config_flat(cfg))
    assert back == cfg
    assert config_text(back) == config_text(cfg)


def test_config_preset_key():
    cfg = config_from_flat(
        {"scenario.preset": "collapse", "scenario.seed": "7", "method": "vendi_context"}
    )
    assert cfg.scenario == default_collapse_scenario(seed=7)
    with pytest.raises(ContractViolation):
        config_from_flat({"scenario.preset": "bogus"})


def test_config_from_flat_rejects_unknown_keys():
    with pytest.raises(ContractViolation):
        config_from_flat({"not_a_field": "1"})
    with pytest.raises(ContractViolation):
        config_from_flat({"scenario.not_a_field": "1"})


def test_config_hash_properties():
    a = ExperimentConfig()
    b = ExperimentConfig()
    assert config_hash(a) == config_hash(b)
    assert len(config_hash(a)) == 16
    c = dataclasses.replace(a, memory_weight=2.0)
    assert config_hash(c) != config_hash(a)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(method="unknown"),
        dict(seeds=()),
        dict(generations_per_cell=0),
        dict(method="baseline", memory_weight=1.0, context_weight=0.0),
        dict(method="baseline", memory_weight=0.0, context_weight=1.0),
        dict(method="vendi", context_weight=2.0),
        dict(method="context_only", memory_weight=1.0),
        dict(method="context_only", memory_weight=0.0, context_weight=0.0),
        dict(method="feedback_loss", feedback_weight=0.0),
        dict(method="vendi_context", exemplars_per_object=0),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ContractViolation):
        ExperimentConfig(**kwargs)


def test_feedback_needs_multiple_regions():
    with pytest.raises(ContractViolation):
        ExperimentConfig(
            method="feedback_entropy",
            scenario=tiny_scenario(regions=("r0",), collapse={}),
        )


def test_resolve_kernel():
    cfg = tiny_config()
    bundle = build_scenario(cfg.scenario)
    explicit = resolve_kernel(cfg, bundle)
    assert explicit.bandwidth == 3.0
    auto = resolve_kernel(tiny_config(kernel_bandwidth=None), bundle)
    assert auto.bandwidth > 0.0
    assert auto.kind == "rbf"


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment\n"
        "\n"
        "method = vendi_context\n"
        "scenario.preset = collapse\n"
        "seeds = 0,1\n"
        "sweep.context_weight = 1.0, 2.0, 4.0\n"
    )
    flat, grid = parse_config_file(path)
    assert flat == {
        "method": "vendi_context",
        "scenario.preset": "collapse",
        "seeds": "0,1",
    }
    assert grid == {"context_weight": [1.0, 2.0, 4.0]}
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    with pytest.raises(ContractViolation):
        parse_config_file(bad)
    unsweepable = tmp_path / "uns.cfg"
    unsweepable.write_text("sweep.schedule_steps = 10,20\n")
    with pytest.raises(ContractViolation):
        parse_config_file(unsweepable)


# ---------------------------------------------------------------------------
# running experiments


def test_run_experiment_tiny():
    record = run_experiment(tiny_config())
    assert record.error is None
    assert record.diagnostics["errors"] == []
    assert sorted(record.per_seed) == [0]
    report = record.per_seed[0]
    assert sorted(report.per_region) == ["r0", "r1"]
    # 4 cells x 5 samples x 4 guided steps at T=20, guide_every=5
    assert record.diagnostics["guided_steps"] == 80
    assert record.mean_output_vendi > 1.0
    assert record.seconds_per_sample > 0.0
    assert set(record.samples) == {
        (0, o, r) for o in ("o0", "o1") for r in ("r0", "r1")
    }
    assert record.samples[(0, "o0", "r0")].shape == (5, 2)
    assert record.reference["x"].shape[0] == 80


def test_run_experiment_drop_samples():
    record = run_experiment(tiny_config(keep_samples=False))
    assert record.samples == {}
    assert record.reference == {}
    assert record.error is None


def test_baseline_matches_zero_weight_vendi():
    base = run_experiment(
        tiny_config(method="baseline", memory_weight=0.0, context_weight=0.0)
    )
    zeroed = run_experiment(
        tiny_config(method="vendi", memory_weight=0.0, context_weight=0.0)
    )
    a = base.per_seed[0]
    b = zeroed.per_seed[0]
    for region in a.per_region:
        assert a.per_region[region] == b.per_region[region]
    assert base.mean_output_vendi == zeroed.mean_output_vendi
    assert np.array_equal(
        base.samples[(0, "o0", "r1")], zeroed.samples[(0, "o0", "r1")]
    )


def test_run_experiment_multi_seed_aggregate():
    record = run_experiment(tiny_config(seeds=(0, 1)))
    assert sorted(record.per_seed) == [0, 1]
    for region in ("r0", "r1"):
        vals = [record.per_seed[s].per_region[region].recall for s in (0, 1)]
        assert record.aggregate.per_region[region].recall == pytest.approx(
            np.mean(vals), abs=1e-12
        )
    worst = min(
        record.aggregate.per_region, key=lambda r: record.aggregate.per_region[r].f1
    )
    assert record.aggregate.worst_region == worst


def test_run_experiment_feedback_method():
    record = run_experiment(
        tiny_config(method="feedback_entropy", generations_per_cell=4)
    )
    assert record.error is None
    assert record.diagnostics["guided_steps"] == 0  # cadence counters are bank-path only
    assert record.per_seed[0].average.recall > 0.0


# ---------------------------------------------------------------------------
# sweeps and selection


def test_sweep_grid_order_and_isolation():
    base = tiny_config(generations_per_cell=3)
    records = sweep(base, {"memory_weight": [0.5, 1.0], "guide_every": [2, 5]})
    combos = [(r.config.guide_every, r.config.memory_weight) for r in records]
    assert combos == [(2, 0.5), (2, 1.0), (5, 0.5), (5, 1.0)]
    assert all(r.error is None for r in records)


def test_sweep_rejects_unsweepable():
    with pytest.raises(ContractViolation):
        sweep(tiny_config(), {"schedule_steps": [10, 20]})


def test_sweep_isolates_invalid_points():
    base = tiny_config()  # context_weight 2.0
    records = sweep(base, {"method": ["vendi_context", "vendi"]})
    assert records[0].error is None
    assert records[1].error is not None and "vendi" in records[1].error


def test_one_region_out_single_record():
    rec = fake_record({"r0": 0.5, "r1": 0.6, "r2": 0.7})
    picks = one_region_out_select([rec])
    assert set(picks) == {"r0", "r1", "r2"}
    assert all(p is rec for p in picks.values())


def test_one_region_out_dominant_record():
    low = fake_record({"r0": 0.2, "r1": 0.2, "r2": 0.2}, memory_weight=1.0)
    high = fake_record({"r0": 0.8, "r1": 0.8, "r2": 0.8}, memory_weight=2.0)
    picks = one_region_out_select([low, high])
    assert all(p is high for p in picks.values())


def test_one_region_out_region_specific_winners_and_ties():
    rec_a = fake_record({"r0": 0.9, "r1": 0.9, "r2": 0.1}, memory_weight=1.0)
    rec_b = fake_record({"r0": 0.1, "r1": 0.9, "r2": 0.9}, memory_weight=2.0)
    picks = one_region_out_select([rec_b, rec_a])
    assert picks["r0"] is rec_b  # judged on r1, r2
    assert picks["r2"] is rec_a  # judged on r0, r1
    # held-out r1 ties at 0.5 mean F1; lexicographically smaller config wins
    assert picks["r1"] is rec_a


def test_one_region_out_validation():
    with pytest.raises(ContractViolation):
        one_region_out_select([])
    bad = fake_record({"r0": 0.5, "r1": 0.5})
    bad.error = "boom"
    with pytest.raises(ContractViolation):
        one_region_out_select([bad])
    mismatched = fake_record({"r0": 0.5, "rX": 0.5}, memory_weight=3.0)
    with pytest.raises(ContractViolation):
        one_region_out_select([fake_record({"r0": 0.5, "r1": 0.5}), mismatched])


# ---------------------------------------------------------------------------
# report files


def test_emit_and_parse_round_trip(tmp_path):
    record = run_experiment(tiny_config(seeds=(0, 1)))
    paths = emit_reports([record], tmp_path)
    names = {p.name for p in paths}
    assert "results.csv" in names and "aggregate.txt" in names
    rows = parse_results_table(tmp_path / "results.csv")
    assert len(rows) == 2 * 2  # regions x seeds
    for row in rows:
        metrics = record.per_seed[row["seed"]].per_region[row["region"]]
        assert row["precision"] == metrics.precision
        assert row["recall"] == metrics.recall
        assert row["f1"] == metrics.f1
        assert row["consistency"] == metrics.consistency
        assert row["config_hash"] == record.config_hash
        assert row["method"] == "vendi_context"


def test_emit_empty_records_header_only(tmp_path):
    emit_reports([], tmp_path)
    text = (tmp_path / "results.csv").read_text()
    assert text.splitlines() == [
        "method,region,seed,precision,recall,f1,consistency,config_hash"
    ]
    assert parse_results_table(tmp_path / "results.csv") == []


def test_emit_failed_record_noted(tmp_path):
    rec = fake_record({"r0": 0.5, "r1": 0.5})
    rec.error = "no seed completed"
    emit_reports([rec], tmp_path)
    assert "FAILED: no seed completed" in (tmp_path / "aggregate.txt").read_text()
    assert parse_results_table(tmp_path / "results.csv") == []


def test_parse_results_table_validation(tmp_path):
    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("wrong,header\n")
    with pytest.raises(ContractViolation):
        parse_results_table(bad_header)
    bad_row = tmp_path / "row.csv"
    bad_row.write_text(
        "method,region,seed,precision,recall,f1,consistency,config_hash\nonly,three,cols\n"
    )
    with pytest.raises(ContractViolation):
        parse_results_table(bad_row)


def test_rerun_produces_identical_tables(tmp_path):
    cfg = tiny_config(seeds=(0, 1))
    emit_reports([run_experiment(cfg)], tmp_path / "a")
    emit_reports([run_experiment(cfg)], tmp_path / "b")
    for name in ("results.csv", "vendi_curve.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    scatters_a = sorted(p.name for p in (tmp_path / "a").glob("scatter_*.txt"))
    scatters_b = sorted(p.name for p in (tmp_path / "b").glob("scatter_*.txt"))
    assert scatters_a == scatters_b and len(scatters_a) == 1
    assert (tmp_path / "a" / scatters_a[0]).read_bytes() == (
        tmp_path / "b" / scatters_b[0]
    ).read_bytes()


def test_save_and_load_records(tmp_path):
    record = run_experiment(tiny_config(seeds=(0, 1)))
    path = tmp_path / "records.json"
    save_records([record], path)
    loaded = load_records(path)
    assert len(loaded) == 1
    back = loaded[0]
    assert back.config == record.config
    assert back.config_hash == record.config_hash
    assert back.per_seed[1].per_region["r1"] == record.per_seed[1].per_region["r1"]
    assert back.aggregate.average == record.aggregate.average
    assert back.per_seed_vendi == record.per_seed_vendi
    assert back.error is None
    # emitted tables from reloaded records match the originals byte for byte
    emit_reports([record], tmp_path / "orig")
    emit_reports(loaded, tmp_path / "back")
    assert (tmp_path / "orig" / "results.csv").read_bytes() == (
        tmp_path / "back" / "results.csv"
    ).read_bytes()
