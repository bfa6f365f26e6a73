import dataclasses
import math
from pathlib import Path
from fractions import Fraction

import pytest

from ddsim.errors import BadParams, IoError
from ddsim.experiments import (
    PRECISION_ENV,
    ExperimentConfig,
    Table,
    emit,
    fit_slope,
    random_ideal_sequence,
    run_custom,
    run_experiment,
    run_fig1,
    run_fig2,
    run_ratio,
    run_scaling,
    run_thompson_sweep,
    table_from_json,
    table_to_csv,
    table_to_json,
)
from ddsim.hamiltonians import SpinChainParams
from ddsim.operators import PrecisionPolicy
from ddsim.sequences import PulseSequence, gen_cdd


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def small(**kw):
    base = dict(levels=(1, 2, 3))
    base.update(kw)
    return ExperimentConfig(**base)


# --- configuration ---------------------------------------------------------


def test_from_ini_with_and_without_header(tmp_path):
    body = "n_spins = 5\nj_coupling = 2e6\nlevels = 1-3,6\ntotal_time = 2e-5\nprecision = 256\n"
    a = ExperimentConfig.from_ini(write(tmp_path, "[ddsim]\n" + body, "a.ini"))
    b = ExperimentConfig.from_ini(write(tmp_path, body, "b.ini"))
    assert a == b
    assert a.chain == SpinChainParams(5, 2e6, 1e4)
    assert a.levels == (1, 2, 3, 6)
    assert a.total_time == Fraction(1, 50000)
    assert a.precision == PrecisionPolicy.fixed(256)


def test_from_ini_override_and_adaptive(tmp_path):
    cfg = ExperimentConfig.from_ini(write(tmp_path, "experiment=fig1\nprecision=adaptive\n"), experiment="fig2")
    assert cfg.experiment == "fig2" and cfg.precision is None


def test_from_ini_errors(tmp_path):
    with pytest.raises(IoError):
        ExperimentConfig.from_ini(tmp_path / "missing.ini")
    with pytest.raises(BadParams):
        ExperimentConfig.from_ini(write(tmp_path, "colour = red\n"))
    with pytest.raises(BadParams):
        ExperimentConfig.from_ini(write(tmp_path, "[ddsim]\nlevels\n"))
    with pytest.raises(BadParams):
        ExperimentConfig.from_ini(write(tmp_path, "experiment = fig9\n"))


def test_config_invariants():
    with pytest.raises(BadParams):
        ExperimentConfig(total_time=Fraction(0))
    with pytest.raises(BadParams):
        ExperimentConfig.from_mapping({"levels": "-1"})
    with pytest.raises(BadParams):
        ExperimentConfig(scheme="XY4")


def test_env_precision_override():
    cfg = ExperimentConfig()
    assert cfg.with_env({PRECISION_ENV: "512"}).precision == PrecisionPolicy.fixed(512)
    assert cfg.with_env({}).precision is None
    with pytest.raises(BadParams):
        cfg.with_env({PRECISION_ENV: "lots"})


_CHANGES = {
    "experiment": "fig2",
    "chain": SpinChainParams(5),
    "two_pi": True,
    "temperature": 2.0,
    "total_time": Fraction(2, 10 ** 5),
    "levels": (1, 2),
    "pulse_widths": (Fraction(1, 10 ** 12),),
    "precision": PrecisionPolicy.fixed(128),
    "min_bits": 128,
    "max_bits": 2048,
    "seed": 1,
    "scheme": "CDD",
    "scaling_time": Fraction(2, 10 ** 6),
    "tau_min": Fraction(2, 10 ** 9),
    "tau_max": Fraction(2, 10 ** 7),
    "n_points": 6,
    "cdd_level": 3,
    "tsds_order": 2,
    "cpmg_level": 2,
    "beta_t": 0.2,
    "n_draws": 10,
    "bath_qubits": 1,
    "model_j": 2e6,
    "model_beta": 2e6,
    "sequence_file": "x.txt",
    "norm_kind": "spectral",
}


def test_hash_covers_every_parameter():
    names = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"output_path"}
    assert names == set(_CHANGES)
    base = ExperimentConfig()
    hashes = {base.config_hash}
    for k, v in _CHANGES.items():
        h = dataclasses.replace(base, **{k: v}).config_hash
        assert h not in hashes, k
        hashes.add(h)


def test_hash_ignores_output_path():
    assert ExperimentConfig(output_path="a.csv").config_hash == ExperimentConfig().config_hash


# --- tables --------------------------------------------------------------


def sample_table():
    return Table("fig1", ("level", "scheme", "n_pulses", "purity_loss", "precision_bits"),
                 [(1, "CDD", 4, "1.5e-3", 64), (2, "CDD", 20, "2.25e-120", 448)],
                 "abc", {"total_time": "0.00001"}, ["level=1 failed=taunb"])


def test_csv_layout():
    lines = table_to_csv(sample_table()).splitlines()
    assert lines[0] == "# config_hash=abc"
    header = [ln for ln in lines if not ln.startswith("#")][0]
    assert header.startswith("level,scheme,n_pulses,purity_loss")
    assert "# convergence_failure=level=1 failed=taunb" in lines
    assert lines[-1] == "2,CDD,20,2.25e-120,448"


def test_json_round_trip():
    t = sample_table()
    back = table_from_json(table_to_json(t))
    assert back == t
    assert table_to_json(back) == table_to_json(t)


def test_emit_writes_and_rejects(tmp_path):
    p = tmp_path / "out.csv"
    text = emit(sample_table(), "csv", p)
    assert p.read_text() == text
    with pytest.raises(IoError):
        emit(sample_table(), "csv", tmp_path / "no" / "dir" / "out.csv")
    with pytest.raises(BadParams):
        emit(sample_table(), "xml")


# --- purity sweeps ----------------------------------------------------------


def test_fig1_small_rows():
    t = run_fig1(small())
    assert t.columns == ("level", "scheme", "n_pulses", "purity_loss", "precision_bits")
    rec = {(r["scheme"], r["level"]): r for r in t.records()}
    assert rec[("CDD", 1)]["purity_loss"] == rec[("PDD", 1)]["purity_loss"]
    assert [rec[("CDD", n)]["n_pulses"] for n in (1, 2, 3)] == [4, 20, 84]
    assert [rec[("PDD", n)]["n_pulses"] for n in (1, 2, 3)] == [4, 16, 64]
    assert all(isinstance(r["precision_bits"], int) and r["precision_bits"] >= 53 for r in t.records())
    assert t.config_hash == small().config_hash


def test_fig1_convergence_failures_reported():
    t = run_fig1(small())
    assert any(f.startswith("level=1 ") for f in t.convergence_failures)


def test_fig1_deterministic_and_thread_independent():
    a = table_to_csv(run_fig1(small()))
    b = table_to_csv(run_fig1(small()))
    c = table_to_csv(run_fig1(small(), threads=4))
    assert a == b == c


def test_fig2_zero_width_matches_fig1():
    cfg = small(pulse_widths=(Fraction(0),))
    f1 = {(r["scheme"], r["level"]): r["purity_loss"] for r in run_fig1(cfg).records()}
    f2 = {(r["scheme"], r["level"]): r["purity_loss"] for r in run_fig2(cfg).records()}
    assert f1 == f2


def test_fig2_skips_wide_pulses():
    cfg = small(total_time=Fraction(1, 10 ** 9), pulse_widths=(Fraction(1, 10 ** 10),), levels=(1, 2))
    rows = run_fig2(cfg).records()
    status = {(r["scheme"], r["level"]): r["status"] for r in rows}
    assert status[("CDD", 1)] == "ok" and status[("CDD", 2)] == "skipped"
    assert all(r["purity_loss"] == "" for r in rows if r["status"] == "skipped")


def test_fixed_precision_used():
    t = run_fig1(small(levels=(2,), precision=PrecisionPolicy.fixed(192)))
    assert set(t.column("precision_bits")) == {192}


# --- scaling -----------------------------------------------------------------


def test_pdd_phase_linear_in_tau():
    cfg = ExperimentConfig(experiment="table1_scaling", scheme="PDD", tau_min=Fraction(1, 10 ** 9),
                           tau_max=Fraction(1, 10 ** 7), n_points=5)
    t = run_scaling(cfg)
    assert abs(t.meta["slope"] - 1) <= 0.1
    bound = [float(x) for x in t.column("phi_bound")]
    exact = [float(x) for x in t.column("phi_exact")]
    assert all(e <= b for e, b in zip(exact, bound))


def test_tsds_order3_slope():
    cfg = ExperimentConfig(experiment="table1_scaling", scheme="TSDS", tsds_order=3,
                           tau_min=Fraction(1, 10 ** 10), tau_max=Fraction(1, 10 ** 8), n_points=5)
    assert abs(run_scaling(cfg).meta["slope"] - 3) <= 0.3


def test_cpmg_has_no_bound_column():
    cfg = ExperimentConfig(experiment="table1_scaling", scheme="CPMG", n_points=3)
    t = run_scaling(cfg)
    assert set(t.column("phi_bound")) == {""}


def test_fit_slope():
    assert fit_slope([1, 10, 100], [2, 200, 20000]) == pytest.approx(2)


# --- ratio -------------------------------------------------------------------


def test_ratio_level_one_is_one():
    t = run_ratio(ExperimentConfig(experiment="pdd_cdd_ratio", levels=(1, 2), model_j=1e5))
    r = t.records()
    assert float(r[0]["ratio_exact"]) == pytest.approx(1.0, rel=1e-12)
    assert float(r[1]["ratio_exact"]) < 1
    assert float(r[0]["ratio_bound"]) == pytest.approx(1.0)


# --- Thompson ----------------------------------------------------------------


def test_thompson_sweep_small():
    t = run_thompson_sweep(ExperimentConfig(experiment="thompson_sweep", n_draws=25))
    assert t.meta["violations"] == 0 and len(t.rows) == 25
    assert all(r["holds"] for r in t.records())


def test_random_ideal_sequence_scale():
    import numpy as np

    rng = np.random.default_rng(0)
    for _ in range(20):
        s = random_ideal_sequence(rng, scale=0.5)
        assert 0 < s.total_duration <= Fraction(1, 2) + Fraction(1, 10 ** 9)
        assert 1 <= s.pulse_count <= 12


# --- custom ------------------------------------------------------------------


def test_custom_sequence(tmp_path):
    p = tmp_path / "seq.txt"
    gen_cdd(Fraction(1, 10 ** 7), 2).save(p)
    cfg = ExperimentConfig(experiment="custom", sequence_file=str(p), pulse_widths=(Fraction(0),))
    t = run_custom(cfg)
    row = t.records()[0]
    assert row["n_pulses"] == 20 and row["duration_s"] == "0.0000016"
    assert float(row["purity_loss"]) > 0 and float(row["error_phase"]) > 0


def test_custom_needs_file():
    with pytest.raises(BadParams):
        run_custom(ExperimentConfig(experiment="custom"))
    with pytest.raises(IoError):
        run_custom(ExperimentConfig(experiment="custom", sequence_file="/nonexistent/seq.txt"))


def test_run_experiment_dispatch():
    with pytest.raises(BadParams):
        run_experiment(ExperimentConfig(), threads=0)
    t = run_experiment(ExperimentConfig(experiment="thompson_sweep", n_draws=3))
    assert t.experiment == "thompson_sweep"


# --- shipped configs -----------------------------------------------------------


@pytest.mark.parametrize("path", sorted((Path(__file__).parent.parent / "configs").glob("*.ini")),
                         ids=lambda p: p.name)
def test_shipped_configs_parse(path):
    cfg = ExperimentConfig.from_ini(path)
    assert cfg.experiment == path.read_text().split("experiment = ")[1].split()[0]
