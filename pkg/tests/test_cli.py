import json

import numpy as np
import pytest

from cavitykit.cli import main


def run_cli(*argv):
    return main(list(argv))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def fixtures(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixtures")
    assert run_cli("gen-synthetic", "--out-dir", str(out)) == 0
    return out


def test_gen_synthetic_writes_index(fixtures):
    index = read_json(fixtures / "index.json")
    assert index["schema_version"] == 1
    assert index["files"]["tau_detuning"] == "tau_detuning.csv"
    assert len(index["files"]["decay_traces"]) == 9
    assert (fixtures / "field_grid.fgrid").exists()


def test_fit_detuning_on_fixture(fixtures, tmp_path):
    out = tmp_path / "fit.json"
    code = run_cli("fit-detuning", str(fixtures / "tau_detuning.csv"),
                   "--out", str(out))
    assert code == 0
    doc = read_json(out)
    assert doc["schema_version"] == 1
    assert doc["result"]["params"]["c"] == pytest.approx(0.14, abs=1e-6)
    assert doc["result"]["params"]["tau1"] == pytest.approx(15.9e-9, rel=1e-6)


def test_fit_decay_on_fixture(fixtures, tmp_path):
    out = tmp_path / "fit.json"
    code = run_cli("fit-decay", str(fixtures / "decay_trace_04.csv"),
                   "--out", str(out))
    assert code == 0
    doc = read_json(out)
    # index 04 is the on-resonance trace of the sweep
    assert doc["result"]["params"]["tau"] == pytest.approx(13.97e-9, rel=1e-3)


def test_fit_spectrum_on_fixture(fixtures, tmp_path):
    out = tmp_path / "fit.json"
    assert run_cli("fit-spectrum", str(fixtures / "spectrum.csv"),
                   "--out", str(out)) == 0
    doc = read_json(out)
    assert doc["result"]["derived"]["lambda_cav"] == pytest.approx(638.2, abs=1e-3)


def test_simulate_decay(tmp_path):
    out = tmp_path / "sim.json"
    trace_csv = tmp_path / "trace.csv"
    code = run_cli("simulate-decay", "--g0-ghz", "0.57", "--kappa-ghz", "940",
                   "--tau1-ns", "15.9", "--points", "64",
                   "--trace-csv", str(trace_csv), "--out", str(out))
    assert code == 0
    doc = read_json(out)
    ana = doc["result"]["analytic_rate_per_s"]
    ext = doc["result"]["extracted_rate_per_s"]
    assert abs(ext - ana) / ana < 0.02
    assert trace_csv.exists()


def test_purcell_subcommand(tmp_path):
    out = tmp_path / "p.json"
    assert run_cli("purcell", "--c", "0.14", "--eta-dw", "0.02",
                   "--out", str(out)) == 0
    doc = read_json(out)
    assert doc["result"]["entries"][0]["f_zpl"] == pytest.approx(8.0, rel=1e-9)
    # lifetime form with suppression
    assert run_cli("purcell", "--tau-on-ns", "20", "--tau-off-ns", "15.9",
                   "--eta-dw", "0.02", "--out", str(out)) == 0
    doc = read_json(out)
    assert doc["result"]["entries"][0]["suppressed"] is True


def test_g0_subcommand(tmp_path):
    out = tmp_path / "g0.json"
    assert run_cli("g0", "--tau1-ns", "16", "--nu-thz", "475",
                   "--vmode-normalized", "0.5", "--out", str(out)) == 0
    doc = read_json(out)
    lo, hi = doc["result"]["entries"]
    assert lo["g0_hz"] == pytest.approx(2.9e9, rel=0.05)
    assert hi["g0_hz"] == pytest.approx(3.5e9, rel=0.05)


def test_mode_volume_and_ensemble_weight(fixtures, tmp_path):
    grid = str(fixtures / "field_grid.fgrid")
    out = tmp_path / "mv.json"
    assert run_cli("mode-volume", grid, "--lambda-nm", "637",
                   "--out", str(out)) == 0
    doc = read_json(out)
    assert doc["result"]["v_mode_m3"] > 0
    assert doc["result"]["v_mode_normalized"] > 0
    out2 = tmp_path / "ew.json"
    assert run_cli("ensemble-weight", grid, "--threshold", "0.2",
                   "--out", str(out2)) == 0
    doc2 = read_json(out2)
    assert 0.0 < doc2["result"]["weighting_factor"] <= 1.0 / np.sqrt(3.0) + 1e-12


def test_link_budget_quick_form(tmp_path, capsys):
    out = tmp_path / "lb.json"
    assert run_cli("link-budget", "--db-per-cm", "1.9", "--length-cm", "0",
                   "--out", str(out)) == 0
    assert read_json(out)["result"]["total_efficiency"] == 1.0
    assert "element" in capsys.readouterr().out


def test_link_budget_chain_file(tmp_path):
    chain = tmp_path / "chain.json"
    chain.write_text(json.dumps([
        {"name": "taper", "efficiency": 0.8},
        {"name": "wg", "loss_db_per_cm": 1.9, "length_cm": 0.35},
        {"name": "edge", "efficiency": 0.197, "efficiency_err": 0.045},
    ]))
    out = tmp_path / "lb.json"
    assert run_cli("link-budget", str(chain), "--measured-total", "0.10",
                   "--quiet", "--out", str(out)) == 0
    doc = read_json(out)
    assert doc["result"]["total_efficiency"] == pytest.approx(0.1352, abs=5e-4)
    assert "residual_db" in doc["result"]


def test_every_subcommand_is_deterministic(fixtures, tmp_path):
    grid = str(fixtures / "field_grid.fgrid")
    detuning_csv = str(fixtures / "tau_detuning.csv")
    decay_csv = str(fixtures / "decay_trace_00.csv")
    spectrum_csv = str(fixtures / "spectrum.csv")
    chain = tmp_path / "chain.json"
    chain.write_text(json.dumps([{"name": "a", "efficiency": 0.5}]))
    invocations = {
        "simulate-decay": ["simulate-decay", "--g0-ghz", "0.57", "--kappa-ghz",
                           "940", "--tau1-ns", "15.9", "--points", "32"],
        "fit-decay": ["fit-decay", decay_csv],
        "fit-detuning": ["fit-detuning", detuning_csv],
        "fit-spectrum": ["fit-spectrum", spectrum_csv],
        "purcell": ["purcell", "--c", "0.14"],
        "g0": ["g0", "--tau1-ns", "16", "--nu-thz", "475",
               "--vmode-normalized", "0.5"],
        "ensemble-weight": ["ensemble-weight", grid, "--threshold", "0.2"],
        "mode-volume": ["mode-volume", grid, "--lambda-nm", "637"],
        "link-budget": ["link-budget", str(chain), "--quiet"],
    }
    for name, argv in invocations.items():
        pair = []
        for tag in ("a", "b"):
            out = tmp_path / f"{name}-{tag}.json"
            assert run_cli(*argv, "--out", str(out)) == 0, name
            pair.append(out.read_bytes())
        assert pair[0] == pair[1], f"{name} output not byte-identical"
    # gen-synthetic with a fixed seed
    dirs = []
    for tag in ("a", "b"):
        d = tmp_path / f"gen-{tag}"
        assert run_cli("gen-synthetic", "--seed", "42", "--what", "tau-detuning",
                       "--out-dir", str(d)) == 0
        dirs.append((d / "tau_detuning.csv").read_bytes()
                    + (d / "index.json").read_bytes())
    assert dirs[0] == dirs[1]


def test_fit_replay_round_trip(fixtures, tmp_path):
    fit1 = tmp_path / "fit1.json"
    assert run_cli("fit-detuning", str(fixtures / "tau_detuning.csv"),
                   "--out", str(fit1)) == 0
    replay_dir = tmp_path / "replay"
    assert run_cli("gen-synthetic", "--what", "tau-detuning",
                   "--params-json", str(fit1), "--out-dir", str(replay_dir)) == 0
    fit2 = tmp_path / "fit2.json"
    assert run_cli("fit-detuning", str(replay_dir / "tau_detuning.csv"),
                   "--out", str(fit2)) == 0
    p1 = read_json(fit1)["result"]["params"]
    p2 = read_json(fit2)["result"]["params"]
    for key in ("c", "kappa", "tau1"):
        assert p2[key] == pytest.approx(p1[key], rel=1e-9)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run_cli("no-such-command") == 2
    assert run_cli("fit-detuning", str(tmp_path / "missing.csv")) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("delta_hz,tau_s\n1.0,2.0,3.0,4.0\n")
    assert run_cli("fit-detuning", str(bad)) == 2
    err = capsys.readouterr().err
    assert "usage error" in err
    assert run_cli("purcell") == 2  # neither --c nor lifetimes
    assert run_cli("link-budget") == 2


def test_domain_errors_exit_1(tmp_path, capsys):
    same = tmp_path / "same.csv"
    same.write_text("delta_hz,tau_s\n" + "".join(
        f"1e11,{15e-9 + i * 1e-10!r}\n" for i in range(6)))
    assert run_cli("fit-detuning", str(same)) == 1
    assert "error" in capsys.readouterr().err
    assert run_cli("purcell", "--c", "-1.0") == 1
