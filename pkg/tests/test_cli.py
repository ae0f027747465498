import json

import pytest

from divilab.cli import dispatch


def run(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def strip_time(line):
    rec = json.loads(line)
    rec.pop("wall_time", None)
    return rec


def test_fn_n1(capsys):
    code, out = run(capsys, "fn", "--n", "1", "--what", "delta")
    assert code == 0
    assert out.strip().splitlines()[1] == "1,1"


def test_fn_g(capsys):
    code, out = run(capsys, "fn", "--n", "12", "--what", "g")
    assert code == 0
    assert out.splitlines() == ["n,value", "12,3.08333333333"]


def test_fn_delta_range(capsys):
    code, out = run(capsys, "fn", "--range", "1:4", "--what", "delta")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert rows == ["1,1", "2,2", "3,1", "4,2"]


def test_fn_er_and_ftheta(capsys):
    code, out = run(capsys, "fn", "--n", "12", "--what", "er:2")
    assert code == 0
    assert out.strip().splitlines()[1].startswith("12,0.693147")
    code, out = run(capsys, "fn", "--n", "12", "--what", "ftheta:0.5")
    assert out.strip().splitlines()[1] == "12,0.5"


def test_lambda_median(capsys):
    code, out = run(capsys, "lambda", "--k", "2", "--median")
    assert code == 0
    rec = json.loads(out)
    assert rec["values"]["p_star"] == 37


def test_lambda_row_csv(capsys):
    code, out = run(capsys, "lambda", "--k", "1", "--pmax", "10")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,lambda,cumsum"
    assert len(lines) == 5
    assert lines[1].startswith("2,0.5,0.5")


def test_lambdad_exact(capsys):
    code, out = run(capsys, "lambdad", "--k", "3", "--d", "4")
    assert code == 0
    rec = json.loads(out)
    assert rec["values"]["point"] == pytest.approx(1 / 6, abs=1e-9)
    assert rec["values"]["method"] == "exact_period"


def test_lambdad_mc_needs_seed(capsys):
    code, _ = run(capsys, "lambdad", "--k", "3", "--d", "30", "--method", "mc")
    assert code == 64


def test_multiples_exact(capsys):
    code, out = run(capsys, "multiples", "--interval", "4:8", "--density", "exact")
    assert code == 0
    rec = json.loads(out)
    assert rec["values"]["point"] == pytest.approx(17 / 35, abs=1e-10)
    assert rec["values"]["lower"] == rec["values"]["upper"]
    assert rec["values"]["method"] == "exact_ie"


def test_multiples_bonferroni(capsys):
    code, out = run(capsys, "multiples", "--gens", "2,3", "--density", "bonferroni:1")
    rec = json.loads(out)
    assert rec["values"]["lower"] - 1e-12 <= 2 / 3 <= rec["values"]["upper"] + 1e-12


def test_multiples_sequential(capsys):
    code, out = run(capsys, "multiples", "--gens", "2,3,5", "--density", "seq:2,3,5")
    rec = json.loads(out)
    pts = [e["point"] for e in rec["values"]["sequence"]]
    assert pts == pytest.approx([0.5, 2 / 3, 11 / 15])


def test_exp_constants(capsys):
    code, out = run(capsys, "exp", "--preset", "constants")
    rec = json.loads(out)
    assert rec["values"]["delta"] == pytest.approx(0.0860713320559, abs=1e-10)
    assert rec["values"]["tag"] == "exact"


def test_exp_eps(capsys):
    code, out = run(capsys, "exp", "--preset", "eps", "--y", "2", "--z", "4", "--x", "100")
    rec = json.loads(out)
    assert rec["values"]["rho1"] == pytest.approx(5 / 6, abs=1e-9)
    assert rec["values"]["eps"]["method"] == "exact_ie"


def test_exp_dtheta(capsys):
    code, out = run(capsys, "exp", "--preset", "dtheta", "--theta", "golden", "--n", "12")
    rec = json.loads(out)
    assert rec["values"]["argmin_d"] == 3
    assert rec["values"]["min"] == pytest.approx(0.145898, abs=1e-5)


def test_exp_preset_smoke(capsys):
    code, out = run(capsys, "exp", "--preset", "nu", "--x", "5000")
    assert code == 0
    assert out.splitlines()[0] == "grid,value"
    code, out = run(capsys, "exp", "--preset", "pplus", "--x", "5000", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert 0.4 < rec["values"]["frac_up"] < 0.6
    code, out = run(capsys, "exp", "--preset", "erdos-kac", "--x", "5000",
                    "--format", "json")
    assert json.loads(out)["values"]["ks_vs_gaussian"] > 0
    code, out = run(capsys, "exp", "--preset", "totients", "--x", "50")
    assert code == 0
    code, out = run(capsys, "exp", "--preset", "tsum", "--x", "2000", "--threads", "2")
    rec = json.loads(out)
    assert rec["values"]["direct"] == rec["values"]["dyadic"]
    code, out = run(capsys, "exp", "--preset", "median-primes", "--k", "1,2")
    rec = json.loads(out)
    assert rec["values"]["p1_star"] == 3 and rec["values"]["p2_star"] == 37
    assert rec["values"]["p1_tie_at"] == 2


def test_unknown_flag_is_usage_error(capsys):
    code, _ = run(capsys, "fn", "--n", "12", "--what", "g", "--bogus")
    assert code == 64
    code, _ = run(capsys, "nothing")
    assert code == 64
    code, _ = run(capsys, "fn", "--n", "12", "--what", "er:abc")
    assert code == 64
    code, _ = run(capsys, "multiples", "--interval", "4-8", "--density", "exact")
    assert code == 64


def test_domain_error_exit(capsys):
    code, _ = run(capsys, "fn", "--n", "4", "--what", "er:9")
    assert code == 2


def test_resource_error_exit(capsys):
    code, _ = run(capsys, "sieve", "--limit", str(10**13))
    assert code == 3


def test_sieve_cache_env(tmp_path, monkeypatch, capsys):
    cache = tmp_path / "spf.dvl"
    monkeypatch.setenv("DIVILAB_CACHE", str(cache))
    code, out = run(capsys, "sieve", "--limit", "5000")
    assert code == 0
    assert cache.exists()
    # reuse: fn against the cached sieve
    code, out = run(capsys, "fn", "--n", "12", "--what", "tauplus")
    assert code == 0
    assert out.strip().splitlines()[1] == "12,5"


def test_output_file(tmp_path, capsys):
    out_path = tmp_path / "res.csv"
    code, out = run(capsys, "fn", "--n", "12", "--what", "delta", "--out", str(out_path))
    assert code == 0
    assert out == ""
    assert out_path.read_text().splitlines()[1] == "12,3"


def test_determinism_json(capsys):
    a = run(capsys, "lambdad", "--k", "5", "--d", "30", "--method", "mc",
            "--samples", "20000", "--seed", "99")[1]
    b = run(capsys, "lambdad", "--k", "5", "--d", "30", "--method", "mc",
            "--samples", "20000", "--seed", "99")[1]
    assert strip_time(a) == strip_time(b)


def test_manifest(tmp_path, capsys):
    mf = tmp_path / "run.manifest"
    mf.write_text(
        "# demo manifest\n"
        "exp --preset constants\n"
        "exp --preset median-primes --k 2\n"
    )
    code, out = run(capsys, "manifest", str(mf))
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["values"]["p2_star"] == 37


def test_manifest_empty(tmp_path, capsys):
    mf = tmp_path / "empty.manifest"
    mf.write_text("\n# nothing\n")
    code, out = run(capsys, "manifest", str(mf))
    assert code == 0
    assert out == ""


def test_manifest_partial_failure(tmp_path, capsys):
    mf = tmp_path / "bad.manifest"
    mf.write_text("exp --preset constants\nfn --n 4 --what er:9\n")
    code, out = run(capsys, "manifest", str(mf))
    assert code == 1
    lines = out.strip().splitlines()
    assert json.loads(lines[1])["command"] == "error"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "divilab.cfg"
    cfg.write_text("threads=2\nseed=5\n")
    code, _ = run(capsys, "exp", "--preset", "constants", "--config", str(cfg))
    assert code == 0
    # config-file seed satisfies the Monte Carlo requirement
    code, out = run(capsys, "lambdad", "--k", "3", "--d", "25", "--method", "mc",
                    "--samples", "10000", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["values"]["params"]["seed"] == 5
    cfg.write_text("nonsense line\n")
    code, _ = run(capsys, "exp", "--preset", "constants", "--config", str(cfg))
    assert code == 64
