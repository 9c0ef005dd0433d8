import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qsl import cli
from qsl.composite import ratio_lower_bound
from qsl.states import PureState, TwoLevelState, state_to_dict


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bounds_default_first_row(capsys):
    code, out, _ = run(capsys, "bounds", "--eps-resolution", "5")
    assert code == 0
    r = rows(out)
    assert float(r[0]["alpha_upper"]) == 1.0 and float(r[0]["beta"]) == 1.0
    assert abs(float(r[0]["alpha_lower"]) - 1) <= max(float(r[0]["alpha_err"]), 1e-3)
    assert float(r[1]["eps"]) == 0.25 and r[1]["beta"] == "0.666666666667"
    assert out.splitlines()[0] == "eps,alpha_lower,alpha_err,alpha_upper,beta,beta_sq"


def test_bounds_two_rows(capsys):
    code, out, _ = run(capsys, "bounds", "--eps-resolution", "2")
    assert code == 0
    assert [float(r["eps"]) for r in rows(out)] == [0.0, 1.0]


def test_bounds_json_mirrors_columns(capsys):
    code, out, _ = run(capsys, "bounds", "--eps-resolution", "2", "--format", "json")
    data = json.loads(out)
    assert data["eps"] == [0.0, 1.0] and len(data["beta_sq"]) == 2


def test_forbid_touch_point(capsys):
    code, out, _ = run(capsys, "forbid", "--e", "1", "--de", "1.73", "--xi", "0.5",
                       "--eps", "0.30", "--format", "json")
    assert code == 0
    data = json.loads(out)
    touch = data["touch"]
    assert touch["t"] == pytest.approx(0.42, abs=0.01)
    assert touch["floor"] == pytest.approx(0.30, abs=1e-2)
    assert data["t"][0] == 0 and data["floor"][0] == 1
    assert data["P_omega"][0] == pytest.approx(1.0, abs=1e-15)


def test_forbid_csv_header_and_natural_units(capsys):
    code, out, err = run(capsys, "forbid", "--e", "1", "--de", "1.73", "--eps", "0.3",
                         "--units", "natural", "--steps", "10")
    r = rows(out)
    assert list(r[0]) == ["t", "floor_alpha", "floor_beta", "floor", "P_omega"]
    assert float(r[-1]["t"]) == pytest.approx(math.pi / 2)
    assert "touch" in err
    assert "\r" not in out


def test_forbid_rejects_bad_resources(capsys):
    assert run(capsys, "forbid", "--e", "0", "--de", "1")[0] == 64
    assert run(capsys, "forbid", "--e", "1", "--de", "1", "--t-max", "5")[0] == 64


def test_ratio(capsys):
    code, out, _ = run(capsys, "ratio", "--m", "5", "--eps-resolution", "3")
    r = rows(out)
    assert float(r[0]["r_lower"]) == pytest.approx(math.sqrt(5), abs=1e-11)
    assert r[0]["branch"] == "Heisenberg"
    assert float(r[1]["r_lower"]) == float(format(ratio_lower_bound(0.5, 5), ".12g"))
    code, out, _ = run(capsys, "ratio", "--m", "2", "--eps-resolution", "101")
    tail = [float(x["r_lower"]) for x in rows(out)[-5:]]
    assert tail[-1] == 1.0 and all(1 <= v < 1.01 for v in tail)


def test_usage_errors(capsys):
    assert run(capsys, "ratio", "--m", "1")[0] == 64
    with pytest.raises(SystemExit) as ex:
        cli.main(["nonsense"])
    assert ex.value.code == 64
    with pytest.raises(SystemExit) as ex:
        cli.main(["bounds", "--seed", "-3"])
    assert ex.value.code == 64
    assert run(capsys, "bounds", "--eps-resolution", "1")[0] == 64


def test_verify_is_byte_identical(capsys):
    a = run(capsys, "verify", "subadditivity", "--seed", "42")
    b = run(capsys, "verify", "subadditivity", "--seed", "42")
    assert a[0] == 0 and a[1] == b[1]
    data = json.loads(a[1])
    beta_checks = [c for c in data["reports"][0]["checks"] if c["name"].startswith("beta_sq")]
    assert all(c["margin"] >= -1e-9 for c in beta_checks)


def test_verify_forbidden(capsys):
    code, out, _ = run(capsys, "verify", "forbidden", "--seed", "7")
    check = json.loads(out)["reports"][0]["checks"][0]
    assert code == 0 and check["states"] == 200 and check["violating_states"] == 0


def test_verify_all_twice_in_fresh_processes(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "qsl.cli", "verify", "all", "--seed", "42",
                        "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["ok"]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("QSL_SEED", "9")
    _, out, _ = run(capsys, "verify", "mixture")
    assert json.loads(out)["seed"] == 9
    _, out, _ = run(capsys, "verify", "mixture", "--seed", "3")
    assert json.loads(out)["seed"] == 3


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"eps_resolution": 3, "output_format": "json"}))
    _, out, _ = run(capsys, "ratio", "--m", "3", "--config", str(cfg))
    assert json.loads(out)["eps"] == [0.0, 0.5, 1.0]
    _, out, _ = run(capsys, "ratio", "--m", "3", "--config", str(cfg), "--format", "csv")
    assert out.startswith("eps,r_lower,branch\n")
    cfg.write_text(json.dumps({"grid_ladder": [0.1, 0.2, 0.05]}))
    assert run(capsys, "ratio", "--m", "3", "--config", str(cfg))[0] == 64


def _write(tmp_path, obj):
    p = tmp_path / "state.json"
    p.write_text(json.dumps(state_to_dict(obj)))
    return str(p)


def test_evolve_eigenstate(tmp_path, capsys):
    path = _write(tmp_path, PureState.eigenstate([0, 1, 2], 2))
    code, out, _ = run(capsys, "evolve", path, "--t-max", "3", "--steps", "6")
    assert code == 0 and all(float(r["P"]) == 1.0 for r in rows(out))


def test_evolve_matches_forbid_column(tmp_path, capsys):
    # Omega_0.5 with E = 1: levels {0, 4}
    path = _write(tmp_path, TwoLevelState(0.5, 4.0).pure)
    _, ev, _ = run(capsys, "evolve", path, "--t-max", "1", "--steps", "40")
    _, fb, _ = run(capsys, "forbid", "--e", "1", "--de", str(math.sqrt(3)), "--xi", "0.5",
                   "--steps", "40")
    assert [r["P"] for r in rows(ev)] == [r["P_omega"] for r in rows(fb)]
    assert [r["t"] for r in rows(ev)] == [r["t"] for r in rows(fb)]


def test_evolve_pure_density_gives_fidelity(tmp_path, capsys):
    s = PureState.normalized([0, 1, 2.5], [1, 1j, 0.5])
    _, p_out, _ = run(capsys, "evolve", _write(tmp_path, s), "--t-max", "2", "--steps", "8")
    _, f_out, _ = run(capsys, "evolve", _write(tmp_path, ([1.0], [s])), "--t-max", "2", "--steps", "8")
    p = np.array([float(r["P"]) for r in rows(p_out)])
    f = np.array([float(r["F"]) for r in rows(f_out)])
    np.testing.assert_allclose(f, p, atol=1e-9)


def test_evolve_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"levels": [0, 1], "amplitudes_re": [3, 4]}')
    assert run(capsys, "evolve", str(bad), "--t-max", "1")[0] == 65
    bad.write_text("{")
    assert run(capsys, "evolve", str(bad), "--t-max", "1")[0] == 65


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.csv"
    run(capsys, "ratio", "--m", "4", "--eps-resolution", "4", "--out", str(path))
    data = path.read_bytes()
    assert data.endswith(b"\n") and b"\r" not in data


@pytest.mark.parametrize("cmd,words", [("bounds", "alpha/beta curves"),
                                       ("forbid", "forbidden-region figure"),
                                       ("ratio", "ratio figure")])
def test_help_names_the_figure(cmd, words, capsys):
    with pytest.raises(SystemExit):
        cli.main([cmd, "--help"])
    assert words in " ".join(capsys.readouterr().out.split())


def test_verify_exit_code_on_violation(capsys, monkeypatch):
    from qsl import suites
    bad = lambda seed: {"suite": "forbidden", "seed": seed, "checks": [], "violations": 1, "ok": False}
    monkeypatch.setitem(suites.SUITES, "forbidden", bad)
    assert run(capsys, "verify", "forbidden")[0] == 1


def test_bounds_exit_code_on_incompatible(capsys, monkeypatch):
    from qsl import bounds
    real = bounds.alpha

    def skewed(eps, grid=None, strict=True):
        est = real(eps, grid, strict=False)
        return bounds.AlphaEstimate(est.epsilon, est.lower, est.upper + 0.1, est.reconciled, False)

    monkeypatch.setattr(bounds, "alpha", skewed)
    code, out, err = run(capsys, "bounds", "--eps-resolution", "2")
    assert code == 2 and "incompatible" in err
