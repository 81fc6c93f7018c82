import json
import math

import numpy as np
import pytest

from lipdist import FiniteMetricSpace
from lipdist.cli import main
from lipdist.io import dump_space, space_to_dict


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_space(path, dist, name):
    dist = np.asarray(dist, dtype=float)
    dump_space(FiniteMetricSpace(name, tuple(str(i) for i in range(len(dist))), dist), path)
    return path


def test_build_interval(tmp_path, capsys):
    code, out, _ = run(capsys, "build", "interval", "11", "--N", 2, "--k", 2, "--out", tmp_path / "x.json")
    assert code == 0
    assert "5 points" in out and "diameter 0.75" in out
    data = json.loads((tmp_path / "x.json").read_text())
    assert data["provenance"] == {"family": "interval", "u": "11", "N": 2, "k": 2}


def test_build_pulse_flat(tmp_path, capsys):
    code, _, _ = run(capsys, "build", "pulse", "000", "--N", 3, "--k", 2, "--eps", 1, "--out", tmp_path / "y.json")
    assert code == 0
    coords = json.loads((tmp_path / "y.json").read_text())["coords"]
    assert all(y == 0 for _, y in coords)


def test_build_bad_sign_vector(tmp_path, capsys):
    code, _, err = run(capsys, "build", "interval", "13", "--out", tmp_path / "x.json")
    assert code == 1
    assert "position 2" in err


def test_build_length_mismatch(tmp_path, capsys):
    code, _, err = run(capsys, "build", "interval", "12", "--N", 3, "--out", tmp_path / "x.json")
    assert code == 1


def test_validate(tmp_path, capsys):
    good = write_space(tmp_path / "good.json", [[0, 1], [1, 0]], "G")
    bad = write_space(tmp_path / "bad.json", [[0, 1, 3], [1, 0, 1], [3, 1, 0]], "B")
    assert run(capsys, "validate", good)[0] == 0
    code, out, _ = run(capsys, "validate", bad)
    assert code == 1 and "triangle at (0,1,2)" in out


def test_dist_exit_codes(tmp_path, capsys):
    a = write_space(tmp_path / "a.json", [[0, 1], [1, 0]], "A")
    b = write_space(tmp_path / "b.json", [[0, 2], [2, 0]], "B")
    c = write_space(tmp_path / "c.json", [[0, 1, 1], [1, 0, 1], [1, 1, 0]], "C")
    bad = write_space(tmp_path / "bad.json", [[0, 1, 3], [1, 0, 1], [3, 1, 0]], "Bad")

    code, out, _ = run(capsys, "dist", a, a)
    assert code == 0 and json.loads(out)["value"] == 0.0

    code, out, _ = run(capsys, "dist", a, b)
    res = json.loads(out)
    assert code == 0 and res["status"] == "exact"
    assert res["value"] == pytest.approx(2 * math.log(2), abs=1e-12)
    assert set(res) == {"status", "value", "bracket", "perm", "nodes", "time"}

    code, out, _ = run(capsys, "dist", c, a)
    assert code == 3 and json.loads(out)["status"] == "infinite"

    code, _, err = run(capsys, "dist", bad, c)
    assert code == 1 and "triangle" in err


def test_dist_bounded_mode_and_budget(tmp_path, capsys):
    rng = np.random.default_rng(0)
    for name in ("p", "q"):
        pts = rng.random((9, 2))
        S = FiniteMetricSpace.from_coords(name, [f"{name}{i}" for i in range(9)], pts)
        (tmp_path / f"{name}.json").write_text(json.dumps(space_to_dict(S)))
    code, out, _ = run(capsys, "dist", tmp_path / "p.json", tmp_path / "q.json", "--mode", "bound")
    res = json.loads(out)
    assert code == 2 and res["status"] == "bracketed" and res["value"] is None
    lo, hi = res["bracket"]
    code, out, _ = run(capsys, "bound", tmp_path / "p.json", tmp_path / "q.json")
    assert code == 2 and json.loads(out)["bracket"] == [lo, hi]
    code, out, _ = run(capsys, "dist", tmp_path / "p.json", tmp_path / "q.json")
    exact = json.loads(out)["value"]
    assert code == 0 and lo <= exact + 1e-12 and exact <= hi + 1e-12
    code, out, _ = run(capsys, "dist", tmp_path / "p.json", tmp_path / "q.json", "--budget-nodes", 1)
    assert code in (0, 2)


def test_dilation_command(tmp_path, capsys):
    run(capsys, "build", "interval", "11", "--out", tmp_path / "x.json")
    run(capsys, "build", "interval", "22", "--out", tmp_path / "y.json")
    (tmp_path / "f.json").write_text(json.dumps(
        {"format_version": 1, "kind": "map", "source": "X_11", "target": "X_22", "perm": [0, 1, 2, 3, 4]}))
    code, out, _ = run(capsys, "dilation", tmp_path / "f.json", "--source", tmp_path / "x.json",
                       "--target", tmp_path / "y.json")
    rep = json.loads(out)
    assert code == 0
    assert rep["dil_forward"] == pytest.approx(1.5) and rep["dil_inverse"] == pytest.approx(2.0)
    code, _, _ = run(capsys, "dilation", tmp_path / "f.json", "--source", tmp_path / "y.json",
                     "--target", tmp_path / "x.json")
    assert code == 1


def test_experiment_ce(tmp_path, capsys):
    code, out, _ = run(capsys, "experiment", "ce", "--N", 3, "--k", 2, "--out", tmp_path)
    assert code == 0
    assert "max_value: 1.3862943611198906" in out and "min_gap: 0.6931471805599453" in out
    rows = (tmp_path / "ce.csv").read_text().splitlines()[2:]
    assert sum(1 for r in rows if r.split(",")[0] != r.split(",")[1]) == 28


def test_experiment_fixtures_and_remark(tmp_path, capsys):
    code, out, _ = run(capsys, "experiment", "fixtures", "--out", tmp_path)
    assert code == 0 and "check straddle: pass" in out
    code, out, _ = run(capsys, "experiment", "remark", "--eps", "1,0.5,0.25", "--out", tmp_path)
    assert code == 0
    data = json.loads((tmp_path / "remark.json").read_text())
    costs = [r["cost"] for r in data["rows"]]
    assert len(costs) == 3 and costs == sorted(costs, reverse=True)


def test_experiment_ce2_prints_threshold(tmp_path, capsys):
    code, out, _ = run(capsys, "experiment", "ce2", "--out", tmp_path)
    assert code == 0 and "threshold: 0.0383273" in out


def test_experiment_random_sample(tmp_path, capsys):
    code, _, _ = run(capsys, "experiment", "ce", "--N", 5, "--k", 2, "--sample", 4, "--seed", 3, "--out", tmp_path)
    assert code == 0
    assert json.loads((tmp_path / "ce.json").read_text())["config"]["count"] == 4


def test_unknown_experiment(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["experiment", "nope"])
    assert exc.value.code == 1
    assert "ce, ce2, remark, fixtures" in capsys.readouterr().err.replace("'", "")


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "validate", tmp_path / "none.json")
    assert code == 1
