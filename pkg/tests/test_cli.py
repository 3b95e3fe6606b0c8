import json

import pytest

from conftest import ROOT
from effekta.cli import INPUT_ERROR, OK, PROPERTY_FAILED, TYPE_ERROR, UNDECIDED_EXIT, main
from effekta.config import ConfigError, config_from_dict, load_config
from effekta.interpretations import InterpKind

CONFIGS = ROOT / "configs"
PROGRAMS = ROOT / "programs"


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# ---- configuration


def test_shipped_configs_load():
    for path in CONFIGS.glob("*.json"):
        cfg = load_config(path)
        assert cfg.impls and cfg.budgets.steps > 0


@pytest.mark.parametrize("raw,message", [
    ({"monad": "state"}, "unknown monad"),
    ({"monad": "list", "operations": [{"name": "write_l"}]}, "not available"),
    ({"monad": "output", "operations": [{"name": "write_l", "signature": {"args": [], "result": "Unit"}}]},
     "must have signature"),
    ({"monad": "list", "interpretation": "OutputExact"}, "does not fit"),
    ({"monad": "list", "interpretation": "Nope"}, "unknown interpretation"),
    ({"monad": "list", "operations": [{"name": "choose"}, {"name": "choose"}]}, "duplicate"),
    ({"monad": "list", "budgets": {"inclusion": {"max_len": "x"}}}, "bad budgets"),
])
def test_config_errors(raw, message):
    with pytest.raises(ConfigError, match=message):
        config_from_dict(raw)


def test_config_defaults():
    cfg = config_from_dict({"monad": "exception", "operations": [{"name": "raise_Boom"}]})
    assert cfg.interpretation is InterpKind.EXC_SETS
    assert cfg.impls["raise_Boom"].param == "Boom" and "Boom" in cfg.tag.exceptions


# ---- commands


def test_check(capsys):
    code, out, _ = cli(capsys, "check", PROGRAMS / "predfun_value.eff", "--config", CONFIGS / "exception.json")
    assert code == OK and out.strip() == "Nat -[eps | raise_PredZero]-> Nat ! eps"
    code, out, _ = cli(capsys, "check", PROGRAMS / "wfun_up_0.eff", "--config", CONFIGS / "output.json")
    assert code == OK and out.strip() == "Unit ! (write_l . write_l2)^w"


def test_check_type_error(capsys):
    code, _, err = cli(capsys, "check", PROGRAMS / "ill_typed.eff", "--config", CONFIGS / "list.json")
    assert code == TYPE_ERROR and "t-app" in err


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.eff"
    bad.write_text("do x <- ;")
    assert cli(capsys, "check", bad, "--config", CONFIGS / "list.json")[0] == INPUT_ERROR
    assert cli(capsys, "check", tmp_path / "missing.eff", "--config", CONFIGS / "list.json")[0] == INPUT_ERROR
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert cli(capsys, "check", PROGRAMS / "coin.eff", "--config", cfg)[0] == INPUT_ERROR
    code, _, err = cli(capsys, "run", PROGRAMS / "coin.eff", "--config", CONFIGS / "list.json", "--budget", 0)
    assert code == INPUT_ERROR and "budget" in err


def test_undecided_exit(capsys, tmp_path):
    cfg = json.loads((CONFIGS / "output.json").read_text())
    cfg["budgets"]["inclusion"] = {"max_stem": 0, "max_period": 1, "max_len": 1, "max_profiles": 1, "max_work": 1}
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(cfg))
    prog = tmp_path / "p.eff"
    prog.write_text("(rec f (x: Nat): Unit ! (write_l | write_l2)^w = write_l(x); write_l2(x); f x) 0")
    code, out, _ = cli(capsys, "check", prog, "--config", path, "--json")
    assert code == UNDECIDED_EXIT and json.loads(out)["status"] == "undecided"


def test_run(capsys):
    code, out, _ = cli(capsys, "run", PROGRAMS / "predfun_0.eff", "--config", CONFIGS / "exception.json")
    assert code == OK and out.startswith("exception PredZero")
    code, out, _ = cli(capsys, "run", PROGRAMS / "coin.eff", "--config", CONFIGS / "list.json")
    assert out.startswith("[0, 1]")
    code, out, _ = cli(capsys, "run", PROGRAMS / "chfun_up_0.eff", "--config", CONFIGS / "list.json", "--budget", 64)
    assert out.strip() == "diverged within 64"


def test_run_trace_and_json(capsys):
    code, out, _ = cli(capsys, "run", PROGRAMS / "predfun_1.eff", "--config", CONFIGS / "exception.json", "--trace")
    lines = out.splitlines()
    assert lines[0].startswith("0: ") and lines[-1].startswith("0    (")
    code, out, _ = cli(capsys, "run", PROGRAMS / "chfun_down_3.eff", "--config", CONFIGS / "distribution.json", "--json")
    rec = json.loads(out)
    assert rec["status"] == "converged" and rec["result"]["mass"] == "1"


def test_run_unsafe_reaches_wrong(capsys):
    code, out, _ = cli(capsys, "run", PROGRAMS / "ill_typed.eff", "--config", CONFIGS / "list.json", "--unsafe")
    assert code == OK and out.startswith("[wrong]")


def test_approx(capsys):
    code, out, _ = cli(capsys, "approx", PROGRAMS / "wfun_up_0.eff", "--config", CONFIGS / "output.json", "--steps", 6)
    assert code == OK
    assert out.splitlines()[-1] == "increasing: yes, converged: no"


def test_verify(capsys):
    code, out, _ = cli(capsys, "verify", PROGRAMS / "predfun_handled.eff", "--config", CONFIGS / "exception.json")
    assert code == OK and "fail" not in out.split("summary:")[0]
    code, out, _ = cli(capsys, "verify", PROGRAMS / "coin.eff", "--config", CONFIGS / "list.json",
                       "--random", 20, "--seed", 3, "--json")
    records = [json.loads(line) for line in out.splitlines()]
    assert code == OK and records[-1]["summary"]["fail"] == 0
    assert any(r.get("seed") == 3 for r in records)


def test_laws(capsys):
    code, out, _ = cli(capsys, "laws", "--config", CONFIGS / "exception.json", "--universe", 2)
    assert code == OK and "FAIL" not in out
    code, out, _ = cli(capsys, "laws", "--config", CONFIGS / "list.json", "--universe", 2, "--json")
    records = [json.loads(line) for line in out.splitlines()]
    ex01 = {r["condition"]: r["verdict"] for r in records if r.get("kind") == "NondetEx01"}
    assert ex01["direct image"] == "fail (expected)"
    assert ex01["multiplication"] == "FAIL"
    assert code == PROPERTY_FAILED
    assert cli(capsys, "laws", "--config", CONFIGS / "list.json", "--universe", 5)[0] == INPUT_ERROR
