import json
from fractions import Fraction

import pytest

from twistdiff.cli import main
from twistdiff.config import Config, ConfigError, load_config
from twistdiff.padic import LogNorm
from twistdiff.serialize import (
    Context,
    DocumentError,
    dump_operator,
    dump_series,
    load_operator,
    load_series,
    log_from_text,
    log_to_text,
    to_json,
)
from twistdiff.operators import TwistedOperator

P = 5


@pytest.fixture
def ctx(F):
    return Context(F)


def test_log_text():
    assert log_to_text(LogNorm.zero()) is None
    assert log_to_text(LogNorm(Fraction(-7, 3))) == "-7/3"
    assert log_from_text("inf") == LogNorm.infinite()
    with pytest.raises(DocumentError):
        log_from_text(-1.5)


def test_series_round_trip(R, F, ctx):
    f = R.element({-3: F(Fraction(1, 3)), 2: 5, 40: F(P) ** 9}, LogNorm(Fraction(-7, 3)))
    doc = dump_series(f)
    g = load_series(json.loads(to_json(doc)), ctx)
    assert to_json(dump_series(g)) == to_json(doc)
    assert g.same_coeffs(f) and g.tail == f.tail


def test_series_rejects_bad_documents(ctx):
    base = {"params": {"r_log": "0", "r1_log": "-1"}, "coeffs": {"0": "1"}, "tail_log": None}
    for bad in (
        {**base, "coeffs": {"41": "1"}},
        {**base, "coeffs": {"a": "1"}},
        {**base, "coeffs": {"0": 1.5}},
        {"coeffs": {}},
        {**base, "tail_log": 0.5},
    ):
        with pytest.raises(DocumentError):
            load_series(bad, ctx)


def test_operator_round_trip(R, sigma, eta, ctx):
    phi = TwistedOperator(sigma, eta, [R.x(-2), R.const(P)], LogNorm(-9))
    doc = dump_operator(phi)
    back = load_operator(json.loads(to_json(doc)), ctx)
    assert to_json(dump_operator(back)) == to_json(doc)
    doc["eta_log"] = "-3"
    with pytest.raises(DocumentError):
        load_operator(doc, ctx)


def test_config_defaults_and_validation(tmp_path):
    cfg = Config()
    assert (cfg.p, cfg.N, cfg.K, cfg.window) == (5, 40, 30, (-40, 40))
    assert cfg.eta == LogNorm(-2)
    with pytest.raises(ConfigError):
        Config(p=9)
    with pytest.raises(ConfigError):
        Config(N=4)
    with pytest.raises(ConfigError):
        Config(eta_log=-1.5)
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"p": 7, "eta_log": "-3/2"}))
    assert load_config(str(path)).eta == LogNorm(Fraction(-3, 2))
    path.write_text(json.dumps({"prime": 7}))
    with pytest.raises(ConfigError):
        load_config(str(path))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_qbinom(capsys):
    code, out, _ = run(capsys, "qbinom", "4", "2", "--q", "1")
    assert code == 0 and "value: 6" in out
    code, out, _ = run(capsys, "--format", "json", "qbinom", "0", "3")
    assert code == 0 and json.loads(out)["report"]["value"] == "0"
    code, out, _ = run(capsys, "qbinom", "4", "2", "--format", "json")
    assert json.loads(out)["report"]["value"] == "475931"


def test_cli_radius(capsys):
    code, out, _ = run(capsys, "--format", "json", "radius", "0:3")
    assert code == 0 and json.loads(out)["report"]["radius_log"] == "+infinity"
    code, out, _ = run(capsys, "--format", "json", "radius", "-1:1", "--q", "1", "--h", "0", "--K", "8")
    table = json.loads(out)["report"]["table"]
    # ‖∂^[k] x^-1‖ η^k = r1^(-1-k) η^k = p^(1-k)
    assert [row["norm_eta_log"] for row in table] == [str(1 - k) for k in range(9)]
    code, out, _ = run(capsys, "--format", "json", "radius", "0:1,2:3,5:1", "--q", "1", "--h", "0")
    rep = json.loads(out)["report"]
    assert rep["radius_log"] == "+infinity" and rep["table"][6]["norm_eta_log"] is None


def test_cli_deform_round_trip(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code, _, _ = run(capsys, "--output", str(a), "deform", "d", "--q", "26", "--h", "25", "--target-q", "126", "--target-h", "50")
    assert code == 0
    code, out, _ = run(capsys, "--format", "json", "--output", str(b), "deform", str(a), "--target-q", "26", "--target-h", "25")
    rep = json.loads(out)["report"]
    assert code == 0 and rep["isometric"]
    coeffs = json.loads(b.read_text())["coeffs"]
    assert coeffs[1]["coeffs"] == {"0": "1"}
    # the rest vanishes at working precision
    assert all(v.startswith("O(p^") for i, c in enumerate(coeffs) if i != 1 for v in c["coeffs"].values())


def test_cli_deform_identity_operator(capsys, tmp_path):
    a = tmp_path / "one.json"
    code, _, _ = run(capsys, "--output", str(a), "compose", "d^[0]", "d^[0]")
    code, out, _ = run(capsys, "--format", "json", "deform", str(a), "--target-q", "1", "--target-h", "0")
    doc = json.loads(out)["document"]
    assert code == 0 and [c["coeffs"] for c in doc["coeffs"]] == [{"0": "1"}]


def test_cli_apply_and_compose(capsys):
    code, out, _ = run(capsys, "--format", "json", "apply", "d", "2:1", "--q", "26", "--h", "0")
    assert code == 0 and json.loads(out)["document"]["coeffs"] == {"1": "27"}
    code, out, _ = run(capsys, "--format", "json", "compose", "d", "d", "--q", "26", "--h", "0")
    doc = json.loads(out)["document"]
    assert doc["coeffs"][2]["coeffs"] == {"0": "27"}


def test_cli_confluence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"eta_log": "-11/10", "eta_prime_log": "-6/5"}))
    code, out, _ = run(capsys, "--config", str(cfg), "--format", "json", "confluence", "-1:2")
    res = json.loads(out)
    assert code == 0 and res["report"]["identity_check"] and res["report"]["semilinearity_check"]
    # (q + h/x)^2 = q^2 + 2 q h x^-1 + h^2 x^-2 with q = 26, h = 25
    coeffs = res["document"]["matrix"][0][0]["coeffs"]
    assert set(coeffs) == {"0", "-1", "-2"}
    code, _, err = run(capsys, "--config", str(cfg), "confluence", "-3:1")
    assert code == 1 and "NotConvergentAtOrderK" in err


def test_cli_usage_errors(capsys):
    assert run(capsys, "verify", "nope")[0] == 2
    assert run(capsys, "radius", "x:1")[0] == 2
    assert run(capsys, "apply", "d", "missing.json")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_verify_is_deterministic(capsys):
    first = run(capsys, "--format", "json", "verify", "pascal")
    second = run(capsys, "--format", "json", "verify", "pascal")
    assert first == second and first[0] == 0
    assert json.loads(first[1])["report"]["passed"] == 1
