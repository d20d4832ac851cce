# -*- coding: utf-8 -*-
import json
from pathlib import Path

import pytest

import run_job
from errors import SchemaError
from jobs import JobExecutor, load_job, parse_job, render_text, run_job as execute

JOBS = Path(__file__).parent / "jobs"


def _job(params, kind="df", ideals=None, variables=("x0", "x1")):
    return json.dumps({
        "ring": {"variables": list(variables)},
        "ideals": ideals if ideals is not None else {"V": [], "Z": ["x1"]},
        "job": {"kind": kind, "params": params},
    })


def _stable(report):
    data = report.as_dict()
    data.pop("timing_ms")
    return json.dumps(data, sort_keys=True, ensure_ascii=False)


# ========= 解析 =========

def test_parse_defaults():
    doc = parse_job(_job({"c": "1/2"}))
    assert doc.kind == "df"
    assert doc.params["variety"] == "V"
    assert doc.params["subscheme"] == "Z"
    assert doc.params["d"] == 1
    assert doc.ring.block_names == ("x",)
    assert doc.ideal("V").is_zero


def test_unreduced_rational_gives_notice():
    doc = parse_job(_job({"c": "2/4"}))
    assert doc.params["c"].value.denominator == 2
    assert doc.notices == ["/job/params/c: 2/4 已约分为 1/2"]


@pytest.mark.parametrize("params, pointer", [
    ({"c": 0.5}, "/job/params/c"),
    ({"c": "-1/2"}, "/job/params/c"),
    ({}, "/job/params/c"),
    ({"c": "1/2", "foo": 1}, "/job/params/foo"),
    ({"c": "1/2", "variety": "W"}, "/job/params/variety"),
    ({"c": "1/2", "d": 0}, "/job/params/d"),
    ({"c": "1/2", "d": True}, "/job/params/d"),
    ({"c": "1/2", "proxy_grid": ["1/4", 1.5]}, "/job/params/proxy_grid/1"),
])
def test_param_errors(params, pointer):
    with pytest.raises(SchemaError) as info:
        parse_job(_job(params))
    assert info.value.pointer == pointer
    assert pointer in str(info.value)


def test_document_errors():
    with pytest.raises(SchemaError) as info:
        parse_job(_job({"c": "1/2"}, ideals={"V": [], "Z": ["x1 +"]}))
    assert info.value.pointer == "/ideals/Z/0"

    with pytest.raises(SchemaError) as info:
        parse_job(_job({}, kind="integrate"))
    assert info.value.pointer == "/job/kind"

    with pytest.raises(SchemaError) as info:
        parse_job("{\"ring\": ")
    assert info.value.pointer == "/"

    with pytest.raises(SchemaError) as info:
        parse_job(json.dumps({"ring": {"variables": ["x", "x"]}, "ideals": {}, "job": {"kind": "hilbert"}}))
    assert info.value.pointer == "/ring"


@pytest.mark.parametrize("blocks, pointer", [
    ({"x": ["x0", 1]}, "/ring/blocks/x/1"),
    ({"x": "x0"}, "/ring/blocks/x"),
    ({"_x": ["x0", "x1"]}, "/ring/blocks/_x"),
])
def test_block_errors(blocks, pointer):
    with pytest.raises(SchemaError) as info:
        parse_job(json.dumps({
            "ring": {"variables": ["x0", "x1"], "blocks": blocks},
            "ideals": {},
            "job": {"kind": "hilbert", "params": {}},
        }))
    assert info.value.pointer == pointer


def test_missing_default_ideal():
    with pytest.raises(SchemaError) as info:
        parse_job(_job({"c": "1/2"}, ideals={"V": []}))
    assert info.value.pointer == "/job/params/subscheme"


# ========= 执行 =========

def test_df_job():
    report = execute(load_job(str(JOBS / "df_p1_point.json")))
    r = report.results
    assert (r["df"], r["w0"], r["w1"]) == ("1/8", "-1/8", "-1/4")
    assert (r["b0"], r["b1"], r["cm"]) == ("-1/8", "3/4", "1/8")
    assert r["mu_c"] == "2/3"
    assert r["seshadri_proxy"] == "3/4"
    assert r["formula"] == "a_1 w_0 - a_0 w_1"
    assert report.verdict["route_equality"] is True
    assert report.passed


def test_power_compat_job_fails_with_certificate():
    report = execute(load_job(str(JOBS / "power_compat_xy.json")))
    assert report.verdict["status"] == "fail"
    assert report.results["failure"] == ["2", "1"]
    assert report.results["certificate"] == "x*y"
    assert report.certificates["power_compat"]["direction"] == "lhs-not-in-rhs"
    assert not report.passed


def test_hilbert_job():
    report = execute(load_job(str(JOBS / "hilbert_fat_point.json")))
    assert report.results["polynomial"] == "3"
    assert report.results["degree"] == "0"
    assert report.certificates["hilbert"]["stride"] == "1"


def test_slope_and_init_jobs():
    slope = execute(load_job(str(JOBS / "slope_plane_cubic.json")))
    assert slope.results["mu"] == "0"
    assert slope.results["smoothness"] == "smooth"

    init = execute(load_job(str(JOBS / "init_u_x2.json")))
    assert sorted(init.results["generators"]) == ["s", "x^2"]
    assert init.results["local_equation"] == "u"


def test_tilde_job():
    report = execute(load_job(str(JOBS / "tilde_fat_line.json")))
    assert report.results["stabilization_index"] == "2"
    assert report.results["components"][1] == ["x^2"]
    assert report.verdict["family_invariants"] is True
    assert report.verdict["convolution_power"] is True
    # (x, y) 不是主理想
    assert "flatness" not in report.verdict
    assert any("平坦性" in n for n in report.notices)


def test_tilde_job_with_principal_center():
    doc = parse_job(_job({}, kind="tilde", variables=("x", "u"), ideals={"I": ["x*u", "u^2"], "X0": ["u"]}))
    report = execute(doc)
    assert report.results["stabilization_index"] == "2"
    assert report.verdict["flatness"] is True


def test_lemma41_job():
    report = execute(load_job(str(JOBS / "lemma41_random.json")))
    assert report.verdict["status"] == "pass"
    assert report.results["trials"] == "6"
    assert report.results["hypotheses_verified"] is False


def test_scan_job():
    report = execute(load_job(str(JOBS / "scan_line_point.json")))
    assert report.verdict["overall"] == "no violation found over the supplied scan"
    assert report.results["proxies"] == {"p": "3/4", "q": "3/4"}
    verdicts = [row["verdict"] for row in report.results["rows"] if row["subscheme"] == "p"]
    assert verdicts == ["ok", "ok", "ok", "outside-proxy"]


def test_report_is_deterministic():
    doc = load_job(str(JOBS / "df_p1_point.json"))
    first, second = JobExecutor(doc).run(), JobExecutor(doc).run()
    assert _stable(first) == _stable(second)


def test_render_text():
    report = execute(load_job(str(JOBS / "power_compat_xy.json")))
    text = render_text(report)
    assert text.startswith("=== power-compat ===")
    assert "状态: fail" in text
    assert "certificate: x*y" in text


# ========= 命令行 =========

def test_main_exit_codes(tmp_path, capsys):
    assert run_job.main(["--job", str(JOBS / "hilbert_fat_point.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["polynomial"] == "3"

    assert run_job.main(["--job", str(JOBS / "power_compat_xy.json"), "--text"]) == 4
    assert "x*y" in capsys.readouterr().out

    bad = tmp_path / "bad.json"
    bad.write_text(_job({"c": 0.5}), encoding="utf-8")
    assert run_job.main(["--job", str(bad)]) == 2
    assert "/job/params/c" in capsys.readouterr().err

    assert run_job.main(["--job", str(tmp_path / "missing.json")]) == 2


def test_main_budget_flag(tmp_path, capsys):
    job = tmp_path / "budget.json"
    job.write_text(json.dumps({
        "ring": {"variables": ["x", "y", "z"]},
        "ideals": {"I": ["x^2*y - z^3", "x*y^2 - x*z^2", "x*y*z - y^3"]},
        "job": {"kind": "hilbert", "params": {"saturate": False}},
    }), encoding="utf-8")
    assert run_job.main(["--job", str(job), "--budget-pairs", "1"]) == 3
    assert "错误" in capsys.readouterr().err


@pytest.mark.slow
def test_family_jobs():
    cm = execute(load_job(str(JOBS / "cm_product_line.json")))
    assert (cm.results["cm"], cm.results["b0"], cm.results["b1"]) == ("1/8", "-1/8", "3/4")
    assert set(cm.certificates["fiber_polynomials"].values()) == {"k + 1"}

    prop = execute(load_job(str(JOBS / "prop33_product_line.json")))
    assert prop.verdict["status"] == "pass"
    assert prop.results["difference"] == "0"
    assert prop.verdict["coefficient_identity"] is True
    assert prop.results["fiber_smoothness"] == "smooth"
    assert (prop.results["mu"], prop.results["mu_c"]) == ("1", "2/3")
    assert prop.verdict["chain"] is True


@pytest.mark.slow
@pytest.mark.parametrize("path", sorted(JOBS.glob("*.json")), ids=lambda p: p.stem)
def test_every_job_is_deterministic(path):
    doc = load_job(str(path))
    assert _stable(JobExecutor(doc).run()) == _stable(JobExecutor(doc).run())
