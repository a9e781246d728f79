import json
from importlib import resources

import jsonschema
import pytest

from polysemigroup.cli import main

SY_FILE = "cube: monomial 1 3\nqsq: monomial 1/4 2\n"
PAIR_FILE = "monomial 1 2\nmonomial 1/2 2\n"
ESCAPING_FILE = "coeffs = [5, 0, 1]\n"
JBNQ_FILE = "g1: iterate 2 coeffs = [-1, 0, 1]\ng2: iterate 2 monomial 1/4 2\n"


def schema(name):
    with resources.files("polysemigroup.schemas").joinpath(name).open() as fh:
        return json.load(fh)


@pytest.fixture
def sy_path(tmp_path):
    p = tmp_path / "sy.gens"
    p.write_text(SY_FILE)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_check_sy(sy_path, capsys, tmp_path):
    out_json = tmp_path / "report.json"
    code, _ = run(capsys, "check", sy_path, "--json", str(out_json))
    assert code == 0
    report = json.loads(out_json.read_text())
    jsonschema.validate(report, schema("check_report.schema.json"))
    assert report["pcb"]["verdict"] == "bounded"
    assert report["connectivity"]["verdict"] == "inconclusive"
    assert report["m_set"]["m_components_by_depth"][:3] == [2, 4, 8]


def test_check_connected_pair(tmp_path, capsys):
    p = tmp_path / "pair.gens"
    p.write_text(PAIR_FILE)
    code, out = run(capsys, "check", str(p))
    assert code == 0
    report = json.loads(out)
    assert report["connectivity"] == {"rule": "degree-two", "verdict": "connected"}


def test_check_escaping_exit_2(tmp_path, capsys):
    p = tmp_path / "esc.gens"
    p.write_text(ESCAPING_FILE)
    code, out = run(capsys, "check", str(p))
    assert code == 2
    report = json.loads(out)
    jsonschema.validate(report, schema("check_report.schema.json"))
    assert report["pcb"]["verdict"] == "escaping"


def test_check_parse_error_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.gens"
    p.write_text("wibble 3 4\n")
    with pytest.raises(SystemExit) as err:
        main(["check", str(p)])
    assert err.value.code == 1


def test_render_deterministic_bytes(sy_path, capsys, tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        code, _ = run(capsys, "render", sy_path, "--mode", "cloud", "--res", "128",
                      "--seed", "7", "--out", str(out))
        assert code == 0
    assert (out1 / "cloud.pgm").read_bytes() == (out2 / "cloud.pgm").read_bytes()
    assert (out1 / "cloud.csv").read_bytes() == (out2 / "cloud.csv").read_bytes()


def test_render_filled_and_analyze_components(sy_path, capsys, tmp_path):
    code, _ = run(capsys, "render", sy_path, "--mode", "filled", "--depth", "10",
                  "--res", "128", "--out", str(tmp_path), "--boundary")
    assert code == 0
    pgm = tmp_path / "filled.pgm"
    assert pgm.exists()
    code, out = run(capsys, "analyze", str(pgm), "--what", "components")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("analyze_report.schema.json"))
    assert report["n_components"] >= 1


def test_render_fiber_modes(sy_path, capsys, tmp_path):
    code, _ = run(capsys, "render", sy_path, "--mode", "fiber", "--fiber", "const:0",
                  "--depth", "20", "--res", "128", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "fiber.pgm").exists()


def test_analyze_order(sy_path, capsys, tmp_path):
    code, _ = run(capsys, "render", sy_path, "--mode", "cloud", "--res", "256",
                  "--out", str(tmp_path))
    assert code == 0
    code, out = run(capsys, "analyze", str(tmp_path / "cloud.pgm"), "--what", "order")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("analyze_report.schema.json"))


def test_analyze_missing_artifact(capsys):
    code = main(["analyze", "/nonexistent.pgm"])
    assert code == 1


def test_certify_jbnq_and_replay(tmp_path, capsys):
    p = tmp_path / "jbnq.gens"
    p.write_text(JBNQ_FILE)
    cert_path = tmp_path / "cert.json"
    code, _ = run(capsys, "certify", str(p), "--region", "annulus:0,0,0.4,4",
                  "--rout", "16", "--max-depth", "10", "--out", str(cert_path))
    assert code == 0
    blob = json.loads(cert_path.read_text())
    jsonschema.validate(blob, schema("certificate.schema.json"))
    assert blob["verdict"] == "certified"
    code, out = run(capsys, "certify", "--replay", str(cert_path))
    assert code == 0
    assert json.loads(out)["replay_matches"] is True


def test_certify_connected_pair_exit_3(tmp_path, capsys):
    p = tmp_path / "pair.gens"
    p.write_text(PAIR_FILE)
    code, _ = run(capsys, "certify", str(p), "--region", "annulus:0,0,0.9,2.5",
                  "--rout", "16", "--max-depth", "6")
    assert code == 3


def test_certify_malformed_region(tmp_path, capsys):
    p = tmp_path / "pair.gens"
    p.write_text(PAIR_FILE)
    with pytest.raises(SystemExit) as err:
        main(["certify", str(p), "--region", "annulus:1,2"])
    assert err.value.code == 1


def test_certify_suggest(sy_path, capsys):
    code, out = run(capsys, "certify", sy_path, "--suggest")
    assert code == 0
    suggestion = json.loads(out)["suggestion"]
    assert suggestion["kind"] == "annulus"


def test_examples_list_and_emit(capsys, tmp_path):
    code, out = run(capsys, "examples", "list")
    assert code == 0
    names = out.split()
    assert "cantor_circles" in names and "basilica_monomial_pair" in names
    for name in names:
        out_file = tmp_path / f"{name}.gens"
        code, _ = run(capsys, "examples", "emit", name, "--out", str(out_file))
        assert code == 0
        from polysemigroup.gsfile import load_generator_file

        gs = load_generator_file(str(out_file))
        assert len(gs) >= 1


def test_examples_emit_unknown(capsys):
    code = main(["examples", "emit", "nope"])
    assert code == 1
