"""Chart documents, emitters, config parsing, and the CLI exit contract."""

import json
import os

import pytest

from extchart import chartio
from extchart.chartio import (
    ChartDoc, ChartError, chart_from_dims, emit_json, emit_svg, emit_text,
    read_chart, read_config,
)

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "extchart", "data",
                   "fixtures")


def fixture(name):
    return os.path.join(FIX, name)


def demo_doc():
    dims = {(0, 0): 1, (1, 1): 1, (2, 2): 1, (1, 4): 1, (3, 5): 1,
            (4, 12): 2}
    doc = chart_from_dims({"prime": 2, "module": "demo", "page": 2}, dims)
    # dots sort to [(0,0,0),(0,1,0),(0,2,0),(2,3,0),(3,1,0),(8,4,0),(8,4,1)]
    doc.edges.append({"from": 0, "to": 1, "kind": "h0"})
    doc.edges.append({"from": 1, "to": 2, "kind": "h0"})
    doc.edges.append({"from": 4, "to": 3, "kind": "differential", "page": 2})
    doc._validate()
    return doc


# ---------------------------------------------------------------------------
# documents

def test_chart_from_dims_order_and_dims():
    doc = demo_doc()
    assert doc.dots == sorted(doc.dots)
    assert doc.dims() == {(0, 0): 1, (0, 1): 1, (0, 2): 1, (2, 3): 1,
                          (3, 1): 1, (8, 4): 2}
    assert doc.column_counts() == {0: 3, 2: 1, 3: 1, 8: 2}
    assert doc.window() == (0, 8, 0, 4)
    assert ChartDoc({}, []).window() is None


def test_validation_rejects_bad_documents():
    meta = {"module": "bad"}
    with pytest.raises(ChartError):
        ChartDoc(meta, [(0, 0, 0), (0, 0, 0)])  # duplicate dot
    dots = [(0, 0, 0), (0, 1, 0), (1, 1, 0), (0, 3, 0)]
    good = {"from": 0, "to": 1, "kind": "h0"}
    ChartDoc(meta, dots, [good])
    for bad in [
        {"from": 0, "to": 9, "kind": "h0"},            # endpoint range
        {"from": 0, "to": 1, "kind": "bockstein"},     # unknown kind
        {"from": 0, "to": 2, "kind": "h0"},            # h0 must be vertical
        {"from": 0, "to": 3, "kind": "h1"},            # h1 must be slope one
        {"from": 2, "to": 3, "kind": "differential"},  # page missing
        {"from": 2, "to": 1, "kind": "differential", "page": 2},
    ]:
        with pytest.raises(ChartError):
            ChartDoc(meta, dots, [good, bad])
    # a legal d2: one stem left, two filtrations up
    ChartDoc(meta, dots, [{"from": 2, "to": 3, "kind": "differential",
                           "page": 2}])


def test_json_round_trip_is_identity():
    doc = demo_doc()
    text = emit_json(doc)
    assert text.endswith("\n")
    assert read_chart(text) == doc
    assert emit_json(read_chart(text)) == text
    # canonical: repeated emission is byte-identical, keys sorted
    assert emit_json(doc) == text
    obj = json.loads(text)
    assert list(obj) == sorted(obj)
    with pytest.raises(ChartError):
        read_chart("{\"dots\": []}")
    with pytest.raises(ChartError):
        read_chart("not json")


# ---------------------------------------------------------------------------
# emitters

def test_text_grid_layout():
    doc = demo_doc()
    out = emit_text(doc)
    lines = out.splitlines()
    assert lines[0] == "# module=demo page=2 prime=2"
    assert lines[1].startswith("4|")
    assert lines[-2].startswith(" +")
    # the two dots at (stem 8, s 4) render as a count of 2
    assert "2" in lines[1]
    # stem-0 tower column: rows s=0..2 all show 1 right after the margin
    for s in (0, 1, 2):
        assert lines[1 + (4 - s)].startswith(f"{s}| 1")
    # tick marks line up with the cells (stem 0 under the first cell)
    row_col = lines[5].index("1")
    assert lines[-1].index("0") == row_col
    assert emit_text(ChartDoc({"module": "e"}, [])) == "# module=e\n(empty)\n"
    with pytest.raises(ChartError):
        emit_text(doc, config={"text_width": 10})


def test_svg_dot_counts_and_determinism():
    doc = demo_doc()
    svg = emit_svg(doc)
    assert svg == emit_svg(doc)
    assert svg.count("<circle ") == len(doc.dots) == 7
    assert svg.count('class="differential"') == 1
    assert 'marker-end="url(#arrow)"' in svg
    assert svg.count('class="h0"') == 2
    # empty documents still render axes
    empty = emit_svg(ChartDoc({"module": "e"}, []))
    assert "<svg " in empty and "<circle" not in empty
    # style knobs change geometry but not dot count
    big = emit_svg(doc, style={"unit": 32, "radius": 5})
    assert big != svg and big.count("<circle ") == 7


def test_read_config(tmp_path):
    cfg = tmp_path / "chart.cfg"
    cfg.write_text(
        "# render style\n"
        "unit = 20\n"
        "radius = 2.5\n"
        "text_width = 96   # wide terminal\n"
        "products = h0, h1\n"
        "title = ext chart\n")
    got = read_config(str(cfg))
    assert got == {"unit": 20, "radius": 2.5, "text_width": 96,
                   "products": ["h0", "h1"], "title": "ext chart"}
    cfg.write_text("unit 20\n")
    with pytest.raises(ChartError):
        read_config(str(cfg))


# ---------------------------------------------------------------------------
# CLI

def test_cli_ext_and_resolve_json(tmp_path, capsys):
    mod = tmp_path / "ground.mod"
    mod.write_text("p 2\nalgebra A(1)\ngen x 0\nrel Sq1 x\nrel Sq2 x\n")
    out = tmp_path / "table.json"
    rc = chartio.main(["ext", "--algebra", "A(1)", "--module", str(mod),
                       "--smax", "3", "--tmax", "8",
                       "--json", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    dims = {(s, t): d for s, t, d in doc["dims"]}
    assert dims[(0, 0)] == 1 and dims[(1, 1)] == 1 and dims[(1, 2)] == 1
    assert dims[(2, 2)] == 1 and dims[(3, 3)] == 1 and (2, 3) not in dims
    assert "0 0 1" in capsys.readouterr().out

    rc = chartio.main(["resolve", "--algebra", "A(1)", "--module", str(mod),
                       "--smax", "3", "--tmax", "8", "--json", str(out)])
    assert rc == 0
    gens = [tuple(g) for g in json.loads(out.read_text())["generators"]]
    assert gens == sorted(gens)
    assert (0, 0) in gens and (1, 1) in gens and (1, 2) in gens
    assert "s=1: 1 2" in capsys.readouterr().out
    # written files are canonical: a second run is byte-identical
    first = out.read_bytes()
    chartio.main(["resolve", "--algebra", "A(1)", "--module", str(mod),
                  "--smax", "3", "--tmax", "8", "--json", str(out)])
    capsys.readouterr()
    assert out.read_bytes() == first


def test_cli_algebra_mismatch_is_usage_error(capsys):
    rc = chartio.main(["ext", "--algebra", "A(1)",
                       "--module", fixture("f2.mod"),
                       "--smax", "2", "--tmax", "6"])
    assert rc == 2
    assert "A(2)" in capsys.readouterr().err


def test_cli_delta_and_d2compose(capsys):
    rc = chartio.main(["delta", "--ses", fixture("ext_y.ses"),
                       "--smax", "4", "--tmax", "12"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "s t rank kernel cokernel"
    assert "0 4 1 0 0" in out          # the connecting map starts at t=4
    rc = chartio.main(["d2compose", "--inner", fixture("ext_z.ses"),
                       "--outer", fixture("ext_y.ses"),
                       "--smax", "4", "--tmax", "14"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "0 8 1 0" in out            # composite first hits at t=8


def test_cli_jay_check_and_svg(tmp_path, capsys):
    svg = tmp_path / "page.svg"
    rc = chartio.main(["jay", "--prime", "3", "--variant", "jpmodp",
                       "--nmax", "12", "--check", "--svg", str(svg)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "final_page=3" in out
    assert "0 1 1 yes" in out and "3 1 1 yes" in out and "5 0 0 yes" in out
    assert svg.read_text().count("<circle ") > 0
    # window request beyond the scenario cap is a usage error
    rc = chartio.main(["jay", "--prime", "3", "--variant", "jpmodp",
                       "--nmax", "1000"])
    assert rc == 2
    capsys.readouterr()


def test_cli_jay_reports_failure(monkeypatch, capsys):
    class FailingReport:
        ok = False
        failing_stems = [7]
        entries = [(7, 32, 16, False)]

    monkeypatch.setattr(chartio, "build_scenario", lambda *a, **k: None)
    monkeypatch.setattr(chartio, "d2_page",
                        lambda sc: type("E2", (), {"turn": lambda self: None})())
    monkeypatch.setattr(chartio, "later_pages",
                        lambda sc, e3: [type("P", (), {"r": 3})()])
    monkeypatch.setattr(chartio, "abutment_check",
                        lambda sc, pages, n_max: FailingReport())
    rc = chartio.main(["jay", "--prime", "2", "--variant", "j2",
                       "--nmax", "7", "--check"])
    assert rc == 1
    err = capsys.readouterr().err
    assert "7" in err


def test_cli_oracle_check(monkeypatch, capsys):
    args = ["oracle-check", "--algebra", "A(2)",
            "--module", fixture("k_prime.mod"), "--smax", "3", "--tmax", "10"]
    assert chartio.main(args) == 0
    assert "ok:" in capsys.readouterr().out
    # a disagreement anywhere must exit 1 and name the bidegree
    real = chartio.bar_ext_dims

    def skewed(profile, module, s_max, t_max):
        table = dict(real(profile, module, s_max, t_max))
        table[(1, 5)] = table.get((1, 5), 0) + 1
        return table

    monkeypatch.setattr(chartio, "bar_ext_dims", skewed)
    assert chartio.main(args) == 1
    assert "(1,5)" in capsys.readouterr().err


def test_cli_chart_rendering(tmp_path, capsys):
    doc = demo_doc()
    src = tmp_path / "doc.json"
    src.write_text(emit_json(doc))
    assert chartio.main(["chart", "--in", str(src), "--text"]) == 0
    assert "# module=demo" in capsys.readouterr().out
    svg = tmp_path / "doc.svg"
    assert chartio.main(["chart", "--in", str(src),
                         "--svg", str(svg)]) == 0
    assert svg.read_text().count("<circle ") == 7
    cfg = tmp_path / "narrow.cfg"
    cfg.write_text("text_width = 10\n")
    rc = chartio.main(["chart", "--in", str(src), "--text",
                       "--config", str(cfg)])
    assert rc == 2
    assert "text_width" in capsys.readouterr().err


def test_cli_usage_errors(tmp_path, capsys):
    assert chartio.main([]) == 2
    assert chartio.main(["nosuch"]) == 2
    assert chartio.main(["jay", "--prime", "5", "--variant", "j2",
                         "--nmax", "4"]) == 2
    assert chartio.main(["jay", "--prime", "2", "--variant", "j2"]) == 2
    assert chartio.main(["chart", "--in", str(tmp_path / "doc.json")]) == 2
    assert chartio.main(["chart", "--in", str(tmp_path / "missing.json"),
                         "--text"]) == 2
    bad = tmp_path / "bad.mod"
    bad.write_text("p 2\nalgebra A(1)\ngen x 0\nbogus line\n")
    assert chartio.main(["ext", "--algebra", "A(1)", "--module", str(bad),
                         "--smax", "2", "--tmax", "4"]) == 2
    capsys.readouterr()
