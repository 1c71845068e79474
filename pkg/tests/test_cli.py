import json

import numpy as np
import pytest

from nugap.cli.documents import load_plant, parse_plant, plant_to_document
from nugap.config import DEFAULT_CONFIG
from nugap.errors import EXIT_INCONSISTENT, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, DocumentError, NoConvergence
from nugap.gen.plants import GenConfig, random_plant
from nugap.main import main
from tests.conftest import siso_doc, unit_points

DELAY = siso_doc([1.0], [0.0, 1.0], label="delay")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def real_part(c):
    return c[0] if isinstance(c, list) else c


def error_document(err):
    return json.loads(err[err.index("{\n") :])


def test_numetric_between_constants(capsys, write_doc):
    code, out, _ = run(capsys, "numetric", write_doc("a.json", siso_doc([1.0])), write_doc("b.json", siso_doc([2.0])))
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["operation"] == "numetric"
    assert doc["result"]["condition_met"] is True
    assert doc["result"]["value"] == pytest.approx(0.31622776601683794, abs=1e-9)
    assert [i["shape"] for i in doc["inputs"]] == [[1, 1], [1, 1]]
    assert doc["config"]["grid_size"] == 4096


def test_numetric_of_plant_with_itself(capsys, write_doc):
    path = write_doc("delay.json", DELAY)
    code, out, _ = run(capsys, "numetric", path, path)
    assert code == EXIT_OK
    assert json.loads(out)["result"]["value"] <= 1e-7


def test_numetric_failed_winding_condition(capsys, write_doc):
    code, out, _ = run(capsys, "numetric", write_doc("d.json", DELAY), write_doc("z.json", siso_doc([0.0])))
    assert code == EXIT_OK
    result = json.loads(out)["result"]
    assert result["value"] == 1.0
    assert result["condition_met"] is False
    assert result["winding"] == -1


def test_numetric_plot(capsys, write_doc, tmp_path):
    plot = tmp_path / "gap.csv"
    a, b = write_doc("a.json", siso_doc([1.0])), write_doc("b.json", siso_doc([2.0]))
    code, _, _ = run(capsys, "numetric", a, b, "--plot", str(plot), "--grid", "64")
    assert code == EXIT_OK
    lines = plot.read_text().splitlines()
    assert lines[0] == "theta,sigma_max,det_modulus,det_arg"
    assert len(lines) == 65
    assert float(lines[1].split(",")[1]) == pytest.approx(0.31622776601683794)


@pytest.mark.parametrize(
    "gain, stabilizes, margin",
    [(-2.0, True, 1 / np.sqrt(10)), (0.0, False, 0.0), (-1.0, False, 0.0)],
)
def test_margin(capsys, write_doc, gain, stabilizes, margin):
    code, out, _ = run(capsys, "margin", write_doc("p.json", DELAY), write_doc("c.json", siso_doc([gain])))
    assert code == EXIT_OK
    result = json.loads(out)["result"]
    assert result["stabilizes"] is stabilizes
    assert result["margin"] == pytest.approx(margin, abs=1e-9)


def test_margin_plot_header(capsys, write_doc, tmp_path):
    plot = tmp_path / "loop.csv"
    run(capsys, "margin", write_doc("p.json", DELAY), write_doc("c.json", siso_doc([-2.0])), "--plot", str(plot))
    assert plot.read_text().splitlines()[0] == "theta,sigma_max"


def test_factorize_delay(capsys, write_doc):
    code, out, _ = run(capsys, "factorize", write_doc("d.json", DELAY))
    assert code == EXIT_OK
    right = json.loads(out)["result"]["right"]
    N, D = right["N"], right["D"]
    assert real_part(N["num"][0][0][0]) / real_part(N["den"][0]) == pytest.approx(1 / np.sqrt(2))
    assert abs(real_part(D["num"][0][0][1]) / real_part(D["den"][0])) == pytest.approx(1 / np.sqrt(2))
    assert right["normalization_residual"] <= 1e-7


def test_factorize_row_plant(capsys, write_doc):
    row = {
        "schema_version": "1.0",
        "kind": "matrix",
        "entries": [[{"num": [1.0], "den": [-0.5, 1.0]}, {"num": [0.3]}]],
    }
    code, out, _ = run(capsys, "factorize", write_doc("row.json", row))
    assert code == EXIT_OK
    result = json.loads(out)["result"]
    assert result["bezout_residual"] is not None
    assert result["bezout_residual"] <= DEFAULT_CONFIG.tol_bezout_mat


def test_factorize_survives_certificate_failure(capsys, write_doc, monkeypatch):
    def stalled(*args, **kwargs):
        raise NoConvergence(1e-3, 4096)

    monkeypatch.setattr("nugap.cli.commands.bezout_certificate", stalled)
    code, out, err = run(capsys, "factorize", write_doc("d.json", DELAY))
    assert code == EXIT_OK
    assert json.loads(out)["result"]["bezout_residual"] is None
    assert "No Bezout certificate" in err


def test_winding_of_inner_zero(capsys, write_doc):
    code, out, _ = run(capsys, "winding", write_doc("s.json", siso_doc([-0.5, 1.0])), "--toeplitz", "--poisson", "0.99")
    assert code == EXIT_OK
    result = json.loads(out)["result"]
    assert result["winding"] == 1
    assert result["index"] == -1
    assert result["poisson"]["winding"] == 1


def test_winding_through_zero_on_circle(capsys, write_doc):
    code, _, err = run(capsys, "winding", write_doc("s.json", siso_doc([-1.0, 1.0])))
    assert code == EXIT_NUMERIC
    assert error_document(err)["error"] == "NotInvertible"


def test_invalid_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, out, _ = run(capsys, "factorize", str(path))
    assert code == EXIT_INPUT
    assert out == ""


def test_missing_numerator_pointer(capsys, write_doc):
    doc = {"schema_version": "1.0", "kind": "siso", "entries": {"den": [1.0]}}
    code, _, err = run(capsys, "factorize", write_doc("p.json", doc))
    assert code == EXIT_INPUT
    assert error_document(err)["pointer"] == "/entries/num"


def test_boundary_pole_is_an_input_error(capsys, write_doc):
    code, _, err = run(capsys, "factorize", write_doc("p.json", siso_doc([1.0], [-1.0, 1.0])))
    assert code == EXIT_INPUT
    assert error_document(err)["error"] == "BoundaryPole"


def test_shape_mismatch_is_an_input_error(capsys, write_doc):
    matrix = {
        "schema_version": "1.0",
        "kind": "matrix",
        "entries": [[{"num": [1.0]}], [{"num": [2.0]}]],
    }
    code, _, _ = run(capsys, "numetric", write_doc("a.json", DELAY), write_doc("b.json", matrix))
    assert code == EXIT_INPUT


def test_output_is_deterministic(capsys, write_doc):
    args = ("numetric", write_doc("a.json", DELAY), write_doc("b.json", siso_doc([0.5, 1.0], [0.25, 1.0])))
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


@pytest.mark.parametrize(
    "doc, pointer",
    [
        ({"schema_version": "2.0", "kind": "siso", "entries": {"num": [1.0]}}, "/schema_version"),
        ({"schema_version": "1.0", "kind": "row", "entries": {"num": [1.0]}}, "/kind"),
        ({"schema_version": "1.0", "kind": "siso", "entries": {"num": []}}, "/entries/num"),
        ({"schema_version": "1.0", "kind": "siso", "entries": {"num": [1.0, "x"]}}, "/entries/num/1"),
        ({"schema_version": "1.0", "kind": "siso", "entries": {"num": [1.0], "den": [0.0]}}, "/entries/den"),
        ({"schema_version": "1.0", "kind": "matrix", "entries": [[{"num": [1.0]}], []]}, "/entries"),
        ({"schema_version": "1.0", "kind": "matrix", "entries": [[{"num": [1.0]}, {"den": [1.0]}]]}, "/entries/0/1/num"),
    ],
)
def test_document_errors_carry_pointers(doc, pointer):
    with pytest.raises(DocumentError) as info:
        parse_plant(doc, DEFAULT_CONFIG)
    assert info.value.pointer == pointer


def test_complex_coefficients_are_pairs():
    doc = siso_doc([[1.0, 0.5]], [[-0.5, 0.0], 1.0])
    P = parse_plant(doc, DEFAULT_CONFIG)
    assert P.entry(0, 0).num.coeffs[0] == pytest.approx(1.0 + 0.5j)
    assert plant_to_document(P)["entries"]["num"] == [[1.0, 0.5]]


def test_documents_round_trip_random_plants(write_doc):
    for k in range(20):
        gen = GenConfig(seed=k, p=1 + k % 2, m=1 + (k // 2) % 2)
        P = random_plant(gen)
        Q = load_plant(write_doc(f"p{k}.json", plant_to_document(P)), DEFAULT_CONFIG)
        assert Q.shape == P.shape
        z = unit_points(16)
        np.testing.assert_allclose(Q.evaluate(z), P.evaluate(z), rtol=1e-9, atol=1e-9)


@pytest.mark.campaign
def test_small_report_run(capsys):
    code, out, err = run(capsys, "report", "--seed", "1", "--triples", "4", "--table")
    doc = json.loads(out)
    assert code == (EXIT_OK if doc["result"]["passed"] else EXIT_INCONSISTENT)
    names = [s["name"] for s in doc["result"]["suites"]]
    assert names[:3] == ["identity", "symmetry", "triangle"]
    assert "stabilization_routes" in names
    assert "suite" in err
