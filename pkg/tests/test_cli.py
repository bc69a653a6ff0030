"""Command-line interface and input-schema handling."""

import csv
import json

import pytest

from abelcycles.abel import FactoredAbel
from abelcycles.cli import main
from abelcycles.gallery import (
    example1_factored,
    example1_input,
    example2_input,
)
from abelcycles.serialize import SchemaError, detect_schema, dumps, parse_input
from abelcycles.trig import TrigPoly, TrigRational


@pytest.fixture
def gallery1(tmp_path):
    path = tmp_path / "gallery1.json"
    path.write_text(dumps(example1_input()))
    return str(path)


@pytest.fixture
def gallery2(tmp_path):
    path = tmp_path / "gallery2.json"
    path.write_text(dumps(example2_input()))
    return str(path)


def constants_factored_json() -> dict:
    f = FactoredAbel.from_parts(
        TrigPoly.constant(1), TrigRational.constant(2), TrigRational.constant(1)
    )
    return f.to_json()


class TestSchemas:
    def test_detects_all_four(self):
        assert detect_schema(example1_input()) == "planar"
        assert detect_schema(example2_input()) == "homogeneous"
        assert detect_schema(constants_factored_json()) == "factored"
        abel = {"C1": [], "C2": [], "C3": []}
        assert detect_schema(abel) == "abel"

    def test_rejects_unknown_keys(self):
        with pytest.raises(SchemaError):
            detect_schema({"foo": 1})
        with pytest.raises(SchemaError):
            detect_schema({})

    def test_round_trips_factored(self):
        parsed = parse_input(constants_factored_json())
        assert parsed.kind == "factored"
        assert parsed.model.to_json() == constants_factored_json()

    def test_planar_carries_the_a1_candidate(self):
        parsed = parse_input(example1_input())
        assert parsed.kind == "planar"
        assert parsed.a1_candidate == TrigPoly.from_terms([(3, 3, 1)])

    def test_malformed_terms_raise(self):
        with pytest.raises(SchemaError):
            parse_input({"a1": "not-a-term-list", "a2": [], "b2": []})


class TestCheck:
    def test_gallery1_bundle_and_exit(self, gallery1, capsys):
        code = main(["check", "--input", gallery1])
        assert code == 0
        bundle = json.loads(capsys.readouterr().out)
        by_id = {v["criterion"]: v for v in bundle["verdicts"]}
        assert by_id["at_most_one"]["outcome"] == "Holds"
        assert by_id["at_most_one"]["bound"] == "AtMostOne"
        assert by_id["at_most_one"]["eta"] == "-1/1"
        assert by_id["normalized_bound"]["outcome"] == "Fails"

    def test_gallery2_bundle_and_exit(self, gallery2, capsys):
        code = main(["check", "--input", gallery2])
        assert code == 0
        bundle = json.loads(capsys.readouterr().out)
        by_id = {v["criterion"]: v for v in bundle["verdicts"]}
        assert by_id["planar_no_cycle"]["outcome"] == "Holds"
        assert by_id["planar_no_cycle"]["bound"] == "NoNontrivialCycle"
        assert bundle["obstructions"]["all_hold"] is True

    def test_all_fail_selection_exits_one(self, gallery1):
        assert main(["check", "--input", gallery1, "--criteria", "no_cycle"]) == 1

    def test_eta_override(self, gallery1, capsys):
        code = main(
            ["check", "--input", gallery1, "--criteria", "at_most_one", "--eta", "-1"]
        )
        assert code == 0
        bundle = json.loads(capsys.readouterr().out)
        assert bundle["verdicts"][0]["eta"] == "-1/1"

    def test_empty_input_exits_two(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("{}\n")
        assert main(["check", "--input", str(path)]) == 2

    def test_unparseable_input_exits_two(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        assert main(["check", "--input", str(path)]) == 2

    def test_unknown_criterion_exits_two(self, gallery1):
        assert main(["check", "--input", gallery1, "--criteria", "sturmish"]) == 2

    def test_missing_input_flag_exits_two(self):
        assert main(["check"]) == 2

    def test_byte_identical_reruns(self, gallery1, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        main(["check", "--input", gallery1, "--out", str(out1)])
        main(["check", "--input", gallery1, "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()


class TestTransform:
    def test_rigid_route_matches_expected_factored_form(self, gallery1, capsys):
        code = main(["transform", "--input", gallery1])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert FactoredAbel.from_json(data).to_json() == example1_factored().to_json()

    def test_homogeneous_route_lands_on_psi(self, gallery2, capsys):
        code = main(["transform", "--input", gallery2])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        f = FactoredAbel.from_json(data)
        from abelcycles.gallery import example2_system

        assert f.a1 == example2_system().psi()

    def test_plain_cubic_input_passes_through(self, tmp_path, capsys):
        eq = {
            "C1": [{"i": 0, "j": 0, "c": "6/1"}],
            "C2": [],
            "C3": [{"i": 2, "j": 0, "c": "1/1"}],
        }
        path = tmp_path / "abel.json"
        path.write_text(dumps(eq))
        code = main(["transform", "--input", str(path)])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert set(data) == {"C1", "C2", "C3"}
        assert data["C1"]["num"] == eq["C1"]

    def test_rigid_route_without_candidate_exits_two(self, tmp_path):
        data = example1_input()
        del data["a1"]
        path = tmp_path / "bare.json"
        path.write_text(dumps(data))
        assert main(["transform", "--input", str(path)]) == 2

    def test_non_invariant_candidate_prints_residual(self, tmp_path, capsys):
        data = example1_input()
        data["a1"] = [{"i": 1, "j": 0, "c": "1/1"}]
        path = tmp_path / "wrong.json"
        path.write_text(dumps(data))
        assert main(["transform", "--input", str(path)]) == 2
        err = capsys.readouterr().err
        assert "not invariant" in err
        assert "residual" in err


class TestOracle:
    def test_writes_json_and_csv(self, tmp_path, capsys):
        path = tmp_path / "constants.json"
        path.write_text(dumps(constants_factored_json()))
        out = tmp_path / "report.json"
        code = main(
            ["oracle", "--input", str(path), "--grid", "60", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["count"] == 1
        assert abs(report["cycles"][0]["x_star"] - 0.5) < 1e-8
        with open(tmp_path / "report.csv") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["x0", "d", "dprime", "escaped"]
        assert len(rows) == 61

    def test_grid_density_does_not_change_the_count(self, tmp_path, capsys):
        path = tmp_path / "constants.json"
        path.write_text(dumps(constants_factored_json()))
        counts = []
        for grid in ("50", "400"):
            main(["oracle", "--input", str(path), "--grid", grid])
            counts.append(json.loads(capsys.readouterr().out)["count"])
        assert counts[0] == counts[1] == 1


class TestReproduce:
    def test_example1_passes(self, capsys):
        assert main(["reproduce", "example1"]) == 0
        out = capsys.readouterr().out
        assert "ok: example1" in out
        assert "FAIL" not in out

    def test_example2_passes(self, capsys):
        assert main(["reproduce", "example2"]) == 0
        out = capsys.readouterr().out
        assert "ok: example2" in out
        assert "FAIL" not in out

    def test_unknown_example_exits_two(self):
        assert main(["reproduce", "bogus"]) == 2
