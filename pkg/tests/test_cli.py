import io
from pathlib import Path

import pytest

from copyposets.catalogue import loads_spec
from copyposets.cli import main
from copyposets.posets import loads_preorder, sq
from copyposets.structures import loads_structure

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def record(text):
    return dict(line.split("=", 1) for line in text.splitlines())


class TestExamples:
    def test_classify_omega_omega(self):
        code, out, _ = run("classify", DATA / "omega_F_omega.spec")
        assert code == 0
        assert out == "case a4: (P(ω×ω)/(Fin×Fin))+ ; indivisible: yes\n"

    def test_poset_sq(self):
        code, out, _ = run("poset", "sq", DATA / "v.preorder")
        assert code == 0
        assert out.splitlines()[0] == "1 class"

    def test_ideal_member(self):
        code, out, _ = run("ideal", DATA / "omega_F_2.spec", DATA / "tail1.profile")
        assert (code, out) == (0, "member: true\n")

    def test_ideal_non_member(self):
        code, out, _ = run("ideal", DATA / "omega_F_2.spec", DATA / "full_tail.profile")
        assert (code, out) == (1, "member: false\n")

    def test_bounded_family(self):
        code, out, _ = run("ideal", DATA / "unbounded_F.spec", DATA / "bounded5.profile")
        assert (code, out) == (0, "member: true\n")


class TestVerbs:
    def test_validate_accepts(self):
        code, out, _ = run("validate", DATA / "path_cycle.spec")
        assert (code, out) == (0, "valid\n")

    def test_validate_rejects(self):
        code, out, _ = run("validate", DATA / "mixed_K_F.spec")
        assert code == 1
        assert out.startswith("invalid\n") and "counterexample" in out

    def test_classify_invalid_exits_one(self):
        code, out, _ = run("classify", DATA / "mixed_K_F.spec")
        assert code == 1 and out.startswith("invalid:")

    def test_report(self):
        code, out, _ = run("report", DATA / "F_3_plus_omega_F_2.spec")
        assert code == 0
        assert out.splitlines()[0] == "case a2: (P(ω)/Fin)+ ; indivisible: no"
        assert "witness.A: " in out

    @pytest.mark.parametrize("name, cls", [
        ("omega_F_2.spec", "FinPower(1)"),
        ("two_F_omega.spec", "FinPower(2)"),
        ("unbounded_F.spec", "EDfinProduct(0)"),
        ("path_cycle.spec", "FinPower(1)"),
    ])
    def test_classify_record(self, name, cls):
        code, out, _ = run("classify", DATA / name, "--format", "record")
        assert code == 0
        assert record(out)["class"] == cls

    def test_copies(self):
        code, out, _ = run("copies", DATA / "k2.structure", DATA / "k3.structure")
        assert code == 0
        assert out == "3 copies\n{0,1}\n{0,2}\n{1,2}\n"

    def test_no_copies(self):
        code, out, _ = run("copies", DATA / "k3.structure", DATA / "k2.structure", "--format", "record")
        assert (code, out) == (1, "count=0\n")

    def test_copies_cap(self):
        code, _, err = run("copies", DATA / "k2.structure", DATA / "k3.structure", "--cap", "2")
        assert code == 2 and "cap" in err

    def test_truncate(self):
        code, out, _ = run("truncate", DATA / "omega_F_2.spec", "--caps", "components=3,size=2")
        assert code == 0
        X = loads_structure(out)
        assert X.n == 6 and len(X.relation) == 12
        assert out.count("# block") == 3

    def test_bad_caps(self):
        code, _, err = run("truncate", DATA / "omega_F_2.spec", "--caps", "depth=3")
        assert code == 2

    def test_poset_ops(self):
        assert run("poset", "atoms", DATA / "v.preorder")[1] == "atoms: {0,1,2}\n"
        code, out, _ = run("poset", "separative", DATA / "v.preorder")
        assert (code, out) == (1, "separative: no\n")
        code, out, _ = run("poset", "sm", DATA / "v.preorder")
        assert loads_preorder(out).le.all()

    def test_poset_record(self):
        code, out, _ = run("poset", "sq", DATA / "v.preorder", "--format", "record")
        assert record(out) == {"classes": "1", "class.0": "0,1,2"}

    def test_verify(self):
        code, out, _ = run("verify", "golden", "exponent", "validation")
        assert code == 0
        assert len(out.splitlines()) == 3 and all("PASS" in line for line in out.splitlines())

    def test_verify_record(self):
        code, out, _ = run("verify", "golden", "--format", "record")
        assert record(out)["golden_classification_table"] == "PASS"

    def test_unknown_verb(self):
        assert run("divide", "x")[0] == 2


class TestErrors:
    def test_malformed_spec(self, tmp_path):
        bad = tmp_path / "bad.spec"
        bad.write_text("class full size 2 mult omega\nclass sideways size 3 mult 1\n")
        code, out, err = run("classify", bad)
        assert code == 2 and out == ""
        assert err.startswith("parse error: ") and f"{bad}:2:" in err

    def test_malformed_profile(self, tmp_path):
        bad = tmp_path / "bad.profile"
        bad.write_text("tail class=0 value=1\ntail class=0\n")
        code, _, err = run("ideal", DATA / "omega_F_2.spec", bad)
        assert code == 2 and f"{bad}:2:" in err

    def test_malformed_preorder(self, tmp_path):
        bad = tmp_path / "bad.preorder"
        bad.write_text("elements 2\nle 0 1\nle 1 7\n")
        code, _, err = run("poset", "sq", bad)
        assert code == 2 and f"{bad}:3:" in err

    def test_strict_preorder(self, tmp_path):
        unclosed = tmp_path / "u.preorder"
        unclosed.write_text("elements 3\nle 0 1\nle 1 2\n")
        assert run("poset", "sq", unclosed)[0] == 0
        assert run("poset", "sq", unclosed, "--strict")[0] == 2

    def test_missing_file(self):
        code, _, err = run("classify", DATA / "nope.spec")
        assert code == 2 and "nope.spec" in err

    def test_profile_for_wrong_catalogue(self):
        code, _, err = run("ideal", DATA / "unbounded_F.spec", DATA / "tail1.profile")
        assert code == 2 and err.startswith("error: ")


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("report", DATA / "mixed_K_F.spec", "--format", "record"),
        ("truncate", DATA / "path_cycle.spec"),
        ("verify", "witness", "--seed", "3"),
    ])
    def test_identical_output(self, argv):
        assert run(*argv) == run(*argv)

    def test_truncate_output_reloads(self):
        _, out, _ = run("truncate", DATA / "path_cycle.spec", "--caps", "components=2,size=4")
        assert loads_structure(out).n == 14

    def test_sm_output_reloads(self):
        _, out, _ = run("poset", "sm", DATA / "v.preorder")
        assert sq(loads_preorder(out, strict=True)).size == 1

    def test_spec_files_parse(self):
        for path in DATA.glob("*.spec"):
            loads_spec(path.read_text(), source=str(path), base_dir=DATA)
