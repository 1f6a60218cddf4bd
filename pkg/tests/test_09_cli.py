# Test 09 - Command Line
"""
End-to-end runs of the `prisma` command: one JSON document in, one out,
with the documented exit codes.
"""

import json

import pytest

C_DOC = {
    "type": "intersect",
    "args": [
        {"type": "orthant", "dim": 2},
        {"type": "preimage", "matrix": [[1, -1], [1, 0]], "arg": {"type": "lex", "dim": 2}},
    ],
}
CHAIN2 = {"factors": [{"parents": [-1, 0]}]}


def test_hilbert(cli):
    code, out = cli("hilbert", doc={"cone": {"dim": 2, "rays": [[1, 0], [1, 2]]}})
    assert code == 0
    assert out == {"lineality": [], "hilbert_basis": [[1, 0], [1, 1], [1, 2]]}


def test_orthant_hilbert_basis(cli):
    code, out = cli("hilbert", doc={"cone": {"dim": 2, "inequalities": [[1, 0], [0, 1]]}})
    assert code == 0 and out["hilbert_basis"] == [[0, 1], [1, 0]]


def test_verbose_logging_leaves_stdout_to_the_result(cli):
    code, out = cli("hilbert", "--verbose", doc={"cone": {"dim": 2, "rays": [[1, 0], [1, 2]]}})
    assert code == 0 and out["hilbert_basis"] == [[1, 0], [1, 1], [1, 2]]


def test_closure_of_intersection_is_zero(cli):
    d_doc = {
        "type": "intersect",
        "args": [
            {"type": "orthant", "dim": 2},
            {"type": "preimage", "matrix": [[-1, 1], [0, 1]], "arg": {"type": "lex", "dim": 2}},
        ],
    }
    code, out = cli("closure", doc={"expr": {"type": "intersect", "args": [C_DOC, d_doc]}})
    assert code == 0 and out == {"lineality": [], "hilbert_basis": []}


def test_cache_hit_matches_fresh_result(cli):
    doc = {"expr": C_DOC}
    first = cli("closure", doc=doc)
    assert cli("closure", doc=doc) == first
    assert cli("closure", "--no-cache", doc=doc) == first


def test_saturate(cli):
    code, out = cli("saturate", doc={"gens": [[2, 0], [3, 0]]})
    assert code == 0 and out["hilbert_basis"] == [[1, 0]]


@pytest.mark.parametrize("point, expected", [([1, 3], True), ([2, 2], False), ([0, 0], True)])
def test_member(cli, point, expected):
    code, out = cli("member", doc={"expr": C_DOC, "point": point})
    assert code == 0 and out == {"member": expected}


def test_closure_and_span(cli):
    assert cli("closure", doc={"expr": C_DOC})[1] == {"lineality": [], "hilbert_basis": [[0, 1], [1, 1]]}
    restricted = {"type": "restrict", "subspace": [[1, 1]], "arg": {"type": "lex", "dim": 2}}
    assert cli("span", doc={"expr": restricted})[1] == {"dim": 1, "basis": [[1, 1]]}


def test_closure_in_subspace(cli):
    code, out = cli("closure-in-subspace", doc={"expr": {"type": "lex", "dim": 2}, "subspace": {"dim": 2, "basis": [[1, 1]]}})
    assert code == 0 and out["hilbert_basis"] == [[-1, -1]]


def test_purity_finds_the_gap(cli):
    code, out = cli("purity", "--box", "2", doc={"expr": {"type": "fingen", "gens": [[2, 0], [3, 0]]}})
    assert code == 0
    assert out["pure"] is False and out["counterexample"] == [1, 0]


def test_faces(cli):
    code, out = cli("faces", doc={"cone": {"dim": 2, "inequalities": [[1, 0], [0, 1]]}})
    assert code == 0
    assert [f["dim"] for f in out["faces"]] == [0, 1, 1, 2]


def test_decompose(cli):
    code, out = cli("decompose", "--box", "3", doc={"expr": C_DOC})
    assert code == 0 and out["passed"] is True
    assert [p["dim"] for p in out["pieces"]] == [0, 1, 2]


def test_certify(cli):
    code, out = cli("certify", doc={"expr": C_DOC})
    assert code == 0 and out["claim"] == "prismal"
    assert out["certificate"]["rule"]


def test_certify_refuses_a_product_with_a_gap(cli):
    doc = {"expr": {"type": "product", "args": [{"type": "fingen", "gens": [[2], [3]]}, {"type": "lex", "dim": 1}]}}
    code, out = cli("certify", doc=doc)
    assert code == 3 and out["error"] == "certificate_unavailable"


def test_tree_commands(cli):
    code, out = cli("tree-leq", doc={"spec": CHAIN2, "a": [0, -5], "b": [0, 0]})
    assert code == 0 and out == {"leq": True, "geq": False, "oracle": True}
    star = {"factors": [{"parents": [-1, 0, 0]}]}
    code, out = cli("tree-join", doc={"spec": star, "a": [0, 1, -1], "b": [0, 0, 0]})
    assert out == {"join": [0, 1, 0], "meet": [0, 0, -1]}
    code, out = cli("tree-cx", doc={"generators": {"spec": {"factors": [{"parents": [-1]}]}}})
    assert code == 0 and out["closure"]["hilbert_basis"] == [[0, 1], [1, 1]]


def test_tree_elements_of_the_wrong_size(cli):
    code, out = cli("tree-leq", doc={"spec": CHAIN2, "a": [0, -5, 1], "b": [0, 0]})
    assert code == 2 and out["error"] == "dimension_mismatch"


def test_grothendieck(cli):
    doc = {"presentation": {"generators": 2, "relations": [[[1, 0], [1, 1]]]}, "element": [0, 1]}
    code, out = cli("grothendieck", doc=doc)
    assert code == 0
    assert out["free_rank"] == 1 and out["element"]["zero"] is True


# --- Errors ---

def test_schema_errors_carry_a_path(cli):
    code, out = cli("member", doc={"expr": {"type": "banana"}, "point": [1]})
    assert code == 2 and out["exit_code"] == 2
    assert out["path"].startswith("$.expr")


def test_semantic_errors_carry_a_path(cli):
    bad = {"type": "intersect", "args": [{"type": "orthant", "dim": 2}, {"type": "preimage", "matrix": [[1, 0, 0]], "arg": {"type": "lex", "dim": 2}}]}
    code, out = cli("span", doc={"expr": bad})
    assert code == 2 and out["path"] == "$.expr.args[1]"


def test_malformed_json(cli, tmp_path):
    source = tmp_path / "broken.json"
    source.write_text("{not json", encoding="utf-8")
    code, out = cli("span", "--in", str(source))
    assert code == 2 and out["error"] == "input_error"


def test_closure_needing_purity_is_unsupported(cli):
    doc = {"expr": {"type": "intersect", "args": [{"type": "fingen", "gens": [[2, 0], [3, 0]]}, {"type": "orthant", "dim": 2}]}}
    code, out = cli("closure", doc=doc)
    assert code == 3 and out["error"] == "purity_required"


def test_unknown_suite(cli):
    code, out = cli("verify", "nope")
    assert code == 2 and "nope" in out["message"]


# --- Verification and cache ---

def test_verify_remark(cli):
    code, out = cli("verify", "remark-1-5")
    assert code == 0
    assert out["suite"] == "remark-1-5" and out["passed"] is True


def test_cache_health(cli):
    code, out = cli("cache", "health")
    assert code == 0 and out["status"] == "healthy"


def test_check_cache_detects_a_stale_entry(cli, tmp_path):
    doc = {"expr": C_DOC, "point": [1, 3]}
    assert cli("member", doc=doc) == (0, {"member": True})
    assert cli("member", "--check-cache", doc=doc) == (0, {"member": True})
    (entry,) = (tmp_path / "cli-cache" / "member").glob("*.json")
    entry.write_text(json.dumps({"member": False}), encoding="utf-8")
    assert cli("member", doc=doc) == (0, {"member": False})
    code, out = cli("member", "--check-cache", doc=doc)
    assert code == 4 and out["error"] == "verification_failed"
