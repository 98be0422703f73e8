import json

from click.testing import CliRunner

from onionclass.cli import main
from onionclass.documents import parse_state_document, state_document
from onionclass import from_terms, to_float


def _run(args, stdin=None):
    return CliRunner().invoke(main, args, input=stdin)


def _ghz_doc():
    zero = ["0/1", "0/1"]
    one = ["1/1", "0/1"]
    return json.dumps(
        {"format": [2, 2, 2], "mode": "exact", "amplitudes": [one] + [zero] * 6 + [one]}
    )


def test_classify_ghz_document():
    result = _run(["classify"], stdin=_ghz_doc())
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["name"] == "GHZ"
    assert payload["onion_level"] == 0
    assert payload["local_ranks"] == [2, 2, 2]


def test_format_mismatch_exits_2():
    doc = json.dumps(
        {"format": [2, 2, 2], "mode": "exact", "amplitudes": [["1/1", "0/1"]] * 7}
    )
    result = _run(["classify"], stdin=doc)
    assert result.exit_code == 2
    payload = json.loads(result.output)
    assert payload["error"] == "FormatMismatch"


def test_unsupported_format_exits_3():
    doc = json.dumps(
        {
            "format": [2, 2, 2, 2, 2],
            "mode": "exact",
            "amplitudes": [["1/1", "0/1"]] + [["0/1", "0/1"]] * 31,
        }
    )
    result = _run(["classify"], stdin=doc)
    assert result.exit_code == 3
    assert json.loads(result.output)["error"] == "UnsupportedFormat"


def test_malformed_documents_never_panic():
    for bad in [
        "not json at all",
        json.dumps({"format": [2, 2]}),
        json.dumps({"format": [2, 2], "mode": "exact", "amplitudes": [["1/1", "0/1"], [1.0, 0.0], ["0/1", "0/1"], ["0/1", "0/1"]]}),
        json.dumps({"format": [2, 2], "mode": "float", "amplitudes": [["1/1", "0/1"]] * 4}),
        json.dumps({"format": [2, 2], "mode": "maybe", "amplitudes": []}),
        json.dumps({"format": "nope", "mode": "float", "amplitudes": []}),
    ]:
        result = _run(["classify"], stdin=bad)
        assert result.exit_code == 2, bad
        assert json.loads(result.output)["error"]


def test_hyperdet_bell():
    doc = json.dumps(
        {
            "format": [2, 2],
            "mode": "exact",
            "amplitudes": [["1/1", "0/1"], ["0/1", "0/1"], ["0/1", "0/1"], ["1/1", "0/1"]],
        }
    )
    result = _run(["hyperdet"], stdin=doc)
    payload = json.loads(result.output)
    assert payload == {"defined": True, "value": "1/1", "degree": 2, "format": [2, 2]}


def test_hyperdet_polygon_violation():
    doc = json.dumps(
        {
            "format": [4, 2, 2],
            "mode": "exact",
            "amplitudes": [["1/1", "0/1"]] + [["0/1", "0/1"]] * 15,
        }
    )
    payload = json.loads(_run(["hyperdet"], stdin=doc).output)
    assert payload["defined"] is False
    assert payload["value"] == "1/1"


def test_reachable_command():
    assert json.loads(_run(["reachable", "GHZ", "B2"]).output)["reachable"] is True
    assert json.loads(_run(["reachable", "GHZ", "W"]).output)["reachable"] is False
    result = _run(["reachable", "GHZ", "NOPE"])
    assert result.exit_code == 2


def test_random_round_trip_byte_stable():
    first = _run(["random", "2x2x2", "--seed", "7"]).output
    second = _run(["random", "2x2x2", "--seed", "7"]).output
    assert first == second
    doc = json.loads(first)
    seed = doc.pop("seed")
    assert seed == 7
    state = parse_state_document(doc)
    redoc = state_document(state)
    assert redoc == doc
    reclassified = _run(["classify"], stdin=json.dumps(redoc)).output
    assert json.loads(reclassified)["name"] == "GHZ"


def test_random_exact_mode():
    doc = json.loads(_run(["random", "2x2", "--seed", "3", "--mode", "exact"]).output)
    assert doc["mode"] == "exact"
    assert all(isinstance(c, str) for amp in doc["amplitudes"] for c in amp)


def test_invariants_report():
    payload = json.loads(_run(["invariants"], stdin=_ghz_doc()).output)
    assert payload["local_ranks"] == [2, 2, 2]
    assert payload["separability"] == [[0, 1, 2]]
    assert payload["hyperdet"]["value"] == "1/1"
    assert payload["three_tangle_squared_x16"] == "16/1"


def test_canonicalize_command():
    payload = json.loads(_run(["canonicalize"], stdin=_ghz_doc()).output)
    assert payload["name"] == "GHZ"
    rep = parse_state_document(payload["representative"])
    assert rep.format == (2, 2, 2)


def test_canonicalize_extension_scalars_serialize():
    amps = [["1/1", "0/1"], ["0/1", "0/1"], ["0/1", "0/1"], ["1/1", "0/1"],
            ["0/1", "0/1"], ["1/1", "0/1"], ["2/1", "0/1"], ["0/1", "0/1"]]
    doc = json.dumps({"format": [2, 2, 2], "mode": "exact", "amplitudes": amps})
    result = _run(["canonicalize"], stdin=doc)
    assert result.exit_code == 0
    payload = json.loads(result.output)
    entries = [e for mat in payload["operators"] for row in mat for e in row]
    assert any("sqrt" in e for e in entries if isinstance(e, str))


def test_oracle_command_reports_seed():
    doc = json.dumps(state_document(to_float(from_terms((2, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}))))
    payload = json.loads(_run(["oracle", "--seed", "4", "--restarts", "16"], stdin=doc).output)
    assert payload["found"] is True
    assert payload["seed"] == 4
    assert payload["residual"] <= 1e-8
    assert payload["formula_value"] == 0.0


def test_mixed_command():
    member = lambda w, terms: {
        "weight": w,
        "state": {
            "format": [2, 2, 2],
            "mode": "exact",
            "amplitudes": [
                ["1/1" if i in terms else "0/1", "0/1"] for i in range(8)
            ],
        },
    }
    doc = json.dumps({"members": [member("1/2", {0, 7}), member("1/2", {1, 2, 4})]})
    payload = json.loads(_run(["mixed"], stdin=doc).output)
    assert payload["ladder_class"] == "GHZ-class"
    assert payload["bound_kind"] == "upper-bound"


def test_text_and_json_agree():
    as_json = json.loads(_run(["classify"], stdin=_ghz_doc()).output)
    as_text = _run(["classify", "--output", "text"], stdin=_ghz_doc()).output
    assert f"name{' ' * 8}  GHZ" in as_text or "GHZ" in as_text
    assert str(as_json["onion_level"]) in as_text
    for rank in as_json["local_ranks"]:
        assert str(rank) in as_text


def test_env_variable_fallback(monkeypatch):
    runner = CliRunner()
    result = runner.invoke(main, ["random", "2x2"], env={"ONION_SEED": "12"})
    assert json.loads(result.output)["seed"] == 12
