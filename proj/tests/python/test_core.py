import os
import pathlib

import pytest

import sessionlr

CORPUS = pathlib.Path(
    os.environ.get("SESSIONLR_CORPUS_DIR", pathlib.Path(__file__).resolve().parents[2] / "corpus")
)


def src(name):
    return (CORPUS / name).read_text()


def test_bank_checks_with_secrecy():
    assert sessionlr.check(src("bank.sill"), ifc=True) == []


def test_sneaky_rejected_at_observer_sends():
    diags = sessionlr.check(src("sneaky.sill"), ifc=True)
    assert [d["line"] for d in diags] == [16, 21]
    assert all(d["rule"] == "&L" for d in diags)


def test_parse_error_is_a_diagnostic():
    diags = sessionlr.check("type pin = +{tok1: pin\n")
    assert diags and diags[0]["line"] >= 1


def test_run_linked_xx():
    out = sessionlr.run(src("xx.sill"), "XX|T1", seed=4)
    assert out["quiescent"]
    assert out["messages"] == ["y#0 ! zero"]


def test_equiv_witness():
    v = sessionlr.equiv(src("xx.sill"), "XX|T1", "XX|T2", m=2)
    assert v["verdict"] == "distinguished"
    assert v["left"] == ["Out(y#0, zero)"]
    assert v["right"] == ["Out(y#0, one)"]
    z = sessionlr.equiv(src("xx_zero.sill"), "XXzero|T1", "XXzero|T2", bisim=True)
    assert z["verdict"] == "related"


def test_ni_sneaky():
    assert sessionlr.ni(src("sneaky.sill"), "SneakyVerifier", "guest")["verdict"] == "distinguished"
    assert sessionlr.ni(src("verifier.sill"), "aVerifier", "guest")["verdict"] == "related"


def test_join_and_errors():
    assert sessionlr.join(src("bank.sill"), "alice", "bob") == "bank"
    with pytest.raises(KeyError):
        sessionlr.run(src("xx.sill"), "Nope")
    with pytest.raises(ValueError):
        sessionlr.equiv(src("xx.sill"), "XX", "T1")
