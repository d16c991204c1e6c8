"""Gate-set documents: parsing, validation, words, the basin constant."""

import json
from functools import reduce

import numpy as np
import pytest

from irrepsk import (
    GateWord,
    build_builtin,
    concat_words,
    eps0_constant,
    load_gateset,
    make_word,
    parse_gateset,
    word_product,
)
from irrepsk.errors import BallError, ClassError, IrrepError, SchemaError
from irrepsk.gateset import matrix_to_literal, parse_matrix_literal

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def doc_su(gates=(), irrep=None):
    return {
        "dimension": 2,
        "mode": "su",
        "irrep": irrep or {"builtin": "pauli"},
        "gates": list(gates),
    }


def gate(name, m):
    return {"name": name, "matrix": matrix_to_literal(np.asarray(m, dtype=complex))}


def test_parse_pauli_ht(ht_gateset):
    gs = ht_gateset
    assert gs.names == ("I", "X", "Y", "Z", "H", "T")
    assert gs.irrep_indices == (0, 1, 2, 3)
    assert gs.extra_indices == (4, 5)
    assert gs.mode == "su"
    # su mode stores determinant-1 representatives
    assert np.allclose(gs.matrices[4], -1j * H, atol=1e-12)
    assert np.allclose(
        gs.matrices[5],
        np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)]),
        atol=1e-12,
    )
    for m in gs.matrices:
        assert abs(np.linalg.det(m) - 1.0) <= 1e-10


def test_eps0_constants():
    # 1 / (6 n (d-1)! + 2 n^2) for group order n in dimension d
    assert eps0_constant(build_builtin("pauli")) == pytest.approx(1 / 56)
    assert eps0_constant(build_builtin("weyl", 3)) == pytest.approx(1 / 270)
    assert eps0_constant(build_builtin("q8")) == pytest.approx(1 / 176)
    # larger groups shrink the basin
    assert eps0_constant(build_builtin("pauli")) > eps0_constant(build_builtin("q8"))


def test_eps0_accepts_gateset(ht_gateset):
    assert eps0_constant(ht_gateset) == pytest.approx(1 / 56)


def test_parse_requires_schema_fields():
    with pytest.raises(SchemaError):
        parse_gateset({"mode": "su", "irrep": {"builtin": "pauli"}})
    with pytest.raises(SchemaError):
        parse_gateset({"dimension": 2, "mode": "xx", "irrep": {"builtin": "pauli"}})
    with pytest.raises(SchemaError):
        parse_gateset(doc_su(irrep={"wrong": 1}))
    with pytest.raises(SchemaError):
        parse_gateset(doc_su(gates=[{"name": "H"}]))
    with pytest.raises(SchemaError):
        parse_gateset("not valid json {")


def test_parse_rejects_duplicate_names():
    d = doc_su(gates=[gate("X", H)])  # clashes with the irrep element name
    with pytest.raises(SchemaError):
        parse_gateset(d)


def test_parse_rejects_reducible_irrep():
    z = np.diag([1.0 + 0j, -1.0 + 0j])
    d = doc_su(irrep={"matrices": [matrix_to_literal(np.eye(2, dtype=complex)),
                                   matrix_to_literal(z)]})
    with pytest.raises(IrrepError):
        parse_gateset(d)


def test_parse_rejects_nonunitary_gate_in_su_mode():
    d = doc_su(gates=[gate("D", np.diag([2.0, 0.5]))])
    with pytest.raises(ClassError):
        parse_gateset(d)


def test_matrix_literal_roundtrip():
    rng = np.random.default_rng(12)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lit = matrix_to_literal(m)
    back = parse_matrix_literal(lit, 3, "test")
    assert np.array_equal(back, m)
    with pytest.raises(SchemaError):
        parse_matrix_literal(lit[:-1], 3, "test")


def test_sl_ball_check_covers_every_generator():
    base = {
        "dimension": 2,
        "mode": "sl",
        "irrep": {"builtin": "pauli"},
        "gates": [gate("D", np.diag([2.0, 0.5]))],
    }
    # su-form Paulis sit at distance sqrt(2) from I, D at distance 1
    ok = parse_gateset({**base, "sl_radius": 1.5})
    assert ok.sl_radius == 1.5
    with pytest.raises(BallError):
        parse_gateset({**base, "sl_radius": 1.0})
    with pytest.raises(SchemaError):
        parse_gateset(base)  # sl mode needs the radius


def test_word_monoid(ht_gateset):
    gens = ht_gateset.matrices
    rng = np.random.default_rng(13)
    idx = tuple(int(i) for i in rng.integers(len(gens), size=7))
    w = make_word(gens, idx)
    assert w.length == 7
    oracle = reduce(np.matmul, [gens[i] for i in idx])
    assert np.allclose(w.product, oracle, atol=1e-12)
    assert np.allclose(word_product(gens, idx), oracle, atol=1e-12)
    a = make_word(gens, idx[:3])
    b = make_word(gens, idx[3:])
    ab = concat_words(a, b)
    assert ab.indices == idx
    assert np.allclose(ab.product, oracle, atol=1e-12)


def test_empty_word_is_identity(ht_gateset):
    w = make_word(ht_gateset.matrices, ())
    assert w.length == 0
    assert np.allclose(w.product, np.eye(2), atol=1e-15)


def test_fingerprint_tracks_content():
    doc = {
        "dimension": 2,
        "mode": "su",
        "irrep": {"builtin": "pauli"},
        "gates": [gate("H", H)],
    }
    a = parse_gateset(json.loads(json.dumps(doc)))
    b = parse_gateset(json.loads(json.dumps(doc)))
    assert a.fingerprint == b.fingerprint
    doc["tolerance"] = 1e-8
    c = parse_gateset(doc)
    assert c.fingerprint != a.fingerprint


def test_load_gateset_roundtrip(tmp_path):
    doc = doc_su(gates=[gate("H", H)])
    p = tmp_path / "set.json"
    p.write_text(json.dumps(doc))
    gs = load_gateset(p)
    assert gs.names[-1] == "H"
    assert isinstance(gs, type(parse_gateset(doc)))
