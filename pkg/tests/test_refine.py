"""Inverse refinement: symmetrization, contraction, traces, the scan."""

import json

import numpy as np
import pytest

from irrepsk import (
    aligned_dist,
    build_builtin,
    build_gateset_net,
    check_smalltrace,
    compile_target,
    contraction_constant,
    dist,
    eps0_constant,
    naive_inverse_length,
    random_su,
    refine_inverse,
    refine_inverse_sl,
    scan_orderings,
    symmetrize_matrix,
    symmetrize_word,
    symmetrized_length,
)
from irrepsk.errors import (
    DimError,
    GroupTooLarge,
    NetTooCoarse,
    NonConvergent,
    Stalled,
)
from irrepsk.gateset import make_word
from irrepsk.linalg import random_sl_near_identity


def test_symmetrized_length_formula():
    assert symmetrized_length(4, 5) == 26
    assert symmetrized_length(4, 26) == 110
    assert symmetrized_length(9, 7) == 9 * 7 + 16


def test_contraction_constants():
    # 3 n (d-1)! + n^2
    assert contraction_constant(build_builtin("pauli")) == 28
    assert contraction_constant(build_builtin("weyl", 3)) == 135
    assert contraction_constant(build_builtin("q8")) == 88


def test_symmetrize_matrix_fixes_identity():
    rep = build_builtin("pauli")
    assert np.allclose(symmetrize_matrix(rep, np.eye(2)), np.eye(2), atol=1e-12)


def test_symmetrize_word_matches_matrix_map(ht_gateset):
    gs = ht_gateset
    rng = np.random.default_rng(41)
    idx = tuple(int(i) for i in rng.integers(len(gs.matrices), size=3))
    w = make_word(gs.matrices, idx)
    f = symmetrize_word(gs, w)
    assert f.length == symmetrized_length(gs.rep.order, w.length)
    # word form uses table inverses, matrix form exact ones: equal up to
    # a determinant root of unity
    want = symmetrize_matrix(gs.rep, w.product)
    assert aligned_dist(f.product, want, gs.phase_candidates) <= 1e-10


def test_symmetrize_contracts_near_identity():
    rep = build_builtin("pauli")
    c = contraction_constant(rep)
    rng = np.random.default_rng(42)
    eye = np.eye(2)
    for _ in range(100):
        w = random_sl_near_identity(2, rng, 5e-3)
        f = symmetrize_matrix(rep, w)
        assert dist(f, eye) <= c * dist(w, eye) ** 2


def test_refine_irrep_member_uses_table(ht_gateset, ht_refine_net):
    word, achieved, trace = refine_inverse(ht_gateset, ht_refine_net, 1, 1e-8)
    assert trace.exact_hit
    assert word.indices == (1,)  # su-form X is its own inverse up to phase
    assert achieved <= 1e-12


def test_refine_exact_net_hits(ht_gateset, ht_refine_net):
    # both extra gates have exact inverses among short net words
    word, achieved, trace = refine_inverse(ht_gateset, ht_refine_net, 4, 1e-8)
    assert word.indices == (4,)
    assert achieved <= 1e-12
    assert not trace.exact_hit
    assert len(trace.errors) == 1  # start already below target: no passes
    word, achieved, trace = refine_inverse(ht_gateset, ht_refine_net, 5, 1e-8)
    assert word.indices == (1, 5, 1)
    assert achieved <= 1e-12


def test_refine_skew_gate_contracts(skew_gateset, skew_net):
    gs = skew_gateset
    gen = gs.names.index("S")
    word, achieved, trace = refine_inverse(gs, skew_net, gen, 1e-8)
    c = contraction_constant(gs.rep)
    eps0 = eps0_constant(gs)
    assert trace.start_error < eps0
    assert len(trace.errors) == 3
    assert trace.lengths == [5, 26, 110]
    assert word.length == 109
    for prev, cur in zip(trace.errors, trace.errors[1:]):
        assert cur <= c * prev * prev * (1 + 1e-9)
    for k, e in enumerate(trace.errors):
        assert e <= 2 * eps0 / 2 ** (2 ** k)
    assert achieved <= 1e-8
    assert all(0 <= i < len(gs.matrices) for i in word.indices)
    u_inv = gs.matrices[gen].conj().T
    assert aligned_dist(word.product, u_inv, gs.phase_candidates) <= 1e-8


def test_refine_rejects_coarse_net(skew_gateset):
    # identity-only net: the best start sits far outside the basin
    net0 = build_gateset_net(skew_gateset, 0)
    gen = skew_gateset.names.index("S")
    with pytest.raises(NetTooCoarse):
        refine_inverse(skew_gateset, net0, gen, 1e-8)


def test_refine_stalls_at_the_float_floor(skew_gateset, skew_net, monkeypatch):
    # an unreachable target plateaus near 1e-15; cap the passes so the
    # word cannot quadruple in length for long before the diagnosis
    import irrepsk.refine as refine_mod

    monkeypatch.setattr(refine_mod, "_MAX_PASSES", 6)
    gen = skew_gateset.names.index("S")
    with pytest.raises((Stalled, NonConvergent)):
        refine_inverse(skew_gateset, skew_net, gen, 1e-30)


def test_naive_inverse_length_closed_form(ht_gateset):
    t_idx = ht_gateset.names.index("T")
    # su-form T has order 16; the 7th power is the exact inverse up to phase
    assert naive_inverse_length(ht_gateset, t_idx, 1e-6) == 7
    assert naive_inverse_length(ht_gateset, t_idx, 1e-1) == 7


def test_naive_inverse_length_matches_power_loop(rz_gateset):
    gs = rz_gateset
    idx = gs.names.index("G")
    eps = 0.3
    got = naive_inverse_length(gs, idx, eps)
    u = gs.matrices[idx]
    p = u.copy()
    brute = None
    for k in range(2000):
        if aligned_dist(p, np.eye(2), gs.phase_candidates) <= eps:
            brute = k
            break
        p = p @ u
    assert got == brute


def test_naive_inverse_length_cap(rz_gateset):
    idx = rz_gateset.names.index("G")
    with pytest.raises(NonConvergent):
        naive_inverse_length(rz_gateset, idx, 1e-12, cap=10_000)


def test_smalltrace_closed_form():
    m = np.diag([np.exp(0.1j), np.exp(-0.1j)])
    lhs, rhs = check_smalltrace(m)
    assert lhs / rhs == pytest.approx(1 / 6, abs=1e-9)
    with pytest.raises(DimError):
        check_smalltrace(np.diag([2.0, 1.0]))


def test_smalltrace_bound_holds_nearby():
    rng = np.random.default_rng(43)
    for d in (2, 3):
        for _ in range(200):
            m = random_sl_near_identity(d, rng, 0.3)
            lhs, rhs = check_smalltrace(m)
            assert lhs <= rhs + 1e-9


def test_refine_inverse_sl_exact_hit(sl_gateset, sl_net):
    gen = sl_gateset.names.index("D")
    word, achieved, trace = refine_inverse_sl(sl_gateset, sl_net, gen, 1e-6)
    assert word.indices == (1, 4, 1)  # X D X is the exact inverse of D
    assert achieved <= 1e-12
    assert all(r <= 1e-9 for r in trace.det_residuals)


def test_refine_inverse_sl_perturbed_gate(slp_gateset, slp_net):
    gs = slp_gateset
    gen = gs.names.index("P")
    word, achieved, trace = refine_inverse_sl(gs, slp_net, gen, 1e-6)
    c = contraction_constant(gs.rep)
    assert len(trace.errors) == 2
    assert trace.errors[1] <= c * trace.errors[0] ** 2
    assert trace.lengths == [4, 22]
    assert word.length == 21
    assert achieved <= 1e-6
    assert all(r <= 1e-9 for r in trace.det_residuals)
    u_inv = np.linalg.inv(gs.matrices[gen])
    assert aligned_dist(word.product, u_inv, gs.phase_candidates) <= achieved + 1e-12


def test_refine_inverse_sl_rejects_su_sets(ht_gateset, ht_refine_net):
    with pytest.raises(DimError):
        refine_inverse_sl(ht_gateset, ht_refine_net, 4, 1e-6)


def test_compile_target_report(ht_gateset, ht_params, ht_refine_net):
    rng = np.random.default_rng(44)
    target = random_su(2, rng)
    report = compile_target(ht_gateset, target, 1e-3, ht_params, ht_refine_net)
    assert report.error <= 1e-3
    assert report.base_error <= 5e-4
    assert report.length == len(report.indices)
    assert all(0 <= i < len(ht_gateset.matrices) for i in report.indices)
    assert set(report.refine_errors) <= {4, 5}
    assert report.inverted_extras >= len(report.refine_errors)
    doc = json.dumps(report.as_dict())
    assert json.loads(doc)["eps"] == 1e-3


def test_scan_orderings_s3():
    rep = build_builtin("s3")
    results, threshold = scan_orderings(rep, samples=6, rng=np.random.default_rng(45))
    assert len(results) == 120  # 5! orderings, identity pinned last
    for order, coeff in results:
        assert order[-1] == 0
        assert coeff >= 0
    assert threshold > 0
    assert any(c <= threshold for _, c in results)


def test_scan_orderings_rejects_large_groups():
    with pytest.raises(GroupTooLarge):
        scan_orderings(build_builtin("q8"))
