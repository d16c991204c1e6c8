"""Inverse-free refinement via finite-group symmetrization.

Core loop: given W_0 = V U within eps0 of the identity, where U is the gate
to invert and V a word over the gate set, apply the map

    W  ->  rho(g_1) W rho(g_1)^{-1} ... rho(g_{n-1}) W rho(g_{n-1})^{-1} W

(identity factor last, contributing the bare W).  For a group of order n
acting irreducibly in dimension d this squares the distance to the identity
up to the constant 3 n (d-1)! + n^2, so from inside the basin of radius
eps0 = 1 / (6 n (d-1)! + 2 n^2) the iteration converges doubly
exponentially.  Every conjugator is a forward group element (inverses come
from the multiplication table), and the bare-W-last ordering keeps the
iterate's final token equal to U; stripping that one token leaves an
inverse-free word whose product approximates U^{-1}.

Distances on unitary iterates are measured up to a global d-th root of
unity (the only phases the normalized generators can produce), which keeps
every aligned representative in the determinant-one slice where the
trace-vs-distance bound applies.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import (
    BallExit,
    DimError,
    GroupTooLarge,
    NetTooCoarse,
    NonConvergent,
    Stalled,
)
from .finitegroup import FiniteGroupRep
from .gateset import GateSet, GateWord, concat_words, eps0_constant, make_word
from .linalg import aligned_dist, dist, op_norm, random_traceless_hermitian
from .net import EpsNet
from .skbase import SKParams, axis_angle, rewrite_irrep_inverses, sk_compile


def contraction_constant(rep: FiniteGroupRep) -> float:
    """Coefficient of the quadratic error bound for one symmetrization pass."""
    n, d = rep.order, rep.dim
    return 3.0 * n * math.factorial(d - 1) + float(n * n)


def symmetrize_matrix(rep: FiniteGroupRep, w: np.ndarray, order=None) -> np.ndarray:
    """Product of rho(g) w rho(g)^{-1} over the group, identity factor last.

    Uses exact inverses, so this is the analysis object; the word-level
    version below substitutes table elements and can differ by a global
    d-th root of unity when the irrep is projective.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape != (rep.dim, rep.dim):
        raise DimError(f"expected shape {(rep.dim, rep.dim)}, got {w.shape}")
    if order is None:
        order = tuple(range(1, rep.order)) + (0,)
    p = np.eye(rep.dim, dtype=complex)
    for g in order:
        p = p @ rep.elements[g] @ w @ rep.inv_elements[g]
    return p


def symmetrize_word(gs: GateSet, word: GateWord) -> GateWord:
    """One inverse-free symmetrization pass at the word level.

    For each non-identity group element in listed order the word
    g . word . g^{-1} is appended, with g^{-1} drawn from the group's own
    multiplication table; the identity factor comes last and contributes the
    bare word.  Output length is n * len + 2 (n - 1).
    """
    rep = gs.rep
    idx = gs.irrep_indices
    pieces = []
    for g in range(1, rep.order):
        pieces.append((idx[g],) + word.indices + (idx[int(rep.inverse_index[g])],))
    pieces.append(word.indices)
    indices = tuple(itertools.chain.from_iterable(pieces))
    p = np.eye(gs.dim, dtype=complex)
    for g in range(1, rep.order):
        p = p @ rep.elements[g] @ word.product @ rep.elements[int(rep.inverse_index[g])]
    p = p @ word.product
    return GateWord(indices, p)


def symmetrized_length(group_order: int, length: int) -> int:
    return group_order * length + 2 * (group_order - 1)


@dataclass(eq=False)
class RefineTrace:
    """Per-iteration diagnostics from one inverse refinement run."""

    start_error: float
    errors: list[float] = field(default_factory=list)
    lengths: list[int] = field(default_factory=list)
    det_residuals: list[float] = field(default_factory=list)
    exact_hit: bool = False

    def as_dict(self) -> dict:
        return {
            "start_error": self.start_error,
            "errors": list(self.errors),
            "lengths": list(self.lengths),
            "det_residuals": list(self.det_residuals),
            "exact_hit": self.exact_hit,
        }


_MAX_PASSES = 25


def _table_inverse_word(gs: GateSet, gen_index: int):
    """Exact single-token inverse for irrep members, None otherwise."""
    if gen_index not in gs.irrep_indices:
        return None
    g = gs.irrep_indices.index(gen_index)
    inv_idx = gs.irrep_indices[int(gs.rep.inverse_index[g])]
    return make_word(gs.matrices, (inv_idx,))


def _best_start(gs: GateSet, net: EpsNet, u: np.ndarray):
    """Net word V minimizing the aligned distance of V U to the identity."""
    if len(net) == 0:
        raise NetTooCoarse("refinement net is empty")
    phases = gs.phase_candidates
    if gs.mode == "su":
        # ||P u - z I|| = ||P - z u^dag|| for unitary u, so the scan reduces
        # to nearest-product queries against the phase-shifted adjoints
        u_inv = u.conj().T
        best = None
        for z in phases:
            dists = net.distances_to(z * u_inv)
            i = int(np.argmin(dists))
            # the bulk scan loses half its digits near zero (sqrt of a
            # cancelled trace), so recheck the winner exactly
            d = dist(net.products[i], z * u_inv)
            if best is None or d < best[1] - 1e-12 or (
                    d < best[1] + 1e-12 and len(net.words[i]) < len(net.words[best[0]])):
                best = (i, d)
    else:
        eye = np.eye(gs.dim)
        best = None
        for i in range(len(net)):
            start = aligned_dist(net.products[i] @ u, eye, phases)
            if best is None or start < best[1]:
                best = (i, start)
    i, start = best
    return GateWord(net.words[i], net.products[i]), start


def _refine_loop(gs: GateSet, net: EpsNet, gen_index: int, eps_target: float,
                 u_inv: np.ndarray, radius: float | None
                 ) -> tuple[GateWord, float, RefineTrace]:
    u = gs.matrices[gen_index]
    phases = gs.phase_candidates
    eps0 = eps0_constant(gs)
    eye = np.eye(gs.dim)

    v_word, start = _best_start(gs, net, u)
    if start > eps0:
        raise NetTooCoarse(
            f"best net start error {start:.3e} exceeds the basin radius "
            f"{eps0:.3e}; rebuild the net with longer words"
        )

    # W_0 = V U; identity-last symmetrization appends the bare word at the
    # end of every pass, so each iterate still terminates in the U token
    word = concat_words(v_word, make_word(gs.matrices, (gen_index,)))

    def direct_error(w: GateWord) -> float:
        return aligned_dist(w.product @ u_inv, u_inv, phases)

    err = start
    trace = RefineTrace(start_error=start)
    trace.errors.append(err)
    trace.lengths.append(word.length)
    trace.det_residuals.append(abs(np.linalg.det(word.product) - 1.0))

    stall = 0
    passes = 0
    while err > eps_target or direct_error(word) > eps_target:
        if passes >= _MAX_PASSES:
            raise NonConvergent(
                f"no convergence to {eps_target:.3e} after {passes} passes "
                f"(best {err:.3e})"
            )
        word = symmetrize_word(gs, word)
        passes += 1
        if radius is not None and op_norm(word.product) > radius + 1.0:
            raise BallExit(
                f"iterate left the working ball (operator norm "
                f"{op_norm(word.product):.3f})"
            )
        new_err = aligned_dist(word.product, eye, phases)
        if new_err >= err:
            stall += 1
            if stall >= 2:
                raise Stalled(
                    f"two consecutive non-contracting passes at {new_err:.3e}"
                )
        else:
            stall = 0
        err = new_err
        trace.errors.append(err)
        trace.lengths.append(word.length)
        trace.det_residuals.append(abs(np.linalg.det(word.product) - 1.0))

    if word.indices[-1] != gen_index:
        raise NonConvergent("internal error: trailing refined-gate token lost")
    tail = make_word(gs.matrices, word.indices[:-1])
    achieved = aligned_dist(tail.product, u_inv, phases)
    return tail, achieved, trace


def refine_inverse(gs: GateSet, net: EpsNet, gen_index: int,
                   eps_target: float) -> tuple[GateWord, float, RefineTrace]:
    """Inverse-free word approximating the inverse of one generator.

    Returns (word, achieved, trace) with achieved = distance of the word's
    product to the gate's inverse, up to a global d-th root of unity, at
    most eps_target.  Irrep members short-circuit to their exact table
    inverse.  Otherwise: scan the net for the seed V with V U closest to
    the identity, require that start inside the quadratic basin
    (NetTooCoarse if not), iterate word symmetrization with measured
    errors, and strip the trailing gate token from the converged word.
    """
    table = _table_inverse_word(gs, gen_index)
    if table is not None:
        u = gs.matrices[gen_index]
        u_inv = u.conj().T if gs.mode == "su" else np.linalg.inv(u)
        achieved = aligned_dist(table.product, u_inv, gs.phase_candidates)
        tr = RefineTrace(start_error=achieved, exact_hit=True)
        tr.errors.append(achieved)
        tr.lengths.append(table.length)
        return table, achieved, tr
    u = gs.matrices[gen_index]
    u_inv = u.conj().T if gs.mode == "su" else np.linalg.inv(u)
    radius = gs.sl_radius if gs.mode == "sl" else None
    return _refine_loop(gs, net, gen_index, eps_target, u_inv, radius)


def refine_inverse_sl(gs: GateSet, net: EpsNet, gen_index: int,
                      eps_target: float) -> tuple[GateWord, float, RefineTrace]:
    """Inverse refinement for determinant-one gates inside a ball in SL(d).

    Same loop as the unitary version, with non-unitary inverses taken by
    np.linalg.inv, a ball-exit check on every iterate, and the convergence
    test applied to both the conjugated error dist(W, I) and the direct
    error against the exact inverse (they differ by up to the operator norm
    of the inverse when the gate is not unitary).
    """
    if gs.mode != "sl":
        raise DimError("refine_inverse_sl expects an sl-mode gate set")
    return refine_inverse(gs, net, gen_index, eps_target)


def naive_inverse_length(gs: GateSet, gen_index: int, eps: float,
                         cap: int = 50_000_000) -> int:
    """Smallest k with dist(U^{k+1}, I) <= eps, i.e. U^k inverts U to eps.

    Distances are aligned over the global phase set.  Closed form for
    d = 2 unitaries: U^m has eigenvalues exp(-+ i m theta / 2), so the
    aligned distance is 2 sin of the distance of m theta / 4 to the nearest
    multiple of pi / 2.  Other cases run a plain power loop.
    """
    u = gs.matrices[gen_index]
    phases = gs.phase_candidates
    if gs.dim == 2 and gs.mode == "su":
        theta, _ = axis_angle(u)
        half_pi = np.pi / 2.0
        chunk = 1_000_000
        for lo in range(1, cap + 2, chunk):
            ms = np.arange(lo, min(lo + chunk, cap + 2), dtype=float)
            x = (ms * theta / 4.0) % half_pi
            v = np.minimum(x, half_pi - x)
            ok = np.nonzero(2.0 * np.sin(v) <= eps)[0]
            if ok.size:
                return int(ms[ok[0]]) - 1
        raise NonConvergent(f"no power of the gate inverts it within {cap} steps")
    eye = np.eye(gs.dim)
    p = u.copy()
    for k in range(cap):
        if aligned_dist(p, eye, phases) <= eps:
            return k
        p = p @ u
    raise NonConvergent(f"no power of the gate inverts it within {cap} steps")


def check_smalltrace(m: np.ndarray) -> tuple[float, float]:
    """(|tr m - d|, (2^d + d!) * dist(m, I)^2) for a determinant-one matrix."""
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    if abs(np.linalg.det(m) - 1.0) > 1e-6:
        raise DimError("trace bound needs determinant one")
    lhs = abs(np.trace(m) - d)
    rhs = (2.0 ** d + math.factorial(d)) * dist(m, np.eye(d)) ** 2
    return lhs, rhs


# --- full compile pipeline ---

@dataclass(eq=False)
class CompileReport:
    """Outcome of one end-to-end inverse-free compilation."""

    target: np.ndarray
    eps: float
    indices: tuple[int, ...]
    error: float
    base_error: float
    base_length: int
    inverted_extras: int
    refine_errors: dict[int, float]
    refine_lengths: dict[int, int]
    refine_traces: dict[int, RefineTrace]

    @property
    def length(self) -> int:
        return len(self.indices)

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "length": self.length,
            "error": self.error,
            "base_error": self.base_error,
            "base_length": self.base_length,
            "inverted_extras": self.inverted_extras,
            "refine_errors": {str(k): v for k, v in self.refine_errors.items()},
            "refine_lengths": {str(k): v for k, v in self.refine_lengths.items()},
            "refine_traces": {str(k): t.as_dict()
                              for k, t in self.refine_traces.items()},
            "indices": list(self.indices),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def compile_target(gs: GateSet, target, eps: float, params: SKParams,
                   refine_net: EpsNet) -> CompileReport:
    """Compile target to an inverse-free word with error at most eps.

    Stage 1 runs the classical commutator recursion over generators plus
    formal inverses at eps / 2.  Stage 2 rewrites inverted irrep tokens
    through the group table.  Stage 3 replaces each of the m remaining
    inverted extra-gate tokens by a refined inverse word at (eps / 2) / m,
    sharing one refinement per distinct gate; the triangle inequality over
    unitary substitutions bounds the total drift.

    Error is reported up to a global d-th root of unity: the table rewrite
    of a projective irrep shifts the product by exactly such a phase.
    """
    target = np.asarray(target, dtype=complex)
    base = sk_compile(gs, target, eps / 2.0, params)
    base_error = dist(base.product, target)
    base = rewrite_irrep_inverses(gs, base)

    inverted = [i for i, inv in base.tokens if inv]
    m = len(inverted)
    refine_errors: dict[int, float] = {}
    refine_lengths: dict[int, int] = {}
    refine_traces: dict[int, RefineTrace] = {}
    subs: dict[int, GateWord] = {}
    if m:
        eps_each = (eps / 2.0) / m
        for i in sorted(set(inverted)):
            w, achieved, tr = refine_inverse(gs, refine_net, i, eps_each)
            subs[i] = w
            refine_errors[i] = achieved
            refine_lengths[i] = w.length
            refine_traces[i] = tr

    indices: list[int] = []
    for i, inv in base.tokens:
        if inv:
            indices.extend(subs[i].indices)
        else:
            indices.append(i)
    word = make_word(gs.matrices, tuple(indices))
    error = aligned_dist(word.product, target, gs.phase_candidates)
    return CompileReport(
        target=target,
        eps=eps,
        indices=word.indices,
        error=error,
        base_error=base_error,
        base_length=base.length,
        inverted_extras=m,
        refine_errors=refine_errors,
        refine_lengths=refine_lengths,
        refine_traces=refine_traces,
    )


# --- ordering scan ---

def scan_orderings(rep: FiniteGroupRep, samples: int = 24,
                   eps_values=(3e-4, 1e-4), rng=None,
                   vanish_factor: float = 1e-3):
    """Measure the quadratic error coefficient per group-element ordering.

    The identity factor stays last; the other n - 1 elements are permuted.
    For each ordering the coefficient is the mean over random near-identity
    perturbations W = exp(i eps H) of dist(f(W), I) / eps^2.  Returns a list
    of (ordering, coefficient) sorted ascending and the vanish threshold
    (vanish_factor times the median coefficient).
    """
    n = rep.order
    if math.factorial(n - 1) > 720:
        raise GroupTooLarge(
            f"ordering scan enumerates (n-1)! = {math.factorial(n - 1)} orders"
        )
    if rng is None:
        rng = np.random.default_rng(0)
    eye = np.eye(rep.dim)
    perturbations = []
    for _ in range(samples):
        h = random_traceless_hermitian(rep.dim, rng)
        perturbations.append(h / op_norm(h))
    results = []
    for perm in itertools.permutations(range(1, n)):
        order = perm + (0,)
        coeffs = []
        for h in perturbations:
            for eps in eps_values:
                w = expm(1j * eps * h)
                f = symmetrize_matrix(rep, w, order)
                r = aligned_dist(f, eye, rep.phase_candidates)
                coeffs.append(r / eps ** 2)
        results.append((order, float(np.mean(coeffs))))
    results.sort(key=lambda t: t[1])
    med = float(np.median([c for _, c in results]))
    return results, vanish_factor * med
