"""Inverse-allowed Solovay-Kitaev base compiler for SU(2).

This stage is deliberately classical: it compiles over the gate set together
with the inverses of all generators, and its output is then post-processed
into an inverse-free word by the refinement stage.  Tokens are
(generator_index, inverted) pairs; inverted irrep tokens can be rewritten
in place via the group's inverse table, and inverted extra-gate tokens are
what the refinement stage replaces.

The group-commutator step uses the exact SU(2) construction: a target
rotation by angle theta equals the commutator A B A^dag B^dag of two
rotations by phi about orthogonal axes, with sin^2(phi/2) = sin(theta/4).
Both factors tilt toward the identity like sqrt(theta), which is what makes
the recursion contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimUnsupported, NetTooCoarse, TooFar
from .gateset import GateSet, GateWord
from .net import EpsNet, build_gateset_net, extended_generators
from .linalg import dist

Token = tuple[int, bool]


@dataclass(frozen=True, eq=False)
class SymbolWord:
    """Word over generators and formal generator inverses."""

    tokens: tuple[Token, ...]
    product: np.ndarray

    @property
    def length(self) -> int:
        return len(self.tokens)

    @property
    def inverted_count(self) -> int:
        return sum(1 for _, inv in self.tokens if inv)


def token_matrix(gs: GateSet, token: Token) -> np.ndarray:
    i, inverted = token
    m = gs.matrices[i]
    if not inverted:
        return m
    return m.conj().T if gs.mode == "su" else np.linalg.inv(m)


def symbol_product(gs: GateSet, tokens) -> np.ndarray:
    p = np.eye(gs.dim, dtype=complex)
    for t in tokens:
        p = p @ token_matrix(gs, t)
    return p


def make_symbol_word(gs: GateSet, tokens) -> SymbolWord:
    tk = tuple((int(i), bool(v)) for i, v in tokens)
    return SymbolWord(tk, symbol_product(gs, tk))


def invert_symbol_word(w: SymbolWord) -> SymbolWord:
    tokens = tuple((i, not v) for i, v in reversed(w.tokens))
    return SymbolWord(tokens, np.conj(w.product.T))


# --- SU(2) <-> quaternion helpers ---

def su2_to_quaternion(u: np.ndarray) -> np.ndarray:
    """Components (w, x, y, z) with u = w I - i (x X + y Y + z Z)."""
    return np.array([u[0, 0].real, -u[0, 1].imag, -u[0, 1].real, -u[0, 0].imag])


def quaternion_to_su2(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([[w - 1j * z, -y - 1j * x],
                     [y - 1j * x, w + 1j * z]], dtype=complex)


def axis_angle(u: np.ndarray) -> tuple[float, np.ndarray]:
    """Rotation angle in [0, 2*pi] and unit axis of an SU(2) element."""
    q = su2_to_quaternion(u)
    theta = 2.0 * float(np.arccos(np.clip(q[0], -1.0, 1.0)))
    v = q[1:]
    n = float(np.linalg.norm(v))
    if n < 1e-15:
        return theta, np.array([0.0, 0.0, 1.0])
    return theta, v / n


def rotation(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return quaternion_to_su2(np.concatenate([[np.cos(angle / 2)],
                                             np.sin(angle / 2) * axis]))


def balanced_commutator_decompose(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact A, B in SU(2) with A B A^dag B^dag = delta.

    Requires dist(delta, I) <= 1/4.  Both factors are rotations by
    phi = 2 arcsin(sqrt(sin(theta/4))) about a conjugated orthogonal axis
    pair, so dist(A, I) and dist(B, I) shrink like sqrt(dist(delta, I)).
    """
    if delta.shape != (2, 2):
        raise DimUnsupported("commutator decomposition is SU(2)-only")
    gap = dist(delta, np.eye(2))
    if gap > 0.25 + 1e-12:
        raise TooFar(f"dist(delta, I) = {gap:.4f} > 1/4")
    theta, n_axis = axis_angle(delta)
    if theta < 1e-14:
        return np.eye(2, dtype=complex), np.eye(2, dtype=complex)
    phi = 2.0 * float(np.arcsin(np.sqrt(np.sin(theta / 4.0))))
    v = rotation([1.0, 0.0, 0.0], phi)
    w = rotation([0.0, 1.0, 0.0], phi)
    c = v @ w @ v.conj().T @ w.conj().T
    _, m_axis = axis_angle(c)
    cross = np.cross(m_axis, n_axis)
    dotp = float(np.dot(m_axis, n_axis))
    s = float(np.linalg.norm(cross))
    if s < 1e-14:
        if dotp > 0:
            sim = np.eye(2, dtype=complex)
        else:
            perp = np.cross(n_axis, [1.0, 0.0, 0.0])
            if np.linalg.norm(perp) < 1e-7:
                perp = np.cross(n_axis, [0.0, 1.0, 0.0])
            sim = rotation(perp, np.pi)
    else:
        sim = rotation(cross / s, float(np.arctan2(s, dotp)))
    a = sim @ v @ sim.conj().T
    b = sim @ w @ sim.conj().T
    return a, b


@dataclass(eq=False)
class SKParams:
    """Base-compiler configuration: the inverse-closed net and a depth cap.

    eps_base is the measured base-case accuracy (probed net density) when
    known; the commutator step needs it at or below 1/32, and a probed value
    above that is rejected up front instead of failing mid-recursion.
    """

    net: EpsNet
    max_depth: int = 10
    eps_base: float | None = None

    def __post_init__(self):
        if len(self.net) == 0:
            raise NetTooCoarse("base net is empty")
        if self.eps_base is not None and self.eps_base > 1.0 / 32.0:
            raise NetTooCoarse(
                f"probed base density {self.eps_base:.4f} exceeds 1/32"
            )


def base_params(gs: GateSet, word_length: int, budget: int = 2_000_000,
                max_depth: int = 10, probes: int = 0, rng=None) -> SKParams:
    """Build the inverse-closed base net for sk_compile.

    With probes > 0 the net density is measured on that many random targets
    and recorded as eps_base (rejecting nets coarser than 1/32).
    """
    net = build_gateset_net(gs, word_length, with_inverses=True, budget=budget)
    eps_base = None
    if probes > 0:
        from .net import probe_density
        if rng is None:
            rng = np.random.default_rng(0)
        eps_base = probe_density(net, probes, rng)
    return SKParams(net=net, max_depth=max_depth, eps_base=eps_base)


def _tokens_from_net_word(gs: GateSet, w: GateWord) -> tuple[Token, ...]:
    n = gs.gen_count
    return tuple((i, False) if i < n else (i - n + 1, True) for i in w.indices)


def sk_compile(gs: GateSet, target, eps: float, params: SKParams) -> SymbolWord:
    """Approximate a SU(2) target to operator-norm eps over gens and inverses.

    Iteratively deepens the standard commutator recursion until the measured
    error passes eps; raises NetTooCoarse if the depth cap is hit first, and
    DimUnsupported away from d = 2.
    """
    if gs.dim != 2 or gs.mode != "su":
        raise DimUnsupported("the base compiler handles d = 2, su mode only")
    target = np.asarray(target, dtype=complex)

    def base_case(u: np.ndarray) -> SymbolWord:
        gw, _ = params.net.nearest(u)
        return SymbolWord(_tokens_from_net_word(gs, gw), gw.product)

    def recurse(u: np.ndarray, depth: int) -> SymbolWord:
        if depth == 0:
            return base_case(u)
        w1 = recurse(u, depth - 1)
        a, b = balanced_commutator_decompose(u @ w1.product.conj().T)
        wa = recurse(a, depth - 1)
        wb = recurse(b, depth - 1)
        wa_inv = invert_symbol_word(wa)
        wb_inv = invert_symbol_word(wb)
        tokens = wa.tokens + wb.tokens + wa_inv.tokens + wb_inv.tokens + w1.tokens
        product = (wa.product @ wb.product @ wa_inv.product
                   @ wb_inv.product @ w1.product)
        return SymbolWord(tokens, product)

    best = None
    for depth in range(params.max_depth + 1):
        try:
            word = recurse(target, depth)
        except TooFar as e:
            raise NetTooCoarse(
                f"base approximation too coarse for the commutator step: {e}"
            ) from e
        err = dist(word.product, target)
        if best is None or err < best[1]:
            best = (word, err)
        if err <= eps:
            return word
    raise NetTooCoarse(
        f"depth cap {params.max_depth} reached at error {best[1]:.3e} > {eps:.3e}; "
        "the base net is too coarse for this tolerance"
    )


def rewrite_irrep_inverses(gs: GateSet, word: SymbolWord) -> SymbolWord:
    """Replace every inverted irrep token by its table inverse.

    The product is unchanged up to a global phase (exactly unchanged for a
    genuine irrep); afterwards only extra gates carry inversion marks.
    """
    rep = gs.rep
    irrep_set = set(gs.irrep_indices)
    tokens = []
    for i, inverted in word.tokens:
        if inverted and i in irrep_set:
            tokens.append((int(gs.irrep_indices[rep.inverse_index[i]]), False))
        else:
            tokens.append((i, inverted))
    return make_symbol_word(gs, tokens)
