"""Breadth-first word nets over a generator list, with disk persistence.

The net stores every product of generators up to a word length, deduplicated
in Frobenius distance (which upper-bounds the operator norm, so merging is
conservative: nothing that should stay distinct is merged).  Queries are
exact over the store: the returned word minimises the operator-norm distance
among all stored products, computed with a batched SVD.  For pairs of
SU(2) matrices both singular values of the difference coincide, so the
Frobenius order equals the operator-norm order and a closed-form trace
formula replaces the SVD.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, EmptyNet, FormatError, StaleGateSet
from .gateset import GateSet, GateWord
from .linalg import random_su, unitarity_residual

NET_FORMAT = "irrepsk-net-v1"
DEFAULT_BUDGET = 2_000_000


def extended_generators(gs: GateSet) -> np.ndarray:
    """Generators plus the inverse of every non-identity generator.

    Index n_gens + i holds the inverse of generator i + 1.  Used by the
    inverse-allowed base compiler; the refinement stage never sees these.
    """
    if gs.mode == "su":
        invs = gs.matrices[1:].conj().transpose(0, 2, 1)
    else:
        invs = np.linalg.inv(gs.matrices[1:])
    return np.concatenate([gs.matrices, invs])


def net_fingerprint(gs: GateSet, with_inverses: bool) -> str:
    tag = gs.fingerprint + (":with-inverses" if with_inverses else "")
    return hashlib.sha256(tag.encode()).hexdigest()


@dataclass(eq=False)
class EpsNet:
    """Products of all deduplicated generator words up to word_length."""

    dim: int
    mode: str
    word_length: int
    dedup_tol: float
    fingerprint: str
    gens: np.ndarray                 # (m, d, d)
    words: list[tuple[int, ...]]
    products: np.ndarray             # (n, d, d)
    usable: bool = True
    achieved_density: float | None = None
    _su2_flat_conj: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.words)

    def _is_su2(self) -> bool:
        return self.dim == 2 and self.mode == "su"

    def _su2_cache(self) -> np.ndarray:
        if self._su2_flat_conj is None:
            self._su2_flat_conj = self.products.reshape(len(self.products), -1).conj()
        return self._su2_flat_conj

    def distances_to(self, target: np.ndarray) -> np.ndarray:
        """Operator-norm distance from every stored product to target."""
        if len(self.words) == 0:
            raise EmptyNet("net has no stored words")
        t = np.asarray(target, dtype=complex)
        if self._is_su2() and unitarity_residual(t) < 1e-9 and abs(np.linalg.det(t) - 1) < 1e-9:
            # ||A - B|| = sqrt(2 - Re tr(A^dag B)) when both are in SU(2)
            tr = (self._su2_cache() @ t.reshape(-1)).real
            return np.sqrt(np.maximum(0.0, 2.0 - tr))
        diffs = self.products - t[None, :, :]
        return np.linalg.svd(diffs, compute_uv=False)[:, 0]

    def nearest(self, target) -> tuple[GateWord, float]:
        """Exact nearest stored word; ties resolved by store order, which is
        breadth-first (shortest word first, then generation order)."""
        d = self.distances_to(target)
        i = int(np.argmin(d))
        return GateWord(self.words[i], self.products[i]), float(d[i])


def _vec(mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(len(mats), -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def build_net(gens: np.ndarray, dim: int, mode: str, word_length: int,
              dedup_tol: float, fingerprint: str = "",
              budget: int = DEFAULT_BUDGET) -> EpsNet:
    """Enumerate words breadth-first, keeping first-seen products only.

    A candidate is dropped when its product lies within dedup_tol (Frobenius)
    of anything already stored.  If the budget fills before word_length is
    reached, the partial net is returned with usable=False.
    """
    gens = np.asarray(gens, dtype=complex)
    n_gens = len(gens)
    words: list[tuple[int, ...]] = [()]
    products = np.eye(dim, dtype=complex)[None]
    frontier_w: list[tuple[int, ...]] = [()]
    frontier_p = products
    usable = True
    reached = 0
    for level in range(1, word_length + 1):
        if len(frontier_w) == 0:
            reached = word_length
            break
        cand = np.einsum("fij,mjk->fmik", frontier_p, gens).reshape(-1, dim, dim)
        cand_words = [w + (m,) for w in frontier_w for m in range(n_gens)]
        cv = _vec(cand)
        tree = cKDTree(_vec(products))
        dd, _ = tree.query(cv, k=1, distance_upper_bound=dedup_tol * (1 + 1e-12))
        kept = np.nonzero(dd > dedup_tol)[0]
        if len(kept):
            inner = cKDTree(cv[kept])
            pairs = inner.query_pairs(dedup_tol, output_type="ndarray")
            removed: set[int] = set()
            if len(pairs):
                order = np.lexsort((pairs[:, 1], pairs[:, 0]))
                for a, b in pairs[order]:
                    if int(a) not in removed:
                        removed.add(int(b))
            kept = kept[[i for i in range(len(kept)) if i not in removed]]
        room = budget - len(words)
        if len(kept) > room:
            kept = kept[:room]
            usable = False
        # store products rebuilt one 2-D matmul at a time (parent @ generator):
        # this is the exact recipe load_net replays, so the saved digest is
        # reproducible bit for bit; the einsum block above only drives dedup
        frontier_w = [cand_words[i] for i in kept]
        new_p = np.empty((len(kept), dim, dim), dtype=complex)
        for j, i in enumerate(kept):
            parent = frontier_p[i // n_gens]
            new_p[j] = parent @ gens[i % n_gens]
        frontier_p = new_p
        words.extend(frontier_w)
        products = np.concatenate([products, frontier_p])
        reached = level
        if not usable:
            break
    return EpsNet(
        dim=dim,
        mode=mode,
        word_length=reached,
        dedup_tol=dedup_tol,
        fingerprint=fingerprint,
        gens=gens,
        words=words,
        products=products,
        usable=usable,
    )


def build_gateset_net(gs: GateSet, word_length: int, dedup_tol: float | None = None,
                      with_inverses: bool = False,
                      budget: int = DEFAULT_BUDGET) -> EpsNet:
    from .gateset import eps0_constant

    if dedup_tol is None:
        dedup_tol = eps0_constant(gs) / 10
    gens = extended_generators(gs) if with_inverses else gs.matrices
    return build_net(gens, gs.dim, gs.mode, word_length, dedup_tol,
                     fingerprint=net_fingerprint(gs, with_inverses), budget=budget)


def probe_density(net: EpsNet, probes: int, rng: np.random.Generator) -> float:
    """Empirical covering radius: max over random SU(d) probes of the nearest
    stored distance.  Only meaningful in su mode."""
    worst = 0.0
    for _ in range(probes):
        t = random_su(net.dim, rng)
        _, d = net.nearest(t)
        worst = max(worst, d)
    net.achieved_density = worst
    return worst


def _product_digest(products: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(products.round(10)).tobytes()).hexdigest()


def save_net(net: EpsNet, path) -> None:
    header = {
        "format": NET_FORMAT,
        "fingerprint": net.fingerprint,
        "dim": net.dim,
        "mode": net.mode,
        "word_length": net.word_length,
        "dedup_tol": net.dedup_tol,
        "count": len(net.words),
        "usable": net.usable,
        "achieved_density": net.achieved_density,
        "product_digest": _product_digest(net.products),
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for w in net.words:
            f.write(" ".join(map(str, w)) + "\n")


def load_net(path, gs: GateSet, with_inverses: bool = False) -> EpsNet:
    """Reload a net, recomputing and verifying every product.

    Raises StaleGateSet when the cache was built against a different gate set
    and FormatError on any structural damage.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise FormatError("empty net file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise FormatError(f"bad net header: {e}") from None
    if not isinstance(header, dict) or header.get("format") != NET_FORMAT:
        raise FormatError("not a net cache file")
    expected = net_fingerprint(gs, with_inverses)
    if header.get("fingerprint") != expected:
        raise StaleGateSet(
            "net cache was built for a different gate set "
            f"({str(header.get('fingerprint'))[:12]}... vs {expected[:12]}...)"
        )
    count = header.get("count")
    body = lines[1:]
    if not isinstance(count, int) or len(body) != count:
        raise FormatError(f"expected {count} word lines, found {len(body)}")
    gens = extended_generators(gs) if with_inverses else gs.matrices
    words: list[tuple[int, ...]] = []
    products = np.empty((count, gs.dim, gs.dim), dtype=complex)
    index_of: dict[tuple[int, ...], int] = {}
    for k, line in enumerate(body):
        try:
            w = tuple(int(t) for t in line.split())
        except ValueError:
            raise FormatError(f"line {k + 2}: unparsable word") from None
        if any(i < 0 or i >= len(gens) for i in w):
            raise FormatError(f"line {k + 2}: generator index out of range")
        words.append(w)
        # breadth-first construction stores every word's parent prefix, so the
        # left-to-right fold can reuse it; fall back to a full fold otherwise
        parent = index_of.get(w[:-1]) if w else None
        if parent is not None:
            products[k] = products[parent] @ gens[w[-1]]
        else:
            p = np.eye(gs.dim, dtype=complex)
            for i in w:
                p = p @ gens[i]
            products[k] = p
        index_of[w] = k
    if header.get("product_digest") != _product_digest(products):
        raise FormatError("recomputed products do not match the stored digest")
    return EpsNet(
        dim=gs.dim,
        mode=gs.mode,
        word_length=int(header.get("word_length", 0)),
        dedup_tol=float(header.get("dedup_tol", 0.0)),
        fingerprint=expected,
        gens=gens,
        words=words,
        products=products,
        usable=bool(header.get("usable", True)),
        achieved_density=header.get("achieved_density"),
    )


def auto_net(gs: GateSet, target_density: float, probes: int,
             rng: np.random.Generator, with_inverses: bool = False,
             start_length: int = 4, max_length: int = 40,
             budget: int = DEFAULT_BUDGET) -> EpsNet:
    """Grow word_length until the probed density reaches target_density.

    Raises BudgetExceeded if the store fills up first.
    """
    length = start_length
    while True:
        net = build_gateset_net(gs, length, with_inverses=with_inverses, budget=budget)
        if not net.usable:
            raise BudgetExceeded(
                f"budget {budget} filled at word length {net.word_length} "
                f"with density still above {target_density}"
            )
        density = probe_density(net, probes, rng)
        if density <= target_density:
            return net
        if length >= max_length:
            raise BudgetExceeded(
                f"word length cap {max_length} reached, density {density:.4f} "
                f"> target {target_density}"
            )
        length += 2
