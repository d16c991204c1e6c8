"""Gate-set documents, gate words and the refinement threshold constant.

A gate set is described by a JSON document:

    {
      "dimension": 2,
      "mode": "su",                  # or "sl"
      "tolerance": 1e-9,             # optional, default 1e-9
      "sl_radius": 1.5,              # required in sl mode
      "irrep": {"builtin": "pauli"}  # or {"matrices": [[...], ...]}
      "gates": [{"name": "H", "matrix": [[re, im], ...]}]
    }

Matrix literals are row-major lists of [re, im] pairs, d*d entries long.
The generator list of the parsed GateSet is the irrep's elements (identity
first) followed by the extra gates in file order.  In su mode every input
matrix is passed through su_normalize, so gates may be given as plain
unitaries (H, T, ...) and are stored as their determinant-1 representatives.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BallError, ClassError, GroupError, IrrepError, SchemaError
from .finitegroup import (
    BUILTIN_GROUPS,
    FiniteGroupRep,
    build_builtin,
    builtin_matrices,
    infer_group,
)
from .linalg import (
    DEFAULT_TOL,
    MatrixClass,
    check_class,
    dist,
    require_matrix,
    su_normalize,
)


@dataclass(frozen=True, eq=False)
class GateWord:
    """A word over a gate set's generators; product cached left-to-right."""

    indices: tuple[int, ...]
    product: np.ndarray

    @property
    def length(self) -> int:
        return len(self.indices)


def word_product(gens: np.ndarray, indices) -> np.ndarray:
    d = gens.shape[1]
    p = np.eye(d, dtype=complex)
    for i in indices:
        p = p @ gens[i]
    return p


def make_word(gens: np.ndarray, indices) -> GateWord:
    idx = tuple(int(i) for i in indices)
    return GateWord(idx, word_product(gens, idx))


def concat_words(a: GateWord, b: GateWord) -> GateWord:
    return GateWord(a.indices + b.indices, a.product @ b.product)


@dataclass(frozen=True, eq=False)
class GateSet:
    """Parsed gate set: a finite-group irrep plus extra generators."""

    dim: int
    mode: str                      # "su" | "sl"
    names: tuple[str, ...]
    matrices: np.ndarray           # (n_gens, d, d)
    rep: FiniteGroupRep
    irrep_indices: tuple[int, ...]  # generator index of rep element r
    extra_indices: tuple[int, ...]
    tolerance: float
    sl_radius: float | None
    fingerprint: str
    source: dict

    @property
    def gen_count(self) -> int:
        return len(self.names)

    @property
    def phase_candidates(self) -> tuple[complex, ...]:
        return self.rep.phase_candidates

    def matrix(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def name_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"no generator named {name!r}") from None


def eps0_constant(gs_or_rep) -> float:
    """Refinement threshold 1 / (6 |G| (d-1)! + 2 |G|^2).

    A seed error at or below this value makes one averaging pass strictly
    contract, and the iteration then converges doubly exponentially.
    """
    rep = gs_or_rep.rep if isinstance(gs_or_rep, GateSet) else gs_or_rep
    n, d = rep.order, rep.dim
    return 1.0 / (6 * n * math.factorial(d - 1) + 2 * n * n)


def parse_matrix_literal(entries, d: int, where: str) -> np.ndarray:
    if not isinstance(entries, list) or len(entries) != d * d:
        raise SchemaError(f"{where}: matrix literal must have {d * d} [re, im] pairs")
    vals = []
    for pair in entries:
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) for x in pair)):
            raise SchemaError(f"{where}: entries must be [re, im] pairs")
        vals.append(complex(pair[0], pair[1]))
    return np.array(vals, dtype=complex).reshape(d, d)


def matrix_to_literal(m: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(m).reshape(-1)]


def _canonical_doc(dim, mode, tol, sl_radius, irrep_mats, names, gate_mats) -> dict:
    return {
        "dimension": dim,
        "mode": mode,
        "tolerance": tol,
        "sl_radius": sl_radius,
        "irrep": [[[round(v, 12) for v in pair] for pair in matrix_to_literal(m)]
                  for m in irrep_mats],
        "gates": [
            {"name": n, "matrix": [[round(v, 12) for v in pair]
                                   for pair in matrix_to_literal(m)]}
            for n, m in zip(names, gate_mats)
        ],
    }


def fingerprint_of(doc: dict) -> str:
    return hashlib.sha256(
        json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def parse_gateset(doc) -> GateSet:
    """Parse and validate a gate-set document (dict or JSON string)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaError("gate-set document must be a JSON object")

    dim = doc.get("dimension")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError("'dimension' must be a positive integer")
    mode = doc.get("mode")
    if mode not in ("su", "sl"):
        raise SchemaError("'mode' must be 'su' or 'sl'")
    tol = doc.get("tolerance", DEFAULT_TOL)
    if not isinstance(tol, (int, float)) or tol <= 0:
        raise SchemaError("'tolerance' must be a positive number")
    tol = float(tol)
    sl_radius = doc.get("sl_radius")
    if mode == "sl":
        if not isinstance(sl_radius, (int, float)) or sl_radius <= 0:
            raise SchemaError("sl mode requires a positive 'sl_radius'")
        sl_radius = float(sl_radius)
    else:
        sl_radius = None

    klass = MatrixClass.SPECIAL_UNITARY if mode == "su" else MatrixClass.SPECIAL_LINEAR

    def prepare(m, where):
        m = require_matrix(m)
        if m.shape[0] != dim:
            raise SchemaError(f"{where}: expected {dim}x{dim}, got {m.shape[0]}x{m.shape[1]}")
        if mode == "su":
            try:
                m = su_normalize(m, tol=tol)
            except ClassError as e:
                raise ClassError(f"{where}: {e}") from None
        try:
            return check_class(m, klass, tol=tol)
        except ClassError as e:
            raise ClassError(f"{where}: {e}") from None

    irrep_sec = doc.get("irrep")
    if not isinstance(irrep_sec, dict):
        raise SchemaError("'irrep' must be an object with 'builtin' or 'matrices'")
    if "builtin" in irrep_sec:
        name = irrep_sec["builtin"]
        if name not in BUILTIN_GROUPS:
            raise SchemaError(f"unknown builtin irrep {name!r}")
        try:
            raw, el_names = builtin_matrices(name, dim)
            if raw[0].shape[0] != dim:
                raise IrrepError(
                    f"builtin {name!r} has dimension {raw[0].shape[0]}, file says {dim}"
                )
            rep = build_builtin(name, dim, tol=tol)
        except (GroupError, ValueError) as e:
            raise IrrepError(str(e)) from None
    elif "matrices" in irrep_sec:
        entries = irrep_sec["matrices"]
        if not isinstance(entries, list) or not entries:
            raise SchemaError("'irrep.matrices' must be a non-empty list")
        mats = [prepare(parse_matrix_literal(e, dim, f"irrep[{k}]"), f"irrep[{k}]")
                for k, e in enumerate(entries)]
        try:
            rep = infer_group(mats, tol=tol, unitary=(mode == "su"))
        except GroupError as e:
            raise IrrepError(str(e)) from None
        el_names = [f"g{k}" for k in range(rep.order)]
    else:
        raise SchemaError("'irrep' needs either 'builtin' or 'matrices'")

    gates = doc.get("gates", [])
    if not isinstance(gates, list):
        raise SchemaError("'gates' must be a list")
    extra_names, extra_mats = [], []
    for k, g in enumerate(gates):
        if not isinstance(g, dict) or "name" not in g or "matrix" not in g:
            raise SchemaError(f"gates[{k}]: each gate needs 'name' and 'matrix'")
        gname = g["name"]
        if not isinstance(gname, str) or not gname:
            raise SchemaError(f"gates[{k}]: 'name' must be a non-empty string")
        extra_names.append(gname)
        extra_mats.append(prepare(parse_matrix_literal(g["matrix"], dim, f"gate {gname!r}"),
                                  f"gate {gname!r}"))

    names = list(el_names) + extra_names
    if len(set(names)) != len(names):
        raise SchemaError("generator names must be unique")
    matrices = np.concatenate([rep.elements, np.stack(extra_mats)]) if extra_mats \
        else rep.elements.copy()

    if mode == "sl":
        eye = np.eye(dim)
        for n, m in zip(names, matrices):
            r = dist(m, eye)
            if r > sl_radius:
                raise BallError(
                    f"generator {n!r} has dist to I {r:.6f} > sl_radius {sl_radius}"
                )

    canon = _canonical_doc(dim, mode, tol, sl_radius, rep.elements, extra_names,
                           extra_mats)
    return GateSet(
        dim=dim,
        mode=mode,
        names=tuple(names),
        matrices=matrices,
        rep=rep,
        irrep_indices=tuple(range(rep.order)),
        extra_indices=tuple(range(rep.order, len(names))),
        tolerance=tol,
        sl_radius=sl_radius,
        fingerprint=fingerprint_of(canon),
        source=canon,
    )


def load_gateset(path) -> GateSet:
    with open(path, "r", encoding="utf-8") as f:
        return parse_gateset(f.read())
