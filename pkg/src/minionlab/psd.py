"""Gram-matrix feasibility: exact affine pre-reduction, then projections.

A Gram problem constrains the pairwise inner products of a family of labelled
vectors: some pairs are forced orthogonal, some signed sums of vectors are
identified with each other, and some groups of squared norms must sum to one.

The solve is two-phase.  Phase one works exactly over the rationals: vector
identifications are Gauss-eliminated, forced-zero vectors are propagated to a
fixpoint, and contradictions (a unit group whose members all collapse to the
zero vector, or affinely conflicting Gram constraints) are returned as exact
rejections with a derivation trace.  Phase two is numeric: alternating
projections between the affine subspace of admissible Gram matrices (exact
least-squares projector, precomputed over the rationals and applied in
float) and the cone of positive semidefinite matrices (eigenvalue clamping).
Numeric stalls are reported as an explicitly non-rigorous outcome.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

import numpy as np

from .errors import NotPSD, WrongKind
from .rationals import R0, R1, rat, rat_to_str

Label = Hashable


@dataclass(frozen=True)
class GramProblem:
    """Feasibility data for a family of labelled vectors."""

    labels: tuple[Label, ...]
    unit_groups: tuple[tuple[Label, ...], ...]
    zero_pairs: tuple[tuple[Label, Label], ...]
    identifications: tuple[tuple[tuple[Label, object], ...], ...]
    omega: int


@dataclass
class Inconsistent:
    """Exact infeasibility of the affine phase, with its derivation trace."""

    steps: list
    reason: str

    def to_doc(self) -> dict:
        return {"reason": self.reason, "steps": [list(map(str, s)) for s in self.steps]}


@dataclass
class ReducedGramProblem:
    labels: tuple[Label, ...]
    reps: tuple[Label, ...]
    combos: dict  # label -> {rep: exact coefficient}
    constraints: list  # (dict[(si, ti) with si <= ti] -> exact coeff, rhs)
    omega: int
    steps: list = field(default_factory=list)


@dataclass
class SoSWitness:
    """An accepted Gram matrix together with extraction diagnostics."""

    labels: tuple[Label, ...]
    gram: np.ndarray
    residual: float
    min_eig: float
    iterations: int
    vectors: Optional[dict] = None

    def to_doc(self) -> dict:
        return {
            "labels": [str(l) for l in self.labels],
            "gram": [float(v) for v in self.gram.reshape(-1)],
            "residual": self.residual,
            "min_eig": self.min_eig,
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True)


@dataclass
class NumericReject:
    """A stalled numeric solve; explicitly non-rigorous."""

    residual: float
    iterations: int
    trace: list

    def to_doc(self) -> dict:
        return {
            "rigorous": False,
            "residual": self.residual,
            "iterations": self.iterations,
            "residual_trace": [[int(i), float(r)] for i, r in self.trace],
        }


@dataclass(frozen=True)
class PSDConfig:
    accept_tol: float = 1e-8
    reject_floor: float = 1e-4
    stall_window: int = 500
    max_iter: int = 100_000


# -- phase one: exact affine reduction -------------------------------------------


def _reduce_row(row: dict, pivot_rows: dict, label_order: dict) -> dict:
    row = dict(row)
    while True:
        hit = None
        for lab in row:
            if lab in pivot_rows:
                hit = lab
                break
        if hit is None:
            return {k: v for k, v in row.items() if v != 0}
        c = row.pop(hit)
        for k, v in pivot_rows[hit].items():
            if k != hit:
                row[k] = row.get(k, R0) - c * v
        row = {k: v for k, v in row.items() if v != 0}


def _insert_pivot(row: dict, pivot_rows: dict, label_order: dict) -> None:
    # eliminate the latest-registered label so early labels stay representatives
    pivot = max(row, key=lambda lab: label_order[lab])
    inv = R1 / row[pivot]
    norm = {k: v * inv for k, v in row.items()}
    for other, prow in list(pivot_rows.items()):
        if pivot in prow:
            c = prow.pop(pivot)
            for k, v in norm.items():
                if k != pivot:
                    prow[k] = prow.get(k, R0) - c * v
            pivot_rows[other] = {k: v for k, v in prow.items() if v != 0 or k == other}
    pivot_rows[pivot] = norm


def affine_reduce(problem: GramProblem):
    """Exact consequence closure of the vector identifications.

    Returns a :class:`ReducedGramProblem`, or :class:`Inconsistent` when the
    closure contradicts a unit-norm group (all members forced to the zero
    vector) or the Gram constraints are affinely contradictory.
    """
    label_order = {lab: i for i, lab in enumerate(problem.labels)}
    pivot_rows: dict = {}
    steps: list = []

    def add_relation(row: dict, note) -> None:
        reduced = _reduce_row(row, pivot_rows, label_order)
        if reduced:
            _insert_pivot(reduced, pivot_rows, label_order)
            steps.append(note)

    for ident in problem.identifications:
        row: dict = {}
        for lab, c in ident:
            row[lab] = row.get(lab, R0) + rat(c)
        row = {lab: c for lab, c in row.items() if c != 0}
        if row:
            add_relation(row, ("identify", _fmt_row(ident)))

    def combo(lab: Label) -> dict:
        if lab not in pivot_rows:
            return {lab: R1}
        return {k: -v for k, v in pivot_rows[lab].items() if k != lab}

    # propagate forced-zero vectors to a fixpoint
    while True:
        new_rows = []
        for l1, l2 in problem.zero_pairs:
            u, w = combo(l1), combo(l2)
            if not u or not w:
                continue
            ratio = _proportionality(u, w)
            if ratio is not None:
                # <u, w> = ratio * ||w||^2 = 0 with ratio != 0 forces w = 0
                new_rows.append((dict(w), ("zero-norm", str(l1), str(l2))))
        grew = False
        for row, note in new_rows:
            reduced = _reduce_row(row, pivot_rows, label_order)
            if reduced:
                _insert_pivot(reduced, pivot_rows, label_order)
                steps.append(note)
                grew = True
        if not grew:
            break

    for group in problem.unit_groups:
        if all(not combo(lab) for lab in group):
            steps.append(("unit-group-empty", _fmt_labels(group)))
            return Inconsistent(steps, "a unit-norm group collapsed to the zero vector")

    reps_set: set = set()
    combos = {lab: combo(lab) for lab in problem.labels}
    for c in combos.values():
        reps_set.update(c)
    reps = tuple(sorted(reps_set, key=lambda lab: label_order[lab]))
    rep_index = {lab: i for i, lab in enumerate(reps)}

    def bilinear(u: dict, w: dict) -> dict:
        out: dict = {}
        for s, cs in u.items():
            for t, ct in w.items():
                si, ti = rep_index[s], rep_index[t]
                key = (si, ti) if si <= ti else (ti, si)
                out[key] = out.get(key, R0) + cs * ct
        return {k: v for k, v in out.items() if v != 0}

    constraints: list = []
    seen = set()

    def push(coeffs: dict, rhs) -> Optional[Inconsistent]:
        if not coeffs:
            if rhs != 0:
                steps.append(("empty-constraint", rat_to_str(rhs)))
                return Inconsistent(steps, "a Gram constraint reduced to 0 = nonzero")
            return None
        key = (tuple(sorted(coeffs.items())), rhs)
        if key not in seen:
            seen.add(key)
            constraints.append((coeffs, rat(rhs)))
        return None

    for l1, l2 in problem.zero_pairs:
        bad = push(bilinear(combos[l1], combos[l2]), 0)
        if bad:
            return bad
    for group in problem.unit_groups:
        acc: dict = {}
        for lab in group:
            for k, v in bilinear(combos[lab], combos[lab]).items():
                acc[k] = acc.get(k, R0) + v
        bad = push({k: v for k, v in acc.items() if v != 0}, 1)
        if bad:
            return bad

    return ReducedGramProblem(problem.labels, reps, combos, constraints, problem.omega, steps)


def _proportionality(u: dict, w: dict):
    """The scalar r with u = r*w, or None if the combos are not proportional."""
    if set(u) != set(w):
        return None
    ratio = None
    for k, uv in u.items():
        r = uv / w[k]
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio


def _fmt_row(ident) -> str:
    return " + ".join(f"{rat_to_str(rat(c))}*{lab}" for lab, c in ident)


def _fmt_labels(group) -> str:
    return ", ".join(str(lab) for lab in group)


# -- phase two: alternating projections -------------------------------------------


class _AffineProjector:
    """Exact least-squares projector onto the admissible affine subspace.

    Constraint rows are made linearly independent by exact Gaussian
    elimination (detecting contradictions on the way); the normal-equation
    inverse is computed once over the rationals and then applied in float.
    """

    def __init__(self, n: int, constraints: Sequence[tuple[dict, object]]):
        self.n = n
        # exact independence filter over the symmetric-pair coordinates;
        # a row reducing to 0 = nonzero proves the subspace empty
        pivots: dict = {}
        kept_rows: list[tuple[dict, object]] = []
        self.contradiction = False
        for coeffs, rhs in constraints:
            original = {k: rat(v) for k, v in coeffs.items()}
            row = dict(original)
            r = rat(rhs)
            while row:
                lead = min(row)
                if lead not in pivots:
                    break
                prow, prhs = pivots[lead]
                c = row[lead] / prow[lead]
                for k, v in prow.items():
                    row[k] = row.get(k, R0) - c * v
                r = r - c * prhs
                row = {k: v for k, v in row.items() if v != 0}
            if row:
                pivots[min(row)] = (row, r)
                kept_rows.append((original, rat(rhs)))
            elif r != 0:
                self.contradiction = True
                self.rows = []
                return
        self.rows = kept_rows
        m = len(kept_rows)
        # exact normal matrix under the Frobenius geometry of symmetric matrices
        normal = [[R0] * m for _ in range(m)]
        for i, (ri, _) in enumerate(kept_rows):
            for j in range(i, m):
                rj = kept_rows[j][0]
                small, big = (ri, rj) if len(ri) <= len(rj) else (rj, ri)
                acc = R0
                for key, v in small.items():
                    if key in big:
                        w = R1 if key[0] == key[1] else rat(2)
                        acc += w * v * big[key]
                normal[i][j] = acc
                normal[j][i] = acc
        inv = _invert_exact(normal)
        self.normal_inv = np.array([[float(v) for v in r] for r in inv]) if m else np.zeros((0, 0))
        # dense float coefficient matrices
        self.c_mats = np.zeros((m, n, n))
        self.rhs = np.zeros(m)
        for i, (row, r) in enumerate(kept_rows):
            self.rhs[i] = float(r)
            for (s, t), v in row.items():
                fv = float(v)
                if s == t:
                    self.c_mats[i, s, s] += fv
                else:
                    self.c_mats[i, s, t] += fv / 2.0
                    self.c_mats[i, t, s] += fv / 2.0

    def violation(self, G: np.ndarray) -> float:
        if not len(self.rows):
            return 0.0
        v = np.einsum("rij,ij->r", self.c_mats, G) - self.rhs
        return float(np.max(np.abs(v))) if v.size else 0.0

    def project(self, G: np.ndarray) -> np.ndarray:
        if not len(self.rows):
            return G
        v = np.einsum("rij,ij->r", self.c_mats, G) - self.rhs
        alpha = self.normal_inv @ v
        return G - np.einsum("r,rij->ij", alpha, self.c_mats)


def _invert_exact(matrix: list[list]) -> list[list]:
    m = len(matrix)
    aug = [[rat(v) for v in row] + [R1 if i == j else R0 for j in range(m)]
           for i, row in enumerate(matrix)]
    for col in range(m):
        piv = next(r for r in range(col, m) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = R1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def psd_feasibility(
    reduced: ReducedGramProblem,
    cfg: PSDConfig = PSDConfig(),
    warm_start: Optional[np.ndarray] = None,
):
    """Projection iterations on the reduced Gram problem.

    Alternates between the exact affine projector and the semidefinite cone
    (eigenvalue clamping) in the Douglas-Rachford arrangement, which handles
    the tangential geometry of boundary-only feasible sets far better than
    plain alternation.  The residual reported with an accept is measured on
    the returned matrix, so a warm start (for instance the integral Gram
    matrix of a classical solution) is certified rather than trusted.

    Returns an (accept) :class:`SoSWitness`, a (rigorous) :class:`Inconsistent`
    when the affine subspace is exactly empty, or a :class:`NumericReject`.
    """
    n = len(reduced.reps)
    projector = _AffineProjector(n, reduced.constraints)
    if projector.contradiction:
        steps = reduced.steps + [("affine-contradiction", "gram constraints")]
        return Inconsistent(steps, "the Gram constraints are affinely contradictory")
    if n == 0:
        return SoSWitness(reduced.reps, np.zeros((0, 0)), 0.0, 0.0, 0)
    z = np.array(warm_start, dtype=float) if warm_start is not None else np.eye(n) / n
    trace: list = []
    best = np.inf
    best_at = 0
    it = 0
    residual = np.inf
    while it < cfg.max_iter:
        it += 1
        xa = projector.project(z)
        lam, vec = np.linalg.eigh((xa + xa.T) / 2.0)
        neg = max(0.0, float(-lam[0])) if lam.size else 0.0
        clamped = np.clip(lam, 0.0, None)
        P = (vec * clamped) @ vec.T
        aff = projector.violation(P)
        residual = max(neg, aff)
        if it % 25 == 0 or residual <= cfg.accept_tol or it <= 2:
            trace.append((it, residual))
        if residual <= cfg.accept_tol:
            min_eig = float(clamped[0]) if clamped.size else 0.0
            return SoSWitness(reduced.reps, P, residual, min_eig, it)
        if residual < best * 0.99:
            best, best_at = residual, it
        if it - best_at > cfg.stall_window and residual >= cfg.reject_floor:
            trace.append((it, residual))
            return NumericReject(residual, it, trace)
        # reflect through the affine point, project back onto the cone
        reflected = 2.0 * xa - z
        lam_r, vec_r = np.linalg.eigh((reflected + reflected.T) / 2.0)
        xb = (vec_r * np.clip(lam_r, 0.0, None)) @ vec_r.T
        z = z + (xb - xa)
    trace.append((it, residual))
    return NumericReject(residual, it, trace)


def gram_to_vectors(G: np.ndarray, rank_tol: float = 1e-9) -> np.ndarray:
    """Rows of a factor V with V V^T = G, via eigendecomposition.

    Raises NotPSD when an eigenvalue is below ``-rank_tol``; eigenvalues below
    the tolerance are dropped, so the embedding dimension equals the numeric
    rank.
    """
    lam, vec = np.linalg.eigh((G + G.T) / 2.0)
    if lam.size and lam[0] < -rank_tol:
        raise NotPSD(f"eigenvalue {lam[0]} below -{rank_tol}")
    keep = lam > rank_tol
    if not np.any(keep):
        return np.zeros((G.shape[0], 1))
    return vec[:, keep] * np.sqrt(lam[keep])


def expand_vectors(reduced: ReducedGramProblem, factor: np.ndarray) -> dict:
    """Vectors for every original label, via the exact elimination combos."""
    out = {}
    dim = factor.shape[1]
    rep_index = {lab: i for i, lab in enumerate(reduced.reps)}
    for lab in reduced.labels:
        v = np.zeros(dim)
        for repl, c in reduced.combos[lab].items():
            v += float(c) * factor[rep_index[repl]]
        out[lab] = v
    return out


# -- structural fact checks on extracted vectors -----------------------------------


@dataclass
class FactReport:
    checked: int
    violations: list
    max_error: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_doc(self) -> dict:
        return {
            "checked": self.checked,
            "max_error": self.max_error,
            "violations": [list(map(str, v)) for v in self.violations],
        }


def check_sdp_facts(vectors: dict, X, A, tol: float = 1e-6) -> FactReport:
    """Consequences every exact solution of the basic vector relaxation obeys.

    (i) the vectors of one variable sum to a unit vector; (ii) squared norms
    within one constraint sum to one, as does the norm of their sum; (iii)
    mixed products match marginal mass; (iv) with the full binary relation
    present, the per-variable sums agree across variables.
    """
    violations = []
    max_err = 0.0
    checked = 0

    def note(kind, where, err):
        nonlocal max_err, checked
        checked += 1
        max_err = max(max_err, err)
        if err > tol:
            violations.append((kind, where, err))

    sums = {}
    for x in X.domain:
        s = sum((vectors[("v", x, a)] for a in A.domain), start=np.zeros_like(next(iter(vectors.values()))))
        sums[x] = s
        note("unit-variable-sum", x, abs(float(s @ s) - 1.0))
    for sym in X.signature.names():
        for xt in X.tuples(sym):
            vs = [vectors[("c", sym, xt, at)] for at in A.tuples(sym)]
            total = sum(vs[1:], start=vs[0]) if vs else np.zeros(1)
            sq = sum(float(v @ v) for v in vs)
            note("constraint-mass", (sym, xt), abs(sq - 1.0))
            note("constraint-sum-norm", (sym, xt), abs(float(total @ total) - 1.0))
            r = X.signature.arity(sym)
            for i in range(r):
                for j in range(r):
                    for a in A.domain:
                        for b in A.domain:
                            mass = sum(
                                float(vectors[("c", sym, xt, at)] @ vectors[("c", sym, xt, at)])
                                for at in A.tuples(sym)
                                if at[i] == a and at[j] == b
                            )
                            dot = float(
                                vectors[("v", xt[i], a)] @ vectors[("v", xt[j], b)]
                            )
                            note("mixed-product", (sym, xt, i + 1, j + 1, a, b), abs(mass - dot))
    if "R_2" in X.signature:
        ref = None
        for x in X.domain:
            if ref is None:
                ref = sums[x]
            else:
                note("sum-invariance", x, float(np.max(np.abs(sums[x] - ref))))
    return FactReport(checked, violations, max_err)


def check_sos_product_facts(vectors: dict, X, A, k: int, tol: float = 1e-6) -> FactReport:
    """Pairwise product constraints satisfied by level-2k solutions.

    Products of squared-assignment vectors are nonnegative, vanish when the
    two assignments conflict on a shared variable pattern, and are invariant
    under permuting the doubled coordinates.
    """
    import itertools as _it

    sym = f"R_{2 * k}"
    violations = []
    max_err = 0.0
    checked = 0

    def note(kind, where, err):
        nonlocal max_err, checked
        checked += 1
        max_err = max(max_err, err)
        if err > tol:
            violations.append((kind, where, err))

    def vec(x, a):
        key = ("c", sym, x + x, a + a)
        return vectors.get(key)

    xs = list(_it.product(X.domain, repeat=k))
    as_ = list(_it.product(A.domain, repeat=k))
    idxs = list(_it.product(range(k), repeat=k))
    for x in xs:
        for a in as_:
            va = vec(x, a)
            if va is None:
                continue
            for y in xs:
                for b in as_:
                    vb = vec(y, b)
                    if vb is None:
                        continue
                    dot = float(va @ vb)
                    note("nonnegative-product", (x, a, y, b), max(0.0, -dot))
                    conflict = any(
                        tuple(x[i] for i in ii) == tuple(y[j] for j in jj)
                        and tuple(a[i] for i in ii) != tuple(b[j] for j in jj)
                        for ii in idxs
                        for jj in idxs
                    )
                    if conflict:
                        note("conflict-product", (x, a, y, b), abs(dot))
                    # invariance under swapping the two doubled halves
                    note("swap-invariance", (x, a, y, b), abs(dot - float(vb @ va)))
    return FactReport(checked, violations, max_err)
