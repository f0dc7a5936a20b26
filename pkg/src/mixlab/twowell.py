"""Two-well energies and numerical bounds bracketing their quasiconvexification.

W(F) = min_j (F,1).K_j(F,1) over 2 x m fields F.  Two computable bounds
bracket QW:

* translation lower bound: for a quadratic null Lagrangian T (a combination
  of 2 x 2 column-pair minors, so its cell average depends only on the
  average field), QW(F) >= T(F) + C[min_j (W_j - T)](F) whenever both
  W_j - T stay convex.  The convex envelope C of the minimum of two convex
  quadratics is computed exactly by infimal convolution: for each splitting
  weight p the optimal split points solve a linear system (equal gradients),
  and the resulting scalar function of p is convex, so a bracketed
  one-dimensional search finds the envelope.  The bound is maximized over
  feasible T by projected supergradient ascent with restarts.

* lamination upper bound: nested rank-one splittings F -> F +- a (x) b,
  optimized per node, give achievable average energies, hence upper bounds
  on QW (and approximations of the rank-one convexification from above).

A gap between the two certifies nothing beyond the failure of these two
families to pinch; reports must never claim more.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
import scipy.linalg

from .blocktensor import (
    R_PERP,
    AugmentedTensor,
    BlockTensor,
    inner,
    unvec_field,
    vec_field,
)
from .errors import NotOrthogonal, NotPositiveDefinite, UserInputError

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class TwoWellSpec:
    """Two quadratic wells on 2 x m fields, stored as augmented tensors."""

    m: int
    K1: AugmentedTensor
    K2: AugmentedTensor

    def __post_init__(self):
        if self.K1.n != self.m or self.K2.n != self.m:
            raise UserInputError("augmented tensors do not match the column count m")
        for K, name in ((self.K1, "K1"), (self.K2, "K2")):
            if K.L.min_eigenvalue() <= 0.0:
                raise NotPositiveDefinite(f"{name}: quadratic part must be positive definite")

    @classmethod
    def from_wells(cls, L1, F1, k1, L2, F2, k2):
        """Wells (F-F_j).L_j(F-F_j) + k_j; offsets are converted to (V_j, c_j)."""
        return cls(L1.n, AugmentedTensor.from_well(L1, F1, k1), AugmentedTensor.from_well(L2, F2, k2))

    @cached_property
    def _quadratics(self):
        # (A, b, d) per well over flattened fields: W(v) = v.Av + 2 b.v + d
        return (
            (np.real(self.K1.L.mat), vec_field(np.real(self.K1.V)), float(np.real(self.K1.c))),
            (np.real(self.K2.L.mat), vec_field(np.real(self.K2.V)), float(np.real(self.K2.c))),
        )

    def well_values(self, Fv):
        """Both well values on a batch of flattened fields (..., 2m)."""
        Fv = np.asarray(Fv)
        out = []
        for A, b, d in self._quadratics:
            out.append(np.einsum("...i,ij,...j->...", Fv, A, Fv) + 2.0 * (Fv @ b) + d)
        return out[0], out[1]

    def shifted(self, const):
        """Same problem with const added to both well offsets."""
        K1 = AugmentedTensor(self.K1.L, self.K1.V, self.K1.c + const)
        K2 = AugmentedTensor(self.K2.L, self.K2.V, self.K2.c + const)
        return TwoWellSpec(self.m, K1, K2)

    def translated(self, G):
        """Same energy landscape with every well center shifted by G (F -> F + G)."""
        Gv = vec_field(np.asarray(G, dtype=float))
        out = []
        for A, b, d in self._quadratics:
            b2 = b + A @ Gv
            d2 = d + Gv @ A @ Gv + 2.0 * (b @ Gv)
            out.append(AugmentedTensor(BlockTensor(A), unvec_field(b2, self.m), d2))
        return TwoWellSpec(self.m, out[0], out[1])

    def well_centers(self):
        """The minimizers F_j = -L_j^{-1} V_j of the two wells."""
        (A1, b1, _), (A2, b2, _) = self._quadratics
        return (
            unvec_field(-np.linalg.solve(A1, b1), self.m),
            unvec_field(-np.linalg.solve(A2, b2), self.m),
        )

    def to_json_dict(self):
        return {"m": self.m, "K1": self.K1.to_json_dict(), "K2": self.K2.to_json_dict()}

    @classmethod
    def from_json_dict(cls, d):
        return cls(
            int(d["m"]),
            AugmentedTensor.from_json_dict(d["K1"]),
            AugmentedTensor.from_json_dict(d["K2"]),
        )


def eval_W(spec, F):
    """Two-well energy min(W1, W2) at a 2 x m field."""
    w1, w2 = spec.well_values(vec_field(np.asarray(F, dtype=float)))
    return float(min(w1, w2))


# ---------------------------------------------------------------------------
# translations (quadratic null Lagrangians from column-pair minors)


def _pairs(m):
    return list(itertools.combinations(range(m), 2))


@dataclass(frozen=True)
class Translation:
    """T(F) = sum_{p<q} c_pq (F[0,p] F[1,q] - F[1,p] F[0,q]); vanishes on rank-one F."""

    m: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.shape != (len(_pairs(self.m)),):
            raise UserInputError(f"need {len(_pairs(self.m))} minor coefficients for m={self.m}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, m):
        return cls(m, np.zeros(len(_pairs(m))))

    @cached_property
    def matrix(self):
        """Symmetric 2m x 2m matrix with T(F) = vec(F) . M vec(F)."""
        M = np.zeros((2 * self.m, 2 * self.m))
        for c, (p, q) in zip(self.coeffs, _pairs(self.m)):
            M[2 * p, 2 * q + 1] += 0.5 * c
            M[2 * q + 1, 2 * p] += 0.5 * c
            M[2 * p + 1, 2 * q] -= 0.5 * c
            M[2 * q, 2 * p + 1] -= 0.5 * c
        return M

    def value(self, F):
        F = np.asarray(F)
        return float(
            sum(
                c * (F[0, p] * F[1, q] - F[1, p] * F[0, q])
                for c, (p, q) in zip(self.coeffs, _pairs(self.m))
            )
        )


def minors_vector(F):
    """All column-pair minors of a 2 x m field, in the Translation pair order."""
    F = np.asarray(F)
    m = F.shape[1]
    return np.array([F[0, p] * F[1, q] - F[1, p] * F[0, q] for p, q in _pairs(m)])


# ---------------------------------------------------------------------------
# exact convex envelope of the minimum of two convex quadratics


def _batch_quad(A, b, d, X):
    return np.einsum("...i,ij,...j->...", X, A, X) + 2.0 * (X @ b) + d


def _phi_batch(p, Fm, A1, b1, d1, A2, b2, d2):
    """Infimal-convolution value at splitting weight p (per point), split eliminated."""
    M = (1.0 - p)[:, None, None] * A1 + p[:, None, None] * A2
    rhs = Fm @ A2.T + (1.0 - p)[:, None] * (b2 - b1)
    try:
        X = np.linalg.solve(M, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        ridge = 1e-13 * (np.trace(A1) + np.trace(A2)) / A1.shape[0]
        X = np.linalg.solve(M + ridge * np.eye(A1.shape[0]), rhs[..., None])[..., 0]
    Y = (Fm - p[:, None] * X) / (1.0 - p)[:, None]
    return p * _batch_quad(A1, b1, d1, X) + (1.0 - p) * _batch_quad(A2, b2, d2, Y), X, Y


def convex_envelope_min2(A1, b1, d1, A2, b2, d2, Fm, *, iters=64, want_split=False):
    """Convex envelope of min(g1, g2) for convex quadratics, on a batch of points.

    Golden-section search over the splitting weight (convex in p), bracketed
    on (0,1); the pure-phase endpoints enter the final minimum directly.
    """
    Fm = np.atleast_2d(np.asarray(Fm, dtype=float))
    P = Fm.shape[0]
    lo = np.full(P, 1e-9)
    hi = np.full(P, 1.0 - 1e-9)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _phi_batch(x1, Fm, A1, b1, d1, A2, b2, d2)[0]
    f2 = _phi_batch(x2, Fm, A1, b1, d1, A2, b2, d2)[0]
    for _ in range(iters):
        take1 = f1 < f2  # minimum sits in [lo, x2]
        hi = np.where(take1, x2, hi)
        lo = np.where(take1, lo, x1)
        probe_lo = hi - _GOLDEN * (hi - lo)
        probe_hi = lo + _GOLDEN * (hi - lo)
        xnew = np.where(take1, probe_lo, probe_hi)
        fnew = _phi_batch(xnew, Fm, A1, b1, d1, A2, b2, d2)[0]
        x1, f1, x2, f2 = (
            np.where(take1, probe_lo, x2),
            np.where(take1, fnew, f2),
            np.where(take1, x1, probe_hi),
            np.where(take1, f1, fnew),
        )
    pstar = 0.5 * (lo + hi)
    fstar, X, Y = _phi_batch(pstar, Fm, A1, b1, d1, A2, b2, d2)
    g1F = _batch_quad(A1, b1, d1, Fm)
    g2F = _batch_quad(A2, b2, d2, Fm)
    env = np.minimum(fstar, np.minimum(g1F, g2F))
    if not want_split:
        return env
    # report the attaining split; pure-phase attainment degenerates to X = Y = F
    pure = np.minimum(g1F, g2F) <= fstar
    pstar = np.where(pure, np.where(g1F <= g2F, 1.0, 0.0), pstar)
    X = np.where(pure[:, None], Fm, X)
    Y = np.where(pure[:, None], Fm, Y)
    return env, pstar, X, Y


# ---------------------------------------------------------------------------
# translation lower bound


def _feasible(spec_quads, Tmat, tol=0.0):
    (A1, _, _), (A2, _, _) = spec_quads
    lam1 = scipy.linalg.eigvalsh(A1 - Tmat)[0]
    lam2 = scipy.linalg.eigvalsh(A2 - Tmat)[0]
    return min(lam1, lam2) >= -tol


def _project_radial(spec_quads, m, c):
    """Largest t in [0,1] with t*c feasible (0 is strictly feasible)."""
    if _feasible(spec_quads, Translation(m, c).matrix):
        return c
    lo, hi = 0.0, 1.0
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if _feasible(spec_quads, Translation(m, mid * c).matrix):
            lo = mid
        else:
            hi = mid
    return lo * c


def _ridged_quadratics(spec):
    quads = []
    for A, b, d in spec._quadratics:
        lam = scipy.linalg.eigvalsh(A)[0]
        if lam < 1e-12 * max(1.0, abs(A).max()):
            warnings.warn("degenerate well: adding 1e-10 ridge to keep envelope solves regular")
            A = A + 1e-10 * np.eye(A.shape[0])
        quads.append((A, b, d))
    return tuple(quads)


def _translation_objective(quads, Tmat, Fv):
    (A1, b1, d1), (A2, b2, d2) = quads
    env, p, X, Y = convex_envelope_min2(
        A1 - Tmat, b1, d1, A2 - Tmat, b2, d2, Fv[None, :], want_split=True
    )
    tval = Fv @ Tmat @ Fv
    return float(env[0] + tval), float(p[0]), X[0], Y[0]


def translation_lower_bound(spec, F, search_budget=16, *, seed=0, feas_tol=1e-10):
    """Best translation bound max_T [T(F) + C(min_j (W_j - T))(F)] <= QW(F).

    Feasibility (W_j - T convex for both wells) is kept by radially clipping
    the minor coefficients back inside the PSD region; the concave objective
    is maximized by supergradient ascent from ``search_budget`` starts
    (T = 0 is always included, so the convexification bound is a floor).
    """
    F = np.asarray(F, dtype=float)
    Fv = vec_field(F)
    quads = _ridged_quadratics(spec)
    m = spec.m
    npairs = len(_pairs(m))
    zero = Translation.zero(m)
    best_val, _, _, _ = _translation_objective(quads, zero.matrix, Fv)
    best = (best_val, zero)
    if npairs == 0 or search_budget <= 0:
        return best

    rng = np.random.default_rng(seed)
    minors_F = minors_vector(F)

    def objective_and_grad(c):
        T = Translation(m, c)
        val, p, X, Y = _translation_objective(quads, T.matrix, Fv)
        grad = minors_F - p * minors_vector(unvec_field(X, m)) - (1.0 - p) * minors_vector(
            unvec_field(Y, m)
        )
        return val, grad

    starts = [np.zeros(npairs)]
    for _ in range(search_budget - 1):
        u = rng.standard_normal(npairs)
        starts.append(0.7 * _project_radial(quads, m, 4.0 * u / max(np.linalg.norm(u), 1e-30)))

    scale = max(1.0, abs(best_val))
    for c in starts:
        c = _project_radial(quads, m, c)
        val, grad = objective_and_grad(c)
        step = 1.0
        for _ in range(60):
            gn = np.linalg.norm(grad)
            if gn < 1e-14 * scale:
                break
            cand = _project_radial(quads, m, c + step * grad / gn)
            vnew, gnew = objective_and_grad(cand)
            if vnew > val + 1e-15 * scale:
                c, val, grad = cand, vnew, gnew
                step = min(4.0 * step, 1e6)
            else:
                step *= 0.25
                if step < 1e-10:
                    break
        if val > best[0]:
            best = (val, Translation(m, c))
    return best


# ---------------------------------------------------------------------------
# lamination upper bound


@dataclass(frozen=True)
class SplitLeaf:
    F: np.ndarray
    value: float


@dataclass(frozen=True)
class SplitNode:
    """F splits into F + (1-p) a(x)b (weight p) and F - p a(x)b (weight 1-p)."""

    F: np.ndarray
    value: float
    p: float
    a: np.ndarray
    b: np.ndarray
    plus: "LaminationTreeF"
    minus: "LaminationTreeF"


LaminationTreeF = Union[SplitLeaf, SplitNode]


def _golden_min(f, lo, hi, iters):
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 < f2 else (x2, f2)


def _split_children(Fv, p, theta, b):
    a = np.array([np.cos(theta), np.sin(theta)])
    Gv = np.kron(np.asarray(b, dtype=float), a)
    return Fv + (1.0 - p) * Gv, Fv - p * Gv, a, Gv


def _candidate_params(spec, Fv, rng, restarts):
    m = spec.m
    cands = []
    F1, F2 = spec.well_centers()
    D = vec_field(F2) - vec_field(F1)
    scaleD = np.linalg.norm(D)

    def svd_candidate(Gv, p0):
        G = unvec_field(Gv, m)
        U, s, Vt = np.linalg.svd(G)
        if s[0] <= 1e-14:
            return
        cands.append((p0, float(np.arctan2(U[1, 0], U[0, 0])), s[0] * Vt[0]))

    if scaleD > 1e-14:
        # split straight to the wells when F sits on their segment
        t = float(np.clip((D @ (vec_field(F2) - Fv)) / (D @ D), 0.05, 0.95))
        svd_candidate(D, 1.0 - t)
        svd_candidate(D, 0.5)
    for Fj in (F1, F2):
        Gv = Fv - vec_field(Fj)
        if np.linalg.norm(Gv) > 1e-14:
            svd_candidate(Gv, 0.5)
    bscale = max(scaleD, 1.0)
    for _ in range(max(0, restarts)):
        cands.append(
            (rng.uniform(0.2, 0.8), rng.uniform(0.0, np.pi), bscale * rng.standard_normal(m))
        )
    return cands


def _ub_value(spec, Fv, max_rank, restarts, rng, cycles, golden_iters):
    w1, w2 = spec.well_values(Fv)
    best_val = float(min(w1, w2))
    best_params = None
    if max_rank <= 0:
        return best_val, None

    child_restarts = max(1, restarts // 4)

    def child_value(Fc):
        return _ub_value(spec, Fc, max_rank - 1, child_restarts, rng, cycles, golden_iters)[0]

    def objective(p, theta, b):
        Fp, Fm, _, _ = _split_children(Fv, p, theta, b)
        return p * child_value(Fp) + (1.0 - p) * child_value(Fm)

    for p0, th0, b0 in _candidate_params(spec, Fv, rng, restarts):
        p, th, b = float(np.clip(p0, 1e-3, 1 - 1e-3)), float(th0), np.asarray(b0, dtype=float).copy()
        val = objective(p, th, b)
        for _ in range(cycles):
            p, val = _golden_min(lambda x: objective(x, th, b), 1e-3, 1.0 - 1e-3, golden_iters)
            th, val = _golden_min(
                lambda x: objective(p, x, b), th - 0.5 * np.pi, th + 0.5 * np.pi, golden_iters
            )
            for i in range(spec.m):
                delta = 1.0 + abs(b[i])

                def fb(x, i=i):
                    bb = b.copy()
                    bb[i] = x
                    return objective(p, th, bb)

                b[i], val = _golden_min(fb, b[i] - delta, b[i] + delta, golden_iters)
        if val < best_val:
            best_val = val
            best_params = (p, th, b.copy())
    return best_val, best_params


def _ub_tree(spec, Fv, max_rank, restarts, rng, cycles, golden_iters):
    val, params = _ub_value(spec, Fv, max_rank, restarts, rng, cycles, golden_iters)
    F = unvec_field(Fv, spec.m)
    if params is None:
        return SplitLeaf(F, val), val
    p, th, b = params
    Fp, Fm, a, _ = _split_children(Fv, p, th, b)
    child_restarts = max(1, restarts // 4)
    plus, vp = _ub_tree(spec, Fp, max_rank - 1, child_restarts, rng, cycles, golden_iters)
    minus, vm = _ub_tree(spec, Fm, max_rank - 1, child_restarts, rng, cycles, golden_iters)
    val = min(val, p * vp + (1.0 - p) * vm)
    return SplitNode(F, val, p, a, np.asarray(b), plus, minus), val


def lamination_upper_bound(spec, F, max_rank=2, *, restarts=8, cycles=2, golden_iters=20, seed=0):
    """Optimized nested rank-one splitting: an upper bound on QW at F.

    Monotone nonincreasing in ``max_rank`` by construction (the unsplit value
    is always a candidate).  Coordinate descent with golden-section line
    searches per node, multi-start; deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    Fv = vec_field(np.asarray(F, dtype=float))
    tree, val = _ub_tree(spec, Fv, max_rank, restarts, rng, cycles, golden_iters)
    return val, tree


# ---------------------------------------------------------------------------
# scans and reductions


@dataclass(frozen=True)
class GapScanReport:
    F_list: tuple
    lower: np.ndarray
    upper: np.ndarray
    max_gap: float
    argmax_F: np.ndarray
    min_gap: float

    @property
    def gaps(self):
        return self.upper - self.lower

    def to_csv(self):
        m = self.F_list[0].shape[1]
        names = [f"F{i}{l}" for l in range(m) for i in range(2)]
        lines = [",".join(names + ["lower", "upper", "gap"])]
        for F, lo, up in zip(self.F_list, self.lower, self.upper):
            vals = [repr(float(x)) for x in vec_field(F)]
            lines.append(",".join(vals + [repr(float(lo)), repr(float(up)), repr(float(up - lo))]))
        return "\n".join(lines) + "\n"


def gap_scan(spec, F_list, *, max_rank=1, search_budget=0, seed=0, restarts=4, cycles=2,
             golden_iters=16):
    """Lower/upper bounds over a grid of fields F.

    A positive max gap certifies only that this translation family and this
    laminate family do not pinch at the scanned points; it says nothing about
    rank-one convexity versus quasiconvexity itself.
    """
    F_list = [np.asarray(F, dtype=float) for F in F_list]
    Fm = np.stack([vec_field(F) for F in F_list])
    if search_budget == 0 and max_rank == 0:
        quads = _ridged_quadratics(spec)
        (A1, b1, d1), (A2, b2, d2) = quads
        lower = convex_envelope_min2(A1, b1, d1, A2, b2, d2, Fm)
        w1, w2 = spec.well_values(Fm)
        upper = np.minimum(w1, w2)
    else:
        lower = np.empty(len(F_list))
        upper = np.empty(len(F_list))
        for i, F in enumerate(F_list):
            lower[i] = translation_lower_bound(spec, F, search_budget, seed=seed + i)[0]
            upper[i] = lamination_upper_bound(
                spec, F, max_rank, restarts=restarts, cycles=cycles,
                golden_iters=golden_iters, seed=seed + i,
            )[0]
    gaps = upper - lower
    k = int(np.argmax(gaps))
    return GapScanReport(
        tuple(F_list), lower, upper, float(gaps[k]), F_list[k], float(gaps.min())
    )


@dataclass(frozen=True)
class KohnReduction:
    """G-closure energy query expressed as a two-well evaluation at F = E0."""

    spec: TwoWellSpec
    F: np.ndarray
    lower: float
    upper: float
    translation: Translation
    tree: LaminationTreeF


def kohn_reduction(K1, K2, E0, *, search_budget=8, max_rank=2, seed=0, **ub_kwargs):
    """Bracket inf over G(K1,K2) of the quadratic form at (E0, 1) by two-well bounds.

    The interchange of infima turns the G-closure minimization into QW(E0)
    for the wells W_j(F) = (F,1).K_j(F,1); laminate fields give the upper
    route, translations the lower.  Equal bounds do not certify that the
    G-closure equals its lamination closure (sufficient, not necessary).
    """
    spec = TwoWellSpec(K1.n, K1, K2)
    E0 = np.asarray(E0, dtype=float)
    lo, T = translation_lower_bound(spec, E0, search_budget, seed=seed)
    up, tree = lamination_upper_bound(spec, E0, max_rank, seed=seed, **ub_kwargs)
    return KohnReduction(spec, E0, lo, up, T, tree)


@dataclass(frozen=True)
class WTransformProblem:
    """Two-well instance encoding one W-transform evaluation of a G-closure."""

    spec: TwoWellSpec
    superfield: np.ndarray
    h: int


def wtransform_reduction(L1, L2, E_list, J_list, *, lagrange_c=0.0, ortho_tol=1e-12):
    """Reduce a G-closure support query to a two-well problem with m = n^2.

    The E-entries keep the primal blocks L_j; the J-entries enter through the
    dual variational form with blocks [R L_j R^T]^{-1} and rotated loadings
    R^T J_k.  A volume-fraction Lagrange multiplier shifts the phase-1 well
    offset by ``lagrange_c``.
    """
    n = L1.n
    if L2.n != n:
        raise UserInputError("phases have different field counts")
    E_list = [np.asarray(E, dtype=float) for E in E_list]
    J_list = [np.asarray(J, dtype=float) for J in J_list]
    if len(E_list) + len(J_list) != n:
        raise UserInputError(f"need h + (n-h) = {n} loadings, got {len(E_list)}+{len(J_list)}")
    fields = E_list + J_list
    for i, Fi in enumerate(fields):
        for j, Fj in enumerate(fields):
            if i < j and abs(inner(Fi, Fj)) > ortho_tol:
                raise NotOrthogonal(f"loadings {i} and {j} are not orthogonal")

    Rc = np.kron(np.eye(n), R_PERP)
    blocks = {}
    for j, L in ((1, L1), (2, L2)):
        dual = np.linalg.inv(Rc @ L.mat @ Rc.T)
        blocks[j] = scipy.linalg.block_diag(*([L.mat] * len(E_list) + [dual] * len(J_list)))
    cols = [E for E in E_list] + [R_PERP.T @ J for J in J_list]
    superfield = np.hstack(cols)

    m = n * n
    K1 = AugmentedTensor(BlockTensor(blocks[1]), np.zeros((2, m)), float(lagrange_c))
    K2 = AugmentedTensor(BlockTensor(blocks[2]), np.zeros((2, m)), 0.0)
    spec = TwoWellSpec(m, K1, K2)
    return WTransformProblem(spec, superfield, len(E_list))
