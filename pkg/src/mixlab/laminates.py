"""Exact effective tensors of simple and hierarchical laminates.

A simple laminate of two homogeneous media with layer normal nu carries
piecewise-constant fields.  Across an interface each field column jumps only
along nu (tangential continuity of gradients) while the normal component of
each flux column is continuous.  Writing the jump as E_A - E_B = nu a^T and
imposing the prescribed average f E_A + (1-f) E_B = E0, the flux condition is
an n x n linear solve for a; the effective tensor assembles in closed form

    L* = f L_A + (1-f) L_B - f(1-f) X G^{-1} X^T,
    X = (L_A - L_B) B_nu,   G = B_nu^T ((1-f) L_A + f L_B) B_nu,

where B_nu injects a into the jump field vec(nu a^T).  Hierarchical laminates
iterate this bottom-up with an ideal separation of scales, so the recursion is
exact.  Augmented (K) problems laminate the (2n+1)-flattenings with the same
B_nu padded by a zero row: the scalar slot theta has no jump.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .blocktensor import (
    AugmentedTensor,
    BlockTensor,
    rotation,
    unvec_field,
    vec_field,
)
from .errors import (
    NotPositiveDefinite,
    ResolutionTooCoarse,
    SingularContrast,
    SingularJumpSystem,
    UserInputError,
)
from .geometry import CellGeometry, _is_power_of_two

_UNIT_TOL = 1e-14


@dataclass(frozen=True)
class Leaf:
    """A pure phase, optionally rotated (a polycrystal grain)."""

    phase: int
    rotation: float = 0.0

    def __post_init__(self):
        if self.phase not in (1, 2):
            raise UserInputError(f"leaf phase must be 1 or 2, got {self.phase}")


@dataclass(frozen=True)
class Branch:
    """Layering of two sub-laminates with unit normal nu and fraction of child a."""

    a: "LaminateTree"
    b: "LaminateTree"
    normal: tuple
    fraction: float

    def __post_init__(self):
        nu = np.asarray(self.normal, dtype=float)
        if nu.shape != (2,):
            raise UserInputError("normal must be a 2-vector")
        if abs(np.linalg.norm(nu) - 1.0) > _UNIT_TOL:
            raise UserInputError(f"normal must have unit length, |nu| = {np.linalg.norm(nu)!r}")
        if not 0.0 < self.fraction < 1.0:
            raise UserInputError(f"fraction must lie strictly in (0,1), got {self.fraction}")
        object.__setattr__(self, "normal", (float(nu[0]), float(nu[1])))


LaminateTree = Union[Leaf, Branch]


def rank(tree):
    """Lamination rank: leaves are rank 0, a branch adds one level."""
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(rank(tree.a), rank(tree.b))


def volume_fraction(tree):
    """Volume fraction occupied by phase 1."""
    if isinstance(tree, Leaf):
        return 1.0 if tree.phase == 1 else 0.0
    f = tree.fraction
    return f * volume_fraction(tree.a) + (1.0 - f) * volume_fraction(tree.b)


def tree_to_json_dict(tree):
    if isinstance(tree, Leaf):
        return {"leaf": {"phase": tree.phase, "rotation": tree.rotation}}
    return {
        "branch": {
            "a": tree_to_json_dict(tree.a),
            "b": tree_to_json_dict(tree.b),
            "normal": list(tree.normal),
            "fraction": tree.fraction,
        }
    }


def tree_from_json_dict(d):
    if "leaf" in d:
        leaf = d["leaf"]
        return Leaf(int(leaf["phase"]), float(leaf.get("rotation", 0.0)))
    if "branch" in d:
        br = d["branch"]
        return Branch(
            tree_from_json_dict(br["a"]),
            tree_from_json_dict(br["b"]),
            tuple(float(x) for x in br["normal"]),
            float(br["fraction"]),
        )
    raise UserInputError("laminate JSON node must contain 'leaf' or 'branch'")


# ---------------------------------------------------------------------------
# core lamination algebra on flattened matrices


def _b_nu(nu, n, augmented=False):
    B = np.kron(np.eye(n), np.asarray(nu, dtype=float).reshape(2, 1))
    if augmented:
        B = np.vstack([B, np.zeros((1, n))])
    return B


def _pair_mat(MA, MB, nu, f, n, augmented=False):
    B = _b_nu(nu, n, augmented)
    G = B.T @ ((1.0 - f) * MA + f * MB) @ B
    X = (MA - MB) @ B
    try:
        sol = np.linalg.solve(G, X.T)
    except np.linalg.LinAlgError as exc:
        raise SingularJumpSystem(f"jump system singular for nu={nu}, f={f}") from exc
    return f * MA + (1.0 - f) * MB - f * (1.0 - f) * (X @ sol)


def _rot_conj(M, theta, n, augmented=False):
    if theta == 0.0:
        return M
    C = np.kron(np.eye(n), rotation(theta))
    if augmented:
        C = np.block([[C, np.zeros((2 * n, 1))], [np.zeros((1, 2 * n)), np.ones((1, 1))]])
    return C @ M @ C.T


def _eff_mat(tree, M1, M2, n, augmented=False):
    if isinstance(tree, Leaf):
        M = M1 if tree.phase == 1 else M2
        return _rot_conj(M, tree.rotation, n, augmented)
    MA = _eff_mat(tree.a, M1, M2, n, augmented)
    MB = _eff_mat(tree.b, M1, M2, n, augmented)
    return _pair_mat(MA, MB, tree.normal, tree.fraction, n, augmented)


# ---------------------------------------------------------------------------
# public operations


def laminate_pair(LA, LB, nu, f):
    """Exact effective tensor of a simple laminate of LA (fraction f) and LB."""
    if LA.n != LB.n:
        raise UserInputError("phases have different field counts")
    if not 0.0 < f < 1.0:
        raise UserInputError(f"fraction must lie strictly in (0,1), got {f}")
    nu = np.asarray(nu, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > _UNIT_TOL:
        raise UserInputError("normal must have unit length")
    for L, name in ((LA, "LA"), (LB, "LB")):
        if L.min_eigenvalue() <= 0.0:
            raise NotPositiveDefinite(f"{name} has non-positive-definite real symmetric part")
    return BlockTensor(_pair_mat(LA.mat, LB.mat, nu, f, LA.n), sym_tol=1e-8)


def effective_tensor(tree, L1, L2):
    """Effective tensor of a hierarchical laminate of the two phases."""
    if L1.n != L2.n:
        raise UserInputError("phases have different field counts")
    return BlockTensor(_eff_mat(tree, L1.mat, L2.mat, L1.n), sym_tol=1e-8)


def sigma_star_laminate(tree, sigma):
    """2 x 2 effective conductivity of the tree with phases sigma*I and I (n = 1)."""
    dtype = complex if np.iscomplexobj(np.asarray(sigma)) else float
    M1 = sigma * np.eye(2, dtype=dtype)
    return _eff_mat(tree, M1, np.eye(2, dtype=dtype), 1)


def augmented_effective(tree, K1, K2):
    """Effective augmented tensor K* = (L*, V*, c*) of a hierarchical laminate.

    The constant scalar slot theta is continuous across layers, so the
    recursion laminates the (2n+1)-flattenings with no jump freedom in theta;
    the L* part coincides with :func:`effective_tensor`.
    """
    if K1.n != K2.n:
        raise UserInputError("phases have different field counts")
    Kst = _eff_mat(tree, K1.kmat, K2.kmat, K1.n, augmented=True)
    return AugmentedTensor.from_kmat(Kst, sym_tol=1e-8)


def vstar_cstar_from_Lstar(L1, L2, V1, V2, c1, c2, Lstar, f, *, rtol=1e-12):
    """Closed forms for V* and c* from L*, f and the phase data.

    V* = V1 + (L1 - L*)(L1 - L2)^{-1}(V2 - V1)
    c* = f c1 + (1-f) c2 + [f V1 + (1-f) V2 - V*]^T (L1 - L2)^{-1} (V2 - V1)
    """
    A = L1.mat - L2.mat
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= rtol * sv[0]:
        raise SingularContrast("L1 - L2 is singular; perturb the phases")
    dv = vec_field(V2) - vec_field(V1)
    w = np.linalg.solve(A, dv)
    vstar = vec_field(V1) + (L1.mat - Lstar.mat) @ w
    avg_v = f * vec_field(V1) + (1.0 - f) * vec_field(V2)
    cstar = f * c1 + (1.0 - f) * c2 + (avg_v - vstar) @ w
    return unvec_field(vstar, L1.n), cstar


# ---------------------------------------------------------------------------
# per-leaf field recovery


@dataclass(frozen=True)
class LeafFields:
    E: np.ndarray
    J: np.ndarray
    weight: float
    phase: int


@dataclass(frozen=True)
class LeafFieldReport:
    """Per-leaf constant fields of a laminate under prescribed average <E> = E0."""

    E0: np.ndarray
    leaves: tuple
    avg_E: np.ndarray
    avg_J: np.ndarray
    dets: tuple
    min_det: float

    @property
    def weights(self):
        return tuple(leaf.weight for leaf in self.leaves)


def _field_minors(E):
    """All 2 x 2 column-pair minors of a 2 x n matrix (the determinant when n = 2)."""
    n = E.shape[1]
    return tuple(
        float(E[0, p] * E[1, q] - E[1, p] * E[0, q])
        for p in range(n)
        for q in range(p + 1, n)
    )


def _collect_leaf_fields(tree, M1, M2, n, E0v, weight, out):
    if isinstance(tree, Leaf):
        M = _rot_conj(M1 if tree.phase == 1 else M2, tree.rotation, n)
        out.append(LeafFields(unvec_field(E0v, n), unvec_field(M @ E0v, n), weight, tree.phase))
        return
    MA = _eff_mat(tree.a, M1, M2, n)
    MB = _eff_mat(tree.b, M1, M2, n)
    f = tree.fraction
    B = _b_nu(tree.normal, n)
    G = B.T @ ((1.0 - f) * MA + f * MB) @ B
    try:
        alpha = -np.linalg.solve(G, B.T @ (MA - MB) @ E0v)
    except np.linalg.LinAlgError as exc:
        raise SingularJumpSystem("jump system singular during field recovery") from exc
    _collect_leaf_fields(tree.a, M1, M2, n, E0v + (1.0 - f) * (B @ alpha), weight * f, out)
    _collect_leaf_fields(tree.b, M1, M2, n, E0v - f * (B @ alpha), weight * (1.0 - f), out)


def leaf_fields(tree, L1, L2, E0):
    """Recover the constant per-leaf fields consistent with all jump conditions.

    Reports per-leaf E and J = L E, leaf weights, volume-weighted averages and
    the 2 x 2 column-pair minors of E (the determinant for n = 2) with their
    minimum over leaves.
    """
    n = L1.n
    E0 = np.asarray(E0, dtype=float)
    out = []
    _collect_leaf_fields(tree, L1.mat, L2.mat, n, vec_field(E0), 1.0, out)
    avg_E = sum(leaf.weight * leaf.E for leaf in out)
    avg_J = sum(leaf.weight * leaf.J for leaf in out)
    dets = tuple(_field_minors(leaf.E) for leaf in out)
    min_det = min((d for ds in dets for d in ds), default=np.nan)
    return LeafFieldReport(E0, tuple(out), avg_E, avg_J, dets, min_det)


# ---------------------------------------------------------------------------
# rasterization


def _check_resolution(tree, N, r, depth=0):
    if isinstance(tree, Leaf):
        return
    width = N * r ** (-float(depth)) * min(tree.fraction, 1.0 - tree.fraction)
    if width < 2.0:
        raise ResolutionTooCoarse(
            f"layer at depth {depth} would be {width:.2f} px wide (< 2) at N={N}, ratio {r}"
        )
    _check_resolution(tree.a, N, r, depth + 1)
    _check_resolution(tree.b, N, r, depth + 1)


def _paint(tree, xs, ys, mask, ind, depth, r):
    if isinstance(tree, Leaf):
        if tree.phase == 1:
            ind[mask] = 1
        return
    period = r ** (-float(depth))
    nu = tree.normal
    t = np.mod((xs * nu[0] + ys * nu[1]) / period, 1.0)
    in_a = mask & (t < tree.fraction)
    _paint(tree.a, xs, ys, in_a, ind, depth + 1, r)
    _paint(tree.b, xs, ys, mask & ~in_a, ind, depth + 1, r)


def rasterize(tree, N, scale_ratio=8.0):
    """Pixel indicator approximating the laminate at finite separation of scales.

    Layer periods shrink by ``scale_ratio`` per rank; pixel centers are
    assigned by walking the tree.  Axis-aligned dyadic trees rasterize
    exactly; oblique normals are sampled (and are only approximately
    periodic on the torus).
    """
    if not _is_power_of_two(N):
        raise UserInputError(f"grid size must be a power of two, got {N}")
    if scale_ratio < 2.0:
        raise UserInputError("scale ratio must be at least 2")
    _check_resolution(tree, N, scale_ratio)
    c = (np.arange(N) + 0.5) / N
    xs, ys = np.meshgrid(c, c, indexing="ij")
    ind = np.zeros((N, N), dtype=np.uint8)
    _paint(tree, xs, ys, np.ones((N, N), dtype=bool), ind, 0, scale_ratio)
    return CellGeometry(2, N, ind)
