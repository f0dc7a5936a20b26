"""Algebra of block tensors acting on 2 x n fields.

A block tensor is a self-adjoint linear map on the space of 2 x n real or
complex matrices, stored as an n x n grid of 2 x 2 blocks s(k,l) subject to
s(k,l) = s(l,k)^T.  It acts on a field F columnwise,

    (L F)^(k) = sum_l s(k,l) F^(l).

Two views coexist: the block grid (construction, serialization) and the
2n x 2n flattening (eigenvalues, definiteness, linear solves).  The flattening
stacks the field columns, so entry (i, l) of F lands at index 2*l + i; the
block s(k,l) then occupies rows 2k:2k+2, columns 2l:2l+2, and the symmetry
condition is plain matrix symmetry of the flattening.

Augmented tensors append one scalar slot: K = [[L, V], [V^T, c]] acting on
(F, 1), which evaluates the quadratic well F.LF + 2 V.F + c.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonScalarBlocks, NotPositiveDefinite

R_PERP = np.array([[0.0, -1.0], [1.0, 0.0]])

_SCALAR_BLOCK_RTOL = 1e-12


def vec_field(F):
    """Flatten a 2 x n field to length 2n, columns stacked."""
    F = np.asarray(F)
    if F.ndim != 2 or F.shape[0] != 2:
        raise DimensionMismatch(f"expected a 2 x n field, got shape {F.shape}")
    return F.T.reshape(-1)


def unvec_field(v, n=None):
    """Inverse of :func:`vec_field`."""
    v = np.asarray(v)
    if n is None:
        n = v.size // 2
    if v.size != 2 * n:
        raise DimensionMismatch(f"vector of size {v.size} is not a 2 x {n} field")
    return v.reshape(n, 2).T


def inner(a, b):
    """Standard inner product Tr(a b^T) of two 2 x n fields (bilinear, unconjugated)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"field shapes differ: {a.shape} vs {b.shape}")
    return np.sum(a * b)


def rotation(theta):
    """2 x 2 rotation matrix by angle theta."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _check_symmetry(mat, sym_tol):
    scale = max(np.linalg.norm(mat), 1.0)
    asym = np.linalg.norm(mat - mat.T)
    if asym > sym_tol * scale:
        raise ValueError(
            f"block symmetry violated: ||M - M^T|| = {asym:.3e} "
            f"exceeds {sym_tol:.1e} * {scale:.3e}"
        )


class BlockTensor:
    """Immutable self-adjoint map on 2 x n fields, held as its 2n x 2n flattening."""

    __slots__ = ("n", "mat")

    def __init__(self, mat, *, sym_tol=1e-10):
        mat = np.array(mat, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise DimensionMismatch(f"flattening must be 2n x 2n, got {mat.shape}")
        if not np.all(np.isfinite(mat.view(float))):
            raise ValueError("non-finite entries in block tensor")
        _check_symmetry(mat, sym_tol)
        mat.flags.writeable = False
        object.__setattr__(self, "n", mat.shape[0] // 2)
        object.__setattr__(self, "mat", mat)

    def __setattr__(self, name, value):
        raise AttributeError("BlockTensor is immutable")

    def __repr__(self):
        return f"BlockTensor(n={self.n}, dtype={self.mat.dtype})"

    @classmethod
    def from_blocks(cls, blocks, *, sym_tol=1e-10):
        """Build from an n x n nested sequence of 2 x 2 blocks."""
        blocks = [[np.asarray(b) for b in row] for row in blocks]
        n = len(blocks)
        dtype = complex if any(np.iscomplexobj(b) for row in blocks for b in row) else float
        mat = np.zeros((2 * n, 2 * n), dtype=dtype)
        for k in range(n):
            if len(blocks[k]) != n:
                raise DimensionMismatch("block grid is not square")
            for l in range(n):
                if blocks[k][l].shape != (2, 2):
                    raise DimensionMismatch("blocks must be 2 x 2")
                mat[2 * k : 2 * k + 2, 2 * l : 2 * l + 2] = blocks[k][l]
        return cls(mat, sym_tol=sym_tol)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(2 * n))

    @classmethod
    def scalar_blocks(cls, S, *, sym_tol=1e-10):
        """Tensor with blocks S[k,l] * I for a symmetric n x n scalar matrix S."""
        S = np.asarray(S)
        return cls(np.kron(S, np.eye(2)), sym_tol=sym_tol)

    @classmethod
    def isotropic(cls, sigma, n=1):
        """sigma * identity on every diagonal block (n = 1 gives the 2 x 2 conductivity sigma*I)."""
        return cls(sigma * np.eye(2 * n), sym_tol=np.inf)

    def block(self, k, l):
        return self.mat[2 * k : 2 * k + 2, 2 * l : 2 * l + 2]

    def apply(self, F):
        """Apply to a 2 x n field, returning a 2 x n field."""
        return unvec_field(self.mat @ vec_field(F), self.n)

    def qform(self, F):
        """Quadratic form F . L F."""
        v = vec_field(F)
        return v @ self.mat @ v

    @property
    def hermitian_part(self):
        """Real symmetric part of the flattening (equals the flattening when real)."""
        return np.real(self.mat)

    def min_eigenvalue(self):
        """Smallest eigenvalue of the real symmetric part."""
        return float(scipy.linalg.eigvalsh(self.hermitian_part)[0])

    def is_positive_definite(self, tol=0.0):
        return self.min_eigenvalue() > tol

    def require_positive_definite(self, what="block tensor"):
        lo = self.min_eigenvalue()
        if lo <= 0.0:
            raise NotPositiveDefinite(f"{what}: min eigenvalue {lo:.3e} <= 0")

    def scalar_matrix(self, rtol=_SCALAR_BLOCK_RTOL):
        """Extract the n x n scalar matrix S when every block is S[k,l] * I.

        Raises NonScalarBlocks when any block deviates from a multiple of the
        identity by more than ``rtol`` relative to the block (or overall) norm.
        """
        n = self.n
        scale = np.linalg.norm(self.mat)
        S = np.empty((n, n), dtype=self.mat.dtype)
        for k in range(n):
            for l in range(n):
                b = self.block(k, l)
                s = 0.5 * (b[0, 0] + b[1, 1])
                resid = np.linalg.norm(b - s * np.eye(2))
                if resid > rtol * max(np.linalg.norm(b), scale):
                    raise NonScalarBlocks(
                        f"block ({k},{l}) deviates from s*I by {resid:.3e}"
                    )
                S[k, l] = s
        return S

    def to_json_dict(self):
        d = {
            "n": self.n,
            "blocks": [
                [np.real(self.block(k, l)).ravel().tolist() for l in range(self.n)]
                for k in range(self.n)
            ],
        }
        if np.iscomplexobj(self.mat):
            d["imag"] = [
                [np.imag(self.block(k, l)).ravel().tolist() for l in range(self.n)]
                for k in range(self.n)
            ]
        return d

    @classmethod
    def from_json_dict(cls, d, *, sym_tol=1e-10):
        n = int(d["n"])
        blocks = [
            [np.array(d["blocks"][k][l], dtype=float).reshape(2, 2) for l in range(n)]
            for k in range(n)
        ]
        if "imag" in d:
            blocks = [
                [
                    blocks[k][l]
                    + 1j * np.array(d["imag"][k][l], dtype=float).reshape(2, 2)
                    for l in range(n)
                ]
                for k in range(n)
            ]
        return cls.from_blocks(blocks, sym_tol=sym_tol)


class AugmentedTensor:
    """Block tensor extended by a linear slot V (a 2 x n field) and a constant c.

    The (2n+1) x (2n+1) flattening [[L, v], [v^T, c]] with v = vec(V) acts on
    (vec(F), 1); its quadratic form is the well F.LF + 2 V.F + c.
    """

    __slots__ = ("L", "V", "c")

    def __init__(self, L, V, c):
        if not isinstance(L, BlockTensor):
            L = BlockTensor(L)
        V = np.array(V, copy=True)
        if V.shape != (2, L.n):
            raise DimensionMismatch(f"V must be 2 x {L.n}, got {V.shape}")
        V.flags.writeable = False
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "c", complex(c) if np.iscomplexobj(V) or np.iscomplexobj(L.mat) else float(c))

    def __setattr__(self, name, value):
        raise AttributeError("AugmentedTensor is immutable")

    def __repr__(self):
        return f"AugmentedTensor(n={self.n})"

    @property
    def n(self):
        return self.L.n

    @property
    def kmat(self):
        """The (2n+1) x (2n+1) flattening."""
        n = self.n
        v = vec_field(self.V)
        K = np.zeros((2 * n + 1, 2 * n + 1), dtype=np.result_type(self.L.mat, v, type(self.c)))
        K[: 2 * n, : 2 * n] = self.L.mat
        K[: 2 * n, 2 * n] = v
        K[2 * n, : 2 * n] = v
        K[2 * n, 2 * n] = self.c
        return K

    @classmethod
    def from_kmat(cls, K, *, sym_tol=1e-10):
        K = np.asarray(K)
        n = (K.shape[0] - 1) // 2
        L = BlockTensor(K[: 2 * n, : 2 * n], sym_tol=sym_tol)
        V = unvec_field(0.5 * (K[: 2 * n, 2 * n] + K[2 * n, : 2 * n]), n)
        return cls(L, V, K[2 * n, 2 * n])

    @classmethod
    def from_well(cls, L, F_center, k=0.0):
        """Well (F - F_center).L(F - F_center) + k, i.e. V = -L F_center, c = k + F.LF."""
        if not isinstance(L, BlockTensor):
            L = BlockTensor(L)
        V = -L.apply(F_center)
        c = k + inner(F_center, L.apply(F_center))
        return cls(L, V, c)

    def eval(self, F):
        """(F,1) . K (F,1) = F.LF + 2 V.F + c."""
        return self.L.qform(F) + 2.0 * inner(self.V, F) + self.c

    def min_eigenvalue(self):
        return float(scipy.linalg.eigvalsh(np.real(self.kmat))[0])

    def is_positive_definite(self, tol=0.0):
        return self.min_eigenvalue() > tol

    def require_positive_definite(self, what="augmented tensor"):
        lo = self.min_eigenvalue()
        if lo <= 0.0:
            raise NotPositiveDefinite(f"{what}: min eigenvalue {lo:.3e} <= 0")

    def to_json_dict(self):
        d = self.L.to_json_dict()
        d["V"] = np.real(vec_field(self.V)).tolist()
        d["c"] = float(np.real(self.c))
        if np.iscomplexobj(self.V) or np.iscomplexobj(self.L.mat) or isinstance(self.c, complex):
            d.setdefault("imag", None)
            d["V_imag"] = np.imag(vec_field(self.V)).tolist()
            d["c_imag"] = float(np.imag(self.c))
        return d

    @classmethod
    def from_json_dict(cls, d, *, sym_tol=1e-10):
        L = BlockTensor.from_json_dict(d, sym_tol=sym_tol)
        V = unvec_field(np.array(d["V"], dtype=float), L.n)
        c = float(d["c"])
        if "V_imag" in d:
            V = V + 1j * unvec_field(np.array(d["V_imag"], dtype=float), L.n)
            c = c + 1j * float(d.get("c_imag", 0.0))
        return cls(L, V, c)


def eval_well(K, F):
    """Evaluate the quadratic well (F,1).K(F,1) of an augmented tensor."""
    return K.eval(F)


def rotate_perp(L):
    """Conjugate every block by the 90-degree rotation: s(k,l) -> R s(k,l) R^T.

    An involution up to identity, and an isometry of the flattening spectrum.
    """
    C = np.kron(np.eye(L.n), R_PERP)
    return BlockTensor(C @ L.mat @ C.T, sym_tol=np.inf)


def rotate_blocks(L, theta):
    """Conjugate every block by the rotation R(theta) (polycrystal orientation)."""
    C = np.kron(np.eye(L.n), rotation(theta))
    return BlockTensor(C @ L.mat @ C.T, sym_tol=np.inf)


def decouple(L1, L2, *, rtol=_SCALAR_BLOCK_RTOL):
    """Simultaneously diagonalize two commuting scalar-block tensors.

    For L1, L2 with all blocks proportional to the identity and L2 positive
    definite, returns ``(eigenvalues, w)`` where w is the n x n scalar matrix
    whose block form W = w (x) I satisfies W^T L2 W = I and W^T L1 W =
    diag(sigma_k * I) with the eigenvalues sorted descending.
    """
    S1 = L1.scalar_matrix(rtol)
    S2 = L2.scalar_matrix(rtol)
    if np.iscomplexobj(S1) or np.iscomplexobj(S2):
        raise NonScalarBlocks("decoupling requires real scalar-block tensors")
    try:
        vals, vecs = scipy.linalg.eigh(S1, S2)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"L2 scalar matrix is not positive definite: {exc}") from exc
    if vals[0] is None or not np.all(np.isfinite(vals)):
        raise NotPositiveDefinite("generalized eigenproblem failed")
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def reassemble(sigma_stars, w):
    """Undo the decoupling: L* = W^{-T} diag(sigma_star_k) W^{-1}, W = w (x) I.

    ``sigma_stars`` supplies one 2 x 2 effective tensor per decoupled
    eigenvalue, in the order returned by :func:`decouple`.
    """
    w = np.asarray(w)
    n = w.shape[0]
    if len(sigma_stars) != n:
        raise DimensionMismatch(f"need {n} per-eigenvalue tensors, got {len(sigma_stars)}")
    Lp = scipy.linalg.block_diag(*[np.asarray(s) for s in sigma_stars])
    W = np.kron(w, np.eye(2))
    Winv = np.linalg.inv(W)
    return BlockTensor(Winv.T @ Lp @ Winv, sym_tol=1e-8)
