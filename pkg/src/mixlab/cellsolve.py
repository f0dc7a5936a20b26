"""Periodic homogenization on pixel/voxel two-phase geometries.

Discretization: forward-difference staggered gradients on the torus.  Each
field component j keeps a periodic potential u_j at the grid nodes; the cell
at node p carries the field column  e^(j)[p] = e0^(j) + (u_j[p+e_a]-u_j[p])*N.
Both the gradient D and its adjoint are diagonal in Fourier space (symbol
d_a(k) = N (exp(2*pi*i k_a/N) - 1)), so the discrete cell problem

    D^T sigma(x) (E0 + D u) = 0

retains the exact adjoint structure of the continuum: the system matrix is
D^T sigma D, symmetric whenever sigma(x) is.  Geometries varying along one
axis (layered media) are solved exactly by this scheme.

The linear solve is a Fourier-diagonal preconditioned Krylov iteration
(conjugate gradients when the operator is real symmetric), with the reference
medium the arithmetic mean of the phase tensors.  Small high-contrast
problems fall back to a sparse direct factorization of the same discrete
operator when the iteration stalls.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .blocktensor import BlockTensor
from .errors import (
    BranchCut,
    ContrastTooHigh,
    NoConvergence,
    NotCubicWarning,
    UserInputError,
)
from .geometry import CellGeometry

_MAX_CONTRAST = 1.0e6 * (1.0 + 1e-9)
_DIRECT_MAX_UNKNOWNS = 70_000
_HIGH_CONTRAST = 1.0e4


def _phase_matrix(L, dim, n):
    """Normalize a phase tensor to its (dim*n) x (dim*n) flattening."""
    if isinstance(L, BlockTensor):
        if dim != 2:
            raise UserInputError("block tensors are two-dimensional")
        if L.n != n:
            raise UserInputError(f"expected n={n}, got block tensor with n={L.n}")
        return np.array(L.mat)
    M = np.asarray(L)
    if M.ndim == 0:
        return M * np.eye(dim * n)
    if M.shape != (dim * n, dim * n):
        raise UserInputError(f"phase matrix must be {dim * n} x {dim * n}, got {M.shape}")
    return np.array(M)


def _contrast(m1, m2):
    eigs = []
    for m in (m1, m2):
        h = 0.5 * (m + m.T).real
        eigs.extend(np.linalg.eigvalsh(h))
    eigs = np.asarray(eigs)
    if eigs.min() <= 0.0:
        raise UserInputError("phase tensors must have positive-definite real symmetric parts")
    return eigs.max() / eigs.min()


@dataclass(frozen=True)
class FieldSolution:
    """Cell-problem fields: E, J of shape (dim, n, N, ..., N) plus diagnostics."""

    geometry: CellGeometry
    n: int
    E0: np.ndarray
    E: np.ndarray
    J: np.ndarray
    avg_E: np.ndarray
    avg_J: np.ndarray
    residual: float
    iterations: int


class _CellOperator:
    """D^T sigma D with FFT-based matvec and Fourier-diagonal preconditioner."""

    def __init__(self, geom, m1, m2, reference=None):
        self.geom = geom
        self.dim = geom.dim
        self.N = geom.N
        self.shape = geom.indicator.shape
        self.cells = geom.indicator.size
        K = m1.shape[0]
        self.n = K // self.dim
        self.m1 = m1
        self.m2 = m2
        self.complex = bool(np.iscomplexobj(m1) or np.iscomplexobj(m2))
        self.symmetric = (not self.complex) and np.allclose(m1, m1.T) and np.allclose(m2, m2.T)
        self.dtype = np.complex128 if self.complex else np.float64
        self.chi = geom.indicator.astype(np.float64)
        self.axes = tuple(range(-self.dim, 0))

        # gradient symbol d_a(k) = N (exp(2*pi*i*k_a/N) - 1)
        freq = np.fft.fftfreq(self.N) * self.N
        d = []
        for a in range(self.dim):
            sh = [1] * self.dim
            sh[a] = self.N
            d.append(self.N * (np.exp(2j * np.pi * freq / self.N) - 1.0).reshape(sh) * np.ones(self.shape))
        self.d = np.stack(d)  # (dim, *shape)

        if reference is None:
            reference = 0.5 * (m1 + m2)
        sig0 = 0.5 * (reference + reference.T).real
        s0 = sig0.reshape(self.n, self.dim, self.n, self.dim)
        A0 = np.einsum("a...,jalb,b...->...jl", np.conj(self.d), s0, self.d)
        A0.reshape(-1, self.n, self.n)[0] = np.eye(self.n)  # k = 0 placeholder
        P0 = np.linalg.inv(A0)
        P0.reshape(-1, self.n, self.n)[0] = 0.0  # project out the constant mode
        self.P0 = np.ascontiguousarray(np.moveaxis(P0, (-2, -1), (0, 1)))  # (n, n, *shape)
        self._lu = None

    # -- FFT building blocks ------------------------------------------------

    def gradient(self, u):
        """Potentials (n, *shape) -> cell fields (dim, n, *shape)."""
        uh = np.fft.fftn(u, axes=self.axes)
        Eh = self.d[:, None] * uh[None]
        E = np.fft.ifftn(Eh, axes=self.axes)
        return E if self.complex else E.real

    def divergence_adj(self, W):
        """Adjoint of gradient: (dim, n, *shape) -> (n, *shape)."""
        Wh = np.fft.fftn(W, axes=self.axes)
        rh = np.einsum("a...,al...->l...", np.conj(self.d), Wh)
        r = np.fft.ifftn(rh, axes=self.axes)
        return r if self.complex else r.real

    # -- operator interface --------------------------------------------------

    def matvec(self, uflat):
        u = uflat.reshape(self.n, *self.shape)
        E = self.gradient(u)
        J = self._sigma_dot(E)
        return self.divergence_adj(J).reshape(-1)

    def _sigma_dot(self, E):
        # E arrives as (dim, n, *shape); reorder to flat component index dim*l + a
        Ef = np.moveaxis(E, 0, 1).reshape(self.dim * self.n, *self.shape)
        J1 = np.einsum("pq,q...->p...", self.m1, Ef)
        J2 = np.einsum("pq,q...->p...", self.m2, Ef)
        Jf = J1 * self.chi + J2 * (1.0 - self.chi)
        return np.moveaxis(Jf.reshape(self.n, self.dim, *self.shape), 1, 0)

    def precond(self, rflat):
        r = rflat.reshape(self.n, *self.shape)
        rh = np.fft.fftn(r, axes=self.axes)
        zh = np.einsum("jl...,l...->j...", self.P0, rh)
        z = np.fft.ifftn(zh, axes=self.axes)
        z = z if self.complex else z.real
        return z.reshape(-1)

    def broadcast_E0(self, E0):
        """Constant field (dim, n) as a cell array (dim, n, *shape)."""
        base = np.asarray(E0, dtype=self.dtype).reshape(self.dim, self.n, *(1,) * self.dim)
        return np.broadcast_to(base, (self.dim, self.n, *self.shape))

    def rhs(self, E0):
        J0 = self._sigma_dot(self.broadcast_E0(E0))
        return -self.divergence_adj(J0).reshape(-1)

    # -- sparse direct fallback ----------------------------------------------

    def _assemble_sparse(self):
        C = self.cells
        n, dim = self.n, self.dim
        K = n * dim
        idx = np.arange(C).reshape(self.shape)
        diffs = []
        for a in range(dim):
            shifted = np.roll(idx, -1, axis=a).reshape(-1)
            rows = np.concatenate([np.arange(C), np.arange(C)])
            cols = np.concatenate([shifted, np.arange(C)])
            data = np.concatenate([np.full(C, self.N, float), np.full(C, -self.N, float)])
            diffs.append(scipy.sparse.csr_matrix((data, (rows, cols)), shape=(C, C)))
        blocks = []
        for l in range(n):
            for a in range(dim):
                row = [None] * n
                row[l] = diffs[a]
                blocks.append(row)
        D = scipy.sparse.bmat(blocks, format="csr")  # (K*C, n*C), row block dim*l + a
        chi = self.chi.reshape(-1)
        sig = np.einsum("pq,c->pqc", self.m1, chi) + np.einsum("pq,c->pqc", self.m2, 1.0 - chi)
        rows = (np.arange(K)[:, None, None] * C + np.arange(C)[None, None, :]) * np.ones((1, K, 1), int)
        cols = (np.arange(K)[None, :, None] * C + np.arange(C)[None, None, :]) * np.ones((K, 1, 1), int)
        Sig = scipy.sparse.csr_matrix(
            (sig.reshape(-1), (rows.reshape(-1), cols.reshape(-1))), shape=(K * C, K * C)
        )
        A = (D.T @ Sig @ D).tocsc()
        # pin the constant mode of every potential by a consistent rank-one penalty
        scale = abs(A.diagonal()).mean() + 1.0
        pins = np.arange(n) * C
        pin = scipy.sparse.csr_matrix(
            (np.full(n, scale), (pins, pins)), shape=(n * C, n * C)
        )
        return (A + pin).tocsc()

    def solve_direct(self, b):
        if self._lu is None:
            self._lu = scipy.sparse.linalg.splu(self._assemble_sparse())
        return self._lu.solve(b.astype(self.dtype))

    def solve(self, E0, tol=1e-10, maxiter=None, method="auto"):
        b = self.rhs(E0)
        nb = np.linalg.norm(b)
        size = b.size
        if nb == 0.0:
            return np.zeros(size, dtype=self.dtype), 0.0, 0
        if maxiter is None:
            maxiter = 20 * self.N
        contrast = _contrast(self.m1, self.m2)
        use_direct = method == "direct" or (
            method == "auto" and contrast > _HIGH_CONTRAST and size <= _DIRECT_MAX_UNKNOWNS
        )
        if use_direct:
            u = self.solve_direct(b)
            res = np.linalg.norm(b - self.matvec(u)) / nb
            return u, float(res), 0
        op = scipy.sparse.linalg.LinearOperator((size, size), matvec=self.matvec, dtype=self.dtype)
        M = scipy.sparse.linalg.LinearOperator((size, size), matvec=self.precond, dtype=self.dtype)
        iters = [0]

        def cb(_):
            iters[0] += 1

        if self.symmetric:
            u, info = scipy.sparse.linalg.cg(op, b, rtol=tol, atol=0.0, maxiter=maxiter, M=M, callback=cb)
        else:
            u, info = scipy.sparse.linalg.bicgstab(
                op, b, rtol=tol, atol=0.0, maxiter=maxiter, M=M, callback=cb
            )
        res = np.linalg.norm(b - self.matvec(u)) / nb
        if info != 0 or res > 10.0 * tol:
            if method == "auto" and size <= _DIRECT_MAX_UNKNOWNS:
                u = self.solve_direct(b)
                res = np.linalg.norm(b - self.matvec(u)) / nb
                return u, float(res), iters[0]
            raise NoConvergence(
                f"iterative cell solve stalled at residual {res:.3e} after {iters[0]} iterations",
                iterations=iters[0],
                residual=float(res),
            )
        return u, float(res), iters[0]


def _as_E0(E0, dim, n, dtype=float):
    E0 = np.asarray(E0, dtype=dtype)
    if E0.ndim == 1:
        E0 = E0.reshape(dim, 1) if n == 1 else E0.reshape(n, dim).T
    if E0.shape != (dim, n):
        raise UserInputError(f"E0 must be {dim} x {n}, got {E0.shape}")
    return E0


def solve_cell(geom, L1, L2, E0, *, n=None, tol=1e-10, maxiter=None, method="auto", reference=None):
    """Solve the periodic cell problem at prescribed average field E0.

    L1, L2 may be BlockTensors (2D block problems) or (dim*n) x (dim*n)
    matrices / scalars.  Returns the cellwise fields E, J with <E> = E0 and
    every flux column discretely divergence-free to the solver residual.
    """
    if n is None:
        n = L1.n if isinstance(L1, BlockTensor) else (np.asarray(L1).shape[0] // geom.dim if np.asarray(L1).ndim else 1)
    m1 = _phase_matrix(L1, geom.dim, n)
    m2 = _phase_matrix(L2, geom.dim, n)
    if _contrast(m1, m2) > _MAX_CONTRAST:
        raise ContrastTooHigh(f"phase contrast exceeds {_MAX_CONTRAST:.1e}")
    op = _CellOperator(geom, m1, m2, reference=reference)
    E0 = _as_E0(E0, geom.dim, n, dtype=op.dtype)
    u, res, iters = op.solve(E0, tol=tol, maxiter=maxiter, method=method)
    E = op.gradient(u.reshape(n, *op.shape)) + op.broadcast_E0(E0)
    J = op._sigma_dot(E)
    avg_E = E.mean(axis=tuple(range(2, 2 + geom.dim)))
    avg_J = J.mean(axis=tuple(range(2, 2 + geom.dim)))
    return FieldSolution(geom, n, E0, E, J, avg_E, avg_J, res, iters)


def effective_matrix_cell(geom, L1, L2, *, n=None, tol=1e-10, maxiter=None, method="auto"):
    """Raw (dim*n) x (dim*n) effective matrix, assembled column by column from <J>."""
    if n is None:
        n = L1.n if isinstance(L1, BlockTensor) else (np.asarray(L1).shape[0] // geom.dim if np.asarray(L1).ndim else 1)
    m1 = _phase_matrix(L1, geom.dim, n)
    m2 = _phase_matrix(L2, geom.dim, n)
    if _contrast(m1, m2) > _MAX_CONTRAST:
        raise ContrastTooHigh(f"phase contrast exceeds {_MAX_CONTRAST:.1e}")
    op = _CellOperator(geom, m1, m2)
    K = geom.dim * n
    Mstar = np.zeros((K, K), dtype=op.dtype)
    for col in range(K):
        e0 = np.zeros(K)
        e0[col] = 1.0
        E0 = e0.reshape(n, geom.dim).T  # component index dim*l + a
        u, _, _ = op.solve(E0.astype(op.dtype), tol=tol, maxiter=maxiter, method=method)
        E = op.gradient(u.reshape(n, *op.shape)) + op.broadcast_E0(E0)
        J = op._sigma_dot(E)
        avg_J = J.mean(axis=tuple(range(2, 2 + geom.dim)))
        Mstar[:, col] = np.moveaxis(avg_J, 0, 1).reshape(-1)
    return Mstar


def effective_tensor_cell(geom, L1, L2, *, n=None, tol=1e-10, maxiter=None, method="auto"):
    """Effective BlockTensor of a 2D cell problem (block symmetry to solver tolerance)."""
    if geom.dim != 2:
        raise UserInputError("effective_tensor_cell wraps 2D problems; use effective_matrix_cell in 3D")
    M = effective_matrix_cell(geom, L1, L2, n=n, tol=tol, maxiter=maxiter, method=method)
    return BlockTensor(M, sym_tol=1e-4)


def sigma_star_fn(geom, sigma, *, tol=1e-10, maxiter=None, method="auto"):
    """Effective conductivity matrix at scalar contrast sigma against background 1."""
    s = complex(sigma)
    if s.imag == 0.0 and s.real <= 0.0:
        raise BranchCut(f"sigma = {sigma} lies on the closed negative real axis")
    if s.imag == 0.0:
        s = s.real
    eye = np.eye(geom.dim)
    return effective_matrix_cell(geom, s * eye, eye, n=1, tol=tol, maxiter=maxiter, method=method)


# ---------------------------------------------------------------------------
# field diagnostics


@dataclass(frozen=True)
class CofactorReport:
    """Pointwise det(E) and (3D) tr cof(E) statistics over the cell."""

    dim: int
    min_det: float
    max_det: float
    frac_det_negative: float
    min_trcof: float | None
    max_trcof: float | None
    frac_trcof_negative: float | None


def cofactor_diagnostics(sol):
    """Per-cell determinant and cofactor-trace statistics of the matrix field E.

    Requires an n = dim solution (square per-cell matrices), normally with
    <E> = I.
    """
    dim = sol.geometry.dim
    if sol.n != dim:
        raise UserInputError(f"cofactor diagnostics need n = dim = {dim}, got n = {sol.n}")
    Emat = np.moveaxis(sol.E.real, (0, 1), (-2, -1))  # (*shape, dim, n)
    dets = np.linalg.det(Emat)
    if dim == 2:
        return CofactorReport(
            2, float(dets.min()), float(dets.max()), float((dets < 0).mean()), None, None, None
        )
    # tr cof(E) = sum of principal 2x2 minors
    E = Emat
    trcof = (
        E[..., 1, 1] * E[..., 2, 2] - E[..., 1, 2] * E[..., 2, 1]
        + E[..., 0, 0] * E[..., 2, 2] - E[..., 0, 2] * E[..., 2, 0]
        + E[..., 0, 0] * E[..., 1, 1] - E[..., 0, 1] * E[..., 1, 0]
    )
    return CofactorReport(
        3,
        float(dets.min()),
        float(dets.max()),
        float((dets < 0).mean()),
        float(trcof.min()),
        float(trcof.max()),
        float((trcof < 0).mean()),
    )


# ---------------------------------------------------------------------------
# Hall coefficient


def _hall_cross(h):
    h1, h2, h3 = h
    return np.array([[0.0, -h3, h2], [h3, 0.0, -h1], [-h2, h1, 0.0]])


def check_cubic_symmetry(geom):
    """True when the indicator is invariant under the axis transpositions."""
    ind = geom.indicator
    return all(
        np.array_equal(ind, ind.transpose(p)) for p in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]
    )


def hall_coefficient(geom, rho, R_H, h, method="direct", *, delta=1e-6, tol=1e-10, maxiter=None):
    """Effective Hall coefficient of a 3D geometry; phase 2 weakly conducting (delta).

    ``direct``: solve the non-symmetric problem at +-h, take the odd part of
    the effective resistivity and project it on the h-cross matrix.
    ``perturbation``: first-order formula built from the zero-field corrector
    matrix E(x) with <E> = I,

        delta sigma* = < E^T delta sigma_odd(x) E >,
        rho*_anti    = - rho*_s (delta sigma*) rho*_s,

    which agrees with the direct route to O(|h|).
    """
    if geom.dim != 3:
        raise UserInputError("Hall extraction needs a 3D geometry")
    h = np.asarray(h, dtype=float)
    if np.linalg.norm(h) > 1e-3 * rho:
        raise UserInputError("|h| must not exceed 1e-3 * rho (weak-field regime)")
    if not check_cubic_symmetry(geom):
        warnings.warn("geometry lacks cubic symmetry; R*_H is a projection", NotCubicWarning)
    Om = _hall_cross(h)
    sig_plus = np.linalg.inv(rho * np.eye(3) + R_H * Om)
    sig_minus = np.linalg.inv(rho * np.eye(3) - R_H * Om)
    m2 = delta * np.eye(3)
    hh = 2.0 * float(h @ h)
    if hh == 0.0:
        raise UserInputError("magnetic field h must be nonzero")

    if method == "direct":
        s_p = effective_matrix_cell(geom, sig_plus, m2, n=1, tol=tol, maxiter=maxiter)
        s_m = effective_matrix_cell(geom, sig_minus, m2, n=1, tol=tol, maxiter=maxiter)
        rho_odd = 0.5 * (np.linalg.inv(s_p) - np.linalg.inv(s_m))
        return float(np.sum(rho_odd * Om) / hh)

    if method == "perturbation":
        sig_s = (1.0 / rho) * np.eye(3)
        op = _CellOperator(geom, sig_s, m2)
        Ecols = []
        sstar = np.zeros((3, 3))
        for col in range(3):
            E0 = np.zeros((3, 1))
            E0[col, 0] = 1.0
            u, _, _ = op.solve(E0, tol=tol, maxiter=maxiter)
            E = op.gradient(u.reshape(1, *op.shape)) + op.broadcast_E0(E0)
            Ecols.append(E[:, 0])
            sstar[:, col] = op._sigma_dot(E).mean(axis=(2, 3, 4))[:, 0]
        Emat = np.stack(Ecols, axis=1)  # (3, col, *shape)
        dsig_odd = 0.5 * (sig_plus - sig_minus)
        dstar = np.einsum("al...,ab,bm...,...->lm", Emat, dsig_odd, Emat, op.chi) / op.cells
        rho_s = np.linalg.inv(sstar)
        rho_anti = -rho_s @ dstar @ rho_s
        return float(np.sum(rho_anti * Om) / hh)

    raise UserInputError(f"unknown Hall method {method!r}")
