"""Analytic constraints on effective conductivity functions.

Every check consumes either raw (sigma, sigma_star) samples or a callable
sigma -> sigma_star and emits a CheckReport.  Tolerances depend on
provenance: laminate and oracle values are exact up to roundoff, cell-solver
values carry quantified discretization error, so those checks report
residuals against looser defaults instead of hard-failing.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np

from .blocktensor import R_PERP
from .errors import AnisotropyWarning, DimensionMismatch, WrongHalfPlane

_PROVENANCE_TOL = {"laminate": 1e-10, "oracle": 1e-10, "cell": 1e-6}


@dataclass(frozen=True)
class ConductivitySample:
    """One evaluation sigma -> sigma_star of an effective conductivity function."""

    sigma: complex
    sigma_star: np.ndarray
    f: float
    dim: int
    provenance: str = "laminate"

    def __post_init__(self):
        star = np.asarray(self.sigma_star)
        if star.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"sigma_star must be {self.dim} x {self.dim}")
        if not np.all(np.isfinite(star.view(float))):
            raise ValueError("non-finite sigma_star")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"volume fraction {self.f} outside [0,1]")


@dataclass(frozen=True)
class CheckReport:
    check: str
    provenance: str
    residual: float
    tolerance: float
    passed: bool
    digest: str = ""

    def csv_row(self):
        return f"{self.check},{self.provenance},{self.residual!r},{self.tolerance!r},{str(self.passed).lower()}"


CSV_HEADER = "check,provenance,residual,tolerance,pass"


def reports_to_csv(reports):
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"


def _digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
    return h.hexdigest()[:12]


def scalar_part(mat):
    """tr(sigma_star)/dim, the isotropic part of a conductivity matrix."""
    mat = np.asarray(mat)
    return np.trace(mat) / mat.shape[0]


def _warn_if_anisotropic(mat, context):
    mat = np.asarray(mat)
    s = scalar_part(mat)
    dev = np.linalg.norm(mat - s * np.eye(mat.shape[0])) / max(abs(s), 1e-300)
    if dev > 0.01:
        warnings.warn(
            f"{context}: tensor deviates from isotropy by {dev:.1%}; scalar part used",
            AnisotropyWarning,
        )


def herglotz_check(samples, tol=None):
    """Im(sigma_star) must be positive semidefinite whenever Im(sigma) > 0."""
    worst = 0.0
    ok = True
    prov = "mixed" if len({s.provenance for s in samples}) > 1 else samples[0].provenance
    for s in samples:
        if np.imag(s.sigma) <= 0.0:
            raise WrongHalfPlane(f"sample sigma={s.sigma} has Im <= 0")
        t = tol if tol is not None else _PROVENANCE_TOL.get(s.provenance, 1e-10)
        im = np.imag(np.asarray(s.sigma_star))
        lam = float(np.linalg.eigvalsh(0.5 * (im + im.T))[0])
        worst = max(worst, max(0.0, -lam))
        ok = ok and (lam >= -t)
    used = tol if tol is not None else _PROVENANCE_TOL.get(prov, 1e-10)
    return CheckReport("herglotz", prov, worst, used, ok, _digest([s.sigma for s in samples]))


def normalization_check(fn, f, *, dim=2, step=1e-5, value_tol=1e-12, slope_tol=1e-4,
                        provenance="laminate"):
    """sigma_star(1) = I exactly and d sigma_star / d sigma |_1 = f I.

    The derivative is a central finite difference with the given step.  The
    report residual is the worse of the two deviations normalized by its
    tolerance (pass iff residual <= 1).
    """
    eye = np.eye(dim)
    v = np.asarray(fn(1.0))
    val_resid = float(np.linalg.norm(np.real(v) - eye) + np.linalg.norm(np.imag(v)))
    slope = (np.asarray(fn(1.0 + step)) - np.asarray(fn(1.0 - step))) / (2.0 * step)
    slope_resid = float(np.linalg.norm(np.real(slope) - f * eye) + np.linalg.norm(np.imag(slope)))
    resid = max(val_resid / value_tol, slope_resid / slope_tol)
    return CheckReport("normalization", provenance, resid, 1.0, resid <= 1.0, _digest(f, step))


def keller_dykhne_check(fn, sigma, *, tol=1e-12, provenance="laminate"):
    """2D duality: sigma_star(1/sigma) = R projection of the inverse of sigma_star(sigma)."""
    s_direct = np.asarray(fn(1.0 / sigma))
    if s_direct.shape != (2, 2):
        raise DimensionMismatch("Keller-Dykhne duality is two-dimensional")
    s_dual = R_PERP @ np.linalg.inv(np.asarray(fn(sigma))) @ R_PERP.T
    resid = float(np.linalg.norm(s_direct - s_dual) / np.linalg.norm(s_direct))
    return CheckReport("keller-dykhne", provenance, resid, tol, resid <= tol, _digest(sigma))


def second_derivative_check(fn, f, *, step=1e-3, rel_tol=0.05, provenance="cell"):
    """3D identity: scalar part of sigma_star''(1) equals -2 f (1-f) / 3."""
    _warn_if_anisotropic(np.real(fn(2.0)), "second_derivative_check")
    s = lambda x: np.real(scalar_part(fn(x)))
    d2 = (s(1.0 + step) - 2.0 * s(1.0) + s(1.0 - step)) / step**2
    target = -2.0 * f * (1.0 - f) / 3.0
    if target == 0.0:
        resid = abs(d2)
        return CheckReport("second-derivative", provenance, resid, 1e-8, resid <= 1e-8, _digest(f))
    resid = abs(d2 - target) / abs(target)
    return CheckReport("second-derivative", provenance, resid, rel_tol, resid <= rel_tol, _digest(f, step))


def phase_interchange_check(fn, sigma, *, tol=1e-9, provenance="oracle"):
    """3D phase-interchange inequality on the scalar parts:

    s*(s) s*(1/s) + (s*(s) + s s*(1/s)) / (s + 1) >= 2  for real positive s.
    """
    if sigma <= 0.0:
        raise ValueError("phase-interchange inequality needs real positive sigma")
    m1 = np.real(np.asarray(fn(sigma)))
    m2 = np.real(np.asarray(fn(1.0 / sigma)))
    _warn_if_anisotropic(m1, "phase_interchange_check")
    s1 = float(np.real(scalar_part(m1)))
    s2 = float(np.real(scalar_part(m2)))
    lhs = s1 * s2 + (s1 + sigma * s2) / (sigma + 1.0)
    resid = max(0.0, 2.0 - lhs)
    return CheckReport("phase-interchange", provenance, resid, tol, lhs >= 2.0 - tol, _digest(sigma))


def coated_sphere_oracle(sigma, f, dim=3, which="core-phase-1"):
    """Classical coated-sphere (d=3) / coated-disk (d=2) effective conductivity.

    Phases are (sigma, 1) with phase-1 volume fraction f; ``which`` selects
    the core phase.  Serves as an exactly-known isotropic test geometry.
    """
    if not 0.0 < f < 1.0:
        raise ValueError("core fraction must be strictly inside (0,1)")
    if which == "core-phase-1":
        s_core, s_coat, f_core = sigma, 1.0, f
    elif which == "core-phase-2":
        s_core, s_coat, f_core = 1.0, sigma, 1.0 - f
    else:
        raise ValueError(f"unknown coating order {which!r}")
    d = dim
    return s_coat + d * f_core * s_coat * (s_core - s_coat) / (
        d * s_coat + (1.0 - f_core) * (s_core - s_coat)
    )
