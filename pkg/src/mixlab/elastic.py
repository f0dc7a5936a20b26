"""Planar elastic bounds: elementary bounds, the sliced material, polycrystal
extremes, and the auxetic limit.

The polycrystal extreme formulas exist in two variants.  The printed form
uses c1212 throughout; its epsilon -> 0 limit on the sliced material
contradicts the auxetic limit (kappa* tends to -mu(kappa+mu)/(2(kappa-mu)),
not 0).  Substituting c1122 for those occurrences while keeping the final
division by c1212 reproduces the auxetic limit exactly and maps an isotropic
crystal to itself, so the c1122 variant is the default; the printed variant
is kept for audit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, UserInputError


def _inv(x):
    """1/x with the convention 1/inf = 0."""
    return 0.0 if math.isinf(x) else 1.0 / x


@dataclass(frozen=True)
class IsoElastic:
    """Isotropic planar phase with bulk modulus kappa (may be inf) and shear mu."""

    kappa: float
    mu: float

    def __post_init__(self):
        if not (self.kappa > 0.0):
            raise UserInputError(f"bulk modulus must be positive, got {self.kappa}")
        if not (0.0 < self.mu < math.inf):
            raise UserInputError(f"shear modulus must be positive and finite, got {self.mu}")

    @property
    def young(self):
        """E = 4 kappa mu / (kappa + mu), finite also for incompressible kappa."""
        return 4.0 * self.mu / (1.0 + self.mu * _inv(self.kappa))


@dataclass(frozen=True)
class PlanarOrthotropic:
    """Orthotropic planar crystal acting on (eps11, eps22, eps12)."""

    c1111: float
    c1122: float
    c2222: float
    c1212: float

    def matrix(self):
        return np.array(
            [
                [self.c1111, self.c1122, 0.0],
                [self.c1122, self.c2222, 0.0],
                [0.0, 0.0, 2.0 * self.c1212],
            ]
        )

    def is_psd(self, tol=0.0):
        return bool(np.linalg.eigvalsh(self.matrix())[0] >= -tol)


@dataclass(frozen=True)
class ElementaryBounds:
    """0 <= kappa* <= kappa and 0 <= mu* <= mu for a phase mixed with void."""

    phase: IsoElastic

    def contains(self, kappa_star, mu_star, tol=0.0):
        return (
            -tol <= kappa_star <= self.phase.kappa + tol
            and -tol <= mu_star <= self.phase.mu + tol
        )

    def shear_slack(self, kappa_star, mu_star, c):
        """Slack of the implied inequality mu* - c kappa* <= mu (nonnegative inside)."""
        if c <= 0.0:
            raise UserInputError("the derived inequality needs c > 0")
        return self.phase.mu - (mu_star - c * kappa_star)


def elementary_bounds(phase):
    return ElementaryBounds(phase)


def sliced_material(kappa, mu, eps, c=0.0):
    """Slabs of the elastic phase separated by thin easy-compression layers.

    Effective moduli (c1111, c1122, c2222, c1212) = (eps, c*eps, E, mu) with
    E the Young combination of the phase.
    """
    if eps <= 0.0:
        raise UserInputError("eps must be positive")
    phase = IsoElastic(kappa, mu)
    return PlanarOrthotropic(eps, c * eps, phase.young, mu)


@dataclass(frozen=True)
class PolycrystalExtremes:
    kappa_star: float
    mu_star: float
    variant: str


def polycrystal_extremes(mat, variant="c1122-variant"):
    """Extremal (smallest kappa*, largest mu*) planar polycrystal of the crystal.

    ``c1122-variant`` (default) substitutes c1122 for the first three
    occurrences of c1212 while keeping the final division by c1212;
    ``as-printed`` evaluates the displayed formula verbatim.  A negative
    discriminant in the printed variant yields mu* = nan with a warning.
    """
    c1111, c1122, c2222, c1212 = mat.c1111, mat.c1122, mat.c2222, mat.c1212
    if variant == "c1122-variant":
        s = c1122
    elif variant == "as-printed":
        s = c1212
    else:
        raise UserInputError(f"unknown variant {variant!r}")

    det = c1111 * c2222 - s * s
    denom_k = c1111 + c2222 - 2.0 * s
    if denom_k == 0.0:
        raise DegenerateInput("kappa* denominator vanishes")
    kappa_star = det / denom_k
    if c1212 == 0.0:
        raise DegenerateInput("c1212 = 0 in the final division")
    radicand = c2222 * (c1111 + c2222 - 2.0 * s + det / c1212)
    if radicand < 0.0:
        warnings.warn(f"{variant}: negative discriminant, mu* undefined")
        return PolycrystalExtremes(kappa_star, math.nan, variant)
    denom_m = 2.0 * s - 2.0 * c2222 + 2.0 * math.sqrt(radicand)
    if denom_m == 0.0:
        raise DegenerateInput("mu* denominator vanishes")
    return PolycrystalExtremes(kappa_star, det / denom_m, variant)


def as_printed_kappa_limit(kappa, mu):
    """eps -> 0 limit of the printed kappa* formula on the sliced material.

    Evaluates -mu (kappa + mu) / (2 (kappa - mu)), the discrepancy the printed
    variant exhibits against the auxetic limit (which has kappa* = 0).
    """
    if kappa == mu:
        raise DegenerateInput("printed-variant limit diverges at kappa = mu")
    return -mu * (kappa + mu) / (2.0 * (kappa - mu))


def auxetic_limit(kappa, mu):
    """Limit pair (kappa*, mu*) = (0, 1 / (5/(4 mu) + 1/(4 kappa))).

    Shift invariance: moving 1/mu and -1/kappa by a common constant moves
    1/mu* by that constant; kappa = inf gives mu* = 4 mu / 5.
    """
    phase = IsoElastic(kappa, mu)
    inv_mu_star = 5.0 / (4.0 * phase.mu) + 0.25 * _inv(phase.kappa)
    return 0.0, 1.0 / inv_mu_star
