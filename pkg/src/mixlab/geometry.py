"""Periodic pixel/voxel two-phase geometries and named generators.

The indicator field is 1 on phase 1 and 0 on phase 2, sampled at cell centers
of an N^dim grid on the unit torus.  Generators that represent a fixed
continuum geometry (``random``, ``randcubic``) are resolution-refinable: the
same seed produces samples of one band-limited level-set at every N, so
discretization studies over N are meaningful.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import UserInputError


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CellGeometry:
    """Periodic indicator field chi in {0,1} on an N^dim grid, 1 on phase 1."""

    dim: int
    N: int
    indicator: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UserInputError(f"dim must be 2 or 3, got {self.dim}")
        if not _is_power_of_two(self.N):
            raise UserInputError(f"grid size must be a power of two, got {self.N}")
        ind = np.ascontiguousarray(np.asarray(self.indicator, dtype=np.uint8))
        if ind.shape != (self.N,) * self.dim:
            raise UserInputError(
                f"indicator shape {ind.shape} does not match N={self.N}, dim={self.dim}"
            )
        if not np.all((ind == 0) | (ind == 1)):
            raise UserInputError("indicator must be 0/1 valued")
        ind.flags.writeable = False
        object.__setattr__(self, "indicator", ind)

    @property
    def volume_fraction(self):
        return float(self.indicator.mean())

    def swapped(self):
        """Phase-interchanged geometry (chi -> 1 - chi)."""
        return CellGeometry(self.dim, self.N, 1 - self.indicator)


# ---------------------------------------------------------------------------
# file format: JSON header {"dim","N","encoding"} + payload


def geometry_to_json_dict(geom, encoding="rle"):
    d = {"dim": geom.dim, "N": geom.N, "encoding": encoding}
    flat = geom.indicator.reshape(-1)
    if encoding == "dense":
        per_slice = geom.N ** (geom.dim - 1)
        nslices = geom.N if geom.dim == 3 else 1
        d["slices"] = [
            "".join("1" if v else "0" for v in flat[s * per_slice : (s + 1) * per_slice])
            for s in range(nslices)
        ]
    elif encoding == "rle":
        # run-length over the row-major flattening, starting with the value of cell 0
        change = np.flatnonzero(np.diff(flat)) + 1
        bounds = np.concatenate(([0], change, [flat.size]))
        d["start"] = int(flat[0])
        d["runs"] = np.diff(bounds).tolist()
    else:
        raise UserInputError(f"unknown encoding {encoding!r}")
    return d


def geometry_from_json_dict(d):
    dim, N = int(d["dim"]), int(d["N"])
    enc = d.get("encoding", "dense")
    if enc == "dense":
        flat = np.frombuffer("".join(d["slices"]).encode(), dtype=np.uint8) - ord("0")
    elif enc == "rle":
        runs = np.asarray(d["runs"], dtype=np.int64)
        vals = (int(d["start"]) + np.arange(len(runs))) % 2
        flat = np.repeat(vals.astype(np.uint8), runs)
    else:
        raise UserInputError(f"unknown encoding {enc!r}")
    return CellGeometry(dim, N, flat.reshape((N,) * dim))


def save_geometry(geom, path, encoding="rle"):
    with open(path, "w") as fh:
        json.dump(geometry_to_json_dict(geom, encoding), fh)
        fh.write("\n")


def load_geometry(path):
    with open(path) as fh:
        return geometry_from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# named generators


def stripes(N, f=0.5, dim=2, axis=0):
    """Axis-aligned layers: phase 1 occupies x_axis < f (one period per cell)."""
    ind = np.zeros((N,) * dim, dtype=np.uint8)
    count = int(round(f * N))
    sl = [slice(None)] * dim
    sl[axis] = slice(0, count)
    ind[tuple(sl)] = 1
    return CellGeometry(dim, N, ind)


def checkerboard(N):
    """2D checkerboard with one period per cell (f = 1/2)."""
    i, j = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    ind = (((i // (N // 2)) + (j // (N // 2))) % 2 == 0).astype(np.uint8)
    return CellGeometry(2, N, ind)


_REFERENCE_N = {2: 256, 3: 64}
_KMAX = {2: 4, 3: 3}


def _bandlimited_field(seed, N, dim):
    """Sample of a fixed random trigonometric polynomial on the N^dim grid.

    Coefficients sit at low wavenumbers (|k_i| <= kmax) and depend on the seed
    only, so every N samples the same continuum function (the ifft is rescaled
    by N^dim to cancel numpy's normalization).
    """
    import itertools

    kmax = _KMAX[dim]
    rng = np.random.default_rng(seed)
    spec = np.zeros((N,) * dim, dtype=complex)
    for k in itertools.product(range(-kmax, kmax + 1), repeat=dim):
        c = complex(rng.standard_normal(), rng.standard_normal())
        spec[tuple(ki % N for ki in k)] = c
    fld = np.fft.ifftn(spec) * N**dim
    return np.real(fld)  # real part = field of Hermitian-symmetrized coefficients


def random_blobs(N, seed, f, dim=2):
    """Thresholded band-limited random field; refinable across N for fixed seed."""
    fld = _bandlimited_field(seed, N, dim)
    ref = _bandlimited_field(seed, _REFERENCE_N[dim], dim)
    thresh = np.quantile(ref.reshape(-1), 1.0 - f)
    return CellGeometry(dim, N, (fld > thresh).astype(np.uint8))


def cubes(N, f):
    """3D simple-cubic array: one centered cube per cell with volume fraction ~ f."""
    side = int(round(N * f ** (1.0 / 3.0)))
    side = min(max(side, 1), N)
    a = (N - side) // 2
    ind = np.zeros((N, N, N), dtype=np.uint8)
    ind[a : a + side, a : a + side, a : a + side] = 1
    return CellGeometry(3, N, ind)


_PERMS3 = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]


def symmetrize_cubic(ind):
    """Majority vote over axis permutations and reflections (full cubic group)."""
    ind = np.asarray(ind, dtype=np.uint8)
    votes = np.zeros(ind.shape, dtype=np.int32)
    count = 0
    for perm in _PERMS3:
        base = ind.transpose(perm)
        for fx in (slice(None), slice(None, None, -1)):
            for fy in (slice(None), slice(None, None, -1)):
                for fz in (slice(None), slice(None, None, -1)):
                    votes += base[fx, fy, fz]
                    count += 1
    return (2 * votes > count).astype(np.uint8)


def rand_cubic(N, seed, f):
    """3D random geometry symmetrized to full cubic symmetry."""
    raw = random_blobs(N, seed, f, dim=3)
    return CellGeometry(3, N, symmetrize_cubic(raw.indicator))


def _ring(x, y, z, plane, center, r_in, r_out, thickness):
    """Square-cross-section ring: slab in `plane`, square annulus in the other two axes.

    All coordinates periodic on [0,1); distances use the wrap-around metric.
    """
    coords = (x, y, z)

    def pdist(c, c0):
        d = np.abs(c - c0)
        return np.minimum(d, 1.0 - d)

    others = [i for i in range(3) if i != plane]
    slab = pdist(coords[plane], center[plane]) < 0.5 * thickness
    u = pdist(coords[others[0]], center[others[0]])
    v = pdist(coords[others[1]], center[others[1]])
    ring = (np.maximum(u, v) >= r_in) & (np.maximum(u, v) < r_out)
    return slab & ring


def tori_chain(N):
    """Interlinked rectangular rings, symmetrized over the cubic group.

    Chains of alternating orthogonal rings run along each axis (each ring
    threads the periodic images of its neighbours); the union over all axis
    permutations restores cubic symmetry.
    """
    c = (np.arange(N) + 0.5) / N
    x, y, z = np.meshgrid(c, c, c, indexing="ij")
    r_in, r_out, t = 5.0 / 16.0, 7.0 / 16.0, 1.0 / 8.0
    # chain along x: ring normal y at x=0, ring normal z at x=1/2
    chain = _ring(x, y, z, 1, (0.0, 0.5, 0.5), r_in, r_out, t) | _ring(
        x, y, z, 2, (0.5, 0.5, 0.5), r_in, r_out, t
    )
    ind = np.zeros((N, N, N), dtype=bool)
    arr = chain
    for perm in _PERMS3:
        ind |= arr.transpose(perm)
    return CellGeometry(3, N, ind.astype(np.uint8))


_SPEC_RE = re.compile(r"^(?P<name>[a-zA-Z][\w-]*)(?:\((?P<args>[^)]*)\))?@(?P<N>\d+)$")


def parse_geometry_spec(spec):
    """Parse a generator string like ``checkerboard@256`` or ``random(7,0.5)@64``."""
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise UserInputError(f"cannot parse geometry spec {spec!r}")
    name = m.group("name")
    N = int(m.group("N"))
    args = [a.strip() for a in m.group("args").split(",")] if m.group("args") else []
    try:
        if name == "stripes":
            f = float(args[0]) if args else 0.5
            dim = int(args[1]) if len(args) > 1 else 2
            return stripes(N, f=f, dim=dim)
        if name == "checkerboard":
            return checkerboard(N)
        if name == "random":
            return random_blobs(N, int(args[0]), float(args[1]))
        if name == "random3d":
            return random_blobs(N, int(args[0]), float(args[1]), dim=3)
        if name == "randcubic":
            return rand_cubic(N, int(args[0]), float(args[1]))
        if name == "cubes":
            return cubes(N, float(args[0]))
        if name == "tori-chain":
            return tori_chain(N)
    except (IndexError, ValueError) as exc:
        raise UserInputError(f"bad arguments in geometry spec {spec!r}: {exc}") from exc
    raise UserInputError(f"unknown geometry generator {name!r}")
