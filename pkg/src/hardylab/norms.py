"""Maximal operators and (quasi-)norm evaluators on the lattice.

The small maximal function m_phi u = sup over scales t of |u * phi_t| drives
the localizable Hardy quasi-norms ||u||_{h^p} = ||m_phi u||_{L^p}; the grand
maximal takes the sup over a fixed finite dictionary of profiles. The
continuous sup over t in (0,1) is replaced throughout by a dyadic scale list
(optionally down to the one-cell scale); Hardy--Littlewood and fractional
maximal functions run over the finite family of lattice-centered balls of
dyadic radii that contain the evaluation point. Cube-based bmo and the pair
sweeps of the Holder seminorms are likewise finite, declared families, exact
enough to be brute-forced by the test oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import ChannelMismatch, EmptyDictionary, EmptyScaleSet, OutOfRange
from .grid import GridFunction, GridSpec, convolve_scaled, derivative, linf_norm, lp_norm, multi_indices
from .mollifiers import Mollifier, default_mollifier, moment2_bump, oscillating_bump_profile


# ---------------------------------------------------------------------------
# scale sets and profile dictionaries


@dataclass(frozen=True)
class ScaleSet:
    """Strictly decreasing scales in (0, 1) for the maximal sup."""

    scales: tuple[float, ...]

    def __post_init__(self):
        s = self.scales
        if len(s) == 0:
            raise EmptyScaleSet("scale set is empty")
        if any(not (0.0 < t < 1.0) for t in s):
            raise ValueError("scales must lie in (0, 1)")
        if any(a <= b for a, b in zip(s, s[1:])):
            raise ValueError("scales must be strictly decreasing")

    @classmethod
    def dyadic(cls, levels: int = 6, include_cell_scale: bool = False,
               spec: GridSpec | None = None) -> "ScaleSet":
        scales = [2.0 ** (-j) for j in range(1, levels + 1)]
        if include_cell_scale:
            if spec is None:
                raise ValueError("include_cell_scale requires a grid spec")
            if spec.h < scales[-1]:
                scales.append(spec.h)
        return cls(tuple(scales))

    def __iter__(self):
        return iter(self.scales)

    def __len__(self):
        return len(self.scales)


@dataclass(frozen=True)
class MaximalDictionary:
    """Finite profile family for the grand maximal function."""

    profiles: tuple[Mollifier, ...]

    def __post_init__(self):
        if len(self.profiles) == 0:
            raise EmptyDictionary("maximal dictionary is empty")
        for prof in self.profiles:
            if prof.support_radius > 1.0 + 1e-12:
                raise ValueError(f"profile {prof.name} not supported in the unit ball")

    def l1_bound(self, dim: int) -> float:
        return max(p.l1_norm(dim) for p in self.profiles)


_dict_cache: dict[int, MaximalDictionary] = {}


def default_dictionary(dim: int) -> MaximalDictionary:
    """Three registered profiles: bump, moment-corrected bump, oscillatory."""
    if dim not in _dict_cache:
        _dict_cache[dim] = MaximalDictionary(
            (default_mollifier(dim), moment2_bump(dim), oscillating_bump_profile(dim))
        )
    return _dict_cache[dim]


def default_scales(spec: GridSpec, levels: int = 6, include_cell_scale: bool = True) -> ScaleSet:
    return ScaleSet.dyadic(levels, include_cell_scale, spec)


# ---------------------------------------------------------------------------
# small / grand maximal and Hardy quasi-norms


def small_maximal(u: GridFunction, phi: Mollifier | None = None,
                  scales: ScaleSet | None = None) -> GridFunction:
    """m_phi u = max over the scale list of |u * phi_t| (single channel out).

    Multi-channel input takes the pointwise Euclidean magnitude of the
    mollified vector.
    """
    phi = phi if phi is not None else default_mollifier(u.spec.dim)
    scales = scales if scales is not None else default_scales(u.spec)
    if len(scales) == 0:
        raise EmptyScaleSet("scale set is empty")
    out = np.zeros(u.spec.shape)
    for t in scales:
        conv = convolve_scaled(u, phi, t)
        np.maximum(out, conv.magnitude(), out=out)
    return GridFunction(u.spec, out[np.newaxis].astype(complex))


def hp_norm(u: GridFunction, p: float, phi: Mollifier | None = None,
            scales: ScaleSet | None = None) -> float:
    """Localizable Hardy quasi-norm ||m_phi u||_{L^p}, 0 < p < inf."""
    if not (0.0 < p < np.inf):
        raise OutOfRange(f"hp_norm requires 0 < p < inf, got p = {p}")
    return lp_norm(small_maximal(u, phi, scales), p)


def grand_maximal(f: GridFunction, dictionary: MaximalDictionary | None = None,
                  scales: ScaleSet | None = None) -> GridFunction:
    """Pointwise max of the small maximal over the profile dictionary."""
    dictionary = dictionary if dictionary is not None else default_dictionary(f.spec.dim)
    out = np.zeros(f.spec.shape)
    for prof in dictionary.profiles:
        m = small_maximal(f, prof, scales)
        np.maximum(out, m.values[0].real, out=out)
    return GridFunction(f.spec, out[np.newaxis].astype(complex))


# ---------------------------------------------------------------------------
# Hardy--Littlewood and fractional maximal over the lattice ball family


def default_radii(spec: GridSpec, max_radius: float | None = None) -> tuple[float, ...]:
    """Dyadic radius list from max_radius (default W/2) down to one cell."""
    top = max_radius if max_radius is not None else spec.box_half_width / 2.0
    radii = []
    t = top
    while t > spec.h:
        radii.append(t)
        t /= 2.0
    radii.append(spec.h * 1.0001)  # one-cell ball: only the center cell
    return tuple(radii)


def _ball_footprint(spec: GridSpec, t: float) -> np.ndarray:
    m = int(np.floor(t / spec.h))
    rng = np.arange(-m, m + 1) * spec.h
    grids = np.meshgrid(*([rng] * spec.dim), indexing="ij")
    r = np.sqrt(sum(g ** 2 for g in grids))
    return r < t


def _ball_averages(mag_q: np.ndarray, spec: GridSpec, t: float) -> np.ndarray:
    """avg over B(c, t) of the array, for every lattice center c (periodic)."""
    fp = _ball_footprint(spec, t)
    kernel = fp.astype(float) / fp.sum()
    return ndimage.correlate(mag_q, kernel, mode="wrap")


def hl_maximal(f: GridFunction, radii: Sequence[float] | None = None) -> GridFunction:
    """Mf(x) = max over balls B(c,t) containing x of the discrete ball average
    of |f|; centers run over the lattice and t over the dyadic radius list.
    """
    spec = f.spec
    radii = tuple(radii) if radii is not None else default_radii(spec)
    mag = f.magnitude()
    out = np.zeros(spec.shape)
    for t in radii:
        avg = _ball_averages(mag, spec, t)
        # c is admissible for x iff |c - x| < t: same footprint as the average
        best = ndimage.maximum_filter(avg, footprint=_ball_footprint(spec, t), mode="wrap")
        np.maximum(out, best, out=out)
    return GridFunction(spec, out[np.newaxis].astype(complex))


def unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def fractional_maximal(f: GridFunction, q: float,
                       radii: Sequence[float] | None = None) -> GridFunction:
    """M_q f(x) = sup over the same ball family of (t^-N int_B |f|^q)^(1/q),
    with t^-N int_B realized as omega_N * avg_B under the cell-counting
    measure, so M_1 f = omega_N * Mf exactly.
    """
    if q <= 0:
        raise OutOfRange(f"fractional_maximal requires q > 0, got q = {q}")
    spec = f.spec
    radii = tuple(radii) if radii is not None else default_radii(spec)
    mag_q = f.magnitude() ** q
    omega = unit_ball_volume(spec.dim)
    out = np.zeros(spec.shape)
    for t in radii:
        avg = _ball_averages(mag_q, spec, t)
        best = ndimage.maximum_filter(avg, footprint=_ball_footprint(spec, t), mode="wrap")
        np.maximum(out, best, out=out)
    return GridFunction(spec, ((omega * out) ** (1.0 / q))[np.newaxis].astype(complex))


# ---------------------------------------------------------------------------
# Sobolev / Hardy--Sobolev norms


def sobolev_norm(v: GridFunction, k: int, q: float) -> float:
    """||v||_{W^{k,q}} = sum over |gamma| <= k of ||D^gamma v||_{L^q}, q in (1, inf]."""
    if k < 0:
        raise OutOfRange(f"sobolev_norm requires k >= 0, got {k}")
    if not (1.0 < q):
        raise OutOfRange(f"sobolev_norm requires q in (1, inf], got q = {q}")
    total = 0.0
    for gamma in multi_indices(v.spec.dim, k):
        d = derivative(v, gamma)
        total += linf_norm(d) if np.isinf(q) else lp_norm(d, q)
    return total


def hardy_sobolev_norm(f: GridFunction, m: int, p: float,
                       phi: Mollifier | None = None, scales: ScaleSet | None = None,
                       homogeneous: bool = False) -> float:
    """sum over |beta| <= m (or |beta| = m when homogeneous) of ||D^beta f||_{h^p}."""
    if m < 0:
        raise OutOfRange(f"hardy_sobolev_norm requires m >= 0, got {m}")
    if p <= 0:
        raise OutOfRange(f"hardy_sobolev_norm requires p > 0, got p = {p}")
    total = 0.0
    for beta in multi_indices(f.spec.dim, m):
        if homogeneous and beta.order != m:
            continue
        total += hp_norm(derivative(f, beta), p, phi, scales)
    return total


# ---------------------------------------------------------------------------
# Holder / Zygmund seminorms


def _offsets_up_to(spec: GridSpec, cap: float, stride: int = 1):
    m = int(np.floor(cap / spec.h))
    rng = range(-m, m + 1)
    for delta in np.ndindex(*((2 * m + 1,) * spec.dim)):
        d = tuple(int(j) - m for j in delta)
        if all(v == 0 for v in d):
            continue
        if any(v % stride for v in d):
            continue
        r = math.hypot(*d) * spec.h if spec.dim > 1 else abs(d[0]) * spec.h
        if 0.0 < r <= cap:
            yield d, r


def _valid_mask(spec: GridSpec, delta: tuple[int, ...], symmetric: bool) -> np.ndarray:
    """Base points x for which x+delta (and x-delta if symmetric) stay in-box."""
    mask = np.ones(spec.shape, bool)
    n = spec.points_per_axis
    for axis, d in enumerate(delta):
        idx = np.arange(n)
        ok = (idx + d >= 0) & (idx + d < n)
        if symmetric:
            ok &= (idx - d >= 0) & (idx - d < n)
        shape = [1] * spec.dim
        shape[axis] = n
        mask &= ok.reshape(shape)
    return mask


def holder_seminorm(f: GridFunction, r: float, cap: float | None = None,
                    stride: int = 1) -> float:
    """Discrete homogeneous Holder seminorm of order r = k + s, 0 < s <= 1.

    Takes D^alpha f for all |alpha| = k and sweeps lattice pairs (x, x+h) with
    0 < |h| <= cap; s = 1 uses the symmetric (Zygmund) second difference.
    Pairs that would wrap through the periodic boundary are excluded, and the
    cap defaults to the declared support radius (half the support diameter).
    """
    if r <= 0:
        raise OutOfRange(f"holder_seminorm requires r > 0, got r = {r}")
    k = int(math.ceil(r)) - 1
    s = r - k
    spec = f.spec
    if cap is None:
        cap = f.support_radius if f.support_radius is not None else spec.box_half_width / 2.0
    cap = min(cap, spec.box_half_width)
    axes = tuple(range(1, spec.dim + 1))
    total = 0.0
    for alpha in multi_indices(spec.dim, k):
        if alpha.order != k:
            continue
        g = derivative(f, alpha).values if k > 0 else f.values
        best = 0.0
        for delta, dist in _offsets_up_to(spec, cap, stride):
            shift = tuple(-d for d in delta)
            if s < 1.0:
                diff = np.linalg.norm(np.roll(g, shift, axis=axes) - g, axis=0)
                mask = _valid_mask(spec, delta, symmetric=False)
                quot = diff[mask] / dist ** s
            else:
                second = np.linalg.norm(np.roll(g, shift, axis=axes)
                                        + np.roll(g, delta, axis=axes) - 2.0 * g, axis=0)
                mask = _valid_mask(spec, delta, symmetric=True)
                quot = second[mask] / dist
            if quot.size:
                best = max(best, float(quot.max()))
        total += best
    return total


# ---------------------------------------------------------------------------
# bmo over the dyadic cube family


def _dyadic_levels(spec: GridSpec):
    n = spec.points_per_axis
    size = n
    while size >= 1:
        yield size  # cube side in cells
        if size == 1:
            break
        size //= 2


def _block_mean(arr: np.ndarray, size: int, dim: int) -> np.ndarray:
    """Per-cube mean over the dyadic partition with cubes of `size` cells."""
    n = arr.shape[0]
    shape = []
    for _ in range(dim):
        shape.extend([n // size, size])
    view = arr.reshape(shape)
    axes = tuple(2 * a + 1 for a in range(dim))
    return view.mean(axis=axes)


def _block_expand(block: np.ndarray, size: int, dim: int) -> np.ndarray:
    out = block
    for axis in range(dim):
        out = np.repeat(out, size, axis=axis)
    return out


def bmo_norm(f: GridFunction) -> float:
    """sup over dyadic cubes |Q|<1 of mean oscillation + sup over |Q|>=1 of mean |f|."""
    if f.channels != 1:
        raise ChannelMismatch("bmo_norm expects a single channel")
    spec = f.spec
    vals = f.values[0]
    small_term = 0.0
    large_term = 0.0
    for size in _dyadic_levels(spec):
        side = size * spec.h
        measure = side ** spec.dim
        if measure < 1.0:
            means = _block_mean(vals, size, spec.dim)
            dev = np.abs(vals - _block_expand(means, size, spec.dim))
            osc = _block_mean(dev, size, spec.dim)
            small_term = max(small_term, float(osc.max()))
        else:
            avg_abs = _block_mean(np.abs(vals), size, spec.dim)
            large_term = max(large_term, float(avg_abs.max()))
    return small_term + large_term


# ---------------------------------------------------------------------------
# exponent bookkeeping


def np_exponent(p: float, N: int) -> int:
    """N_p = floor(N (1/p - 1)), the moment order of standard atoms; p in (0, 1]."""
    if not (0.0 < p <= 1.0):
        raise OutOfRange(f"np_exponent requires 0 < p <= 1, got p = {p}")
    return int(math.floor(N * (1.0 / p - 1.0) + 1e-12))


def holder_index(p: float, N: int) -> float:
    """gamma_p = N (1/p - 1), the dual Holder order for p < 1."""
    if not (0.0 < p < 1.0):
        raise OutOfRange(f"holder_index requires 0 < p < 1, got p = {p}")
    return N * (1.0 / p - 1.0)


def sobolev_exponent(p: float, N: int, m: int) -> float:
    """p* = N p / (N - m p); infinity at p = N/m."""
    if p <= 0:
        raise OutOfRange(f"sobolev_exponent requires p > 0, got p = {p}")
    if m * p > N + 1e-12:
        raise OutOfRange(f"sobolev_exponent requires m p <= N, got m p = {m * p} > N = {N}")
    if abs(m * p - N) <= 1e-12:
        return float("inf")
    return N * p / (N - m * p)


@dataclass(frozen=True)
class Admissible:
    r: float
    ok: bool
    reason: str = ""


def admissible(p: float, q: float, N: int, m: int) -> Admissible:
    """Exponent gate: N/(N+m) < p <= N/m, 1 < q <= inf, 1/r = 1/p + 1/q < 1 + m/N."""
    if p <= 0 or q <= 0:
        raise OutOfRange(f"admissible requires positive exponents, got p = {p}, q = {q}")
    if m < 1 or N < 1:
        raise OutOfRange(f"admissible requires m, N >= 1, got m = {m}, N = {N}")
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    r = 1.0 / (1.0 / p + inv_q)
    if not (N / (N + m) < p <= N / m + 1e-12):
        return Admissible(r, False, f"p = {p} outside (N/(N+m), N/m] = ({N/(N+m):g}, {N/m:g}]")
    if not (1.0 < q or np.isinf(q)):
        return Admissible(r, False, f"q = {q} outside (1, inf]")
    if not (1.0 / r < 1.0 + m / N):
        return Admissible(r, False, f"1/r = {1.0/r:g} not < 1 + m/N = {1.0 + m/N:g}")
    return Admissible(r, True)
