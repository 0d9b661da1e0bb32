"""Local polynomial approximation: weighted orthonormal bases on cubes,
reproducing projector kernels, Taylor polynomials, and the scale-sup
deviation operator behind the Poincare-type inequality.

The projector on a cube Q carries an orthonormal basis of polynomials of
degree < m under the weighted product <p, q> = sum p conj(q) eta * (h/l)^N
over the lattice cells of Q. Orthonormalizing against the *lattice*
quadrature (not a continuum rule) makes two properties exact to machine
precision at every resolution: reproduction of polynomials, and vanishing
moments of projection residuals against every polynomial of the space.

The registered weight eta is a radial bump supported in the inscribed ball
of the cube. Consequently a projection restricted to the inscribed ball
coincides with the unrestricted one, and the deviation operator

    T f(x) = sup_t ( avg over B(x,t) of |t^-m (f - P_{x,t,f})|^alpha )^(1/alpha)

annihilates polynomials of degree < m exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BallOutsideDomain, ChannelMismatch, IllConditioned, OutOfRange
from .grid import (GridFunction, GridSpec, MultiIndex, as_multi_index, bump_profile,
                   derivative, multi_indices)
from .norms import ScaleSet, default_scales

_GRAM_COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# polynomial spaces and polynomials


@dataclass(frozen=True)
class PolySpace:
    """Polynomials of degree <= max_degree in N variables, graded monomial basis."""

    dim_ambient: int
    max_degree: int
    monomials: tuple[MultiIndex, ...]

    @classmethod
    def create(cls, dim: int, max_degree: int) -> "PolySpace":
        if max_degree < 0:
            raise OutOfRange("max_degree must be >= 0")
        return cls(dim, max_degree, tuple(multi_indices(dim, max_degree)))

    @property
    def size(self) -> int:
        return len(self.monomials)


def monomial_values(space: PolySpace, pts: np.ndarray) -> np.ndarray:
    """Vandermonde: (size, npts) monomial values at pts of shape (dim, npts)."""
    V = np.ones((space.size, pts.shape[1]))
    for i, mono in enumerate(space.monomials):
        for d, e in enumerate(mono.entries):
            if e:
                V[i] *= pts[d] ** e
    return V


@dataclass(frozen=True)
class Polynomial:
    """Coefficients over the monomial basis in u = (x - center) / scale."""

    space: PolySpace
    coeffs: np.ndarray
    center: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, complex)
        if c.shape != (self.space.size,):
            raise ValueError("coefficient vector length must equal the space size")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Values at pts of shape (dim, npts)."""
        u = (pts - np.asarray(self.center, float)[:, None]) / self.scale
        return self.coeffs @ monomial_values(self.space, u)

    def on_grid(self, spec: GridSpec) -> GridFunction:
        coords = spec.coords()
        flat = np.stack([np.broadcast_to(x, spec.shape).ravel() for x in coords])
        vals = self.evaluate(flat).reshape(spec.shape)
        return GridFunction(spec, vals[np.newaxis])

    def derivative_coeffs(self, alpha: MultiIndex) -> np.ndarray:
        """Coefficients of d^alpha P in the same basis (chain rule included)."""
        out = np.zeros(self.space.size, complex)
        index = {m.entries: i for i, m in enumerate(self.space.monomials)}
        for i, mono in enumerate(self.space.monomials):
            tgt = tuple(e - a for e, a in zip(mono.entries, alpha.entries))
            if any(t < 0 for t in tgt):
                continue
            fac = 1.0
            for e, a in zip(mono.entries, alpha.entries):
                for j in range(a):
                    fac *= (e - j)
            out[index[tgt]] += self.coeffs[i] * fac / self.scale ** alpha.order
        return out

    def to_json(self) -> dict:
        return {
            "exponents": [list(m.entries) for m in self.space.monomials],
            "coeffs_re": [float(c.real) for c in self.coeffs],
            "coeffs_im": [float(c.imag) for c in self.coeffs],
            "center": list(self.center),
            "scale": self.scale,
        }


# ---------------------------------------------------------------------------
# weights


def inscribed_ball_weight(u: np.ndarray) -> np.ndarray:
    """Radial bump supported in the inscribed ball |u| < 1/2 of the unit cube."""
    r = np.sqrt(np.sum(u ** 2, axis=0))
    return bump_profile(2.0 * r)


def inscribed_ball_weight_gradient(u: np.ndarray) -> np.ndarray:
    """Gradient of the registered weight, shape (dim, npts)."""
    r = np.sqrt(np.sum(u ** 2, axis=0))
    w = bump_profile(2.0 * r)
    out = np.zeros_like(u)
    inside = (2.0 * r < 1.0) & (r > 0)
    s = 2.0 * r[inside]
    dds = -2.0 * s / (1.0 - s * s) ** 2  # d/ds log bump
    out[:, inside] = u[:, inside] / r[inside] * (w[inside] * dds * 2.0)
    return out


# ---------------------------------------------------------------------------
# projector construction


@dataclass(frozen=True)
class Cube:
    center: tuple[float, ...]
    side: float


@dataclass
class PolyProjector:
    """Orthonormal polynomial basis on a cube under a lattice-weighted product."""

    cube: Cube
    space: PolySpace
    spec: GridSpec
    cells: np.ndarray          # flat lattice indices of the cube cells
    upts: np.ndarray           # (dim, ncells) scaled coordinates
    weights: np.ndarray        # quadrature weights, sum = 1
    basis_values: np.ndarray   # (size, ncells) orthonormal basis at the cells
    basis_coeffs: np.ndarray   # (size, size): pi_i = sum_j C[i, j] * monomial_j
    gram_residual: float

    @property
    def side(self) -> float:
        return self.cube.side


def _mgs(V: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Returns (B, C) with B = C @ V orthonormal under <a, b> = sum a conj(b) w.
    """
    k = V.shape[0]
    B = V.astype(complex).copy()
    C = np.eye(k, dtype=complex)
    for i in range(k):
        for _ in range(2):  # second pass reorthogonalizes
            for j in range(i):
                proj = np.sum(B[i] * np.conj(B[j]) * w)
                B[i] -= proj * B[j]
                C[i] -= proj * C[j]
        nrm = math.sqrt(abs(np.sum(np.abs(B[i]) ** 2 * w)))
        if nrm == 0.0:
            raise IllConditioned("degenerate basis direction in Gram-Schmidt")
        B[i] /= nrm
        C[i] /= nrm
    return B, C


def cube_cells(spec: GridSpec, cube: Cube) -> tuple[np.ndarray, np.ndarray]:
    """Flat indices and scaled coordinates of lattice cells inside the cube."""
    half = cube.side / 2.0
    axes_idx = []
    for d in range(spec.dim):
        ax = spec.axis()
        sel = np.nonzero(np.abs(ax - cube.center[d]) < half)[0]
        axes_idx.append(sel)
    if any(len(s) == 0 for s in axes_idx):
        raise IllConditioned("cube contains no lattice cells; raise resolution")
    grids = np.meshgrid(*axes_idx, indexing="ij")
    flat = np.zeros_like(grids[0])
    for d in range(spec.dim):
        flat = flat * spec.points_per_axis + grids[d]
    cells = flat.ravel()
    ax = spec.axis()
    upts = np.stack([
        (ax[g.ravel()] - cube.center[d]) / cube.side
        for d, g in enumerate(grids)
    ])
    return cells, upts


def build_projector(cube: Cube, m: int, spec: GridSpec,
                    weight: Callable[[np.ndarray], np.ndarray] | np.ndarray | None = None,
                    rank_tolerant: bool = False) -> PolyProjector:
    """Orthonormal basis of P_{m-1} on the cube under the weighted product.

    ``weight`` is a callable of scaled coordinates (default: the registered
    inscribed-ball bump) or an explicit per-cell weight array. Raises
    :class:`IllConditioned` when the monomial Gram matrix has condition
    number above 1e12, unless ``rank_tolerant`` is set (the CZ path), in
    which case a minimal-norm pseudoinverse basis is used instead.
    """
    if m < 1:
        raise OutOfRange("projector degree bound m must be >= 1")
    half = cube.side / 2.0
    if any(abs(c) + half > spec.box_half_width + 1e-12 for c in cube.center):
        raise BallOutsideDomain(f"cube {cube} leaves the box")
    cells, upts = cube_cells(spec, cube)
    space = PolySpace.create(spec.dim, m - 1)
    if weight is None:
        wvals = inscribed_ball_weight(upts)
    elif callable(weight):
        wvals = np.asarray(weight(upts), float)
    else:
        wvals = np.asarray(weight, float)
        if wvals.shape != (cells.size,):
            raise ValueError("weight array must have one value per cube cell")
    total = wvals.sum()
    if total <= 0:
        raise IllConditioned("weight vanishes on the cube cells")
    w = wvals / total
    V = monomial_values(space, upts)
    G = (V * w) @ V.T
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > _GRAM_COND_LIMIT:
        if not rank_tolerant:
            raise IllConditioned(
                f"monomial Gram condition {cond:.3e} exceeds {_GRAM_COND_LIMIT:.0e}; "
                "raise m or resolution")
        B, C = _pinv_basis(V, w)
    else:
        B, C = _mgs(V, w)
    gram = (B * w) @ np.conj(B.T)
    resid = float(np.max(np.abs(gram - np.eye(space.size))))
    return PolyProjector(cube, space, spec, cells, upts, w, B, C, resid)


def _pinv_basis(V: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rank-aware orthogonal basis via SVD of the weighted Vandermonde.

    Deficient directions get zero rows: projecting with them reproduces the
    least-squares fit of minimal norm, and residuals stay orthogonal to every
    representable polynomial restriction.
    """
    sq = np.sqrt(w)
    A = V * sq  # rows: monomials in the weighted geometry
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > s[0] * 1e-12)) if s.size and s[0] > 0 else 0
    C = np.zeros((V.shape[0], V.shape[0]), dtype=complex)
    if rank:
        C[:rank] = (U[:, :rank] / s[:rank]).T  # orthonormal combinations of monomials
    B = C @ V  # polynomial values everywhere, incl. zero-weight cells
    return B, C


def project(proj: PolyProjector, f: GridFunction,
            restrict_ball: tuple[Sequence[float], float] | None = None) -> Polynomial:
    """Weighted projection of f onto the cube's polynomial space.

    ``restrict_ball = (center, radius)`` multiplies f by the sharp indicator
    of the ball before projecting (cellwise).
    """
    if f.channels != 1:
        raise ChannelMismatch("project expects a single channel")
    if f.spec != proj.spec:
        raise ValueError("grid spec mismatch")
    data = f.values[0].ravel()[proj.cells]
    if restrict_ball is not None:
        center, radius = restrict_ball
        x = proj.upts * proj.cube.side + np.asarray(proj.cube.center, float)[:, None]
        r = np.linalg.norm(x - np.asarray(center, float)[:, None], axis=0)
        data = np.where(r < radius, data, 0.0)
    c = (proj.basis_values * proj.weights) @ np.conj(data)
    c = np.conj(c)  # <f, pi_i> = sum f conj(pi_i) w
    mono = proj.basis_coeffs.T @ c
    return Polynomial(proj.space, mono, proj.cube.center, proj.cube.side)


def projection_values(proj: PolyProjector, f: GridFunction,
                      restrict_ball=None) -> np.ndarray:
    """Values of the projection at the cube cells (cheaper than Polynomial)."""
    if f.channels != 1:
        raise ChannelMismatch("projection_values expects a single channel")
    data = f.values[0].ravel()[proj.cells]
    if restrict_ball is not None:
        center, radius = restrict_ball
        x = proj.upts * proj.cube.side + np.asarray(proj.cube.center, float)[:, None]
        r = np.linalg.norm(x - np.asarray(center, float)[:, None], axis=0)
        data = np.where(r < radius, data, 0.0)
    c = np.conj((proj.basis_values * proj.weights) @ np.conj(data))
    return c @ proj.basis_values


def kernel_matrix(proj: PolyProjector, xpts: np.ndarray) -> np.ndarray:
    """phi_Q(x, y) at (dim, nx) evaluation points x and the cube cells y.

    Row-summing against samples of f with the lattice measure reproduces the
    projection: sum_y K[x, y] f(y) h^N = P_{Q,f}(x).
    """
    ux = (xpts - np.asarray(proj.cube.center, float)[:, None]) / proj.cube.side
    Px = proj.basis_coeffs @ monomial_values(proj.space, ux)  # (size, nx)
    return np.einsum("in,ic,c->nc", Px, np.conj(proj.basis_values),
                     proj.weights) / proj.spec.cell_volume


def kernel_derivative_bound(proj: PolyProjector, ax: MultiIndex, by: MultiIndex,
                            xpts: np.ndarray) -> float:
    """max over (x, y) of |d^ax_x d^by_y phi_Q(x, y)|, |by| <= 1.

    Used to record the scale-invariant kernel bounds: multiply by
    side^(N + |ax| + |by|) for the normalized constant.
    """
    if by.order > 1:
        raise OutOfRange("kernel_derivative_bound supports |beta_y| <= 1")
    ell = proj.cube.side
    ux = (xpts - np.asarray(proj.cube.center, float)[:, None]) / ell
    # x-derivatives of the basis polynomials
    Dx = np.stack([
        Polynomial(proj.space, proj.basis_coeffs[i], proj.cube.center, ell).derivative_coeffs(ax)
        for i in range(proj.space.size)
    ])  # coefficients of d^ax pi_i over monomials
    Px = Dx @ monomial_values(proj.space, ux)  # (size, nx)

    eta = inscribed_ball_weight(proj.upts)
    Z = eta.sum() * (proj.spec.h / ell) ** proj.spec.dim  # discrete int eta du
    if by.order == 0:
        Ky = np.conj(proj.basis_values) * eta / Z
    else:
        d_axis = next(i for i, e in enumerate(by.entries) if e)
        geta = inscribed_ball_weight_gradient(proj.upts)[d_axis]
        dpi = np.stack([
            Polynomial(proj.space, np.conj(proj.basis_coeffs[i]), proj.cube.center, ell).derivative_coeffs(by)
            for i in range(proj.space.size)
        ]) @ monomial_values(proj.space, proj.upts) * ell  # in u-units
        Ky = (dpi * eta + np.conj(proj.basis_values) * geta) / (Z * ell)
    kern = np.abs(Px.T @ Ky) / ell ** proj.spec.dim
    return float(kern.max())


# ---------------------------------------------------------------------------
# Taylor polynomials


def taylor_poly(f: GridFunction, x0: Sequence[float], degree: int) -> Polynomial:
    """Taylor polynomial of f at the lattice point nearest x0 (spectral derivatives)."""
    if degree > 5:
        raise OutOfRange("taylor degree capped at 5")
    if f.channels != 1:
        raise ChannelMismatch("taylor_poly expects a single channel")
    spec = f.spec
    idx = spec.nearest_index(x0)
    x0s = tuple(float(v) for v in spec.index_point(idx))
    space = PolySpace.create(spec.dim, degree)
    coeffs = np.zeros(space.size, complex)
    for i, mono in enumerate(space.monomials):
        dval = derivative(f, mono).values[0][idx]
        coeffs[i] = dval / mono.factorial()
    return Polynomial(space, coeffs, x0s, 1.0)


# ---------------------------------------------------------------------------
# the deviation operator T behind the Poincare inequality


def _cube_offsets(spec: GridSpec, t: float):
    """Cell offsets of the cube Q(x, 2t) and its inscribed ball, plus u coords."""
    mmax = int(np.floor((t - 1e-12) / spec.h))
    rng = np.arange(-mmax, mmax + 1)
    grids = np.meshgrid(*([rng] * spec.dim), indexing="ij")
    offs = np.stack([g.ravel() for g in grids])  # (dim, K)
    u = offs * spec.h / (2.0 * t)
    ball = np.linalg.norm(offs, axis=0) * spec.h < t
    return offs, u, ball, mmax


def poincare_lhs(f: GridFunction, m: int, alpha: float,
                 scales: ScaleSet | None = None, stride: int = 4,
                 chunk: int = 4096) -> GridFunction:
    """T f on the strided sublattice:

        T f(x) = sup over the scale list of
                 ( avg_{B(x,t)} | t^-m [f - P_{x,t,f}] |^alpha )^(1/alpha)

    with P_{x,t,f} the weighted projection on Q(x, 2t) of f restricted to
    B(x,t). Points whose cube pokes out of the box get the value 0 (with the
    margin in force the operator vanishes there anyway). Returns a grid
    function on the stride-coarsened lattice.
    """
    if alpha < 1.0:
        raise OutOfRange(f"poincare_lhs requires alpha >= 1, got {alpha}")
    if m < 1:
        raise OutOfRange("poincare_lhs requires m >= 1")
    if f.channels != 1:
        raise ChannelMismatch("poincare_lhs expects a single channel")
    spec = f.spec
    scales = scales if scales is not None else default_scales(spec)
    n = spec.points_per_axis
    if n % stride:
        raise ValueError("stride must divide points_per_axis")
    nc = n // stride
    coarse = GridSpec(spec.dim, spec.box_half_width, nc, spec.margin) if nc >= 32 else None
    space = PolySpace.create(spec.dim, m - 1)

    sub = np.arange(0, n, stride)
    grids = np.meshgrid(*([sub] * spec.dim), indexing="ij")
    pts_idx = np.stack([g.ravel() for g in grids])  # (dim, npts)
    flat_pts = np.zeros(pts_idx.shape[1], dtype=np.int64)
    for d in range(spec.dim):
        flat_pts = flat_pts * n + pts_idx[d]
    data = f.values[0].ravel()

    out = np.zeros(pts_idx.shape[1])
    for t in scales:
        offs, u, ball, mmax = _cube_offsets(spec, t)
        if not ball.any():
            continue
        wvals = inscribed_ball_weight(u)
        if wvals.sum() <= 0:
            # below-cell scale: single-cell cube, deviation vanishes
            continue
        w = wvals / wvals.sum()
        V = monomial_values(space, u)
        B, _ = _pinv_basis(V, w)
        flat_offs = np.zeros(offs.shape[1], dtype=np.int64)
        for d in range(spec.dim):
            flat_offs = flat_offs * n + offs[d]
        ok = np.ones(pts_idx.shape[1], bool)
        for d in range(spec.dim):
            ok &= (pts_idx[d] - mmax >= 0) & (pts_idx[d] + mmax < n)
        idx_ok = np.nonzero(ok)[0]
        ballcount = int(ball.sum())
        coef_w = (np.conj(B) * w)  # (size, K)
        for start in range(0, idx_ok.size, chunk):
            sel = idx_ok[start:start + chunk]
            gather = data[flat_pts[sel][:, None] + flat_offs[None, :]]  # (chunk, K)
            coeffs = gather @ coef_w.T  # (chunk, size)
            dev = gather - coeffs @ B
            avg = np.sum(np.abs(dev[:, ball]) ** alpha, axis=1) / ballcount
            out[sel] = np.maximum(out[sel], avg / t ** (m * alpha))
    out = out ** (1.0 / alpha)
    shape_c = (len(sub),) * spec.dim
    if coarse is None:
        raise ValueError("stride too large: the coarsened lattice would drop below 32 points")
    return GridFunction(coarse, out.reshape(shape_c)[np.newaxis].astype(complex))


def poincare_value(f: GridFunction, x: Sequence[float], t: float, m: int,
                   alpha: float) -> float:
    """Single (x, t) deviation average (no sup): spot-check companion of
    :func:`poincare_lhs`."""
    spec = f.spec
    idx = spec.nearest_index(x)
    offs, u, ball, mmax = _cube_offsets(spec, t)
    space = PolySpace.create(spec.dim, m - 1)
    wvals = inscribed_ball_weight(u)
    w = wvals / wvals.sum()
    V = monomial_values(space, u)
    B, _ = _pinv_basis(V, w)
    n = spec.points_per_axis
    pos = np.array(idx)[:, None] + offs
    if (pos < 0).any() or (pos >= n).any():
        raise BallOutsideDomain("cube pokes out of the box")
    flat = np.zeros(offs.shape[1], dtype=np.int64)
    for d in range(spec.dim):
        flat = flat * n + pos[d]
    gather = f.values[0].ravel()[flat]
    coeffs = np.conj((B * w) @ np.conj(gather))
    dev = gather - coeffs @ B
    avg = float(np.sum(np.abs(dev[ball]) ** alpha) / ball.sum())
    return (avg / t ** (m * alpha)) ** (1.0 / alpha)
