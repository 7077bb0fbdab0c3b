"""The m-linear multiplier operator, its kernel form, and symbol regularization.

``apply_multiplier`` treats inputs as trigonometric polynomials: with
``c_i`` the lattice coefficients of ``f_i``,

    g^(k) = sum_{k_1 + ... + k_m = k} sigma(k_1/L, ..., k_m/L) prod_i c_i(k_i),

which is exact for band-limited inputs.  Only tuples with every ``|c_i|``
above a threshold are visited; when ``sigma`` carries a frame hint the
tuples are further restricted to the frame parallelotope, so narrow
supports cost time proportional to their size rather than to ``N^{mn}``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AliasingError, BudgetError
from .lattice import Field, GridSpec, Spectrum, forward, inverse, lp_norm
from .symbols import Symbol, ramp_down, smooth_step

COEFF_THRESHOLD = 1e-14
MAX_TUPLES = 50_000_000
_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class MultilinearInput:
    fields: tuple[Field, ...]

    def __post_init__(self):
        fs = tuple(self.fields)
        if not fs:
            raise ValueError("need at least one input field")
        g = fs[0].grid
        for f in fs[1:]:
            if f.grid != g:
                raise ValueError(f"grid mismatch: {f.grid} vs {g}")
        object.__setattr__(self, "fields", fs)

    @property
    def grid(self) -> GridSpec:
        return self.fields[0].grid

    @property
    def m(self) -> int:
        return len(self.fields)


def _as_input(inp) -> MultilinearInput:
    return inp if isinstance(inp, MultilinearInput) else MultilinearInput(tuple(inp))


def _support(c: np.ndarray, threshold: float):
    """Integer frequency vectors (lexicographic) and values of the kept coefficients."""
    N = c.shape[0]
    idx = np.argwhere(np.abs(c) >= threshold)
    return idx - N // 2, c[tuple(idx.T)]


def _frame_box(sigma: Symbol, L: float):
    """Per-coordinate integer bounds of the frame parallelotope, or None."""
    if sigma.frame is None:
        return None
    c, B = sigma.frame
    half = np.sum(np.abs(B), axis=1)
    return np.floor((c - half) * L - 1e-9), np.ceil((c + half) * L + 1e-9)


def _last_coordinate_bounds(sigma: Symbol, prefix: np.ndarray, L: float):
    """Integer interval for the final coordinate given the preceding ones."""
    c, B = sigma.frame
    Binv = np.linalg.inv(B)
    alpha = (prefix / L - c[:-1]) @ Binv[:, :-1].T
    beta = Binv[:, -1]
    lo = np.full(len(prefix), -np.inf)
    hi = np.full(len(prefix), np.inf)
    tol = 1e-9
    for r in range(len(beta)):
        a = alpha[:, r]
        if abs(beta[r]) < 1e-15:
            bad = np.abs(a) > 1 + tol
            lo[bad], hi[bad] = np.inf, -np.inf
            continue
        t1 = (-1 - tol - a) / beta[r]
        t2 = (1 + tol - a) / beta[r]
        lo = np.maximum(lo, np.minimum(t1, t2))
        hi = np.minimum(hi, np.maximum(t1, t2))
    return np.ceil((lo + c[-1]) * L), np.floor((hi + c[-1]) * L)


def _tuples(sigma: Symbol, supports, L: float, max_tuples: int):
    """Frequency tuples (T, m*n) and their coefficient products, lexicographic."""
    n = supports[0][0].shape[1]
    box = _frame_box(sigma, L)
    sets = []
    for i, (k, v) in enumerate(supports):
        if box is not None:
            lo, hi = box[0][i * n:(i + 1) * n], box[1][i * n:(i + 1) * n]
            keep = np.all((k >= lo) & (k <= hi), axis=1)
            k, v = k[keep], v[keep]
        sets.append((k, v))
    if any(len(k) == 0 for k, _ in sets):
        return np.zeros((0, len(sets) * n), dtype=np.int64), np.zeros(0, dtype=complex)

    def guard(count):
        if count > max_tuples:
            raise BudgetError(f"{count} frequency tuples exceed the budget of {max_tuples}")

    K, V = sets[0]
    for k, v in sets[1:-1]:
        guard(len(K) * len(k))
        K = np.hstack([np.repeat(K, len(k), axis=0), np.tile(k, (len(K), 1))])
        V = np.repeat(V, len(v)) * np.tile(v, len(V))
    if len(sets) == 1:
        return K, V
    k_last, v_last = sets[-1]
    if box is not None and n == 1:
        # exact interval for the last scalar coordinate
        lo, hi = _last_coordinate_bounds(sigma, K, L)
        start = np.searchsorted(k_last[:, 0], lo, side="left")
        stop = np.searchsorted(k_last[:, 0], hi, side="right")
        counts = np.maximum(stop - start, 0)
        total = int(counts.sum())
        guard(total)
        rows = np.repeat(np.arange(len(K)), counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        cols = np.repeat(start, counts) + offs
        return np.hstack([K[rows], k_last[cols]]), V[rows] * v_last[cols]
    guard(len(K) * len(k_last))
    K = np.hstack([np.repeat(K, len(k_last), axis=0), np.tile(k_last, (len(K), 1))])
    V = np.repeat(V, len(v_last)) * np.tile(v_last, len(V))
    if box is not None:
        c, B = sigma.frame
        u = (K / L - c) @ np.linalg.inv(B).T
        keep = np.all(np.abs(u) <= 1 + 1e-9, axis=1)
        K, V = K[keep], V[keep]
    return K, V


def apply_multiplier(
    sigma: Symbol,
    inputs,
    threshold: float = COEFF_THRESHOLD,
    max_tuples: int = MAX_TUPLES,
) -> Field:
    """``T_sigma(f_1, ..., f_m)`` with trigonometric-polynomial semantics.

    Raises :class:`AliasingError` if a contributing tuple sums to a
    frequency outside ``|k| < N/2``.
    """
    inp = _as_input(inputs)
    grid = inp.grid
    n, N, L = grid.dimension, grid.samples_per_axis, grid.extent
    if sigma.m != inp.m or sigma.n != n:
        raise ValueError(f"symbol is ({sigma.m},{sigma.n})-linear, inputs are ({inp.m},{n})")
    supports = [_support(forward(f).coeffs, threshold) for f in inp.fields]
    K, V = _tuples(sigma, supports, L, max_tuples)
    re = np.zeros(grid.size)
    im = np.zeros(grid.size)
    half = N // 2
    for s in range(0, len(K), _CHUNK):
        k = K[s:s + _CHUNK]
        w = V[s:s + _CHUNK] * sigma(k / L)
        nz = w != 0
        if not nz.any():
            continue
        k, w = k[nz], w[nz]
        out = k.reshape(len(k), inp.m, n).sum(axis=1)
        if np.any(np.abs(out) >= half):
            raise AliasingError(
                f"output frequency {int(np.abs(out).max())} reaches the lattice limit {half}; "
                "enlarge N or shrink the input bands")
        flat = np.ravel_multi_index(tuple((out + half).T), grid.shape)
        re += np.bincount(flat, weights=w.real, minlength=grid.size)
        im += np.bincount(flat, weights=w.imag, minlength=grid.size)
    return inverse(Spectrum(grid, re + 1j * im))


def product_grid(grid: GridSpec, m: int) -> GridSpec:
    return GridSpec(grid.dimension * m, grid.samples_per_axis, grid.extent)


def kernel_from_symbol(sigma: Symbol, grid: GridSpec) -> Field:
    """Samples of the inverse transform of ``sigma`` on the m-fold product grid.

    ``apply_kernel(kernel_from_symbol(sigma, g), f)`` equals
    ``apply_multiplier(sigma, f)`` for inputs band-limited on ``g``.
    """
    G = product_grid(grid, sigma.m)
    vals = sigma(G.frequencies()) / G.extent**G.dimension
    return inverse(Spectrum(G, vals))


def delta_kernel(grid: GridSpec, m: int) -> Field:
    G = product_grid(grid, m)
    a = np.zeros(G.shape)
    a[(grid.samples_per_axis // 2,) * G.dimension] = G.spacing ** -G.dimension
    return Field(G, a)


def apply_kernel(K: Field, inputs) -> Field:
    """Riemann sum ``h^{mn} sum_y K(x - y_1, ..., x - y_m) prod f_i(y_i)`` (periodic)."""
    inp = _as_input(inputs)
    grid = inp.grid
    m, n, N = inp.m, grid.dimension, grid.samples_per_axis
    if K.grid != product_grid(grid, m):
        raise ValueError(f"kernel grid {K.grid} is not the {m}-fold product of {grid}")
    k = K.samples
    out = np.empty(grid.shape, dtype=complex)
    base = np.arange(N)
    w = grid.spacing ** (m * n)
    for x in np.ndindex(*grid.shape):
        # K index for x - y is (x - y + N/2) mod N along each axis
        idx = [((x[a] - base + N // 2) % N) for _ in range(m) for a in range(n)]
        sub = k[np.ix_(*idx)]
        for f in reversed(inp.fields):
            sub = np.tensordot(sub, f.samples, axes=n)
        out[x] = w * sub
    return Field(grid, out)


# -- regularization --------------------------------------------------------

@dataclass(frozen=True)
class Mollifier:
    """Even real ``phi`` on ``R^d`` whose transform is a tensor bump.

    ``hat(x) = prod_i b(x_i)`` with ``b(t) = 1 - smooth_step(|t|/r)`` and
    ``r = 1/sqrt(d)``, so ``hat`` lives in the unit ball and ``hat(0) = 1``.
    ``phi`` itself is evaluated by Gauss-Legendre quadrature of the 1-D
    cosine transform of ``b``.
    """

    dim: int
    nodes: int = 400

    @property
    def radius(self) -> float:
        return 1.0 / np.sqrt(self.dim)

    def hat(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.prod(ramp_down(np.abs(x), 0.0, self.radius), axis=-1)

    def profile(self, eta) -> np.ndarray:
        """1-D factor ``beta(eta) = int b(t) cos(2 pi t eta) dt``."""
        t, w = np.polynomial.legendre.leggauss(self.nodes)
        r = self.radius
        t = (t + 1) * r / 2
        w = w * r
        bt = 1.0 - smooth_step(t / r)
        eta = np.asarray(eta, dtype=float)
        return np.cos(2 * np.pi * np.multiply.outer(eta, t)) @ (w * bt)

    def __call__(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        return np.prod(self.profile(eta), axis=-1)


def _check_eps(eps: float) -> None:
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")


def _cutoff(eps: float, t: float = 1.0):
    """``phi^eps(t xi)``: 1 on ``2 eps <= |t xi| <= 1/eps``."""
    def f(xi):
        r = t * np.linalg.norm(xi, axis=-1)
        return smooth_step(r / eps - 1.0) - smooth_step(eps * r - 1.0)
    return f


@dataclass(frozen=True, eq=False)
class RegularizedSymbol:
    """``sigma^eps = phi_eps * (sigma phi^eps)`` evaluated lazily."""

    base: Symbol
    eps: float
    mollifier: Mollifier | None = None
    spacing: float = 0.125
    truncation: float = 32.0

    def __post_init__(self):
        _check_eps(self.eps)
        if self.mollifier is None:
            object.__setattr__(self, "mollifier", Mollifier(self.base.dim))
        if self.mollifier.dim != self.base.dim:
            raise ValueError("mollifier dimension differs from symbol dimension")

    def _nodes(self):
        # trapezoid lattice in u = eta/eps; exact normalization since the
        # bump vanishes at nonzero multiples of 1/spacing
        d, dl = self.base.dim, self.spacing
        u1 = np.arange(-self.truncation, self.truncation + dl / 2, dl)
        b1 = self.mollifier.profile(u1) * dl
        keep = np.abs(b1) > 1e-15
        u1, b1 = u1[keep], b1[keep]
        U = np.stack(np.meshgrid(*([u1] * d), indexing="ij"), -1).reshape(-1, d)
        W = np.prod(np.stack(np.meshgrid(*([b1] * d), indexing="ij"), -1).reshape(-1, d), -1)
        keep = np.abs(W) > 1e-16 * np.abs(W).max()
        # renormalize so the truncated rule reproduces constants exactly
        return U[keep], W[keep] / np.sum(W[keep])

    def symbol(self) -> Symbol:
        U, W = self._nodes()
        eps, base = self.eps, self.base
        cut = _cutoff(eps)

        def func(xi):
            flat = xi.reshape(-1, base.dim)
            out = np.empty(len(flat), dtype=complex)
            for i, x in enumerate(flat):
                pts = x - eps * U
                out[i] = np.sum(W * base(pts) * cut(pts))
            return out.reshape(xi.shape[:-1])

        return Symbol(base.m, base.n, func, name=f"reg({base.name},{eps})")


@dataclass(frozen=True, eq=False)
class Regularization:
    eps: float
    symbol: Field
    kernel: Field


def regularize(r: RegularizedSymbol, grid: GridSpec) -> Regularization:
    """Spectral ``sigma^eps`` on the frequency box ``grid`` plus ``K^eps``.

    The samples of ``sigma phi^eps`` are treated as periodic on the box;
    the box should contain their support.  ``K^eps`` is returned on the
    dual grid with spacing ``1/L`` and extent ``N/L``.
    """
    if grid.dimension != r.base.dim:
        raise ValueError(f"grid dimension {grid.dimension} differs from symbol dimension {r.base.dim}")
    N, L = grid.samples_per_axis, grid.extent
    if L / r.eps >= N / 2:
        raise ValueError(f"grid too coarse for eps={r.eps}: need N > {2 * L / r.eps:.0f}")
    xi = grid.points()
    g = Field(grid, r.base(xi) * _cutoff(r.eps)(xi))
    c = forward(g).coeffs * r.mollifier.hat(r.eps * grid.frequencies())
    smooth = inverse(Spectrum(grid, c))
    # K(x = k/L) = L^d c[-k]
    axes = tuple(range(grid.dimension))
    rev = np.roll(np.flip(c, axes), 1, axes)
    space = GridSpec(grid.dimension, N, N / L)
    return Regularization(r.eps, smooth, Field(space, L**grid.dimension * rev))


def _pow2_at_least(x: float) -> int:
    return max(8, 1 << int(np.ceil(np.log2(max(x, 1.0)))))


def regularized_piece_norm(
    r: RegularizedSymbol,
    j: int,
    order,
    psi: Symbol | None = None,
    resolution: float = 1 / 32,
    reach: float = 24.0,
    max_points: int = 1 << 22,
) -> float:
    """Sobolev norm of ``sigma^eps(2^j .) psi`` on an adapted box.

    In the rescaled variable the mollifier has width ``delta = eps 2^-j``.
    The rescaled ``sigma phi^eps`` is smoothly tapered beyond
    ``supp psi + reach*delta`` before spectral mollification, so the
    periodic box never sees a jump.
    """
    from .sobolev import product_sobolev_norm
    from .symbols import make_lp_psi

    base, eps = r.base, r.eps
    d = base.dim
    psi = make_lp_psi(d) if psi is None else psi
    R = psi.radial_support[1] if psi.radial_support else psi.support_radius
    t = 2.0**j
    delta = eps / t
    R1 = R + reach * delta
    W = R1 + 1.25
    h = resolution
    if 2 * delta >= (psi.radial_support[0] if psi.radial_support else 0) - reach * delta:
        h = min(h, delta / 4)
    if 1 / (eps * t) <= W * np.sqrt(d):
        h = min(h, 1 / (eps * t) / 4)
    N = _pow2_at_least(2 * W / h)
    if N**d > max_points:
        raise BudgetError(f"regularized piece j={j}, eps={eps} needs {N}^{d} points")
    grid = GridSpec(d, N, 2 * W)
    xi = grid.points()
    taper = ramp_down(np.linalg.norm(xi, axis=-1), R1, R1 + 1.0)
    g = base(t * xi) * _cutoff(eps, t)(xi) * taper
    c = forward(Field(grid, g)).coeffs * r.mollifier.hat(delta * grid.frequencies())
    piece = inverse(Spectrum(grid, c)).samples * psi(xi)
    return product_sobolev_norm(Field(grid, piece), order, base.n)


def regularized_condition_A(r: RegularizedSymbol, order, j_range=(-1, 3), psi=None) -> float:
    lo, hi = j_range
    return max(regularized_piece_norm(r, j, order, psi) for j in range(lo, hi + 1))


def _csv(rows) -> str:
    buf = io.StringIO()
    buf.write("epsilon,value\n")
    for e, v in sorted(rows):
        buf.write(f"{e:.17g},{v:.17g}\n")
    return buf.getvalue()


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[tuple[float, float], ...]
    reference: float

    def to_csv(self) -> str:
        return _csv(self.rows)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.rows])


def regularization_sobolev_check(
    sigma: Symbol, order, eps_list: Sequence[float], j_range=(-1, 3), psi=None,
) -> SweepTable:
    """Per-eps condition A of ``sigma^eps``; ``reference`` is condition A of ``sigma``."""
    from .sobolev import condition_A

    if not order.supercritical(sigma.n):
        raise ValueError(f"orders {order.orders} are not all > n/2")
    rows = tuple(sorted(
        (float(e), regularized_condition_A(RegularizedSymbol(sigma, e), order, j_range, psi))
        for e in eps_list))
    return SweepTable(rows, condition_A(sigma, order, j_range, psi).A)


def l2_convergence_check(sigma: Symbol, inputs, eps_list: Sequence[float]) -> SweepTable:
    """``||T_eps f - T_sigma f||_2`` per eps; ``reference`` is ``||T_sigma f||_2``."""
    inp = _as_input(inputs)
    ref = apply_multiplier(sigma, inp)
    rows = []
    for e in eps_list:
        out = apply_multiplier(RegularizedSymbol(sigma, e).symbol(), inp)
        rows.append((float(e), lp_norm(out - ref, 2)))
    return SweepTable(tuple(sorted(rows)), lp_norm(ref, 2))
