"""Product-type Sobolev norms and the dyadic quantity ``A = sup_j ||sigma(2^j .) psi||``.

A function on the frequency side is sampled on a *frame grid*: a standard
lattice in ``u``-coordinates on ``[-2, 2)^d`` mapped to ``xi = c + B u``.
The support is assumed to sit inside ``c + B [-1, 1]^d``, which leaves a
factor-two margin against periodization.  With ``B = R * I`` this is the
plain box of extent ``4R`` centered at ``c``.  Narrow anisotropic supports
(the sharpness constructions) get an adapted ``B`` so that their sampling
cost does not depend on how thin they are.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import NumericalGuardError
from .lattice import Field, GridSpec, forward
from .symbols import Frame, Symbol, make_lp_psi

FRAME_EXTENT = 4.0
DEFAULT_J_RANGE = (-8, 8)


def bracket(x) -> np.ndarray:
    """Japanese bracket ``sqrt(1 + |x|^2)`` over the trailing axis."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return float(np.sqrt(1 + x * x))
    return np.sqrt(1 + np.sum(x * x, axis=-1))


@dataclass(frozen=True)
class SobolevOrder:
    orders: tuple[float, ...]

    def __post_init__(self):
        o = tuple(float(s) for s in self.orders)
        if not o or any(s < 0 for s in o):
            raise ValueError(f"Sobolev orders must be nonnegative, got {self.orders!r}")
        object.__setattr__(self, "orders", o)

    @property
    def m(self) -> int:
        return len(self.orders)

    def supercritical(self, n: int) -> bool:
        return all(s > n / 2 for s in self.orders)


def default_samples(d: int, n: int = 1) -> int:
    """Frame-grid resolution per axis for a ``d``-dimensional symbol."""
    if d == 1:
        return 256
    if d == 2:
        return 256 if n == 1 else 128
    if d == 3:
        return 64
    return 32


def frame_grid(d: int, samples: int) -> GridSpec:
    return GridSpec(d, samples, FRAME_EXTENT)


def sample_on_frame(func: Callable[[np.ndarray], np.ndarray], frame: Frame, samples: int) -> Field:
    """Sample ``func`` at ``c + B u`` for ``u`` on the standard frame grid."""
    c, B = frame
    g = frame_grid(len(c), samples)
    xi = g.points() @ B.T + c
    return Field(g, func(xi))


def _edge_max(a: np.ndarray) -> float:
    m = 0.0
    for ax in range(a.ndim):
        m = max(m, float(np.abs(np.take(a, 0, axis=ax)).max()))
    return m


def product_sobolev_norm(
    g: Field,
    order: SobolevOrder,
    n: int = 1,
    frame: Frame | None = None,
    support_radius: float | None = None,
    edge_tol: float = 1e-300,
) -> float:
    """``(int |g^(y)|^2 prod_i <y_i>^{2 s_i} dy)^{1/2}`` by lattice quadrature.

    ``g`` holds samples on ``g.grid``; with ``frame`` given, the samples are
    taken at ``c + B x`` for the grid points ``x`` (see module docs).
    ``support_radius`` declares the support in grid coordinates.
    """
    grid = g.grid
    d = grid.dimension
    if order.m * n != d:
        raise ValueError(f"order has {order.m} blocks of dim {n}, grid dimension is {d}")
    if support_radius is not None and support_radius >= grid.extent / 2:
        raise ValueError(
            f"declared support radius {support_radius} touches the box boundary "
            f"(half extent {grid.extent / 2}); periodization would corrupt the transform")
    peak = g.abs_max()
    if peak == 0:
        return 0.0
    if _edge_max(g.samples) > edge_tol * peak:
        raise NumericalGuardError("function does not decay at the box edge; enlarge the box")

    c = forward(g).coeffs
    v = grid.frequencies()
    if frame is None:
        y, jac = v, 1.0
    else:
        B = np.asarray(frame[1], dtype=float)
        y = v @ np.linalg.inv(B)
        jac = abs(float(np.linalg.det(B)))
    w = np.ones(grid.shape)
    for i, s in enumerate(order.orders):
        if s:
            yi = y[..., i * n:(i + 1) * n]
            w = w * (1 + np.sum(yi * yi, axis=-1)) ** s
    total = jac * grid.extent**d * np.sum((np.abs(c) ** 2 * w).ravel())
    return float(np.sqrt(total))


@dataclass(frozen=True, eq=False)
class DyadicPiece:
    j: int
    values: Field
    frame: Frame
    zero: bool = False


def _radially_disjoint(a, b) -> bool:
    return a is not None and b is not None and (a[1] <= b[0] or b[1] <= a[0] or a[0] >= a[1])


def dyadic_piece(sigma: Symbol, j: int, psi: Symbol | None = None, samples: int | None = None) -> DyadicPiece:
    """Samples of ``sigma(2^j xi) * psi(xi)`` on a frame grid covering ``supp psi``."""
    psi = make_lp_psi(sigma.dim) if psi is None else psi
    if psi.dim != sigma.dim:
        raise ValueError(f"psi dimension {psi.dim} differs from symbol dimension {sigma.dim}")
    d = sigma.dim
    samples = samples or default_samples(d, sigma.n)
    t = 2.0**j
    frame = psi.frame if psi.frame is not None else (np.zeros(d), psi.support_radius * np.eye(d))
    if sigma.frame is not None:
        cand = (sigma.frame[0] / t, sigma.frame[1] / t)
        if abs(np.linalg.det(cand[1])) < abs(np.linalg.det(frame[1])):
            frame = cand
    rs = None if sigma.radial_support is None else (sigma.radial_support[0] / t, sigma.radial_support[1] / t)
    if _radially_disjoint(rs, psi.radial_support):
        g = frame_grid(d, samples)
        return DyadicPiece(j, Field(g, np.zeros(g.shape)), frame, zero=True)
    values = sample_on_frame(lambda xi: sigma(t * xi) * psi(xi), frame, samples)
    return DyadicPiece(j, values, frame)


def piece_norm(piece: DyadicPiece, order: SobolevOrder, n: int) -> float:
    if piece.zero:
        return 0.0
    return product_sobolev_norm(piece.values, order, n, frame=piece.frame)


@dataclass(frozen=True)
class ConditionA:
    A: float
    per_j: tuple[tuple[int, float], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("j,norm\n")
        for j, v in self.per_j:
            buf.write(f"{j},{v:.17g}\n")
        return buf.getvalue()


def condition_A(
    sigma: Symbol,
    order: SobolevOrder,
    j_range: tuple[int, int] = DEFAULT_J_RANGE,
    psi: Symbol | None = None,
    samples: int | None = None,
) -> ConditionA:
    """Max over ``j_range`` (inclusive) of the Sobolev norms of the dyadic pieces."""
    lo, hi = j_range
    if lo > hi:
        raise ValueError(f"empty j range {j_range}")
    per_j = []
    for j in range(lo, hi + 1):
        per_j.append((j, piece_norm(dyadic_piece(sigma, j, psi, samples), order, sigma.n)))
    return ConditionA(max(v for _, v in per_j), tuple(per_j))


def bracket_integral(s: float, n: int) -> float:
    """``int_{R^n} <xi>^{-2s} dxi`` (finite for ``s > n/2``)."""
    if not s > n / 2:
        raise ValueError(f"integral diverges for s={s} <= n/2={n / 2}")
    sphere = 2 * math.pi ** (n / 2) / special.gamma(n / 2)
    val, _ = integrate.quad(lambda r: r ** (n - 1) * (1 + r * r) ** (-s), 0, np.inf,
                            epsabs=0, epsrel=1e-12, limit=200)
    return float(sphere * val)


def bracket_constant(order: SobolevOrder, n: int) -> float:
    """``prod_i (int <xi_i>^{-2 s_i})^{1/2}``."""
    return float(np.prod([np.sqrt(bracket_integral(s, n)) for s in order.orders]))


@dataclass(frozen=True)
class LinfBound:
    lhs: float
    rhs: float
    A: float
    constant: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def linf_dyadic_bound(
    sigma: Symbol,
    order: SobolevOrder,
    sample_points: np.ndarray,
    j_range: tuple[int, int] = DEFAULT_J_RANGE,
    samples: int | None = None,
) -> LinfBound:
    """Compare ``max |sigma|`` on ``sample_points`` with ``3 C(s, n) A``."""
    if not order.supercritical(sigma.n):
        raise ValueError(f"orders {order.orders} are not all > n/2 = {sigma.n / 2}")
    A = condition_A(sigma, order, j_range, samples=samples).A
    C = bracket_constant(order, sigma.n)
    lhs = float(np.max(np.abs(sigma(np.asarray(sample_points, dtype=float)))))
    return LinfBound(lhs, 3 * C * A, A, C)


