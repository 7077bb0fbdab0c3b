"""The two necessity constructions: symbols, inputs, closed-form outputs and sweeps.

Both families live on ``R^{mn}`` with inputs on ``R^n``.  Their symbols are
supported in the shell ``2^{-1/4} <= |xi| <= 2^{1/4}``, so every dyadic
piece except ``j = 0`` vanishes and condition A equals the plain Sobolev
norm of the symbol.

Spatial grids are adapted to ``eps``: the inputs are modulated envelopes
of width ``~ 1/(eps rho)`` where ``rho`` is the support radius of the
envelope bump, so the box is measured in those units (see
:func:`construction_grid`).
"""

from __future__ import annotations

import functools
import io
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .hardy import hp_quasinorm
from .errors import NumericalGuardError
from .lattice import Field, GridSpec, Spectrum, inverse, lp_norm
from .operator import MultilinearInput, apply_multiplier
from .sobolev import SobolevOrder, condition_A
from .symbols import Symbol, make_sharpness_psi, ramp_down, smooth_step

SHELL = (2**-0.25, 2**0.25)
RHO_ONE = 0.5
GRID_MARGIN = 1.1


# -- radial profiles and their transforms ------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """``f(|xi|)`` on ``R^n`` supported in ``|xi| <= radius``, 1 on ``|xi| <= plateau``."""

    plateau: float
    radius: float

    def __call__(self, r) -> np.ndarray:
        return ramp_down(np.asarray(r, dtype=float), self.plateau, self.radius)


@dataclass(frozen=True)
class AnnularProfile:
    r0: float
    r1: float
    r2: float
    r3: float

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return smooth_step((r - self.r0) / (self.r1 - self.r0)) * ramp_down(r, self.r2, self.r3)


@functools.lru_cache(maxsize=8)
def _gauss(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def radial_inverse_transform(profile: Callable, radius: float, n: int, x, nodes: int = 256) -> np.ndarray:
    """``int_{R^n} profile(|xi|) e^{2 pi i x.xi} dxi`` for radial ``profile`` supported in ``[0, radius]``.

    Hankel form ``2 pi |x|^{1-n/2} int_0^R f(r) J_{n/2-1}(2 pi |x| r) r^{n/2} dr``
    evaluated by Gauss-Legendre; ``x`` has trailing axis ``n``.
    """
    x = np.asarray(x, dtype=float)
    rho = np.linalg.norm(x, axis=-1)
    t, w = _gauss(nodes)
    r = (t + 1) * radius / 2
    w = w * radius / 2
    fr = profile(r)
    flat, where = np.unique(rho.ravel(), return_inverse=True)
    out = np.empty(flat.shape)
    chunk = max(1, (1 << 22) // nodes)
    for s in range(0, flat.size, chunk):
        q = flat[s:s + chunk, None]
        if n == 1:
            out[s:s + chunk] = 2 * (np.cos(2 * np.pi * q * r) @ (w * fr))
            continue
        nu = n / 2 - 1
        arg = 2 * np.pi * q * r
        with np.errstate(invalid="ignore", divide="ignore"):
            kern = np.where(q > 0, special.jv(nu, arg) / np.where(arg > 0, arg, 1.0) ** nu, 0.0)
        # J_nu(z)/z^nu -> 1/(2^nu Gamma(nu+1)) at z = 0
        kern = np.where(q > 0, kern, 1 / (2**nu * special.gamma(nu + 1)))
        out[s:s + chunk] = 2 * np.pi * (2 * np.pi) ** nu * (kern @ (w * fr * r ** (n - 1)))
    return out[where].reshape(rho.shape)


def _unit(n: int) -> np.ndarray:
    e = np.zeros(n)
    e[0] = 1.0
    return e


def _inv_p(p: float) -> float:
    return 0.0 if np.isinf(p) else 1.0 / p


def _vec(v, n: int, norm: float, what: str) -> np.ndarray:
    v = norm * _unit(n) if v is None else np.asarray(v, dtype=float).reshape(n)
    if not math.isclose(float(np.linalg.norm(v)), norm, rel_tol=1e-12):
        raise ValueError(f"|{what}| must equal {norm}, got {np.linalg.norm(v)}")
    return v


def _check_common(m, n, p, order, eps):
    if len(p) != m:
        raise ValueError(f"need {m} exponents p, got {len(p)}")
    if any(not q > 0 for q in p):
        raise ValueError(f"exponents must be positive, got {p}")
    if order.m != m:
        raise ValueError(f"order has {order.m} entries, need {m}")
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")


# -- construction one ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConstructionOne:
    """Isolates ``s_1``: a thin bump in block 1, fixed rings elsewhere."""

    m: int
    n: int
    p: tuple[float, ...]
    order: SobolevOrder
    eps: float
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    rho: float = RHO_ONE

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("construction one needs m >= 2")
        object.__setattr__(self, "p", tuple(float(q) for q in self.p))
        _check_common(self.m, self.n, self.p, self.order, self.eps)
        object.__setattr__(self, "a", _vec(self.a, self.n, 1 / (15 * self.m), "a"))
        object.__setattr__(self, "b", _vec(self.b, self.n, 1.0, "b"))
        if not 0 < self.rho <= 1:
            raise ValueError("envelope radius must lie in (0, 1]")
        top = eps_max_one(self.m, self.rho)
        if self.eps >= top:
            raise ValueError(f"eps={self.eps} outside the admissible range (0, {top:.6g})")

    @property
    def phi_hat(self) -> RadialProfile:
        return RadialProfile(0.0, self.rho)

    @property
    def ring(self) -> AnnularProfile:
        m = self.m
        return AnnularProfile(1 / (17 * m), 1 / (16 * m), 1 / (14 * m), 1 / (13 * m))

    @property
    def ring_last(self) -> AnnularProfile:
        return AnnularProfile(12 / 13, 25 / 26, 27 / 26, 14 / 13)

    @property
    def envelope_radius(self) -> float:
        return self.rho


def eps_max_one(m: int, rho: float = RHO_ONE) -> float:
    """Largest eps for which the plateau and shell claims of construction one hold."""
    lim = [1 / 26]                                   # f_m inside the last ring's plateau
    if m >= 3:
        lim.append(1 / (240 * m))                    # f_i inside the middle rings' plateau
    room = SHELL[1] ** 2 - (m - 2) / (13 * m) ** 2 - (14 / 13) ** 2
    lim.append(math.sqrt(room) - 1 / (15 * m))       # outer shell radius
    return min(lim) / rho


# -- construction two ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConstructionTwo:
    """Couples the first ``r`` slots through a thin bump in ``sum xi_i``."""

    m: int
    n: int
    r: int
    p: tuple[float, ...]
    order: SobolevOrder
    eps: float
    a: np.ndarray | None = None
    b: np.ndarray | None = None

    def __post_init__(self):
        if not 1 <= self.r <= self.m:
            raise ValueError(f"need 1 <= r <= m, got r={self.r}, m={self.m}")
        object.__setattr__(self, "p", tuple(float(q) for q in self.p))
        _check_common(self.m, self.n, self.p, self.order, self.eps)
        object.__setattr__(self, "a", _vec(self.a, self.n, self.r ** -0.5, "a"))
        object.__setattr__(self, "b", _vec(self.b, self.n, 1 / (21 * self.m), "b"))
        top = eps_max_two(self.m, self.r)
        if self.eps >= top:
            raise ValueError(f"eps={self.eps} outside the admissible range (0, {top:.6g})")

    @property
    def R(self) -> float:
        return 1 / (19 * self.m * self.r)

    @property
    def phi_hat(self) -> RadialProfile:
        return RadialProfile(1 / (30 * self.m * self.r), self.R)

    @property
    def ring(self) -> AnnularProfile:
        m = self.m
        return AnnularProfile(1 / (23 * m), 1 / (22 * m), 1 / (20 * m), 1 / (19 * m))

    @property
    def zeta_hat(self) -> RadialProfile:
        return RadialProfile(3 / (19 * self.m), 1 / (3 * self.m))

    @property
    def envelope_radius(self) -> float:
        return self.R


def eps_max_two(m: int, r: int) -> float:
    R = 1 / (19 * m * r)
    lim = [0.5]
    if m > r:
        lim.append(1 / (462 * m) / R)                # f_i (i > r) inside the ring plateau
    a = r ** -0.5
    ring = (m - r) / (19 * m) ** 2

    def outer(e):
        return (a + (e + r - 1) * R) ** 2 + (r - 1) * (a + (e + 1) * R) ** 2 + ring

    def inner(e):
        return max(a - (e + r - 1) * R, 0) ** 2 + (r - 1) * max(a - (e + 1) * R, 0) ** 2

    e = min(lim)
    # shrink until both shell inequalities hold (they are monotone in e)
    while outer(e) > SHELL[1] ** 2 or inner(e) < SHELL[0] ** 2:
        e /= 2
    return e


# -- builders -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Built:
    sigma: Symbol
    inputs: MultilinearInput
    closed_form: Field


def _spectral_input(fhat: Callable, grid: GridSpec) -> Field:
    """Field whose lattice coefficients are ``fhat(k/L) / L^n``."""
    vals = fhat(grid.frequencies()) / grid.extent**grid.dimension
    return inverse(Spectrum(grid, vals))


def construction_grid(c, samples: int = 256, extent: float = 32.0) -> GridSpec:
    """Spatial grid for construction ``c``.

    ``extent`` is in envelope units ``1/(eps rho)``; ``samples`` is a floor
    raised to the smallest power of two whose Nyquist frequency exceeds
    ``GRID_MARGIN`` times the largest input or output frequency.
    """
    L = extent / (c.eps * c.envelope_radius)
    fmax = max_frequency(c)
    N = max(samples, 8)
    N = 1 << int(math.ceil(math.log2(N)))
    while N / (2 * L) < GRID_MARGIN * fmax:
        N *= 2
    return GridSpec(c.n, N, L)


def max_frequency(c) -> float:
    if isinstance(c, ConstructionOne):
        e = c.eps * c.rho
        out = np.linalg.norm((c.m - 1) * c.a + c.b) + c.m * e
        return float(max(np.linalg.norm(c.a) + e, np.linalg.norm(c.b) + e, out))
    e = c.eps * c.R
    zeta = np.linalg.norm(c.a) + 1 / (3 * c.m)
    # contributing tuples lie in supp sigma, where |sum xi_i - (ra + (m-r)b)| <= m eps R
    out = np.linalg.norm(c.r * c.a + (c.m - c.r) * c.b) + c.m * e
    return float(max(zeta, np.linalg.norm(c.b) + e, out))


def _frame_one(c: ConstructionOne):
    m, n = c.m, c.n
    center = np.concatenate([c.a] + [np.zeros(n)] * (m - 1))
    scales = [c.eps * c.rho] + [1 / (13 * m)] * (m - 2) + [14 / 13]
    return center, np.kron(np.diag(scales), np.eye(n))


def _shell_support(c) -> tuple[float, float]:
    """Radial support of the symbol (conservative, inside the shell by admissibility)."""
    if isinstance(c, ConstructionOne):
        e = c.eps * c.rho
        a = 1 / (15 * c.m)
        lo = max(a - e, 0) ** 2 + (c.m - 2) / (17 * c.m) ** 2 + (12 / 13) ** 2
        hi = (a + e) ** 2 + (c.m - 2) / (13 * c.m) ** 2 + (14 / 13) ** 2
        return math.sqrt(lo), math.sqrt(hi)
    R, r, a = c.R, c.r, c.r ** -0.5
    lo = max(a - (c.eps + r - 1) * R, 0) ** 2 + (r - 1) * max(a - (c.eps + 1) * R, 0) ** 2
    hi = ((a + (c.eps + r - 1) * R) ** 2 + (r - 1) * (a + (c.eps + 1) * R) ** 2
          + (c.m - r) / (19 * c.m) ** 2)
    return math.sqrt(lo), math.sqrt(hi)


def symbol_one(c: ConstructionOne) -> Symbol:
    m, n, eps = c.m, c.n, c.eps
    phi, ring, last = c.phi_hat, c.ring, c.ring_last

    def func(xi):
        out = phi(np.linalg.norm(xi[..., :n] - c.a, axis=-1) / eps)
        for i in range(1, m - 1):
            out = out * ring(np.linalg.norm(xi[..., i * n:(i + 1) * n], axis=-1))
        return out * last(np.linalg.norm(xi[..., (m - 1) * n:], axis=-1))

    rs = _shell_support(c)
    return Symbol(m, n, func, support_radius=rs[1], radial_support=rs, frame=_frame_one(c),
                  name="construction_one")


def build_one(c: ConstructionOne, grid: GridSpec | None = None) -> Built:
    grid = construction_grid(c) if grid is None else grid
    m, n, eps, phi = c.m, c.n, c.eps, c.phi_hat
    sigma = symbol_one(c)

    def bump_at(center, p):
        amp = eps ** (n * _inv_p(p) - n)
        return lambda k: amp * phi(np.linalg.norm(k - center, axis=-1) / eps)

    fields = [_spectral_input(bump_at(c.a, c.p[i]), grid) for i in range(m - 1)]
    fields.append(_spectral_input(bump_at(c.b, c.p[-1]), grid))
    return Built(sigma, MultilinearInput(tuple(fields)), closed_form_one(c, grid))


def closed_form_one(c: ConstructionOne, grid: GridSpec) -> Field:
    """``eps^{n/p} e^{2 pi i ((m-1)a + b).x} (phi*phi)(eps x) phi(eps x)^{m-1}``."""
    n, eps = c.n, c.eps
    x = grid.points()
    prof = c.phi_hat
    u = eps * x
    phi = radial_inverse_transform(prof, prof.radius, n, u)
    phi2 = radial_inverse_transform(lambda r: prof(r) ** 2, prof.radius, n, u)
    inv_p = sum(_inv_p(q) for q in c.p)
    carrier = np.exp(2j * np.pi * (x @ ((c.m - 1) * c.a + c.b)))
    return Field(grid, eps ** (n * inv_p) * carrier * phi2 * phi ** (c.m - 1))


def _matrix_two(c: ConstructionTwo) -> np.ndarray:
    """Rows map ``xi - center`` to coordinates in which the support is the unit cube."""
    m, r, eps, R = c.m, c.r, c.eps, c.R
    M = np.zeros((m, m))
    M[0, :r] = 1 / (r * eps * R)
    for k in range(1, r):
        M[k, :r] = 1 / (r * R)
        M[k, k] -= 1 / R
    for i in range(r, m):
        M[i, i] = 19 * m
    return np.kron(M, np.eye(c.n))


def symbol_two(c: ConstructionTwo) -> Symbol:
    m, n, r, eps = c.m, c.n, c.r, c.eps
    phi, ring = c.phi_hat, c.ring

    def func(xi):
        blocks = [xi[..., i * n:(i + 1) * n] for i in range(m)]
        s = sum(blocks[:r])
        out = phi(np.linalg.norm(s - r * c.a, axis=-1) / (r * eps))
        for k in range(1, r):
            out = out * phi(np.linalg.norm(s / r - blocks[k], axis=-1))
        for i in range(r, m):
            out = out * ring(np.linalg.norm(blocks[i], axis=-1))
        return out

    center = np.concatenate([c.a] * r + [np.zeros(n)] * (m - r))
    frame = (center, np.linalg.inv(_matrix_two(c)))
    rs = _shell_support(c)
    return Symbol(m, n, func, support_radius=rs[1], radial_support=rs, frame=frame,
                  name="construction_two")


def build_two(c: ConstructionTwo, grid: GridSpec | None = None) -> Built:
    grid = construction_grid(c) if grid is None else grid
    m, n, r, eps = c.m, c.n, c.r, c.eps
    phi, zeta = c.phi_hat, c.zeta_hat
    sigma = symbol_two(c)

    fields = []
    zf = _spectral_input(lambda k: zeta(np.linalg.norm(k - c.a, axis=-1)), grid)
    fields += [zf] * r
    for i in range(r, m):
        amp = eps ** (n * _inv_p(c.p[i]) - n)
        fields.append(_spectral_input(
            lambda k, amp=amp: amp * phi(np.linalg.norm(k - c.b, axis=-1) / eps), grid))
    return Built(sigma, MultilinearInput(tuple(fields)), closed_form_two(c, grid))


def closed_form_two(c: ConstructionTwo, grid: GridSpec) -> Field:
    """``r^n e^{2 pi i (ra + (m-r)b).x} eps^n phi(eps r x) phi(0)^{r-1} eps^{sum_{i>r} n/p_i} phi(eps x)^{m-r}``."""
    m, n, r, eps = c.m, c.n, c.r, c.eps
    x = grid.points()
    prof = c.phi_hat
    phi_r = radial_inverse_transform(prof, prof.radius, n, eps * r * x)
    phi_1 = radial_inverse_transform(prof, prof.radius, n, eps * x)
    phi_0 = float(radial_inverse_transform(prof, prof.radius, n, np.zeros(n)))
    tail = sum(n * _inv_p(q) for q in c.p[r:])
    carrier = np.exp(2j * np.pi * (x @ (r * c.a + (m - r) * c.b)))
    vals = r**n * carrier * eps**n * phi_r * phi_0 ** (r - 1) * eps**tail * phi_1 ** (m - r)
    return Field(grid, vals)


# -- sweeps -------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    eps: float
    condition_A: float
    T_lp_numeric: float
    T_lp_closed: float
    f_norms: tuple[float, ...]


@dataclass(frozen=True)
class Sweep:
    rows: tuple[SweepRow, ...]

    @property
    def columns(self) -> list[str]:
        m = len(self.rows[0].f_norms)
        return ["condition_A", "T_lp_numeric", "T_lp_closed"] + [f"f{i + 1}_norm" for i in range(m)]

    def column(self, name: str) -> np.ndarray:
        if name.startswith("f") and name.endswith("_norm"):
            i = int(name[1:-5]) - 1
            return np.array([r.f_norms[i] for r in self.rows])
        if name not in self.columns:
            raise KeyError(f"unknown column {name!r}; have {self.columns}")
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def eps(self) -> np.ndarray:
        return np.array([r.eps for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(["epsilon"] + self.columns) + "\n")
        for r in self.rows:
            vals = [r.eps, r.condition_A, r.T_lp_numeric, r.T_lp_closed, *r.f_norms]
            buf.write(",".join(f"{v:.17g}" for v in vals) + "\n")
        return buf.getvalue()


def target_exponent(p: Sequence[float]) -> float:
    """``p`` with ``1/p = sum 1/p_i``; infinite when every ``p_i`` is."""
    inv = sum(_inv_p(q) for q in p)
    return np.inf if inv == 0 else 1 / inv


def input_norm(f: Field, p: float) -> float:
    """``H^p`` quasi-norm for ``p <= 1``, ``L^p`` norm otherwise."""
    return hp_quasinorm(f, p) if p <= 1 else lp_norm(f, p)


def check_geometric(eps_list: Sequence[float], min_points: int = 5) -> np.ndarray:
    e = np.sort(np.asarray(eps_list, dtype=float))[::-1]
    if len(e) < min_points:
        raise ValueError(f"need at least {min_points} eps values, got {len(e)}")
    if np.any(e <= 0) or len(np.unique(e)) != len(e):
        raise ValueError("eps values must be positive and distinct")
    ratios = e[1:] / e[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-9):
        raise ValueError("eps values must form a geometric sequence")
    return e


def make_construction(kind: str, m: int, n: int, p, order: SobolevOrder, eps: float, r: int | None = None):
    if kind == "one":
        return ConstructionOne(m, n, tuple(p), order, eps)
    if kind == "two":
        if r is None:
            raise ValueError("construction two needs r")
        return ConstructionTwo(m, n, r, tuple(p), order, eps)
    raise ValueError(f"unknown construction {kind!r}; expected 'one' or 'two'")


def sweep_row(c, samples: int = 256, extent: float = 32.0, sobolev_samples: int = 512) -> SweepRow:
    grid = construction_grid(c, samples, extent)
    built = build_one(c, grid) if isinstance(c, ConstructionOne) else build_two(c, grid)
    A = condition_A(built.sigma, c.order, (-1, 1), make_sharpness_psi(c.m * c.n), sobolev_samples)
    out = apply_multiplier(built.sigma, built.inputs)
    p = target_exponent(c.p)
    norms, seen = [], {}
    for f, q in zip(built.inputs.fields, c.p):
        key = (id(f), q)
        if key not in seen:
            seen[key] = input_norm(f, q)
        norms.append(seen[key])
    return SweepRow(c.eps, A.A, lp_norm(out, p), lp_norm(built.closed_form, p), tuple(norms))


def sweep(kind: str, m: int, n: int, p, order: SobolevOrder, eps_list, r: int | None = None,
          samples: int = 256, extent: float = 32.0, sobolev_samples: int = 512) -> Sweep:
    """One row per ``eps`` (descending); every ``eps`` is validated before any work."""
    eps = check_geometric(eps_list)
    cons = [make_construction(kind, m, n, p, order, float(e), r) for e in eps]
    return Sweep(tuple(sweep_row(c, samples, extent, sobolev_samples) for c in cons))


@dataclass(frozen=True)
class ExponentFit:
    column: str
    slope: float
    intercept: float
    r2: float

    def to_json(self) -> str:
        return json.dumps({"column": self.column, "slope": self.slope,
                           "intercept": self.intercept, "r2": self.r2}, sort_keys=True)


def fit_power_law(eps, values, column: str = "value") -> ExponentFit:
    """Least-squares line through ``(log eps, log value)``."""
    e = np.asarray(eps, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(e) != len(v) or len(e) < 4:
        raise ValueError("need at least 4 (eps, value) pairs")
    if np.any(v <= 0) or np.any(e <= 0):
        raise ValueError(f"column {column!r} has nonpositive entries; cannot fit a power law")
    x, y = np.log(e), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 if tot == 0 else float(np.clip(1 - np.sum(resid**2) / tot, 0.0, 1.0))
    return ExponentFit(column, float(slope), float(intercept), r2)


def fit_exponent(s: Sweep, column: str) -> ExponentFit:
    return fit_power_law(s.eps, s.column(column), column)


# -- the scaling lemma ----------------------------------------------------------

def gaussian_profile(r) -> np.ndarray:
    return np.exp(-np.pi * np.asarray(r, dtype=float) ** 2)


def lemma52_integral(phi: Callable = gaussian_profile, eps: float = 1.0, s: float = 1.0, n: int = 1,
                     extent_factor: float = 20.0, samples: int | None = None) -> float:
    """``int |phi(eps y)|^2 (1 + |y|^2)^s dy`` by a lattice sum on ``[-extent/2, extent/2)^n``.

    ``phi`` is a radial profile (a function of ``|x|``); the box has
    ``extent = extent_factor / eps``.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    if extent_factor < 20:
        raise ValueError("extent_factor must be at least 20")
    samples = samples or {1: 4096, 2: 512, 3: 128}.get(n, 32)
    g = GridSpec(n, samples, extent_factor / eps)
    y = g.points()
    rad = np.linalg.norm(y, axis=-1)
    vals = np.abs(phi(eps * rad)) ** 2 * (1 + rad**2) ** s
    w = g.spacing**n
    total = w * float(vals.sum())
    outer = np.max(np.abs(y), axis=-1) > 0.45 * g.extent
    tail = w * float(vals[outer].sum())
    if not total > 0 or tail > 1e-8 * total:
        raise NumericalGuardError(f"box too small: tail mass fraction {tail / total if total else np.inf:.3g}")
    return total


# -- index conditions -------------------------------------------------------------

SUFFICIENT = "SUFFICIENT"
BOUNDARY = "BOUNDARY"
FAILS_NECESSARY = "FAILS_NECESSARY"


@dataclass(frozen=True)
class Verdict:
    status: str
    witnesses: tuple[tuple[int, ...], ...]
    order_violations: tuple[int, ...]

    def __str__(self) -> str:
        return self.status


def _exact(x) -> Fraction:
    return Fraction(x).limit_denominator(10**9) if not isinstance(x, Fraction) else x


def check_conditions(m: int, n: int, p: Sequence[float], s: Sequence[float]) -> Verdict:
    """Classify ``(p, s)`` against the subset conditions, in exact rational arithmetic.

    Witnesses are the violating subsets as sorted 1-based index tuples.
    """
    if len(p) != m or len(s) != m:
        raise ValueError(f"need {m} values of p and s, got {len(p)} and {len(s)}")
    if not 1 <= m <= 20:
        raise ValueError(f"m must lie in [1, 20], got {m}")
    if any(not q > 0 for q in p) or any(x < 0 for x in s):
        raise ValueError("p must be positive and s nonnegative")
    terms = [_exact(si) / n - (Fraction(0) if np.isinf(pi) else 1 / _exact(pi)) for pi, si in zip(p, s)]
    half = Fraction(-1, 2)
    below, tight = [], False
    for size in range(1, m + 1):
        for J in itertools.combinations(range(m), size):
            t = sum(terms[i] for i in J)
            if t < half:
                below.append(tuple(i + 1 for i in J))
            elif t == half:
                tight = True
    low = tuple(i + 1 for i, si in enumerate(s) if _exact(si) < Fraction(n, 2))
    if below or low:
        return Verdict(FAILS_NECESSARY, tuple(below), low)
    if tight or any(_exact(si) == Fraction(n, 2) for si in s):
        return Verdict(BOUNDARY, (), ())
    return Verdict(SUFFICIENT, (), ())
