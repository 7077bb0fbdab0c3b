"""Multiplier symbols on R^{mn}: smooth cutoffs, bumps and a small algebra.

Symbols are evaluated lazily on arrays of frequency points with trailing
axis of length ``m*n`` (block ``i`` occupies coordinates ``i*n:(i+1)*n``).
Every bump is built from :func:`smooth_step`, so plateau values are exactly
0 or 1.

Besides ``support_radius`` a symbol may carry two optional support hints
used to pick sampling boxes downstream:

* ``radial_support = (rmin, rmax)``: ``sigma(xi) == 0`` unless
  ``rmin <= |xi| <= rmax``;
* ``frame = (center, basis)``: the support lies in the parallelotope
  ``center + basis @ [-1, 1]^{mn}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Frame = tuple[np.ndarray, np.ndarray]


def smooth_step(t):
    """C-infinity ramp: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    out = a / (a + b)
    return out if out.ndim else float(out)


def ramp_down(r, inner: float, outer: float):
    """1 for ``r <= inner``, 0 for ``r >= outer``."""
    return 1.0 - smooth_step((np.asarray(r, dtype=float) - inner) / (outer - inner))


@dataclass(frozen=True, eq=False)
class Symbol:
    m: int
    n: int
    func: Callable[[np.ndarray], np.ndarray]
    support_radius: float = np.inf
    radial_support: tuple[float, float] | None = None
    frame: Frame | None = field(default=None)
    name: str = "symbol"

    @property
    def dim(self) -> int:
        return self.m * self.n

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.dim:
            raise ValueError(f"{self.name}: expected trailing axis {self.dim}, got {xi.shape}")
        out = np.asarray(self.func(xi), dtype=complex)
        out = np.broadcast_to(out, xi.shape[:-1]).copy()
        if np.isfinite(self.support_radius):
            out[np.linalg.norm(xi, axis=-1) > self.support_radius] = 0.0
        return out

    def blocks(self, xi: np.ndarray) -> list[np.ndarray]:
        return [xi[..., i * self.n:(i + 1) * self.n] for i in range(self.m)]


def _norm(xi):
    return np.linalg.norm(xi, axis=-1)


def _ball_frame(d: int, radius: float) -> Frame:
    return np.zeros(d), radius * np.eye(d)


def constant(m: int, n: int, value: complex = 1.0) -> Symbol:
    return Symbol(m, n, lambda xi: np.full(xi.shape[:-1], value, dtype=complex), name="one")


def radial(profile: Callable, m: int, n: int, rmin: float, rmax: float, name: str) -> Symbol:
    """Radial symbol ``profile(|xi|)`` vanishing outside ``[rmin, rmax]``."""
    return Symbol(
        m, n, lambda xi: profile(_norm(xi)), support_radius=rmax,
        radial_support=(rmin, rmax), frame=_ball_frame(m * n, rmax), name=name,
    )


def annular_bump(r0: float, r1: float, r2: float, r3: float, m: int = 1, n: int = 1) -> Symbol:
    """0 for ``|xi| <= r0`` or ``|xi| >= r3``, exactly 1 on ``[r1, r2]``."""
    if not (0 <= r0 < r1 <= r2 < r3):
        raise ValueError(f"annulus radii must satisfy 0 <= r0 < r1 <= r2 < r3, got {(r0, r1, r2, r3)}")

    def profile(r):
        return smooth_step((r - r0) / (r1 - r0)) * ramp_down(r, r2, r3)

    return radial(profile, m, n, r0, r3, f"annulus({r0},{r1},{r2},{r3})")


def ball_bump(plateau: float, radius: float, m: int = 1, n: int = 1) -> Symbol:
    """1 on ``|xi| <= plateau``, supported in ``|xi| <= radius``."""
    if not 0 <= plateau < radius:
        raise ValueError(f"need 0 <= plateau < radius, got {(plateau, radius)}")
    return radial(lambda r: ramp_down(r, plateau, radius), m, n, 0.0, radius,
                  f"ball({plateau},{radius})")


def _dyadic_psi(inner: float, outer: float, dim: int, name: str) -> Symbol:
    # eta = 1 on |xi| <= inner, 0 beyond outer; psi = eta - eta(2 .)
    def profile(r):
        return ramp_down(r, inner, outer) - ramp_down(2 * r, inner, outer)

    return radial(profile, 1, dim, inner / 2, outer, name)


def make_lp_psi(dim: int) -> Symbol:
    """Littlewood-Paley bump supported in ``1/2 <= |xi| <= 2``."""
    return _dyadic_psi(1.0, 2.0, dim, "lp_psi")


def make_sharpness_psi(dim: int) -> Symbol:
    """Bump supported in ``2^{-3/4} <= |xi| <= 2^{3/4}``, 1 on ``[2^{-1/4}, 2^{1/4}]``."""
    return _dyadic_psi(2**0.25, 2**0.75, dim, "sharpness_psi")


def theta_cutoff(x) -> np.ndarray:
    """0 for ``|x| <= 1``, 1 for ``|x| >= 2``."""
    return smooth_step(_norm(np.asarray(x, dtype=float)) - 1.0)


def phi_eps_annulus(eps: float, m: int = 1, n: int = 1) -> Symbol:
    """``theta(xi/eps) - theta(eps*xi)``: 1 on ``2eps <= |xi| <= 1/eps``."""
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")

    def profile(r):
        return smooth_step(r / eps - 1.0) - smooth_step(eps * r - 1.0)

    return radial(profile, m, n, eps, 2 / eps, f"phi_eps({eps})")


def mikhlin_symbol(m: int, n: int) -> Symbol:
    """``prod_i xi_i[0] / |xi|^m``: homogeneous of degree 0, zero at the origin."""

    def func(xi):
        num = np.prod(xi[..., ::n], axis=-1)
        den = _norm(xi) ** m
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)

    return Symbol(m, n, func, name="mikhlin")


def modulation(a, m: int, n: int) -> Symbol:
    """``exp(-2 pi i sum_i a_i . xi_i)``; translates input ``i`` by ``a_i``.

    ``a`` may have length ``n`` (same shift for every block) or ``m*n``.
    """
    a = np.asarray(a, dtype=float).ravel()
    if a.size == n:
        a = np.tile(a, m)
    if a.size != m * n:
        raise ValueError(f"modulation vector must have length {n} or {m * n}")
    return Symbol(m, n, lambda xi: np.exp(-2j * np.pi * (xi @ a)), name="modulation")


# -- algebra --------------------------------------------------------------

def shift(s: Symbol, a) -> Symbol:
    """``xi -> s(xi - a)``."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size != s.dim:
        raise ValueError(f"shift vector has length {a.size}, symbol dimension is {s.dim}")
    na = float(np.linalg.norm(a))
    rs = None
    if s.radial_support is not None:
        lo, hi = s.radial_support
        rs = (max(0.0, lo - na), hi + na)
    fr = None if s.frame is None else (s.frame[0] + a, s.frame[1])
    return Symbol(s.m, s.n, lambda xi: s(xi - a), s.support_radius + na, rs, fr,
                  f"shift({s.name})")


def dilate(s: Symbol, t: float) -> Symbol:
    """``xi -> s(t * xi)``."""
    if t == 0:
        raise ValueError("dilation factor must be nonzero")
    at = abs(t)
    rs = None if s.radial_support is None else tuple(r / at for r in s.radial_support)
    fr = None if s.frame is None else (s.frame[0] / t, s.frame[1] / at)
    return Symbol(s.m, s.n, lambda xi: s(t * xi), s.support_radius / at, rs, fr,
                  f"dilate({s.name},{t})")


def tensor(factors: Sequence[Symbol]) -> Symbol:
    """``(xi_1, ..., xi_k) -> prod s_i(xi_i)`` over consecutive blocks."""
    factors = list(factors)
    n = factors[0].n
    if any(f.n != n for f in factors):
        raise ValueError("tensor factors must share the block dimension n")
    cuts = np.cumsum([0] + [f.dim for f in factors])

    def func(xi):
        out = np.ones(xi.shape[:-1], dtype=complex)
        for f, lo, hi in zip(factors, cuts[:-1], cuts[1:]):
            out = out * f(xi[..., lo:hi])
        return out

    radii = [f.support_radius for f in factors]
    R = float(np.sqrt(np.sum(np.square(radii)))) if np.all(np.isfinite(radii)) else np.inf
    rs = None
    if all(f.radial_support is not None for f in factors):
        lo = np.sqrt(sum(f.radial_support[0] ** 2 for f in factors))
        hi = np.sqrt(sum(f.radial_support[1] ** 2 for f in factors))
        rs = (float(lo), float(hi))
    fr = None
    if all(f.frame is not None for f in factors):
        fr = (np.concatenate([f.frame[0] for f in factors]),
              _block_diag([f.frame[1] for f in factors]))
    return Symbol(sum(f.m for f in factors), n, func, R, rs, fr,
                  "tensor(" + ",".join(f.name for f in factors) + ")")


def compose_linear(s: Symbol, M, m: int | None = None, n: int | None = None) -> Symbol:
    """``xi -> s(M xi)``; the result has block structure ``(m, n)``."""
    M = np.asarray(M, dtype=float)
    m = s.m if m is None else m
    n = s.n if n is None else n
    if M.shape != (s.dim, m * n):
        raise ValueError(f"matrix shape {M.shape} incompatible with {s.dim} <- {m * n}")
    R, rs, fr = np.inf, None, None
    if M.shape[0] == M.shape[1] and abs(np.linalg.det(M)) > 0:
        Minv = np.linalg.inv(M)
        op_inv = float(np.linalg.norm(Minv, 2))
        op = float(np.linalg.norm(M, 2))
        R = s.support_radius * op_inv
        if s.radial_support is not None:
            rs = (s.radial_support[0] / op, s.radial_support[1] * op_inv)
        if s.frame is not None:
            fr = (Minv @ s.frame[0], Minv @ s.frame[1])
    return Symbol(m, n, lambda xi: s(xi @ M.T), R, rs, fr, f"linear({s.name})")


def multiply(a: Symbol, b: Symbol) -> Symbol:
    """Pointwise product on a common ``R^d``; block structure taken from ``a``."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    rs = None
    if a.radial_support is not None and b.radial_support is not None:
        rs = (max(a.radial_support[0], b.radial_support[0]),
              min(a.radial_support[1], b.radial_support[1]))
    else:
        rs = a.radial_support or b.radial_support
    frames = [f for f in (a.frame, b.frame) if f is not None]
    fr = min(frames, key=lambda f: abs(np.linalg.det(f[1]))) if frames else None
    return Symbol(a.m, a.n, lambda xi: a(xi) * b(xi),
                  min(a.support_radius, b.support_radius), rs, fr, f"({a.name}*{b.name})")


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    d = sum(m.shape[0] for m in mats)
    out = np.zeros((d, d))
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out
