"""Hardy-space atoms and the H^p, BMO and weak-L^1 estimators on the lattice."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lattice import Field, GridSpec, Spectrum, forward, inverse, lp_norm
from .operator import apply_kernel
from .symbols import ramp_down


def default_moment_order(p: float, n: int) -> int:
    """``floor(n (1/p - 1)) + 1``, evaluated exactly for rational ``p``."""
    q = Fraction(p).limit_denominator(10_000)
    return math.floor(n * (1 / q - 1)) + 1


def _monomials(n: int, degree: int) -> list[tuple[int, ...]]:
    return [g for d in range(degree + 1)
            for g in itertools.product(range(d + 1), repeat=n) if sum(g) == d]


@dataclass(frozen=True, eq=False)
class Atom:
    center: np.ndarray
    side: float
    p: float
    moment_order: int
    profile: Field

    @property
    def volume(self) -> float:
        return self.side ** self.profile.grid.dimension

    def cube_mask(self) -> np.ndarray:
        return _cube_mask(self.profile.grid, self.center, self.side)

    def normalized_moments(self) -> np.ndarray:
        """``int t^g a dx / |Q|^{1 - 1/p}`` with ``t = (x - c)/side``, all ``|g| <= D``."""
        g = self.profile.grid
        t = (g.points() - self.center) / self.side
        a = self.profile.samples
        w = g.spacing ** g.dimension
        scale = self.volume ** (1 - 1 / self.p)
        return np.array([w * np.sum(np.prod(t ** np.array(gam), -1) * a) / scale
                         for gam in _monomials(g.dimension, self.moment_order)])


def _cube_mask(grid: GridSpec, center, side) -> np.ndarray:
    x = grid.points()
    lo = np.asarray(center) - side / 2
    return np.all((x >= lo) & (x < lo + side), axis=-1)


def make_atom(center, side: float, p: float, grid: GridSpec, seed: int = 0,
              moment_order: int | None = None) -> Atom:
    """Seeded smooth atom on the cube ``center + [-side/2, side/2)^n``.

    A random smooth bump is corrected by ``window * poly`` so that every
    moment of total degree ``<= D`` vanishes, then scaled to
    ``max |a| = |Q|^{-1/p}``.
    """
    n = grid.dimension
    center = np.broadcast_to(np.asarray(center, dtype=float), (n,)).copy()
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if side / grid.spacing < 8:
        raise ValueError(f"cube side {side} spans fewer than 8 samples (h = {grid.spacing})")
    if np.any(np.abs(center) + side / 2 > grid.extent / 2 + 1e-12):
        raise ValueError("cube does not fit inside the grid box")
    D = default_moment_order(p, n) if moment_order is None else int(moment_order)
    rng = np.random.default_rng(seed)
    t = (grid.points() - center) / side
    window = np.prod(ramp_down(np.abs(t), 0.1, 0.5), axis=-1)
    freqs = rng.integers(1, 4, size=(3, n))
    phases = rng.uniform(0, 2 * np.pi, 3)
    amps = rng.normal(size=3)
    g = 1.0 + sum(a * np.cos(2 * np.pi * (t @ k) + ph) for a, k, ph in zip(amps, freqs, phases))
    g = window * g
    gams = _monomials(n, D)
    mask = window > 0
    P = np.stack([np.prod(t[mask] ** np.array(gm), -1) for gm in gams], -1)
    # moments of (g - window * P beta) vanish: (P^T W P) beta = P^T g
    Wp = window[mask][:, None] * P
    M = P.T @ Wp
    if np.linalg.matrix_rank(M, tol=1e-10 * np.abs(M).max()) < len(gams):
        raise ValueError(f"cube too small for moment order {D}: moment matrix is rank deficient")
    beta = np.linalg.solve(M, P.T @ g[mask])
    a = np.zeros(grid.shape)
    a[mask] = g[mask] - Wp @ beta
    a *= side ** (-n / p) / np.abs(a).max()
    return Atom(center, float(side), float(p), D, Field(grid, a))


@dataclass(frozen=True, eq=False)
class AtomicSum:
    coefficients: tuple[float, ...]
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.atoms):
            raise ValueError("need one coefficient per atom")
        if len({a.p for a in self.atoms}) > 1:
            raise ValueError("atoms in one sum must share p")

    @property
    def p_sum(self) -> float:
        p = self.atoms[0].p
        return float(sum(abs(c) ** p for c in self.coefficients))


def atomic_synthesis(s: AtomicSum) -> Field:
    out = 0 * s.atoms[0].profile
    for c, a in zip(s.coefficients, s.atoms):
        out = out + c * a.profile
    return out


def swap_check(K: Field, sums: Sequence[AtomicSum]) -> tuple[Field, Field]:
    """``T^K`` of the synthesized inputs, and the sum over atom tuples of ``T^K`` on atoms."""
    lhs = apply_kernel(K, [atomic_synthesis(s) for s in sums])
    rhs = None
    for combo in itertools.product(*[list(zip(s.coefficients, s.atoms)) for s in sums]):
        lam = np.prod([c for c, _ in combo])
        term = lam * apply_kernel(K, [a.profile for _, a in combo])
        rhs = term if rhs is None else rhs + term
    return lhs, rhs


def gaussian_hat(xi) -> np.ndarray:
    """Transform of ``Phi(x) = exp(-pi |x|^2)``."""
    return np.exp(-np.pi * np.sum(np.asarray(xi) ** 2, axis=-1))


def default_scales(grid: GridSpec) -> np.ndarray:
    k = int(round(math.log2(grid.samples_per_axis)))
    return grid.spacing * 2.0 ** np.arange(k + 1)


def maximal_function(f: Field, scales=None, phi_hat=gaussian_hat) -> Field:
    """``max_t |Phi_t * f|`` over ``scales`` (spectral convolution)."""
    g = f.grid
    scales = default_scales(g) if scales is None else scales
    c = forward(f).coeffs
    k = g.frequencies()
    best = np.zeros(g.shape)
    for t in scales:
        best = np.maximum(best, np.abs(inverse(Spectrum(g, c * phi_hat(t * k))).samples))
    return Field(g, best)


def hp_quasinorm(f: Field, p: float, scales=None, phi_hat=gaussian_hat) -> float:
    return lp_norm(maximal_function(f, scales, phi_hat), p)


def bmo_norm(f: Field, min_samples: int = 4) -> float:
    """Max mean oscillation over dyadic subcubes with at least ``min_samples`` per side."""
    g = f.grid
    n, N = g.dimension, g.samples_per_axis
    a = f.samples
    best = 0.0
    s = N
    while s >= min_samples:
        B = N // s
        shape = []
        for _ in range(n):
            shape += [B, s]
        blocks = a.reshape(shape)
        inner = tuple(range(1, 2 * n, 2))
        mean = blocks.mean(axis=inner, keepdims=True)
        osc = np.abs(blocks - mean).mean(axis=inner)
        best = max(best, float(osc.max()))
        s //= 2
    return best


def weak_l1_quasinorm(f: Field, levels: int = 64, span: float = 1e-6) -> float:
    """``max_lambda lambda |{|f| >= lambda}|`` over a geometric sweep of ``lambda``."""
    a = np.abs(f.samples).ravel()
    top = a.max()
    if top == 0:
        return 0.0
    w = f.grid.spacing ** f.grid.dimension
    srt = np.sort(a)
    lam = np.geomspace(span * top, top, levels)
    counts = len(srt) - np.searchsorted(srt, lam, side="left")
    return float(np.max(lam * counts * w))


def dyadic_cube_average(f: Field, center, side: float, dilation: float) -> Field:
    """``avg_Q f`` times the indicator of the ``dilation``-fold concentric cube."""
    g = f.grid
    inside = _cube_mask(g, center, side)
    avg = float(np.mean(np.abs(f.samples[inside])))
    return Field(g, avg * _cube_mask(g, center, dilation * side))


def averaging_ratio(pieces: Sequence[tuple[Field, np.ndarray, float]], p: float) -> float:
    """``||sum f_Q||_p / ||sum avg_Q(f_Q) chi_{Q*}||_p`` with ``Q*`` the ``2 sqrt(n)`` dilate."""
    n = pieces[0][0].grid.dimension
    top = sum((fq for fq, _, _ in pieces[1:]), pieces[0][0])
    bottom = None
    for fq, c, s in pieces:
        term = dyadic_cube_average(fq, c, s, 2 * math.sqrt(n))
        bottom = term if bottom is None else bottom + term
    return lp_norm(top, p) / lp_norm(bottom, p)
