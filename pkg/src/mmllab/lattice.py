"""Periodized sampling of R^n and the lattice Fourier transform.

A :class:`GridSpec` describes the box ``[-L/2, L/2)^n`` sampled at
``N`` points per axis, ``x = k*h - L/2`` with ``h = L/N``.  Fields hold
point samples; spectra hold trigonometric coefficients indexed by integer
frequency vectors ``-N/2 <= k_i < N/2`` (frequency ``k/L``).

Normalization::

    coeffs[k] = N^-n * sum_x samples(x) exp(-2 pi i x.k/L)
    samples(x) = sum_k coeffs[k] exp(2 pi i x.k/L)

so that ``h^n * sum |f|^2 == L^n * sum |c|^2`` and ``L^n * coeffs[k]``
is the Riemann-sum approximation of the continuum transform at ``k/L``.
Arrays are stored with shape ``(N,)*n``; row-major flattening and the
ascending frequency order are the public ordering contract.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    dimension: int
    samples_per_axis: int
    extent: float

    def __post_init__(self):
        n, N, L = self.dimension, self.samples_per_axis, self.extent
        if not (isinstance(n, (int, np.integer)) and 1 <= n):
            raise ValueError(f"dimension must be a positive integer, got {n!r}")
        if not isinstance(N, (int, np.integer)) or N < 8 or N & (N - 1):
            raise ValueError(f"samples_per_axis must be a power of two >= 8, got {N!r}")
        if not (np.isfinite(L) and L > 0):
            raise ValueError(f"extent must be positive, got {L!r}")

    @property
    def spacing(self) -> float:
        return self.extent / self.samples_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.samples_per_axis,) * self.dimension

    @property
    def size(self) -> int:
        return self.samples_per_axis**self.dimension

    @property
    def nyquist(self) -> float:
        return self.samples_per_axis / (2 * self.extent)

    def axis(self) -> np.ndarray:
        """Sample coordinates along one axis."""
        return np.arange(self.samples_per_axis) * self.spacing - self.extent / 2

    def frequency_indices(self) -> np.ndarray:
        N = self.samples_per_axis
        return np.arange(-N // 2, N // 2)

    def frequency_axis(self) -> np.ndarray:
        return self.frequency_indices() / self.extent

    def points(self) -> np.ndarray:
        """All lattice points, shape ``(N,)*n + (n,)``."""
        return _mesh(self.axis(), self.dimension)

    def frequencies(self) -> np.ndarray:
        return _mesh(self.frequency_axis(), self.dimension)

    def scaled(self, factor: int) -> "GridSpec":
        """Same box, ``factor`` times as many samples per axis."""
        return GridSpec(self.dimension, self.samples_per_axis * factor, self.extent)


def _mesh(axis: np.ndarray, n: int) -> np.ndarray:
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack(grids, axis=-1)


@dataclass(frozen=True, eq=False)
class Field:
    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} samples, got {s.size}")
        s = s.reshape(self.grid.shape)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def _other(self, other):
        if isinstance(other, Field):
            _same_grid(self.grid, other.grid)
            return other.samples
        return other

    def __add__(self, other) -> "Field":
        return Field(self.grid, self.samples + self._other(other))

    def __sub__(self, other) -> "Field":
        return Field(self.grid, self.samples - self._other(other))

    __radd__ = __add__

    def __mul__(self, c) -> "Field":
        if isinstance(c, Field):
            _same_grid(self.grid, c.grid)
            return Field(self.grid, self.samples * c.samples)
        return Field(self.grid, self.samples * c)

    __rmul__ = __mul__

    def abs_max(self) -> float:
        return float(np.max(np.abs(self.samples)))


@dataclass(frozen=True, eq=False)
class Spectrum:
    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} coefficients, got {c.size}")
        c = c.reshape(self.grid.shape)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def at(self, k) -> complex:
        """Coefficient at integer frequency vector ``k``."""
        half = self.grid.samples_per_axis // 2
        idx = tuple(int(ki) + half for ki in np.atleast_1d(k))
        return complex(self.coeffs[idx])


def _same_grid(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def _alternating(grid: GridSpec) -> np.ndarray:
    # exp(i pi k) per axis: the phase from the box offset -L/2
    sign = np.where(grid.frequency_indices() % 2 == 0, 1.0, -1.0)
    out = np.ones(grid.shape)
    for ax in range(grid.dimension):
        shape = [1] * grid.dimension
        shape[ax] = -1
        out = out * sign.reshape(shape)
    return out


def sample(f: Callable[[np.ndarray], np.ndarray], grid: GridSpec) -> Field:
    """Evaluate ``f`` at every lattice point.

    ``f`` receives an array of shape ``(..., n)`` and must broadcast.
    """
    return Field(grid, np.broadcast_to(f(grid.points()), grid.shape))


def forward(f: Field) -> Spectrum:
    g = f.grid
    c = np.fft.fftshift(np.fft.fftn(f.samples)) / g.size
    return Spectrum(g, c * _alternating(g))


def inverse(s: Spectrum) -> Field:
    g = s.grid
    c = np.fft.ifftshift(s.coeffs * _alternating(g))
    return Field(g, np.fft.ifftn(c) * g.size)


def lp_norm(f: Field, p: float) -> float:
    """Riemann-sum ``L^p`` (quasi-)norm; ``p = inf`` gives the sup norm."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p!r}")
    a = np.abs(f.samples)
    if np.isinf(p):
        return float(a.max())
    w = f.grid.spacing**f.grid.dimension
    return float((w * np.sum(a.ravel() ** p)) ** (1.0 / p))


def spectral_l2_norm(s: Spectrum) -> float:
    g = s.grid
    return float(np.sqrt(g.extent**g.dimension * np.sum(np.abs(s.coeffs.ravel()) ** 2)))


# -- CSV ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_csv(values: np.ndarray) -> str:
    """Serialize samples or coefficients as ``index,re,im`` rows."""
    buf = io.StringIO()
    buf.write("index,re,im\n")
    for i, v in enumerate(np.asarray(values).ravel()):
        buf.write(f"{i},{_fmt(v.real)},{_fmt(v.imag)}\n")
    return buf.getvalue()


def from_csv(text: str, grid: GridSpec) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["index", "re", "im"]:
        raise ValueError("expected header 'index,re,im'")
    body = [r for r in rows[1:] if r]
    if len(body) != grid.size:
        raise ValueError(f"expected {grid.size} rows, got {len(body)}")
    out = np.empty(grid.size, dtype=complex)
    for expect, (i, re, im) in enumerate(body):
        if int(i) != expect:
            raise ValueError(f"row {expect + 2}: index {i} out of order")
        out[expect] = complex(float(re), float(im))
    return out.reshape(grid.shape)


def save_field(f: Field, path: str | Path) -> None:
    Path(path).write_text(to_csv(f.samples))


def load_field(path: str | Path, grid: GridSpec) -> Field:
    return Field(grid, from_csv(Path(path).read_text(), grid))


def save_spectrum(s: Spectrum, path: str | Path) -> None:
    Path(path).write_text(to_csv(s.coeffs))


def load_spectrum(path: str | Path, grid: GridSpec) -> Spectrum:
    return Spectrum(grid, from_csv(Path(path).read_text(), grid))
