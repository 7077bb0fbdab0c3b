"""Estimator for the coordinate-type Hormander integral condition on a gridded kernel.

For each sample ``x`` the value is

    sum_k  int_{|y_k| > 2|x|} |K(y_1, ..., x - y_k, ..., y_m) - K(y_1, ..., y_m)| dy

restricted to the kernel's grid box.  ``x`` must be a lattice vector so
that ``x - y_k`` lands on the grid; points that leave the box count as
zero, which the edge-decay precondition makes harmless.  The sup over a
finite set of ``x`` is a lower bound for the true constant.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalGuardError
from .lattice import Field

EDGE_DECAY = 1e-8


@dataclass(frozen=True)
class HormanderReport:
    per_x: tuple[tuple[np.ndarray, float], ...]
    sup_value: float
    truncation_box: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x_norm,value\n")
        for x, v in self.per_x:
            buf.write(f"{np.linalg.norm(x):.17g},{v:.17g}\n")
        buf.write(f"sup,{self.sup_value:.17g}\n")
        return buf.getvalue()


def in_gamma(y_k, x) -> np.ndarray:
    """Membership of points with ``k``-th block ``y_k`` in the region ``|y_k| > 2|x|``."""
    return np.linalg.norm(np.asarray(y_k, dtype=float), axis=-1) > 2 * np.linalg.norm(x)


def check_edge_decay(K: Field, budget: float = EDGE_DECAY) -> float:
    """Largest ``|K|`` on the box faces relative to ``max |K|``; raises above ``budget``."""
    a = np.abs(K.samples)
    top = float(a.max())
    if top == 0:
        return 0.0
    edge = 0.0
    for ax in range(a.ndim):
        edge = max(edge, float(np.take(a, 0, axis=ax).max()), float(np.take(a, -1, axis=ax).max()))
    if edge > budget * top:
        raise NumericalGuardError(
            f"kernel does not decay at the box edge: {edge / top:.3g} of max > {budget:g}")
    return edge / top


def default_x_samples(K: Field, n: int, count: int = 16) -> list[np.ndarray]:
    """Lattice points log-spaced in ``|x|`` over ``[h, L/4]`` along the first axis."""
    g = K.grid
    h = g.spacing
    steps = np.unique(np.round(np.geomspace(1, g.samples_per_axis / 4, count)).astype(int))
    out = []
    for q in steps:
        x = np.zeros(n)
        x[0] = q * h
        out.append(x)
    return out


def _lattice_index(x: np.ndarray, h: float) -> np.ndarray:
    q = x / h
    qi = np.round(q)
    if np.any(np.abs(q - qi) > 1e-9 * np.maximum(1, np.abs(q))):
        raise ValueError(f"x = {x} is not a lattice vector for spacing {h}")
    return qi.astype(int)


def _reflect_shift(a: np.ndarray, axes: Sequence[int], q: Sequence[int]) -> np.ndarray:
    """``out[j] = a[q - j + N]`` along each axis in ``axes`` (zero outside the box)."""
    out = a
    for ax, qa in zip(axes, q):
        N = a.shape[ax]
        flipped = np.flip(out, axis=ax)
        # flipped[i] = a[N - 1 - i]; want a[q + N - j] = flipped[j - q - 1]
        s = int(qa) + 1
        res = np.zeros_like(flipped)
        src = [slice(None)] * a.ndim
        dst = [slice(None)] * a.ndim
        if s >= 0:
            if s < N:
                src[ax], dst[ax] = slice(0, N - s), slice(s, N)
                res[tuple(dst)] = flipped[tuple(src)]
        else:
            if -s < N:
                src[ax], dst[ax] = slice(-s, N), slice(0, N + s)
                res[tuple(dst)] = flipped[tuple(src)]
        out = res
    return out


def hormander_value(K: Field, m: int, x) -> float:
    g = K.grid
    if g.dimension % m:
        raise ValueError(f"kernel dimension {g.dimension} is not a multiple of m={m}")
    n = g.dimension // m
    x = np.asarray(x, dtype=float).reshape(n)
    if not np.any(x):
        raise ValueError("x = 0 is excluded: the region would be the whole space")
    q = _lattice_index(x, g.spacing)
    a = K.samples
    ax1 = g.axis()
    w = g.spacing ** g.dimension
    total = 0.0
    for k in range(m):
        axes = list(range(k * n, (k + 1) * n))
        shifted = _reflect_shift(a, axes, q)
        yk = np.stack(np.meshgrid(*([ax1] * n), indexing="ij"), -1)
        rk = np.linalg.norm(yk, axis=-1)
        edge = np.isclose(rk, 2 * np.linalg.norm(x), rtol=1e-12, atol=0)
        # half weight on the boundary sphere, as in the trapezoid rule
        mask = np.where(edge, 0.5, in_gamma(yk, x).astype(float))
        shape = [1] * g.dimension
        for ax in axes:
            shape[ax] = g.samples_per_axis
        diff = np.abs(shifted - a) * mask.reshape(shape)
        total += w * float(diff.sum())
    return total


def hormander_constant(K: Field, m: int, x_samples=None) -> HormanderReport:
    """Per-``x`` values of the integral condition and their max (a lower bound for the sup)."""
    check_edge_decay(K)
    n = K.grid.dimension // m
    xs = default_x_samples(K, n) if x_samples is None else [np.asarray(x, dtype=float).reshape(n)
                                                             for x in x_samples]
    rows = sorted(((x, hormander_value(K, m, x)) for x in xs), key=lambda r: np.linalg.norm(r[0]))
    return HormanderReport(tuple(rows), max(v for _, v in rows), K.grid.extent)
