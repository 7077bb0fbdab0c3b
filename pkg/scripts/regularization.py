"""Convergence of the regularized operators on the Mikhlin fixture."""

from dataclasses import dataclass, field

from mmllab.lattice import GridSpec, Spectrum, inverse
from mmllab.operator import l2_convergence_check, regularization_sobolev_check
from mmllab.sobolev import SobolevOrder
from mmllab.symbols import ball_bump, mikhlin_symbol, shift


@dataclass
class Config:
    grid: GridSpec = GridSpec(1, 64, 16.0)
    centers: tuple[float, ...] = (0.3, -0.2)
    eps_l2: list[float] = field(default_factory=lambda: [2.0**-k for k in range(3, 11)])
    eps_sobolev: list[float] = field(default_factory=lambda: [2.0**-k for k in (2, 4, 6, 8, 10)])


def main(cfg: Config) -> None:
    g = cfg.grid
    bump = ball_bump(0, 0.4)
    fs = [inverse(Spectrum(g, shift(bump, [c])(g.frequencies()))) for c in cfg.centers]
    sigma = mikhlin_symbol(len(fs), 1)
    tab = l2_convergence_check(sigma, fs, cfg.eps_l2)
    print(f"reference ||T f||_2 = {tab.reference:.6g}")
    print(tab.to_csv())
    st = regularization_sobolev_check(sigma, SobolevOrder((1.0,) * len(fs)), cfg.eps_sobolev)
    print(f"condition A of sigma = {st.reference:.6g}, max over eps ratio = {max(st.values) / st.reference:.4f}")
    print(st.to_csv())


if __name__ == "__main__":
    main(Config())
