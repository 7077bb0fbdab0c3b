"""Power-law fit of the weighted Gaussian integral as eps shrinks."""

from dataclasses import dataclass, field

from mmllab.sharpness import fit_power_law, lemma52_integral


@dataclass
class Config:
    n: int = 1
    orders: tuple[float, ...] = (1.0, 2.0)
    eps: list[float] = field(default_factory=lambda: [2.0**-k for k in range(5, 11)])


def main(cfg: Config) -> None:
    for s in cfg.orders:
        vals = [lemma52_integral(eps=e, s=s, n=cfg.n) for e in cfg.eps]
        fit = fit_power_law(cfg.eps, vals)
        print(f"s={s:g}: slope {fit.slope:+.4f} (expected {-(cfg.n + 2 * s):+g}), r2 {fit.r2:.6f}")


if __name__ == "__main__":
    main(Config())
