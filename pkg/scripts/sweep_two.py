"""Exponent sweep for the shared-frequency construction (r of m inputs aligned)."""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from mmllab.sharpness import fit_exponent, sweep
from mmllab.sobolev import SobolevOrder


@dataclass
class Config:
    m: int = 2
    n: int = 1
    r: int = 2
    p: tuple[float, ...] = (0.5, 0.5)
    s: tuple[float, ...] = (1.0, 1.0)
    eps: list[float] = field(default_factory=lambda: [2.0**-k for k in range(4, 10)])
    out: Path = Path("runs/sweep_two")


def main(cfg: Config) -> None:
    sw = sweep("two", cfg.m, cfg.n, cfg.p, SobolevOrder(cfg.s), cfg.eps, r=cfg.r)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "sweep.csv").write_text(sw.to_csv())
    for col in ("condition_A", "T_lp_numeric", "T_lp_closed"):
        fit = fit_exponent(sw, col)
        (cfg.out / f"fit_{col}.json").write_text(fit.to_json())
        print(f"{col:14s} slope {fit.slope:+.4f}  r2 {fit.r2:.5f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=int, default=Config.r)
    ap.add_argument("--p", type=float, nargs="+", default=list(Config.p))
    ap.add_argument("--out", type=Path, default=Config.out)
    a = ap.parse_args()
    main(Config(r=a.r, p=tuple(a.p), out=a.out))
