"""Command-line harness: ``mmllab <command> [flags]`` or ``mmllab --config run.json``.

Every command validates its parameters first, computes, then writes all
artifacts plus ``manifest.json`` atomically into the output directory.
Exit status is 0 on success, 2 on invalid configuration and 3 when a
numerical guard trips.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")

LEMMA_NOTE = ("substitution u = eps*y gives value = eps^-n int |phi(u)|^2 (1+|u|^2/eps^2)^s du, "
              "so the expected slope is -(n+2s); the lemma as stated reads -n-s")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# -- parsing helpers -------------------------------------------------------

def _number(text: str, field: str) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "∞"):
        return float("inf")
    m = re.fullmatch(r"([+-]?\d+(?:\.\d*)?)\^([+-]?\d+)", t)
    try:
        if m:
            return float(m.group(1)) ** int(m.group(2))
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(field, f"cannot parse {text!r} as a number") from None


def parse_list(value, field: str) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [_number(v, field) for v in value]
    if isinstance(value, (int, float)):
        return [float(value)]
    parts = [p for p in str(value).split(",") if p.strip()]
    if not parts:
        raise ConfigError(field, "empty list")
    return [_number(p, field) for p in parts]


def parse_eps(value, field: str = "eps") -> list[float]:
    """``2^-4..2^-9`` (powers of two, both ends inclusive) or an explicit list."""
    if isinstance(value, str) and ".." in value:
        m = re.fullmatch(r"\s*2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)\s*", value)
        if not m:
            raise ConfigError(field, f"malformed range {value!r}; expected like 2^-4..2^-9")
        a, b = int(m.group(1)), int(m.group(2))
        step = 1 if b >= a else -1
        return [2.0**k for k in range(a, b + step, step)]
    return parse_list(value, field)


def parse_grid(value, field: str = "grid"):
    from .lattice import GridSpec

    if isinstance(value, dict):
        n, N, L = value.get("dimension", 1), value.get("samples"), value.get("extent")
    else:
        m = re.fullmatch(r"\s*(\d+)x(\d+(?:\.\d*)?)\s*", str(value))
        if not m:
            raise ConfigError(field, f"expected NxL such as 256x32, got {value!r}")
        n, N, L = 1, int(m.group(1)), float(m.group(2))
    try:
        return GridSpec(int(n), int(N), float(L))
    except (TypeError, ValueError) as e:
        raise ConfigError(field, str(e)) from None


def _int(params, key, default=None) -> int:
    v = params.get(key, default)
    if v is None:
        raise ConfigError(key, "required")
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected an integer, got {v!r}") from None


def _require(params, key):
    if params.get(key) is None:
        raise ConfigError(key, "required")
    return params[key]


def _symbol(name: str, m: int, n: int):
    from . import symbols

    table = {"mikhlin": symbols.mikhlin_symbol, "constant": symbols.constant}
    if name not in table:
        raise ConfigError("symbol", f"unknown symbol {name!r}; choose from {sorted(table)}")
    return table[name](m, n)


def _order(params, m: int):
    from .sobolev import SobolevOrder

    s = parse_list(_require(params, "s"), "s")
    if len(s) != m:
        raise ConfigError("s", f"need {m} orders, got {len(s)}")
    try:
        return SobolevOrder(tuple(s))
    except ValueError as e:
        raise ConfigError("s", str(e)) from None


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# -- commands --------------------------------------------------------------
# each returns (artifacts: {filename: text}, stdout text, extra manifest fields)

def cmd_sweep(params, grid):
    from . import sharpness as sh

    kind = _require(params, "construction")
    m, n = _int(params, "m"), _int(params, "n", 1)
    p = parse_list(_require(params, "p"), "p")
    if len(p) != m:
        raise ConfigError("p", f"need {m} exponents, got {len(p)}")
    order = _order(params, m)
    eps = parse_eps(_require(params, "eps"))
    r = params.get("r")
    r = None if r is None else _int(params, "r")
    try:
        eps = sh.check_geometric(eps)
        for e in eps:
            sh.make_construction(kind, m, n, p, order, float(e), r)
    except ValueError as e:
        raise ConfigError("eps" if "eps" in str(e) else "construction", str(e)) from None
    samples, extent = (256, 32.0) if grid is None else (grid.samples_per_axis, grid.extent)
    result = sh.sweep(kind, m, n, p, order, eps, r, samples=samples, extent=extent)
    out = {"sweep.csv": result.to_csv()}
    fits = []
    for col in result.columns:
        try:
            fit = sh.fit_exponent(result, col)
        except ValueError:
            continue
        out[f"fit_{col}.json"] = fit.to_json() + "\n"
        fits.append(fit)
    return out, "\n".join(f.to_json() for f in fits), {}


def cmd_check_conditions(params, grid):
    from .sharpness import check_conditions

    m, n = _int(params, "m"), _int(params, "n", 1)
    p = parse_list(_require(params, "p"), "p")
    s = parse_list(_require(params, "s"), "s")
    try:
        v = check_conditions(m, n, p, s)
    except ValueError as e:
        raise ConfigError("p", str(e)) from None
    body = json.dumps({"status": v.status, "witnesses": [list(w) for w in v.witnesses],
                       "order_violations": list(v.order_violations)}, sort_keys=True)
    return {"verdict.json": body + "\n"}, v.status, {}


def cmd_sobolev_norm(params, grid):
    from .sobolev import condition_A

    m, n = _int(params, "m"), _int(params, "n", 1)
    sigma = _symbol(params.get("symbol", "mikhlin"), m, n)
    order = _order(params, m)
    jr = parse_list(params.get("j_range", "-8,8"), "j_range")
    if len(jr) != 2 or jr[0] > jr[1]:
        raise ConfigError("j_range", "expected lo,hi with lo <= hi")
    A = condition_A(sigma, order, (int(jr[0]), int(jr[1])))
    return {"condition_A.csv": A.to_csv()}, _fmt(A.A), {}


def _load_inputs(params, grid, m):
    from .lattice import load_field

    files = params.get("inputs")
    if grid is None:
        raise ConfigError("grid", "required")
    if not files:
        raise ConfigError("inputs", "required")
    files = files.split(",") if isinstance(files, str) else list(files)
    if len(files) != m:
        raise ConfigError("inputs", f"need {m} files, got {len(files)}")
    for f in files:
        if not Path(f).is_file():
            raise ConfigError("inputs", f"no such file {f!r}")
    try:
        return [load_field(f, grid) for f in files]
    except ValueError as e:
        raise ConfigError("inputs", str(e)) from None


def cmd_apply(params, grid):
    from .lattice import to_csv
    from .operator import MultilinearInput, apply_multiplier

    m, n = _int(params, "m"), _int(params, "n", 1)
    sigma = _symbol(params.get("symbol", "mikhlin"), m, n)
    fields = _load_inputs(params, grid, m)
    out = apply_multiplier(sigma, MultilinearInput(tuple(fields)))
    return {"output.csv": to_csv(out.samples)}, "", {}


def cmd_regularize_check(params, grid):
    from .operator import MultilinearInput, l2_convergence_check, regularization_sobolev_check

    m, n = _int(params, "m"), _int(params, "n", 1)
    sigma = _symbol(params.get("symbol", "mikhlin"), m, n)
    order = _order(params, m)
    eps = parse_eps(_require(params, "eps"))
    if any(not 0 < e < 0.5 for e in eps):
        raise ConfigError("eps", "every eps must lie in (0, 1/2)")
    if not order.supercritical(n):
        raise ConfigError("s", "orders must all exceed n/2")
    sob = regularization_sobolev_check(sigma, order, eps)
    out = {"sobolev.csv": sob.to_csv()}
    extra = {"reference_condition_A": sob.reference}
    if params.get("inputs"):
        fields = _load_inputs(params, grid, m)
        l2 = l2_convergence_check(sigma, MultilinearInput(tuple(fields)), eps)
        out["l2.csv"] = l2.to_csv()
        extra["reference_l2"] = l2.reference
    return out, _fmt(max(sob.values) / sob.reference), extra


def cmd_hormander(params, grid):
    import numpy as np

    from .hormander import hormander_constant
    from .lattice import GridSpec, sample
    from .operator import RegularizedSymbol, regularize

    m, n = _int(params, "m", 1), _int(params, "n", 1)
    if grid is None:
        raise ConfigError("grid", "required")
    kind = params.get("kernel", "gaussian")
    if kind == "gaussian":
        G = GridSpec(m * n, grid.samples_per_axis, grid.extent)
        K = sample(lambda y: np.exp(-np.pi * np.sum(y**2, -1)), G)
    elif kind == "regularized-mikhlin":
        e = _number(_require(params, "eps"), "eps")
        if not 0 < e < 0.5:
            raise ConfigError("eps", "must lie in (0, 1/2)")
        # grid gives the frequency box; the kernel lives on its dual grid
        G = GridSpec(m * n, grid.samples_per_axis, grid.extent)
        try:
            K = regularize(RegularizedSymbol(_symbol("mikhlin", m, n), e), G).kernel
        except ValueError as err:
            raise ConfigError("grid", str(err)) from None
    else:
        raise ConfigError("kernel", f"unknown kernel {kind!r}; choose gaussian or regularized-mikhlin")
    xs = params.get("x")
    xs = None if xs is None else [[v] + [0.0] * (n - 1) for v in parse_list(xs, "x")]
    rep = hormander_constant(K, m, xs)
    return {"hormander.csv": rep.to_csv()}, _fmt(rep.sup_value), {"note": "sup over samples is a lower bound"}


def cmd_hardy_norm(params, grid):
    from .hardy import bmo_norm, hp_quasinorm, weak_l1_quasinorm
    from .lattice import load_field

    if grid is None:
        raise ConfigError("grid", "required")
    path = _require(params, "input")
    if not Path(path).is_file():
        raise ConfigError("input", f"no such file {path!r}")
    try:
        f = load_field(path, grid)
    except ValueError as e:
        raise ConfigError("input", str(e)) from None
    measure = params.get("measure", "hp")
    if measure == "hp":
        p = _number(_require(params, "p"), "p")
        if not p > 0:
            raise ConfigError("p", "must be positive")
        val = hp_quasinorm(f, p)
    elif measure == "bmo":
        val = bmo_norm(f)
    elif measure == "weak-l1":
        val = weak_l1_quasinorm(f)
    else:
        raise ConfigError("measure", f"unknown measure {measure!r}; choose hp, bmo or weak-l1")
    body = json.dumps({"measure": measure, "value": val}, sort_keys=True)
    return {"hardy.json": body + "\n"}, _fmt(val), {}


def cmd_lemma52(params, grid):
    from .sharpness import fit_power_law, lemma52_integral

    n = _int(params, "n", 1)
    s = _number(params.get("s", 1), "s")
    eps = parse_eps(params.get("eps", "2^-5..2^-10"))
    if any(not 0 < e <= 1 for e in eps):
        raise ConfigError("eps", "every eps must lie in (0, 1]")
    rows = sorted(((e, lemma52_integral(eps=e, s=s, n=n)) for e in eps), reverse=True)
    body = "epsilon,value\n" + "".join(f"{_fmt(e)},{_fmt(v)}\n" for e, v in rows)
    fit = fit_power_law([e for e, _ in rows], [v for _, v in rows], "value")
    extra = {"expected_slope": -(n + 2 * s), "stated_slope": -(n + s), "discrepancy": LEMMA_NOTE}
    return {"lemma52.csv": body, "fit_value.json": fit.to_json() + "\n"}, fit.to_json(), extra


COMMANDS = {
    "sweep": cmd_sweep,
    "apply": cmd_apply,
    "sobolev-norm": cmd_sobolev_norm,
    "check-conditions": cmd_check_conditions,
    "regularize-check": cmd_regularize_check,
    "hormander": cmd_hormander,
    "hardy-norm": cmd_hardy_norm,
    "lemma52": cmd_lemma52,
}

PARAM_FLAGS = ("construction", "m", "n", "r", "p", "s", "eps", "symbol", "j_range", "inputs",
               "input", "kernel", "x", "measure")


# -- driver ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mmllab", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON file with command, params, grid, output_path")
    ap.add_argument("--out", dest="output_path", help="output directory (default: current)")
    ap.add_argument("--grid", help="NxL, e.g. 256x32")
    ap.add_argument("--threads", type=int, help="worker cap (also MMLLAB_THREADS)")
    for name in PARAM_FLAGS:
        ap.add_argument("--" + name.replace("_", "-"), dest=name)
    return ap


def resolve(args) -> dict:
    """Merge the config file with flags; flags win."""
    cfg = {"command": None, "params": {}, "grid": None, "output_path": "."}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise ConfigError("config", f"no such file {args.config!r}") from None
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"line {e.lineno}: {e.msg}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be an object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config key")
        cfg.update({k: v for k, v in loaded.items() if k != "params"})
        cfg["params"] = dict(loaded.get("params") or {})
    if args.command:
        cfg["command"] = args.command
    if args.grid:
        cfg["grid"] = args.grid
    if args.output_path:
        cfg["output_path"] = args.output_path
    for name in PARAM_FLAGS:
        v = getattr(args, name)
        if v is not None:
            cfg["params"][name] = v
    if cfg["command"] not in COMMANDS:
        raise ConfigError("command", f"expected one of {sorted(COMMANDS)}, got {cfg['command']!r}")
    return cfg


def set_threads(threads: int | None) -> int | None:
    if threads is None:
        env = os.environ.get("MMLLAB_THREADS")
        threads = int(env) if env else None
    if threads is not None:
        if threads < 1:
            raise ConfigError("threads", "must be at least 1")
        for var in THREAD_VARS:
            os.environ[var] = str(threads)
    return threads


def write_atomic(directory: Path, files: dict[str, str]) -> None:
    """Stage every file next to its target, then rename them all."""
    directory.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            staged.append((tmp, directory / name))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)


def run(cfg: dict, threads: int | None = None) -> tuple[dict[str, str], str]:
    from . import __version__

    grid = None if cfg["grid"] is None else parse_grid(cfg["grid"])
    t0 = time.perf_counter()
    files, stdout, extra = COMMANDS[cfg["command"]](cfg["params"], grid)
    manifest = {"config": cfg, "version": __version__, "threads": threads,
                "wall_clock_seconds": time.perf_counter() - t0, **extra}
    files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return files, stdout


def main(argv=None) -> int:
    from .errors import NumericalGuardError

    args = build_parser().parse_args(argv)
    try:
        threads = set_threads(args.threads)
        cfg = resolve(args)
        files, stdout = run(cfg, threads)
    except NumericalGuardError as e:
        print(f"numerical guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    write_atomic(Path(cfg["output_path"]), files)
    if stdout:
        print(stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
