"""Command-line front end: ``weylepi verify <suite>`` and ``weylepi series``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import suites
from .cache import CacheError
from .mui import FAMILIES, BudgetExceeded
from .serre import NegativeDimension

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

SUITES = ("steenrod", "division", "lemma31", "prop33", "prop34", "thm41", "prop43", "thm42-closure",
          "serre", "weyl")
CASES = ("pu3", "pu5", "f4", "e6", "e7", "e8")
WEYL_CASES = CASES + ("su3",)
FORMATS = ("json", "csv", "text")
SERIES_PARTS = ("M0", "M1", "M0even/e", "M1even/e", "M0odd", "M1odd", "M0even", "M1even")

# config-file keys and their types; names mirror the long flags
CONFIG_KEYS = {"p": int, "n": int, "family": str, "case": str, "max_deg": int, "jobs": int,
               "cache_dir": str, "format": str, "out": str, "i": int, "ell": int, "seed": int,
               "pairs": int, "golden": str, "allow_large": lambda s: s.strip().lower() in ("1", "true", "yes")}
DEFAULTS = {"p": 3, "n": 2, "family": "sl", "case": "pu3", "jobs": 1, "format": "json", "seed": 0,
            "pairs": 300, "allow_large": False}


class ConfigError(ValueError):
    pass


def read_config(path: str) -> dict:
    """key = value lines; '#' starts a comment; dashes and underscores are interchangeable in keys."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    return out


def _add_common(sp: argparse.ArgumentParser):
    sp.add_argument("--p", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--max-deg", dest="max_deg", type=int)
    sp.add_argument("--format", choices=FORMATS)
    sp.add_argument("--out")
    sp.add_argument("--config", help="key = value file; command-line flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weylepi", description="Exact mod-p checks on invariant rings "
                                 "of elementary abelian p-groups and Weyl groups.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run one verification suite and emit a report")
    v.add_argument("suite", choices=SUITES)
    _add_common(v)
    v.add_argument("--case", choices=WEYL_CASES)
    v.add_argument("--i", type=int)
    v.add_argument("--ell", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--cache-dir", dest="cache_dir")
    v.add_argument("--seed", type=int)
    v.add_argument("--pairs", type=int)
    v.add_argument("--allow-large", dest="allow_large", action="store_const", const=True,
                   help="permit direct Weyl runs for e6/e7/e8")
    v.add_argument("--golden", help="weyl: compare the full table with this CSV file")
    s = sub.add_parser("series", help="print a truncated Poincare series of M_0 or M_1")
    _add_common(s)
    s.add_argument("--case", choices=CASES)
    s.add_argument("--part", choices=SERIES_PARTS, default="M0")
    return ap


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg.get("max_deg") is not None and cfg["max_deg"] < 0:
        raise ConfigError("--max-deg must be non-negative")
    if cfg["jobs"] < 1:
        raise ConfigError("--jobs must be at least 1")
    if cfg["family"] not in FAMILIES:
        raise ConfigError(f"unknown family {cfg['family']!r}")
    if cfg["case"] not in WEYL_CASES:
        raise ConfigError(f"unknown case {cfg['case']!r}")
    if cfg["format"] not in FORMATS:
        raise ConfigError(f"unknown format {cfg['format']!r}")
    from .linalg import is_prime
    if not is_prime(cfg["p"]) or cfg["p"] < 3:
        raise ConfigError(f"p must be an odd prime, got {cfg['p']}")
    if cfg["n"] < 1:
        raise ConfigError("--n must be positive")
    return cfg


def _max_deg(cfg: dict, suite: str) -> int:
    if cfg.get("max_deg") is not None:
        return cfg["max_deg"]
    if suite == "weyl" and cfg["case"] == "f4":
        return 48
    return suites.DEFAULT_MAX_DEG[suite]


def run_suite(suite: str, cfg: dict):
    fam, n, p, case = cfg["family"], cfg["n"], cfg["p"], cfg["case"]
    jobs, cdir = cfg["jobs"], cfg.get("cache_dir")
    if suite in ("prop43", "thm42-closure", "serre") and case == "su3":
        raise ConfigError("case su3 is only available for the weyl suite")
    if suite in ("lemma31", "thm41", "prop33", "prop34") and fam != "sl" and n < 2:
        raise ConfigError(f"family {fam} needs n >= 2")
    if suite in ("division",) and n < 2:
        raise ConfigError("division needs n >= 2")
    D = _max_deg(cfg, suite) if suite in suites.DEFAULT_MAX_DEG else None
    if suite == "steenrod":
        return suites.steenrod_suite(n, p, D, cfg["pairs"], cfg["seed"])
    if suite == "division":
        return suites.division_suite(n, p)
    if suite == "lemma31":
        return suites.product_law_suite(fam, n, p)
    if suite == "thm41":
        return suites.invariant_dimension_suite(fam, n, p, D, jobs, cdir)
    if suite in ("prop33", "prop34"):
        fn = suites.filtration_suite if suite == "prop33" else suites.exact_sequence_suite
        try:
            return fn(fam, n, p, D, cfg.get("i"), cfg.get("ell"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if suite == "prop43":
        return suites.image_split_suite(case, D, cdir)
    if suite == "thm42-closure":
        return suites.closure_suite(case, D, cdir)
    if suite == "serre":
        return suites.serre_suite(case, D)
    if suite == "weyl":
        golden = cfg.get("golden")
        if golden and not Path(golden).is_file():
            raise ConfigError(f"golden file {golden} not found")
        return suites.weyl_suite(case, D, jobs, cdir, cfg["allow_large"], golden)
    raise ConfigError(f"unknown suite {suite!r}")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_series(cfg: dict, part: str) -> int:
    from .cases import get_case, series_M, series_M_odd
    if cfg["case"] == "su3":
        raise ConfigError("series needs one of " + ", ".join(CASES))
    case = get_case(cfg["case"])
    D = cfg["max_deg"] if cfg.get("max_deg") is not None else 20
    if part in ("M0odd", "M1odd"):
        coeffs = series_M_odd(case, part[:2], D)
    elif part in ("M0even", "M1even"):
        full, odd = series_M(case, part[:2], D), series_M_odd(case, part[:2], D)
        coeffs = [a - b for a, b in zip(full, odd)]
    else:
        coeffs = series_M(case, part, D)
    if cfg["format"] == "json":
        import json
        text = json.dumps({"case": case.key, "part": part, "max_deg": D, "coefficients": coeffs}) + "\n"
    elif cfg["format"] == "csv":
        text = "degree,coefficient\n" + "".join(f"{d},{c}\n" for d, c in enumerate(coeffs))
    else:
        text = " ".join(str(c) for c in coeffs) + "\n"
    _emit(text, cfg.get("out"))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if args.command == "series":
            return cmd_series(cfg, args.part)
        rep = run_suite(args.suite, cfg)
    except (ConfigError, CacheError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NegativeDimension as exc:
        print(f"negative dimension: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(rep.render(cfg["format"]), cfg.get("out"))
    if not rep.passed:
        failed = sum(not r.passed for r in rep.rows)
        print(f"{failed} check(s) failed in suite {rep.suite}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
