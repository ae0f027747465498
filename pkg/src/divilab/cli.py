"""Command-line front end: one subcommand per module, plus a manifest runner.

Exit codes: 0 success, 2 domain error, 3 resource cap, 64 usage.
Records are emitted as JSON with 12-significant-digit floats (or CSV tables
with '.' decimals); reruns with the same config and seed are byte-identical
except for the wall_time field.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import INFINITE, divisors, factor
from .divgeom import OscWeight, RatioWeight, delta, delta_osc, e_r, f_theta, g_sum, tau_plus
from .errors import DomainError, ResourceError, UsageError
from .locallaws import Lambda_kd, lambda_row, median_prime_detail, lambda_mode
from .multiples import (
    GeneratorSet,
    block_builder,
    block_elements,
    density_bracket,
    log_density,
    sequential_density,
    sieve_density,
)
from .sieve import SpfSieve, build_sieve
from . import experiments as exp


def _fmt(v):
    """Round floats to 12 significant digits; map sentinels and fractions."""
    if v is INFINITE:
        return "inf"
    if isinstance(v, bool):
        return v
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {k: _fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    return v


@dataclass(frozen=True)
class RunConfig:
    """Effective run settings: flags win over config-file defaults.

    Monte Carlo paths must have a seed; that is enforced where randomness is
    about to be used, so deterministic presets never demand one.
    """

    sieve_limit: int | None = None
    cache_path: str | None = None
    threads: int = 1
    seed: int | None = None
    output: str | None = None  # "json" or "csv"; None picks per command
    params: dict = field(default_factory=dict)


def _make_config(args, file_cfg: dict) -> RunConfig:
    def pick(flag, key, cast, default=None):
        if flag is not None:
            return flag
        if key in file_cfg:
            return cast(file_cfg[key])
        return default

    return RunConfig(
        sieve_limit=pick(getattr(args, "limit", None), "sieve_limit", int),
        cache_path=pick(getattr(args, "sieve_cache", None), "cache_path", str,
                        os.environ.get("DIVILAB_CACHE")),
        threads=pick(getattr(args, "threads", None), "threads", int, 1),
        seed=pick(getattr(args, "seed", None), "seed", int),
        output=pick(getattr(args, "format", None), "output", str),
        params=dict(file_cfg),
    )


class ResultRecord:
    def __init__(self, command: str, params: dict, values: dict):
        self.command = command
        self.params = params
        self.values = values
        self.wall_time = 0.0

    def to_json(self) -> str:
        body = {
            "command": self.command,
            "params": _fmt(self.params),
            "values": _fmt(self.values),
            "artifact_version": __version__,
            "wall_time": round(self.wall_time, 6),
        }
        return json.dumps(body, sort_keys=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 64
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="divilab", description="divisor-structure laboratory")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--sieve-cache", help="sieve cache file (or env DIVILAB_CACHE)")
    common.add_argument("--config", help="flat key=value config file with defaults")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("sieve", help="build the smallest-prime-factor sieve",
                       parents=[common])
    s.add_argument("--limit", type=int, required=True)

    s = sub.add_parser("fn", help="per-integer divisor statistics", parents=[common])
    s.add_argument("--n", type=int)
    s.add_argument("--range", dest="nrange", help="A:B inclusive")
    s.add_argument("--what", required=True,
                   help="delta | delta-mu | tauplus | er:R | g | ftheta:T")

    s = sub.add_parser("lambda", help="local law of the k-th prime factor",
                       parents=[common])
    s.add_argument("--k", type=int)
    s.add_argument("--pmax", type=int, default=100)
    s.add_argument("--median", action="store_true")
    s.add_argument("--mode", action="store_true")
    s.add_argument("--p", type=int, help="prime for --mode")

    s = sub.add_parser("lambdad", help="local law of the k-th divisor",
                       parents=[common])
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--method", choices=("exact", "mc"), default=None)
    s.add_argument("--samples", type=int, default=200_000)
    s.add_argument("--seed", type=int)

    s = sub.add_parser("multiples", help="sets of multiples and densities",
                       parents=[common])
    s.add_argument("--gens", help="comma list of generators")
    s.add_argument("--interval", help="y:z for the interval (y, z]")
    s.add_argument("--family", help="a_lambda:LAM | theorem3:S,T,G,A | besicovitch")
    s.add_argument("--J", type=int, default=5)
    s.add_argument("--density", default="exact",
                   help="exact | bonferroni:D | sieve:X | log:X | seq:T1,T2,...")

    s = sub.add_parser("exp", help="experiment presets", parents=[common])
    s.add_argument("--preset", required=True,
                   choices=("median-primes", "nu", "pplus", "erdos-kac", "constants",
                            "tsum", "eps", "totients", "dtheta"))
    s.add_argument("--x", type=int, default=100_000)
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--k", help="k values, comma separated (median-primes)")
    s.add_argument("--y", type=int)
    s.add_argument("--z", type=int)
    s.add_argument("--theta", default="golden", help="golden | sqrt2 | float | p/q")
    s.add_argument("--n", type=int, help="single n (dtheta)")

    s = sub.add_parser("manifest", help="run a manifest of preset lines",
                       parents=[common])
    s.add_argument("path")
    return p


def _load_config(path: str | None) -> dict:
    cfg = {}
    if path:
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {line!r}")
            key, val = line.split("=", 1)
            cfg[key.strip()] = val.strip()
    return cfg


def _sieve_for(limit: int, cache: str | None) -> SpfSieve:
    if cache and Path(cache).exists():
        sv = SpfSieve.load(cache)
        if sv.limit >= limit:
            return sv
    sv = build_sieve(limit)
    if cache and not Path(cache).exists():
        sv.save(cache)
    return sv


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[tuple], header: tuple[str, ...]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, float):
                cells.append(f"{v:.12g}")
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommand handlers: return (record, optional csv (header, rows))

def _run_sieve(args, cfg):
    sv = _sieve_for(args.limit, cfg.cache_path)  # writes the cache only when a path is set
    rec = ResultRecord("sieve", {"limit": args.limit},
                       {"limit": sv.limit, "primes": int(len(sv.primes())),
                        "cached": bool(cfg.cache_path), "tag": "exact"})
    return rec, None


def _parse_what(what: str):
    if what in ("delta", "delta-mu", "tauplus", "g"):
        return what, None
    if what.startswith("er:"):
        return "er", int(what.split(":", 1)[1])
    if what.startswith("ftheta:"):
        return "ftheta", float(what.split(":", 1)[1])
    raise UsageError(f"unknown --what {what!r}")


def _run_fn(args, cfg):
    kind, param = _parse_what(args.what)
    if args.n is None and not args.nrange:
        raise UsageError("fn needs --n or --range")
    if args.nrange:
        lo, hi = (int(v) for v in args.nrange.split(":", 1))
    else:
        lo = hi = args.n
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range {lo}:{hi}")
    sv = _sieve_for(max(hi, 2), cfg.cache_path)
    mu_w = OscWeight.moebius()
    rows = []
    skipped = 0
    for n in range(lo, hi + 1):
        spec = divisors(factor(n, sv))
        try:
            if kind == "delta":
                v = delta(spec)
            elif kind == "delta-mu":
                v = delta_osc(spec, mu_w)
            elif kind == "tauplus":
                v = tau_plus(spec)
            elif kind == "g":
                v = g_sum(spec)
            elif kind == "er":
                v = e_r(spec, param)
            else:
                v = f_theta(spec, RatioWeight.indicator(param))
        except DomainError:
            if lo == hi:
                raise  # single-n queries keep the strict per-n contract
            skipped += 1  # range sweeps drop undefined rows (tau too small)
            continue
        rows.append((n, float(v)))
    rec = ResultRecord("fn", {"what": args.what, "range": [lo, hi]},
                       {"rows": len(rows), "skipped": skipped, "tag": "exact",
                        "value": rows[0][1] if len(rows) == 1 else None})
    return rec, (("n", "value"), rows)


def _run_lambda(args, cfg):
    if args.mode:
        if not args.p:
            raise UsageError("--mode needs --p")
        k_star, lam = lambda_mode(args.p)
        rec = ResultRecord("lambda", {"mode": True, "p": args.p},
                           {"k_star": k_star, "lambda_star": lam, "tag": "exact"})
        return rec, None
    if args.k is None:
        raise UsageError("lambda needs --k")
    if args.median:
        det = median_prime_detail(args.k)
        rec = ResultRecord("lambda", {"k": args.k, "median": True},
                           {"p_star": det.p_star, "cum_before": det.cum_before,
                            "cum_at": det.cum_at, "tie_at": det.tie_at,
                            "tag": "exact"})
        return rec, None
    row = lambda_row(args.k, args.pmax)
    cum = 0.0
    rows = []
    for p, lam in row.entries:
        cum += lam
        rows.append((p, lam, cum))
    rec = ResultRecord("lambda", {"k": args.k, "pmax": args.pmax},
                       {"partial_sum": row.partial_sum, "tail": row.tail,
                        "tag": "exact"})
    return rec, (("p", "lambda", "cumsum"), rows)


def _run_lambdad(args, cfg):
    if args.method == "mc" and cfg.seed is None:
        raise UsageError("--method mc requires --seed")
    est = Lambda_kd(args.k, args.d, method=args.method,
                    samples=args.samples, seed=cfg.seed)
    rec = ResultRecord("lambdad", {"k": args.k, "d": args.d,
                                   "method": est.method, "seed": cfg.seed},
                       est.as_record())
    return rec, None


def _parse_generators(args) -> GeneratorSet | None:
    given = [bool(args.gens), bool(args.interval), bool(args.family)]
    if sum(given) != 1:
        raise UsageError("multiples needs exactly one of --gens/--interval/--family")
    if args.gens:
        return GeneratorSet(int(v) for v in args.gens.split(","))
    if args.interval:
        y, z = (int(v) for v in args.interval.split(":", 1))
        return GeneratorSet(interval=(y, z))
    fam = args.family
    if fam.startswith("a_lambda:"):
        seq = block_builder("a_lambda", {"lam": float(fam.split(":", 1)[1])}, args.J)
    elif fam.startswith("theorem3:"):
        s, t, g, a = (float(v) for v in fam.split(":", 1)[1].split(","))
        seq = block_builder("theorem3", {"sigma": s, "tau": t, "gamma": g, "alpha": a},
                            args.J)
    elif fam == "besicovitch":
        seq = block_builder("besicovitch", {}, args.J)
    else:
        raise UsageError(f"unknown family {fam!r}")
    return block_elements(seq)


def _run_multiples(args, cfg):
    gens = _parse_generators(args)
    spec = args.density
    if spec == "exact":
        est = density_bracket(gens, method="exact_ie")
    elif spec.startswith("bonferroni:"):
        est = density_bracket(gens, method="bonferroni", depth=int(spec.split(":")[1]))
    elif spec.startswith("sieve:"):
        est = sieve_density(gens, int(spec.split(":")[1]))
    elif spec.startswith("log:"):
        est = log_density(gens, int(spec.split(":")[1]))
    elif spec.startswith("seq:"):
        grid = [int(v) for v in spec.split(":", 1)[1].split(",")]
        ests = sequential_density(gens, grid)
        rec = ResultRecord("multiples", {"density": spec},
                           {"sequence": [e.as_record() for e in ests]})
        return rec, None
    else:
        raise UsageError(f"unknown density spec {spec!r}")
    rec = ResultRecord("multiples", {"density": spec, "generators": len(gens)},
                       est.as_record())
    return rec, None


def _parse_theta(text: str):
    if text == "golden":
        return exp.golden_ratio_fraction()
    if text == "sqrt2":
        return exp.sqrt2_fraction()
    if "/" in text:
        a, b = text.split("/", 1)
        return Fraction(int(a), int(b))
    return float(text)


def _run_exp(args, cfg):
    preset = args.preset
    if preset == "median-primes":
        ks = [int(v) for v in (args.k or "2,3").split(",")]
        vals = {}
        for k in ks:
            det = median_prime_detail(k)
            vals[f"p{k}_star"] = det.p_star
            if det.tie_at is not None:
                vals[f"p{k}_tie_at"] = det.tie_at
        vals["tag"] = "exact"
        return ResultRecord("exp", {"preset": preset, "k": ks}, vals), None
    if preset == "nu":
        dist = exp.nu_distribution(args.x)
        rows = list(zip(dist.grid, dist.cdf))
        rec = ResultRecord("exp", {"preset": preset, "x": args.x},
                           {"samples": dist.samples, "tag": "empirical",
                            "jump_candidates": [list(j) for j in dist.jumps]})
        return rec, (("grid", "value"), rows)
    if preset == "pplus":
        st = exp.pplus_adjacency(args.x)
        rec = ResultRecord("exp", {"preset": preset, "x": args.x},
                           {"frac_up": st.frac_up,
                            "frac_triple_down": st.frac_triple_down,
                            "first_triple_down": st.first_triple_down,
                            "tag": "empirical"})
        return rec, (("bin_left", "count"),
                     list(zip(st.alpha_bins[:-1], st.alpha_counts)))
    if preset == "erdos-kac":
        dist = exp.erdos_kac(args.x)
        rec = ResultRecord("exp", {"preset": preset, "x": args.x},
                           {"ks_vs_gaussian": dist.ks_vs[1], "samples": dist.samples,
                            "tag": "empirical"})
        rows = [(g, c) for g, c in zip(dist.grid, dist.cdf) if c > 0]
        return rec, (("grid", "value"), rows)
    if preset == "constants":
        table = exp.constant_table().as_dict()
        table["tag"] = "exact"
        return ResultRecord("exp", {"preset": preset}, table), None
    if preset == "tsum":
        direct, dyadic = exp.t_sum(args.x, threads=cfg.threads)
        return ResultRecord("exp", {"preset": preset, "x": args.x},
                            {"direct": direct, "dyadic": dyadic, "tag": "exact"}), None
    if preset == "eps":
        if not args.y or not args.z:
            raise UsageError("eps preset needs --y and --z")
        e, e1, rho = exp.eps_pair(args.y, args.z, args.x)
        return ResultRecord("exp", {"preset": preset, "y": args.y, "z": args.z,
                                    "x": args.x},
                            {"eps": e.as_record(), "eps1": e1.as_record(),
                             "rho1": rho}), None
    if preset == "totients":
        cnt = exp.totient_values(args.x)
        return ResultRecord("exp", {"preset": preset, "x": args.x},
                            {"count": cnt, "tag": "exact"}), None
    if preset == "dtheta":
        theta = _parse_theta(args.theta)
        n = args.n or 12
        sv = _sieve_for(n, cfg.cache_path)
        val, d_at = exp.dtheta_min(factor(n, sv), theta)
        vals = {"n": n, "min": val, "argmin_d": d_at, "tag": "exact"}
        if isinstance(theta, Fraction):
            vals["growth_exponents"] = exp.convergent_growth_report(theta, 12)
        return ResultRecord("exp", {"preset": preset, "theta": args.theta}, vals), None
    raise UsageError(f"unknown preset {preset!r}")


_HANDLERS = {
    "sieve": _run_sieve,
    "fn": _run_fn,
    "lambda": _run_lambda,
    "lambdad": _run_lambdad,
    "multiples": _run_multiples,
    "exp": _run_exp,
}


def _execute(args, cfg: RunConfig) -> str:
    t0 = time.perf_counter()
    rec, table = _HANDLERS[args.cmd](args, cfg)
    rec.wall_time = time.perf_counter() - t0
    fmt = cfg.output or ("csv" if table is not None else "json")
    if fmt == "csv" and table is not None:
        header, rows = table
        return _csv(rows, header)
    return rec.to_json() + "\n"


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd is None:
            raise UsageError("missing subcommand")
        cfg = _make_config(args, _load_config(getattr(args, "config", None)))
        if args.cmd == "manifest":
            return _run_manifest(args)
        out_text = _execute(args, cfg)
        _emit(out_text, args.out)
        return 0
    except UsageError as err:
        sys.stderr.write(f"usage error: {err}\n")
        return 64
    except DomainError as err:
        sys.stderr.write(f"domain error: {err}\n")
        return 2
    except ResourceError as err:
        sys.stderr.write(f"resource error: {err}\n")
        return 3
    except ValueError as err:  # malformed numeric fragments in flag values
        sys.stderr.write(f"usage error: {err}\n")
        return 64


def _run_manifest(args) -> int:
    path = Path(args.path)
    if not path.exists():
        raise UsageError(f"manifest {path} not found")
    parser = _build_parser()
    failures = 0
    outputs = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            sub = parser.parse_args(shlex.split(line))
            if sub.cmd is None or sub.cmd == "manifest":
                raise UsageError("manifest lines must be operation subcommands")
            sub_cfg = _make_config(sub, _load_config(getattr(sub, "config", None)))
            outputs.append(_execute(sub, sub_cfg).rstrip("\n"))
        except (UsageError, DomainError, ResourceError, ValueError) as err:
            failures += 1
            outputs.append(json.dumps(
                {"command": "error", "line": lineno, "message": str(err)},
                sort_keys=True))
    text = "\n".join(outputs) + ("\n" if outputs else "")
    _emit(text, args.out)
    return 1 if failures else 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
