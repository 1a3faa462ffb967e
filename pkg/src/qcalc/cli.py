"""qcalc command line: coefficient tables, verification suites and the demo transcript.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .complexes import build_higgs, build_qdr, cohomology, quasi_iso_check
from .errors import ConfigError, HypothesisViolated
from .frobenius import ABTable
from .qarith import q_binom
from .simpson import hq_functor, mq_functor, nilpotent_example, normalize_higgs, round_trip
from .suites import PRIMES, RING_KINDS, SUITES, RunConfig, all_passed, run_suite

SCHEMA = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"qcalc: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser():
    ap = _Parser(prog="qcalc", description="Exact q-deformed Simpson correspondence toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--p", type=int, default=2, help=f"prime, one of {PRIMES}")
        p.add_argument("--ring", default="cyclotomic", help=f"base ring: {'|'.join(RING_KINDS)}")
        p.add_argument("--D", type=int, default=None, help="x-degree bound (default 4p)")
        p.add_argument("--N", type=int, default=3, help="theta-truncation")
        p.add_argument("--K", type=int, default=3, help="k-bound")
        p.add_argument("--M", type=int, default=8, help="series truncation in t = q - 1")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", default="json", help="json|csv")
        p.add_argument("--q-one", action="store_true", help="work over F_p with q = 1")

    t = sub.add_parser("tables", help="A/B coefficient table and q-binomials")
    common(t)
    t.add_argument("--nmax", type=int, default=3)
    v = sub.add_parser("verify", help="run an invariant suite")
    common(v)
    v.add_argument("--suite", default="all", help=f"{'|'.join(SUITES)}|all")
    v.add_argument("--nmax", type=int, default=3)
    d = sub.add_parser("demo", help="round-trip transcript for a nilpotent Higgs module")
    common(d)
    d.add_argument("--rank", type=int, default=2)
    return ap


def config_from(args) -> RunConfig:
    if args.format not in ("json", "csv"):
        raise ConfigError(f"--format must be json or csv, got {args.format!r}")
    cfg = RunConfig(p=args.p, ring=args.ring, nmax=getattr(args, "nmax", 3), D=args.D, N=args.N, K=args.K,
                    M=args.M, seed=args.seed, rank=getattr(args, "rank", 2), q_one=args.q_one)
    return cfg.validate()


def write_output(text: str, path: str | None):
    """Write atomically: temp file in the target directory, then rename."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".qcalc-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


# ---------------------------------------------------------------------------

def cmd_tables(cfg: RunConfig, fmt: str):
    if fmt != "json":
        raise ConfigError("tables are emitted as JSON only")
    table = ABTable(cfg.p, cfg.nmax)
    R = cfg.base_ring()
    top = cfg.p * cfg.nmax
    qb = [{"n": n, "k": k, "value": str(q_binom(n, k, R))} for n in range(top + 1) for k in range(n + 1)]
    doc = {"schema": SCHEMA, "command": "tables", "config": cfg.to_json(),
           "ab_table": table.to_json(), "disagreements": table.disagreements(),
           "nonintegral_B": table.nonintegral(), "q_binomials": {"ring": R.name, "rows": qb}}
    return dumps(doc), 0


def cmd_verify(cfg: RunConfig, suite: str, fmt: str):
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {SUITES + ('all',)}")
    if fmt == "csv" and suite != "cohomology":
        raise ConfigError("CSV output is available for the cohomology suite only")
    results = run_suite(suite, cfg)
    ok = all_passed(results)
    if fmt == "csv":
        return _cohomology_csv(cfg), 0 if ok else 1
    doc = {"schema": SCHEMA, "command": "verify", "suite": suite, "config": cfg.to_json(),
           "passed": ok, "results": results}
    return dumps(doc), 0 if ok else 1


def _cohomology_csv(cfg: RunConfig):
    R = cfg.base_ring()
    D = cfg.degree_bound
    H = nilpotent_example(R, cfg.p, cfg.rank)
    M = mq_functor(H)
    a = cohomology(build_qdr(M, D, cid="qdr")).to_csv()
    b = cohomology(build_higgs(H, D, cid="higgs")).to_csv()
    return a + b.split("\n", 1)[1]


def _fmt_matrix(mat):
    return "\n".join("  [" + ", ".join(str(e) for e in row) + "]" for row in mat)


def cmd_demo(cfg: RunConfig, fmt: str):
    if fmt != "json":
        raise ConfigError("demo prints a plain-text transcript; --format csv is not available")
    R = cfg.base_ring()
    p = cfg.p
    D = cfg.degree_bound
    lines = []
    H = nilpotent_example(R, p, cfg.rank)
    lines.append(f"base ring: {R.name}, p = {p}, rank = {cfg.rank}")
    lines.append("Higgs module H = (A'^r, Theta):")
    lines.append(_fmt_matrix(H.theta))
    M = mq_functor(H)
    lines.append("sigma-module M_q(H), matrix of d_M on 1 (x) e_j:")
    lines.append(_fmt_matrix(M.matrix))
    rt = round_trip(H)
    if rt["ok"] or "error" not in rt:
        res = hq_functor(M, cfg.p * (cfg.rank + 1), 2 * p)
        lines.append("H_q(M_q(H)): generators")
        for g in res.generators:
            lines.append("  " + ", ".join(str(a) for a in g))
        lines.append("literal d^p on the generators:")
        lines.append(_fmt_matrix(res.raw_theta))
        lines.append("after normalization g^{-1}(d^p):")
        lines.append(_fmt_matrix(normalize_higgs(res.higgs).theta))
    else:
        lines.append(f"H_q(M_q(H)): {rt['error']}: {rt['message']}")
        lines.append(f"  d^p acts on 1 (x) H as Theta: {rt['raw_dp_is_theta_on_flat_part']}")
    q = quasi_iso_check(M, H, D)
    lines.append("cohomology of q-DR(M):")
    lines.append(cohomology(build_qdr(M, D, q["weights"], cid="qdr")).to_csv().rstrip())
    lines.append("cohomology of Higgs(H):")
    lines.append(cohomology(build_higgs(H, D, q["weights"], cid="higgs")).to_csv().rstrip())
    ok_rt = rt["ok"]
    ok_qi = q["ok"]
    lines.append(f"round-trip: {'OK' if ok_rt else 'FAIL'}; quasi-iso: {'OK' if ok_qi else 'FAIL'}")
    return "\n".join(lines) + "\n", 0 if ok_rt and ok_qi else 1


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from(args)
        if args.command == "tables":
            text, code = cmd_tables(cfg, args.format)
        elif args.command == "verify":
            text, code = cmd_verify(cfg, args.suite, args.format)
        else:
            text, code = cmd_demo(cfg, args.format)
    except ConfigError as exc:
        print(f"qcalc: configuration error: {exc}", file=sys.stderr)
        return 2
    except HypothesisViolated as exc:
        print(f"qcalc: configuration error: {exc}", file=sys.stderr)
        return 2
    write_output(text, args.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
