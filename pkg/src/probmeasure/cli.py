"""Command-line front end.

Exit codes: 0 success, 1 a verification failed or an integral did not
converge (the bracketing result is still written), 2 usage or spec error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import inequalities as ineq
from .distributions import BRACKETS, DistributionSpecError, from_spec
from .expectation import (
    NonIntegrableLawError,
    expect,
    expect_closed_form,
    lp_norm,
    moment,
    variance,
)
from .intervals import IntervalUnion, MalformedIntervalError, normalize
from .lebesgue import (
    FunctionSequence,
    LengthSpace,
    RATIONALS,
    SimpleFunction,
    dct_check,
    integrate_simple,
    mct_check,
    unbounded_integrable_demo,
)
from .stieltjes import IntegrationError, Partition, RationalIndicator, identity, integrate, lower_sum, upper_sum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEMOS = ("dirichlet", "dct_counterexample", "mct_counterexample", "staircase")

CSV_HELP = (
    "suite/verify CSV columns: inequality_id, bound, reference, slack, pass "
    "(pass is 'true' or 'false'; numbers are printed with repr precision)."
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _load_json(text: str, flag: str):
    """Parse inline JSON, or read it from a file path."""
    src = text
    if not text.lstrip().startswith(("{", "[", '"')) and os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            src = fh.read()
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _dist(args):
    if args.dist is None:
        raise UsageError("--dist is required")
    return from_spec(_load_json(args.dist, "--dist"), "--dist")


def _integrand(expr: str):
    import sympy

    x = sympy.Symbol("x", real=True)
    try:
        e = sympy.sympify(expr, locals={"x": x})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise UsageError(f"--integrand: cannot parse {expr!r}: {exc}") from None
    extra = e.free_symbols - {x}
    if extra:
        raise UsageError(f"--integrand: unknown symbols {sorted(map(str, extra))}; only x is allowed")
    fn = sympy.lambdify(x, e, "numpy")
    return lambda t: np.broadcast_to(np.asarray(fn(t), dtype=float), np.shape(t)) + 0.0


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("+inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        return _clean(x.item())
    return x


def _render(payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_clean(payload), indent=2) + "\n"
    rows = payload if isinstance(payload, list) else [payload]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0].keys()) if rows else []
    w.writerow(keys)
    for r in rows:
        w.writerow([json.dumps(_clean(r[k])) if isinstance(r[k], (list, dict)) else _clean(r[k]) for k in keys])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_measure(args) -> int:
    law = _dist(args)
    err = law.truncation_error
    if args.bracket is not None or args.lo is not None or args.hi is not None:
        if args.lo is None or args.hi is None:
            raise UsageError("--bracket needs both --from and --to")
        bracket = args.bracket or "(a,b]"
        value = law.prob_interval(bracket, args.lo, args.hi)
        payload = {"value": value, "method": "distribution_function", "error_bound": err,
                   "bracket": bracket, "a": args.lo, "b": args.hi}
    else:
        if args.set is None:
            raise UsageError("measure needs --set or --bracket/--from/--to")
        B = IntervalUnion.from_json(_load_json(args.set, "--set"))
        payload = {"value": law.prob(B), "method": "distribution_function", "error_bound": err, "set": B.to_json()}
    _emit(_render(payload, args.format), args.out)
    return EXIT_OK


def cmd_integrate(args) -> int:
    if args.integrand is None or args.lo is None or args.hi is None:
        raise UsageError("integrate needs --integrand, --from and --to")
    f = _integrand(args.integrand)
    F = _dist(args) if args.dist is not None else identity()
    res = integrate(f, F, args.lo, args.hi, tol=args.tol)
    payload = {**res.to_json(), "method": "stieltjes_sums", "error_bound": res.gap}
    _emit(_render(payload, args.format), args.out)
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_expect(args) -> int:
    law = _dist(args)
    if args.variance:
        res = variance(law, args.tol)
    elif args.lp is not None:
        res = lp_norm(law, args.lp, args.tol)
    elif args.moment is not None:
        res = moment(law, args.moment, args.tol)
    else:
        res = expect(law, args.tol)
    payload = {**res.to_json(), "error_bound": res.truncation_error}
    if not (args.variance or args.lp is not None or (args.moment not in (None, 1))):
        try:
            payload["closed_form"] = expect_closed_form(law).value
        except ValueError:
            pass
    _emit(_render(payload, args.format), args.out)
    return EXIT_OK


def _render_reports(reports, fmt: str) -> str:
    if fmt == "csv":
        return ineq.reports_to_csv(reports)
    return ineq.reports_to_jsonl(reports)


def _with_seeds(cases: list, seed: Optional[int], trials: int) -> list:
    out = []
    for i, c in enumerate(cases):
        if not isinstance(c, dict):
            raise UsageError(f"--config: case {i} is not a JSON object")
        c = dict(c)
        if c.get("mode", "exact") == "monte_carlo" or c.get("inequality_id") == "slln":
            if c.get("seed") is None:
                if seed is None:
                    raise UsageError(f"--config: case {i} samples but has no seed; pass --seed")
                c["seed"] = ineq.case_seed(seed, i)
            c.setdefault("trials", trials)
        out.append(c)
    return out


def cmd_verify(args) -> int:
    if args.config is None:
        raise UsageError("verify needs --config with a case object or a list of cases")
    data = _load_json(args.config, "--config")
    cases = data if isinstance(data, list) else [data]
    cases = _with_seeds(cases, args.seed, args.trials)
    reports = ineq.run_suite(cases)
    _emit(_render_reports(reports, args.format), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_suite(args) -> int:
    if args.config in (None, "default"):
        if args.seed is None:
            raise UsageError("the default suite samples; pass --seed")
        cases = ineq.default_grid(args.seed)
    else:
        data = _load_json(args.config, "--config")
        if not isinstance(data, list):
            raise UsageError("--config: the suite config must be a JSON list of cases")
        cases = _with_seeds(data, args.seed, args.trials)
    reports = ineq.run_suite(cases)
    _emit(_render_reports(reports, args.format), args.out)
    summary = ineq.summarize(reports)
    sys.stderr.write(json.dumps(summary) + "\n")
    return EXIT_OK if summary["pass"] == summary["total"] else EXIT_FAIL


def _demo_dirichlet() -> dict:
    f = RationalIndicator()
    F = identity()
    ns, lowers, uppers = [], [], []
    for k in range(11):
        P = Partition.uniform(0.0, 1.0, 2**k)
        ns.append(2**k)
        lowers.append(lower_sum(f, F, P))
        uppers.append(upper_sum(f, F, P))
    res = integrate(f, F, 0.0, 1.0, max_refinements=8)
    leb = integrate_simple(SimpleFunction([(1.0, RATIONALS)]), LengthSpace(), normalize([(0.0, 1.0)]))
    return {
        "scenario": "dirichlet",
        "n": ns, "lower": lowers, "upper": uppers, "gap_n": [u - l for l, u in zip(lowers, uppers)],
        "stieltjes": {**res.to_json(), "method": "stieltjes_sums", "error_bound": res.gap},
        "lebesgue": {"value": leb, "method": "simple_function", "error_bound": 0.0},
    }


def _unit() -> LengthSpace:
    return LengthSpace(None, normalize([(0.0, 1.0)]))


def dct_counterexample_sequence(max_power: int = 24) -> FunctionSequence:
    """``f_n = n`` on ``(0, 1/n]`` and ``1`` on ``(1/n, 1]``; the point ``1/n`` goes left."""

    def term(n: int) -> SimpleFunction:
        pieces = [(float(n), normalize([(0.0, 1.0 / n)]))]
        if n > 1:
            pieces.append((1.0, normalize([(1.0 / n, 1.0)])))
        return SimpleFunction(pieces)

    limit = SimpleFunction([(1.0, normalize([(0.0, 1.0)]))])
    return FunctionSequence(term, limit, [2**k for k in range(max_power + 1)])


def mct_counterexample_sequence(max_power: int = 24) -> FunctionSequence:
    """``f_n = n`` on ``(0, 1/n]`` and 0 elsewhere, declared monotone (it is not)."""
    return FunctionSequence(
        lambda n: SimpleFunction([(float(n), normalize([(0.0, 1.0 / n)]))]),
        SimpleFunction([]),
        [2**k for k in range(max_power + 1)],
        monotone=True,
    )


def _demo_dct() -> dict:
    rep = dct_check(dct_counterexample_sequence(), _unit())
    return {"scenario": "dct_counterexample", **rep.to_json(), "method": "simple_function",
            "error_bound": 0.0, "limit_of_integrals": 2.0}


def _demo_mct() -> dict:
    rep = mct_check(mct_counterexample_sequence(), _unit())
    return {"scenario": "mct_counterexample", **rep.to_json(), "method": "simple_function", "error_bound": 0.0}


def _demo_staircase() -> dict:
    Ns = [1, 10, 100, 1000, 10_000]
    rows = [unbounded_integrable_demo(N).to_json() for N in Ns]
    return {
        "scenario": "staircase", "n": Ns,
        "integral_n": [r["value"] for r in rows], "tail_bound": [r["tail_bound"] for r in rows],
        "sup_value": [r["sup_value"] for r in rows], "method": "partial_sum", "error_bound": rows[-1]["tail_bound"],
    }


def cmd_demo(args) -> int:
    table = {
        "dirichlet": _demo_dirichlet,
        "dct_counterexample": _demo_dct,
        "mct_counterexample": _demo_mct,
        "staircase": _demo_staircase,
    }
    _emit(_render(table[args.name](), args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, help="seed for any sampling path")
    common.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials (default 1e5)")

    p = argparse.ArgumentParser(prog="probmeasure", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter, epilog=CSV_HELP)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[common], help="probability of a set under a distribution")
    m.add_argument("--dist", help="distribution spec (inline JSON or path)")
    m.add_argument("--set", help='interval union as JSON, e.g. [["-inf", 0], [1, 2]]')
    m.add_argument("--bracket", choices=BRACKETS, help="interval type for --from/--to")
    m.add_argument("--from", dest="lo", type=float)
    m.add_argument("--to", dest="hi", type=float)
    m.set_defaults(func=cmd_measure)

    i = sub.add_parser("integrate", parents=[common], help="Riemann-Stieltjes integral of an expression in x")
    i.add_argument("--integrand", help="expression in x, e.g. 'x**2' or 'cos(x)'")
    i.add_argument("--dist", help="integrator distribution (default: F(x) = x)")
    i.add_argument("--from", dest="lo", type=float)
    i.add_argument("--to", dest="hi", type=float)
    i.set_defaults(func=cmd_integrate)

    e = sub.add_parser("expect", parents=[common], help="mean, moments, variance or L_p norm")
    e.add_argument("--dist", help="distribution spec (inline JSON or path)")
    g = e.add_mutually_exclusive_group()
    g.add_argument("--moment", type=int, help="raw moment of this order")
    g.add_argument("--variance", action="store_true")
    g.add_argument("--lp", type=float, help="L_p norm for this p >= 1")
    e.set_defaults(func=cmd_expect)

    v = sub.add_parser("verify", parents=[common], help="check one inequality case (or a list)", epilog=CSV_HELP)
    v.add_argument("--config", help="case JSON object or list (inline or path)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("suite", parents=[common], help="run the inequality suite", epilog=CSV_HELP)
    s.add_argument("--config", default="default", help="'default' or a JSON list of cases (inline or path)")
    s.set_defaults(func=cmd_suite)

    d = sub.add_parser("demo", parents=[common], help="counterexample scenarios with gap trajectories")
    d.add_argument("name", choices=DEMOS)
    d.set_defaults(func=cmd_demo)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DistributionSpecError, MalformedIntervalError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NonIntegrableLawError, IntegrationError, ineq.HypothesisError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
