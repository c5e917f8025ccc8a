"""Command-line interface.

Exit codes: 0 success, 1 failed check (``oracle-check``), 2 invalid input,
3 numerical failure (divergent integral or solver breakdown).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import allocation, convolution, distortion, infconv, measures, oracle, portfolio, tables
from .errors import ConvergenceError, DivergenceError, DomainError

log = logging.getLogger("riskshare")

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


# -- input / output helpers -----------------------------------------------------


def _load_json(arg: str):
    """Inline JSON literal or path to a JSON file."""
    text = arg.strip()
    if text[:1] not in "[{":
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read {arg!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {arg!r}: {exc}") from exc


def _curves(arg: str) -> list:
    literal = _load_json(arg)
    if isinstance(literal, dict):
        literal = literal.get("curves", [literal])
    if not isinstance(literal, list) or not literal:
        raise DomainError("--curves needs a curve literal or a nonempty list of them")
    return [distortion.curve_from_dict(s) for s in literal]


def _dist(arg: str):
    literal = _load_json(arg)
    if not isinstance(literal, dict):
        raise DomainError("--dist needs a distribution literal")
    return measures.distribution_from_dict(literal)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    out = f"{x:.6g}"
    return "0" if out == "-0" else out


def _csv(header, rows, source: str | None = None) -> str:
    buf = io.StringIO()
    if source:
        buf.write(f"# source: {source}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, (float, np.floating)):
            v = float(v)
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
        if isinstance(v, np.integer):
            return int(v)
        return v

    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def _table(args, header, rows, payload, source=None) -> str:
    if args.format == "json":
        return _json(payload)
    return _csv(header, rows, source)


# -- subcommands ----------------------------------------------------------------


def cmd_riskmetric(args) -> str:
    hs = _curves(args.curves)
    d = _dist(args.dist)
    values = [measures.riskmetric(h, d) for h in hs]
    rows = [(i, v) for i, v in enumerate(values)]
    return _table(args, ["curve", "value"], rows, {"values": values})


def cmd_convolve(args) -> str:
    hs = _curves(args.curves)
    if args.x is not None:
        r = convolution.convolve(hs, args.x, args.mode)
        payload = {"value": r.value, "weights": list(r.weights), "method": r.method, "x": args.x}
        return _table(args, ["x", "value"] + [f"w{i + 1}" for i in range(len(hs))],
                      [(args.x, r.value, *r.weights)], payload)
    ts = distortion.unit_grid(args.grid)
    w = convolution.convolution_weights(hs, ts, args.mode)
    vals = sum(h.at(w[:, i]) for i, h in enumerate(hs))
    rows = [(t, v, *wr) for t, v, wr in zip(ts, vals, w)]
    payload = {"x": ts.tolist(), "value": vals.tolist(), "weights": w.tolist()}
    return _table(args, ["x", "value"] + [f"w{i + 1}" for i in range(len(hs))], rows, payload)


def cmd_infconv(args) -> str:
    hs = _curves(args.curves)
    d = _dist(args.dist)
    fn = {
        "unconstrained": infconv.unconstrained_infconv,
        "como": infconv.comonotonic_infconv,
        "counter": infconv.countermonotonic_infconv,
    }[args.mode]
    r = fn(hs, d)
    alloc = r.allocation
    if isinstance(alloc, allocation.JackpotAllocation):
        alloc_desc = {"kind": alloc.kind, "top_level_probs": list(alloc.top_level().probs)}
    elif isinstance(alloc, (int, np.integer)):
        alloc_desc = {"kind": "single_agent", "agent": int(alloc)}
    else:
        alloc_desc = None
    payload = {"mode": args.mode, "value": r.value, "regime": r.regime, "bounds": list(r.bounds),
               "allocation": alloc_desc}
    return _table(args, ["mode", "value", "regime", "lower", "upper"],
                  [(args.mode, r.value, r.regime, *r.bounds)], payload)


def cmd_share_constant(args) -> str:
    try:
        alphas = [float(a) for a in args.alphas.split(",")]
    except ValueError as exc:
        raise DomainError(f"--alphas must be comma-separated numbers: {exc}") from exc
    comp, value = allocation.constant_share(alphas)
    payload = {"alphas": alphas, "probs": list(comp.probs), "value": value,
               "foc_residual": allocation.foc_residual(alphas, comp.probs)}
    fmt = args.format or "json"
    if fmt == "json":
        return _json(payload)
    return _csv(["alpha", "prob"], list(zip(alphas, comp.probs)))


def _cost(name: str):
    if name != "quadratic":
        raise DomainError(f"unknown cost {name!r}; only 'quadratic' is available from the command line")
    return portfolio.quadratic_cost()


def cmd_portfolio(args) -> str:
    hs = _curves(args.curves)
    d = _dist(args.dist)
    sol = portfolio.optimal_lambda(hs, d, args.wealth, _cost(args.cost), strict_budget=args.strict_budget)
    payload = {"lambda_star": sol.lambda_star, "regime": sol.regime, "rho_value": sol.rho_value,
               "budget_bound": sol.budget_bound, "clamped": sol.clamped,
               "objective": sol.objective(_cost(args.cost), args.wealth)}
    fmt = args.format or "json"
    if fmt == "json":
        return _json(payload)
    return _csv(["lambda_star", "regime", "rho_value", "budget_bound"],
                [(sol.lambda_star, sol.regime, sol.rho_value, sol.budget_bound)])


def _alpha_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise DomainError("--alpha-grid must look like start:stop:step") from exc
    if step <= 0 or b < a:
        raise DomainError("--alpha-grid needs start <= stop and a positive step")
    n = int(math.floor((b - a) / step + 1e-9))
    return a + step * np.arange(n + 1)


def cmd_sweep(args) -> str:
    family = {4: portfolio.concave_example_family, 5: portfolio.convex_example_family}[args.example]
    rows = portfolio.comparative_sweep(family, _alpha_grid(args.alpha_grid), wealth=args.wealth)
    return _table(args, ["alpha", "lambda_star"], rows, {"rows": rows})


def cmd_table1(args) -> str:
    rows = tables.table1_rows()
    header = ["law", "cone", "como", "counter_eq_unconstrained", "reference_como", "reference_counter",
              "dev_como", "dev_counter"]
    data = [(r.law, r.cone, r.como, r.counter, r.reference_como, r.reference_counter, r.dev_como, r.dev_counter)
            for r in rows]
    payload = [dict(zip(header, row)) for row in data]
    return _table(args, header, data, payload, "Table 1")


def cmd_table2(args) -> str:
    rows = tables.table2_rows()
    header = ["h1_alpha", "h2_alpha", "p_a1", "p_a2", "value", "reference_p_a1", "reference_p_a2",
              "reference_value", "foc_residual"]
    data = [(r.alpha1, r.alpha2, r.p1, r.p2, r.value, *r.reference, r.foc_residual) for r in rows]
    payload = [dict(zip(header, row)) for row in data]
    return _table(args, header, data, payload, "Table 2")


def cmd_figure(args) -> str:
    header, rows = portfolio.figure_data(args.which, args.grid)
    return _table(args, header, rows, {"columns": header, "rows": rows})


def cmd_oracle_check(args) -> str:
    rng = np.random.default_rng(args.seed)
    lines, ok = [], True

    def record(name, a, b, tol):
        nonlocal ok
        good = abs(a - b) <= tol
        ok &= good
        lines.append((name, a, b, abs(a - b), tol, "pass" if good else "FAIL"))

    for name, law in tables.table1_laws().items():
        for cone, d in (("L+", law), ("L-", measures.negate(law))):
            try:
                main = infconv.countermonotonic_infconv(tables.TABLE1_CURVES, d).value
            except DivergenceError:
                lines.append((f"table1 {name} {cone}", "diverges", "skipped", "", "", "skip"))
                continue
            record(f"table1 {name} {cone}", main, oracle.oracle_levelwise(tables.TABLE1_CURVES, d), 2e-3)
    for r in tables.table2_rows():
        w, v = oracle.oracle_constant_share([r.alpha1, r.alpha2], 10000)
        record(f"table2 {r.alpha1:g},{r.alpha2:g} value", r.value, v, 1e-6)
        record(f"table2 {r.alpha1:g},{r.alpha2:g} p1", r.p1, w[0], 2e-4)
    for k in range(args.cases):
        hs = _random_convex_group(rng, int(rng.integers(2, 4)))
        d = measures.Uniform(0.0, 1.0) if k % 2 == 0 else _random_discrete(rng)
        main = infconv.countermonotonic_infconv(hs, d).value
        record(f"random case {k}", main, oracle.oracle_levelwise(hs, d), 2e-3)
    args._exit = EXIT_OK if ok else EXIT_CHECK
    return _table(args, ["check", "main", "oracle", "abs_diff", "tol", "status"], lines,
                  [dict(zip(["check", "main", "oracle", "abs_diff", "tol", "status"], r)) for r in lines])


def _random_convex_group(rng, n):
    out = []
    for _ in range(n):
        if rng.random() < 0.5:
            out.append(distortion.Power(float(rng.uniform(1.0001, 6.0))))
        else:
            out.append(distortion.DualPower(float(rng.uniform(0.1, 0.9999))))
    return tuple(out)


def _random_discrete(rng, k=6):
    vals = rng.uniform(0.0, 10.0, size=k)
    p = rng.dirichlet(np.ones(k))
    p[-1] = 1.0 - p[:-1].sum()
    return measures.Discrete(tuple(zip(vals, p)))


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--grid", type=int, default=101, help="grid points for curve outputs")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="riskshare", description="Distortion risk sharing toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("riskmetric", parents=[common], help="evaluate distortion riskmetrics")
    s.add_argument("--curves", required=True)
    s.add_argument("--dist", required=True)
    s.set_defaults(func=cmd_riskmetric)

    s = sub.add_parser("convolve", parents=[common], help="inf/sup-convolution at a point or on a grid")
    s.add_argument("--curves", required=True)
    s.add_argument("--mode", choices=["inf", "sup"], default="inf")
    s.add_argument("--x", type=float, default=None)
    s.set_defaults(func=cmd_convolve)

    s = sub.add_parser("infconv", parents=[common], help="inf-convolution of risk measures")
    s.add_argument("--curves", required=True)
    s.add_argument("--dist", required=True)
    s.add_argument("--mode", choices=["unconstrained", "como", "counter"], default="unconstrained")
    s.set_defaults(func=cmd_infconv)

    s = sub.add_parser("share-constant", parents=[common], help="optimal lottery for power curves")
    s.add_argument("--alphas", required=True)
    s.set_defaults(func=cmd_share_constant)

    s = sub.add_parser("portfolio", parents=[common], help="optimal risky proportion")
    s.add_argument("--curves", required=True)
    s.add_argument("--dist", required=True)
    s.add_argument("--wealth", type=float, required=True)
    s.add_argument("--cost", default="quadratic")
    s.add_argument("--strict-budget", action="store_true", help="budget bound c^{-1}(W) instead of c'^{-1}(W)")
    s.set_defaults(func=cmd_portfolio)

    s = sub.add_parser("sweep", parents=[common], help="lambda* across a parametrized family")
    s.add_argument("--example", type=int, choices=[4, 5], required=True)
    s.add_argument("--alpha-grid", default="0.5:3:0.25")
    s.add_argument("--wealth", type=float, default=1.0)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("table1", parents=[common], help="three inf-convolutions on six laws")
    s.set_defaults(func=cmd_table1)
    s = sub.add_parser("table2", parents=[common], help="optimal lotteries for two power curves")
    s.set_defaults(func=cmd_table2)

    s = sub.add_parser("figure", parents=[common], help="figure data as CSV")
    s.add_argument("--which", type=int, choices=[1, 2, 3, 4], required=True)
    s.set_defaults(func=cmd_figure)

    s = sub.add_parser("oracle-check", parents=[common], help="compare solvers against brute force")
    s.add_argument("--cases", type=int, default=10)
    s.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.format is None and args.command not in ("share-constant", "portfolio"):
        args.format = "csv"
    args._exit = EXIT_OK
    try:
        out = args.func(args)
    except (DivergenceError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return args._exit


if __name__ == "__main__":
    sys.exit(main())
