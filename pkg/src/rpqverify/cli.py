"""rpq: run verification suites, print coefficient tables, list presets.

Exit codes: 0 when every FAIL is covered by the allowlist, 1 otherwise,
2 for configuration errors, 3 for internal errors.
"""
import argparse
import sys
import traceback

from .cases import sample_points
from .errors import ConfigError, PoleError, SingularError
from .identities import central_charge_scalar, structure_XY
from .scalars import as_fraction, load_presets, rpq_factorial, rpq_number_at, tau_power
from .suite import SUITES, RunConfig, run_suite, write_reports

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


def parse_window(text):
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ConfigError("window must look like a..b, got %r" % text) from None
    if lo > hi:
        raise ConfigError("window %r is empty" % text)
    return lo, hi


def _split(values):
    out = []
    for v in values or ():
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


def build_config(args):
    doc = {}
    if args.config:
        base = RunConfig.from_json(args.config)
        doc = {k: getattr(base, k) for k in RunConfig.__dataclass_fields__}
    if args.preset:
        doc["presets"] = _split(args.preset)
    if args.delta:
        doc["deltas"] = [as_fraction(d) for d in _split(args.delta)]
    if args.window:
        doc["window"] = parse_window(args.window)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.samples is not None:
        doc["samples"] = args.samples
    if args.suite is not None:
        doc["suites"] = _split(args.suite)
    if args.readings:
        doc["readings"] = args.readings
    if args.allowlist:
        doc["allowlist"] = args.allowlist
    if args.presets_file:
        doc["preset_files"] = list(args.presets_file)
    if args.out:
        doc["out"] = args.out
    return RunConfig(**doc)


def cmd_verify(args):
    cfg = build_config(args)
    ledger = run_suite(cfg)
    out = cfg.out or "rpq-report.json"
    json_path, md_path = write_reports(ledger, out)
    s = ledger.summary()
    print("%d cases: %d pass, %d fail (%d allowlisted, %d unexplained), %d skipped" % (
        len(ledger.cases), s["pass"], s["fail"], s["allowlisted"], s["unexplained"],
        s["skipped"]))
    print("reports: %s, %s" % (json_path, md_path))
    return EXIT_OK if not ledger.unexplained() else EXIT_FAIL


def _table_point(cfg):
    pts, _ = sample_points(cfg.seed, cfg.resolved_rho(), 1, cfg.preset_objs)
    return pts[0]


def _fmt(x):
    return str(x)


def _safe(fn):
    try:
        return _fmt(fn())
    except (PoleError, SingularError, ZeroDivisionError):
        return "pole"


def cmd_table(args):
    cfg = build_config(args)
    sp = _table_point(cfg)
    lo, hi = parse_window(args.n) if args.n else (0, 5)
    lines = ["sample point %s" % sp.label(), ""]
    for preset in cfg.preset_objs:
        lines.append("## %s" % preset.name)
        lines.append("")
        if args.kind == "numbers":
            lines += ["| n | [n] | [n]! | tau1^n | tau2^n |", "|---|---|---|---|---|"]
            for n in range(lo, hi + 1):
                fact = _safe(lambda: rpq_factorial(n, preset, sp)) if n >= 0 else ""
                lines.append("| %d | %s | %s | %s | %s |" % (
                    n, _safe(lambda: rpq_number_at(n, preset, sp)), fact,
                    _safe(lambda: tau_power("tau1", n, preset, sp)),
                    _safe(lambda: tau_power("tau2", n, preset, sp))))
        elif args.kind == "central":
            lines += ["| n | C_n |", "|---|---|"]
            for n in range(lo, hi + 1):
                lines.append("| %d | %s |" % (n, _safe(lambda: central_charge_scalar(n, preset, sp))))
        else:
            for delta in cfg.deltas:
                lines += ["delta = %s" % delta, "", "| n | m | X | Y |", "|---|---|---|---|"]
                for n in range(lo, hi + 1):
                    for m in range(lo, hi + 1):
                        try:
                            X, Y = structure_XY(n, m, delta, preset, sp, "tau")
                            X, Y = _fmt(X), _fmt(Y)
                        except (PoleError, SingularError, ZeroDivisionError):
                            X = Y = "pole"
                        lines.append("| %d | %d | %s | %s |" % (n, m, X, Y))
                lines.append("")
        lines.append("")
    print("\n".join(lines).rstrip())
    return EXIT_OK


def cmd_presets(args):
    reg = None
    for path in args.presets_file or ():
        reg = load_presets(path, reg)
    if reg is None:
        from .scalars import DEFAULT_REGISTRY
        reg = DEFAULT_REGISTRY
    lines = ["| name | aliases | R(s,t) | tau1 | tau2 |", "|---|---|---|---|---|"]
    for p in reg:
        lines.append("| %s | %s | %s | %s | %s |" % (p.name, ",".join(p.aliases) or "-", p.R,
                                                     p.tau1, p.tau2))
    print("\n".join(lines))
    return EXIT_OK


def _run_flags(p, table=False):
    p.add_argument("--preset", action="append", help="preset name or alias (repeatable, or comma list)")
    p.add_argument("--delta", action="append", help="conformal dimension, e.g. 2 or 1/2")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--presets-file", action="append", help="JSON file with extra presets")
    if table:
        p.add_argument("--n", help="index range a..b (default 0..5)")
        return
    p.add_argument("--window", help="basis window a..b")
    p.add_argument("--samples", type=int)
    p.add_argument("--suite", action="append",
                   help="suite(s) to run, from: %s; pass '' for none" % ", ".join(SUITES))
    p.add_argument("--readings", choices=("dual", "designated", "all"))
    p.add_argument("--allowlist", help="allowlist JSON (default: the shipped one)")
    p.add_argument("--out", help="JSON report path; the Markdown report goes next to it")


def make_parser():
    parser = argparse.ArgumentParser(prog="rpq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification suites and write reports")
    _run_flags(v)
    v.set_defaults(func=cmd_verify)
    t = sub.add_parser("table", help="print a Markdown table of coefficients")
    t.add_argument("kind", choices=("numbers", "central", "structure"))
    _run_flags(t, table=True)
    t.set_defaults(func=cmd_table, window=None, samples=None, suite=None, readings=None,
                   allowlist=None, out=None)
    p = sub.add_parser("presets", help="list registered presets")
    p.add_argument("--presets-file", action="append")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
