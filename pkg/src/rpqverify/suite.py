"""Suite orchestration: run configuration, family enumeration, allowlist, reports."""
import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import identities as ids
from . import nalgebra as na
from .cases import FAIL, PASS, Skip, run_case, run_scalar_case, sample_points
from .errors import ConfigError
from .module import Window
from .scalars import (DEFAULT_REGISTRY, as_fraction, lcm, load_presets, proportionality_constant,
                      rpq_factorial, rpq_number_at, tau_power)

SUITES = ("core", "p1", "witt", "theta", "delta1", "jacobi", "nalg", "cnalg", "tfamily",
          "tnbracket", "toy", "bell", "matrix")
DEFAULT_RANGES = {"nm": [-3, 3], "jacobi": [-1, 2], "nalg": [-2, 2], "tnbracket": [-2, 2],
                  "scalar": [-6, 6]}
READING_MODES = ("dual", "designated", "all")


@dataclass
class RunConfig:
    presets: list = field(default_factory=lambda: list(DEFAULT_REGISTRY.names()))
    deltas: list = field(default_factory=lambda: [Fraction(2), Fraction(1, 2)])
    ranges: dict = field(default_factory=lambda: dict(DEFAULT_RANGES))
    seed: int = 0
    rho: object = "auto"
    window: tuple = (-6, 6)
    samples: int = 3
    suites: list = field(default_factory=lambda: list(SUITES))
    readings: str = "dual"
    out: str = None
    allowlist: str = None
    preset_files: list = field(default_factory=list)

    def __post_init__(self):
        try:
            self.deltas = [as_fraction(d) for d in self.deltas]
        except ConfigError:
            raise
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples must be a positive integer")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError("unknown suite(s): %s" % ", ".join(bad))
        if self.readings not in READING_MODES:
            raise ConfigError("readings must be one of %s" % ", ".join(READING_MODES))
        lo, hi = self.window
        if int(lo) != lo or int(hi) != hi or lo > hi:
            raise ConfigError("window must be integers a..b with a <= b")
        self.window = (int(lo), int(hi))
        ranges = dict(DEFAULT_RANGES)
        for key, val in dict(self.ranges).items():
            if key not in DEFAULT_RANGES:
                raise ConfigError("unknown range %r" % key)
            if len(val) != 2 or val[0] > val[1]:
                raise ConfigError("range %r must be [lo, hi]" % key)
            ranges[key] = [int(val[0]), int(val[1])]
        self.ranges = ranges
        if self.rho != "auto" and (not isinstance(self.rho, int) or self.rho < 1):
            raise ConfigError("rho must be 'auto' or a positive integer")
        self.registry = DEFAULT_REGISTRY
        for path in self.preset_files:
            self.registry = load_presets(path, self.registry)
        self.preset_objs = [self.registry.get(p) for p in self.presets]

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            try:
                with open(doc) as fh:
                    doc = json.load(fh)
            except OSError as exc:
                raise ConfigError("cannot read config: %s" % exc) from None
            except json.JSONDecodeError as exc:
                raise ConfigError("config is not valid JSON: %s" % exc) from None
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError("unknown config key(s): %s" % ", ".join(sorted(unknown)))
        doc = dict(doc)
        if "window" in doc:
            doc["window"] = tuple(doc["window"])
        return cls(**doc)

    def resolved_rho(self):
        if self.rho != "auto":
            return self.rho
        # N/2 = (k + delta)/2 appears in central terms and Theta powers
        dens = [2 * d.denominator for d in self.deltas] + [2]
        for p in self.preset_objs:
            dens.extend(p.exponent_denominators())
        return lcm(*dens)

    def run_metadata(self):
        return {"seed": self.seed, "rho": self.resolved_rho(),
                "window": "%d..%d" % self.window, "samples": self.samples,
                "presets": [p.name for p in self.preset_objs],
                "deltas": [str(d) for d in self.deltas],
                "ranges": {k: list(v) for k, v in sorted(self.ranges.items())},
                "suites": list(self.suites), "readings": self.readings}


class Ledger:
    """Append-only case list; frozen once the run completes."""

    def __init__(self, run):
        self.run = run
        self.cases = []
        self.probes = {}
        self.resampled = 0
        self._frozen = False

    def append(self, case):
        if self._frozen:
            raise RuntimeError("ledger is frozen")
        self.cases.append(case)

    def freeze(self):
        self._frozen = True
        self.cases = tuple(self.cases)

    def summary(self):
        out = {"pass": 0, "fail": 0, "skipped": 0, "allowlisted": 0, "unexplained": 0,
               "inconsistent": 0}
        for c in self.cases:
            out[c.verdict.lower()] += 1
            if c.verdict == FAIL:
                if (c.extra or {}).get("allowlisted"):
                    out["allowlisted"] += 1
                else:
                    out["unexplained"] += 1
            if c.inconsistent:
                out["inconsistent"] += 1
        return out

    def unexplained(self):
        return [c for c in self.cases
                if (c.verdict == FAIL and not (c.extra or {}).get("allowlisted")) or c.inconsistent]

    def discrepancies(self):
        """Instances that fail under every convention reading that was run."""
        groups = {}
        for c in self.cases:
            key = (c.family, json.dumps(c.to_json()["params"], sort_keys=True))
            groups.setdefault(key, []).append(c)
        out = []
        for (family, params), cases in sorted(groups.items()):
            if all(c.verdict == FAIL for c in cases):
                out.append({"family": family, "params": json.loads(params),
                            "conventions": sorted(c.reading for c in cases),
                            "witness": cases[0].witness,
                            "reason": (cases[0].extra or {}).get("allowlist_reason")})
        return out

    def verdict_multiset(self):
        return sorted((c.family, json.dumps(c.to_json()["params"], sort_keys=True), c.reading,
                       c.verdict) for c in self.cases)

    def to_json(self):
        return {"run": dict(self.run, resampled_points=self.resampled),
                "cases": [c.to_json() for c in self.cases],
                "summary": self.summary(),
                "discrepancies": self.discrepancies(),
                "probes": self.probes}


# --- allowlist --------------------------------------------------------------------

ALLOWLIST_VERSION = 1


def load_allowlist(path=None):
    if path is None:
        text = resources.files("rpqverify").joinpath("data/allowlist.json").read_text()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("cannot read allowlist: %s" % exc) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("allowlist is not valid JSON: %s" % exc) from None
    if doc.get("version") != ALLOWLIST_VERSION:
        raise ConfigError("unsupported allowlist version %r" % doc.get("version"))
    for e in doc.get("entries", []):
        if "family" not in e or "reason" not in e:
            raise ConfigError("allowlist entries need family and reason")
    return doc["entries"]


def _matches(entry, case):
    if entry["family"] != case.family:
        return False
    conv = entry.get("convention", "*")
    if conv != "*" and conv != case.reading and case.reading not in conv:
        return False
    presets = entry.get("presets", "*")
    if presets != "*" and case.params.get("preset") not in presets:
        return False
    for key, allowed in entry.get("where", {}).items():
        val = case.to_json()["params"].get(key)
        if val not in allowed:
            return False
    return True


def apply_allowlist(cases, entries):
    for c in cases:
        if c.verdict != FAIL or c.inconsistent:
            continue
        for e in entries:
            if _matches(e, c):
                c.extra = dict(c.extra or {}, allowlisted=True, allowlist_reason=e["reason"])
                break


# --- family enumeration --------------------------------------------------------------

def _readings(cfg, designated, printed, all_readings):
    if cfg.readings == "designated":
        out = [designated]
    elif cfg.readings == "dual":
        out = [designated] + [r for r in printed if r != designated]
    else:
        out = [designated] + [r for r in all_readings if r != designated]
    return out


def _span(r):
    return range(r[0], r[1] + 1)


def _core_cases(cfg, pts):
    lo, hi = cfg.ranges["scalar"]
    for preset in cfg.preset_objs:
        P = {"preset": preset.name}

        def addition(sp, preset=preset):
            A = lambda x: tau_power("tau1", x, preset, sp)
            B = lambda x: tau_power("tau2", x, preset, sp)
            R = lambda x: rpq_number_at(x, preset, sp)
            for u, v in itertools.product(range(lo, hi + 1), repeat=2):
                lhs, rhs = R(u + v), A(v) * R(u) + B(u) * R(v)
                if lhs != rhs:
                    return {"u": u, "v": v, "lhs": str(lhs), "rhs": str(rhs)}
            return None

        def zero_and_factorial(sp, preset=preset):
            if rpq_number_at(0, preset, sp) != 0:
                return {"n": 0, "value": str(rpq_number_at(0, preset, sp))}
            for n in range(0, 8):
                lhs = rpq_factorial(n + 1, preset, sp)
                rhs = rpq_number_at(n + 1, preset, sp) * rpq_factorial(n, preset, sp)
                if lhs != rhs:
                    return {"n": n + 1, "lhs": str(lhs), "rhs": str(rhs)}
            return None

        def proportionality(sp, preset=preset):
            vals = [proportionality_constant(n, preset, sp) for n in range(1, 9)]
            for n, v in enumerate(vals[1:], start=2):
                if v != vals[0]:
                    return {"n": n, "constant": str(v), "at_1": str(vals[0])}
            return None

        yield run_scalar_case("core.addition", P, "exact", addition, pts)
        yield run_scalar_case("core.factorial", P, "exact", zero_and_factorial, pts)
        yield run_scalar_case("core.proportionality", P, "exact", proportionality, pts)


def _grid(cfg, key="nm"):
    return list(itertools.product(_span(cfg.ranges[key]), repeat=2))


def _p1_cases(cfg, pts, w):
    for preset, delta, (n, m) in itertools.product(cfg.preset_objs, cfg.deltas, _grid(cfg)):
        for odd in (False, True):
            designated = ids.P1_ODD_DESIGNATED if odd else ids.P1_DESIGNATED
            for r in _readings(cfg, designated, ["closed-literal-printed-printed"], ids.P1_READINGS):
                P = {"preset": preset.name, "delta": delta, "n": n, "m": m, "odd": odd}
                yield run_case("p1", P, r, lambda sp: ids.p1_operators(n, m, delta, preset, sp, r, odd),
                               pts, w, designated=r == designated)


def _witt_like(family, fn, designated, printed, all_readings):
    def gen(cfg, pts, w):
        for preset, delta, (n, m) in itertools.product(cfg.preset_objs, cfg.deltas, _grid(cfg)):
            for odd in (False, True):
                for r in _readings(cfg, designated, printed, all_readings):
                    P = {"preset": preset.name, "delta": delta, "n": n, "m": m, "odd": odd}
                    yield run_case(family, P, r, lambda sp: fn(n, m, delta, preset, sp, r, odd),
                                   pts, w, designated=r == designated)
    return gen


_witt_cases = _witt_like("witt", ids.witt_operators, ids.WITT_DESIGNATED, ["printed"],
                         ids.WITT_READINGS)
_theta_cases = _witt_like("theta", ids.theta_operators, ids.THETA_DESIGNATED, ["printed"],
                          ids.THETA_READINGS)


def _delta1_cases(cfg, pts, w):
    designated = ids.DELTA1_DESIGNATED
    readings = _readings(cfg, designated, ["printed"], ids.DELTA1_READINGS)
    for preset, (n, m) in itertools.product(cfg.preset_objs, _grid(cfg)):
        for form in ids.DELTA1_FORMS:
            for odd in (False, True):
                for r in readings:
                    P = {"preset": preset.name, "n": n, "m": m, "form": form, "odd": odd}
                    yield run_case("delta1", P, r,
                                   lambda sp: ids.delta1_operators(n, m, preset, sp, r, form, odd),
                                   pts, w, designated=r == designated)
    for preset in cfg.preset_objs:
        for n, m, form in ids.SU11_CASES:
            for r in readings:
                P = {"preset": preset.name, "n": n, "m": m, "form": form, "odd": False}
                yield run_case("su11", P, r,
                               lambda sp: ids.delta1_operators(n, m, preset, sp, r, form, False),
                               pts, w, designated=r == designated)


JACOBI_PATTERNS = ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1))


def _jacobi_cases(cfg, pts, w):
    designated = ids.JACOBI_DESIGNATED
    span = _span(cfg.ranges["jacobi"])
    for preset, delta, pattern in itertools.product(cfg.preset_objs, cfg.deltas, JACOBI_PATTERNS):
        for triple in itertools.product(span, repeat=3):
            for r in _readings(cfg, designated, ["plain"], ids.JACOBI_READINGS):
                P = {"preset": preset.name, "delta": delta, "indices": list(triple),
                     "parities": "".join("LG"[p] for p in pattern)}
                yield run_case("jacobi", P, r,
                               lambda sp: ids.jacobi_operators(triple, pattern, delta, preset, sp, r),
                               pts, w, designated=r == designated)


NALG_NAMED = {"three": [(0, 1, 2), (-1, 0, 1), (1, -2, 2)],
              "four": [(0, 1, 2, 3), (-1, 0, 1, 2), (2, -1, 1, -2)]}


def _nalg_cases(cfg, pts, w):
    designated = na.NALG_DESIGNATED
    span = _span(cfg.ranges["nalg"])
    readings = _readings(cfg, designated, ["ordered-fixed", "input-permuted"], na.NALG_READINGS)
    for preset, delta in itertools.product(cfg.preset_objs, cfg.deltas):
        for ml in itertools.product(span, repeat=3):
            for r in readings:
                P = {"preset": preset.name, "delta": delta, "mlist": list(ml)}
                yield run_case("nalg", P, r,
                               lambda sp: na.nalg_operators(list(ml), delta, preset, sp, r),
                               pts, w, designated=r == designated)
        for ml in NALG_NAMED["four"]:
            P = {"preset": preset.name, "delta": delta, "mlist": list(ml)}
            yield run_case("nalg.four", P, designated,
                           lambda sp: na.nalg_operators(list(ml), delta, preset, sp, designated),
                           pts, w)


def null_limit_probe(preset, delta, mlists, base=Fraction(9, 10), exponents=(2, 3, 4),
                     window=Window()):
    """Window norms of both sides of the n-bracket relation as u - v = 10^-d shrinks.

    Returns {"construction": [...], "closed_form": [...]}, each the maximum over ``mlists``.
    """
    from .module import window_norm
    from .scalars import SamplePoint
    out = {"construction": [], "closed_form": [], "u_minus_v": []}
    rho = Fraction(delta).denominator
    for d in exponents:
        sp = SamplePoint(rho, base, base - Fraction(1, 10 ** d))
        big_l = big_r = Fraction(0)
        for ml in mlists:
            try:
                lhs, rhs = na.nalg_operators(list(ml), delta, preset, sp)
                big_l = max(big_l, window_norm(lhs, window))
                big_r = max(big_r, window_norm(rhs, window))
            except Skip:
                continue
        out["construction"].append(float(big_l))
        out["closed_form"].append(float(big_r))
        out["u_minus_v"].append("1e-%d" % d)
    return out


def _cnalg_cases(cfg, pts, w):
    for preset, delta in itertools.product(cfg.preset_objs, cfg.deltas):
        P = {"preset": preset.name, "delta": delta}

        def antisym(sp, preset=preset, delta=delta):
            base = [1, -1, 2, 3]
            f0 = na.cnalg_f(base, delta, preset, sp)
            for i in range(3):
                sw = list(base)
                sw[i], sw[i + 1] = sw[i + 1], sw[i]
                f1 = na.cnalg_f(sw, delta, preset, sp)
                for k, par in Window(*cfg.window).basis():
                    if f1.fn(k, par) != -f0.fn(k, par):
                        return {"swap": [i, i + 1], "k": k, "parity": par}
            dup = na.cnalg_f([2, 2, -1, 3], delta, preset, sp)
            if any(dup.fn(k, 0) for k in range(-2, 3)):
                return {"repeated": [2, 2, -1, 3]}
            return None

        def central_support(sp, preset=preset, delta=delta):
            for ml in itertools.product(range(1, 3), repeat=4):
                c = na.cnalg_central(list(ml), delta, preset, sp)
                if c.fn(0, 0) != 0:
                    return {"mlist": list(ml), "value": str(c.fn(0, 0))}
            return None

        def super_support(sp, preset=preset):
            for ml in itertools.product(range(-2, 3), repeat=4):
                if not any(ml[k] + ml[3] + 1 == 0 for k in range(3)):
                    v = na.super_central(list(ml), preset, sp)
                    if v != 0:
                        return {"mlist": list(ml), "value": str(v)}
            return None

        yield run_scalar_case("cnalg.antisymmetry", P, "formula", antisym, pts)
        yield run_scalar_case("cnalg.central-support", P, "formula", central_support, pts)
        yield run_scalar_case("cnalg.super-support", P, "formula", super_support, pts)
        for ml in ((1, -1, 2, -2), (2, -2, 3, -3), (1, 2, -3, 0)):
            Q = dict(P, mlist=list(ml))
            yield run_case("cnalg", Q, "ordered",
                           lambda sp: na.cnalg_bracket_operators(list(ml), delta, preset, sp),
                           pts, w)


def _tfamily_cases(cfg, pts, w):
    span = _span(cfg.ranges["nm"])
    prod_r = _readings(cfg, na.T_DESIGNATED, ["closed-graded"], na.T_READINGS)
    comm_designated = na.T_COMMUTATOR_DESIGNATED
    comm_r = _readings(cfg, comm_designated, ["defining-graded-printed"], na.T_COMMUTATOR_READINGS)
    for preset, delta in itertools.product(cfg.preset_objs, cfg.deltas):
        for m, n, a, b in itertools.product(span, span, (1, 2), (1, 2)):
            for odd in (False, True):
                P = {"preset": preset.name, "delta": delta, "m": m, "n": n, "a": a, "b": b,
                     "odd": odd}
                for r in prod_r:
                    yield run_case("tproduct", P, r,
                                   lambda sp: na.t_product_operators(m, n, a, b, delta, preset, sp,
                                                                     r, odd),
                                   pts, w, designated=r == na.T_DESIGNATED)
                for r in comm_r:
                    yield run_case("tcommutator", P, r,
                                   lambda sp: na.t_commutator_operators(m, n, a, b, delta, preset,
                                                                        sp, r, odd),
                                   pts, w, designated=r == comm_designated)
        for m, n in itertools.product(span, span):
            for a in (1, 2):
                P = {"preset": preset.name, "delta": delta, "m": m, "n": n, "a": a}
                for r in comm_r:
                    yield run_case("tcommutator.equal", P, r,
                                   lambda sp: na.t_commutator_equal_operators(m, n, a, delta,
                                                                              preset, sp, r),
                                   pts, w, designated=r == comm_designated)
            P = {"preset": preset.name, "delta": delta, "m": m, "n": n}
            for r in comm_r:
                yield run_case("tcommutator.unit", P, r,
                               lambda sp: na.t_commutator_unit_operators(m, n, delta, preset, sp, r),
                               pts, w, designated=r == comm_designated)


def _tnbracket_cases(cfg, pts, w):
    span = _span(cfg.ranges["tnbracket"])
    readings = _readings(cfg, na.T_DESIGNATED, ["closed-graded"], na.T_READINGS)
    for preset, delta in itertools.product(cfg.preset_objs, cfg.deltas):
        for size in (2, 3):
            for ml in itertools.product(span, repeat=size):
                for a in (1, 2):
                    for odd in (False, True):
                        P = {"preset": preset.name, "delta": delta, "mlist": list(ml), "a": a,
                             "odd": odd}
                        for r in readings:
                            yield run_case("tnbracket", P, r,
                                           lambda sp: na.t_nbracket_operators(list(ml), a, delta,
                                                                              preset, sp, r, odd),
                                           pts, w, designated=r == na.T_DESIGNATED)


FAMILY_RUNNERS = {
    "p1": _p1_cases, "witt": _witt_cases, "theta": _theta_cases, "delta1": _delta1_cases,
    "jacobi": _jacobi_cases, "nalg": _nalg_cases, "cnalg": _cnalg_cases,
    "tfamily": _tfamily_cases, "tnbracket": _tnbracket_cases,
}


def _extra_runners():
    from .series import suite_cases as series_cases
    from .matrix_model import suite_cases as matrix_cases
    return {"toy": series_cases("toy"), "bell": series_cases("bell"), "matrix": matrix_cases}


def run_suite(config, allowlist=None):
    """Enumerate every selected family over the grid and return a frozen Ledger."""
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_json(config)
    rho = cfg.resolved_rho()
    ledger = Ledger(cfg.run_metadata())
    pts, resampled = sample_points(cfg.seed, rho, cfg.samples, cfg.preset_objs)
    ledger.resampled = resampled
    ledger.run["points"] = [sp.label() for sp in pts]
    w = Window(cfg.window[0], cfg.window[1])
    runners = dict(FAMILY_RUNNERS, core=lambda c, p, w: _core_cases(c, p))
    if set(cfg.suites) & {"toy", "bell", "matrix"}:
        runners.update(_extra_runners())
    for suite in SUITES:
        if suite not in cfg.suites:
            continue
        for case in runners[suite](cfg, pts, w):
            ledger.append(case)
    if "nalg" in cfg.suites:
        probes = {}
        for preset in cfg.preset_objs:
            for delta in cfg.deltas:
                probes["%s|%s" % (preset.name, delta)] = null_limit_probe(
                    preset, delta, NALG_NAMED["three"])
        ledger.probes["nalg_null_limit"] = probes
    entries = allowlist if allowlist is not None else load_allowlist(cfg.allowlist)
    apply_allowlist(ledger.cases, entries)
    ledger.freeze()
    return ledger


# --- reports -----------------------------------------------------------------------

def report_json(ledger):
    return json.dumps(ledger.to_json(), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def report_markdown(ledger):
    lines = ["# Verification report", ""]
    run = ledger.run
    lines.append("seed %s, rho %s, window %s, %s sample points" % (
        run["seed"], run["rho"], run["window"], run["samples"]))
    lines += ["", "| family | convention | designated | PASS | FAIL | allowlisted | SKIPPED |",
              "|---|---|---|---|---|---|---|"]
    counts = {}
    for c in ledger.cases:
        key = (c.family, c.reading, c.designated)
        row = counts.setdefault(key, [0, 0, 0, 0])
        if c.verdict == PASS:
            row[0] += 1
        elif c.verdict == FAIL:
            row[1] += 1
            if (c.extra or {}).get("allowlisted"):
                row[2] += 1
        else:
            row[3] += 1
    for (fam, conv, des), row in sorted(counts.items()):
        lines.append("| %s | %s | %s | %d | %d | %d | %d |" % ((fam, conv, "yes" if des else "no")
                                                           + tuple(row)))
    s = ledger.summary()
    lines += ["", "Totals: %(pass)d pass, %(fail)d fail (%(allowlisted)d allowlisted, "
              "%(unexplained)d unexplained), %(skipped)d skipped." % s]
    disc = ledger.discrepancies()
    lines += ["", "## Discrepancies (fail under every convention run)", ""]
    if not disc:
        lines.append("none")
    by_family = {}
    for d in disc:
        by_family.setdefault((d["family"], d["reason"]), []).append(d)
    for (fam, reason), items in sorted(by_family.items(), key=lambda kv: (kv[0][0], kv[0][1] or "")):
        lines.append("- %s: %d instances; %s" % (fam, len(items), reason or "not allowlisted"))
    probes = ledger.probes.get("nalg_null_limit")
    if probes:
        lines += ["", "## n-bracket norms as u - v shrinks", "",
                  "| preset, delta | u - v | construction | closed form |", "|---|---|---|---|"]
        for key, pr in sorted(probes.items()):
            for uv, a, b in zip(pr["u_minus_v"], pr["construction"], pr["closed_form"]):
                lines.append("| %s | %s | %.3e | %.3e |" % (key, uv, a, b))
    return "\n".join(lines) + "\n"


def write_reports(ledger, out):
    base, ext = os.path.splitext(out)
    md = base + ".md"
    with open(out, "w") as fh:
        fh.write(report_json(ledger))
    with open(md, "w") as fh:
        fh.write(report_markdown(ledger))
    return out, md
