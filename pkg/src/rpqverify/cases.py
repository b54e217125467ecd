"""Identity cases: one identity instance under one reading, checked at several sample points."""
from dataclasses import dataclass, field

from .errors import DomainError, FractionalPowerError, PoleError, SingularError
from .module import Window, op_equal_on_window
from .rational import RATIONAL_TYPES
from .scalars import is_positive, make_sample_point

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"


class Skip(Exception):
    """Raised by a builder when the instance is outside its guard conditions."""


@dataclass
class IdentityCase:
    family: str
    params: dict
    reading: str
    verdict: str
    designated: bool = True
    witness: dict = None
    reason: str = None
    points: list = field(default_factory=list)
    inconsistent: bool = False
    extra: dict = None

    def key(self):
        return (self.family, _canon(self.params), self.reading)

    def to_json(self):
        doc = {
            "family": self.family,
            "params": {k: _jsonable(v) for k, v in sorted(self.params.items())},
            "convention": self.reading,
            "designated": self.designated,
            "verdict": self.verdict,
            "points": list(self.points),
        }
        if self.witness is not None:
            doc["witness"] = self.witness
        if self.reason is not None:
            doc["reason"] = self.reason
        if self.inconsistent:
            doc["inconsistent"] = True
        if self.extra:
            doc["extra"] = {k: _jsonable(v) for k, v in sorted(self.extra.items())}
        return doc


def _jsonable(v):
    if isinstance(v, RATIONAL_TYPES):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items())}
    return v


def _canon(params):
    return tuple(sorted((k, str(_jsonable(v))) for k, v in params.items()))


_SINGULAR = (PoleError, SingularError, ZeroDivisionError)


def check_at_point(build, sp, window):
    """Run one builder at one sample point.

    ``build(sp)`` returns (lhs, rhs) operators, or (lhs, rhs, window) to
    override the comparison window.  Returns (verdict, witness, reason).
    """
    try:
        out = build(sp)
        if len(out) == 3:
            lhs, rhs, window = out
        else:
            lhs, rhs = out
        res = op_equal_on_window(lhs, rhs, window)
    except Skip as exc:
        return SKIPPED, None, str(exc)
    except FractionalPowerError as exc:
        return SKIPPED, None, "fractional power: %s" % exc
    except _SINGULAR as exc:
        return SKIPPED, None, "singular: %s" % (exc or type(exc).__name__)
    if res:
        return PASS, None, None
    return FAIL, res.to_json(), None


def run_case(family, params, reading, build, points, window=Window(), designated=True):
    verdicts = []
    first_fail = None
    reason = None
    for sp in points:
        v, wit, why = check_at_point(build, sp, window)
        verdicts.append(v)
        if v == FAIL and first_fail is None:
            first_fail = dict(wit, point=sp.label())
        if v == SKIPPED and reason is None:
            reason = why
    distinct = set(verdicts)
    case = IdentityCase(family, dict(params), reading, verdicts[0] if verdicts else SKIPPED,
                        designated=designated, points=[sp.label() for sp in points])
    if len(distinct) > 1:
        # a Laurent identity cannot hold at some generic points and fail at others
        case.inconsistent = True
        case.verdict = FAIL if FAIL in distinct else SKIPPED
        case.reason = "point-dependent verdicts: %s" % ",".join(verdicts)
    if case.verdict == FAIL:
        case.witness = first_fail
    if case.verdict == SKIPPED:
        case.reason = case.reason or reason
    return case


def sample_points(seed, rho, count, presets=(), screen=True):
    """count points from ``seed``; points where some preset has [n] <= 0 (n <= 8) are replaced.

    Returns (points, resampled) where resampled counts the screened-out draws.
    """
    if count < 1:
        raise DomainError("need at least one sample point")
    pts = []
    resampled = 0
    idx = 0
    while len(pts) < count:
        sp = make_sample_point(seed * 1000 + idx, rho)
        idx += 1
        if any(sp == other for other in pts):
            continue
        if screen and not all(is_positive(p, sp) for p in presets):
            resampled += 1
            continue
        pts.append(sp)
    return pts, resampled


def run_scalar_case(family, params, reading, check, points, designated=True):
    """Like run_case for checks that return None (holds) or a witness dict."""
    verdicts, first_fail, reason = [], None, None
    for sp in points:
        try:
            wit = check(sp)
        except Skip as exc:
            verdicts.append(SKIPPED)
            reason = reason or str(exc)
            continue
        except _SINGULAR as exc:
            verdicts.append(SKIPPED)
            reason = reason or "singular: %s" % exc
            continue
        if wit is None:
            verdicts.append(PASS)
        else:
            verdicts.append(FAIL)
            if first_fail is None:
                first_fail = dict(_jsonable(wit), point=sp.label())
    case = IdentityCase(family, dict(params), reading, verdicts[0] if verdicts else SKIPPED,
                        designated=designated, points=[sp.label() for sp in points])
    if len(set(verdicts)) > 1:
        case.inconsistent = True
        case.verdict = FAIL if FAIL in verdicts else SKIPPED
        case.reason = "point-dependent verdicts: %s" % ",".join(verdicts)
    if case.verdict == FAIL:
        case.witness = first_fail
    if case.verdict == SKIPPED:
        case.reason = case.reason or reason
    return case
