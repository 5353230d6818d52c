"""Parameter admissibility for the paper's well-posedness results.

Each check returns a ``Verdict`` listing every hypothesis as a structured
``Condition`` (lhs, relation, rhs, status). Rational inputs (``int`` or
``Fraction``) are compared exactly; a strict inequality that holds with
equality is reported as BOUNDARY. Float inputs fall back to floating point
with a relative 1e-12 band that is also reported as BOUNDARY.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .errors import InvalidExponent, ThetaOutOfRange

FLOAT_BAND = 1e-12
INF = math.inf

PASS, FAIL, BOUNDARY, SKIPPED = "PASS", "FAIL", "BOUNDARY", "SKIPPED"
NOT_COVERED, INCOMPLETE = "NOT_COVERED", "INCOMPLETE"

RESULTS = (
    "Theorem1",
    "Corollary1",
    "Theorem2",
    "Theorem3",
    "Theorem4",
    "Lemma3",
    "Remark6-low",
    "Remark6-high",
)


def parse_number(text) -> Fraction | float:
    """'3/4' and '2' become exact Fractions; 'inf' and decimals become floats."""
    if isinstance(text, (Fraction, float)):
        return text
    if isinstance(text, int):
        return Fraction(text)
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "oo"):
        return INF
    if "/" in t or t.lstrip("+-").isdigit():
        try:
            return Fraction(t)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse number {text!r}") from exc
    return float(t)


def _exact(x) -> bool:
    return isinstance(x, Rational)


def _inv(p):
    """1/p with 1/inf = 0, exact for rationals."""
    if p is None:
        return None
    if isinstance(p, float) and math.isinf(p):
        return Fraction(0)
    return Fraction(1) / p if _exact(p) else 1.0 / p


def _floor(s):
    return math.floor(s)


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _float(x):
    return None if x is None else float(x)


_RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
}


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: object
    rel: str
    rhs: object
    status: str

    def reevaluate(self) -> str:
        return evaluate(self.lhs, self.rel, self.rhs)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _float(self.lhs),
            "rel": self.rel,
            "rhs": _float(self.rhs),
            "lhs_exact": _fmt(self.lhs),
            "rhs_exact": _fmt(self.rhs),
            "status": self.status,
        }


def evaluate(lhs, rel: str, rhs) -> str:
    if lhs is None or rhs is None:
        return SKIPPED
    ok = _RELATIONS[rel](lhs, rhs)
    finite = not any(isinstance(v, float) and math.isinf(v) for v in (lhs, rhs))
    if _exact(lhs) and _exact(rhs):
        if lhs == rhs and rel in ("<", ">"):
            return BOUNDARY
    elif finite and abs(lhs - rhs) <= FLOAT_BAND * max(1.0, abs(lhs), abs(rhs)):
        return BOUNDARY
    return PASS if ok else FAIL


def _cond(name, lhs, rel, rhs) -> Condition:
    return Condition(name, lhs, rel, rhs, evaluate(lhs, rel, rhs))


@dataclass(frozen=True)
class Verdict:
    name: str
    status: str
    conditions: tuple = ()
    notes: tuple = ()

    @property
    def failed(self) -> Condition | None:
        for want in (FAIL, BOUNDARY):
            for c in self.conditions:
                if c.status == want:
                    return c
        return None

    def to_dict(self) -> dict:
        f = self.failed
        return {
            "name": self.name,
            "status": self.status,
            "failed": None if f is None or self.status == PASS else f.to_dict(),
            "conditions": [c.to_dict() for c in self.conditions],
            "notes": list(self.notes),
        }


def _verdict(name, conditions, notes=()) -> Verdict:
    statuses = [c.status for c in conditions]
    if FAIL in statuses:
        status = FAIL
    elif BOUNDARY in statuses:
        status = BOUNDARY
    elif SKIPPED in statuses:
        status = INCOMPLETE
    else:
        status = PASS
    return Verdict(name, status, tuple(conditions), tuple(notes))


def _not_covered(name, why) -> Verdict:
    return Verdict(name, NOT_COVERED, (), (why,))


@dataclass(frozen=True)
class ProblemParams:
    n: int
    k: object = None
    s: object = None
    p: object = None
    q: object = None
    theta: object = None
    mu: object = None
    r: object = None
    gamma: object = None

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise InvalidExponent(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.theta is not None and not 0 <= self.theta <= 1:
            raise ThetaOutOfRange(f"theta must lie in [0, 1], got {self.theta}")
        if self.k is not None and not self.k > 0:
            raise InvalidExponent(f"k must be positive, got {self.k}")
        for name in ("p", "q", "gamma"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise InvalidExponent(f"{name} must be >= 1, got {v}")

    @classmethod
    def parse(cls, n, **kw) -> "ProblemParams":
        return cls(int(n), **{k: None if v is None else parse_number(v) for k, v in kw.items()})

    def to_dict(self) -> dict:
        return {k: _fmt(getattr(self, k)) if k != "n" else self.n for k in self.__dataclass_fields__}


def _all(*xs) -> bool:
    return all(x is not None for x in xs)


def _bracket(s):
    """[s] as floor, with a note for negative s (the paper leaves it undefined)."""
    if s is None:
        return None, ()
    note = ("[s] read as floor(s) for s < 0 (undefined in the paper)",) if s < 0 else ()
    return _floor(s), note


def alpha_delta(theta, n: int, p):
    """Eq. (1.9): alpha = theta(n+1)(1/2 - 1/p), delta = theta(n-1)(1/2 - 1/p)."""
    if not 0 <= theta <= 1:
        raise ThetaOutOfRange(f"theta must lie in [0, 1], got {theta}")
    if p < 2:
        raise InvalidExponent(f"Eq. (1.9) needs p >= 2, got {p}")
    half = Fraction(1, 2) - _inv(p) if _exact(theta) else 0.5 - float(_inv(p))
    return theta * (n + 1) * half, theta * (n - 1) * half


def _ad(P: ProblemParams):
    if _all(P.theta, P.p) and P.p >= 2:
        return alpha_delta(P.theta, P.n, P.p)
    return None, None


def _sub(a, b):
    return None if a is None or b is None else a - b


def _k_vs_bracket(P, shift=0):
    s = P.s if shift == 0 or P.s is None else P.s - shift
    b, note = _bracket(s)
    label = "k >= [s]" if shift == 0 else "k >= [s - r]"
    return _cond(label, P.k, ">=", b), note


def _q_conj_inv(q):
    """1/q' = 1 - 1/q."""
    return None if q is None else 1 - _inv(q)


def _mul(*xs):
    if any(x is None for x in xs):
        return None
    out = 1
    for x in xs:
        out = out * x
    return out


def _div(a, b):
    if a is None or b is None:
        return None
    if b == 0:
        return INF if a > 0 else -INF
    if _exact(a) and _exact(b):
        return Fraction(a) / b
    return a / b


def _s_window(P, lowers, upper, label):
    conds = [_cond(f"{label} lower bound {i + 1} < s", lo, "<", P.s) for i, lo in enumerate(lowers)]
    conds.append(_cond(f"s < {label} upper bound", P.s, "<", upper))
    return conds


def check_theorem1(P: ProblemParams) -> Verdict:
    n, q, k = P.n, P.q, P.k
    if q is None:
        return _verdict("Theorem1", [_cond("q given", None, "==", None)])
    if q == 2:
        return _not_covered("Theorem1", "q = 2 lies between the cases (1.3) q < 2 and (1.4) q > 2")
    kb, notes = _k_vs_bracket(P)
    iq = _inv(q)
    conds = [
        kb,
        _cond("2 < p", 2, "<", P.p),
        _cond("p < inf", P.p, "<", INF if P.p is not None else None),
        _cond("1 <= q", 1, "<=", q),
        _cond("q < inf", q, "<", INF),
    ]
    notes = list(notes)
    notes.append("hypothesis taken as stated: (u0, u1) in M^s_{2,q} x M^{s-1}_{2,q}; the proof's (3.11) uses M^s_{p,q}")
    if q < 2:
        g = n * (iq - Fraction(1, 2))
        conds.append(_cond("n(1/q - 1/2) < 1", g, "<", 1))
        lo1 = 1 + Fraction(n, 2) - n * iq
        lo2 = Fraction(n, 2) - _div(1 - g, k) if k is not None else None
        conds += _s_window(P, [lo1, lo2], Fraction(n, 2), "(1.3)")
    else:
        g = n * (Fraction(1, 2) - iq)
        conds.append(_cond("n(1/2 - 1/q) < 1", g, "<", 1))
        nqc = n * _q_conj_inv(q)
        lo2 = nqc - _div(1 - g, k) if k is not None else None
        conds += _s_window(P, [1, lo2], nqc, "(1.4)")
    return _verdict("Theorem1", conds, notes)


def check_corollary1(P: ProblemParams) -> Verdict:
    n, p, q, k = P.n, P.p, P.q, P.k
    if p is not None and p < 2:
        return _not_covered("Corollary1", "stated for 2 <= p < inf (see Theorem2 for p <= 2)")
    kb, notes = _k_vs_bracket(P)
    ip = _inv(p)
    pc = _div(p, _sub(p, 1)) if p is not None and not math.isinf(p) else (1 if p is not None else None)
    conds = [
        kb,
        _cond("p < inf", p, "<", INF if p is not None else None),
        _cond("1 <= q", 1, "<=", q),
        _cond("q < inf", q, "<", INF if q is not None else None),
        _cond("p' <= q", pc, "<=", q),
        _cond("q <= p", q, "<=", p),
        _cond("(1 - 2/p)n < 1", _mul(n, _sub(1, _mul(2, ip))), "<", 1),
    ]
    iq = _inv(q)
    nqc = _mul(n, _q_conj_inv(q))
    lo1 = _sub(1, _mul(n, _sub(iq, ip)))
    lo2 = _sub(nqc, _div(1, k))
    up = _sub(nqc, _div(_mul(n, _sub(1, _mul(2, ip))), k))
    conds += _s_window(P, [lo1, lo2], up, "(1.6)")
    return _verdict("Corollary1", conds, notes)


def check_theorem2(P: ProblemParams) -> Verdict:
    n, p, q, k = P.n, P.p, P.q, P.k
    if p is not None and p > 2:
        return _not_covered("Theorem2", "stated for 1 < p <= 2")
    kb, notes = _k_vs_bracket(P)
    notes = list(notes)
    ip = _inv(p)
    pc = None if p is None or p == 1 else _div(p, p - 1)
    ipc = None if ip is None else 1 - ip
    if p == 2:
        notes.append("p = 2: q in [p, p'] forces q = 2 (Remark 2); see Remark6-low/high for q != 2")
    conds = [
        kb,
        _cond("1 < p", 1, "<", p),
        _cond("1 <= q", 1, "<=", q),
        _cond("q < inf", q, "<", INF if q is not None else None),
        _cond("p <= q", p, "<=", q),
        _cond("q <= p'", q, "<=", pc),
        _cond("(2/p - 1)n < 1", _mul(n, _sub(_mul(2, ip), 1)), "<", 1),
    ]
    iq = _inv(q)
    nqc = _mul(n, _q_conj_inv(q))
    lo1 = _sub(1, _mul(n, _sub(iq, ipc)))
    lo2 = _sub(nqc, _div(1, k))
    up = _sub(nqc, _div(_mul(n, _sub(1, _mul(2, ipc))), k))
    conds += _s_window(P, [lo1, lo2], up, "(1.7)")
    return _verdict("Theorem2", conds, notes)


def _theorem3_k_threshold(n: int, theta):
    """4/theta + 2/n; infinite at theta = 0."""
    return INF if theta == 0 else _div(4, theta) + Fraction(2, n)


def check_theorem3(P: ProblemParams) -> Verdict:
    n, p, q, k, th, g = P.n, P.p, P.q, P.k, P.theta, P.gamma
    if p is not None and p < 2:
        return _not_covered("Theorem3", "stated for 2 <= p < inf")
    kb, notes = _k_vs_bracket(P)
    notes = list(notes) + [
        "'q in [gamma'.gamma]' read as q in [gamma', gamma]",
        "gamma >= max(2, 2/delta) enforced (Lemma 6 form; Theorem 3 states gamma >= 2/delta)",
    ]
    alpha, delta = _ad(P)
    ip = _inv(p)
    k_rhs = None if th is None else _theorem3_k_threshold(n, th)
    conds = [
        _cond("k > 4/theta + 2/n", k, ">", k_rhs),
        kb,
        _cond("p < inf", p, "<", INF if p is not None else None),
        _cond("1 <= q", 1, "<=", q),
        _cond("q < inf", q, "<", INF if q is not None else None),
    ]
    pc = None if p is None else (1 if math.isinf(p) else _div(p, p - 1))
    conds += [_cond("p' <= q", pc, "<=", q), _cond("q <= p", q, "<=", p)]
    conds.append(_cond("(1 - 2/p)n < 1 - alpha", _mul(n, _sub(1, _mul(2, ip))), "<", _sub(1, alpha)))
    iq = _inv(q)
    nqc = _mul(n, _q_conj_inv(q))
    half_a = _div(alpha, 2)
    lo1 = _sub(_sub(1, half_a), _mul(n, _sub(iq, ip)))
    lo2 = None if not _all(nqc, k, alpha) else nqc - _div(1 - alpha, k) + half_a
    up = None if not _all(nqc, k, ip, alpha) else nqc - _div(n * (1 - 2 * ip), k) + half_a
    conds += _s_window(P, [lo1, lo2], up, "(1.8)")
    gc = None if g is None else _div(g, g - 1) if g != 1 else INF
    two_over_delta = None if delta is None else (INF if delta == 0 else _div(2, delta))
    conds += [
        _cond("gamma >= 2", g, ">=", 2),
        _cond("gamma >= 2/delta", g, ">=", two_over_delta),
        _cond("gamma' <= q", gc, "<=", q),
        _cond("q <= gamma", q, "<=", g),
    ]
    return _verdict("Theorem3", conds, notes)


def theorem4_window(n: int, theta, which: str = "statement"):
    """Bounds [lo, hi) on (1 - 2/p) for Theorem 4.

    ``statement``: [1/(2 theta(n-1)), 1/(theta(n-1))) as in the theorem.
    ``proof``: lower end 1/(4 theta(n-1)), from '4(1-2/p) >= 1/2' at the end of the proof.
    """
    if which not in ("statement", "proof"):
        raise ValueError("window must be 'statement' or 'proof'")
    d = theta * (n - 1)
    if d == 0:
        return INF, INF
    one = Fraction(1) if _exact(d) else 1.0
    lo = one / (2 * d) if which == "statement" else one / (4 * d)
    return lo, one / d


def mu_floor(n: int, theta, which: str = "statement"):
    """Smallest admissible lower bound 2n(1 - 2/p) over the p-window."""
    lo, _ = theorem4_window(n, theta, which)
    return 2 * n * lo


def mu_upper(P: ProblemParams):
    alpha, _ = _ad(P)
    if not _all(P.s, P.q, alpha):
        return None
    return 2 * (P.s + P.n * _inv(P.q)) + 1 - 2 * alpha - P.n


def mz_mu_range(s):
    """Miao-Zhang Besov-space range 3/2(s+1) <= mu <= 2(s+1) quoted in Remark 5 (n = 3)."""
    return Fraction(3, 2) * (s + 1), 2 * (s + 1)


def check_theorem4(P: ProblemParams, p_window: str = "statement") -> Verdict:
    n, p, q, th = P.n, P.p, P.q, P.theta
    notes = [
        f"p-window taken from the {p_window}; statement gives lower end 1/(2 theta(n-1)), "
        "the closing computation of the proof gives 1/(4 theta(n-1))",
        "Hartree term read as (|x|^-mu * |u|^2)u (proof of Theorem 4)",
    ]
    if n != 3:
        notes.append("Theorem 4 is stated in R x R^3; evaluated here for general n")
    w = None if p is None else _sub(1, _mul(2, _inv(p)))
    lo = hi = None
    if th is not None:
        lo, hi = theorem4_window(n, th, p_window)
    conds = [
        _cond("1 < q", 1, "<", q),
        _cond("q < inf", q, "<", INF if q is not None else None),
        _cond("s >= 0", P.s, ">=", 0),
        _cond("(1 - 2/p) >= window lower end", w, ">=", lo),
        _cond("(1 - 2/p) < window upper end", w, "<", hi),
        _cond("2n(1 - 2/p) <= mu", _mul(2 * n, w), "<=", P.mu),
        _cond("mu <= 2(s + n/q) + 1 - 2 alpha - n", P.mu, "<=", mu_upper(P)),
    ]
    return _verdict("Theorem4", conds, notes)


def check_lemma3(P: ProblemParams) -> Verdict:
    n, p, q, k, r = P.n, P.p, P.q, P.k, P.r
    if p is not None and p < 2:
        return _not_covered("Lemma3", "stated for 2 <= p < inf (Remark 7 covers p < 2 by duality)")
    if p == 2 and q is not None and q != 2:
        where = "Remark6-low (2.15)" if q < 2 else "Remark6-high (2.16)"
        return _not_covered("Lemma3", f"p = 2 with q != 2 is routed to {where}")
    kb, notes = _k_vs_bracket(P, shift=r) if r is not None else (_cond("k >= [s - r]", P.k, ">=", None), ())
    ip = _inv(p)
    pc = None if p is None else (1 if math.isinf(p) else _div(p, p - 1))
    conds = [
        kb,
        _cond("p < inf", p, "<", INF if p is not None else None),
        _cond("1 <= q", 1, "<=", q),
        _cond("q < inf", q, "<", INF if q is not None else None),
        _cond("p' <= q", pc, "<=", q),
        _cond("q <= p", q, "<=", p),
        _cond("(1 - 2/p)n < r", _mul(n, _sub(1, _mul(2, ip))), "<", r),
    ]
    iq = _inv(q)
    nqc = _mul(n, _q_conj_inv(q))
    lo1 = _sub(r, _mul(n, _sub(iq, ip)))
    lo2 = _sub(nqc, _div(r, k))
    up = _sub(nqc, _div(_mul(n, _sub(1, _mul(2, ip))), k))
    conds += _s_window(P, [lo1, lo2], up, "(2.9)")
    return _verdict("Lemma3", conds, notes)


def _remark6(P: ProblemParams, high: bool) -> Verdict:
    name = "Remark6-high" if high else "Remark6-low"
    n, p, q, k, r = P.n, P.p, P.q, P.k, P.r
    if p is not None and p != 2:
        return _not_covered(name, "Remark 6 concerns p = 2 only")
    if q is not None and ((q <= 2) if high else (q >= 2)):
        return _not_covered(name, "needs q > 2" if high else "needs q < 2")
    kb, notes = _k_vs_bracket(P, shift=r) if r is not None else (_cond("k >= [s - r]", P.k, ">=", None), ())
    conds = [kb, _cond("p given", p, "==", 2 if p is not None else None), _cond("1 <= q", 1, "<=", q)]
    iq = _inv(q)
    if not high:
        g = _mul(n, _sub(iq, Fraction(1, 2)))
        conds.append(_cond("n(1/q - 1/2) < r", g, "<", r))
        lo1 = None if not _all(r, iq) else r + Fraction(n, 2) - n * iq
        lo2 = None if not _all(r, g, k) else Fraction(n, 2) - _div(r - g, k)
        conds += _s_window(P, [lo1, lo2], Fraction(n, 2), "(2.15)")
    else:
        g = _mul(n, _sub(Fraction(1, 2), iq))
        conds.append(_cond("n(1/2 - 1/q) < r", g, "<", r))
        nqc = _mul(n, _q_conj_inv(q))
        lo2 = None if not _all(nqc, r, g, k) else nqc - _div(r - g, k)
        conds += _s_window(P, [r, lo2], nqc, "(2.16)")
    return _verdict(name, conds, notes)


def check_remark6_low(P: ProblemParams) -> Verdict:
    return _remark6(P, high=False)


def check_remark6_high(P: ProblemParams) -> Verdict:
    return _remark6(P, high=True)


CHECKS = {
    "Theorem1": check_theorem1,
    "Corollary1": check_corollary1,
    "Theorem2": check_theorem2,
    "Theorem3": check_theorem3,
    "Theorem4": check_theorem4,
    "Lemma3": check_lemma3,
    "Remark6-low": check_remark6_low,
    "Remark6-high": check_remark6_high,
}


@dataclass(frozen=True)
class AdmissibilityReport:
    params: ProblemParams
    alpha: object
    delta: object
    results: tuple
    derived: dict = field(default_factory=dict)

    def result(self, name: str) -> Verdict:
        for v in self.results:
            if v.name == name:
                return v
        raise KeyError(name)

    def exit_code(self) -> int:
        statuses = {v.status for v in self.results}
        if PASS in statuses:
            return 0
        if statuses & {FAIL, NOT_COVERED, BOUNDARY}:
            return 2
        return 0

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "alpha": _fmt(self.alpha),
            "delta": _fmt(self.delta),
            "derived": {k: _fmt(v) if not isinstance(v, (list, tuple)) else [_fmt(x) for x in v] for k, v in self.derived.items()},
            "results": [v.to_dict() for v in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def check_all(P: ProblemParams, p_window: str = "statement") -> AdmissibilityReport:
    alpha, delta = _ad(P)
    results = []
    for name, fn in CHECKS.items():
        results.append(fn(P, p_window) if name == "Theorem4" else fn(P))
    n = P.n
    derived = {}
    if n > 1:
        derived["rho_beta"] = Fraction(n + 1, n - 1)
        derived["beta_range"] = (Fraction(0), Fraction(n + 1, 2 * n - 2))
    if P.theta is not None:
        derived["mu_floor_statement"] = mu_floor(n, P.theta, "statement")
        derived["mu_floor_proof"] = mu_floor(n, P.theta, "proof")
        derived["k_threshold_theorem3"] = _theorem3_k_threshold(n, P.theta)
    mu_hi = mu_upper(P)
    if mu_hi is not None:
        derived["mu_upper"] = mu_hi
    if P.s is not None:
        derived["mz_mu_range"] = mz_mu_range(P.s)
    return AdmissibilityReport(P, alpha, delta, tuple(results), derived)


def sweep(grid: dict, n_values=None, p_window: str = "statement"):
    """Cartesian sweep; ``grid`` maps parameter names to lists of values.

    Yields ``(params, report)`` in lexicographic order of the listed values.
    """
    names = sorted(grid)
    for combo in itertools.product(*(grid[k] for k in names)):
        kw = dict(zip(names, combo))
        n = kw.pop("n")
        P = ProblemParams.parse(n, **kw)
        yield P, check_all(P, p_window)


def write_sweep_csv(path, rows) -> None:
    cols = list(ProblemParams.__dataclass_fields__) + list(RESULTS)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for P, rep in rows:
            d = P.to_dict()
            w.writerow([d[c] if c in d else "" for c in cols[: len(d)]] + [rep.result(r).status for r in RESULTS])
