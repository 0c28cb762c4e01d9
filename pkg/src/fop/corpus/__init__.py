"""Embedded regression corpus: fourteen order-4 operators from the
double-octic tables plus the locally-geometric source operator, with
expected Riemann symbols and exponent-criterion list membership.

Data lives in plain-text files (one ``.op`` expression and one ``.json``
expectation document per entry) so it can be audited independently of
the code.  ``verify`` recomputes the Riemann symbol (and, on request,
the full exponent-criterion verdict) and diffs against expectations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .. import nums
from ..errors import VerificationError
from ..local import RiemannSymbol, fuchs_relation_check, riemann_symbol
from ..opformat import parse
from ..poly import Poly

_IDS = [
    "no2", "no10", "no16", "no21", "no53", "no96", "no100", "no155",
    "no200", "no242", "no246", "no267", "no275", "no276", "ploc",
]

A_LIST = ("no2", "no10", "no16", "no242", "no246")
B_LIST = ("no21", "no53", "no96", "no100", "no155", "no200", "no267", "no275", "no276")


@dataclass
class ExpectedPoint:
    """One column of an expected Riemann symbol."""

    rational: Fraction | None  # None for algebraic and infinity
    minpoly: Poly | None
    at_infinity: bool
    exponents: tuple[Fraction, ...]


@dataclass
class CorpusEntry:
    id: str
    text: str
    assumption_list: str | None  # "A", "B" or None
    expected: list[ExpectedPoint]
    notes: str = ""
    _op: object = field(default=None, repr=False)

    @property
    def operator(self):
        if self._op is None:
            self._op = parse(self.text)
        return self._op


def _data(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text()


def _load(cid: str) -> CorpusEntry:
    doc = json.loads(_data(cid + ".json"))
    text = _data(doc["operator_file"]).strip()
    expected = []
    for row in doc["riemann"]:
        point = row["point"]
        exps = tuple(Fraction(e) for e in row["exponents"])
        if point == "inf":
            expected.append(ExpectedPoint(None, None, True, exps))
        elif isinstance(point, dict):
            mp = Poly([Fraction(c) for c in point["minpoly"]]).monic()
            expected.append(ExpectedPoint(None, mp, False, exps))
        else:
            expected.append(ExpectedPoint(Fraction(point), None, False, exps))
    return CorpusEntry(
        id=doc["id"],
        text=text,
        assumption_list=doc["assumption_list"],
        expected=expected,
        notes=doc.get("notes", ""),
    )


_CACHE: dict[str, CorpusEntry] = {}


def list_ids() -> list[str]:
    return list(_IDS)


def get(cid: str) -> CorpusEntry:
    if cid not in _IDS:
        raise KeyError(f"unknown corpus id {cid!r} (try one of {', '.join(_IDS)})")
    if cid not in _CACHE:
        _CACHE[cid] = _load(cid)
    return _CACHE[cid]


@dataclass
class VerifyReport:
    id: str
    fuchs: tuple
    riemann_ok: bool
    mismatches: list[str]
    ab_ok: bool | None = None
    ab_detail: str = ""

    @property
    def passed(self) -> bool:
        return self.riemann_ok and self.fuchs[2] and self.ab_ok is not False


def _match_symbol(entry: CorpusEntry, rs: RiemannSymbol, prec: int) -> list[str]:
    problems = []
    rows = list(rs.rows)

    def take_all(pred, what, expect_count):
        got = [(p, e) for p, e in rows if pred(p)]
        for item in got:
            rows.remove(item)
        if len(got) != expect_count:
            problems.append(
                f"expected {expect_count} point(s) for {what}, found {len(got)}"
            )
        return got

    def check_exponents(point, exps, expected):
        got = tuple(exps.sorted_values())
        if got != expected:
            problems.append(
                f"{point}: exponents {got} differ from expected {expected}"
            )

    with nums.workprec(prec + nums.GUARD_BITS):
        loc_tol = nums.mpfr(10) ** (-30)
        for exp in entry.expected:
            if exp.at_infinity:
                matched = take_all(lambda p: p.is_infinity(), "inf", 1)
            elif exp.rational is not None:
                matched = take_all(
                    lambda p: p.kind == "rational" and p.value == exp.rational,
                    str(exp.rational),
                    1,
                )
            else:
                matched = take_all(
                    lambda p: p.kind == "algebraic" and p.minpoly is not None
                    and p.minpoly.monic() == exp.minpoly,
                    f"root of {exp.minpoly!r}",
                    exp.minpoly.degree(),
                )
                for point, _ in matched:
                    resid = abs(exp.minpoly.eval(point.as_mpc()))
                    scale = max(nums.mpfr(1), abs(point.as_mpc())) ** exp.minpoly.degree()
                    if resid > loc_tol * scale:
                        problems.append(
                            f"{point}: location residual {nums.nstr(resid, 64)} above 1e-30"
                        )
            for point, exps in matched:
                check_exponents(point, exps, exp.exponents)
    for p, _ in rows:
        problems.append(f"unexpected singular point: {p}")
    return problems


def verify(cid: str, prec: int = nums.DEFAULT_PREC, include_ab: bool = False) -> VerifyReport:
    """Recompute the Riemann symbol (and optionally the assumption-A/B
    verdict) and diff against the stored expectations."""
    entry = get(cid)
    op = entry.operator
    rs = riemann_symbol(op, prec)
    fuchs = fuchs_relation_check(rs)
    mismatches = [] if fuchs[2] else ["Fuchs relation violated (transcription error?)"]
    mismatches += _match_symbol(entry, rs, prec)
    report = VerifyReport(
        id=cid, fuchs=fuchs, riemann_ok=not mismatches, mismatches=mismatches
    )
    if include_ab:
        from ..criteria import global_ab

        status = global_ab(op, prec)
        if entry.assumption_list == "A":
            ok = status.all_a
            detail = f"expected all-A, got all_A={status.all_a}"
        elif entry.assumption_list == "B":
            ok = status.all_b
            detail = f"expected all-B, got all_B={status.all_b}"
        else:
            ok = True
            detail = f"no list expectation (all_A={status.all_a}, all_B={status.all_b})"
        report.ab_ok = ok
        report.ab_detail = detail
    return report


def verify_all(prec: int = nums.DEFAULT_PREC, include_ab: bool = False) -> list[VerifyReport]:
    return [verify(cid, prec, include_ab) for cid in _IDS]


def require_pass(reports: list[VerifyReport]) -> None:
    bad = [r for r in reports if not r.passed]
    if bad:
        lines = []
        for r in bad:
            lines.append(f"{r.id}: " + "; ".join(r.mismatches or [r.ab_detail]))
        raise VerificationError("corpus verification failed:\n" + "\n".join(lines))
