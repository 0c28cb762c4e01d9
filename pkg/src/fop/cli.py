"""Command-line frontend.

Operators are given inline (expression text), as ``@path`` (text or JSON
file) or as ``-`` (JSON document on stdin, as produced by the other
subcommands).  Machine output is deterministic JSON: identical inputs
and configuration give byte-identical bytes.

Exit codes: 0 success, 2 parse/usage error, 3 mathematical domain error
(irregular singularity, singular twist point, ...), 4 numerical failure,
5 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__, corpus, nums
from .criteria import (
    classify_shift,
    global_ab,
    locally_geometric_check,
    twist_pipeline,
)
from .errors import (
    FopError,
    MathDomainError,
    NumericError,
    ParseError,
    SchemaError,
    VerificationError,
)
from .local import fuchs_relation_check, riemann_symbol
from .monodromy import jordan_classify, monodromy_matrices
from .operators import Moebius, moebius_pullback, shift
from .opformat import from_json, parse, render, to_json
from .symplectic import DEFAULT_SEED, invariant_form_space


@dataclass
class RunConfig:
    precision_bits: int = nums.DEFAULT_PREC
    truncation_k: int = 40
    max_root_order: int = 120
    fmt: str = "text"
    seed: int = DEFAULT_SEED

    def validate(self):
        if self.precision_bits < nums.MIN_PREC:
            raise MathDomainError(f"precision must be at least {nums.MIN_PREC} bits")


def _env_precision() -> int:
    raw = os.environ.get("FOP_PRECISION_BITS")
    if raw is None:
        return nums.DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise MathDomainError(f"FOP_PRECISION_BITS={raw!r} is not an integer")


def _resolve_operator(spec: str):
    if spec == "-":
        text = sys.stdin.read()
    elif spec.startswith("@"):
        with open(spec[1:], "r") as fh:
            text = fh.read()
    else:
        text = spec
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        if isinstance(doc, dict) and "operator" in doc:
            doc = doc["operator"]
        return from_json(doc)
    return parse(text)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {text!r}") from exc


def _emit(doc, cfg: RunConfig, text_fallback=None):
    if cfg.fmt == "json" or text_fallback is None:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(text_fallback + "\n")


def _envelope(cfg: RunConfig, payload: dict) -> dict:
    return {
        "tool": "fop",
        "version": __version__,
        "precision_bits": cfg.precision_bits,
        "seed": cfg.seed,
        **payload,
    }


def _cmd_parse(args, cfg):
    op = _resolve_operator(args.operator)
    _emit(to_json(op), cfg, render(op))
    return 0


def _cmd_riemann(args, cfg):
    op = _resolve_operator(args.operator)
    rs = riemann_symbol(op, cfg.precision_bits)
    lhs, rhs, ok = fuchs_relation_check(rs)
    if cfg.fmt == "json":
        doc = _envelope(cfg, {
            "riemann": [
                {"point": str(p), "exponents": [str(v) for v in e.sorted_values()]}
                for p, e in rs.rows
            ],
            "apparent": [str(p) for p in rs.apparent],
            "fuchs": {"lhs": str(lhs), "rhs": str(rhs), "ok": ok},
        })
        _emit(doc, cfg)
    else:
        lines = [str(rs)]
        if rs.apparent:
            lines.append("apparent (ordinary) leading-coefficient zeros: "
                         + ", ".join(str(p) for p in rs.apparent))
        lines.append(f"exponent sum {lhs} = (s-2)n(n-1)/2 = {rhs}: {'ok' if ok else 'VIOLATED'}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_shift(args, cfg):
    op = _resolve_operator(args.operator)
    out = shift(op, _frac(args.alpha))
    _emit(to_json(out), cfg, render(out))
    return 0


def _cmd_moebius(args, cfg):
    op = _resolve_operator(args.operator)
    parts = args.map.split(",")
    if len(parts) != 4:
        raise ParseError("--map expects a,b,c,d")
    mu = Moebius(*[_frac(p) for p in parts])
    out = moebius_pullback(op, mu)
    _emit(to_json(out), cfg, render(out))
    return 0


def _cmd_monodromy(args, cfg):
    op = _resolve_operator(args.operator)
    md = monodromy_matrices(op, cfg.precision_bits)
    jordan = {m.point.key(): jordan_classify(m, cfg.max_root_order) for m in md.matrices}
    if cfg.fmt == "json":
        doc = md.to_doc()
        doc["jordan"] = [
            {"point": str(m.point), **jordan[m.point.key()].to_doc()}
            for m in md.matrices
        ]
        _emit(_envelope(cfg, doc), cfg)
    else:
        lines = [f"base point: {md.base[0]} + ({md.base[1]})i"]
        for m in md.matrices:
            jd = jordan[m.point.key()]
            blocks = ", ".join(
                f"e^(2 pi i {e})x{sizes}" for e, _, sizes in jd.blocks
            )
            lines.append(f"{str(m.point):>12}: order N = {jd.order}, blocks {blocks}, "
                         f"err <= {nums.nstr(m.err_estimate, 16)}")
        lines.append(f"ordered-product residual: {nums.nstr(md.product_residual, 16)}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_invariant_form(args, cfg):
    op = _resolve_operator(args.operator)
    md = monodromy_matrices(op, cfg.precision_bits)
    space = invariant_form_space(
        md.finite(), prec=cfg.precision_bits, seed=cfg.seed
    )
    if cfg.fmt == "json":
        _emit(_envelope(cfg, {"invariant_forms": space.to_doc()}), cfg)
    else:
        sys.stdout.write(
            f"dimension {space.dimension}, verdict {space.verdict}, "
            f"max |pfaffian| {space.max_abs_pfaffian:.3e}\n"
        )
    return 0


def _cmd_assumptions(args, cfg):
    op = _resolve_operator(args.operator)
    status = global_ab(op, cfg.precision_bits)
    if cfg.fmt == "json":
        _emit(_envelope(cfg, {"assumptions": status.to_doc()}), cfg)
    else:
        lines = []
        for p in status.points:
            exps = ",".join(str(e) for e in p.exponents)
            extra = f", N={p.n_local}" if p.n_local is not None else ""
            lines.append(f"{str(p.point):>12}: ({exps}) k={p.k}{extra} "
                         f"A={'yes' if p.satisfies_a else 'no'} B={'yes' if p.satisfies_b else 'no'}")
        lines.append(f"all A: {status.all_a}; all B: {status.all_b}; "
                     f"infinite index implied: {status.infinite_index_implied} (formal)")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_classify_shift(args, cfg):
    op = _resolve_operator(args.operator)
    evidence = "assume_dense" if args.assume_dense else "auto"
    verdict = classify_shift(op, _frac(args.alpha), evidence, cfg.precision_bits)
    if cfg.fmt == "json":
        _emit(_envelope(cfg, {"shift_class": verdict.to_doc()}), cfg)
    else:
        sys.stdout.write(
            f"alpha = {verdict.alpha}: {verdict.klass}"
            + (" (conditional on Zariski density)" if verdict.conditional else "")
            + "\n"
        )
    return 0


def _cmd_locally_geometric(args, cfg):
    op = _resolve_operator(args.operator)
    rep = locally_geometric_check(op, cfg.precision_bits)
    if cfg.fmt == "json":
        _emit(_envelope(cfg, {"locally_geometric": rep.to_doc()}), cfg)
    else:
        lines = []
        for p in rep.points:
            lines.append(
                f"{str(p.point):>12}: quasi-unipotent={p.quasi_unipotent} "
                f"certificate={'pass' if p.certificate.passes else 'fail'}"
            )
        lines.append(f"locally geometric: {rep.locally_geometric}")
        lines.append(f"global invariant forms: {rep.global_form_verdict} "
                     f"(dim {rep.global_form_dimension})")
        lines.append(f"geometric obstruction: {rep.geometric_obstruction}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_twist(args, cfg):
    op = _resolve_operator(args.operator)
    twisted, report = twist_pipeline(
        op, args.k, _frac(args.point), cfg.precision_bits
    )
    doc = {"operator": to_json(twisted), "report": report.to_doc()}
    if cfg.fmt == "json":
        _emit(doc, cfg)
    else:
        sys.stdout.write(render(twisted) + "\n")
        sys.stdout.write(json.dumps(report.to_doc(), indent=2) + "\n")
    return 0


def _cmd_corpus(args, cfg):
    if args.action == "list":
        for cid in corpus.list_ids():
            sys.stdout.write(cid + "\n")
        return 0
    if args.action == "get":
        if not args.id:
            raise ParseError("corpus get needs an id")
        entry = corpus.get(args.id)
        if cfg.fmt == "json":
            _emit({"id": entry.id, "operator": to_json(entry.operator),
                   "assumption_list": entry.assumption_list, "notes": entry.notes}, cfg)
        else:
            sys.stdout.write(entry.text + "\n")
        return 0
    # verify
    ids = [args.id] if args.id else corpus.list_ids()
    reports = [corpus.verify(cid, cfg.precision_bits, include_ab=args.full) for cid in ids]
    failed = False
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        extra = f" [{r.ab_detail}]" if args.full else ""
        sys.stdout.write(f"{r.id:6s} {status}{extra}\n")
        for m in r.mismatches:
            sys.stdout.write(f"    {m}\n")
        failed = failed or not r.passed
    if failed:
        raise VerificationError("corpus verification failed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fop",
        description="Workbench for Fuchsian differential operators "
        "(exponent shifts, Riemann symbols, numerical monodromy, invariant forms).",
    )
    ap.add_argument("--precision-bits", type=int, default=None,
                    help="working precision in bits (>= 64; env FOP_PRECISION_BITS)")
    ap.add_argument("--truncation", type=int, default=40, help="series truncation order")
    ap.add_argument("--max-order", type=int, default=120,
                    help="largest admissible root-of-unity order when snapping eigenvalues")
    ap.add_argument("--format", choices=("text", "json"), default=None)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help="seed for the rational sampling in form-space verdicts")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, default_fmt="text", **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=fn, default_fmt=default_fmt)
        return p

    p = add("parse", _cmd_parse, "json", help="canonicalize an operator expression")
    p.add_argument("operator")
    p = add("riemann", _cmd_riemann, help="singular points and local exponents")
    p.add_argument("operator")
    p = add("shift", _cmd_shift, "json", help="shift local exponents at 0")
    p.add_argument("operator")
    p.add_argument("--alpha", required=True)
    p = add("moebius", _cmd_moebius, "json", help="pullback along (a t + b)/(c t + d)")
    p.add_argument("operator")
    p.add_argument("--map", required=True)
    p = add("monodromy", _cmd_monodromy, help="monodromy generators and Jordan data")
    p.add_argument("operator")
    p = add("invariant-form", _cmd_invariant_form, help="monodromy-invariant alternating forms")
    p.add_argument("operator")
    p = add("assumptions", _cmd_assumptions, help="exponent-gap criteria per point")
    p.add_argument("operator")
    p = add("classify-shift", _cmd_classify_shift, help="effect of a shift on the symplectic structure")
    p.add_argument("operator")
    p.add_argument("--alpha", required=True)
    p.add_argument("--assume-dense", action="store_true")
    p = add("locally-geometric", _cmd_locally_geometric, help="local geometry certificates and global form verdict")
    p.add_argument("operator")
    p = add("twist", _cmd_twist, "json", help="odd quadratic twist at an ordinary point")
    p.add_argument("operator")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--point", required=True)
    p = add("corpus", _cmd_corpus, help="embedded regression corpus")
    p.add_argument("action", choices=("list", "get", "verify"))
    p.add_argument("id", nargs="?")
    p.add_argument("--full", action="store_true",
                   help="also recompute assumption-list membership (slower)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        cfg = RunConfig(
            precision_bits=args.precision_bits
            if args.precision_bits is not None
            else _env_precision(),
            truncation_k=args.truncation,
            max_root_order=args.max_order,
            fmt=args.format if args.format is not None else args.default_fmt,
            seed=args.seed,
        )
        cfg.validate()
        return args.func(args, cfg)
    except (ParseError, SchemaError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error: malformed JSON input: {exc}\n")
        return 2
    except MathDomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except NumericError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except VerificationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 5


if __name__ == "__main__":
    sys.exit(main())
