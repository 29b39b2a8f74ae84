"""Command-line front end.

Exit codes: 0 success / proved / member / no violations; 1 usage or input
error; 2 unknown; 3 refuted / not a member / violations found.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .algebra import AlgebraError, FiniteAlgebra
from .catalog import CatalogError, parse_tag
from .congruence import DEFAULT_CONGRUENCE_LIMIT, CongruenceLimitError
from .fileio import FormatError, bundled_algebra, bundled_names, format_algebra, read_algebra, read_variety
from .polar import classify_polarization, find_polar_terms, Polarization
from .product import h_closure_probe, member, sigma_w
from .replica import class_structure, describe_witness, replica_congruence, rho0_bounded, rho0_profile
from .terms import SignatureError, TermSyntaxError, format_term, parse_identity, parse_term, pretty
from .theorem import ChainError, build_chain_terms, chain_from_witnesses, check_theorem_hypotheses, search_fg, verify_chain
from .variety import (
    DEFAULT_MODEL_BOUND,
    Status,
    VarietyError,
    VarietySpec,
    catalog_variety,
    decide_identity,
    is_term_idempotent,
    normal_form,
)

OK, USAGE, UNKNOWN, REFUTED = 0, 1, 2, 3

_STATUS_CODE = {Status.PROVED: OK, Status.UNKNOWN: UNKNOWN, Status.REFUTED: REFUTED}

_INPUT_ERRORS = (
    AlgebraError,
    CatalogError,
    ChainError,
    CongruenceLimitError,
    FileNotFoundError,
    FormatError,
    SignatureError,
    TermSyntaxError,
    VarietyError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")

    def print_help(self, file=None):
        raise _HelpExit(self.format_help())

    def exit(self, status=0, message=None):
        if status:
            raise UsageError(message or "")
        raise _HelpExit(message or "")


class _HelpExit(Exception):
    pass


def load_variety(spec: str) -> VarietySpec:
    """A catalog tag (S, LZ, RZ, RB, RS, CS, CT, C3, U2, GRP, ...) or a path to a .var file."""
    path = Path(spec)
    if path.suffix == ".var" or path.is_file():
        return read_variety(path)
    return catalog_variety(parse_tag(spec))


def load_algebra(spec: str) -> FiniteAlgebra:
    """A path to a .alg file or the name of a bundled algebra."""
    path = Path(spec)
    if path.is_file():
        return read_algebra(path)
    name = spec if spec.endswith(".alg") else spec + ".alg"
    try:
        return bundled_algebra(Path(name).name)
    except FileNotFoundError:
        raise FileNotFoundError(f"no algebra file {spec!r} and no bundled algebra of that name") from None


def _same_sig(*things) -> None:
    sigs = {t.sig for t in things}
    if len(sigs) > 1:
        raise VarietyError("inputs have different signatures: " + ", ".join(t.name for t in things))


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--model-bound", type=int, default=DEFAULT_MODEL_BOUND,
                        help=f"largest countermodel size searched (default {DEFAULT_MODEL_BOUND})")
    common.add_argument("--term-bound", type=int, default=None,
                        help="largest term size enumerated (command-specific default)")
    common.add_argument("--congruence-limit", type=int, default=DEFAULT_CONGRUENCE_LIMIT,
                        help=f"largest algebra for congruence enumeration (default {DEFAULT_CONGRUENCE_LIMIT})")

    p = _Parser(prog="maltsev", description="Workbench for Mal'tsev products of varieties.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-id", parents=[common], help="decide an identity in a variety")
    s.add_argument("--variety", required=True)
    s.add_argument("identity", help='e.g. "mul(mul(x,y),z) = mul(x,z)"')

    s = sub.add_parser("nf", parents=[common], help="normal form of a term")
    s.add_argument("--variety", required=True)
    s.add_argument("term")

    s = sub.add_parser("idem", parents=[common], help="is the term a term idempotent?")
    s.add_argument("--variety", required=True)
    s.add_argument("term")

    s = sub.add_parser("replica", parents=[common], help="replica congruence of an algebra")
    s.add_argument("--algebra", required=True)
    s.add_argument("--variety", required=True)
    s.add_argument("--profile", action="store_true",
                   help="compare with closures of the bounded pair relation up to --term-bound")

    s = sub.add_parser("classes", parents=[common], help="replica classes with subalgebra flags")
    s.add_argument("--algebra", required=True)
    s.add_argument("--variety", required=True)

    for name, text in (("member", "membership in V∘W"), ("hprobe", "membership of every quotient")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--algebra", required=True)
        s.add_argument("--inner", required=True, help="V")
        s.add_argument("--outer", required=True, help="W")

    s = sub.add_parser("sigma-w", parents=[common], help="substituted identities from base(V)")
    s.add_argument("--inner", required=True, help="V (its base is substituted into)")
    s.add_argument("--outer", required=True, help="W")
    s.add_argument("--identity", action="append", default=None,
                   help="use these identities instead of base(V); repeatable")
    s.add_argument("--variables", default="x,y")
    s.add_argument("--limit", type=int, default=20, help="identities to print")

    s = sub.add_parser("hypotheses", parents=[common], help="check the theorem's conditions for f, g")
    s.add_argument("--inner", required=True)
    s.add_argument("--outer", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--arity", type=int, choices=(2, 3), default=None)

    s = sub.add_parser("find-fg", parents=[common], help="search for f, g satisfying every condition")
    s.add_argument("--inner", required=True)
    s.add_argument("--outer", required=True)
    s.add_argument("--max-size", type=int, default=3)

    s = sub.add_parser("chain", parents=[common], help="build and verify the chain terms t_i")
    s.add_argument("--outer", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--pair", action="append", default=[], help='chain identity "p = q"; repeatable')
    s.add_argument("--algebra", help="with --elements: find pair witnesses and check a_i = t_i(c)")
    s.add_argument("--elements", help="comma-separated elements a_1,...,a_n")

    for name, text in (("polar", "polar terms of a variety"), ("classify", "polarization class")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--variety", required=True)
        s.add_argument("--max-size", type=int, default=3)

    s = sub.add_parser("examples", parents=[common], help="bundled algebras and catalog tags")
    s.add_argument("--show", help="print a bundled algebra file")
    return p


def _emit(args, data: dict, text: str) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) if args.json else text


def _cmd_check_id(args):
    V = load_variety(args.variety)
    ident = parse_identity(args.identity, V.sig)
    v = decide_identity(V, ident.lhs, ident.rhs, args.model_bound)
    return _STATUS_CODE[v.status], _emit(args, v.to_dict(), v.summary())


def _cmd_nf(args):
    V = load_variety(args.variety)
    t = parse_term(args.term, V.sig)
    nf = normal_form(V, t)
    return OK, _emit(args, {"term": format_term(t), "normal_form": format_term(nf)},
                     f"{pretty(t)}  ↦  {pretty(nf)}   ({format_term(nf)})")


def _cmd_idem(args):
    V = load_variety(args.variety)
    t = parse_term(args.term, V.sig)
    v = is_term_idempotent(V, t, args.model_bound)
    lines = [f"{pretty(t)} is a term idempotent of {V.name}: {v.status.value}"]
    lines += ["  " + p.summary() for p in v.parts]
    return _STATUS_CODE[v.status], _emit(args, v.to_dict(), "\n".join(lines))


def _cmd_replica(args):
    A, W = load_algebra(args.algebra), load_variety(args.variety)
    _same_sig(A, W)
    rho = replica_congruence(A, W)
    text = rho.render(A.names)
    data = {"algebra": A.name, "variety": W.name, "replica": text}
    if args.profile:
        bound = args.term_bound if args.term_bound is not None else 2
        prof = rho0_profile(A, W, bound)
        text += "\n" + prof.render(A.names)
        data["closure_reached_at"] = prof.stabilized_at
        data["term_bound"] = bound
        rel = rho0_bounded(A, W, bound)
        for (a, b), w in sorted(rel.witnesses.items()):
            if a < b:
                text += "\n  " + describe_witness(A, w)
    return OK, _emit(args, data, text)


def _cmd_classes(args):
    A, W = load_algebra(args.algebra), load_variety(args.variety)
    _same_sig(A, W)
    rep = class_structure(A, W)
    return OK, _emit(args, rep.to_dict(), rep.render())


def _cmd_member(args):
    A, V, W = load_algebra(args.algebra), load_variety(args.inner), load_variety(args.outer)
    _same_sig(A, V, W)
    rep = member(A, V, W)
    return (OK if rep.is_member else REFUTED), _emit(args, rep.to_dict(), rep.render())


def _cmd_hprobe(args):
    A, V, W = load_algebra(args.algebra), load_variety(args.inner), load_variety(args.outer)
    _same_sig(A, V, W)
    res = h_closure_probe(A, V, W, args.congruence_limit)
    return (REFUTED if res.violations else OK), _emit(args, res.to_dict(), res.render())


def _cmd_sigma_w(args):
    V, W = load_variety(args.inner), load_variety(args.outer)
    _same_sig(V, W)
    sigma = [parse_identity(s, V.sig) for s in args.identity] if args.identity else list(V.base)
    bound = args.term_bound if args.term_bound is not None else 2
    names = tuple(v.strip() for v in args.variables.split(",") if v.strip())
    res = sigma_w(sigma, W, bound, names)
    data = dict(res.metadata())
    data["identities"] = [str(i) for i in res.iter_identities()][: args.limit]
    return OK, _emit(args, data, res.render(args.limit))


def _cmd_hypotheses(args):
    V, W = load_variety(args.inner), load_variety(args.outer)
    _same_sig(V, W)
    f, g = parse_term(args.f, V.sig), parse_term(args.g, V.sig)
    rep = check_theorem_hypotheses(V, W, f, g, args.arity, args.model_bound)
    if rep.conclusion:
        code = OK
    elif rep.any_refuted:
        code = REFUTED
    else:
        code = UNKNOWN
    return code, _emit(args, rep.to_dict(), rep.render())


def _cmd_find_fg(args):
    V, W = load_variety(args.inner), load_variety(args.outer)
    _same_sig(V, W)
    res = search_fg(V, W, args.max_size)
    return (OK if res.pairs else UNKNOWN), _emit(args, res.to_dict(), res.render())


def _cmd_chain(args):
    W = load_variety(args.outer)
    f, g = parse_term(args.f, W.sig), parse_term(args.g, W.sig)
    if args.algebra:
        if not args.elements:
            raise UsageError("--algebra needs --elements")
        A = load_algebra(args.algebra)
        _same_sig(A, W)
        elems = [A.element(e.strip()) for e in args.elements.split(",")]
        bound = args.term_bound if args.term_bound is not None else 2
        rel = rho0_bounded(A, W, bound)
        missing = [(a, b) for a, b in zip(elems, elems[1:]) if (a, b) not in rel.witnesses]
        if missing:
            names = ", ".join(f"({A.element_name(a)}, {A.element_name(b)})" for a, b in missing)
            return UNKNOWN, f"no identity witness within term bound {bound} for {names}"
        wits = [rel.witnesses[(a, b)] for a, b in zip(elems, elems[1:])]
        data, elements, asg = chain_from_witnesses(f, g, wits)
        rep = verify_chain(W, None, data, A, elements, asg, args.model_bound)
    else:
        pairs = [parse_identity(s, W.sig) for s in args.pair]
        data = build_chain_terms(f, g, [(i.lhs, i.rhs) for i in pairs])
        rep = verify_chain(W, None, data, model_bound=args.model_bound)
    statuses = [v.status for v in rep.part_c + ([rep.part_d] if rep.part_d else []) + rep.chain_identities]
    if rep.ok and all(s is Status.PROVED for s in statuses):
        code = OK
    elif Status.REFUTED in statuses or rep.e_ok is False:
        code = REFUTED
    else:
        code = UNKNOWN
    out = {"t": [format_term(t) for t in data.t], **rep.to_dict()}
    return code, _emit(args, out, data.render() + "\n" + rep.render())


def _cmd_polar(args):
    W = load_variety(args.variety)
    terms = find_polar_terms(W, args.max_size, args.model_bound)
    text = f"polar terms of {W.name} up to size {args.max_size}: " + (
        ", ".join(pretty(t) for t in terms) if terms else "none"
    )
    return OK, _emit(args, {"variety": W.name, "max_size": args.max_size,
                            "polar_terms": [format_term(t) for t in terms]}, text)


def _cmd_classify(args):
    W = load_variety(args.variety)
    rep = classify_polarization(W, args.max_size, args.model_bound)
    code = UNKNOWN if rep.classification is Polarization.UNKNOWN else OK
    return code, _emit(args, rep.to_dict(), rep.render())


def _cmd_examples(args):
    if args.show:
        A = load_algebra(args.show)
        return OK, format_algebra(A) + "\n" + A.render()
    algs = bundled_names()
    lines = ["bundled algebras:"] + [f"  {n}" for n in algs]
    lines.append("catalog varieties: S LZ RZ RB RS CS CT C<k> U<n> GRP TRIVIAL")
    lines.append("try:  maltsev hprobe --algebra paper_A.alg --inner CS --outer S")
    return OK, _emit(args, {"algebras": algs, "catalog_tags": ["S", "LZ", "RZ", "RB", "RS", "CS", "CT", "C<k>", "U<n>", "GRP", "TRIVIAL"]}, "\n".join(lines))


_COMMANDS = {
    "check-id": _cmd_check_id,
    "nf": _cmd_nf,
    "idem": _cmd_idem,
    "replica": _cmd_replica,
    "classes": _cmd_classes,
    "member": _cmd_member,
    "hprobe": _cmd_hprobe,
    "sigma-w": _cmd_sigma_w,
    "hypotheses": _cmd_hypotheses,
    "find-fg": _cmd_find_fg,
    "chain": _cmd_chain,
    "polar": _cmd_polar,
    "classify": _cmd_classify,
    "examples": _cmd_examples,
}


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Run one command; returns the exit code and the rendered output (or error message)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        return _COMMANDS[args.command](args)
    except _HelpExit as exc:
        return OK, str(exc).rstrip()
    except UsageError as exc:
        return USAGE, f"error: {exc}".strip()
    except _INPUT_ERRORS as exc:
        return USAGE, f"error: {exc}"


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if code == USAGE else sys.stdout
    if text:
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
