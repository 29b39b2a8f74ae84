"""Reading and writing the ``.alg`` and ``.var`` text formats.

``.alg``::

    algebra <name>
    size <n>
    names <label> ... <label>        (optional)
    op <symbol> <arity>
    <n**arity integers, row-major, last index fastest>

``.var``::

    variety <name>
    signature                        (optional header)
    op <symbol> <arity>
    identity <term> = <term>
    catalog <tag>
    rewrite <lhs> -> <rhs>

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .algebra import FiniteAlgebra
from .catalog import Catalog, catalog_base, default_signature, parse_tag
from .terms import Identity, Signature, format_term, parse_identity, parse_rule
from .variety import (
    AssertedRewrite,
    Generic,
    VarietyError,
    VarietySpec,
    decide_identity,
)


class FormatError(ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_algebra(text: str) -> FiniteAlgebra:
    name = None
    size = None
    names = None
    ops: list[tuple[str, int]] = []
    values: dict[str, list[int]] = {}
    current = None
    for lineno, line in _lines(text):
        head, *rest = line.split()
        try:
            if head == "algebra":
                name = " ".join(rest) or "A"
            elif head == "size":
                size = int(rest[0])
            elif head == "names":
                names = rest
            elif head == "op":
                symbol, arity = rest[0], int(rest[1])
                ops.append((symbol, arity))
                values[symbol] = []
                current = symbol
            else:
                if current is None:
                    raise FormatError(f"line {lineno}: table entries before any 'op' line")
                values[current].extend(int(tok) for tok in line.split())
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: cannot parse {line!r}") from None
    if name is None or size is None:
        raise FormatError("missing 'algebra' or 'size' line")
    if not ops:
        raise FormatError("no operations declared")
    try:
        sig = Signature(name, tuple(ops))
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    for symbol, arity in ops:
        if len(values[symbol]) != size**arity:
            raise FormatError(
                f"operation {symbol!r} needs {size**arity} entries, got {len(values[symbol])}"
            )
    try:
        return FiniteAlgebra(sig, size, values, names=names, name=name)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_algebra(A: FiniteAlgebra) -> str:
    lines = [f"algebra {A.name}", f"size {A.size}"]
    if A.names is not None:
        lines.append("names " + " ".join(A.names))
    for symbol, arity in A.sig.operations:
        lines.append(f"op {symbol} {arity}")
        flat = A.flat_table(symbol)
        row = A.size if arity > 1 else len(flat)
        for i in range(0, len(flat), row):
            lines.append(" ".join(str(v) for v in flat[i : i + row]))
    return "\n".join(lines) + "\n"


def read_algebra(path: str | Path) -> FiniteAlgebra:
    return parse_algebra(Path(path).read_text(encoding="utf-8"))


def write_algebra(A: FiniteAlgebra, path: str | Path) -> None:
    Path(path).write_text(format_algebra(A), encoding="utf-8")


def algebra_to_dict(A: FiniteAlgebra) -> dict:
    return {
        "name": A.name,
        "size": A.size,
        "names": list(A.names) if A.names is not None else None,
        "operations": [
            {"symbol": s, "arity": a, "table": A.flat_table(s)} for s, a in A.sig.operations
        ],
    }


def bundled_algebra(name: str) -> FiniteAlgebra:
    """An algebra shipped in the package data directory."""
    data = resources.files("maltsev") / "data" / name
    if not data.is_file():
        raise FileNotFoundError(name)
    return parse_algebra(data.read_text(encoding="utf-8"))


def bundled_names() -> list[str]:
    return sorted(p.name for p in (resources.files("maltsev") / "data").iterdir() if p.name.endswith(".alg"))


def parse_variety(text: str) -> VarietySpec:
    name = None
    ops: list[tuple[str, int]] = []
    identity_lines: list[str] = []
    rule_lines: list[str] = []
    tag = None
    for lineno, line in _lines(text):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "variety":
            name = rest or "V"
        elif head == "signature":
            continue
        elif head == "op":
            parts = rest.split()
            if len(parts) != 2 or not parts[1].lstrip("-").isdigit():
                raise FormatError(f"line {lineno}: expected 'op <symbol> <arity>'")
            ops.append((parts[0], int(parts[1])))
        elif head == "identity":
            identity_lines.append(rest)
        elif head == "catalog":
            tag = rest
        elif head == "rewrite":
            rule_lines.append(rest)
        else:
            raise FormatError(f"line {lineno}: unknown directive {head!r}")
    if name is None:
        raise FormatError("missing 'variety' line")
    try:
        cat = parse_tag(tag) if tag is not None else None
        if ops:
            sig = Signature(name, tuple(ops))
        elif cat is not None:
            sig = default_signature(cat)
        else:
            raise FormatError("no operations declared and no catalog tag")
        idents = [parse_identity(s, sig) for s in identity_lines]
        rules = tuple(parse_rule(s, sig) for s in rule_lines)
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if cat is not None:
        if rules:
            raise FormatError("a variety cannot have both a catalog tag and rewrite rules")
        V = VarietySpec(name, sig, tuple(catalog_base(cat, sig)), cat)
        for ident in idents:
            if not decide_identity(V, ident.lhs, ident.rhs, model_bound=0).proved:
                raise FormatError(f"identity {ident} does not hold in catalog variety {cat.label}")
        return V
    if rules:
        try:
            decision = AssertedRewrite(rules)
        except VarietyError as exc:
            raise FormatError(str(exc)) from None
        base = tuple(idents) or tuple(Identity(lhs, rhs) for lhs, rhs in rules)
        return VarietySpec(name, sig, base, decision)
    return VarietySpec(name, sig, tuple(idents), Generic())


def format_variety(V: VarietySpec) -> str:
    lines = [f"variety {V.name}", "signature"]
    lines += [f"op {s} {a}" for s, a in V.sig.operations]
    lines += [f"identity {format_term(i.lhs)} = {format_term(i.rhs)}" for i in V.base]
    if isinstance(V.decision, Catalog):
        lines.append(f"catalog {V.decision.label}")
    elif isinstance(V.decision, AssertedRewrite):
        lines += [f"rewrite {format_term(l)} -> {format_term(r)}" for l, r in V.decision.rules]
    return "\n".join(lines) + "\n"


def read_variety(path: str | Path) -> VarietySpec:
    return parse_variety(Path(path).read_text(encoding="utf-8"))
