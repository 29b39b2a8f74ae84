"""Signatures, terms, identities, substitution, matching and term enumeration."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([(),=])|(->)|(\S))")


class TermSyntaxError(ValueError):
    """Raised for malformed term text, unknown symbols or arity mismatches."""


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """A finitary similarity type without nullary symbols.

    Equality ignores ``name``: two signatures are the same type exactly when
    they declare the same symbols with the same arities in the same order.
    """

    name: str = field(compare=False)
    operations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        ops = tuple((str(s), int(a)) for s, a in self.operations)
        object.__setattr__(self, "operations", ops)
        seen = set()
        for symbol, arity in ops:
            if not _IDENT.match(symbol):
                raise SignatureError(f"bad operation symbol {symbol!r}")
            if arity < 1:
                raise SignatureError(
                    f"nullary operation {symbol!r} not allowed; use a constant unary symbol"
                )
            if symbol in seen:
                raise SignatureError(f"duplicate operation symbol {symbol!r}")
            seen.add(symbol)
        if not ops:
            raise SignatureError("signature needs at least one operation")

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.operations)

    def arity(self, symbol: str) -> int:
        for s, a in self.operations:
            if s == symbol:
                return a
        raise KeyError(symbol)

    def __contains__(self, symbol) -> bool:
        return any(s == symbol for s, _ in self.operations)

    @property
    def is_plural(self) -> bool:
        return any(a >= 2 for _, a in self.operations)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)


GROUPOID = Signature("groupoid", (("mul", 2),))
MONOUNARY = Signature("monounary", (("f", 1),))
GROUP = Signature("group", (("mul", 2), ("inv", 1)))


class Term:
    """Base class of :class:`Var` and :class:`App`; terms are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_term(self)

    @property
    def is_var(self) -> bool:
        return isinstance(self, Var)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("v", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    size = 0


class App(Term):
    __slots__ = ("symbol", "args", "size", "_hash")

    def __init__(self, symbol: str, args: Iterable[Term]):
        args = tuple(args)
        object.__setattr__(self, "symbol", symbol)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "size", 1 + sum(a.size for a in args))
        object.__setattr__(self, "_hash", hash((symbol, args)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and other._hash == self._hash
            and other.symbol == self.symbol
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.symbol!r}, {self.args!r})"


def app(symbol: str, *args: Term) -> App:
    return App(symbol, args)


def var(name: str) -> Var:
    return Var(name)


def format_term(t: Term) -> str:
    """Render in the input grammar, e.g. ``mul(x,mul(y,y))``."""
    if isinstance(t, Var):
        return t.name
    return f"{t.symbol}({','.join(format_term(a) for a in t.args)})"


def pretty(t: Term, infix: Mapping[str, str] | None = None) -> str:
    """Display form: ``mul`` as juxtaposition-free ``·``, ``inv`` as ``⁻¹``, ``f^k(x)``.

    For display only; the output does not parse back.
    """
    infix = {"mul": "·"} if infix is None else infix
    if isinstance(t, Var):
        return t.name
    if t.symbol == "inv" and len(t.args) == 1:
        inner = pretty(t.args[0], infix)
        if not isinstance(t.args[0], Var):
            inner = f"({inner})"
        return inner + "⁻¹"
    if len(t.args) == 1:
        k, s = 0, t
        while isinstance(s, App) and s.symbol == t.symbol and len(s.args) == 1:
            k, s = k + 1, s.args[0]
        power = "" if k == 1 else _superscript(k)
        return f"{t.symbol}{power}({pretty(s, infix)})"
    if len(t.args) == 2 and t.symbol in infix:
        parts = []
        for a in t.args:
            s = pretty(a, infix)
            parts.append(f"({s})" if isinstance(a, App) and len(a.args) == 2 else s)
        return infix[t.symbol].join(parts)
    return f"{t.symbol}({', '.join(pretty(a, infix) for a in t.args)})"


def _superscript(k: int) -> str:
    return str(k).translate(str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹"))


# -- parsing -----------------------------------------------------------------


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(4):
            raise TermSyntaxError(f"unexpected character {m.group(4)!r} at {m.start(4)}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], sig: Signature):
        self.tokens = tokens
        self.pos = 0
        self.sig = sig

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def expect(self, tok):
        if self.peek() != tok:
            raise TermSyntaxError(f"expected {tok!r}, found {self.peek()!r}")
        self.pos += 1

    def term(self) -> Term:
        tok = self.peek()
        if tok is None or not _IDENT.match(tok):
            raise TermSyntaxError(f"expected identifier, found {tok!r}")
        self.pos += 1
        if self.peek() != "(":
            if tok in self.sig:
                raise TermSyntaxError(
                    f"operation {tok!r} used without arguments (arity {self.sig.arity(tok)})"
                )
            return Var(tok)
        if tok not in self.sig:
            raise TermSyntaxError(f"unknown operation symbol {tok!r}")
        self.pos += 1
        args = [self.term()]
        while self.peek() == ",":
            self.pos += 1
            args.append(self.term())
        self.expect(")")
        if len(args) != self.sig.arity(tok):
            raise TermSyntaxError(
                f"{tok!r} has arity {self.sig.arity(tok)}, given {len(args)} arguments"
            )
        return App(tok, args)


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(_tokenize(text), sig)
    t = p.term()
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input at token {p.peek()!r}")
    return t


def parse_identity(text: str, sig: Signature) -> "Identity":
    return Identity(*_parse_pair(text, sig, "="))


def parse_rule(text: str, sig: Signature) -> tuple[Term, Term]:
    return _parse_pair(text, sig, "->")


def _parse_pair(text: str, sig: Signature, sep: str) -> tuple[Term, Term]:
    p = _Parser(_tokenize(text), sig)
    lhs = p.term()
    p.expect(sep)
    rhs = p.term()
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input at token {p.peek()!r}")
    return lhs, rhs


def check_term(t: Term, sig: Signature) -> None:
    """Raise TermSyntaxError unless every symbol of ``t`` is declared with its arity."""
    if isinstance(t, App):
        if t.symbol not in sig:
            raise TermSyntaxError(f"unknown operation symbol {t.symbol!r}")
        if len(t.args) != sig.arity(t.symbol):
            raise TermSyntaxError(f"arity mismatch at {t.symbol!r}")
        for a in t.args:
            check_term(a, sig)


# -- structural operations -----------------------------------------------------


def variables_of(t: Term) -> frozenset[str]:
    return frozenset(ordered_variables(t))


def ordered_variables(*terms: Term) -> list[str]:
    """Variable names in order of first occurrence (preorder, left to right)."""
    seen: dict[str, None] = {}
    stack = list(reversed(terms))
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            seen.setdefault(t.name)
        else:
            stack.extend(reversed(t.args))
    return list(seen)


def substitute(t: Term, s: Mapping[str, Term]) -> Term:
    """Simultaneous substitution; unmapped variables are left alone."""
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t.name, t)
    return App(t.symbol, [substitute(a, s) for a in t.args])


def rename(t: Term, names: Mapping[str, str]) -> Term:
    return substitute(t, {k: Var(v) for k, v in names.items()})


def match_instance(p: Term, q: Term, binding: dict | None = None) -> dict[str, Term] | None:
    """Return the substitution s with ``substitute(p, s) == q``, or None.

    Only variables of ``p`` are bound, so s is unique when it exists.
    """
    s = {} if binding is None else dict(binding)
    stack = [(p, q)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Var):
            bound = s.get(a.name)
            if bound is None:
                s[a.name] = b
            elif bound != b:
                return None
        elif isinstance(b, App) and a.symbol == b.symbol and len(a.args) == len(b.args):
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return s


def subterms(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """(position, subterm) pairs in preorder; positions are child-index paths."""
    stack: list[tuple[tuple[int, ...], Term]] = [((), t)]
    while stack:
        pos, s = stack.pop()
        yield pos, s
        if isinstance(s, App):
            for i in reversed(range(len(s.args))):
                stack.append((pos + (i,), s.args[i]))


def replace_at(t: Term, pos: Sequence[int], new: Term) -> Term:
    if not pos:
        return new
    args = list(t.args)
    args[pos[0]] = replace_at(args[pos[0]], pos[1:], new)
    return App(t.symbol, args)


def term_at(t: Term, pos: Sequence[int]) -> Term:
    for i in pos:
        t = t.args[i]
    return t


def canonical_names(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)]


# -- identities ----------------------------------------------------------------


class Identity:
    """An identity ``lhs = rhs``.

    Equality and hashing use the canonical form (variables renamed x1, x2, ...
    by first occurrence in lhs then rhs), so identities are alpha-invariant.
    The original terms are kept for display.
    """

    __slots__ = ("lhs", "rhs", "_canon")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = lhs
        self.rhs = rhs
        self._canon = None

    def canonical(self) -> "Identity":
        if self._canon is None:
            names = ordered_variables(self.lhs, self.rhs)
            mapping = dict(zip(names, canonical_names(len(names))))
            c = Identity(rename(self.lhs, mapping), rename(self.rhs, mapping))
            c._canon = c
            self._canon = c
        return self._canon

    @property
    def variables(self) -> list[str]:
        return ordered_variables(self.lhs, self.rhs)

    @property
    def is_trivial(self) -> bool:
        return self.lhs == self.rhs

    def reversed(self) -> "Identity":
        return Identity(self.rhs, self.lhs)

    def __eq__(self, other):
        if not isinstance(other, Identity):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.lhs == b.lhs and a.rhs == b.rhs

    def __hash__(self):
        c = self.canonical()
        return hash((c.lhs, c.rhs))

    def __str__(self):
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"

    def __repr__(self):
        return f"Identity({self})"

    def pretty(self) -> str:
        return f"{pretty(self.lhs)} = {pretty(self.rhs)}"


# -- enumeration ---------------------------------------------------------------


def term_key(t: Term, sig: Signature, variables: Sequence[str]) -> tuple:
    """Enumeration order: size first, then preorder tokens, variables before symbols."""
    vindex = {v: i for i, v in enumerate(variables)}
    tokens = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            tokens.append((0, vindex.get(s.name, len(vindex)), s.name))
        else:
            tokens.append((1, sig.index(s.symbol), ""))
            stack.extend(reversed(s.args))
    return (t.size, tuple(tokens))


def enumerate_terms(sig: Signature, variables: Sequence[str], max_size: int) -> list[Term]:
    """All terms over ``variables`` with at most ``max_size`` operation nodes, in order."""
    return list(_enumerate(sig, tuple(variables), max_size))


@lru_cache(maxsize=64)
def _enumerate(sig: Signature, variables: tuple[str, ...], max_size: int) -> tuple[Term, ...]:
    by_size = _terms_by_size(sig, variables, max_size)
    out: list[Term] = []
    for s in range(max_size + 1):
        out.extend(by_size[s])
    return tuple(out)


@lru_cache(maxsize=64)
def _terms_by_size(sig: Signature, variables: tuple[str, ...], max_size: int):
    by_size: list[list[Term]] = [[Var(v) for v in variables]]
    for s in range(1, max_size + 1):
        level: list[Term] = []
        for symbol, arity in sig.operations:
            for sizes in _compositions(s - 1, arity):
                for args in product(*(by_size[k] for k in sizes)):
                    level.append(App(symbol, args))
        level.sort(key=lambda t: term_key(t, sig, variables))
        by_size.append(level)
    return tuple(tuple(level) for level in by_size)


def terms_of_size(sig: Signature, variables: Sequence[str], size: int) -> tuple[Term, ...]:
    return _terms_by_size(sig, tuple(variables), size)[size]


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def unary_closure(t: Term, symbol: str, arity: int) -> Term:
    """``symbol(t, ..., t)``."""
    return App(symbol, [t] * arity)


def left_comb(symbol: str, items: Sequence[Term]) -> Term:
    """``((a1·a2)·a3)·...`` for a binary symbol; a single item is returned as is."""
    if not items:
        raise ValueError("empty product")
    acc = items[0]
    for it in items[1:]:
        acc = App(symbol, (acc, it))
    return acc


def flatten(t: Term, symbol: str) -> list[Term]:
    """Leaves of the maximal ``symbol``-subtree rooted at t (associative reading)."""
    out: list[Term] = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App) and s.symbol == symbol:
            stack.extend(reversed(s.args))
        else:
            out.append(s)
    return out
