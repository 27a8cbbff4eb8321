"""Terms and identities over one binary operation ``->`` and the constant ``0``.

Surface syntax::

    term := var | "0" | term "'" | "(" term "->" term ")"

Every arrow is parenthesized; as a convenience a single unparenthesized arrow
is accepted at the top level (``x -> y``).  ``'`` is postfix and binds
tighter than ``->``.  Unicode ``→``, ``′``, ``″`` and ``≈`` are accepted on
input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, eq=True, repr=False)
class Var(Term):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Zero(Term):
    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, eq=True, repr=False)
class Comp(Term):
    """``inner'``, i.e. ``inner -> 0``."""
    inner: Term

    def __repr__(self):
        return f"Comp({self.inner!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Arrow(Term):
    lhs: Term
    rhs: Term

    def __repr__(self):
        return f"Arrow({self.lhs!r}, {self.rhs!r})"


ZERO = Zero()

Path = tuple  # sequence of child indices


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    name: str | None = field(default=None, compare=False)

    def __str__(self):
        return f"{format_term(self.lhs)} = {format_term(self.rhs)}"

    def variables(self) -> list[str]:
        return sorted(variables(self.lhs) | variables(self.rhs))

    def reversed(self) -> "Identity":
        return Identity(self.rhs, self.lhs, self.name)


@dataclass(frozen=True)
class ConditionalIdentity:
    hypotheses: tuple[Identity, ...]
    conclusion: Identity
    name: str | None = field(default=None, compare=False)

    def __str__(self):
        if not self.hypotheses:
            return str(self.conclusion)
        hyps = ", ".join(str(h) for h in self.hypotheses)
        return f"{hyps} |- {self.conclusion}"

    def variables(self) -> list[str]:
        vs = set(self.conclusion.variables())
        for h in self.hypotheses:
            vs.update(h.variables())
        return sorted(vs)


AnyIdentity = Union[Identity, ConditionalIdentity]


class TermSyntaxError(ValueError):
    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"{message} at offset {offset}: {text!r}")
        self.text = text
        self.offset = offset


# -- structural helpers -----------------------------------------------------

def variables(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, Comp):
            stack.append(s.inner)
        elif isinstance(s, Arrow):
            stack.append(s.lhs)
            stack.append(s.rhs)
    return out


def depth(t: Term) -> int:
    if isinstance(t, Comp):
        return 1 + depth(t.inner)
    if isinstance(t, Arrow):
        return 1 + max(depth(t.lhs), depth(t.rhs))
    return 0


def size(t: Term) -> int:
    if isinstance(t, Comp):
        return 1 + size(t.inner)
    if isinstance(t, Arrow):
        return 1 + size(t.lhs) + size(t.rhs)
    return 1


def normalize_comp(t: Term) -> Term:
    """Expand every ``s'`` into ``(s -> 0)``."""
    if isinstance(t, Comp):
        return Arrow(normalize_comp(t.inner), ZERO)
    if isinstance(t, Arrow):
        return Arrow(normalize_comp(t.lhs), normalize_comp(t.rhs))
    return t


def fold_comp(t: Term) -> Term:
    """Inverse direction of `normalize_comp`: write every ``(s -> 0)`` as ``s'``."""
    if isinstance(t, Comp):
        return Comp(fold_comp(t.inner))
    if isinstance(t, Arrow):
        lhs = fold_comp(t.lhs)
        if isinstance(t.rhs, Zero):
            return Comp(lhs)
        return Arrow(lhs, fold_comp(t.rhs))
    return t


def children(t: Term) -> tuple[Term, ...]:
    # Comp(s) behaves as Arrow(s, 0): child 1 is the implicit constant.
    if isinstance(t, Arrow):
        return (t.lhs, t.rhs)
    if isinstance(t, Comp):
        return (t.inner, ZERO)
    return ()


def subterm(t: Term, path: Sequence[int]) -> Term:
    for i in path:
        kids = children(t)
        if i not in (0, 1) or not kids:
            raise IndexError(f"invalid position {tuple(path)} in {format_term(t)}")
        t = kids[i]
    return t


def replace_at(t: Term, path: Sequence[int], new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Arrow):
        if i == 0:
            return Arrow(replace_at(t.lhs, rest, new), t.rhs)
        if i == 1:
            return Arrow(t.lhs, replace_at(t.rhs, rest, new))
    elif isinstance(t, Comp):
        if i == 0:
            return Comp(replace_at(t.inner, rest, new))
        if i == 1:
            # replacing the implicit 0 forces the explicit arrow form
            return Arrow(t.inner, replace_at(ZERO, rest, new))
    raise IndexError(f"invalid position {tuple(path)} in {format_term(t)}")


def positions(t: Term, prefix: Path = ()) -> Iterator[Path]:
    """All positions of `t` in preorder."""
    yield prefix
    for i, c in enumerate(children(t)):
        yield from positions(c, prefix + (i,))


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Simultaneous substitution; unmapped variables stay fixed."""
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, Comp):
        return Comp(substitute(t.inner, sigma))
    if isinstance(t, Arrow):
        return Arrow(substitute(t.lhs, sigma), substitute(t.rhs, sigma))
    return t


def substitute_identity(e: Identity, sigma: Mapping[str, Term]) -> Identity:
    return Identity(substitute(e.lhs, sigma), substitute(e.rhs, sigma), e.name)


def match(pattern: Term, target: Term, sigma: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """One-way matching modulo ``s' == (s -> 0)``.

    Both arguments are compared in normalized form; returns the extended
    substitution or None.
    """
    sigma = {} if sigma is None else dict(sigma)
    if _match(normalize_comp(pattern), normalize_comp(target), sigma):
        return sigma
    return None


def _match(p: Term, t: Term, sigma: dict[str, Term]) -> bool:
    if isinstance(p, Var):
        bound = sigma.get(p.name)
        if bound is None:
            sigma[p.name] = t
            return True
        return normalize_comp(bound) == t
    if isinstance(p, Zero):
        return isinstance(t, Zero)
    if isinstance(p, Arrow) and isinstance(t, Arrow):
        return _match(p.lhs, t.lhs, sigma) and _match(p.rhs, t.rhs, sigma)
    return False


# -- printing ---------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Comp):
        return format_term(t.inner) + "'"
    if isinstance(t, Arrow):
        return f"({format_term(t.lhs)} -> {format_term(t.rhs)})"
    raise TypeError(f"not a term: {t!r}")


def format_identity(e: AnyIdentity) -> str:
    return str(e)


# -- parsing ----------------------------------------------------------------

_ARROWS = ("->", "\u2192")
_PRIMES = {"'": 1, "\u2032": 1, "\u2033": 2}
_EQUALS = ("=", "\u2248")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        offset = len(self.text[: self.pos].encode("utf-8"))
        raise TermSyntaxError(msg, self.text, offset)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def accept(self, tokens) -> bool:
        self.skip()
        for tok in tokens:
            if self.text.startswith(tok, self.pos):
                self.pos += len(tok)
                return True
        return False

    def expect(self, tokens, what: str):
        if not self.accept(tokens):
            found = self.text[self.pos : self.pos + 2] or "end of input"
            self.error(f"expected {what}, found {found!r}")

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def finish(self):
        if self.at_end():
            return
        ch = self.text[self.pos]
        if not (ch.isalnum() or ch in "()'=,|-" or ch in _PRIMES or ch in _EQUALS or ch in "\u2192"):
            self.error(f"unknown character {ch!r}")
        self.error(f"trailing input {self.text[self.pos:self.pos + 8]!r}")

    def top(self) -> Term:
        t = self.term()
        if self.accept(_ARROWS):
            t = Arrow(t, self.term())
        return t

    def term(self) -> Term:
        t = self.atom()
        while True:
            self.skip()
            count = _PRIMES.get(self.text[self.pos : self.pos + 1])
            if count is None:
                return t
            self.pos += 1
            for _ in range(count):
                t = Comp(t)

    def atom(self) -> Term:
        self.skip()
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            lhs = self.term()
            self.expect(_ARROWS, "'->'")
            rhs = self.term()
            self.expect((")",), "')'")
            return Arrow(lhs, rhs)
        if ch == "0":
            self.pos += 1
            if self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.error("malformed constant")
            return ZERO
        if ch.isascii() and ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isascii() and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            return Var(self.text[start : self.pos])
        for tok in _ARROWS:
            if self.text.startswith(tok, self.pos):
                self.error("unexpected '->'")
        if ch in ")'=,|" or ch in _PRIMES or ch in _EQUALS:
            self.error(f"unexpected {ch!r}")
        self.error(f"unknown character {ch!r}")


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.top()
    p.finish()
    return t


def parse_identity(text: str, name: str | None = None) -> Identity:
    p = _Parser(text)
    lhs = p.top()
    p.expect(_EQUALS, "'='")
    rhs = p.top()
    p.finish()
    return Identity(lhs, rhs, name)


def parse_conditional(text: str, name: str | None = None) -> AnyIdentity:
    """Parse ``hyp1, hyp2 |- lhs = rhs`` or a plain identity."""
    if "|-" not in text:
        return parse_identity(text, name)
    hyp_text, concl_text = text.split("|-", 1)
    hyps = tuple(parse_identity(h) for h in hyp_text.split(",") if h.strip())
    return ConditionalIdentity(hyps, parse_identity(concl_text, name), name)


def parse_identity_file(text: str) -> dict[str, AnyIdentity]:
    """Read ``label : lhs = rhs`` lines (``#`` comments) into an ordered map."""
    out: dict[str, AnyIdentity] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected 'label : identity'")
        label, body = (s.strip() for s in line.split(":", 1))
        if label in out:
            raise ValueError(f"line {lineno}: duplicate label {label!r}")
        try:
            out[label] = parse_conditional(body, label)
        except TermSyntaxError as e:
            raise ValueError(f"line {lineno}: {e}") from e
    return out


def format_identity_file(entries: Mapping[str, AnyIdentity]) -> str:
    return "".join(f"{label} : {e}\n" for label, e in entries.items())
