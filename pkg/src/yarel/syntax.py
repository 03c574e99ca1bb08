"""Concrete syntax of Yarel: tokens, abstract syntax, parser, printer, imports.

Grammar accepted by :func:`parse_module`::

    module ::= "module" ID "{" item* "}"
    item   ::= "import" ID
             | "dcl" ID ":" "int" ("," "int")*
             | "def" ID ":=" expr
    expr   ::= par (";" par)*            -- left associative
    par    ::= atom ("|" atom)*          -- left associative, binds tighter
    atom   ::= "id" | "inc" | "dec" | "neg" | "/" INT+ "/"
             | "it" "[" expr "]" | "if" "[" expr "," expr "," expr "]"
             | "inv" "[" expr "]" | ID | "(" expr ")"

Block comments ``/* ... */`` are whitespace and do not nest.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import (
    DuplicateModuleName,
    IllegalCharacter,
    ImportCycle,
    Loc,
    ModuleNotFound,
    ParseError,
    UnterminatedComment,
)

KEYWORDS = frozenset(
    ["module", "import", "dcl", "def", "int", "id", "inc", "dec", "neg", "it", "if", "inv"]
)
PUNCT = frozenset("{}:,;|[]()/")


class Token(NamedTuple):
    kind: str  # a keyword, a punctuation string, "IDENT", "INT" or "EOF"
    text: str
    loc: Loc

    def __repr__(self) -> str:
        if self.kind in ("IDENT", "INT"):
            return f"{self.kind}({self.text})"
        return self.kind


def tokenize(text: str, path: Optional[str] = None) -> Iterator[Token]:
    """Yield the tokens of ``text``, ending with a single EOF token."""
    i, n = 0, len(text)
    line, line_start = 1, 0

    def here(at: int) -> Loc:
        return Loc(line, at - line_start + 1)

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif ch in " \t\r\f\v":
            i += 1
        elif ch == "/" and text.startswith("*", i + 1):
            start = here(i)
            end = text.find("*/", i + 2)
            if end < 0:
                raise UnterminatedComment("comment is never closed", start, path)
            for j in range(i, end):
                if text[j] == "\n":
                    line += 1
                    line_start = j + 1
            i = end + 2
        elif ch == ":" and text.startswith("=", i + 1):
            yield Token(":=", ":=", here(i))
            i += 2
        elif ch in PUNCT:
            yield Token(ch, ch, here(i))
            i += 1
        elif ch.isascii() and ch.isdigit():
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            yield Token("INT", text[i:j], here(i))
            i = j
        elif ch.isascii() and ch.isalpha():
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            yield Token(word if word in KEYWORDS else "IDENT", word, here(i))
            i = j
        else:
            raise IllegalCharacter(f"illegal character {ch!r}", here(i), path)
    yield Token("EOF", "", here(n))


# ---------------------------------------------------------------------------
# Abstract syntax.  Source locations never take part in equality.

def _loc():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Id:
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Inc:
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Dec:
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Neg:
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Perm:
    """``/i1 ... in/``: output position j takes input position ``indices[j-1]``."""

    indices: Tuple[int, ...]
    loc: Optional[Loc] = _loc()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if not self.indices or any(i < 1 for i in self.indices):
            raise ValueError(f"permutation indices must be positive: {self.indices}")


@dataclass(frozen=True)
class Seq:
    left: "FunExpr"
    right: "FunExpr"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Par:
    left: "FunExpr"
    right: "FunExpr"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class It:
    body: "FunExpr"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class If:
    pos: "FunExpr"
    zero: "FunExpr"
    neg: "FunExpr"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Inv:
    body: "FunExpr"
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Call:
    name: str
    loc: Optional[Loc] = _loc()


FunExpr = Union[Id, Inc, Dec, Neg, Perm, Seq, Par, It, If, Inv, Call]
PRIMITIVES = (Id, Inc, Dec, Neg)


@dataclass(frozen=True)
class Import:
    module: str
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Dcl:
    name: str
    arity: int
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Def:
    name: str
    body: FunExpr
    loc: Optional[Loc] = _loc()


Item = Union[Import, Dcl, Def]


@dataclass(frozen=True)
class Module:
    name: str
    items: Tuple[Item, ...] = ()
    path: Optional[str] = field(default=None, compare=False, repr=False)
    loc: Optional[Loc] = _loc()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def imports(self) -> List[Import]:
        return [it for it in self.items if isinstance(it, Import)]

    @property
    def dcls(self) -> List[Dcl]:
        return [it for it in self.items if isinstance(it, Dcl)]

    @property
    def defs(self) -> List[Def]:
        return [it for it in self.items if isinstance(it, Def)]


def subexprs(e: FunExpr) -> Iterator[FunExpr]:
    """Pre-order walk over ``e`` (calls are not followed)."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Seq, Par)):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, (It, Inv)):
            stack.append(node.body)
        elif isinstance(node, If):
            stack.extend((node.neg, node.zero, node.pos))


def calls_in(e: FunExpr) -> List[str]:
    """Names called from ``e``, in source order, without duplicates."""
    seen: Dict[str, None] = {}
    for node in subexprs(e):
        if isinstance(node, Call):
            seen.setdefault(node.name)
    return list(seen)


# ---------------------------------------------------------------------------
# Parser

_ATOM_START = ("id", "inc", "dec", "neg", "/", "it", "if", "inv", "IDENT", "(")


class _Parser:
    def __init__(self, text: str, path: Optional[str]):
        self.path = path
        self.toks = list(tokenize(text, path))
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def fail(self, expected: Sequence[str]):
        tok = self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        want = ", ".join(sorted(expected))
        raise ParseError(f"expected {want} but found {found}", tok.loc, self.path, expected)

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail([kind])
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, kind: str) -> Optional[Token]:
        if self.tok.kind == kind:
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def module(self) -> Module:
        start = self.expect("module")
        name = self.expect("IDENT").text
        self.expect("{")
        items: List[Item] = []
        while not self.accept("}"):
            items.append(self.item())
        self.expect("EOF")
        return Module(name, tuple(items), path=self.path, loc=start.loc)

    def item(self) -> Item:
        tok = self.tok
        if self.accept("import"):
            return Import(self.expect("IDENT").text, tok.loc)
        if self.accept("dcl"):
            name = self.expect("IDENT")
            self.expect(":")
            self.expect("int")
            arity = 1
            while self.accept(","):
                self.expect("int")
                arity += 1
            return Dcl(name.text, arity, name.loc)
        if self.accept("def"):
            name = self.expect("IDENT")
            self.expect(":=")
            return Def(name.text, self.expr(), name.loc)
        self.fail(["import", "dcl", "def", "}"])

    def expr(self) -> FunExpr:
        e = self.par()
        while True:
            op = self.accept(";")
            if op is None:
                return e
            e = Seq(e, self.par(), op.loc)

    def par(self) -> FunExpr:
        e = self.atom()
        while True:
            op = self.accept("|")
            if op is None:
                return e
            e = Par(e, self.atom(), op.loc)

    def atom(self) -> FunExpr:
        tok = self.tok
        kind = tok.kind
        if kind in ("id", "inc", "dec", "neg"):
            self.pos += 1
            return {"id": Id, "inc": Inc, "dec": Dec, "neg": Neg}[kind](tok.loc)
        if kind == "IDENT":
            self.pos += 1
            return Call(tok.text, tok.loc)
        if kind == "/":
            self.pos += 1
            indices = [self.index()]
            while self.tok.kind == "INT":
                indices.append(self.index())
            if self.tok.kind != "/":
                self.fail(["INT", "/"])
            self.pos += 1
            return Perm(tuple(indices), tok.loc)
        if kind in ("it", "inv"):
            self.pos += 1
            self.expect("[")
            body = self.expr()
            self.expect("]")
            return (It if kind == "it" else Inv)(body, tok.loc)
        if kind == "if":
            self.pos += 1
            self.expect("[")
            pos = self.expr()
            self.expect(",")
            zero = self.expr()
            self.expect(",")
            neg = self.expr()
            self.expect("]")
            return If(pos, zero, neg, tok.loc)
        if kind == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        self.fail(_ATOM_START)

    def index(self) -> int:
        tok = self.expect("INT")
        value = int(tok.text)
        if value < 1:
            raise ParseError("permutation indices start at 1", tok.loc, self.path, ["INT"])
        return value


def parse_module(text: str, path: Optional[str] = None) -> Module:
    """Parse the single module contained in ``text``."""
    return _Parser(text, path).module()


def parse_expr(text: str) -> FunExpr:
    """Parse a bare function expression (handy in tests and the REPL-less CLI)."""
    p = _Parser(text, None)
    e = p.expr()
    p.expect("EOF")
    return e


# ---------------------------------------------------------------------------
# Pretty printer

_SEQ, _PAR, _ATOM = 0, 1, 2


def format_expr(e: FunExpr, _ctx: int = _SEQ) -> str:
    if isinstance(e, Seq):
        s = f"{format_expr(e.left, _SEQ)}; {format_expr(e.right, _PAR)}"
        return s if _ctx <= _SEQ else f"({s})"
    if isinstance(e, Par):
        s = f"{format_expr(e.left, _PAR)} | {format_expr(e.right, _ATOM)}"
        return s if _ctx <= _PAR else f"({s})"
    if isinstance(e, Id):
        return "id"
    if isinstance(e, Inc):
        return "inc"
    if isinstance(e, Dec):
        return "dec"
    if isinstance(e, Neg):
        return "neg"
    if isinstance(e, Perm):
        return "/" + " ".join(map(str, e.indices)) + "/"
    if isinstance(e, It):
        return f"it[{format_expr(e.body)}]"
    if isinstance(e, Inv):
        return f"inv[{format_expr(e.body)}]"
    if isinstance(e, If):
        return f"if[{format_expr(e.pos)}, {format_expr(e.zero)}, {format_expr(e.neg)}]"
    if isinstance(e, Call):
        return e.name
    raise TypeError(f"not a function expression: {e!r}")


def format_item(item: Item) -> str:
    if isinstance(item, Import):
        return f"import {item.module}"
    if isinstance(item, Dcl):
        return f"dcl {item.name} : " + ", ".join(["int"] * item.arity)
    return f"def {item.name} := {format_expr(item.body)}"


def pretty_print(m: Module) -> str:
    lines = [f"module {m.name} {{"]
    lines.extend("  " + format_item(item) for item in m.items)
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Multi-module programs


class Source(NamedTuple):
    text: str
    path: Optional[str] = None


Loader = Callable[[str], Union[str, Source, Module]]


@dataclass
class ProgramUnit:
    modules: Dict[str, Module]
    entry: str

    @property
    def entry_module(self) -> Module:
        return self.modules[self.entry]

    def visible_modules(self, name: str) -> List[str]:
        """The module itself plus the modules it imports directly."""
        return [name] + [imp.module for imp in self.modules[name].imports]


def resolve_imports(entry: Module, loader: Loader) -> ProgramUnit:
    """Load every module reachable from ``entry`` through imports.

    Each module is loaded once.  A cycle in the import graph raises
    :class:`ImportCycle` naming the modules on it.
    """
    modules: Dict[str, Module] = {entry.name: entry}
    done = set()

    def load(imp: Import, importer: Module) -> Module:
        try:
            src = loader(imp.module)
        except ModuleNotFound as exc:
            raise ModuleNotFound(exc.message, imp.loc, importer.path) from None
        except (KeyError, FileNotFoundError):
            raise ModuleNotFound(f"cannot find module {imp.module}", imp.loc, importer.path) from None
        if isinstance(src, Module):
            m = src
        else:
            if not isinstance(src, Source):
                src = Source(src)
            m = parse_module(src.text, src.path)
        if m.name != imp.module:
            if m.name in modules:
                raise DuplicateModuleName(
                    f"module {m.name} loaded twice (requested as {imp.module})", imp.loc, importer.path)
            raise ModuleNotFound(
                f"source for {imp.module} declares module {m.name}", imp.loc, importer.path)
        return m

    def visit(m: Module, stack: List[str]) -> None:
        stack.append(m.name)
        for imp in m.imports:
            if imp.module in stack:
                cycle = stack[stack.index(imp.module):]
                raise ImportCycle(cycle, imp.loc, m.path)
            if imp.module in done:
                continue
            if imp.module not in modules:
                modules[imp.module] = load(imp, m)
            visit(modules[imp.module], stack)
        stack.pop()
        done.add(m.name)

    visit(entry, [])
    return ProgramUnit(modules, entry.name)


def unit_of(*modules: Module) -> ProgramUnit:
    """Bundle already-parsed modules; the first one is the entry."""
    table: Dict[str, Module] = {}
    for m in modules:
        if m.name in table:
            raise DuplicateModuleName(f"module {m.name} defined twice", m.loc, m.path)
        table[m.name] = m

    def loader(name: str) -> Module:
        if name not in table:
            raise ModuleNotFound(f"cannot find module {name}")
        return table[name]

    return resolve_imports(modules[0], loader)


def directory_loader(dirs: Sequence[str]) -> Loader:
    """Look a module up as ``<dir>/<Name>.yarel`` in each directory in turn."""

    def load(name: str) -> Source:
        for d in dirs:
            candidate = os.path.join(d, name + ".yarel")
            if os.path.isfile(candidate):
                with open(candidate, encoding="utf-8") as fh:
                    return Source(fh.read(), candidate)
        raise ModuleNotFound(f"cannot find module {name} (searched: {', '.join(dirs) or 'nothing'})")

    return load


def load_file(path: str, search_path: Sequence[str] = ()) -> ProgramUnit:
    """Parse ``path`` and resolve its imports next to it, then in ``search_path``."""
    with open(path, encoding="utf-8") as fh:
        entry = parse_module(fh.read(), path)
    dirs = [os.path.dirname(os.path.abspath(path))] + list(search_path)
    return resolve_imports(entry, directory_loader(dirs))
