"""Structural Java parser: tokens, type declarations, and method spans.

This is not a full grammar. It tokenizes Java precisely enough to be exact
about comments, string/char literals, and text blocks, then walks the token
stream tracking type bodies, so every method and constructor declaration is
found with its source span, signature, and parameter names. Expressions are
never evaluated; statement bodies are scanned only to keep brace balance and
to find anonymous and local classes hiding inside them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import JavaSyntaxError

MODIFIERS = frozenset({
    "public", "protected", "private", "static", "final", "abstract",
    "synchronized", "native", "strictfp", "default", "transient", "volatile",
    "sealed",
})

TYPE_KEYWORDS = frozenset({"class", "interface", "enum"})

# Multi-char operators that must stay atomic for downstream metric counting.
# '<' and '>' are always emitted singly so generic brackets can be balanced.
TWO_CHAR_OPS = frozenset({
    "&&", "||", "->", "::", "++", "--", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
})


@dataclass(frozen=True)
class Token:
    kind: str  # word | number | string | char | punct
    text: str
    line: int  # 1-based line of the first character
    end_line: int  # 1-based line of the last character (text blocks span lines)
    start: int  # offset into the source
    end: int  # offset one past the last character


@dataclass(frozen=True)
class TypeDecl:
    name: str  # '$'-joined chain, e.g. Outer$Inner or Outer$1
    kind: str  # class | interface | enum | annotation | anonymous
    line: int


@dataclass(frozen=True)
class MethodDecl:
    class_name: str
    name: str
    signature: str
    parameter_names: tuple[str, ...]
    is_constructor: bool
    has_body: bool
    start_line: int
    end_line: int
    start: int  # offset of the first declaration token (annotations included)
    end: int  # offset one past the closing brace (or ';' for bodyless)


@dataclass
class SyntaxTree:
    path: str
    text: str
    tokens: list[Token]
    types: list[TypeDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)

    def body_methods(self) -> list[MethodDecl]:
        return [m for m in self.methods if m.has_body]


def tokenize(text: str, path: str = "<memory>") -> list[Token]:
    """Lex Java source into tokens, dropping comments and whitespace.

    Raises JavaSyntaxError for unterminated comments, strings, chars, or
    text blocks. Line numbers are 1-based.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    line = 1

    def count_newlines(start: int, end: int) -> int:
        return text.count("\n", start, end)

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in " \t\r\f":
            i += 1
            continue
        if ch == "/" and i + 1 < n:
            nxt = text[i + 1]
            if nxt == "/":
                j = text.find("\n", i)
                i = n if j == -1 else j
                continue
            if nxt == "*":
                j = text.find("*/", i + 2)
                if j == -1:
                    raise JavaSyntaxError(path, line, "unterminated block comment")
                line += count_newlines(i, j + 2)
                i = j + 2
                continue
        if ch == '"':
            if text.startswith('"""', i):
                j = text.find('"""', i + 3)
                if j == -1:
                    raise JavaSyntaxError(path, line, "unterminated text block")
                end = j + 3
                tok_line = line
                line += count_newlines(i, end)
                tokens.append(Token("string", text[i:end], tok_line, line, i, end))
                i = end
                continue
            j = i + 1
            while j < n:
                c = text[j]
                if c == "\\":
                    j += 2
                    continue
                if c == '"':
                    break
                if c == "\n":
                    raise JavaSyntaxError(path, line, "unterminated string literal")
                j += 1
            if j >= n:
                raise JavaSyntaxError(path, line, "unterminated string literal")
            tokens.append(Token("string", text[i : j + 1], line, line, i, j + 1))
            i = j + 1
            continue
        if ch == "'":
            j = i + 1
            while j < n:
                c = text[j]
                if c == "\\":
                    j += 2
                    continue
                if c == "'":
                    break
                if c == "\n":
                    raise JavaSyntaxError(path, line, "unterminated char literal")
                j += 1
            if j >= n:
                raise JavaSyntaxError(path, line, "unterminated char literal")
            tokens.append(Token("char", text[i : j + 1], line, line, i, j + 1))
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n:
                c = text[j]
                if c.isalnum() or c in "_.":
                    j += 1
                elif c in "+-" and text[j - 1] in "eEpP":
                    j += 1
                else:
                    break
            tokens.append(Token("number", text[i:j], line, line, i, j))
            i = j
            continue
        if ch.isalpha() or ch in "_$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "_$"):
                j += 1
            tokens.append(Token("word", text[i:j], line, line, i, j))
            i = j
            continue
        two = text[i : i + 2]
        if two in TWO_CHAR_OPS:
            tokens.append(Token("punct", two, line, line, i, i + 2))
            i += 2
            continue
        tokens.append(Token("punct", ch, line, line, i, i + 1))
        i += 1
    return tokens


def code_lines(tokens: list[Token]) -> set[int]:
    """Lines that carry at least one token (blank/comment-only lines excluded)."""
    lines: set[int] = set()
    for tok in tokens:
        lines.update(range(tok.line, tok.end_line + 1))
    return lines


class _Parser:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.tokens = tokenize(text, path)
        self.i = 0
        self.tree = SyntaxTree(path=path, text=text, tokens=self.tokens)
        self._anon_counters: dict[str, int] = {}

    # -- token helpers ------------------------------------------------------

    def _peek(self, ahead: int = 0) -> Token | None:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def _next(self) -> Token:
        tok = self._peek()
        if tok is None:
            last_line = self.tokens[-1].end_line if self.tokens else 1
            raise JavaSyntaxError(self.path, last_line, "unexpected end of file")
        self.i += 1
        return tok

    def _at_punct(self, text: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind == "punct" and tok.text == text

    def _at_word(self, text: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind == "word" and tok.text == text

    def _err(self, tok: Token | None, message: str) -> JavaSyntaxError:
        line = tok.line if tok else (self.tokens[-1].end_line if self.tokens else 1)
        return JavaSyntaxError(self.path, line, message)

    # -- top level ----------------------------------------------------------

    def parse(self) -> SyntaxTree:
        while self._peek() is not None:
            tok = self._peek()
            assert tok is not None
            if tok.kind == "word" and tok.text in ("package", "import"):
                self._skip_to_semicolon()
            elif self._at_punct(";"):
                self.i += 1
            elif self._type_decl_ahead():
                self._parse_type_decl(parent=None)
            else:
                raise self._err(tok, f"unexpected token {tok.text!r} at top level")
        return self.tree

    def _skip_to_semicolon(self) -> None:
        while True:
            tok = self._next()
            if tok.kind == "punct" and tok.text == ";":
                return

    # -- declarations -------------------------------------------------------

    def _skip_annotation(self) -> None:
        self._next()  # '@'
        tok = self._peek()
        if tok is None or tok.kind != "word":
            raise self._err(tok, "malformed annotation")
        self._next()
        while self._at_punct("."):
            self._next()
            self._next()
        if self._at_punct("("):
            self._skip_balanced("(", ")")

    def _skip_balanced(self, open_text: str, close_text: str) -> Token:
        """Consume a bracket group without interpreting its contents."""
        opener = self._next()
        if not (opener.kind == "punct" and opener.text == open_text):
            raise self._err(opener, f"expected {open_text!r}")
        depth = 1
        while depth:
            tok = self._next()
            if tok.kind != "punct":
                continue
            if tok.text == open_text:
                depth += 1
            elif tok.text == close_text:
                depth -= 1
        return tok

    def _skip_angles(self) -> None:
        opener = self._next()
        if not (opener.kind == "punct" and opener.text == "<"):
            raise self._err(opener, "expected '<'")
        depth = 1
        while depth:
            tok = self._next()
            if tok.kind == "punct":
                if tok.text == "<":
                    depth += 1
                elif tok.text == ">":
                    depth -= 1

    def _skip_mods_and_annotations(self) -> None:
        while True:
            tok = self._peek()
            if tok is None:
                return
            if tok.kind == "punct" and tok.text == "@":
                nxt = self._peek(1)
                if nxt is not None and nxt.kind == "word" and nxt.text == "interface":
                    return  # annotation type declaration, not an annotation use
                self._skip_annotation()
            elif tok.kind == "word" and tok.text in MODIFIERS:
                self.i += 1
            else:
                return

    def _type_decl_ahead(self) -> bool:
        tok = self._peek()
        if tok is None:
            return False
        mark = self.i
        try:
            self._skip_mods_and_annotations()
            tok = self._peek()
            if tok is None:
                return False
            if tok.kind == "punct" and tok.text == "@":
                nxt = self._peek(1)
                return nxt is not None and nxt.kind == "word" and nxt.text == "interface"
            if tok.kind != "word":
                return False
            if tok.text in TYPE_KEYWORDS:
                return True
            if tok.text == "record":
                # contextual keyword: 'record Name (' starts a record declaration
                n1 = self._peek(1)
                n2 = self._peek(2)
                return (
                    n1 is not None and n1.kind == "word"
                    and n2 is not None and n2.kind == "punct" and n2.text in ("(", "<")
                )
            return False
        finally:
            self.i = mark

    def _parse_type_decl(self, parent: str | None) -> None:
        self._skip_mods_and_annotations()
        tok = self._next()
        kind: str
        if tok.kind == "punct" and tok.text == "@":
            self._next()  # 'interface'
            kind = "annotation"
        elif tok.text in ("class", "interface", "enum"):
            kind = tok.text
        elif tok.text == "record":
            kind = "class"
        else:
            raise self._err(tok, f"expected type declaration, found {tok.text!r}")
        name_tok = self._next()
        if name_tok.kind != "word":
            raise self._err(name_tok, "expected type name")
        chain = f"{parent}${name_tok.text}" if parent else name_tok.text
        self.tree.types.append(TypeDecl(name=chain, kind=kind, line=name_tok.line))
        # type parameters, record header, extends/implements/permits
        while not self._at_punct("{"):
            tok = self._peek()
            if tok is None:
                raise self._err(None, "unexpected end of file in type header")
            if tok.kind == "punct" and tok.text == "<":
                self._skip_angles()
            elif tok.kind == "punct" and tok.text == "(":
                self._skip_balanced("(", ")")
            elif tok.kind == "punct" and tok.text == ";":
                self.i += 1  # degenerate body-less declaration
                return
            else:
                self.i += 1
        self._next()  # '{'
        self._parse_type_body(chain, kind)

    def _root_of(self, chain: str) -> str:
        return chain.split("$", 1)[0]

    def _next_anon_name(self, owner: str) -> str:
        root = self._root_of(owner)
        count = self._anon_counters.get(root, 0) + 1
        self._anon_counters[root] = count
        return f"{root}${count}"

    def _parse_type_body(self, chain: str, kind: str) -> None:
        """Parse members between a type's braces; the opening '{' is consumed."""
        if kind == "enum":
            self._parse_enum_constants(chain)
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, f"unexpected end of file in body of {chain}")
            if tok.kind == "punct" and tok.text == "}":
                self.i += 1
                return
            if tok.kind == "punct" and tok.text == ";":
                self.i += 1
                continue
            member_start = self.i
            self._skip_mods_and_annotations()
            tok = self._peek()
            if tok is None:
                raise self._err(None, f"unexpected end of file in body of {chain}")
            if tok.kind == "punct" and tok.text == "{":
                # static or instance initializer block
                self._scan_block(chain)
                continue
            if self._type_decl_ahead_here(tok):
                self.i = member_start
                self._parse_type_decl(parent=chain)
                continue
            self._parse_member(chain, member_start)

    def _type_decl_ahead_here(self, tok: Token) -> bool:
        if tok.kind == "punct" and tok.text == "@":
            nxt = self._peek(1)
            return nxt is not None and nxt.kind == "word" and nxt.text == "interface"
        if tok.kind != "word":
            return False
        if tok.text in TYPE_KEYWORDS:
            return True
        if tok.text == "record":
            n1 = self._peek(1)
            n2 = self._peek(2)
            return (
                n1 is not None and n1.kind == "word"
                and n2 is not None and n2.kind == "punct" and n2.text in ("(", "<")
            )
        return False

    def _parse_enum_constants(self, chain: str) -> None:
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, f"unexpected end of file in enum {chain}")
            if tok.kind == "punct" and tok.text == ";":
                self.i += 1
                return
            if tok.kind == "punct" and tok.text == "}":
                return  # constants-only enum; caller consumes '}'
            if tok.kind == "punct" and tok.text == "@":
                self._skip_annotation()
                continue
            if tok.kind == "word":
                self.i += 1  # constant name
                if self._at_punct("("):
                    self._scan_group(chain, "(", ")")
                if self._at_punct("{"):
                    anon = self._next_anon_name(chain)
                    self.tree.types.append(
                        TypeDecl(name=anon, kind="anonymous", line=tok.line)
                    )
                    self._next()  # '{'
                    self._parse_type_body(anon, "class")
                if self._at_punct(","):
                    self.i += 1
                continue
            self.i += 1

    # -- members ------------------------------------------------------------

    def _parse_member(self, chain: str, member_start: int) -> None:
        sig_start = self.i
        if self._at_punct("<"):
            self._skip_angles()
        last_word: Token | None = None
        word_count = 0
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, "unexpected end of file in member declaration")
            if tok.kind == "punct" and tok.text == "@":
                self._skip_annotation()
                continue
            if tok.kind == "punct" and tok.text == "<":
                self._skip_angles()
                continue
            if tok.kind == "punct" and tok.text in ("(", "=", ";", "{"):
                break
            if tok.kind == "word":
                last_word = tok
                word_count += 1
            self.i += 1
        terminator = tok.text
        if terminator == ";":
            self.i += 1  # field without initializer
            return
        if terminator == "=":
            self.i += 1
            self._scan_initializer(chain)
            return
        if terminator == "{":
            # record compact constructor: lone identifier before a block
            if last_word is None or word_count != 1:
                raise self._err(tok, "unexpected '{' in member declaration")
            close = self._scan_block(chain)
            self._add_method(
                chain,
                name=last_word.text,
                sig_end=last_word.end,
                parameter_names=(),
                member_start=member_start,
                sig_start=sig_start,
                has_body=True,
                end_tok=close,
            )
            return
        # terminator == "(": method or constructor
        if last_word is None:
            raise self._err(tok, "parameter list without a preceding name")
        name_tok = last_word
        params, close_paren = self._capture_params()
        parameter_names = _parameter_names(params)
        # optional trailing array dims, throws clause, annotation default value
        in_default = False
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, "unexpected end of file after parameter list")
            if tok.kind == "punct" and tok.text in ("[", "]"):
                self.i += 1
                continue
            if tok.kind == "word" and tok.text == "throws":
                self.i += 1
                continue
            if tok.kind == "word" and tok.text == "default":
                in_default = True
                self.i += 1
                continue
            if tok.kind == "punct" and tok.text == "@":
                self._skip_annotation()
                continue
            if tok.kind == "punct" and tok.text == "<":
                self._skip_angles()
                continue
            if in_default and tok.kind == "punct" and tok.text == "{":
                self._skip_balanced("{", "}")  # annotation array default value
                continue
            if tok.kind == "punct" and tok.text in (";", "{"):
                break
            if tok.kind in ("word", "number", "string", "char") or (
                tok.kind == "punct" and tok.text in (".", ",")
            ):
                self.i += 1
                continue
            if tok.kind == "punct" and tok.text == "(":
                self._skip_balanced("(", ")")
                continue
            raise self._err(tok, f"unexpected token {tok.text!r} after parameter list")
        if tok.text == ";":
            self.i += 1
            self._add_method(
                chain,
                name=name_tok.text,
                sig_end=close_paren.end,
                parameter_names=parameter_names,
                member_start=member_start,
                sig_start=sig_start,
                has_body=False,
                end_tok=tok,
            )
            return
        close = self._scan_block(chain)
        self._add_method(
            chain,
            name=name_tok.text,
            sig_end=close_paren.end,
            parameter_names=parameter_names,
            member_start=member_start,
            sig_start=sig_start,
            has_body=True,
            end_tok=close,
        )

    def _add_method(
        self,
        chain: str,
        *,
        name: str,
        sig_end: int,
        parameter_names: tuple[str, ...],
        member_start: int,
        sig_start: int,
        has_body: bool,
        end_tok: Token,
    ) -> None:
        start_tok = self.tokens[member_start]
        sig_tok = self.tokens[sig_start]
        signature = " ".join(self.text[sig_tok.start : sig_end].split())
        simple_name = chain.rsplit("$", 1)[-1]
        self.tree.methods.append(
            MethodDecl(
                class_name=chain,
                name=name,
                signature=signature,
                parameter_names=parameter_names,
                is_constructor=name == simple_name,
                has_body=has_body,
                start_line=start_tok.line,
                end_line=end_tok.end_line,
                start=start_tok.start,
                end=end_tok.end,
            )
        )

    def _capture_params(self) -> tuple[list[Token], Token]:
        opener = self._next()
        if not (opener.kind == "punct" and opener.text == "("):
            raise self._err(opener, "expected '('")
        depth = 1
        captured: list[Token] = []
        while True:
            tok = self._next()
            if tok.kind == "punct":
                if tok.text in ("(", "[", "<"):
                    depth += 1
                elif tok.text in (")", "]", ">"):
                    depth -= 1
                    if depth == 0:
                        return captured, tok
            captured.append(tok)

    # -- statement scanning -------------------------------------------------

    def _scan_initializer(self, owner: str) -> None:
        """Consume a field initializer up to its ';', finding anonymous classes."""
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, "unexpected end of file in field initializer")
            if tok.kind == "punct" and tok.text == ";":
                self.i += 1
                return
            if tok.kind == "word" and tok.text == "new":
                self._scan_creation(owner)
                continue
            if tok.kind == "punct" and tok.text == "(":
                self._scan_group(owner, "(", ")")
                continue
            if tok.kind == "punct" and tok.text == "[":
                self._scan_group(owner, "[", "]")
                continue
            if tok.kind == "punct" and tok.text == "{":
                self._scan_group(owner, "{", "}")
                continue
            if tok.kind == "punct" and tok.text == "}":
                raise self._err(tok, "unbalanced '}' in field initializer")
            self.i += 1

    def _scan_block(self, owner: str) -> Token:
        """Consume a '{...}' statement block, returning the closing token."""
        opener = self._next()
        if not (opener.kind == "punct" and opener.text == "{"):
            raise self._err(opener, "expected '{'")
        return self._scan_group_body(owner, "{", "}")

    def _scan_group(self, owner: str, open_text: str, close_text: str) -> Token:
        opener = self._next()
        if not (opener.kind == "punct" and opener.text == open_text):
            raise self._err(opener, f"expected {open_text!r}")
        return self._scan_group_body(owner, open_text, close_text)

    def _scan_group_body(self, owner: str, open_text: str, close_text: str) -> Token:
        others = {"(": ")", "[": "]", "{": "}"}
        closers = {")": "(", "]": "[", "}": "{"}
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, f"unexpected end of file, expected {close_text!r}")
            if tok.kind == "punct" and tok.text == close_text:
                self.i += 1
                return tok
            if tok.kind == "punct" and tok.text in closers:
                raise self._err(tok, f"unbalanced {tok.text!r}")
            if tok.kind == "word" and tok.text == "new":
                self._scan_creation(owner)
                continue
            if (
                open_text == "{"
                and tok.kind == "word"
                and tok.text == "class"
                and self._prev_text() != "."
            ):
                nxt = self._peek(1)
                if nxt is not None and nxt.kind == "word":
                    self._parse_type_decl(parent=owner)  # local class
                    continue
            if tok.kind == "punct" and tok.text in others:
                self._scan_group(owner, tok.text, others[tok.text])
                continue
            self.i += 1

    def _prev_text(self) -> str:
        return self.tokens[self.i - 1].text if self.i > 0 else ""

    def _scan_creation(self, owner: str) -> None:
        """Consume a 'new ...' expression, recursing into anonymous class bodies."""
        new_tok = self._next()  # 'new'
        saw_array = False
        while True:
            tok = self._peek()
            if tok is None:
                raise self._err(None, "unexpected end of file after 'new'")
            if tok.kind == "word" or (tok.kind == "punct" and tok.text == "."):
                self.i += 1
                continue
            if tok.kind == "punct" and tok.text == "<":
                self._skip_angles()
                continue
            if tok.kind == "punct" and tok.text == "[":
                saw_array = True
                self._scan_group(owner, "[", "]")
                continue
            break
        if saw_array:
            if self._at_punct("{"):
                self._scan_group(owner, "{", "}")  # array initializer
            return
        if self._at_punct("("):
            self._scan_group(owner, "(", ")")
            if self._at_punct("{"):
                anon = self._next_anon_name(owner)
                self.tree.types.append(
                    TypeDecl(name=anon, kind="anonymous", line=new_tok.line)
                )
                self._next()  # '{'
                self._parse_type_body(anon, "class")


def _parameter_names(tokens: list[Token]) -> tuple[str, ...]:
    """Extract declared parameter names from the tokens between '(' and ')'.

    Splits on top-level commas; the name is the last identifier of each
    parameter, which holds for generics, arrays (both `int[] a` and
    `int a[]`), varargs, and annotated parameters. Receiver parameters
    (`Type this`) are dropped.
    """
    if not tokens:
        return ()
    params: list[list[Token]] = [[]]
    depth = 0
    for tok in tokens:
        if tok.kind == "punct":
            if tok.text in ("(", "[", "<"):
                depth += 1
            elif tok.text in (")", "]", ">"):
                depth -= 1
            elif tok.text == "," and depth == 0:
                params.append([])
                continue
        params[-1].append(tok)
    names: list[str] = []
    for param in params:
        words = [t.text for t in param if t.kind == "word"]
        if not words:
            continue
        name = words[-1]
        if name == "this":
            continue
        names.append(name)
    return tuple(names)


def parse_source(text: str, path: str = "<memory>") -> SyntaxTree:
    """Parse Java source into a structural tree of types and method spans."""
    return _Parser(text, path).parse()
