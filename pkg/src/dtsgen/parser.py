"""A hand-written recursive-descent parser for declaration files.

Covers the generated subset (declare function overload groups, declare
class, interfaces, namespaces, type aliases, export assignments, export
functions) and reads past it permissively: generics, tuples, intersections,
literal types, index and call signatures, rest parameters and member
modifiers all parse and contribute feature tags even though later stages do
not model their semantics.  Constructs outside the declaration language
(imports, triple-slash references, enums, const declarations) are skipped
and leave an unsupported-syntax marker so the file can be excluded from
comparison.

Errors carry 1-based line and column positions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .declaration import (
    ClassDecl,
    DeclarationModule,
    FunctionDecl,
    IndexSignature,
    InterfaceDecl,
    Namespace,
    Signature,
    TemplateKind,
    TypeAliasDecl,
    UNSUPPORTED_SYNTAX,
    compute_feature_tags,
)
from .tstypes import (
    ANY,
    NULL,
    OBJECT,
    UNDEFINED,
    VOID,
    AnyType,
    ArrayType,
    Callback,
    Intersection,
    LiteralType,
    NamedRef,
    ObjectShape,
    Param,
    Primitive,
    ShapeProp,
    TsType,
    TupleType,
    union_of,
)


class DtsSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class AliasCycleError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # ident, string, number, punct, eof
    value: str
    line: int
    column: int


_PUNCT_TWO = {"=>"}
_PUNCT_ONE = set("(){}[]<>,;:?|&=.")


def _tokenize(text: str) -> tuple[list[_Token], bool]:
    tokens: list[_Token] = []
    saw_triple_slash = False
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("///", i):
            saw_triple_slash = True
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end == -1:
                raise DtsSyntaxError("unterminated comment", line, col)
            advance(end + 2 - i)
            continue
        if ch.isalpha() or ch in "_$":
            start = i
            start_line, start_col = line, col
            while i < n and (text[i].isalnum() or text[i] in "_$"):
                advance(1)
            tokens.append(_Token("ident", text[start:i], start_line, start_col))
            continue
        if ch.isdigit():
            start = i
            start_line, start_col = line, col
            while i < n and (text[i].isdigit() or text[i] == "."):
                advance(1)
            tokens.append(_Token("number", text[start:i], start_line, start_col))
            continue
        if ch in "'\"":
            quote = ch
            start_line, start_col = line, col
            advance(1)
            value = []
            while i < n and text[i] != quote:
                if text[i] == "\n":
                    raise DtsSyntaxError("unterminated string literal", start_line, start_col)
                if text[i] == "\\" and i + 1 < n:
                    value.append(text[i + 1])
                    advance(2)
                    continue
                value.append(text[i])
                advance(1)
            if i >= n:
                raise DtsSyntaxError("unterminated string literal", start_line, start_col)
            advance(1)
            tokens.append(_Token("string", "".join(value), start_line, start_col))
            continue
        if text.startswith("...", i):
            tokens.append(_Token("punct", "...", line, col))
            advance(3)
            continue
        two = text[i : i + 2]
        if two in _PUNCT_TWO:
            tokens.append(_Token("punct", two, line, col))
            advance(2)
            continue
        if ch in _PUNCT_ONE:
            tokens.append(_Token("punct", ch, line, col))
            advance(1)
            continue
        # Characters outside the grammar become punct tokens so statements
        # containing them can still be skipped; the parser rejects them with
        # a located error wherever they matter structurally.
        tokens.append(_Token("punct", ch, line, col))
        advance(1)
    tokens.append(_Token("eof", "", line, col))
    return tokens, saw_triple_slash


_PRIMITIVE_NAMES = {"string", "number", "boolean"}
_MODIFIERS = {"static", "readonly", "public", "private", "protected", "abstract"}
_TAGGED_MODIFIERS = {"static", "readonly", "public", "private", "protected"}


@dataclass
class _Scope:
    functions: dict[str, list[tuple[Signature, frozenset, tuple]]]
    function_order: list[str]
    classes: dict[str, ClassDecl]
    class_order: list[str]
    interfaces: dict[str, InterfaceDecl]
    interface_order: list[str]
    aliases: dict[str, TypeAliasDecl]
    alias_order: list[str]
    namespaces: dict[str, "_Scope"]
    namespace_order: list[str]

    @staticmethod
    def empty() -> "_Scope":
        return _Scope({}, [], {}, [], {}, [], {}, [], {}, [])


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens, self.unsupported = _tokenize(text)
        self.pos = 0
        self.export_assignment: str | None = None
        self.module_header = ""

    # -- token helpers ----------------------------------------------------

    def _peek(self, offset: int = 0) -> _Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def _next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _error(self, message: str, tok: _Token | None = None) -> DtsSyntaxError:
        tok = tok or self._peek()
        return DtsSyntaxError(message, tok.line, tok.column)

    def _expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self._peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            expected = value if value is not None else kind
            raise self._error(f"expected {expected!r}, found {tok.value or tok.kind!r}")
        return self._next()

    def _at(self, kind: str, value: str | None = None) -> bool:
        tok = self._peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def _eat(self, kind: str, value: str | None = None) -> bool:
        if self._at(kind, value):
            self._next()
            return True
        return False

    # -- declarations ------------------------------------------------------

    def parse_module(self, module_name: str) -> DeclarationModule:
        scope = _Scope.empty()
        while not self._at("eof"):
            self._parse_declaration(scope, top_level=True)
        return self._build_module(scope, module_name)

    def _skip_statement(self) -> None:
        # Consume an unsupported construct: through the matching braces if a
        # block opens first, otherwise to the next semicolon.
        depth = 0
        while not self._at("eof"):
            tok = self._next()
            if tok.kind == "punct":
                if tok.value == "{":
                    depth += 1
                elif tok.value == "}":
                    depth -= 1
                    if depth <= 0:
                        if self._at("punct", ";"):
                            self._next()
                        return
                elif tok.value == ";" and depth == 0:
                    return

    def _parse_declaration(self, scope: _Scope, top_level: bool) -> None:
        tok = self._peek()
        if tok.kind != "ident":
            raise self._error(f"expected a declaration, found {tok.value or tok.kind!r}")
        if tok.value == "export":
            nxt = self._peek(1)
            if nxt.kind == "punct" and nxt.value == "=":
                if not top_level:
                    raise self._error("export assignment must appear at top level")
                self._next()
                self._next()
                name = self._expect("ident").value
                self._expect("punct", ";")
                self.export_assignment = name
                return
            if nxt.kind == "punct" and nxt.value == "{" or nxt.value in ("default", "as"):
                self.unsupported = True
                self._skip_statement()
                return
            self._next()
            self._parse_declaration_body(scope)
            return
        if tok.value == "declare":
            self._next()
            self._parse_declaration_body(scope)
            return
        if tok.value in ("import", "const", "var", "let", "enum"):
            self.unsupported = True
            self._skip_statement()
            return
        self._parse_declaration_body(scope)

    def _parse_declaration_body(self, scope: _Scope) -> None:
        tok = self._peek()
        if tok.kind != "ident":
            raise self._error(f"expected a declaration, found {tok.value or tok.kind!r}")
        if tok.value == "function":
            self._next()
            self._parse_function(scope)
        elif tok.value == "class":
            self._next()
            self._parse_class(scope)
        elif tok.value == "interface":
            self._next()
            self._parse_interface(scope)
        elif tok.value == "type":
            self._next()
            self._parse_alias(scope)
        elif tok.value == "namespace":
            self._next()
            self._parse_namespace(scope)
        elif tok.value == "module":
            if self._peek(1).kind == "string":
                # An ambient module block wrapping the declarations; unwrap
                # it into the surrounding scope and adopt its name.
                self._next()
                name = self._next().value
                if not self.module_header:
                    self.module_header = name
                self._expect("punct", "{")
                while not self._at("punct", "}") and not self._at("eof"):
                    self._parse_declaration(scope, top_level=True)
                self._expect("punct", "}")
            else:
                self._next()
                self._parse_namespace(scope)
        elif tok.value in ("import", "const", "var", "let", "enum", "global", "abstract"):
            self.unsupported = True
            self._skip_statement()
        else:
            raise self._error(f"unknown declaration keyword {tok.value!r}")

    def _parse_type_params(self) -> tuple[str, ...]:
        if not self._at("punct", "<"):
            return ()
        self._next()
        names: list[str] = []
        depth = 1
        expect_name = True
        while depth > 0:
            tok = self._next()
            if tok.kind == "eof":
                raise self._error("unterminated type parameter list", tok)
            if tok.kind == "punct" and tok.value == "<":
                depth += 1
            elif tok.kind == "punct" and tok.value == ">":
                depth -= 1
            elif tok.kind == "punct" and tok.value == "," and depth == 1:
                expect_name = True
            elif tok.kind == "ident" and expect_name and depth == 1:
                names.append(tok.value)
                expect_name = False
        return tuple(names)

    def _parse_function(self, scope: _Scope) -> None:
        name_tok = self._expect("ident")
        name = name_tok.value
        type_params = self._parse_type_params()
        params = self._parse_params()
        return_type: TsType = ANY
        if self._eat("punct", ":"):
            return_type = self._parse_type()
        self._expect("punct", ";")
        if name not in scope.functions:
            scope.functions[name] = []
            scope.function_order.append(name)
        scope.functions[name].append((Signature(params, return_type), frozenset(), type_params))

    def _parse_params(self) -> tuple[Param, ...]:
        self._expect("punct", "(")
        params: list[Param] = []
        while not self._at("punct", ")"):
            rest = self._eat("punct", "...")
            name_tok = self._peek()
            if name_tok.kind != "ident":
                raise self._error("expected a parameter name")
            self._next()
            optional = self._eat("punct", "?")
            if self._eat("punct", ":"):
                ptype = self._parse_type()
            else:
                ptype = ANY
            params.append(Param(name_tok.value, ptype, optional, rest))
            if not self._eat("punct", ","):
                break
        self._expect("punct", ")")
        return tuple(params)

    def _parse_class(self, scope: _Scope) -> None:
        name_tok = self._expect("ident")
        name = name_tok.value
        if name in scope.classes:
            raise self._error(f"duplicate class declaration {name!r}", name_tok)
        type_params = self._parse_type_params()
        while self._at("ident", "extends") or self._at("ident", "implements"):
            self._next()
            self._parse_type()
            while self._eat("punct", ","):
                self._parse_type()
        self._expect("punct", "{")
        constructors: list[Signature] = []
        methods: dict[str, FunctionDecl] = {}
        method_order: list[str] = []
        properties: list[ShapeProp] = []
        while not self._eat("punct", "}"):
            modifiers: set[str] = set()
            while self._peek().kind == "ident" and self._peek().value in _MODIFIERS:
                nxt = self._peek(1)
                # a modifier name can itself be a member name
                if nxt.kind == "punct" and nxt.value in ("(", ":", "?", ";"):
                    break
                modifiers.add(self._next().value)
            if self._at("ident", "constructor") and self._peek(1).value == "(":
                self._next()
                params = self._parse_params()
                self._eat("punct", ";")
                constructors.append(Signature(params, VOID))
                continue
            member_name, member = self._parse_member(modifiers)
            if isinstance(member, Signature):
                tagged = frozenset(modifiers & _TAGGED_MODIFIERS)
                if member_name in methods:
                    existing = methods[member_name]
                    methods[member_name] = replace(
                        existing, overloads=existing.overloads + (member,)
                    )
                else:
                    methods[member_name] = FunctionDecl(
                        member_name, (member,), modifiers=tagged
                    )
                    method_order.append(member_name)
            else:
                properties.append(member)
        scope.classes[name] = ClassDecl(
            name,
            tuple(constructors),
            tuple(methods[n] for n in method_order),
            tuple(properties),
            type_params,
        )
        scope.class_order.append(name)

    def _parse_member(self, modifiers: set[str]) -> tuple[str, Signature | ShapeProp]:
        name_tok = self._peek()
        if name_tok.kind == "ident":
            name = self._next().value
        elif name_tok.kind == "string":
            name = self._next().value
        else:
            raise self._error("expected a member name")
        optional = self._eat("punct", "?")
        if self._at("punct", "(") or self._at("punct", "<"):
            self._parse_type_params()
            params = self._parse_params()
            return_type: TsType = ANY
            if self._eat("punct", ":"):
                return_type = self._parse_type()
            self._eat("punct", ";")
            if optional:
                # an optional method is an optional function-typed property
                return name, ShapeProp(
                    name, Callback(params, return_type), optional=True,
                    readonly="readonly" in modifiers,
                )
            return name, Signature(params, return_type)
        self._expect("punct", ":")
        ptype = self._parse_type()
        self._eat("punct", ";")
        return name, ShapeProp(name, ptype, optional, readonly="readonly" in modifiers)

    def _parse_interface(self, scope: _Scope) -> None:
        name_tok = self._expect("ident")
        name = name_tok.value
        if name in scope.interfaces:
            raise self._error(f"duplicate interface declaration {name!r}", name_tok)
        type_params = self._parse_type_params()
        while self._at("ident", "extends"):
            self._next()
            self._parse_type()
            while self._eat("punct", ","):
                self._parse_type()
        body = self._parse_object_members()
        scope.interfaces[name] = InterfaceDecl(
            name, body.props, body.index_signatures, body.call_signatures, type_params
        )
        scope.interface_order.append(name)

    @dataclass
    class _ObjectBody:
        props: tuple[ShapeProp, ...]
        index_signatures: tuple[IndexSignature, ...]
        call_signatures: tuple[Signature, ...]

    def _parse_object_members(self) -> "_Parser._ObjectBody":
        self._expect("punct", "{")
        props: list[ShapeProp] = []
        index_signatures: list[IndexSignature] = []
        call_signatures: list[Signature] = []
        while not self._eat("punct", "}"):
            if self._at("punct", "["):
                self._next()
                key_name = self._expect("ident").value
                self._expect("punct", ":")
                key_type = self._parse_type()
                self._expect("punct", "]")
                self._expect("punct", ":")
                value_type = self._parse_type()
                self._eat("punct", ";")
                self._eat("punct", ",")
                index_signatures.append(IndexSignature(key_name, key_type, value_type))
                continue
            if self._at("punct", "(") or self._at("ident", "new") and self._peek(1).value == "(":
                self._eat("ident", "new")
                params = self._parse_params()
                return_type: TsType = ANY
                if self._eat("punct", ":"):
                    return_type = self._parse_type()
                self._eat("punct", ";")
                self._eat("punct", ",")
                call_signatures.append(Signature(params, return_type))
                continue
            modifiers: set[str] = set()
            while self._at("ident", "readonly") and self._peek(1).value not in (":", "?", "(", ";"):
                self._next()
                modifiers.add("readonly")
            name, member = self._parse_member(modifiers)
            self._eat("punct", ",")
            if isinstance(member, Signature):
                member = ShapeProp(name, Callback(member.params, member.return_type))
            props.append(member)
        return _Parser._ObjectBody(tuple(props), tuple(index_signatures), tuple(call_signatures))

    def _parse_alias(self, scope: _Scope) -> None:
        name_tok = self._expect("ident")
        name = name_tok.value
        if name in scope.aliases:
            raise self._error(f"duplicate type alias {name!r}", name_tok)
        type_params = self._parse_type_params()
        self._expect("punct", "=")
        aliased = self._parse_type()
        self._expect("punct", ";")
        scope.aliases[name] = TypeAliasDecl(name, aliased, type_params)
        scope.alias_order.append(name)

    def _parse_namespace(self, scope: _Scope) -> None:
        name = self._expect("ident").value
        target = scope
        parts = [name]
        while self._eat("punct", "."):
            parts.append(self._expect("ident").value)
        for part in parts:
            if part not in target.namespaces:
                target.namespaces[part] = _Scope.empty()
                target.namespace_order.append(part)
            target = target.namespaces[part]
        self._expect("punct", "{")
        while not self._eat("punct", "}"):
            self._parse_declaration(target, top_level=False)

    # -- types -------------------------------------------------------------

    def _parse_type(self) -> TsType:
        self._eat("punct", "|")
        members = [self._parse_intersection()]
        while self._eat("punct", "|"):
            members.append(self._parse_intersection())
        if len(members) == 1:
            return members[0]
        return union_of(*members)

    def _parse_intersection(self) -> TsType:
        members = [self._parse_postfix()]
        while self._eat("punct", "&"):
            members.append(self._parse_postfix())
        if len(members) == 1:
            return members[0]
        return Intersection(tuple(members))

    def _parse_postfix(self) -> TsType:
        t = self._parse_primary()
        while self._at("punct", "[") and self._peek(1).value == "]":
            self._next()
            self._next()
            t = ArrayType(t)
        return t

    def _try_parse_callback(self) -> Callback | None:
        saved = self.pos
        try:
            params = self._parse_params()
            if not self._eat("punct", "=>"):
                raise self._error("not a function type")
            return Callback(params, self._parse_type())
        except DtsSyntaxError:
            self.pos = saved
            return None

    def _parse_primary(self) -> TsType:
        tok = self._peek()
        if tok.kind == "punct" and tok.value == "(":
            callback = self._try_parse_callback()
            if callback is not None:
                return callback
            self._next()
            inner = self._parse_type()
            self._expect("punct", ")")
            return inner
        if tok.kind == "punct" and tok.value == "{":
            body = self._parse_object_members()
            if body.index_signatures or body.call_signatures:
                # literal shapes only model plain properties
                self.unsupported = True
            return ObjectShape(body.props)
        if tok.kind == "punct" and tok.value == "[":
            self._next()
            items = []
            while not self._at("punct", "]"):
                items.append(self._parse_type())
                if not self._eat("punct", ","):
                    break
            self._expect("punct", "]")
            return TupleType(tuple(items))
        if tok.kind == "string":
            self._next()
            return LiteralType(f"'{tok.value}'")
        if tok.kind == "number":
            self._next()
            return LiteralType(tok.value)
        if tok.kind != "ident":
            raise self._error(f"expected a type, found {tok.value or tok.kind!r}")
        if tok.value == "new":
            self._next()
            callback = self._try_parse_callback()
            if callback is not None:
                return callback
            raise self._error("malformed constructor type")
        if tok.value in ("true", "false"):
            self._next()
            return LiteralType(tok.value)
        if tok.value == "typeof":
            self.unsupported = True
            self._next()
            self._expect("ident")
            while self._eat("punct", "."):
                self._expect("ident")
            return ANY
        self._next()
        name = tok.value
        if name in _PRIMITIVE_NAMES:
            return Primitive(name)
        if name == "void":
            return VOID
        if name == "any":
            return ANY
        if name == "null":
            return NULL
        if name == "undefined":
            return UNDEFINED
        if name == "object":
            return OBJECT
        while self._at("punct", ".") and self._peek(1).kind == "ident":
            self._next()
            name += "." + self._next().value
        args: tuple[TsType, ...] = ()
        if self._at("punct", "<"):
            self._next()
            collected = [self._parse_type()]
            while self._eat("punct", ","):
                collected.append(self._parse_type())
            self._expect("punct", ">")
            args = tuple(collected)
        return NamedRef(name, args)

    # -- assembly ----------------------------------------------------------

    def _build_scope(self, scope: _Scope) -> Namespace:
        functions = []
        for name in scope.function_order:
            entries = scope.functions[name]
            modifiers = frozenset().union(*(e[1] for e in entries))
            type_params = next((e[2] for e in entries if e[2]), ())
            functions.append(
                FunctionDecl(name, tuple(e[0] for e in entries), modifiers, type_params)
            )
        return Namespace(
            name="",
            functions=tuple(functions),
            classes=tuple(scope.classes[n] for n in scope.class_order),
            interfaces=tuple(scope.interfaces[n] for n in scope.interface_order),
            aliases=tuple(scope.aliases[n] for n in scope.alias_order),
            namespaces=tuple(
                replace(self._build_scope(scope.namespaces[n]), name=n)
                for n in scope.namespace_order
            ),
        )

    def _build_module(self, scope: _Scope, module_name: str) -> DeclarationModule:
        top = self._build_scope(scope)
        template = TemplateKind.MODULE
        if self.export_assignment:
            target = self.export_assignment
            if target in scope.classes:
                template = TemplateKind.MODULE_CLASS
            elif target in scope.functions:
                template = TemplateKind.MODULE_FUNCTION
            elif target not in scope.namespaces and target not in scope.aliases:
                last = self.tokens[-1]
                raise DtsSyntaxError(
                    f"export assignment target {target!r} is not declared", last.line, last.column
                )
        module = DeclarationModule(
            module_name=module_name or self.module_header,
            template=template,
            export_assignment=self.export_assignment,
            functions=top.functions,
            classes=top.classes,
            interfaces=top.interfaces,
            aliases=top.aliases,
            namespaces=top.namespaces,
            feature_tags=frozenset({UNSUPPORTED_SYNTAX}) if self.unsupported else frozenset(),
        )
        return replace(module, feature_tags=compute_feature_tags(module))


def parse_declaration(text: str, module_name: str = "") -> DeclarationModule:
    """Parse declaration-file source text into a declaration module.

    Raises DtsSyntaxError with line and column information on malformed
    input and on duplicate declarations that are not legal overloads.
    """

    return _Parser(text).parse_module(module_name)


def tag_features(module: DeclarationModule) -> frozenset[str]:
    """The feature tags of a module, recomputed from its content."""

    return compute_feature_tags(module)


# ---------------------------------------------------------------------------
# Alias expansion


def _collect_aliases(module: DeclarationModule) -> dict[str, TypeAliasDecl]:
    table: dict[str, TypeAliasDecl] = {}

    def walk(aliases, namespaces, prefix: str) -> None:
        for alias in aliases:
            table.setdefault(alias.name, alias)
            if prefix:
                table.setdefault(f"{prefix}.{alias.name}", alias)
        for ns in namespaces:
            walk(ns.aliases, ns.namespaces, f"{prefix}.{ns.name}" if prefix else ns.name)

    walk(module.aliases, module.namespaces, "")
    return table


class _AliasExpander:
    def __init__(self, table: dict[str, TypeAliasDecl]) -> None:
        self.table = table
        self.stack: list[str] = []

    def expand(self, t: TsType) -> TsType:
        if isinstance(t, NamedRef) and not t.args:
            alias = self.table.get(t.name)
            if alias is not None and not alias.type_params:
                if alias.name in self.stack:
                    raise AliasCycleError(
                        "cyclic type alias: " + " -> ".join(self.stack + [alias.name])
                    )
                self.stack.append(alias.name)
                try:
                    return self.expand(alias.type)
                finally:
                    self.stack.pop()
        if isinstance(t, NamedRef):
            return NamedRef(t.name, tuple(self.expand(a) for a in t.args))
        if isinstance(t, ArrayType):
            return ArrayType(self.expand(t.element))
        if isinstance(t, Callback):
            return Callback(
                tuple(replace(p, type=self.expand(p.type)) for p in t.params),
                self.expand(t.return_type),
            )
        if isinstance(t, ObjectShape):
            return ObjectShape(tuple(replace(p, type=self.expand(p.type)) for p in t.props))
        if isinstance(t, TupleType):
            return TupleType(tuple(self.expand(i) for i in t.items))
        if isinstance(t, Intersection):
            return Intersection(tuple(self.expand(m) for m in t.members))
        if hasattr(t, "members") and isinstance(getattr(t, "members"), tuple):
            return union_of(*(self.expand(m) for m in t.members))
        return t


class _LiteralHoister:
    """Give literal (anonymous) interface annotations a named shape."""

    def __init__(self, taken: set[str]) -> None:
        self.taken = set(taken)
        self.hoisted: list[InterfaceDecl] = []
        self._by_shape: dict[tuple, str] = {}

    def hoist(self, t: TsType) -> TsType:
        from .tstypes import canonical_key

        if isinstance(t, ObjectShape):
            props = tuple(replace(p, type=self.hoist(p.type)) for p in t.props)
            shape = ObjectShape(props)
            key = canonical_key(shape)
            if key in self._by_shape:
                return NamedRef(self._by_shape[key])
            n = len(self.hoisted) + 1
            name = f"I__literal_{n}"
            while name in self.taken:
                n += 1
                name = f"I__literal_{n}"
            self.taken.add(name)
            self._by_shape[key] = name
            self.hoisted.append(InterfaceDecl(name, props))
            return NamedRef(name)
        if isinstance(t, NamedRef):
            return NamedRef(t.name, tuple(self.hoist(a) for a in t.args))
        if isinstance(t, ArrayType):
            return ArrayType(self.hoist(t.element))
        if isinstance(t, Callback):
            return Callback(
                tuple(replace(p, type=self.hoist(p.type)) for p in t.params),
                self.hoist(t.return_type),
            )
        if isinstance(t, TupleType):
            return TupleType(tuple(self.hoist(i) for i in t.items))
        if isinstance(t, Intersection):
            return Intersection(tuple(self.hoist(m) for m in t.members))
        if hasattr(t, "members") and isinstance(getattr(t, "members"), tuple):
            return union_of(*(self.hoist(m) for m in t.members))
        return t


def _map_types(module: DeclarationModule, fn) -> DeclarationModule:
    def map_signature(sig: Signature) -> Signature:
        return Signature(
            tuple(replace(p, type=fn(p.type)) for p in sig.params), fn(sig.return_type)
        )

    def map_function(f: FunctionDecl) -> FunctionDecl:
        return replace(f, overloads=tuple(map_signature(s) for s in f.overloads))

    def map_class(c: ClassDecl) -> ClassDecl:
        return ClassDecl(
            c.name,
            tuple(map_signature(s) for s in c.constructors),
            tuple(map_function(m) for m in c.methods),
            tuple(replace(p, type=fn(p.type)) for p in c.properties),
            c.type_params,
        )

    def map_interface(i: InterfaceDecl) -> InterfaceDecl:
        return InterfaceDecl(
            i.name,
            tuple(replace(p, type=fn(p.type)) for p in i.props),
            tuple(
                IndexSignature(s.key_name, fn(s.key_type), fn(s.value_type))
                for s in i.index_signatures
            ),
            tuple(map_signature(s) for s in i.call_signatures),
            i.type_params,
        )

    def map_namespace(ns: Namespace) -> Namespace:
        return Namespace(
            ns.name,
            tuple(map_function(f) for f in ns.functions),
            tuple(map_class(c) for c in ns.classes),
            tuple(map_interface(i) for i in ns.interfaces),
            tuple(replace(a, type=fn(a.type)) for a in ns.aliases),
            tuple(map_namespace(n) for n in ns.namespaces),
        )

    return replace(
        module,
        functions=tuple(map_function(f) for f in module.functions),
        classes=tuple(map_class(c) for c in module.classes),
        interfaces=tuple(map_interface(i) for i in module.interfaces),
        aliases=tuple(replace(a, type=fn(a.type)) for a in module.aliases),
        namespaces=tuple(map_namespace(n) for n in module.namespaces),
    )


def _strip_aliases(module: DeclarationModule) -> DeclarationModule:
    def strip_ns(ns: Namespace) -> Namespace:
        return replace(
            ns,
            aliases=tuple(a for a in ns.aliases if a.type_params),
            namespaces=tuple(strip_ns(n) for n in ns.namespaces),
        )

    return replace(
        module,
        aliases=tuple(a for a in module.aliases if a.type_params),
        namespaces=tuple(strip_ns(ns) for ns in module.namespaces),
    )


def _all_declared_names(module: DeclarationModule) -> set[str]:
    names: set[str] = set()

    def walk(fns, classes, ifaces, aliases, namespaces) -> None:
        names.update(f.name for f in fns)
        names.update(c.name for c in classes)
        names.update(i.name for i in ifaces)
        names.update(a.name for a in aliases)
        for ns in namespaces:
            names.add(ns.name)
            walk(ns.functions, ns.classes, ns.interfaces, ns.aliases, ns.namespaces)

    walk(module.functions, module.classes, module.interfaces, module.aliases, module.namespaces)
    return names


def expand_aliases(module: DeclarationModule) -> DeclarationModule:
    """Expand type aliases transitively and hoist literal interfaces.

    Alias definitions disappear from the module (generic aliases, which are
    not modeled, stay behind).  Cyclic aliases raise AliasCycleError.  The
    result is idempotent under re-expansion.
    """

    table = _collect_aliases(module)
    expander = _AliasExpander(table)
    expanded = _map_types(module, expander.expand)
    expanded = _strip_aliases(expanded)

    hoister = _LiteralHoister(_all_declared_names(expanded))
    hoisted = _map_types(expanded, hoister.hoist)
    if hoister.hoisted:
        hoisted = replace(hoisted, interfaces=hoisted.interfaces + tuple(hoister.hoisted))
    return replace(hoisted, feature_tags=compute_feature_tags(hoisted))
