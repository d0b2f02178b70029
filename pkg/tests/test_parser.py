"""Declaration file parsing: templates, members, types, errors, aliases."""

import pytest

from astgen import module_stream
from dtsgen.declaration import TemplateKind, normalize
from dtsgen.emitter import emit
from dtsgen.parser import (
    AliasCycleError,
    DtsSyntaxError,
    expand_aliases,
    parse_declaration,
)
from dtsgen.tstypes import (
    ANY,
    BOOLEAN,
    NUMBER,
    STRING,
    VOID,
    ArrayType,
    Callback,
    Intersection,
    LiteralType,
    NamedRef,
    ObjectShape,
    Param,
    ShapeProp,
    TupleType,
    union_of,
)


def first_sig(module, index=0):
    return module.functions[index].overloads[0]


# ---------------------------------------------------------------------------
# templates


def test_named_exports_select_module_template():
    m = parse_declaration("export function f(x: string): void;\n", module_name="m")
    assert m.template is TemplateKind.MODULE
    assert m.export_assignment is None
    assert m.module_name == "m"


def test_export_assignment_to_class_selects_module_class():
    src = "export = C;\ndeclare class C {\n  constructor(x: string);\n}\n"
    m = parse_declaration(src)
    assert m.template is TemplateKind.MODULE_CLASS
    assert m.export_assignment == "C"
    assert m.classes[0].constructors[0].params[0].type == STRING


def test_export_assignment_to_function_selects_module_function():
    src = "export = F;\ndeclare function F(): void;\n"
    m = parse_declaration(src)
    assert m.template is TemplateKind.MODULE_FUNCTION


def test_export_assignment_to_namespace_keeps_module_template():
    src = "export = ns;\ndeclare namespace ns {\n  export function f(): void;\n}\n"
    m = parse_declaration(src)
    assert m.template is TemplateKind.MODULE
    assert m.export_assignment == "ns"


def test_export_assignment_without_a_declaration_is_an_error():
    with pytest.raises(DtsSyntaxError, match="not declared"):
        parse_declaration("export = Missing;\n")


def test_declare_module_wrapper_is_transparent():
    src = 'declare module "wrapped" {\n  export function f(): void;\n}\n'
    m = parse_declaration(src)
    assert m.module_name == "wrapped"
    assert [f.name for f in m.functions] == ["f"]


# ---------------------------------------------------------------------------
# functions and parameters


def test_overloads_group_under_one_function():
    src = "export function f(x: string): string;\nexport function f(x: number): number;\n"
    m = parse_declaration(src)
    assert len(m.functions) == 1
    assert len(m.functions[0].overloads) == 2


def test_optional_and_rest_parameters():
    src = "export function f(a: string, b?: number, ...rest: string[]): void;\n"
    sig = first_sig(parse_declaration(src))
    assert [p.optional for p in sig.params] == [False, True, False]
    assert sig.params[2].rest
    assert sig.params[2].type == ArrayType(STRING)


def test_missing_annotations_default_to_any():
    src = "export function f(x, y): any;\n"
    sig = first_sig(parse_declaration(src))
    assert [p.type for p in sig.params] == [ANY, ANY]
    assert sig.return_type == ANY


def test_missing_return_annotation_defaults_to_any():
    src = "export function f();\n"
    assert first_sig(parse_declaration(src)).return_type == ANY


def test_generic_function_records_type_parameter_tag():
    src = "export function map<T, U>(xs: T[], f: (x: T) => U): U[];\n"
    m = parse_declaration(src)
    assert m.functions[0].type_params == ("T", "U")
    assert "generics-function" in m.feature_tags


# ---------------------------------------------------------------------------
# type expressions


@pytest.mark.parametrize(
    "src_type, expected",
    [
        ("string", STRING),
        ("number", NUMBER),
        ("boolean", BOOLEAN),
        ("string | number", union_of(STRING, NUMBER)),
        ("| string | number", union_of(STRING, NUMBER)),
        ("string[]", ArrayType(STRING)),
        ("string[][]", ArrayType(ArrayType(STRING))),
        ("(string | number)[]", ArrayType(union_of(STRING, NUMBER))),
        ("Array<string>", NamedRef("Array", (STRING,))),
        ("RegExp", NamedRef("RegExp")),
        ("ns.Inner", NamedRef("ns.Inner")),
        ("() => void", Callback((), VOID)),
        ("(x: string) => boolean", Callback((Param("x", STRING),), BOOLEAN)),
        ("(x?: string) => void", Callback((Param("x", STRING, optional=True),), VOID)),
        ("{ a: string }", ObjectShape((ShapeProp("a", STRING),))),
        ("{ a?: string; b: number }", ObjectShape((ShapeProp("a", STRING, optional=True), ShapeProp("b", NUMBER)))),
        ("{ 'a-b': string }", ObjectShape((ShapeProp("a-b", STRING),))),
        ("[string, number]", TupleType((STRING, NUMBER))),
        ("'up'", LiteralType("'up'")),
        ("42", LiteralType("42")),
        ("true", LiteralType("true")),
        ("A & B", Intersection((NamedRef("A"), NamedRef("B")))),
        ("string | (() => void)", union_of(STRING, Callback((), VOID))),
    ],
)
def test_type_expressions(src_type, expected):
    src = f"export function f(x: {src_type}): void;\n"
    assert first_sig(parse_declaration(src)).params[0].type == expected


def test_parenthesized_type_is_not_a_callback():
    src = "export function f(x: (string)): void;\n"
    assert first_sig(parse_declaration(src)).params[0].type == STRING


def test_object_shape_methods_become_callback_props():
    src = "export interface I {\n  go(x: string): number;\n}\n"
    m = parse_declaration(src)
    prop = m.interfaces[0].props[0]
    assert prop.name == "go"
    assert prop.type == Callback((Param("x", STRING),), NUMBER)


def test_typeof_query_marks_unsupported_and_falls_back_to_any():
    src = "declare const x: number;\nexport function f(y: typeof x): void;\n"
    m = parse_declaration(src)
    assert first_sig(m).params[0].type == ANY
    assert "unsupported-syntax" in m.feature_tags


# ---------------------------------------------------------------------------
# interfaces and classes


def test_interface_with_index_and_call_signatures():
    src = (
        "export interface I {\n"
        "  [key: string]: number;\n"
        "  (x: string): boolean;\n"
        "  new (x: string): I;\n"
        "}\n"
    )
    m = parse_declaration(src)
    iface = m.interfaces[0]
    assert iface.index_signatures[0].key_type == STRING
    assert iface.index_signatures[0].value_type == NUMBER
    assert len(iface.call_signatures) == 2
    assert {"index-signature", "call-signature"} <= m.feature_tags


def test_class_members_and_modifiers():
    src = (
        "export = C;\n"
        "declare class C {\n"
        "  constructor(x: string);\n"
        "  constructor(x: number);\n"
        "  static of(x: string): C;\n"
        "  private secret(): void;\n"
        "  name: string;\n"
        "  readonly id: number;\n"
        "}\n"
    )
    m = parse_declaration(src)
    cls = m.classes[0]
    assert len(cls.constructors) == 2
    by_name = {f.name: f for f in cls.methods}
    assert "static" in by_name["of"].modifiers
    assert "private" in by_name["secret"].modifiers
    props = {p.name: p for p in cls.properties}
    assert props["id"].readonly
    assert {"static", "private", "readonly"} <= m.feature_tags


def test_member_named_like_a_modifier():
    src = "export = C;\ndeclare class C {\n  static: string;\n}\n"
    cls = parse_declaration(src).classes[0]
    assert cls.properties[0].name == "static"
    assert cls.properties[0].type == STRING


def test_optional_class_method_becomes_optional_property():
    src = "export = C;\ndeclare class C {\n  maybe?(x: string): void;\n}\n"
    cls = parse_declaration(src).classes[0]
    assert cls.methods == ()
    prop = cls.properties[0]
    assert prop.optional
    assert prop.type == Callback((Param("x", STRING),), VOID)


def test_extends_and_implements_clauses_are_tolerated():
    src = (
        "export = C;\n"
        "declare class C extends Base implements A, B {\n"
        "  constructor();\n"
        "}\n"
    )
    m = parse_declaration(src)
    assert m.classes[0].name == "C"


# ---------------------------------------------------------------------------
# namespaces


def test_namespaces_nest_and_dotted_names_expand():
    src = (
        "declare namespace a.b {\n"
        "  export function f(): void;\n"
        "}\n"
        "export function top(): void;\n"
    )
    m = parse_declaration(src)
    outer = m.namespaces[0]
    assert outer.name == "a"
    assert outer.namespaces[0].name == "b"
    assert outer.namespaces[0].functions[0].name == "f"


def test_duplicate_namespaces_merge():
    src = (
        "declare namespace ns {\n  export function f(): void;\n}\n"
        "declare namespace ns {\n  export function g(): void;\n}\n"
        "export function top(): void;\n"
    )
    ns = parse_declaration(src).namespaces[0]
    assert sorted(f.name for f in ns.functions) == ["f", "g"]


# ---------------------------------------------------------------------------
# tolerated statements


@pytest.mark.parametrize(
    "stmt",
    [
        "import * as fs from 'fs';",
        "import fs = require('fs');",
        "export { f as g };",
        "declare const VERSION: string;",
        "declare var global: any;",
        "declare let state: number;",
        "declare enum Color { Red, Green }",
    ],
)
def test_unmodeled_statements_are_skipped(stmt):
    src = f"{stmt}\nexport function f(): void;\n"
    m = parse_declaration(src)
    assert [f.name for f in m.functions] == ["f"]
    assert "unsupported-syntax" in m.feature_tags


def test_triple_slash_reference_is_tolerated():
    src = '/// <reference types="node" />\nexport function f(): void;\n'
    m = parse_declaration(src)
    assert [f.name for f in m.functions] == ["f"]


def test_comments_are_ignored():
    src = (
        "// leading comment\n"
        "export function f(/* inline */ x: string): void; // trailing\n"
        "/* block\n   spanning */\n"
        "export function g(): void;\n"
    )
    m = parse_declaration(src)
    assert sorted(f.name for f in m.functions) == ["f", "g"]


# ---------------------------------------------------------------------------
# errors carry line and column


@pytest.mark.parametrize(
    "src, location",
    [
        ("export function f(x: ): void;\n", "1:22"),
        ("export function f(x: string): void;\nexport@", "2:7"),
        ("export interface I {\n  a string;\n}\n", "2:5"),
        ("export function f(x: 'unterminated): void;\n", "1:22"),
    ],
)
def test_syntax_errors_point_at_the_offence(src, location):
    with pytest.raises(DtsSyntaxError) as err:
        parse_declaration(src)
    assert str(err.value).startswith(location + ":")


def test_unterminated_comment_is_an_error():
    with pytest.raises(DtsSyntaxError, match="unterminated comment"):
        parse_declaration("/* never closed\nexport function f(): void;\n")


# ---------------------------------------------------------------------------
# alias expansion


def test_alias_expansion_substitutes_and_strips():
    src = (
        "export type Name = string;\n"
        "export function f(x: Name): Name;\n"
    )
    m = expand_aliases(parse_declaration(src))
    sig = first_sig(m)
    assert sig.params[0].type == STRING
    assert sig.return_type == STRING
    assert m.aliases == ()
    assert "alias-type" not in m.feature_tags


def test_alias_expansion_is_transitive():
    src = (
        "export type A = B;\n"
        "export type B = string | number;\n"
        "export function f(x: A): void;\n"
    )
    m = expand_aliases(parse_declaration(src))
    assert first_sig(m).params[0].type == union_of(STRING, NUMBER)


def test_alias_cycles_raise():
    src = (
        "export type A = B;\n"
        "export type B = A;\n"
        "export function f(x: A): void;\n"
    )
    with pytest.raises(AliasCycleError):
        expand_aliases(parse_declaration(src))


def test_function_type_alias_expands_to_callback():
    src = (
        "export type Handler = (x: string) => boolean;\n"
        "export function on(h: Handler): void;\n"
    )
    m = expand_aliases(parse_declaration(src))
    assert first_sig(m).params[0].type == Callback((Param("x", STRING),), BOOLEAN)


def test_generic_aliases_stay_behind():
    src = (
        "export type Box<T> = { value: T };\n"
        "export function f(x: number): void;\n"
    )
    m = expand_aliases(parse_declaration(src))
    assert [a.name for a in m.aliases] == ["Box"]
    assert "alias-type" in m.feature_tags


def test_literal_shapes_hoist_to_shared_interfaces():
    src = (
        "export function f(o: { url: string }): void;\n"
        "export function g(o: { url: string }): void;\n"
    )
    m = expand_aliases(parse_declaration(src))
    hoisted = [i for i in m.interfaces if i.name.startswith("I__literal_")]
    assert len(hoisted) == 1
    ref = NamedRef(hoisted[0].name)
    assert first_sig(m, 0).params[0].type == ref
    assert first_sig(m, 1).params[0].type == ref


def test_expand_aliases_is_idempotent():
    src = (
        "export type Name = string;\n"
        "export function f(x: Name, o: { a: Name }): void;\n"
    )
    once = expand_aliases(parse_declaration(src))
    assert expand_aliases(once) == once


def test_namespace_aliases_expand_too():
    src = (
        "export = S;\n"
        "declare class S {\n  go(fmt?: S.Format): string;\n}\n"
        "declare namespace S {\n  type Format = string | number;\n}\n"
    )
    m = expand_aliases(parse_declaration(src))
    method = m.classes[0].methods[0]
    assert method.overloads[0].params[0].type == union_of(STRING, NUMBER)


# ---------------------------------------------------------------------------
# corpus smoke


def test_all_dt_fixtures_parse(dt_dir):
    for path in sorted(dt_dir.glob("*.d.ts")):
        m = parse_declaration(path.read_text(), module_name=path.name[: -len(".d.ts")])
        assert m.module_name


def test_emitted_modules_reparse_to_the_same_structure():
    for module in module_stream(23, 150):
        back = parse_declaration(emit(module), module_name=module.module_name)
        assert normalize(back) == normalize(module)
