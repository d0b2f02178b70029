"""Declaration-file AST: module, functions, classes, interfaces, namespaces.

The AST covers the three module templates (module, module-class,
module-function), carries feature tags describing which declaration-language
features a file uses, and normalizes to a canonical form so two files can be
compared structurally.  `normalize` is idempotent; equality of normalized
modules is plain structural equality.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace

from .tstypes import (
    AnyType,
    ArrayType,
    Callback,
    Intersection,
    LiteralType,
    NamedRef,
    ObjectShape,
    Param,
    PlainObject,
    Primitive,
    ShapeProp,
    TsType,
    TupleType,
    Undefined,
    Union,
    Void,
    canonical_key,
    render_param,
    render_type,
    union_of,
)


class TemplateKind(enum.Enum):
    MODULE = "module"
    MODULE_CLASS = "module-class"
    MODULE_FUNCTION = "module-function"


@dataclass(frozen=True, slots=True)
class Signature:
    params: tuple[Param, ...]
    return_type: TsType

    def render(self, name: str = "", qualify=None) -> str:
        params = ", ".join(render_param(p, qualify) for p in self.params)
        return f"{name}({params}): {render_type(self.return_type, qualify)}"


@dataclass(frozen=True, slots=True)
class FunctionDecl:
    name: str
    overloads: tuple[Signature, ...]
    modifiers: frozenset[str] = frozenset()
    type_params: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class IndexSignature:
    key_name: str
    key_type: TsType
    value_type: TsType


@dataclass(frozen=True, slots=True)
class InterfaceDecl:
    name: str
    props: tuple[ShapeProp, ...]
    index_signatures: tuple[IndexSignature, ...] = ()
    call_signatures: tuple[Signature, ...] = ()
    type_params: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class ClassDecl:
    name: str
    constructors: tuple[Signature, ...] = ()
    methods: tuple[FunctionDecl, ...] = ()
    properties: tuple[ShapeProp, ...] = ()
    type_params: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class TypeAliasDecl:
    name: str
    type: TsType
    type_params: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class Namespace:
    name: str
    functions: tuple[FunctionDecl, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    interfaces: tuple[InterfaceDecl, ...] = ()
    aliases: tuple[TypeAliasDecl, ...] = ()
    namespaces: tuple[Namespace, ...] = ()

    def is_empty(self) -> bool:
        return not (
            self.functions or self.classes or self.interfaces or self.aliases or self.namespaces
        )


@dataclass(frozen=True, slots=True)
class DeclarationModule:
    module_name: str
    template: TemplateKind
    export_assignment: str | None = None
    functions: tuple[FunctionDecl, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    interfaces: tuple[InterfaceDecl, ...] = ()
    aliases: tuple[TypeAliasDecl, ...] = ()
    namespaces: tuple[Namespace, ...] = ()
    feature_tags: frozenset[str] = frozenset()


def camelize(module_name: str) -> str:
    """Turn a module name into an exported identifier: glob-to-regexp -> GlobToRegexp."""

    segments = [s for s in re.split(r"[-_.]", module_name) if s]
    return "".join(s[0].upper() + s[1:] for s in segments)


def camel_fold(name: str | None) -> str:
    """Case and separator insensitive folding used to match exported names."""

    if name is None:
        return ""
    return re.sub(r"[-_.]", "", name).lower()


def validate_module(module: DeclarationModule) -> None:
    """Check the per-template structural invariants."""

    t = module.template
    if t is TemplateKind.MODULE_FUNCTION:
        if len(module.functions) != 1 or module.classes:
            raise ValueError("module-function template requires exactly one function")
        if not module.export_assignment:
            raise ValueError("module-function template requires an export assignment")
    elif t is TemplateKind.MODULE_CLASS:
        if len(module.classes) != 1 or module.functions:
            raise ValueError("module-class template requires exactly one class")
        if not module.export_assignment:
            raise ValueError("module-class template requires an export assignment")
    else:
        if module.export_assignment:
            raise ValueError("module template must not carry an export assignment")


# ---------------------------------------------------------------------------
# Feature tags

FEATURE_TAGS = frozenset(
    {
        "type-string",
        "optional-parameter",
        "type-boolean",
        "type-number",
        "type-void",
        "type-union",
        "type-function",
        "type-array",
        "type-any",
        "type-literals",
        "alias-type",
        "index-signature",
        "generics-function",
        "dot-dot-dot-token",
        "call-signature",
        "generics-interface",
        "type-object",
        "type-undefined",
        "type-intersection",
        "readonly",
        "type-tuple",
        "generics-class",
        "static",
        "private",
        "public",
        "protected",
    }
)

UNSUPPORTED_SYNTAX = "unsupported-syntax"

# Subset the generator can produce; files tagged outside this set are
# excluded from comparison.
IMPLEMENTED_TAGS = frozenset(
    {
        "type-string",
        "optional-parameter",
        "type-boolean",
        "type-number",
        "type-void",
        "type-union",
        "type-function",
        "type-array",
        "type-object",
        "type-undefined",
        "alias-type",
    }
)


def unimplemented_tags(tags) -> frozenset[str]:
    return frozenset(tags) - IMPLEMENTED_TAGS


_MODIFIER_TAGS = {"static", "private", "public", "protected", "readonly"}

_GENERICS_TAG = {
    "function": "generics-function",
    "interface": "generics-interface",
    "class": "generics-class",
}


def _tag_type(t: TsType, context: str, tags: set[str]) -> None:
    if isinstance(t, Primitive):
        tags.add(f"type-{t.name}")
    elif isinstance(t, Void):
        tags.add("type-void")
    elif isinstance(t, Undefined):
        tags.add("type-undefined")
    elif isinstance(t, AnyType):
        tags.add("type-any")
    elif isinstance(t, PlainObject):
        tags.add("type-object")
    elif isinstance(t, LiteralType):
        tags.add("type-literals")
    elif isinstance(t, NamedRef):
        if t.name == "Array" and t.args:
            tags.add("type-array")
        if t.args:
            tags.add(_GENERICS_TAG[context])
        for a in t.args:
            _tag_type(a, context, tags)
    elif isinstance(t, ArrayType):
        tags.add("type-array")
        _tag_type(t.element, context, tags)
    elif isinstance(t, Callback):
        tags.add("type-function")
        for p in t.params:
            _tag_param(p, context, tags)
        _tag_type(t.return_type, context, tags)
    elif isinstance(t, ObjectShape):
        for p in t.props:
            _tag_shape_prop(p, context, tags)
    elif isinstance(t, TupleType):
        tags.add("type-tuple")
        for i in t.items:
            _tag_type(i, context, tags)
    elif isinstance(t, Intersection):
        tags.add("type-intersection")
        for m in t.members:
            _tag_type(m, context, tags)
    elif isinstance(t, Union):
        tags.add("type-union")
        for m in t.members:
            _tag_type(m, context, tags)


def _tag_param(p: Param, context: str, tags: set[str]) -> None:
    if p.optional:
        tags.add("optional-parameter")
    if p.rest:
        tags.add("dot-dot-dot-token")
    _tag_type(p.type, context, tags)


def _tag_shape_prop(p: ShapeProp, context: str, tags: set[str]) -> None:
    if p.optional:
        tags.add("optional-parameter")
    if p.readonly:
        tags.add("readonly")
    _tag_type(p.type, context, tags)


def _tag_function(fn: FunctionDecl, context: str, tags: set[str]) -> None:
    if fn.type_params:
        tags.add(_GENERICS_TAG[context])
    tags.update(fn.modifiers & _MODIFIER_TAGS)
    for sig in fn.overloads:
        for p in sig.params:
            _tag_param(p, context, tags)
        _tag_type(sig.return_type, context, tags)


def _tag_scope(functions, classes, interfaces, aliases, namespaces, tags: set[str]) -> None:
    for fn in functions:
        _tag_function(fn, "function", tags)
    for cls in classes:
        if cls.type_params:
            tags.add("generics-class")
        for ctor in cls.constructors:
            for p in ctor.params:
                _tag_param(p, "class", tags)
        for m in cls.methods:
            _tag_function(m, "class", tags)
        for p in cls.properties:
            _tag_shape_prop(p, "class", tags)
    for iface in interfaces:
        if iface.type_params:
            tags.add("generics-interface")
        for p in iface.props:
            _tag_shape_prop(p, "interface", tags)
        for idx in iface.index_signatures:
            tags.add("index-signature")
            _tag_type(idx.key_type, "interface", tags)
            _tag_type(idx.value_type, "interface", tags)
        for sig in iface.call_signatures:
            tags.add("call-signature")
            for p in sig.params:
                _tag_param(p, "interface", tags)
            _tag_type(sig.return_type, "interface", tags)
    for alias in aliases:
        tags.add("alias-type")
        _tag_type(alias.type, "function", tags)
    for ns in namespaces:
        _tag_scope(ns.functions, ns.classes, ns.interfaces, ns.aliases, ns.namespaces, tags)


def compute_feature_tags(module: DeclarationModule) -> frozenset[str]:
    """Recompute the feature tags of a module from its own content.

    The unsupported-syntax marker is sticky: it records constructs that were
    skipped at parse time and no longer exist in the AST.
    """

    tags: set[str] = set()
    _tag_scope(
        module.functions, module.classes, module.interfaces, module.aliases, module.namespaces, tags
    )
    if UNSUPPORTED_SYNTAX in module.feature_tags:
        tags.add(UNSUPPORTED_SYNTAX)
    return frozenset(tags)


# ---------------------------------------------------------------------------
# Normalization


def _local_scope_names(module: DeclarationModule) -> set[str]:
    names = set()
    if module.export_assignment:
        names.add(module.export_assignment)
    for ns in module.namespaces:
        names.add(ns.name)
    return names


def _canon_type(t: TsType, strip_prefixes: set[str]) -> TsType:
    if isinstance(t, NamedRef):
        name = t.name
        if "." in name:
            head, rest = name.split(".", 1)
            if head in strip_prefixes:
                name = rest
        return NamedRef(name, tuple(_canon_type(a, strip_prefixes) for a in t.args))
    if isinstance(t, ArrayType):
        return ArrayType(_canon_type(t.element, strip_prefixes))
    if isinstance(t, Callback):
        return Callback(
            tuple(_canon_param(p, strip_prefixes) for p in t.params),
            _canon_type(t.return_type, strip_prefixes),
        )
    if isinstance(t, ObjectShape):
        props = tuple(
            sorted(
                (_canon_shape_prop(p, strip_prefixes) for p in t.props),
                key=lambda p: p.name,
            )
        )
        return ObjectShape(props)
    if isinstance(t, TupleType):
        return TupleType(tuple(_canon_type(i, strip_prefixes) for i in t.items))
    if isinstance(t, Intersection):
        members = sorted(
            (_canon_type(m, strip_prefixes) for m in t.members), key=canonical_key
        )
        return Intersection(tuple(members))
    if isinstance(t, Union):
        return union_of(*(_canon_type(m, strip_prefixes) for m in t.members))
    return t


def _canon_param(p: Param, strip: set[str]) -> Param:
    return Param(p.name, _canon_type(p.type, strip), p.optional, p.rest)


def _canon_shape_prop(p: ShapeProp, strip: set[str]) -> ShapeProp:
    return ShapeProp(p.name, _canon_type(p.type, strip), p.optional, p.readonly)


def _canon_signature(sig: Signature, strip: set[str]) -> Signature:
    return Signature(
        tuple(_canon_param(p, strip) for p in sig.params),
        _canon_type(sig.return_type, strip),
    )


def _signature_key(sig: Signature) -> tuple:
    return (
        tuple((p.optional, p.rest, canonical_key(p.type)) for p in sig.params),
        canonical_key(sig.return_type),
    )


def _canon_function(fn: FunctionDecl, strip: set[str]) -> FunctionDecl:
    sigs = [_canon_signature(s, strip) for s in fn.overloads]
    deduped: dict[tuple, Signature] = {}
    for s in sigs:
        deduped.setdefault(_signature_key(s), s)
    ordered = tuple(deduped[k] for k in sorted(deduped))
    return replace(fn, overloads=ordered)


def _class_prop_to_method(p: ShapeProp) -> FunctionDecl | None:
    # A property whose type is a function type is the same declaration as a
    # method; canonical form uses the method spelling.
    if isinstance(p.type, Callback) and not p.optional:
        return FunctionDecl(p.name, (Signature(p.type.params, p.type.return_type),))
    return None


def _canon_class(cls: ClassDecl, strip: set[str]) -> ClassDecl:
    methods = {m.name: _canon_function(m, strip) for m in cls.methods}
    props = []
    for p in cls.properties:
        cp = _canon_shape_prop(p, strip)
        as_method = _class_prop_to_method(cp)
        if as_method is not None and as_method.name not in methods:
            methods[as_method.name] = as_method
        else:
            props.append(cp)
    ctors = [_canon_signature(s, strip) for s in cls.constructors]
    ctor_dedup: dict[tuple, Signature] = {}
    for s in ctors:
        ctor_dedup.setdefault(_signature_key(s), s)
    return ClassDecl(
        name=cls.name,
        constructors=tuple(ctor_dedup[k] for k in sorted(ctor_dedup)),
        methods=tuple(methods[n] for n in sorted(methods)),
        properties=tuple(sorted(props, key=lambda p: p.name)),
        type_params=cls.type_params,
    )


def _canon_interface(iface: InterfaceDecl, strip: set[str]) -> InterfaceDecl:
    props = tuple(
        sorted((_canon_shape_prop(p, strip) for p in iface.props), key=lambda p: p.name)
    )
    return replace(
        iface,
        props=props,
        index_signatures=tuple(
            IndexSignature(i.key_name, _canon_type(i.key_type, strip), _canon_type(i.value_type, strip))
            for i in iface.index_signatures
        ),
        call_signatures=tuple(_canon_signature(s, strip) for s in iface.call_signatures),
    )


def _canon_namespace(ns: Namespace, strip: set[str]) -> Namespace | None:
    canon = Namespace(
        name=ns.name,
        functions=tuple(
            sorted((_canon_function(f, strip) for f in ns.functions), key=lambda f: f.name)
        ),
        classes=tuple(sorted((_canon_class(c, strip) for c in ns.classes), key=lambda c: c.name)),
        interfaces=tuple(
            sorted((_canon_interface(i, strip) for i in ns.interfaces), key=lambda i: i.name)
        ),
        aliases=tuple(
            sorted(
                (TypeAliasDecl(a.name, _canon_type(a.type, strip), a.type_params) for a in ns.aliases),
                key=lambda a: a.name,
            )
        ),
        namespaces=tuple(
            sorted(
                (n for n in (_canon_namespace(child, strip) for child in ns.namespaces) if n),
                key=lambda n: n.name,
            )
        ),
    )
    return None if canon.is_empty() else canon


def normalize(module: DeclarationModule) -> DeclarationModule:
    """Canonical form of a module: sorted declarations, canonical unions,
    namespace qualifiers of local names stripped, properties spelled as
    methods where they declare functions, tags recomputed.  Idempotent.
    """

    strip = _local_scope_names(module)
    result = DeclarationModule(
        module_name=module.module_name,
        template=module.template,
        export_assignment=module.export_assignment,
        functions=tuple(
            sorted((_canon_function(f, strip) for f in module.functions), key=lambda f: f.name)
        ),
        classes=tuple(
            sorted((_canon_class(c, strip) for c in module.classes), key=lambda c: c.name)
        ),
        interfaces=tuple(
            sorted((_canon_interface(i, strip) for i in module.interfaces), key=lambda i: i.name)
        ),
        aliases=tuple(
            sorted(
                (
                    TypeAliasDecl(a.name, _canon_type(a.type, strip), a.type_params)
                    for a in module.aliases
                ),
                key=lambda a: a.name,
            )
        ),
        namespaces=tuple(
            sorted(
                (n for n in (_canon_namespace(ns, strip) for ns in module.namespaces) if n),
                key=lambda n: n.name,
            )
        ),
        feature_tags=module.feature_tags,
    )
    return replace(result, feature_tags=compute_feature_tags(result))


# ---------------------------------------------------------------------------
# JSON serialization of the AST (stable, documented schema)


def _type_to_dict(t: TsType) -> dict:
    if isinstance(t, Primitive):
        return {"kind": "primitive", "name": t.name}
    if isinstance(t, Void):
        return {"kind": "void"}
    if isinstance(t, Null):
        return {"kind": "null"}
    if isinstance(t, Undefined):
        return {"kind": "undefined"}
    if isinstance(t, AnyType):
        return {"kind": "any"}
    if isinstance(t, PlainObject):
        return {"kind": "object"}
    if isinstance(t, NamedRef):
        d: dict = {"kind": "reference", "name": t.name}
        if t.args:
            d["typeArguments"] = [_type_to_dict(a) for a in t.args]
        return d
    if isinstance(t, ArrayType):
        return {"kind": "array", "element": _type_to_dict(t.element)}
    if isinstance(t, Callback):
        return {
            "kind": "function",
            "parameters": [_param_to_dict(p) for p in t.params],
            "returnType": _type_to_dict(t.return_type),
        }
    if isinstance(t, ObjectShape):
        return {"kind": "objectShape", "properties": [_prop_to_dict(p) for p in t.props]}
    if isinstance(t, TupleType):
        return {"kind": "tuple", "items": [_type_to_dict(i) for i in t.items]}
    if isinstance(t, LiteralType):
        return {"kind": "literal", "text": t.text}
    if isinstance(t, Intersection):
        return {"kind": "intersection", "members": [_type_to_dict(m) for m in t.members]}
    if isinstance(t, Union):
        return {"kind": "union", "members": [_type_to_dict(m) for m in t.members]}
    raise TypeError(f"unknown type node: {t!r}")


def _param_to_dict(p: Param) -> dict:
    d = {"name": p.name, "type": _type_to_dict(p.type)}
    if p.optional:
        d["optional"] = True
    if p.rest:
        d["rest"] = True
    return d


def _prop_to_dict(p: ShapeProp) -> dict:
    d = {"name": p.name, "type": _type_to_dict(p.type)}
    if p.optional:
        d["optional"] = True
    if p.readonly:
        d["readonly"] = True
    return d


def _signature_to_dict(sig: Signature) -> dict:
    return {
        "parameters": [_param_to_dict(p) for p in sig.params],
        "returnType": _type_to_dict(sig.return_type),
    }


def _function_to_dict(fn: FunctionDecl) -> dict:
    d: dict = {"name": fn.name, "overloads": [_signature_to_dict(s) for s in fn.overloads]}
    if fn.modifiers:
        d["modifiers"] = sorted(fn.modifiers)
    if fn.type_params:
        d["typeParameters"] = list(fn.type_params)
    return d


def _interface_to_dict(iface: InterfaceDecl) -> dict:
    d: dict = {"name": iface.name, "properties": [_prop_to_dict(p) for p in iface.props]}
    if iface.index_signatures:
        d["indexSignatures"] = [
            {
                "keyName": i.key_name,
                "keyType": _type_to_dict(i.key_type),
                "valueType": _type_to_dict(i.value_type),
            }
            for i in iface.index_signatures
        ]
    if iface.call_signatures:
        d["callSignatures"] = [_signature_to_dict(s) for s in iface.call_signatures]
    if iface.type_params:
        d["typeParameters"] = list(iface.type_params)
    return d


def _class_to_dict(cls: ClassDecl) -> dict:
    d: dict = {
        "name": cls.name,
        "constructors": [_signature_to_dict(s) for s in cls.constructors],
        "methods": [_function_to_dict(m) for m in cls.methods],
    }
    if cls.properties:
        d["properties"] = [_prop_to_dict(p) for p in cls.properties]
    if cls.type_params:
        d["typeParameters"] = list(cls.type_params)
    return d


def _namespace_to_dict(ns: Namespace) -> dict:
    return {
        "name": ns.name,
        "functions": [_function_to_dict(f) for f in ns.functions],
        "classes": [_class_to_dict(c) for c in ns.classes],
        "interfaces": [_interface_to_dict(i) for i in ns.interfaces],
        "aliases": [
            {"name": a.name, "type": _type_to_dict(a.type)} for a in ns.aliases
        ],
        "namespaces": [_namespace_to_dict(n) for n in ns.namespaces],
    }


def module_to_dict(module: DeclarationModule) -> dict:
    """Serialize the AST to JSON-compatible dicts (see README for the schema)."""

    return {
        "moduleName": module.module_name,
        "template": module.template.value,
        "exportAssignment": module.export_assignment,
        "functions": [_function_to_dict(f) for f in module.functions],
        "classes": [_class_to_dict(c) for c in module.classes],
        "interfaces": [_interface_to_dict(i) for i in module.interfaces],
        "aliases": [{"name": a.name, "type": _type_to_dict(a.type)} for a in module.aliases],
        "namespaces": [_namespace_to_dict(n) for n in module.namespaces],
        "featureTags": sorted(module.feature_tags),
    }
