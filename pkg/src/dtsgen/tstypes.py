"""TypeScript type expressions used by the generator, parser and comparator.

The generator only ever produces a small closed subset (primitives, named
references, arrays, callbacks, structural object shapes, `object`, `null`,
`undefined`, `void` and flat unions).  The declaration parser additionally
understands syntax outside that subset (any, literal types, tuples,
intersections, generic applications); those forms are represented here too so
parsed files can be normalized and tagged, but the emitter never produces
them.

Unions are kept flat, duplicate free and canonically ordered at construction
time via :func:`union_of`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache


class TsType:
    """Base class for all type expressions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Primitive(TsType):
    # one of "string", "number", "boolean"
    name: str


@dataclass(frozen=True, slots=True)
class Void(TsType):
    pass


@dataclass(frozen=True, slots=True)
class Null(TsType):
    pass


@dataclass(frozen=True, slots=True)
class Undefined(TsType):
    pass


@dataclass(frozen=True, slots=True)
class AnyType(TsType):
    pass


@dataclass(frozen=True, slots=True)
class PlainObject(TsType):
    """The `object` keyword type (an object nothing further is known about)."""


@dataclass(frozen=True, slots=True)
class NamedRef(TsType):
    """A reference to a named type: built-ins (RegExp), interfaces, classes.

    `name` may be dotted (`GlobToRegexp.I__opts`).  `args` holds type
    arguments of generic applications (`Array<string>`); the generator never
    produces them.
    """

    name: str
    args: tuple[TsType, ...] = ()


@dataclass(frozen=True, slots=True)
class ArrayType(TsType):
    element: TsType


@dataclass(frozen=True, slots=True)
class Param:
    """A callback or function parameter. Names never affect comparison."""

    name: str
    type: TsType
    optional: bool = False
    rest: bool = False


@dataclass(frozen=True, slots=True)
class Callback(TsType):
    """A function type `(a: T) => R`."""

    params: tuple[Param, ...]
    return_type: TsType


@dataclass(frozen=True, slots=True)
class ShapeProp:
    name: str
    type: TsType
    optional: bool = False
    readonly: bool = False


@dataclass(frozen=True, slots=True)
class ObjectShape(TsType):
    """A structural object type `{ a: T; b?: U }`.

    Inference builds these inline before hoisting them to named interfaces;
    the parser produces them for literal interface annotations.
    """

    props: tuple[ShapeProp, ...]


@dataclass(frozen=True, slots=True)
class TupleType(TsType):
    items: tuple[TsType, ...]


@dataclass(frozen=True, slots=True)
class LiteralType(TsType):
    # source spelling, e.g. "'up'", "42", "true"
    text: str


@dataclass(frozen=True, slots=True)
class Intersection(TsType):
    members: tuple[TsType, ...]


@dataclass(frozen=True, slots=True)
class Union(TsType):
    """A flat union with at least two canonically ordered members."""

    members: tuple[TsType, ...]


STRING = Primitive("string")
NUMBER = Primitive("number")
BOOLEAN = Primitive("boolean")
VOID = Void()
NULL = Null()
UNDEFINED = Undefined()
ANY = AnyType()
OBJECT = PlainObject()

# Canonical ordering of union members: primitives first, then named
# references, object shapes, callbacks, arrays, object, and null/undefined
# last.  Parse-only forms slot in after the generated subset.
_PRIMITIVE_ORDER = {"string": 0, "number": 1, "boolean": 2}


def _rank(t: TsType) -> int:
    if isinstance(t, Primitive):
        return 0
    if isinstance(t, NamedRef):
        return 10
    if isinstance(t, ObjectShape):
        return 20
    if isinstance(t, Callback):
        return 30
    if isinstance(t, ArrayType):
        return 40
    if isinstance(t, PlainObject):
        return 50
    if isinstance(t, TupleType):
        return 60
    if isinstance(t, Intersection):
        return 65
    if isinstance(t, LiteralType):
        return 70
    if isinstance(t, AnyType):
        return 80
    if isinstance(t, Void):
        return 85
    if isinstance(t, Null):
        return 90
    if isinstance(t, Undefined):
        return 95
    if isinstance(t, Union):
        return 99
    raise TypeError(f"unknown type node: {t!r}")


@lru_cache(maxsize=None)
def canonical_key(t: TsType) -> tuple:
    """A total-order sort key. Structure first, parameter names as tiebreak.

    All type nodes are immutable, so keys are memoized for the process
    lifetime; sorting and union construction hit this on every comparison.
    """

    rank = _rank(t)
    if isinstance(t, Primitive):
        return (rank, _PRIMITIVE_ORDER[t.name])
    if isinstance(t, NamedRef):
        return (rank, t.name, tuple(canonical_key(a) for a in t.args))
    if isinstance(t, ObjectShape):
        return (
            rank,
            tuple((p.name, p.optional, canonical_key(p.type)) for p in t.props),
        )
    if isinstance(t, Callback):
        return (
            rank,
            tuple((p.optional, p.rest, canonical_key(p.type)) for p in t.params),
            canonical_key(t.return_type),
            tuple(p.name for p in t.params),
        )
    if isinstance(t, ArrayType):
        return (rank, canonical_key(t.element))
    if isinstance(t, (TupleType, Intersection, Union)):
        members = t.items if isinstance(t, TupleType) else t.members
        return (rank, tuple(canonical_key(m) for m in members))
    if isinstance(t, LiteralType):
        return (rank, t.text)
    return (rank,)


def union_members(t: TsType) -> tuple[TsType, ...]:
    """The members of `t` viewed as a union (a non-union is a singleton)."""

    if isinstance(t, Union):
        return t.members
    return (t,)


def union_of(*types: TsType) -> TsType:
    """Build the canonical union of the given types.

    Flattens nested unions, removes duplicates, orders members canonically
    and collapses singleton unions to the member itself.
    """

    seen: dict[tuple, TsType] = {}
    for t in types:
        for m in union_members(t):
            seen.setdefault(canonical_key(m), m)
    if not seen:
        raise ValueError("union of zero types")
    members = [seen[k] for k in sorted(seen)]
    if len(members) == 1:
        return members[0]
    return Union(tuple(members))


def contains_undefined(t: TsType) -> bool:
    return any(isinstance(m, Undefined) for m in union_members(t))


def strip_undefined(t: TsType) -> TsType:
    """Remove Undefined from a union; Undefined itself is returned as is."""

    members = [m for m in union_members(t) if not isinstance(m, Undefined)]
    if not members:
        return t
    return union_of(*members)


def is_subset(a: TsType, b: TsType) -> bool:
    """True when every union member of `a` also occurs in `b`."""

    b_keys = {canonical_key(m) for m in union_members(b)}
    return all(canonical_key(m) in b_keys for m in union_members(a))


def _needs_parens(t: TsType) -> bool:
    return isinstance(t, (Union, Callback, Intersection))


def render_type(t: TsType, qualify=None) -> str:
    """Render a type expression as declaration-file source text.

    `qualify` maps a named reference to its spelled name at the use site
    (used to prefix namespace interfaces, e.g. I__opts -> GlobToRegexp.I__opts).
    """

    q = qualify if qualify is not None else (lambda name: name)
    if isinstance(t, Primitive):
        return t.name
    if isinstance(t, Void):
        return "void"
    if isinstance(t, Null):
        return "null"
    if isinstance(t, Undefined):
        return "undefined"
    if isinstance(t, AnyType):
        return "any"
    if isinstance(t, PlainObject):
        return "object"
    if isinstance(t, NamedRef):
        base = q(t.name)
        if t.args:
            return f"{base}<{', '.join(render_type(a, qualify) for a in t.args)}>"
        return base
    if isinstance(t, ArrayType):
        inner = render_type(t.element, qualify)
        if _needs_parens(t.element):
            inner = f"({inner})"
        return f"{inner}[]"
    if isinstance(t, Callback):
        params = ", ".join(render_param(p, qualify) for p in t.params)
        return f"({params}) => {render_type(t.return_type, qualify)}"
    if isinstance(t, ObjectShape):
        if not t.props:
            return "{}"
        parts = []
        for p in t.props:
            opt = "?" if p.optional else ""
            ro = "readonly " if p.readonly else ""
            parts.append(f"{ro}{p.name}{opt}: {render_type(p.type, qualify)}")
        return "{ " + "; ".join(parts) + " }"
    if isinstance(t, TupleType):
        return "[" + ", ".join(render_type(i, qualify) for i in t.items) + "]"
    if isinstance(t, LiteralType):
        return t.text
    if isinstance(t, Intersection):
        return " & ".join(
            f"({render_type(m, qualify)})" if isinstance(m, (Union, Callback)) else render_type(m, qualify)
            for m in t.members
        )
    if isinstance(t, Union):
        parts = []
        for m in t.members:
            r = render_type(m, qualify)
            if isinstance(m, Callback):
                r = f"({r})"
            parts.append(r)
        return " | ".join(parts)
    raise TypeError(f"unknown type node: {t!r}")


def render_param(p: Param, qualify=None) -> str:
    dots = "..." if p.rest else ""
    opt = "?" if p.optional else ""
    return f"{dots}{p.name}{opt}: {render_type(p.type, qualify)}"
