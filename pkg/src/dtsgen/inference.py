"""Type inference: from a run-time trace to a declaration module.

The pipeline has four stages.  Template selection inspects which traced
functions belong to the module under analysis and whether the export itself
was invoked (as a function or as a constructor).  Interface building turns
the recorded interactions on an object argument into a structural shape,
property by property, up to a configurable depth.  Candidate extraction
produces one signature per observed invocation.  Merging collapses candidate
signatures that differ in at most one parameter position and agree on the
return type; a union with undefined becomes an optional parameter, and the
surviving candidates become overloads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache

from .declaration import (
    ClassDecl,
    DeclarationModule,
    FunctionDecl,
    InterfaceDecl,
    Namespace,
    Signature,
    TemplateKind,
    camelize,
    compute_feature_tags,
)
from .trace_model import (
    GET_FIELD,
    METHOD_CALL,
    ArgumentContainer,
    FunctionContainer,
    Interaction,
    RuntimeTypeName,
    Trace,
    referenced_function_ids,
)
from .tstypes import (
    BOOLEAN,
    NULL,
    NUMBER,
    OBJECT,
    STRING,
    UNDEFINED,
    VOID,
    ArrayType,
    Callback,
    NamedRef,
    Null,
    ObjectShape,
    Param,
    ShapeProp,
    TsType,
    Undefined,
    Union,
    canonical_key,
    contains_undefined,
    strip_undefined,
    union_members,
    union_of,
)

DEFAULT_DEPTH_LIMIT = 5


class InsufficientTraceError(RuntimeError):
    """The trace holds no usable information about the requested module."""


@dataclass(frozen=True, slots=True)
class InferenceConfig:
    depth_limit: int = DEFAULT_DEPTH_LIMIT


def normalize_module_name(name: str) -> str:
    """Fold a require request or file path to a bare module name."""

    name = name.replace("\\", "/")
    name = name.rsplit("/", 1)[-1]
    return re.sub(r"\.(js|cjs|mjs|json)$", "", name)


_PRIMITIVES = {"string": STRING, "number": NUMBER, "boolean": BOOLEAN}


def _module_containers(trace: Trace, module_name: str) -> list[tuple[str, FunctionContainer]]:
    wanted = normalize_module_name(module_name)
    return [
        (fid, c)
        for fid, c in trace.functions.items()
        if normalize_module_name(c.required_module) == wanted and c.required_module
    ]


def select_template(trace: Trace, module_name: str) -> TemplateKind:
    """Pick the declaration template the trace supports.

    An exported function of the module that was invoked selects module-class
    (constructor use) or module-function; invocations of members of the
    exported object alone select module.
    """

    containers = _module_containers(trace, module_name)
    exported = [c for _, c in containers if c.is_exported and c.invocations]
    if exported:
        if any(c.is_constructor for c in exported):
            return TemplateKind.MODULE_CLASS
        return TemplateKind.MODULE_FUNCTION
    if any(c.invocations for _, c in containers):
        return TemplateKind.MODULE
    raise InsufficientTraceError(f"trace carries no invocations for module {module_name!r}")


# ---------------------------------------------------------------------------
# Interface building


def _return_type_of_kind(rt: RuntimeTypeName) -> TsType:
    if rt.kind == "undefined":
        return VOID
    if rt.kind == "null":
        return NULL
    if rt.kind in _PRIMITIVES:
        return _PRIMITIVES[rt.kind]
    if rt.kind == "array":
        return ArrayType(OBJECT)
    if rt.kind == "function":
        return Callback((), VOID)
    # object: a known constructor names the type, otherwise nothing deeper
    # is inferred for return values
    if rt.constructor_name and rt.constructor_name != "Object":
        return NamedRef(rt.constructor_name)
    return OBJECT


def _field_value_type(it: Interaction, trace: Trace, depth: int) -> TsType | None:
    """Type contributed by one getField observation, or None for undefined."""

    rt = it.return_type_of
    if rt is None or rt.kind == "undefined":
        return None
    if rt.kind in _PRIMITIVES:
        return _PRIMITIVES[rt.kind]
    if rt.kind == "null":
        return NULL
    if rt.kind == "array":
        return ArrayType(_element_type(it.following))
    if rt.kind == "function":
        return Callback((), VOID)
    if rt.constructor_name and rt.constructor_name != "Object":
        return NamedRef(rt.constructor_name)
    if it.following:
        return _shape_from_interactions(it.following, trace, depth - 1)
    return OBJECT


def _element_type(interactions) -> TsType:
    # Arrays are typed shallowly from index-0 observations.
    kinds: list[TsType] = []
    for it in interactions:
        if it.code == GET_FIELD and it.field == "0" and it.return_type_of is not None:
            if it.return_type_of.kind == "undefined":
                continue
            kinds.append(_return_type_of_kind(it.return_type_of))
    if not kinds:
        return OBJECT
    return union_of(*kinds)


def _method_type(it: Interaction, trace: Trace, depth: int, config: InferenceConfig) -> TsType:
    """The function type of a method observed through a methodCall."""

    params: tuple[Param, ...] = ()
    return_type: TsType | None = None
    callee = trace.functions.get(it.function_id) if it.function_id else None
    if callee is not None and callee.invocations:
        merged = merge_signatures(candidate_signatures(callee, trace, config, depth - 1))
        finalized = [_finalize_signature(s) for s in merged]
        if len(finalized) == 1:
            params = finalized[0].params
            return_type = finalized[0].return_type
        elif finalized:
            return union_of(*(Callback(s.params, s.return_type) for s in finalized))
    if it.following:
        return_type = _shape_from_interactions(it.following, trace, depth - 1)
    if return_type is None:
        return_type = VOID
    return Callback(params, return_type)


def _shape_from_interactions(
    interactions, trace: Trace, depth: int, config: InferenceConfig | None = None
) -> TsType:
    """Build a structural shape from pooled interactions on one object.

    One property per distinct getField field (union of the observed value
    types; observed undefined makes it optional), one method per distinct
    methodCall.  Recursion through followingInteractions decrements the depth
    budget; at depth zero the object degrades to plain `object`.
    """

    if depth <= 0:
        return OBJECT
    cfg = config or InferenceConfig()
    fields: dict[str, dict] = {}
    for it in interactions:
        if it.code == GET_FIELD:
            slot = fields.setdefault(it.field, {"types": [], "optional": False, "method": None})
            t = _field_value_type(it, trace, depth)
            if t is None:
                slot["optional"] = True
            else:
                slot["types"].append(t)
        elif it.code == METHOD_CALL and it.method_name:
            slot = fields.setdefault(it.method_name, {"types": [], "optional": False, "method": None})
            slot["method"] = _method_type(it, trace, depth, cfg)
    props: list[ShapeProp] = []
    for name, slot in fields.items():
        if slot["method"] is not None:
            props.append(ShapeProp(name, slot["method"], optional=False))
        elif slot["types"]:
            props.append(ShapeProp(name, union_of(*slot["types"]), optional=slot["optional"]))
        # a field only ever observed undefined contributes no property
    return ObjectShape(tuple(props))


def build_interface(arg: ArgumentContainer, trace: Trace, depth_limit: int) -> TsType:
    """Shape of an object argument from its recorded interactions."""

    if depth_limit < 1:
        raise ValueError("depth limit must be at least 1")
    return _shape_from_interactions(arg.interactions, trace, depth_limit)


# ---------------------------------------------------------------------------
# Candidate signatures


def _callback_for_argument(
    arg: ArgumentContainer, trace: Trace, config: InferenceConfig, depth: int
) -> TsType:
    # The tracer links an argument invoked as a function through a methodCall
    # interaction with an empty method name.
    for it in arg.interactions:
        if it.code == METHOD_CALL and not it.method_name and it.function_id:
            return _method_type(it, trace, depth, config)
    return Callback((), VOID)


def candidate_signatures(
    container: FunctionContainer,
    trace: Trace,
    config: InferenceConfig | None = None,
    depth: int | None = None,
) -> list[Signature]:
    """One candidate signature per recorded invocation.

    Argument positions of object kind carry the interface built from the
    argument's pooled interactions (or the constructor name when one was
    observed); the other kinds map directly onto declaration types.
    """

    cfg = config or InferenceConfig()
    depth = cfg.depth_limit if depth is None else depth
    arity = container.max_arity()
    names = [
        container.args[i].argument_name if i in container.args else f"arg{i}"
        for i in range(arity)
    ]

    shape_cache: dict[int, TsType] = {}

    def pooled_shape(i: int) -> TsType:
        if i not in shape_cache:
            arg = container.args.get(i)
            if arg is None or not _has_member_interactions(arg):
                shape_cache[i] = OBJECT
            else:
                shape = _shape_from_interactions(arg.interactions, trace, depth, cfg)
                shape_cache[i] = shape if not isinstance(shape, ObjectShape) or shape.props else OBJECT
        return shape_cache[i]

    candidates: list[Signature] = []
    for rec in container.invocations:
        params = []
        for i in range(arity):
            rt = (
                rec.argument_runtime_types[i]
                if i < len(rec.argument_runtime_types)
                else RuntimeTypeName("undefined")
            )
            if rt.kind in _PRIMITIVES:
                t: TsType = _PRIMITIVES[rt.kind]
            elif rt.kind == "undefined":
                t = UNDEFINED
            elif rt.kind == "null":
                t = NULL
            elif rt.kind == "function":
                arg = container.args.get(i)
                t = (
                    _callback_for_argument(arg, trace, cfg, depth)
                    if arg is not None
                    else Callback((), VOID)
                )
            elif rt.kind == "array":
                arg = container.args.get(i)
                t = ArrayType(_element_type(arg.interactions) if arg is not None else OBJECT)
            elif rt.constructor_name and rt.constructor_name != "Object":
                t = NamedRef(rt.constructor_name)
            else:
                t = pooled_shape(i)
            params.append(Param(names[i], t))
        candidates.append(Signature(tuple(params), _return_type_of_kind(rec.return_runtime_type)))
    return candidates


def _has_member_interactions(arg: ArgumentContainer) -> bool:
    return any(it.code in (GET_FIELD, METHOD_CALL) for it in arg.interactions)


# ---------------------------------------------------------------------------
# Merging


@lru_cache(maxsize=None)
def _signature_key(sig: Signature) -> tuple:
    return (
        tuple((p.optional, canonical_key(p.type)) for p in sig.params),
        canonical_key(sig.return_type),
    )


def _non_null_keys(t: TsType) -> frozenset:
    return frozenset(canonical_key(m) for m in union_members(t) if not isinstance(m, Null))


def _merge_returns(a: TsType, b: TsType) -> TsType | None:
    """Returns merge when equal, or when they differ only by null."""

    if canonical_key(a) == canonical_key(b):
        return a
    na, nb = _non_null_keys(a), _non_null_keys(b)
    has_null = any(isinstance(m, Null) for m in union_members(a) + union_members(b))
    if (not na or not nb or na == nb) and has_null:
        return union_of(a, b)
    return None


def merge_shapes(a: ObjectShape, b: ObjectShape) -> ObjectShape:
    """Componentwise union of two object shapes.

    Properties present on only one side become optional; common properties
    union their types (recursively for nested shapes).
    """

    names_a = {p.name: p for p in a.props}
    names_b = {p.name: p for p in b.props}
    props: list[ShapeProp] = []
    for name, pa in names_a.items():
        pb = names_b.get(name)
        if pb is None:
            props.append(replace(pa, optional=True))
        else:
            if isinstance(pa.type, ObjectShape) and isinstance(pb.type, ObjectShape):
                t: TsType = merge_shapes(pa.type, pb.type)
            else:
                t = union_of(pa.type, pb.type)
            props.append(ShapeProp(name, t, optional=pa.optional or pb.optional))
    for name, pb in names_b.items():
        if name not in names_a:
            props.append(replace(pb, optional=True))
    return ObjectShape(tuple(props))


def _is_subset(a: TsType, b: TsType) -> bool:
    keys_b = {canonical_key(m) for m in union_members(b)}
    return all(canonical_key(m) in keys_b for m in union_members(a))


def _merge_position(a: TsType, b: TsType) -> tuple[TsType, bool]:
    """Merge one parameter position; the flag reports a genuine difference.

    Positions where one side's union members contain the other's are
    absorbed without counting as a difference.
    """

    if canonical_key(a) == canonical_key(b):
        return a, False
    if _is_subset(a, b) or _is_subset(b, a):
        return union_of(a, b), False
    shapes_a = [m for m in union_members(a) if isinstance(m, ObjectShape)]
    shapes_b = [m for m in union_members(b) if isinstance(m, ObjectShape)]
    if len(shapes_a) == 1 and len(shapes_b) == 1:
        others = [m for m in union_members(a) if not isinstance(m, ObjectShape)]
        others += [m for m in union_members(b) if not isinstance(m, ObjectShape)]
        return union_of(merge_shapes(shapes_a[0], shapes_b[0]), *others), True
    return union_of(a, b), True


@lru_cache(maxsize=None)
def _try_merge(a: Signature, b: Signature) -> Signature | None:
    if len(a.params) != len(b.params):
        return None
    ret = _merge_returns(a.return_type, b.return_type)
    if ret is None:
        return None
    params: list[Param] = []
    differences = 0
    for pa, pb in zip(a.params, b.params):
        merged, differs = _merge_position(pa.type, pb.type)
        if differs:
            differences += 1
            if differences > 1:
                return None
        params.append(Param(pa.name, merged, pa.optional or pb.optional))
    return Signature(tuple(params), ret)


def merge_signatures(candidates: list[Signature]) -> list[Signature]:
    """Collapse candidates to a minimal overload set.

    Two signatures merge when they differ in at most one parameter position
    and their return types agree (modulo null).  The input order never
    matters: candidates are canonically sorted and the leftmost mergeable
    pair is taken until a fixpoint is reached.
    """

    pool: dict[tuple, Signature] = {}
    for sig in candidates:
        pool.setdefault(_signature_key(sig), sig)
    work = [pool[k] for k in sorted(pool)]

    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                merged = _try_merge(work[i], work[j])
                if merged is not None:
                    rest = [s for k, s in enumerate(work) if k not in (i, j)]
                    rest.append(merged)
                    dedup: dict[tuple, Signature] = {}
                    for s in rest:
                        dedup.setdefault(_signature_key(s), s)
                    work = [dedup[k] for k in sorted(dedup)]
                    changed = True
                    break
            if changed:
                break
    return work


def _finalize_signature(sig: Signature) -> Signature:
    """Materialize optional parameters from undefined union members.

    A parameter whose type includes undefined becomes optional and drops the
    undefined member, unless a later parameter stays required; then the
    union keeps undefined spelled out because declaration syntax forbids a
    required parameter after an optional one.
    """

    required_after = [False] * (len(sig.params) + 1)
    for i in range(len(sig.params) - 1, -1, -1):
        required_after[i] = required_after[i + 1] or not contains_undefined(sig.params[i].type)
    params = []
    for i, p in enumerate(sig.params):
        if contains_undefined(p.type) and not isinstance(p.type, Undefined):
            if required_after[i + 1]:
                params.append(Param(p.name, p.type, optional=False))
            else:
                params.append(Param(p.name, strip_undefined(p.type), optional=True))
        elif isinstance(p.type, Undefined):
            params.append(Param(p.name, p.type, optional=not required_after[i + 1]))
        else:
            params.append(p)
    return Signature(tuple(params), sig.return_type)


# ---------------------------------------------------------------------------
# Module assembly


class _InterfaceHoister:
    """Replaces structural shapes with named interface references.

    Names follow the argument path: parameter `opts` becomes I__opts, a
    nested object under its `retry` field becomes I__opts__retry.
    Structurally identical interfaces share one name.
    """

    def __init__(self) -> None:
        self.interfaces: list[InterfaceDecl] = []
        self._by_shape: dict[tuple, str] = {}
        self._names: set[str] = set()

    def _register(self, shape: ObjectShape, path: tuple[str, ...]) -> NamedRef:
        key = canonical_key(shape)
        existing = self._by_shape.get(key)
        if existing is not None:
            return NamedRef(existing)
        name = "I__" + "__".join(path)
        candidate = name
        n = 2
        while candidate in self._names:
            candidate = f"{name}_{n}"
            n += 1
        self._names.add(candidate)
        self._by_shape[key] = candidate
        self.interfaces.append(InterfaceDecl(candidate, shape.props))
        return NamedRef(candidate)

    def hoist_type(self, t: TsType, path: tuple[str, ...]) -> TsType:
        if isinstance(t, ObjectShape):
            props = tuple(
                ShapeProp(p.name, self.hoist_type(p.type, path + (p.name,)), p.optional, p.readonly)
                for p in t.props
            )
            return self._register(ObjectShape(props), path)
        if isinstance(t, Union):
            return union_of(*(self.hoist_type(m, path) for m in t.members))
        if isinstance(t, ArrayType):
            return ArrayType(self.hoist_type(t.element, path))
        if isinstance(t, Callback):
            params = tuple(
                Param(p.name, self.hoist_type(p.type, path + (p.name,)), p.optional, p.rest)
                for p in t.params
            )
            return Callback(params, self.hoist_type(t.return_type, path))
        return t

    def hoist_signature(self, sig: Signature, path: tuple[str, ...] = ()) -> Signature:
        params = tuple(
            Param(p.name, self.hoist_type(p.type, path + (p.name,)), p.optional, p.rest)
            for p in sig.params
        )
        return Signature(params, self.hoist_type(sig.return_type, path))


def _function_from_container(
    container: FunctionContainer,
    trace: Trace,
    config: InferenceConfig,
    hoister: _InterfaceHoister,
    name: str | None = None,
    path_prefix: tuple[str, ...] = (),
) -> FunctionDecl:
    merged = merge_signatures(candidate_signatures(container, trace, config))
    overloads = tuple(
        hoister.hoist_signature(_finalize_signature(s), path_prefix) for s in merged
    )
    return FunctionDecl(name or container.function_name, overloads)


def infer_module(
    trace: Trace, module_name: str, config: InferenceConfig | None = None
) -> DeclarationModule:
    """Infer the declaration module for `module_name` from a trace."""

    cfg = config or InferenceConfig()
    template = select_template(trace, module_name)
    containers = _module_containers(trace, module_name)

    callee_ids: set[str] = set()
    for c in trace.functions.values():
        for arg in c.args.values():
            callee_ids |= referenced_function_ids(arg.interactions)

    members = [
        (fid, c)
        for fid, c in containers
        if not c.is_exported and c.invocations and fid not in callee_ids
    ]

    hoister = _InterfaceHoister()
    functions: tuple[FunctionDecl, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    namespaces: tuple[Namespace, ...] = ()
    interfaces: tuple[InterfaceDecl, ...] = ()
    export_assignment: str | None = None

    if template is TemplateKind.MODULE:
        functions = tuple(
            _function_from_container(c, trace, cfg, hoister) for _, c in members
        )
        interfaces = tuple(hoister.interfaces)
    else:
        exported = [c for _, c in containers if c.is_exported and c.invocations]
        exported.sort(key=lambda c: not c.is_constructor)
        main = exported[0]
        if template is TemplateKind.MODULE_FUNCTION:
            export_assignment = camelize(module_name)
            functions = (
                _function_from_container(main, trace, cfg, hoister, name=export_assignment),
            )
        else:
            # The class keeps the constructor's run-time name; the module
            # name rarely spells it (steamid exports SteamID).
            export_assignment = main.function_name
            instance_methods = [
                c
                for fid, c in trace.functions.items()
                if not c.required_module
                and not c.is_exported
                and c.invocations
                and fid not in callee_ids
            ]
            merged_ctors = merge_signatures(candidate_signatures(main, trace, cfg))
            constructors = tuple(
                replace(hoister.hoist_signature(_finalize_signature(s)), return_type=VOID)
                for s in merged_ctors
            )
            methods = tuple(
                _function_from_container(c, trace, cfg, hoister) for c in instance_methods
            )
            classes = (ClassDecl(export_assignment, constructors, methods),)
        ns_functions = tuple(
            _function_from_container(c, trace, cfg, hoister) for _, c in members
        )
        scope = Namespace(
            export_assignment, functions=ns_functions, interfaces=tuple(hoister.interfaces)
        )
        if not scope.is_empty() or template is TemplateKind.MODULE_CLASS:
            namespaces = (scope,)

    module = DeclarationModule(
        module_name=module_name,
        template=template,
        export_assignment=export_assignment,
        functions=functions,
        classes=classes,
        interfaces=interfaces,
        namespaces=namespaces,
    )
    return replace(module, feature_tags=compute_feature_tags(module))
