"""Run-time trace model and its JSON interchange format (schema version 1).

A trace is an ordered map from function ids to containers.  Each container
describes one function observed at run time: identity flags, one argument
container per parameter position holding the interactions performed on that
argument inside the library, and one invocation record per call carrying the
run-time types of the arguments and the return value.

The on-disk format is a JSON envelope::

    {"schemaVersion": 1, "functions": {"functionId_1": {...}, ...}}

Serialization is canonical and byte deterministic: objects use a fixed field
order, maps keep insertion order (declaration order is meaningful downstream),
and irrelevant fields are omitted.
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

RUNTIME_KINDS = frozenset(
    {"string", "number", "boolean", "undefined", "null", "function", "array", "object"}
)

GET_FIELD = "getField"
METHOD_CALL = "methodCall"
USED_AS_ARGUMENT = "usedAsArgument"
# Operator interactions are accepted on load for forward compatibility but
# carry no inference semantics.
BINARY_OPERATOR = "binaryOperator"
UNARY_OPERATOR = "unaryOperator"

INTERACTION_CODES = frozenset(
    {GET_FIELD, METHOD_CALL, USED_AS_ARGUMENT, BINARY_OPERATOR, UNARY_OPERATOR}
)

_MAX_NESTING = 64


class TraceFormatError(ValueError):
    """Raised when trace JSON is malformed or violates the schema."""


@dataclass(frozen=True, slots=True)
class RuntimeTypeName:
    """A run-time type observation; constructorName is object-kind only."""

    kind: str
    constructor_name: str = ""

    def is_undefined(self) -> bool:
        return self.kind == "undefined"


@dataclass(frozen=True, slots=True)
class Interaction:
    code: str
    field: str = ""
    method_name: str = ""
    function_id: str = ""
    return_type_of: RuntimeTypeName | None = None
    following: tuple[Interaction, ...] = ()
    callee_function_id: str = ""
    operator: str = ""


@dataclass(slots=True)
class ArgumentContainer:
    argument_name: str
    argument_index: int
    interactions: list[Interaction] = field(default_factory=list)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ArgumentContainer):
            return NotImplemented
        return (
            self.argument_name == other.argument_name
            and self.argument_index == other.argument_index
            and self.interactions == other.interactions
        )


@dataclass(slots=True)
class InvocationRecord:
    argument_runtime_types: list[RuntimeTypeName]
    return_runtime_type: RuntimeTypeName

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvocationRecord):
            return NotImplemented
        return (
            self.argument_runtime_types == other.argument_runtime_types
            and self.return_runtime_type == other.return_runtime_type
        )


@dataclass(slots=True)
class FunctionContainer:
    function_name: str
    is_exported: bool = False
    is_constructor: bool = False
    required_module: str = ""
    args: dict[int, ArgumentContainer] = field(default_factory=dict)
    invocations: list[InvocationRecord] = field(default_factory=list)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FunctionContainer):
            return NotImplemented
        return (
            self.function_name == other.function_name
            and self.is_exported == other.is_exported
            and self.is_constructor == other.is_constructor
            and self.required_module == other.required_module
            and self.args == other.args
            and self.invocations == other.invocations
        )

    def max_arity(self) -> int:
        arity = max((i + 1 for i in self.args), default=0)
        for rec in self.invocations:
            arity = max(arity, len(rec.argument_runtime_types))
        return arity


@dataclass(slots=True)
class Trace:
    functions: dict[str, FunctionContainer] = field(default_factory=dict)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return self.functions == other.functions

    def is_empty(self) -> bool:
        return not self.functions


def _runtime_type_from_json(value, where: str) -> RuntimeTypeName:
    if isinstance(value, str):
        kind, ctor = value, ""
    elif isinstance(value, dict):
        kind = value.get("kind", "")
        ctor = value.get("constructorName", "")
        if not isinstance(kind, str) or not isinstance(ctor, str):
            raise TraceFormatError(f"{where}: malformed runtime type {value!r}")
    else:
        raise TraceFormatError(f"{where}: malformed runtime type {value!r}")
    if kind not in RUNTIME_KINDS:
        raise TraceFormatError(f"{where}: unknown runtime type kind {kind!r}")
    if ctor and kind != "object":
        raise TraceFormatError(f"{where}: constructorName is only valid for object kind")
    return RuntimeTypeName(kind, ctor)


def _runtime_type_to_json(rt: RuntimeTypeName):
    if rt.constructor_name:
        return {"kind": rt.kind, "constructorName": rt.constructor_name}
    return rt.kind


def _interaction_from_json(obj, where: str, depth: int) -> Interaction:
    if depth > _MAX_NESTING:
        raise TraceFormatError(f"{where}: followingInteractions nested too deeply")
    if not isinstance(obj, dict):
        raise TraceFormatError(f"{where}: interaction must be an object")
    code = obj.get("code")
    if code not in INTERACTION_CODES:
        raise TraceFormatError(f"{where}: unknown interaction code {code!r}")
    following = obj.get("followingInteractions", [])
    if not isinstance(following, list):
        raise TraceFormatError(f"{where}: followingInteractions must be a list")
    nested = tuple(
        _interaction_from_json(f, f"{where}.followingInteractions[{i}]", depth + 1)
        for i, f in enumerate(following)
    )
    rt = None
    if "returnTypeOf" in obj:
        rt = _runtime_type_from_json(obj["returnTypeOf"], where)
    if code == GET_FIELD:
        fld = obj.get("field")
        if not isinstance(fld, str):
            raise TraceFormatError(f"{where}: getField requires a field name")
        return Interaction(code=GET_FIELD, field=fld, return_type_of=rt, following=nested)
    if code == METHOD_CALL:
        name = obj.get("methodName")
        if not isinstance(name, str):
            raise TraceFormatError(f"{where}: methodCall requires methodName")
        fid = obj.get("functionId", "")
        if not isinstance(fid, str):
            raise TraceFormatError(f"{where}: functionId must be a string")
        return Interaction(code=METHOD_CALL, method_name=name, function_id=fid, following=nested)
    if code == USED_AS_ARGUMENT:
        callee = obj.get("calleeFunctionId", "")
        if not isinstance(callee, str):
            raise TraceFormatError(f"{where}: calleeFunctionId must be a string")
        return Interaction(code=USED_AS_ARGUMENT, callee_function_id=callee)
    op = obj.get("operator", "")
    if not isinstance(op, str):
        raise TraceFormatError(f"{where}: operator must be a string")
    return Interaction(code=code, operator=op)


def _interaction_to_json(it: Interaction) -> dict:
    obj: dict = {"code": it.code}
    if it.code == GET_FIELD:
        obj["field"] = it.field
        if it.return_type_of is not None:
            obj["returnTypeOf"] = _runtime_type_to_json(it.return_type_of)
        obj["followingInteractions"] = [_interaction_to_json(f) for f in it.following]
    elif it.code == METHOD_CALL:
        obj["methodName"] = it.method_name
        if it.function_id:
            obj["functionId"] = it.function_id
        obj["followingInteractions"] = [_interaction_to_json(f) for f in it.following]
    elif it.code == USED_AS_ARGUMENT:
        if it.callee_function_id:
            obj["calleeFunctionId"] = it.callee_function_id
    else:
        if it.operator:
            obj["operator"] = it.operator
    return obj


def _container_from_json(obj, where: str) -> FunctionContainer:
    if not isinstance(obj, dict):
        raise TraceFormatError(f"{where}: function container must be an object")
    name = obj.get("functionName")
    if not isinstance(name, str):
        raise TraceFormatError(f"{where}: functionName is required")
    for flag in ("isExported", "isConstructor"):
        if flag in obj and not isinstance(obj[flag], bool):
            raise TraceFormatError(f"{where}: {flag} must be a boolean")
    required = obj.get("requiredModule", "")
    if not isinstance(required, str):
        raise TraceFormatError(f"{where}: requiredModule must be a string")

    args: dict[int, ArgumentContainer] = {}
    for key, arg_obj in (obj.get("args") or {}).items():
        try:
            index = int(key)
        except (TypeError, ValueError):
            raise TraceFormatError(f"{where}: argument key {key!r} is not an index") from None
        if index < 0:
            raise TraceFormatError(f"{where}: argument index {index} is negative")
        if not isinstance(arg_obj, dict):
            raise TraceFormatError(f"{where}.args[{key}]: must be an object")
        interactions = arg_obj.get("interactions", [])
        if not isinstance(interactions, list):
            raise TraceFormatError(f"{where}.args[{key}]: interactions must be a list")
        args[index] = ArgumentContainer(
            argument_name=str(arg_obj.get("argumentName", f"arg{index}")),
            argument_index=index,
            interactions=[
                _interaction_from_json(it, f"{where}.args[{key}].interactions[{i}]", 1)
                for i, it in enumerate(interactions)
            ],
        )
    args = dict(sorted(args.items()))

    invocations = []
    raw_invocations = obj.get("invocations", [])
    if not isinstance(raw_invocations, list):
        raise TraceFormatError(f"{where}: invocations must be a list")
    for i, rec in enumerate(raw_invocations):
        if not isinstance(rec, dict):
            raise TraceFormatError(f"{where}.invocations[{i}]: must be an object")
        arg_types = rec.get("argumentRuntimeTypes", [])
        if not isinstance(arg_types, list):
            raise TraceFormatError(f"{where}.invocations[{i}]: argumentRuntimeTypes must be a list")
        if "returnRuntimeType" not in rec:
            raise TraceFormatError(f"{where}.invocations[{i}]: returnRuntimeType is required")
        invocations.append(
            InvocationRecord(
                argument_runtime_types=[
                    _runtime_type_from_json(t, f"{where}.invocations[{i}]") for t in arg_types
                ],
                return_runtime_type=_runtime_type_from_json(
                    rec["returnRuntimeType"], f"{where}.invocations[{i}]"
                ),
            )
        )

    container = FunctionContainer(
        function_name=name,
        is_exported=bool(obj.get("isExported", False)),
        is_constructor=bool(obj.get("isConstructor", False)),
        required_module=required,
        args=args,
        invocations=invocations,
    )
    _pad_invocations(container)
    return container


def _pad_invocations(container: FunctionContainer) -> None:
    # Invocation records are padded with undefined up to the maximum arity
    # observed in the container so merging sees call-aligned tuples.
    arity = container.max_arity()
    for rec in container.invocations:
        while len(rec.argument_runtime_types) < arity:
            rec.argument_runtime_types.append(RuntimeTypeName("undefined"))


def _container_to_json(c: FunctionContainer) -> dict:
    return {
        "functionName": c.function_name,
        "isExported": c.is_exported,
        "isConstructor": c.is_constructor,
        "requiredModule": c.required_module,
        "args": {
            str(i): {
                "argumentName": a.argument_name,
                "interactions": [_interaction_to_json(it) for it in a.interactions],
            }
            for i, a in c.args.items()
        },
        "invocations": [
            {
                "argumentRuntimeTypes": [
                    _runtime_type_to_json(t) for t in rec.argument_runtime_types
                ],
                "returnRuntimeType": _runtime_type_to_json(rec.return_runtime_type),
            }
            for rec in c.invocations
        ],
    }


def referenced_function_ids(interactions) -> set[str]:
    """All function ids referenced from a list of interactions, nested included."""

    ids: set[str] = set()
    stack = list(interactions)
    while stack:
        it = stack.pop()
        if it.function_id:
            ids.add(it.function_id)
        if it.callee_function_id:
            ids.add(it.callee_function_id)
        stack.extend(it.following)
    return ids


def _validate_links(trace: Trace) -> None:
    edges: dict[str, set[str]] = {}
    for fid, container in trace.functions.items():
        refs: set[str] = set()
        for arg in container.args.values():
            refs |= referenced_function_ids(arg.interactions)
        for ref in refs:
            if ref not in trace.functions:
                raise TraceFormatError(f"{fid}: dangling function id {ref!r}")
        edges[fid] = refs

    # The container reference graph must be acyclic.
    WHITE, GREY, BLACK = 0, 1, 2
    color = {fid: WHITE for fid in trace.functions}
    for start in trace.functions:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, list[str]]] = [(start, list(edges[start]))]
        color[start] = GREY
        while stack:
            node, pending = stack[-1]
            if pending:
                nxt = pending.pop()
                if color[nxt] == GREY:
                    raise TraceFormatError(f"cyclic function id references involving {nxt!r}")
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, list(edges[nxt])))
            else:
                color[node] = BLACK
                stack.pop()


def trace_from_json(data) -> Trace:
    if not isinstance(data, dict):
        raise TraceFormatError("trace must be a JSON object")
    version = data.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise TraceFormatError(f"unsupported schema version {version!r}")
    functions_obj = data.get("functions")
    if not isinstance(functions_obj, dict):
        raise TraceFormatError("trace requires a functions map")
    functions: dict[str, FunctionContainer] = {}
    for fid, obj in functions_obj.items():
        functions[fid] = _container_from_json(obj, fid)
    trace = Trace(functions=functions)
    _validate_links(trace)
    return trace


def trace_to_json(trace: Trace) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "functions": {fid: _container_to_json(c) for fid, c in trace.functions.items()},
    }


def load_trace(source) -> Trace:
    """Load a trace from a path, file object or JSON string.

    Raises TraceFormatError for malformed JSON, unknown interaction codes,
    dangling function ids and cyclic references.
    """

    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, os.PathLike):
        # a path object is always a file reference; a missing file is OSError
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    elif isinstance(source, str) and os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"malformed trace JSON: {exc}") from exc
    return trace_from_json(data)


def dumps_trace(trace: Trace) -> str:
    """Canonical JSON text for a trace (stable field order, 2-space indent)."""

    return json.dumps(trace_to_json(trace), indent=2) + "\n"


def save_trace(trace: Trace, target) -> None:
    text = dumps_trace(trace)
    if hasattr(target, "write"):
        target.write(text)
        return
    with io.open(target, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _container_identity(c: FunctionContainer) -> tuple:
    return (c.function_name, c.required_module, c.is_exported, c.is_constructor)


def merge_traces(first: Trace, second: Trace) -> Trace:
    """Merge two traces container-wise, as when several documentation
    examples are executed as separate programs.

    Containers with the same identity (name, module, export flags) are
    combined: interactions and invocations concatenate and records re-pad to
    the new maximum arity.  Remaining containers from the second trace keep
    their relative order under fresh ids.
    """

    merged = Trace()
    by_identity: dict[tuple, str] = {}
    remap: dict[str, str] = {}

    def fresh_id() -> str:
        n = len(merged.functions) + 1
        while f"functionId_{n}" in merged.functions:
            n += 1
        return f"functionId_{n}"

    for source in (first, second):
        for fid, container in source.functions.items():
            identity = _container_identity(container)
            if identity in by_identity:
                remap[fid] = by_identity[identity]
            else:
                new_id = fid if fid not in merged.functions else fresh_id()
                remap[fid] = new_id
                by_identity[identity] = new_id
                merged.functions[new_id] = FunctionContainer(
                    function_name=container.function_name,
                    is_exported=container.is_exported,
                    is_constructor=container.is_constructor,
                    required_module=container.required_module,
                )
        for fid, container in source.functions.items():
            target = merged.functions[remap[fid]]
            for index, arg in container.args.items():
                slot = target.args.get(index)
                if slot is None:
                    slot = ArgumentContainer(arg.argument_name, index)
                    target.args[index] = slot
                    target.args = dict(sorted(target.args.items()))
                slot.interactions.extend(_remap_interaction(it, remap) for it in arg.interactions)
            for rec in container.invocations:
                target.invocations.append(
                    InvocationRecord(list(rec.argument_runtime_types), rec.return_runtime_type)
                )
        # ids in the remap table are per-source
        remap.clear()

    for container in merged.functions.values():
        _pad_invocations(container)
    return merged


def _remap_interaction(it: Interaction, remap: dict[str, str]) -> Interaction:
    return Interaction(
        code=it.code,
        field=it.field,
        method_name=it.method_name,
        function_id=remap.get(it.function_id, it.function_id),
        return_type_of=it.return_type_of,
        following=tuple(_remap_interaction(f, remap) for f in it.following),
        callee_function_id=remap.get(it.callee_function_id, it.callee_function_id),
        operator=it.operator,
    )
