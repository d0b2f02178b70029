"""Type inference from traces: templates, shapes, candidates, assembly."""

import pytest

from dtsgen.declaration import TemplateKind, normalize
from dtsgen.inference import (
    InferenceConfig,
    InsufficientTraceError,
    build_interface,
    candidate_signatures,
    infer_module,
    merge_signatures,
    normalize_module_name,
    select_template,
)
from dtsgen.trace_model import load_trace, merge_traces, trace_from_json
from dtsgen.tstypes import (
    BOOLEAN,
    NULL,
    NUMBER,
    OBJECT,
    STRING,
    VOID,
    ArrayType,
    Callback,
    NamedRef,
    ObjectShape,
    Param,
    ShapeProp,
    union_of,
)


def trace_of(functions):
    return trace_from_json({"schemaVersion": 1, "functions": functions})


def container(**overrides):
    base = {
        "functionName": "f",
        "isExported": False,
        "isConstructor": False,
        "requiredModule": "",
        "args": {},
        "invocations": [],
    }
    base.update(overrides)
    return base


def call(args, ret):
    return {"argumentRuntimeTypes": args, "returnRuntimeType": ret}


def get_field(name, rt=None, following=()):
    out = {"code": "getField", "field": name, "followingInteractions": list(following)}
    if rt is not None:
        out["returnTypeOf"] = rt
    return out


# ---------------------------------------------------------------------------
# module names and template selection


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("abs", "abs"),
        ("./module", "module"),
        ("./module/index.js", "index"),
        ("../lib/thing.cjs", "thing"),
        ("steamid", "steamid"),
        ("C:\\code\\pkg.js", "pkg"),
    ],
)
def test_normalize_module_name(raw, expected):
    assert normalize_module_name(raw) == expected


def test_template_module_for_member_invocations(traces_dir):
    trace = load_trace(traces_dir / "is-uuid.json")
    assert select_template(trace, "is-uuid") is TemplateKind.MODULE


def test_template_module_function_for_exported_invocation(traces_dir):
    trace = load_trace(traces_dir / "abs.json")
    assert select_template(trace, "abs") is TemplateKind.MODULE_FUNCTION


def test_template_module_class_for_constructor_use(traces_dir):
    trace = load_trace(traces_dir / "greet-classes-module.json")
    assert select_template(trace, "greet-classes-module") is TemplateKind.MODULE_CLASS


def test_template_requires_invocations():
    trace = trace_of(
        {"functionId_1": container(functionName="f", requiredModule="pkg")}
    )
    with pytest.raises(InsufficientTraceError):
        select_template(trace, "pkg")


def test_template_ignores_other_modules():
    trace = trace_of(
        {
            "functionId_1": container(
                functionName="f",
                requiredModule="other",
                isExported=True,
                invocations=[call(["string"], "string")],
            )
        }
    )
    with pytest.raises(InsufficientTraceError):
        select_template(trace, "pkg")


# ---------------------------------------------------------------------------
# interface building


def shape_for(interactions, depth=3):
    trace = trace_of(
        {
            "functionId_1": container(
                requiredModule="pkg",
                args={"0": {"argumentName": "o", "interactions": interactions}},
                invocations=[call(["object"], "undefined")],
            )
        }
    )
    return build_interface(trace.functions["functionId_1"].args[0], trace, depth)


def test_fields_become_properties_with_observed_types():
    shape = shape_for([get_field("a", "string"), get_field("b", "number")])
    assert shape == ObjectShape(
        (ShapeProp("a", STRING), ShapeProp("b", NUMBER))
    )


def test_field_types_pool_into_unions():
    shape = shape_for([get_field("a", "string"), get_field("a", "number")])
    assert shape.props[0].type == union_of(STRING, NUMBER)


def test_undefined_observation_makes_a_property_optional():
    shape = shape_for(
        [get_field("a", "string"), get_field("a", "undefined"), get_field("a", "string")]
    )
    assert shape.props == (ShapeProp("a", STRING, optional=True),)


def test_field_only_ever_undefined_is_omitted():
    shape = shape_for([get_field("a", "undefined"), get_field("b", "string")])
    assert [p.name for p in shape.props] == ["b"]


def test_nested_shapes_through_following_interactions():
    shape = shape_for(
        [
            get_field(
                "outer",
                {"kind": "object", "constructorName": "Object"},
                following=[get_field("inner", "boolean")],
            )
        ]
    )
    assert shape == ObjectShape(
        (ShapeProp("outer", ObjectShape((ShapeProp("inner", BOOLEAN),))),)
    )


def test_depth_budget_degrades_nested_objects_to_plain_object():
    interactions = [
        get_field(
            "outer",
            {"kind": "object", "constructorName": "Object"},
            following=[get_field("inner", "boolean")],
        )
    ]
    assert shape_for(interactions, depth=1).props[0].type == OBJECT


def test_known_constructor_names_the_field_type():
    shape = shape_for([get_field("when", {"kind": "object", "constructorName": "Date"})])
    assert shape.props[0].type == NamedRef("Date")


def test_array_fields_typed_from_index_zero():
    shape = shape_for(
        [get_field("xs", "array", following=[get_field("0", "string"), get_field("0", "number")])]
    )
    assert shape.props[0].type == ArrayType(union_of(STRING, NUMBER))


def test_array_without_element_observations_is_object_array():
    shape = shape_for([get_field("xs", "array")])
    assert shape.props[0].type == ArrayType(OBJECT)


def test_method_calls_become_methods():
    shape = shape_for([{"code": "methodCall", "methodName": "toKey", "followingInteractions": []}])
    assert shape.props == (ShapeProp("toKey", Callback((), VOID)),)


def test_build_interface_rejects_zero_depth():
    with pytest.raises(ValueError):
        shape_for([], depth=0)


# ---------------------------------------------------------------------------
# candidate signatures


def test_one_candidate_per_invocation_with_pooled_shapes(traces_dir):
    trace = load_trace(traces_dir / "glob-to-regexp.json")
    fid, c = next(iter(trace.functions.items()))
    candidates = candidate_signatures(c, trace)
    assert len(candidates) == 5
    merged = merge_signatures(candidates)
    assert len(merged) == 1
    opts = merged[0].params[1].type
    # All call sites share the pooled interface; undefined joins from the
    # calls that omitted the argument.
    names = {p.name for m in opts.members if isinstance(m, ObjectShape) for p in m.props}
    assert names == {"extended", "globstar", "flags"}


def test_callback_arguments_link_through_empty_method_name():
    trace = trace_of(
        {
            "functionId_1": container(
                functionName="each",
                requiredModule="pkg",
                args={
                    "0": {
                        "argumentName": "fn",
                        "interactions": [
                            {"code": "methodCall", "methodName": "", "functionId": "functionId_2"},
                            {"code": "usedAsArgument", "calleeFunctionId": "functionId_2"},
                        ],
                    }
                },
                invocations=[call(["function"], "undefined")],
            ),
            "functionId_2": container(
                functionName="",
                invocations=[call(["string"], "boolean")],
                args={"0": {"argumentName": "item", "interactions": []}},
            ),
        }
    )
    sigs = candidate_signatures(trace.functions["functionId_1"], trace)
    assert sigs[0].params[0].type == Callback((Param("item", STRING),), BOOLEAN)


def test_return_types_from_runtime_kinds():
    trace = trace_of(
        {
            "functionId_1": container(
                requiredModule="pkg",
                invocations=[
                    call([], "string"),
                    call([], "null"),
                    call([], {"kind": "object", "constructorName": "RegExp"}),
                    call([], {"kind": "object", "constructorName": "Object"}),
                ],
            )
        }
    )
    sigs = candidate_signatures(trace.functions["functionId_1"], trace)
    assert [s.return_type for s in sigs] == [STRING, NULL, NamedRef("RegExp"), OBJECT]


def test_undefined_return_becomes_void():
    trace = trace_of(
        {
            "functionId_1": container(
                requiredModule="pkg",
                invocations=[call([], "undefined")],
            )
        }
    )
    sigs = candidate_signatures(trace.functions["functionId_1"], trace)
    assert sigs[0].return_type == VOID


# ---------------------------------------------------------------------------
# finalize: optional parameters from undefined


def finalized_params(invocations, extra=None):
    functions = {
        "functionId_1": container(requiredModule="pkg", invocations=invocations, **(extra or {}))
    }
    trace = trace_of(functions)
    merged = merge_signatures(candidate_signatures(trace.functions["functionId_1"], trace))
    from dtsgen.inference import _finalize_signature

    assert len(merged) == 1
    return _finalize_signature(merged[0]).params


def test_trailing_undefined_parameter_becomes_optional():
    params = finalized_params([call(["string", "string"], "string"), call(["string", "undefined"], "string")])
    assert params[0].optional is False
    assert params[1].optional is True
    assert params[1].type == STRING


def test_undefined_before_required_parameter_stays_spelled():
    params = finalized_params([call(["string", "string"], "string"), call(["undefined", "string"], "string")])
    assert params[0].optional is False
    assert params[0].type == union_of(STRING, __import__("dtsgen.tstypes", fromlist=["UNDEFINED"]).UNDEFINED)
    assert params[1].optional is False


def test_all_trailing_undefined_chain_is_optional():
    # (S,N,B) and (S,N,U) differ in the last position only; their merge then
    # absorbs (S,U,U) through the subset rule, one difference at a time.
    params = finalized_params(
        [
            call(["string", "number", "boolean"], "string"),
            call(["string", "number", "undefined"], "string"),
            call(["string", "undefined", "undefined"], "string"),
        ]
    )
    assert [p.optional for p in params] == [False, True, True]


# ---------------------------------------------------------------------------
# whole-module assembly


def test_module_function_assembly(traces_dir):
    m = infer_module(load_trace(traces_dir / "abs.json"), "abs")
    assert m.template is TemplateKind.MODULE_FUNCTION
    assert m.export_assignment == "Abs"
    assert m.functions[0].name == "Abs"
    assert m.functions[0].overloads[0].params[0].name == "input"
    assert m.namespaces == ()


def test_module_assembly_excludes_callback_containers(traces_dir):
    m = infer_module(load_trace(traces_dir / "callback-module.json"), "callback-module")
    # The anonymous callback and its nested callee never surface as module
    # functions; they shape the callback parameter instead.
    assert m.template is TemplateKind.MODULE_FUNCTION
    cb = m.functions[0].overloads[0].params[1].type
    assert isinstance(cb, Callback)


def test_module_class_assembly(traces_dir):
    m = infer_module(load_trace(traces_dir / "steamid.json"), "steamid")
    assert m.template is TemplateKind.MODULE_CLASS
    assert m.export_assignment == "SteamID"
    cls = m.classes[0]
    assert [s.return_type for s in cls.constructors] == [VOID]
    assert sorted(f.name for f in cls.methods) == [
        "getSteam2RenderedID",
        "isGroupChat",
        "isLobby",
        "isValid",
    ]
    ns = m.namespaces[0]
    assert [f.name for f in ns.functions] == ["fromIndividualAccountID"]
    assert ns.functions[0].overloads[0].params[0].type == union_of(STRING, NUMBER)


def test_class_name_comes_from_runtime_constructor_name(traces_dir):
    m = infer_module(load_trace(traces_dir / "greet-classes-module.json"), "greet-classes-module")
    assert m.export_assignment == "Greeter"
    assert m.classes[0].name == "Greeter"


def test_interface_hoisting_names_and_qualification(traces_dir):
    m = infer_module(load_trace(traces_dir / "glob-to-regexp.json"), "glob-to-regexp")
    ns = m.namespaces[0]
    assert [i.name for i in ns.interfaces] == ["I__opts"]
    assert m.functions[0].overloads[0].params[1].type == NamedRef("I__opts")


def test_nested_interfaces_hoist_with_path_names(traces_dir):
    m = infer_module(load_trace(traces_dir / "callback-module.json"), "callback-module")
    names = sorted(i.name for i in m.namespaces[0].interfaces)
    assert names == ["I__fn__item", "I__fn__item__toKey"]


def test_inference_is_stable_under_self_merge(traces_dir):
    for path in sorted(traces_dir.glob("*.json")):
        trace = load_trace(path)
        doubled = merge_traces(trace, load_trace(path))
        name = path.stem
        assert normalize(infer_module(doubled, name)) == normalize(infer_module(trace, name))


def test_insufficient_trace_raises(traces_dir):
    with pytest.raises(InsufficientTraceError):
        infer_module(trace_of({}), "pkg")
    trace = load_trace(traces_dir / "abs.json")
    with pytest.raises(InsufficientTraceError):
        infer_module(trace, "not-the-module")


def test_depth_limit_config_truncates_interfaces():
    deep_trace = trace_of(
        {
            "functionId_1": container(
                requiredModule="pkg",
                isExported=True,
                args={
                    "0": {
                        "argumentName": "o",
                        "interactions": [
                            get_field(
                                "a",
                                {"kind": "object", "constructorName": "Object"},
                                following=[get_field("b", "string")],
                            )
                        ],
                    }
                },
                invocations=[call(["object"], "undefined")],
            )
        }
    )
    shallow = infer_module(deep_trace, "pkg", InferenceConfig(depth_limit=1))
    iface = shallow.namespaces[0].interfaces[0]
    assert iface.props[0].type == OBJECT
