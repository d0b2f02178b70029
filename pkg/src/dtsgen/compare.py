"""Structural comparison of two declaration modules.

The expected module (the hand-written reference) is compared against the
actual module (the generated one).  Findings are reported as a flat list of
differences; each difference names the construct by a dotted path built
from the actual file's identifiers.  Function return types are never
compared, parameter names never contribute to equality, and union member
order is irrelevant.  Both inputs must be alias-expanded and normalized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .declaration import (
    ClassDecl,
    DeclarationModule,
    FunctionDecl,
    InterfaceDecl,
    Namespace,
    TemplateKind,
    camel_fold,
)
from .tstypes import (
    ArrayType,
    Callback,
    NamedRef,
    ObjectShape,
    Param,
    PlainObject,
    ShapeProp,
    TsType,
    render_param,
    render_type,
    union_members,
)

TEMPLATE_DIFFERENCE = "TemplateDifference"
EXPORT_ASSIGNMENT_DIFFERENCE = "ExportAssignmentDifference"
FUNCTION_MISSING_DIFFERENCE = "FunctionMissingDifference"
FUNCTION_EXTRA_DIFFERENCE = "FunctionExtraDifference"
FUNCTION_OVERLOADING_DIFFERENCE = "FunctionOverloadingDifference"
PARAMETER_MISSING_DIFFERENCE = "ParameterMissingDifference"
PARAMETER_EXTRA_DIFFERENCE = "ParameterExtraDifference"
PARAMETER_TYPE_DIFFERENCE = "ParameterTypeDifference"

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True, slots=True)
class Difference:
    kind: str
    path: str
    expected: str
    actual: str
    solvability: str = NOT_APPLICABLE

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "path": self.path,
            "expected": self.expected,
            "actual": self.actual,
            "solvability": self.solvability,
        }


@dataclass(slots=True)
class ComparisonReport:
    module: str
    template: str
    differences: list[Difference] = field(default_factory=list)
    tags: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "module": self.module,
            "template": self.template,
            "differences": [d.to_dict() for d in self.differences],
            "tags": sorted(self.tags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=4)


def _has_aliases(module: DeclarationModule) -> bool:
    def scope_has(namespaces) -> bool:
        return any(ns.aliases or scope_has(ns.namespaces) for ns in namespaces)

    return bool(module.aliases) or scope_has(module.namespaces)


def _interface_table(module: DeclarationModule) -> dict[str, InterfaceDecl]:
    table: dict[str, InterfaceDecl] = {}

    def walk(interfaces, namespaces) -> None:
        for decl in interfaces:
            table.setdefault(decl.name, decl)
        for ns in namespaces:
            walk(ns.interfaces, ns.namespaces)

    walk(module.interfaces, module.namespaces)
    return table


def _export_namespace(module: DeclarationModule) -> Namespace | None:
    folded = camel_fold(module.export_assignment)
    if not folded:
        return None
    for ns in module.namespaces:
        if camel_fold(ns.name) == folded:
            return ns
    return None


def _find_function(decls, name: str) -> FunctionDecl | None:
    for decl in decls:
        if decl.name == name:
            return decl
    return None


def _find_class(decls, name: str) -> ClassDecl | None:
    for decl in decls:
        if decl.name == name:
            return decl
    return None


class _Comparator:
    def __init__(self, expected: DeclarationModule, actual: DeclarationModule) -> None:
        self.expected = expected
        self.actual = actual
        self.expected_interfaces = _interface_table(expected)
        self.actual_interfaces = _interface_table(actual)
        self.differences: list[Difference] = []
        self._drilling: set[tuple[str, str]] = set()

    # -- type resolution and equality -------------------------------------

    def _resolve(self, t: TsType, table: dict[str, InterfaceDecl]):
        """An interface reference resolves to (shape, name); other types pass through."""
        if isinstance(t, NamedRef) and not t.args:
            decl = table.get(t.name)
            if decl is not None and not decl.index_signatures and not decl.call_signatures:
                return ObjectShape(decl.props), t.name
        return t, None

    def _types_equal(self, et: TsType, at: TsType, seen: frozenset) -> bool:
        re_t, re_name = self._resolve(et, self.expected_interfaces)
        ra_t, ra_name = self._resolve(at, self.actual_interfaces)
        if re_name is not None or ra_name is not None:
            pair = (re_name or "", ra_name or "")
            if pair in seen:
                return True
            seen = seen | {pair}
        et, at = re_t, ra_t
        if isinstance(et, ObjectShape) and isinstance(at, ObjectShape):
            eprops = {p.name: p for p in et.props}
            aprops = {p.name: p for p in at.props}
            if eprops.keys() != aprops.keys():
                return False
            return all(
                eprops[n].optional == aprops[n].optional
                and self._types_equal(eprops[n].type, aprops[n].type, seen)
                for n in eprops
            )
        if type(et) is not type(at):
            return False
        if isinstance(et, NamedRef) and isinstance(at, NamedRef):
            return et.name == at.name and len(et.args) == len(at.args) and all(
                self._types_equal(e, a, seen) for e, a in zip(et.args, at.args)
            )
        if isinstance(et, ArrayType) and isinstance(at, ArrayType):
            return self._types_equal(et.element, at.element, seen)
        if isinstance(et, Callback) and isinstance(at, Callback):
            if len(et.params) != len(at.params):
                return False
            # only parameters count: names and return types are ignored
            return all(
                ep.optional == ap.optional
                and ep.rest == ap.rest
                and self._types_equal(ep.type, ap.type, seen)
                for ep, ap in zip(et.params, at.params)
            )
        if hasattr(et, "members"):
            emembers = list(union_members(et))
            amembers = list(union_members(at))
            if len(emembers) != len(amembers):
                return False
            remaining = list(amembers)
            for em in emembers:
                for index, am in enumerate(remaining):
                    if self._types_equal(em, am, seen):
                        del remaining[index]
                        break
                else:
                    return False
            return True
        return et == at

    def _is_member_of(self, t: TsType, members, seen: frozenset) -> bool:
        return any(self._types_equal(m, t, seen) for m in members)

    # -- solvability -------------------------------------------------------

    def classify(self, etype: TsType, eopt: bool, atype: TsType, aopt: bool) -> str:
        if aopt and not eopt:
            return UNSOLVABLE
        if self._solvable_type(etype, atype, frozenset()):
            return SOLVABLE
        return UNSOLVABLE

    def _solvable_type(self, etype: TsType, atype: TsType, seen: frozenset) -> bool:
        re_t, re_name = self._resolve(etype, self.expected_interfaces)
        ra_t, ra_name = self._resolve(atype, self.actual_interfaces)
        if re_name is not None or ra_name is not None:
            pair = (re_name or "", ra_name or "")
            if pair in seen:
                return True
            seen = seen | {pair}
        etype, atype = re_t, ra_t
        emembers = list(union_members(etype))
        amembers = list(union_members(atype))
        # every observed member must already belong to the expected union
        if all(self._is_member_of(am, emembers, seen) for am in amembers):
            return True
        if isinstance(atype, PlainObject) and isinstance(etype, (ObjectShape, NamedRef)):
            return True
        if isinstance(etype, ObjectShape) and isinstance(atype, ObjectShape):
            eprops = {p.name: p for p in etype.props}
            aprops = {p.name: p for p in atype.props}
            if not set(aprops) <= set(eprops):
                return False
            for name, aprop in aprops.items():
                eprop = eprops[name]
                if aprop.optional and not eprop.optional:
                    return False
                if self._types_equal(eprop.type, aprop.type, seen):
                    continue
                if not self._solvable_type(eprop.type, aprop.type, seen):
                    return False
            return True
        return False

    # -- difference emission -----------------------------------------------

    def _add(self, kind: str, path: str, expected: str, actual: str,
             solvability: str = NOT_APPLICABLE) -> None:
        self.differences.append(Difference(kind, path, expected, actual, solvability))

    @staticmethod
    def _join(*parts: str) -> str:
        return ".".join(p for p in parts if p)

    # -- declaration-level comparison --------------------------------------

    def compare_function_groups(self, path: str, expected: FunctionDecl,
                                actual: FunctionDecl) -> None:
        if len(expected.overloads) != len(actual.overloads):
            self._add(
                FUNCTION_OVERLOADING_DIFFERENCE,
                path,
                f"{len(expected.overloads)} declaration(s)",
                f"{len(actual.overloads)} declaration(s)",
            )
            return
        for esig, asig in zip(expected.overloads, actual.overloads):
            self.compare_params(path, esig.params, asig.params)

    def compare_params(self, path: str, eparams: tuple[Param, ...],
                       aparams: tuple[Param, ...]) -> None:
        for index in range(max(len(eparams), len(aparams))):
            if index >= len(aparams):
                ep = eparams[index]
                self._add(PARAMETER_MISSING_DIFFERENCE, self._join(path, ep.name),
                          render_param(ep), "")
                continue
            if index >= len(eparams):
                ap = aparams[index]
                self._add(PARAMETER_EXTRA_DIFFERENCE, self._join(path, ap.name),
                          "", render_param(ap))
                continue
            ep, ap = eparams[index], aparams[index]
            if ep.optional == ap.optional and self._types_equal(
                ep.type, ap.type, frozenset()
            ):
                continue
            self.compare_value(self._join(path, ap.name or ep.name),
                               ep.type, ep.optional, render_param(ep),
                               ap.type, ap.optional, render_param(ap))

    def compare_value(self, path: str, etype: TsType, eopt: bool, erender: str,
                      atype: TsType, aopt: bool, arender: str) -> None:
        """Report the difference for one typed slot, drilling into object pairs."""
        re_t, re_name = self._resolve(etype, self.expected_interfaces)
        ra_t, ra_name = self._resolve(atype, self.actual_interfaces)
        opt_differs = eopt != aopt
        if not opt_differs and isinstance(re_t, ObjectShape) and isinstance(ra_t, ObjectShape):
            pair = (re_name or "", ra_name or "")
            if pair not in self._drilling:
                self._drilling.add(pair)
                try:
                    drill_path = self._join(path.rsplit(".", 1)[0], ra_name or re_name or "")
                    self.compare_shapes(drill_path, re_t, ra_t)
                finally:
                    self._drilling.discard(pair)
                return
        if not opt_differs and isinstance(re_t, Callback) and isinstance(ra_t, Callback):
            if len(re_t.params) == len(ra_t.params):
                self.compare_params(path, re_t.params, ra_t.params)
                return
        self._add(PARAMETER_TYPE_DIFFERENCE, path, erender, arender,
                  self.classify(etype, eopt, atype, aopt))

    def compare_shapes(self, path: str, expected: ObjectShape, actual: ObjectShape) -> None:
        eprops = {p.name: p for p in expected.props}
        aprops = {p.name: p for p in actual.props}
        for name, eprop in eprops.items():
            if name not in aprops:
                kind = (
                    FUNCTION_MISSING_DIFFERENCE
                    if isinstance(eprop.type, Callback)
                    else PARAMETER_MISSING_DIFFERENCE
                )
                self._add(kind, self._join(path, name), self._render_prop(eprop), "")
        for name, aprop in aprops.items():
            if name not in eprops:
                kind = (
                    FUNCTION_EXTRA_DIFFERENCE
                    if isinstance(aprop.type, Callback)
                    else PARAMETER_EXTRA_DIFFERENCE
                )
                self._add(kind, self._join(path, name), "", self._render_prop(aprop))
        for name in eprops.keys() & aprops.keys():
            eprop, aprop = eprops[name], aprops[name]
            if eprop.optional == aprop.optional and self._types_equal(
                eprop.type, aprop.type, frozenset()
            ):
                continue
            self.compare_value(self._join(path, name),
                               eprop.type, eprop.optional, self._render_prop(eprop),
                               aprop.type, aprop.optional, self._render_prop(aprop))

    @staticmethod
    def _render_prop(prop: ShapeProp) -> str:
        marker = "?" if prop.optional else ""
        return f"{prop.name}{marker}: {render_type(prop.type)}"

    def compare_named_functions(self, path: str, expected_decls, actual_decls) -> None:
        expected_by_name = {d.name: d for d in expected_decls}
        actual_by_name = {d.name: d for d in actual_decls}
        for name, decl in expected_by_name.items():
            if name not in actual_by_name:
                self._add(FUNCTION_MISSING_DIFFERENCE, self._join(path, name),
                          self._render_function(decl), "")
        for name, decl in actual_by_name.items():
            if name not in expected_by_name:
                self._add(FUNCTION_EXTRA_DIFFERENCE, self._join(path, name),
                          "", self._render_function(decl))
        for name in expected_by_name.keys() & actual_by_name.keys():
            self.compare_function_groups(self._join(path, name),
                                         expected_by_name[name], actual_by_name[name])

    @staticmethod
    def _render_function(decl: FunctionDecl) -> str:
        first = decl.overloads[0] if decl.overloads else None
        if first is None:
            return decl.name
        return first.render(decl.name)

    def compare_classes(self, path: str, expected: ClassDecl, actual: ClassDecl) -> None:
        if len(expected.constructors) != len(actual.constructors):
            self._add(
                FUNCTION_OVERLOADING_DIFFERENCE,
                self._join(path, "constructor"),
                f"{len(expected.constructors)} declaration(s)",
                f"{len(actual.constructors)} declaration(s)",
            )
        else:
            for esig, asig in zip(expected.constructors, actual.constructors):
                self.compare_params(self._join(path, "constructor"), esig.params, asig.params)
        self.compare_named_functions(path, expected.methods, actual.methods)
        eprops = {p.name: p for p in expected.properties}
        aprops = {p.name: p for p in actual.properties}
        for name, prop in eprops.items():
            if name not in aprops:
                kind = (
                    FUNCTION_MISSING_DIFFERENCE
                    if isinstance(prop.type, Callback)
                    else PARAMETER_MISSING_DIFFERENCE
                )
                self._add(kind, self._join(path, name), self._render_prop(prop), "")
        for name, prop in aprops.items():
            if name not in eprops:
                kind = (
                    FUNCTION_EXTRA_DIFFERENCE
                    if isinstance(prop.type, Callback)
                    else PARAMETER_EXTRA_DIFFERENCE
                )
                self._add(kind, self._join(path, name), "", self._render_prop(prop))
        for name in eprops.keys() & aprops.keys():
            eprop, aprop = eprops[name], aprops[name]
            if eprop.optional == aprop.optional and self._types_equal(
                eprop.type, aprop.type, frozenset()
            ):
                continue
            self.compare_value(self._join(path, name),
                               eprop.type, eprop.optional, self._render_prop(eprop),
                               aprop.type, aprop.optional, self._render_prop(aprop))

    # -- entry -------------------------------------------------------------

    def run(self) -> list[Difference]:
        expected, actual = self.expected, self.actual
        if expected.template is not actual.template:
            self._add(TEMPLATE_DIFFERENCE, "", expected.template.value, actual.template.value)
            return self.differences
        if camel_fold(expected.export_assignment) != camel_fold(actual.export_assignment):
            self._add(
                EXPORT_ASSIGNMENT_DIFFERENCE,
                "export=",
                expected.export_assignment or "",
                actual.export_assignment or "",
            )
        template = expected.template
        if template is TemplateKind.MODULE:
            self.compare_named_functions("", expected.functions, actual.functions)
            self._compare_common_classes("", expected.classes, actual.classes)
        elif template is TemplateKind.MODULE_FUNCTION:
            emain = _find_function(expected.functions, expected.export_assignment or "")
            amain = _find_function(actual.functions, actual.export_assignment or "")
            if emain is not None and amain is not None:
                self.compare_function_groups(amain.name, emain, amain)
            self._compare_export_namespaces()
        else:
            emain = _find_class(expected.classes, expected.export_assignment or "")
            amain = _find_class(actual.classes, actual.export_assignment or "")
            if emain is not None and amain is not None:
                self.compare_classes(amain.name, emain, amain)
            self._compare_export_namespaces()
        return self.differences

    def _compare_common_classes(self, path: str, expected_decls, actual_decls) -> None:
        expected_by_name = {c.name: c for c in expected_decls}
        actual_by_name = {c.name: c for c in actual_decls}
        for name, decl in expected_by_name.items():
            if name not in actual_by_name:
                self._add(FUNCTION_MISSING_DIFFERENCE, self._join(path, name),
                          f"class {name}", "")
        for name, decl in actual_by_name.items():
            if name not in expected_by_name:
                self._add(FUNCTION_EXTRA_DIFFERENCE, self._join(path, name),
                          "", f"class {name}")
        for name in expected_by_name.keys() & actual_by_name.keys():
            self.compare_classes(self._join(path, name),
                                 expected_by_name[name], actual_by_name[name])

    def _compare_export_namespaces(self) -> None:
        ens = _export_namespace(self.expected)
        ans = _export_namespace(self.actual)
        efns = ens.functions if ens else ()
        afns = ans.functions if ans else ()
        anchor = (self.actual.export_assignment or self.expected.export_assignment or "")
        if efns or afns:
            self.compare_named_functions(anchor, efns, afns)


def compare(expected: DeclarationModule, actual: DeclarationModule,
            module_name: str, tags: frozenset[str] | None = None) -> ComparisonReport:
    """Compare an expected declaration module against a generated one.

    Both inputs must already be alias-expanded and normalized; leftover
    alias declarations raise ValueError.  The report's tags default to the
    union of both modules' feature tags.
    """

    for side, module in (("expected", expected), ("actual", actual)):
        if _has_aliases(module):
            raise ValueError(f"{side} module still contains type aliases; expand them first")
    if tags is None:
        tags = expected.feature_tags | actual.feature_tags
    report = ComparisonReport(
        module=module_name,
        template=expected.template.value,
        tags=tags,
    )
    report.differences = _Comparator(expected, actual).run()
    return report
