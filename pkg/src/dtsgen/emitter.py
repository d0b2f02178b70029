"""Emit declaration-file source text from a declaration module AST.

Layout rules: the export assignment leads, declarations follow separated by
blank lines, members indent by four spaces, interface data properties are
quoted, function-typed members use method syntax, and references to
namespace interfaces are qualified at use sites outside the namespace.
A module-class file always carries its (possibly empty) namespace block; a
module-function file omits an empty one.
"""

from __future__ import annotations

from .declaration import (
    ClassDecl,
    DeclarationModule,
    FunctionDecl,
    InterfaceDecl,
    Namespace,
    Signature,
    TemplateKind,
)
from .tstypes import Callback, ShapeProp, render_param, render_type

_INDENT = "    "


def _namespace_interface_names(module: DeclarationModule) -> set[str]:
    names: set[str] = set()
    for ns in module.namespaces:
        if ns.name == module.export_assignment:
            names.update(i.name for i in ns.interfaces)
    return names


class _Emitter:
    def __init__(self, module: DeclarationModule) -> None:
        self.module = module
        self.lines: list[str] = []
        ns_names = _namespace_interface_names(module)
        prefix = module.export_assignment
        self._qualify_outer = (
            (lambda name: f"{prefix}.{name}" if name in ns_names else name)
            if prefix
            else None
        )

    def emit(self) -> str:
        module = self.module
        blocks: list[list[str]] = []
        if module.export_assignment:
            blocks.append([f"export = {module.export_assignment};"])
        if module.template is TemplateKind.MODULE:
            lines = []
            for fn in module.functions:
                lines.extend(self._function_lines(fn, "export function", qualify=None))
            if lines:
                blocks.append(lines)
            for iface in module.interfaces:
                blocks.append(self._interface_lines(iface, "export interface", "", qualify=None))
        else:
            for fn in module.functions:
                blocks.append(self._function_lines(fn, "declare function", self._qualify_outer))
            for cls in module.classes:
                blocks.append(self._class_lines(cls))
            for ns in module.namespaces:
                blocks.append(self._namespace_lines(ns))
            if module.template is TemplateKind.MODULE_CLASS and not module.namespaces:
                blocks.append([f"declare namespace {module.export_assignment} {{", "}"])
        return "\n\n".join("\n".join(b) for b in blocks) + "\n"

    def _function_lines(self, fn: FunctionDecl, keyword: str, qualify) -> list[str]:
        return [f"{keyword} {sig.render(fn.name, qualify)};" for sig in fn.overloads]

    def _signature_member(self, name: str, sig: Signature, qualify) -> str:
        return f"{sig.render(name, qualify)};"

    def _class_lines(self, cls: ClassDecl) -> list[str]:
        q = self._qualify_outer
        lines = [f"declare class {cls.name} {{"]
        for ctor in cls.constructors:
            params = ", ".join(render_param(p, q) for p in ctor.params)
            lines.append(f"{_INDENT}constructor({params});")
        for prop in cls.properties:
            lines.append(_INDENT + self._property_member(prop, q, quote=False))
        for method in cls.methods:
            for sig in method.overloads:
                lines.append(_INDENT + self._signature_member(method.name, sig, q))
        lines.append("}")
        return lines

    def _property_member(self, prop: ShapeProp, qualify, quote: bool) -> str:
        if isinstance(prop.type, Callback) and not prop.optional:
            sig = Signature(prop.type.params, prop.type.return_type)
            return self._signature_member(prop.name, sig, qualify)
        name = f"'{prop.name}'" if quote else prop.name
        opt = "?" if prop.optional else ""
        return f"{name}{opt}: {render_type(prop.type, qualify)};"

    def _interface_lines(self, iface: InterfaceDecl, keyword: str, indent: str, qualify) -> list[str]:
        lines = [f"{indent}{keyword} {iface.name} {{"]
        for prop in iface.props:
            lines.append(indent + _INDENT + self._property_member(prop, qualify, quote=True))
        lines.append(f"{indent}}}")
        return lines

    def _namespace_lines(self, ns: Namespace) -> list[str]:
        # inside the namespace its own interfaces go unqualified
        lines = [f"declare namespace {ns.name} {{"]
        members: list[list[str]] = []
        for fn in ns.functions:
            members.append(
                [
                    _INDENT + f"export function {sig.render(fn.name)};"
                    for sig in fn.overloads
                ]
            )
        for iface in ns.interfaces:
            members.append(self._interface_lines(iface, "export interface", _INDENT, None))
        body = "\n\n".join("\n".join(m) for m in members)
        if body:
            lines.extend(body.split("\n"))
        lines.append("}")
        return lines


def emit(module: DeclarationModule) -> str:
    """Render a declaration module as .d.ts source text."""

    return _Emitter(module).emit()
