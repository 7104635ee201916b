"""Parse, validate, and serialize the XML model exchange subset.

Every model stored in the vault travels as UTF-8 XML with this shape::

    <?xml version="1.0" encoding="UTF-8"?>
    <model identifier="m1">
      <name>Sample</name>
      <properties>
        <property key="interface">e1</property>
      </properties>
      <elements>
        <element identifier="e1" type="BusinessProcess">
          <name>Intake</name>
          <documentation>free text</documentation>
        </element>
      </elements>
      <relationships>
        <relationship identifier="r1" type="Flow" source="e1" target="e2"/>
      </relationships>
    </model>

Namespaced input (including ``xsi:type`` style type attributes) is accepted;
tags are matched by local name. Only model/elements/relationships/properties
are interpreted: view and diagram sections are rejected, other unknown nodes
and attributes are ignored. Serialization is canonical (fixed attribute
order, two-space indent, UTF-8, properties sorted by key) so equal documents
produce identical bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from xml.etree import ElementTree as ET

from .errors import InvariantViolation, MalformedXml, SchemaViolation

_ENCODING_RE = re.compile(rb"<\?xml[^>]*encoding\s*=\s*[\"']([A-Za-z0-9._-]+)[\"']")
_REJECTED_SECTIONS = frozenset({"views", "view", "diagrams", "diagram"})


@dataclass
class ModelElement:
    """A typed node of a model. ``kind`` is an open type tag."""

    id: str
    kind: str
    name: str = ""
    documentation: str | None = None


@dataclass
class ModelRelationship:
    """A typed, directed connection between two elements."""

    id: str
    kind: str
    source: str
    target: str
    name: str | None = None


@dataclass
class ModelDocument:
    """An ordered model: elements, relationships, and free-form properties."""

    model_id: str
    name: str = ""
    elements: list[ModelElement] = field(default_factory=list)
    relationships: list[ModelRelationship] = field(default_factory=list)
    properties: dict[str, str] = field(default_factory=dict)

    def element_ids(self) -> set[str]:
        return {e.id for e in self.elements}


@dataclass
class Finding:
    """One validation finding; severity is always ``error`` today."""

    severity: str
    node_id: str
    message: str


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attr(node: ET.Element, name: str) -> str | None:
    value = node.get(name)
    if value is not None:
        return value
    for key, val in node.attrib.items():
        if key.endswith("}" + name):
            return val
    return None


def _child_text(node: ET.Element, name: str) -> str | None:
    for child in node:
        if _local(child.tag) == name:
            return child.text or ""
    return None


def parse_model(xml_bytes: bytes | str) -> ModelDocument:
    """Parse exchange XML into a :class:`ModelDocument`.

    Raises :class:`MalformedXml` for unparseable input or a non-UTF-8
    encoding declaration, and :class:`SchemaViolation` (naming the offending
    node) for subset violations such as missing identifiers, duplicate ids,
    dangling relationship endpoints, or view/diagram sections.
    """
    if isinstance(xml_bytes, str):
        xml_bytes = xml_bytes.encode("utf-8")
    declared = _ENCODING_RE.search(xml_bytes[:200])
    if declared:
        encoding = declared.group(1).decode("ascii", "replace")
        if encoding.lower().replace("-", "") != "utf8":
            raise MalformedXml(f"unsupported encoding {encoding!r}; only UTF-8 is accepted")
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedXml(
            f"not well-formed XML at line {line}, column {column}: {exc.msg if hasattr(exc, 'msg') else exc}",
            detail={"line": line, "column": column},
        ) from exc

    if _local(root.tag) != "model":
        raise SchemaViolation(f"root element must be <model>, got <{_local(root.tag)}>")
    model_id = _attr(root, "identifier")
    if not model_id:
        raise SchemaViolation("model root is missing its identifier attribute")

    doc = ModelDocument(model_id=model_id, name=_child_text(root, "name") or "")
    for section in root:
        tag = _local(section.tag)
        if tag in _REJECTED_SECTIONS:
            raise SchemaViolation(
                f"unsupported section <{tag}> in model {model_id!r}; "
                "only elements, relationships, and properties are accepted"
            )
        if tag == "properties":
            for prop in section:
                if _local(prop.tag) != "property":
                    continue
                key = _attr(prop, "key")
                if not key:
                    raise SchemaViolation(f"property without key attribute in model {model_id!r}")
                doc.properties[key] = prop.text or ""
        elif tag == "elements":
            for node in section:
                doc.elements.append(_parse_element(node))
        elif tag == "relationships":
            for node in section:
                doc.relationships.append(_parse_relationship(node))
        # name handled above; anything else is ignored

    findings = validate_model(doc)
    if findings:
        first = findings[0]
        raise SchemaViolation(first.message, detail=[f.__dict__ for f in findings])
    return doc


def _parse_element(node: ET.Element) -> ModelElement:
    ident = _attr(node, "identifier")
    kind = _attr(node, "type")
    if not ident:
        raise SchemaViolation("element without identifier attribute")
    if not kind:
        raise SchemaViolation(f"element {ident!r} is missing its type attribute")
    return ModelElement(
        id=ident,
        kind=kind,
        name=_child_text(node, "name") or "",
        documentation=_child_text(node, "documentation"),
    )


def _parse_relationship(node: ET.Element) -> ModelRelationship:
    ident = _attr(node, "identifier")
    if not ident:
        raise SchemaViolation("relationship without identifier attribute")
    kind = _attr(node, "type")
    if not kind:
        raise SchemaViolation(f"relationship {ident!r} is missing its type attribute")
    source = _attr(node, "source")
    target = _attr(node, "target")
    if not source or not target:
        raise SchemaViolation(f"relationship {ident!r} is missing source or target")
    return ModelRelationship(
        id=ident, kind=kind, source=source, target=target, name=_child_text(node, "name")
    )


def validate_model(doc: ModelDocument) -> list[Finding]:
    """Check all document invariants; an empty report means the model is valid.

    Findings are deterministic and ordered by node position (elements in
    document order, then relationships).
    """
    findings: list[Finding] = []
    element_ids: set[str] = set()
    for element in doc.elements:
        if not element.id:
            findings.append(Finding("error", "", "element with empty identifier"))
            continue
        if not element.kind:
            findings.append(
                Finding("error", element.id, f"element {element.id!r} has an empty type tag")
            )
        if element.id in element_ids:
            findings.append(
                Finding("error", element.id, f"duplicate element identifier {element.id!r}")
            )
        element_ids.add(element.id)

    seen_rel_ids: set[str] = set()
    for rel in doc.relationships:
        if not rel.id:
            findings.append(Finding("error", "", "relationship with empty identifier"))
            continue
        if not rel.kind:
            findings.append(
                Finding("error", rel.id, f"relationship {rel.id!r} has an empty type tag")
            )
        if rel.id in element_ids or rel.id in seen_rel_ids:
            findings.append(
                Finding("error", rel.id, f"duplicate identifier {rel.id!r} on relationship")
            )
        seen_rel_ids.add(rel.id)
        for side, endpoint in (("source", rel.source), ("target", rel.target)):
            if not endpoint:
                findings.append(
                    Finding("error", rel.id, f"relationship {rel.id!r} has an empty {side}")
                )
            elif endpoint not in element_ids:
                findings.append(
                    Finding(
                        "error",
                        rel.id,
                        f"relationship {rel.id!r} {side} {endpoint!r} is not a declared element",
                    )
                )
    return findings


def serialize_model(doc: ModelDocument) -> bytes:
    """Emit canonical exchange XML for *doc*.

    Raises :class:`InvariantViolation` when the document fails
    :func:`validate_model`; otherwise ``parse_model(serialize_model(doc))``
    is structurally equal to *doc*.
    """
    findings = validate_model(doc)
    if findings:
        raise InvariantViolation(
            f"document {doc.model_id!r} violates invariants: {findings[0].message}",
            detail=[f.__dict__ for f in findings],
        )

    root = ET.Element("model", {"identifier": doc.model_id})
    if doc.name:
        ET.SubElement(root, "name").text = doc.name
    if doc.properties:
        props = ET.SubElement(root, "properties")
        for key in sorted(doc.properties):
            prop = ET.SubElement(props, "property", {"key": key})
            prop.text = doc.properties[key]
    elements = ET.SubElement(root, "elements")
    for element in doc.elements:
        node = ET.SubElement(
            elements, "element", {"identifier": element.id, "type": element.kind}
        )
        if element.name:
            ET.SubElement(node, "name").text = element.name
        if element.documentation is not None:
            ET.SubElement(node, "documentation").text = element.documentation
    relationships = ET.SubElement(root, "relationships")
    for rel in doc.relationships:
        node = ET.SubElement(
            relationships,
            "relationship",
            {
                "identifier": rel.id,
                "type": rel.kind,
                "source": rel.source,
                "target": rel.target,
            },
        )
        if rel.name is not None:
            ET.SubElement(node, "name").text = rel.name
    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True) + b"\n"
