"""Evidence interchange as XML, for tools that speak files rather than JSON.

The schema is one element per observed variable:

    <?xml version="1.0" encoding="utf-8"?>
    <evidence>
      <variable id="homogeneity_of_description" state="yes"/>
    </evidence>

Export then import reproduces the evidence mapping exactly, including the
empty mapping.  docs/evidence-xml.md is the normative description.
"""

from __future__ import annotations

from xml.etree import ElementTree

from .bn import BayesianNetwork, BayesNetError


class EvidenceXmlError(BayesNetError):
    """Document is not valid evidence XML for the loaded network."""


def evidence_to_xml(evidence: dict[str, str]) -> str:
    root = ElementTree.Element("evidence")
    for var, state in evidence.items():
        ElementTree.SubElement(root, "variable", {"id": var, "state": state})
    ElementTree.indent(root)
    body = ElementTree.tostring(root, encoding="unicode")
    return f'<?xml version="1.0" encoding="utf-8"?>\n{body}\n'


def evidence_from_xml(document: str | bytes, net: BayesianNetwork) -> dict[str, str]:
    """Parse and validate an evidence document against a network."""
    try:
        root = ElementTree.fromstring(document)
    except ElementTree.ParseError as exc:
        raise EvidenceXmlError(f"not well-formed XML: {exc}") from exc
    if root.tag != "evidence":
        raise EvidenceXmlError(f"root element must be <evidence>, found <{root.tag}>")
    evidence: dict[str, str] = {}
    for child in root:
        if child.tag != "variable":
            raise EvidenceXmlError(f"unexpected element <{child.tag}>")
        var = child.get("id")
        state = child.get("state")
        if var is None or state is None:
            raise EvidenceXmlError("<variable> needs both 'id' and 'state' attributes")
        if var in evidence:
            raise EvidenceXmlError(f"duplicate <variable> element for {var!r}")
        try:
            net.variable(var).state_index(state)
        except BayesNetError as exc:
            raise EvidenceXmlError(str(exc)) from exc
        evidence[var] = state
    return evidence
