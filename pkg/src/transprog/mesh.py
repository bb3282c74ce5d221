"""MeSH descriptor vocabulary and the A/C/H tree-number category rules.

Category assignment works purely on tree-number prefixes and a small set of
exact tree numbers.  The default rules (2020 vocabulary):

* Animal (A):         prefix ``B01``, excluding the Humans tree number
* Cell/molecular (C): prefixes ``A11``, ``B02``, ``B03``, ``B04``, ``G02.111.570``
* Human (H):          the exact Humans tree number, or prefix ``M01``

Rules are data, not code, and can be overridden from a small text config.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from .corpus import Document
from .errors import ParseError

HUMANS_TREE_NUMBER = "B01.050.150.900.649.313.988.400.112.400.400"

_TREE_RE = re.compile(r"^[A-Z]\d+(\.\d+)*$")

ACH_LABELS = ("A", "C", "H", "AC", "AH", "CH", "ACH", "none")


@dataclass(frozen=True)
class MeshDescriptor:
    name: str
    ui: str
    tree_numbers: frozenset[str]

    def __post_init__(self):
        if not self.name:
            raise ValueError("descriptor name must be non-empty")
        if not self.tree_numbers:
            raise ValueError(f"descriptor {self.name!r} has no tree numbers")
        for t in self.tree_numbers:
            if not _TREE_RE.match(t):
                raise ValueError(f"descriptor {self.name!r} has malformed tree number {t!r}")


@dataclass(frozen=True)
class CategoryRules:
    """Tree-number prefix/exact rules that assign A, C, and H categories."""

    a_prefixes: frozenset[str] = frozenset({"B01"})
    a_exclusions: frozenset[str] = frozenset({HUMANS_TREE_NUMBER})
    c_prefixes: frozenset[str] = frozenset({"A11", "B02", "B03", "B04", "G02.111.570"})
    h_prefixes: frozenset[str] = frozenset({"M01"})
    h_exact: frozenset[str] = frozenset({HUMANS_TREE_NUMBER})

    @staticmethod
    def from_file(path: str) -> "CategoryRules":
        """Load rules from a ``key = v1, v2, ...`` text file.

        Recognized keys: a_prefixes, a_exclusions, c_prefixes, h_prefixes,
        h_exact.  Missing keys keep their defaults.
        """
        values: dict[str, frozenset[str]] = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ParseError(f"bad rules line {line!r}", line=lineno)
                key, _, rhs = line.partition("=")
                key = key.strip()
                if key not in ("a_prefixes", "a_exclusions", "c_prefixes", "h_prefixes", "h_exact"):
                    raise ParseError(f"unknown rules key {key!r}", line=lineno)
                values[key] = frozenset(v.strip() for v in rhs.split(",") if v.strip())
        return CategoryRules(**values)


def _has_prefix(tree: str, prefix: str) -> bool:
    return tree == prefix or tree.startswith(prefix + ".")


def categories_for_tree(tree: str, rules: CategoryRules) -> frozenset[str]:
    """Categories contributed by a single tree number."""
    cats = set()
    if (
        any(_has_prefix(tree, p) for p in rules.a_prefixes)
        and tree not in rules.a_exclusions
        and tree not in rules.h_exact
    ):
        cats.add("A")
    if any(_has_prefix(tree, p) for p in rules.c_prefixes):
        cats.add("C")
    if tree in rules.h_exact or any(_has_prefix(tree, p) for p in rules.h_prefixes):
        cats.add("H")
    return frozenset(cats)


@dataclass(frozen=True)
class MeshVocabulary:
    """Descriptor name -> descriptor map plus the active category rules.

    Lookup is case-sensitive exact match on the descriptor name.
    """

    descriptors: dict[str, MeshDescriptor]
    category_rules: CategoryRules = field(default_factory=CategoryRules)

    def __len__(self) -> int:
        return len(self.descriptors)

    def classify_term(self, name: str) -> frozenset[str]:
        """Union of per-tree-number categories; unknown term -> empty set."""
        desc = self.descriptors.get(name)
        if desc is None:
            return frozenset()
        cats: set[str] = set()
        for tree in desc.tree_numbers:
            cats |= categories_for_tree(tree, self.category_rules)
        return frozenset(cats)

    def basic_terms(self) -> frozenset[str]:
        """All terms whose categories intersect {A, C}."""
        return frozenset(
            name for name in self.descriptors if self.classify_term(name) & {"A", "C"}
        )

    def clinical_terms(self) -> frozenset[str]:
        """All terms whose categories contain H."""
        return frozenset(
            name for name in self.descriptors if "H" in self.classify_term(name)
        )

    def category_counts(self) -> dict[str, int]:
        """Number of terms carrying each category (a term may count in several)."""
        counts = {"A": 0, "C": 0, "H": 0}
        for name in self.descriptors:
            for c in self.classify_term(name):
                counts[c] += 1
        return counts

    def classify_paper(self, doc: Document) -> str:
        """7-way label from the union of per-term categories; empty union -> 'none'."""
        cats: set[str] = set()
        for term in doc.mesh_terms:
            cats |= self.classify_term(term)
        if not cats:
            return "none"
        return "".join(c for c in "ACH" if c in cats)


def classify_term(vocab: MeshVocabulary, name: str) -> frozenset[str]:
    return vocab.classify_term(name)


def classify_paper(vocab: MeshVocabulary, doc: Document) -> str:
    return vocab.classify_paper(doc)


def basic_terms(vocab: MeshVocabulary) -> frozenset[str]:
    return vocab.basic_terms()


def clinical_terms(vocab: MeshVocabulary) -> frozenset[str]:
    return vocab.clinical_terms()


def parse_mesh(
    desc_stream: BinaryIO,
    rules: CategoryRules | None = None,
    *,
    warnings: list[str] | None = None,
) -> MeshVocabulary:
    """Parse the MeSH descriptor XML (desc-year schema) into a vocabulary.

    Descriptors without tree numbers are skipped with a warning.
    """
    descriptors: dict[str, MeshDescriptor] = {}
    try:
        for event, elem in ET.iterparse(desc_stream, events=("end",)):
            if elem.tag != "DescriptorRecord":
                continue
            ui_el = elem.find("DescriptorUI")
            name_el = elem.find("DescriptorName/String")
            name = (name_el.text or "").strip() if name_el is not None else ""
            ui = (ui_el.text or "").strip() if ui_el is not None else ""
            trees = frozenset(
                (t.text or "").strip()
                for t in elem.findall("TreeNumberList/TreeNumber")
                if t.text and t.text.strip()
            )
            if name:
                if trees:
                    descriptors[name] = MeshDescriptor(name=name, ui=ui, tree_numbers=trees)
                elif warnings is not None:
                    warnings.append(f"descriptor {name!r} has no tree numbers; skipped")
            elem.clear()
    except ET.ParseError as exc:
        raise ParseError(
            f"malformed MeSH XML: {exc}", offset=getattr(exc, "position", (None, None))[1]
        ) from exc
    return MeshVocabulary(descriptors=descriptors, category_rules=rules or CategoryRules())
