"""Synthetic desk-scale fixture corpus.

Generates a corpus with two token clusters (laboratory vs. clinic vocabulary),
a toy MeSH descriptor file, and an entity dictionary covering every cluster
word.  Clinical-trial phase documents mix the clusters at a ratio that grows
with the phase, so the phase-ordering and ACH-ordering validation protocols
hold by construction.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .corpus import Corpus, Document, make_document, write_records
from .mesh import HUMANS_TREE_NUMBER, MeshVocabulary, parse_mesh
from .textprep import EntityDictionary

BASIC_WORDS = (
    "kinase", "assay", "enzyme", "substrate", "vitro", "culture", "molecular",
    "receptor", "pathway", "lysate", "microscopy", "reagent", "plasmid",
    "buffer", "sequencing", "blot", "clone", "mutant", "expression", "ligand",
    "genome", "protein", "peptide", "chromatin", "cytoplasm", "membrane",
    "organelle", "centrifuge", "pipette", "gel", "electrophoresis", "staining",
    "incubation", "vector", "transfection", "knockout", "phenotype",
    "genotype", "ribosome", "mitochondria",
)

CLINICAL_WORDS = (
    "patient", "trial", "dose", "outcome", "efficacy", "placebo", "cohort",
    "symptom", "therapy", "treatment", "clinic", "hospital", "diagnosis",
    "prognosis", "enrollment", "randomized", "adverse", "survival",
    "remission", "followup",
    "biopsy", "oncology", "cardiology", "nurse", "ward", "admission",
    "discharge", "relapse", "medication", "dosage", "infusion", "screening",
    "consent", "baseline", "endpoint", "morbidity", "mortality",
    "comorbidity", "referral", "triage",
)

BASIC_MESH_C = (
    ("Cell Culture Study", "D900001", ("A11.111",)),
    ("Molecular Probe Assay", "D900002", ("G02.111.570.200",)),
    ("Bacteria Model", "D900003", ("B03.140",)),
    ("Virus Model", "D900004", ("B04.450",)),
)
BASIC_MESH_A = (
    ("Mouse Model", "D900005", ("B01.050.199",)),
    ("Zebrafish Model", "D900006", ("B01.050.300",)),
)
CLINICAL_MESH = (
    ("Humans", "D006801", (HUMANS_TREE_NUMBER,)),
    ("Patients", "D010361", ("M01.643",)),
    ("Inpatients", "D007297", ("M01.643.340",)),
    ("Outpatients", "D010045", ("M01.643.555",)),
    ("Survivors", "D017741", ("M01.860",)),
    ("Volunteers", "D014849", ("M01.939",)),
)

PHASE_MIX = {"I": 0.60, "II": 0.70, "III": 0.80, "IV": 0.90}


@dataclass(frozen=True)
class FixtureSizes:
    """Default sizes give a 10,000-document corpus whose laboratory and
    clinic token pools are drawn equally often overall, so neither cluster
    dominates the negative-sampling distribution."""

    n_basic: int = 4300
    n_clinical: int = 3300
    n_mixed: int = 400
    docs_per_phase: int = 500
    tokens_per_doc: int = 40

    @staticmethod
    def small(**overrides) -> "FixtureSizes":
        """Scaled-down fixture with the same composition ratios."""
        base = FixtureSizes(n_basic=860, n_clinical=660, n_mixed=80, docs_per_phase=100)
        return replace(base, **overrides)


def synthetic_entities() -> EntityDictionary:
    entries = [(w, f"LAB:{w.upper()}", "gene") for w in BASIC_WORDS]
    entries += [(w, f"CLIN:{w.upper()}", "disease") for w in CLINICAL_WORDS]
    return EntityDictionary.from_entries(entries)


def mesh_descriptor_xml() -> str:
    """Toy MeSH descriptor XML in the desc-year schema."""
    records = []
    for name, ui, trees in BASIC_MESH_C + BASIC_MESH_A + CLINICAL_MESH:
        tree_xml = "".join(f"<TreeNumber>{t}</TreeNumber>" for t in trees)
        records.append(
            "<DescriptorRecord>"
            f"<DescriptorUI>{ui}</DescriptorUI>"
            f"<DescriptorName><String>{name}</String></DescriptorName>"
            f"<TreeNumberList>{tree_xml}</TreeNumberList>"
            "</DescriptorRecord>"
        )
    return (
        "<?xml version=\"1.0\"?>\n<DescriptorRecordSet>"
        + "".join(records)
        + "</DescriptorRecordSet>\n"
    )


def synthetic_mesh_vocab() -> MeshVocabulary:
    import io

    return parse_mesh(io.BytesIO(mesh_descriptor_xml().encode("utf-8")))


def _doc_tokens(rng: np.random.Generator, p_clinical: float, n_mean: int) -> list[str]:
    # Jitter the document length so no two mixes look exactly alike.
    n = max(6, int(rng.integers(n_mean - 4, n_mean + 5)))
    words = []
    for _ in range(n):
        pool = CLINICAL_WORDS if rng.random() < p_clinical else BASIC_WORDS
        words.append(pool[int(rng.integers(0, len(pool)))])
    return words


def _cluster_tokens(pool: tuple[str, ...], rng: np.random.Generator) -> list[str]:
    """Every cluster document carries the whole pool, independently shuffled.

    A shared token multiset keeps the within-cluster score distribution tight
    (two narrow modes over the combined clusters) while the per-document
    order keeps windowed co-occurrence non-degenerate.
    """
    return [pool[j] for j in rng.permutation(len(pool))]


def _make_doc(
    doc_id: str,
    rng: np.random.Generator,
    p_clinical: float,
    mesh: tuple[str, ...],
    pub_types: tuple[str, ...],
    tokens_per_doc: int,
    words: list[str] | None = None,
) -> Document:
    if words is None:
        words = _doc_tokens(rng, p_clinical, tokens_per_doc)
    year = 1995 + int(rng.integers(0, 26))
    return make_document(
        id=doc_id,
        title=" ".join(words[:4]).capitalize() + ".",
        abstract=" ".join(words[4:]) + ".",
        year=year,
        pub_types=pub_types,
        mesh_terms=mesh,
    )


def synthetic_corpus(seed: int = 42, sizes: FixtureSizes = FixtureSizes()) -> Corpus:
    """Deterministic fixture corpus: basic, clinical, mixed, and phase documents."""
    rng = np.random.default_rng(seed)
    docs: list[Document] = []

    basic_mesh_names = [m[0] for m in BASIC_MESH_C + BASIC_MESH_A]
    for i in range(sizes.n_basic):
        mesh = (basic_mesh_names[i % len(basic_mesh_names)],)  # C or A labels
        docs.append(
            _make_doc(
                f"B{i:05d}", rng, 0.0, mesh, ("Journal Article",),
                sizes.tokens_per_doc, words=_cluster_tokens(BASIC_WORDS, rng),
            )
        )

    # Rotate over every clinical descriptor so no single mesh token (e.g.
    # "humans") becomes so frequent that its vector washes out.
    clinical_mesh_names = [m[0] for m in CLINICAL_MESH]
    for i in range(sizes.n_clinical):
        pub: tuple[str, ...] = ("Journal Article", "Guideline")
        mesh = (clinical_mesh_names[i % len(clinical_mesh_names)],)  # all H labels
        docs.append(
            _make_doc(
                f"C{i:05d}", rng, 1.0, mesh, pub,
                sizes.tokens_per_doc, words=_cluster_tokens(CLINICAL_WORDS, rng),
            )
        )

    for i in range(sizes.n_mixed):
        # Alternate CH and AH labels so the mixed cohort spans several classes.
        anchor = BASIC_MESH_C[0][0] if i % 2 == 0 else BASIC_MESH_A[0][0]
        human = clinical_mesh_names[i % len(clinical_mesh_names)]
        docs.append(
            _make_doc(
                f"M{i:05d}", rng, 0.5, (anchor, human), ("Journal Article",),
                sizes.tokens_per_doc,
            )
        )

    for phase, mix in PHASE_MIX.items():
        for i in range(sizes.docs_per_phase):
            mesh = (clinical_mesh_names[i % len(clinical_mesh_names)],)
            docs.append(
                _make_doc(
                    f"P{phase}{i:05d}", rng, mix, mesh,
                    (f"Clinical Trial, Phase {phase}",), sizes.tokens_per_doc,
                )
            )

    return Corpus(tuple(docs), source=f"synthetic(seed={seed})")


def write_fixture(out_dir: str, seed: int = 42, sizes: FixtureSizes = FixtureSizes()) -> dict[str, str]:
    """Write records.jsonl, mesh.xml, and entities.tsv; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "corpus": os.path.join(out_dir, "records.jsonl"),
        "mesh": os.path.join(out_dir, "mesh.xml"),
        "entities": os.path.join(out_dir, "entities.tsv"),
    }
    with open(paths["corpus"], "w", encoding="utf-8") as f:
        write_records(synthetic_corpus(seed, sizes), f)
    with open(paths["mesh"], "w", encoding="utf-8") as f:
        f.write(mesh_descriptor_xml())
    dictionary = synthetic_entities()
    with open(paths["entities"], "w", encoding="utf-8") as f:
        for surface, eid in sorted(dictionary.surface_to_id.items()):
            f.write(f"{' '.join(surface)}\t{eid}\t{dictionary.id_to_type[eid]}\n")
    return paths
