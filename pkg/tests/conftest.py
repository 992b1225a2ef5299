import sys

import numpy as np
import pytest

from regularities.bats import BroadType, Relation, resolve
from regularities.embed_io import EmbeddingTable
from regularities.synth import SynthModel, SynthSpec, generate_dataset

TYPE_DIRS = {
    BroadType.INFLECTIONAL: "1_Inflectional_morphology",
    BroadType.DERIVATIONAL: "2_Derivational_morphology",
    BroadType.ENCYCLOPEDIC: "3_Encyclopedic_semantics",
    BroadType.LEXICOGRAPHIC: "4_Lexicographic_semantics",
}


def write_bats(root, relations):
    """Write ``{(broad_type, filename): [lines]}`` as a BATS-style tree."""
    for (btype, fname), lines in relations.items():
        d = root / TYPE_DIRS[btype]
        d.mkdir(parents=True, exist_ok=True)
        (d / fname).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return root


def random_quad_vectors(rng, dim):
    return [rng.standard_normal(dim) for _ in range(4)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_table():
    words = ["a", "a*", "b", "b*", "w"]
    rows = [[1, 0], [1, 1], [0.9, 0.1], [0.9, 1.1], [-1, 0]]
    return EmbeddingTable.from_rows(words, rows)


@pytest.fixture(scope="session")
def clustered_dataset():
    """Eight clustered relations, two per broad type, sharing one table."""
    specs = []
    for k, btype in enumerate(BroadType):
        for j in range(2):
            specs.append(SynthSpec(model=SynthModel.CLUSTERED, n_pairs=30, dim=50, separation=4.0, spread=1.0,
                                   n_distractors=200, seed=100 + 10 * k + j, name=f"{btype.value[:3]}{j}",
                                   broad_type=btype))
    table, relations = generate_dataset(specs)
    return table, [resolve(r, table) for r in relations]


def parallel_relation(n=10, dim=8, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    starts = rng.standard_normal((n, dim))
    v = rng.standard_normal(dim)
    ends = starts + scale * v
    words = [f"s{i}" for i in range(n)] + [f"e{i}" for i in range(n)]
    table = EmbeddingTable.from_rows(words, np.vstack([starts, ends]))
    rel = Relation("par", BroadType.INFLECTIONAL, tuple((f"s{i}", f"e{i}") for i in range(n)))
    return table, resolve(rel, table)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
