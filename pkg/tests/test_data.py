import numpy as np
import pytest

from qsarbench.data import (
    SCHEMA_PRESETS,
    Dataset,
    DatasetSchema,
    load_dataset,
    load_embeddings,
    make_split,
    subsample_fraction,
    undersample,
)
from qsarbench.errors import (
    DimensionMismatch,
    EmptyTrainSet,
    MissingColumn,
    NonBinaryLabel,
    SingleClass,
    UnknownId,
    UnreadableFile,
)

from conftest import write_dataset_csv, write_embeddings_csv


def small_dataset(labels=(1, 1, 1, 0), with_features=False):
    n = len(labels)
    data = Dataset(
        ids=[f"m{i}" for i in range(n)],
        smiles=["C"] * n,
        labels=np.array(labels),
    )
    if with_features:
        data = data.with_features(np.arange(n * 4, dtype=float).reshape(n, 4))
    return data


def test_load_dataset_counts_and_schema(tmp_path):
    path = write_dataset_csv(tmp_path / "d.csv", ["CCO", "c1ccccc1", "CC"], [1, 0, 1])
    data = load_dataset(str(path), SCHEMA_PRESETS["bace"])
    assert len(data) == 3
    assert data.skipped_rows == 0
    assert data.labels.tolist() == [1, 0, 1]
    assert data.ids == ["0", "1", "2"]


def test_load_dataset_skips_unparseable_smiles(tmp_path):
    path = write_dataset_csv(tmp_path / "d.csv", ["CCO", "C1CC", "not smiles", "CC"], [1, 0, 1, 0])
    data = load_dataset(str(path), SCHEMA_PRESETS["bace"])
    assert len(data) == 2
    assert data.skipped_rows == 2
    assert data.smiles == ["CCO", "CC"]


def test_load_dataset_missing_column(tmp_path):
    path = write_dataset_csv(tmp_path / "d.csv", ["C"], [1], smiles_col="smiles", label_col="p_np")
    with pytest.raises(MissingColumn):
        load_dataset(str(path), SCHEMA_PRESETS["bace"])


def test_load_dataset_non_binary_label(tmp_path):
    path = write_dataset_csv(tmp_path / "d.csv", ["C", "CC"], [1, 2])
    with pytest.raises(NonBinaryLabel):
        load_dataset(str(path), SCHEMA_PRESETS["bace"])


def test_load_dataset_float_labels_coerced(tmp_path):
    path = write_dataset_csv(tmp_path / "d.csv", ["C", "CC"], ["1.0", "0.0"])
    data = load_dataset(str(path), SCHEMA_PRESETS["bace"])
    assert data.labels.tolist() == [1, 0]


def test_load_dataset_unreadable():
    with pytest.raises(UnreadableFile):
        load_dataset("/nonexistent/nowhere.csv", SCHEMA_PRESETS["bace"])


def test_custom_schema_with_id_column(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("key,structure,active\nk1,CCO,1\nk2,CC,0\n", encoding="utf-8")
    schema = DatasetSchema(smiles_col="structure", label_col="active", id_col="key")
    data = load_dataset(str(path), schema)
    assert data.ids == ["k1", "k2"]


def test_load_embeddings_alignment(tmp_path, rng):
    ids = ["a", "b", "c"]
    matrix = rng.normal(size=(3, 512))
    path = write_embeddings_csv(tmp_path / "e.csv", ["b", "c", "a"], matrix)
    out = load_embeddings(str(path), ids)
    assert out.shape == (3, 512)
    np.testing.assert_allclose(out[0], matrix[2])  # id "a" was the file's last row
    np.testing.assert_allclose(out[1], matrix[0])


def test_load_embeddings_dimension_mismatch(tmp_path, rng):
    path = write_embeddings_csv(tmp_path / "e.csv", ["a"], rng.normal(size=(1, 511)))
    with pytest.raises(DimensionMismatch):
        load_embeddings(str(path), ["a"])


def test_load_embeddings_unknown_and_missing_ids(tmp_path, rng):
    matrix = rng.normal(size=(2, 512))
    path = write_embeddings_csv(tmp_path / "e.csv", ["a", "zz"], matrix)
    with pytest.raises(UnknownId):
        load_embeddings(str(path), ["a", "b"])
    path2 = write_embeddings_csv(tmp_path / "e2.csv", ["a"], matrix[:1])
    with pytest.raises(UnknownId):
        load_embeddings(str(path2), ["a", "b"])


def test_undersample_forced_reduction():
    data = small_dataset((1, 1, 1, 0))
    balanced = undersample(data, seed=3)
    assert len(balanced) == 2
    assert sorted(balanced.labels.tolist()) == [0, 1]


def test_undersample_balanced_input_unchanged():
    data = small_dataset((1, 0, 1, 0))
    out = undersample(data, seed=9)
    assert out.ids == data.ids
    assert out.labels.tolist() == data.labels.tolist()


def test_undersample_deterministic_and_duplicate_free():
    labels = [1] * 100 + [0] * 10
    data = small_dataset(tuple(labels))
    first = undersample(data, seed=123)
    second = undersample(data, seed=123)
    assert len(first) == 20
    assert first.ids == second.ids
    assert len(set(first.ids)) == 20
    third = undersample(data, seed=124)
    assert third.ids != first.ids  # overwhelmingly likely with 100 choose 10


def test_undersample_single_class():
    with pytest.raises(SingleClass):
        undersample(small_dataset((1, 1, 1)), seed=0)


def test_make_split_arithmetic():
    data = small_dataset((1, 0) * 5)
    plan = make_split(data, seed=5)
    assert plan.train_indices.size == 8
    assert plan.test_indices.size == 2


def test_split_disjoint_and_covering_for_many_seeds():
    data = small_dataset((1, 0) * 13)
    for seed in range(50):
        plan = make_split(data, seed=seed)
        union = np.union1d(plan.train_indices, plan.test_indices)
        assert union.tolist() == list(range(26))
        assert np.intersect1d(plan.train_indices, plan.test_indices).size == 0


def test_split_deterministic():
    data = small_dataset((1, 0) * 10)
    a = make_split(data, seed=77)
    b = make_split(data, seed=77)
    assert a.train_indices.tolist() == b.train_indices.tolist()


def test_subsample_identity_fraction():
    data = small_dataset((1, 0) * 10)
    plan = make_split(data, seed=1)
    same = subsample_fraction(plan, 1.0, seed=2)
    assert same.train_indices.tolist() == plan.train_indices.tolist()
    assert same.test_indices.tolist() == plan.test_indices.tolist()


def test_subsample_is_subset():
    labels = tuple(int(i % 2) for i in range(125))
    data = small_dataset(labels)
    plan = make_split(data, seed=4)
    sub = subsample_fraction(plan, 0.3, seed=6)
    assert sub.train_indices.size == 30
    assert set(sub.train_indices.tolist()) <= set(plan.train_indices.tolist())
    assert sub.test_indices.tolist() == plan.test_indices.tolist()


def test_subsample_zero_rows_rejected():
    data = small_dataset((1, 0, 1, 0, 1, 0, 1, 0, 1, 0))
    plan = make_split(data, seed=1)
    with pytest.raises(EmptyTrainSet):
        subsample_fraction(plan, 0.01, seed=0)


def test_subsample_fraction_out_of_range():
    data = small_dataset((1, 0, 1, 0))
    plan = make_split(data, seed=1)
    with pytest.raises(ValueError):
        subsample_fraction(plan, 1.5, seed=0)
    with pytest.raises(ValueError):
        subsample_fraction(plan, 0.0, seed=0)


def test_take_keeps_alignment():
    data = small_dataset((1, 0, 1, 0), with_features=True)
    sub = data.take(np.array([2, 3]))
    assert sub.ids == ["m2", "m3"]
    assert sub.labels.tolist() == [1, 0]
    np.testing.assert_allclose(sub.features, data.features[2:])


# --- real MoleculeNet files, exercised only when present -------------------------

def _load_real(name):
    from conftest import moleculenet_path
    path = moleculenet_path(name)
    if path is None:
        pytest.skip(f"{name} CSV not available (no network in this environment)")
    return load_dataset(str(path), SCHEMA_PRESETS[name])


def test_real_bace_row_count():
    data = _load_real("bace")
    assert len(data) + data.skipped_rows == 1522


def test_real_bbbp_row_count():
    data = _load_real("bbbp")
    assert len(data) + data.skipped_rows == 2053


def test_real_hiv_row_count():
    data = _load_real("hiv")
    total = len(data) + data.skipped_rows
    assert 39000 <= total <= 42000  # "~40000 compounds"
