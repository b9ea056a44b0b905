"""Population loading, coding, splitting, and binning."""

import numpy as np
import pytest

from conftest import make_population
from proxy_audit.dataset import (discretize, load_csv, partition, program_rv,
                                 subsample)
from proxy_audit.errors import (MissingColumn, RaggedRow, TooFewRows,
                                UnboundVariable)
from proxy_audit.lang.parser import parse_program


def test_retailer_coding(retailer):
    assert retailer.names == ("pregnant", "purchase", "engagement")
    assert retailer.size == 8
    assert retailer.codings["purchase"] == ("a1", "a2", "n1", "n2")
    assert retailer.codings["engagement"] == ("high", "low")
    assert "pregnant" not in retailer.codings  # numeric column stays numeric
    assert retailer.decode("purchase", 2.0) == "n1"
    assert sorted(retailer.domain("purchase")) == [0.0, 1.0, 2.0, 3.0]


def test_retailer_joint_law(retailer):
    # purchase determines Z: a1/a2 (codes 0,1) iff pregnant
    z = retailer.z
    p = retailer.column("purchase")
    assert np.array_equal(z == 1.0, p <= 1.0)
    # engagement independent and uniform
    assert retailer.column("engagement").mean() == 0.5


def test_matrix_is_immutable(retailer):
    with pytest.raises(ValueError):
        retailer.matrix[0, 0] = 9.0


def test_weights_are_uniform(retailer):
    assert np.allclose(retailer.weights, 1.0 / 8.0)
    assert retailer.weights.sum() == pytest.approx(1.0)


def test_feature_names_exclude_protected(retailer):
    assert retailer.feature_names() == ("purchase", "engagement")
    assert retailer.feature_names(include_protected=True) == retailer.names


def test_load_csv_rejects_bad_shapes(tmp_path):
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("a,b\n1,2\n3\n")
    with pytest.raises(RaggedRow):
        load_csv(str(ragged), protected="a")

    missing = tmp_path / "missing.csv"
    missing.write_text("a,b\n1,\n")
    with pytest.raises(RaggedRow):
        load_csv(str(missing), protected="a")

    empty = tmp_path / "empty.csv"
    empty.write_text("a,b\n")
    with pytest.raises(TooFewRows):
        load_csv(str(empty), protected="a")

    ok = tmp_path / "ok.csv"
    ok.write_text("a,b\n1,2\n")
    with pytest.raises(MissingColumn):
        load_csv(str(ok), protected="zz")
    with pytest.raises(MissingColumn):
        load_csv(str(ok), protected="a", label="zz")


def test_program_rv_matches_per_row_eval(retailer, masked_model):
    from proxy_audit.lang.program import evaluate
    rv = program_rv(masked_model, retailer)
    for i in range(retailer.size):
        assert rv[i] == evaluate(masked_model, retailer.row_dict(i))


def test_program_rv_rejects_unknown_params(retailer):
    p = parse_program("lambda zz. zz + 1.0")
    with pytest.raises(UnboundVariable):
        program_rv(p, retailer)


def test_partition_covers_population_exactly(retailer64):
    folds = partition(retailer64, 4, seed=5)
    assert len(folds) == 4
    for analysis, validation in folds:
        assert analysis.size + validation.size == retailer64.size
    total = sum(v.size for _, v in folds)
    assert total == retailer64.size
    # deterministic in the seed
    again = partition(retailer64, 4, seed=5)
    for (a1, v1), (a2, v2) in zip(folds, again):
        assert np.array_equal(v1.matrix, v2.matrix)
    other = partition(retailer64, 4, seed=6)
    assert any(not np.array_equal(v1.matrix, v2.matrix)
               for (_, v1), (_, v2) in zip(folds, other))


def test_partition_validates_inputs(retailer):
    with pytest.raises(TooFewRows):
        partition(retailer, 1, seed=0)
    with pytest.raises(TooFewRows):
        partition(retailer, 9, seed=0)


def test_subsample_is_seeded(retailer):
    a = subsample(retailer, 20, seed=1)
    b = subsample(retailer, 20, seed=1)
    c = subsample(retailer, 20, seed=2)
    assert a.size == 20
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, c.matrix)


def test_discretize_passthrough_for_coarse_columns():
    vals = np.array([0.0, 1.0, 2.0, 1.0])
    assert np.array_equal(discretize(vals, bins=10), vals)


def test_discretize_quantile_bins():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=5000)
    binned = discretize(vals, bins=10)
    codes, counts = np.unique(binned, return_counts=True)
    assert codes.size == 10
    # quantile bins are near-uniform
    assert counts.min() > 0.8 * 500
    assert counts.max() < 1.2 * 500


def test_population_validates_columns():
    with pytest.raises(MissingColumn):
        make_population(["a"], [[1.0]], protected="zz")
    with pytest.raises(RaggedRow):
        make_population(["a", "b"], [[1.0]], protected="a")
