"""Detection on the bundled retailer models plus structural axioms."""

import numpy as np
import pytest

from conftest import make_population
from oracles import brute_force_decomposition_count
from proxy_audit.dataset import program_rv
from proxy_audit.detection import (DetectionConfig, count_decompositions,
                                   fingerprint_of, measure_all, proxy_detect,
                                   reference_detect)
from proxy_audit.errors import UnboundVariable
from proxy_audit.lang.decompose import EnumerationLimits
from proxy_audit.lang.parser import parse_program
from proxy_audit.measures import EstimatorConfig, association

CFG = DetectionConfig(epsilon=0.9, delta=0.4)


def test_masked_model_guard_witness(retailer, masked_model):
    witnesses, stats = proxy_detect(masked_model, retailer, CFG)
    assert witnesses, "masked proxy must be found"
    top = witnesses[0]
    assert top.association == pytest.approx(1.0, abs=1e-9)
    assert top.influence == pytest.approx(0.5, abs=1e-9)
    assert top.reach_prob == 1.0
    assert "purchase" in top.p1_text
    assert top.positions == ("1",)
    assert stats.decomposition_count == \
        brute_force_decomposition_count(masked_model)
    assert stats.program_size == masked_model.node_count()
    assert not stats.incomplete
    # the model output itself is engineered to be independent of Z
    out = program_rv(masked_model, retailer)
    assert association(out, retailer.z) == pytest.approx(0.0, abs=1e-9)


def test_nouse_model_is_clean(retailer, nouse_model):
    cfg = DetectionConfig(epsilon=0.1, delta=0.0)
    witnesses, _ = proxy_detect(nouse_model, retailer, cfg)
    assert witnesses == []
    for w in measure_all(nouse_model, retailer, cfg):
        assert w.association <= 1e-12


def test_explicit_model_z_guard(retailer, explicit_model):
    cfg = DetectionConfig(epsilon=1.0, delta=0.4)
    witnesses, _ = proxy_detect(explicit_model, retailer, cfg)
    assert witnesses
    assert witnesses[0].association == pytest.approx(1.0, abs=1e-9)
    assert witnesses[0].influence == pytest.approx(0.5, abs=1e-9)
    assert "pregnant" in witnesses[0].p1_text


def test_redline_model_bare_purchase(retailer, redline_model):
    cfg = DetectionConfig(epsilon=0.4, delta=0.4)
    witnesses, _ = proxy_detect(redline_model, retailer, cfg)
    texts = [w.p1_text for w in witnesses]
    assert any(t.endswith(". purchase") for t in texts)


def test_witness_order_is_descending(retailer, masked_model):
    everything = measure_all(masked_model, retailer,
                             DetectionConfig(epsilon=0.0, delta=0.0))
    keys = [(-w.association, -w.influence, w.fingerprint, w.positions)
            for w in everything]
    assert keys == sorted(keys)
    assert len(everything) == brute_force_decomposition_count(masked_model)


def test_matches_reference_on_bundled_models(retailer, masked_model,
                                             explicit_model, redline_model):
    for model in (masked_model, explicit_model, redline_model):
        for eps, delta in ((0.9, 0.4), (0.1, 0.05), (0.0, 0.0)):
            cfg = DetectionConfig(epsilon=eps, delta=delta)
            fast, _ = proxy_detect(model, retailer, cfg)
            slow = reference_detect(model, retailer, cfg)
            assert [w.to_dict() for w in fast] == \
                [w.to_dict() for w in slow]


def test_syntactic_dummy_invariance(retailer, masked_model):
    """Adding an unused input never changes witnesses or fingerprints."""
    dummy = parse_program(
        "lambda purchase, engagement, pregnant. "
        "ite(purchase <= 1.0, ite(engagement <= 0.5, 0.0, 1.0), "
        "ite(engagement <= 0.5, 1.0, 0.0))")
    base, _ = proxy_detect(masked_model, retailer, CFG)
    with_dummy, _ = proxy_detect(dummy, retailer, CFG)
    assert [(w.fingerprint, w.association, w.influence) for w in base] == \
        [(w.fingerprint, w.association, w.influence) for w in with_dummy]


def test_syntactic_independence():
    """Exact product population: no witness at any positive epsilon."""
    grid = [[z, a, b] for z in (0, 1) for a in (0, 1) for b in (0, 1)]
    pop = make_population(["z", "a", "b"], grid, protected="z")
    p = parse_program("lambda a, b. ite(a <= 0.5, b, a + b)")
    for eps in (1e-9, 0.1, 0.5, 1.0):
        witnesses, _ = proxy_detect(
            p, pop, DetectionConfig(epsilon=eps, delta=0.0))
        assert witnesses == []
    for w in measure_all(p, pop, DetectionConfig(epsilon=0.0, delta=0.0)):
        assert w.association <= 1e-12


def test_semantic_cancellation_xor():
    """x XOR z XOR z == x at the output, yet z is still used inside."""
    grid = [[z, x] for z in (0, 1) for x in (0, 1)]
    pop = make_population(["z", "x"], grid, protected="z")
    # xor(a, b) = a + b - 2ab; p computes xor(x, xor(z, z)) = x
    p = parse_program(
        "lambda x, z. x + (z + z - 2.0 * z * z) "
        "- 2.0 * x * (z + z - 2.0 * z * z)")
    out = program_rv(p, pop)
    assert np.array_equal(out, pop.column("x"))
    assert association(out, pop.z) == pytest.approx(0.0, abs=1e-12)
    witnesses, _ = proxy_detect(p, pop,
                                DetectionConfig(epsilon=1.0, delta=0.01))
    assert witnesses, "the inner z computation must be flagged"
    assert any(w.p1_text.endswith(". z") for w in witnesses)


def test_fingerprints_stable_across_reruns(retailer, masked_model):
    a, _ = proxy_detect(masked_model, retailer, CFG)
    b, _ = proxy_detect(masked_model, retailer, CFG)
    assert [w.fingerprint for w in a] == [w.fingerprint for w in b]
    assert all(len(w.fingerprint) == 64 for w in a)


def test_fingerprint_ignores_parameter_names(retailer):
    p = parse_program("lambda purchase, engagement. purchase + 0.0")
    q = parse_program("lambda basket, engagement. basket + 0.0")
    assert fingerprint_of(p) == fingerprint_of(q)


def test_decomposition_cap_sets_incomplete(retailer, masked_model):
    cfg = DetectionConfig(epsilon=0.9, delta=0.4,
                          limits=EnumerationLimits(3, 3))
    _, stats = proxy_detect(masked_model, retailer, cfg)
    assert stats.incomplete
    assert stats.decomposition_count == 3


def test_count_decompositions_grows_with_depth():
    counts = []
    for depth in range(1, 5):
        body = "0.0"
        for i in range(depth, 0, -1):
            body = f"ite(x{i} <= 0.5, {body}, 1.0)"
        counts.append(count_decompositions(parse_program(
            f"lambda {', '.join(f'x{i}' for i in range(1, depth + 1))}. "
            f"{body}")))
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_detection_rejects_unknown_params(retailer):
    p = parse_program("lambda nosuch. nosuch + 1.0")
    with pytest.raises(UnboundVariable):
        proxy_detect(p, retailer, CFG)


def test_sampled_estimator_agrees_on_clear_margins(retailer, masked_model):
    cfg = DetectionConfig(epsilon=0.9, delta=0.4,
                          estimator=EstimatorConfig(0.05, 0.05, seed=0))
    sampled, _ = proxy_detect(masked_model, retailer, cfg)
    exact, _ = proxy_detect(masked_model, retailer, CFG)
    assert {w.fingerprint for w in sampled} == {w.fingerprint for w in exact}


def test_config_validation():
    with pytest.raises(ValueError):
        DetectionConfig(epsilon=1.5, delta=0.0)
    with pytest.raises(ValueError):
        DetectionConfig(epsilon=0.5, delta=-0.1)
    with pytest.raises(ValueError):
        DetectionConfig(epsilon=0.5, delta=0.5, estimator="bogus")
