import json
import math

import pytest

import omnilabel as ol


def test_box_overlap():
    a = ol.BoundingBox.from_cxcywh(0.5, 0.5, 0.2, 0.2)
    b = ol.BoundingBox.from_cxcywh(0.6, 0.5, 0.2, 0.2)
    assert ol.iou(a, a) == 1.0
    # 0.1 x 0.2 overlap over a 0.06 union
    assert math.isclose(ol.iou(a, b), 0.02 / 0.06, rel_tol=1e-12)
    assert ol.giou(a, b) <= ol.iou(a, b)


def test_hungarian():
    a = ol.hungarian([[4.0, 1.0, 5.0], [2.0, 0.0, 6.0]])
    assert a.match == [1, 0]
    assert a.total_cost == 3.0
    with pytest.raises(ol.DimensionError):
        ol.hungarian([[1.0], [2.0]])


def test_cost_and_budget():
    bees = ol.find_profile("bees")
    assert abs(ol.cost_per_image(bees, ol.LabelFormat.tags_k) - 6.1) <= 0.05
    policy = ol.MixturePolicy(
        {ol.LabelFormat.fully: 0.05, ol.LabelFormat.tags_k: 0.80, ol.LabelFormat.boxes_ec: 0.15}, 3596
    )
    assert round(ol.policy_cost(policy, bees)) == 25
    with pytest.raises(ol.InputError):
        ol.cost_per_image(bees, ol.LabelFormat.tags_u)


def test_filter_corpus():
    corpus = ol.synthetic_corpus(4, 5, 3, 1)
    preds = ol.synthetic_predictions(corpus, 30, 2)
    labels = ol.downgrade_corpus(corpus, ol.LabelFormat.tags_k, 3)
    out = ol.filter_corpus(preds, labels, corpus.num_classes, ol.FilterConfig(), 2)
    assert sorted(out) == sorted(img.id for img in corpus.images)
    for image_id, pseudo in out.items():
        expected = sorted(sum(([t.class_id] * t.count for t in labels[image_id].tags), []))
        assert sorted(p.class_id for p in pseudo.items) == expected
    doc = json.loads(ol.pseudo_to_string(out, corpus))
    assert len(doc["annotations"]) == sum(len(p) for p in out.values())


def test_ema():
    t = ol.ema_step(ol.ParamVector([1.0, 2.0]), ol.ParamVector([0.0, 0.0]), 0.5)
    assert t.values == [0.5, 1.0]
    assert t.version == 1
