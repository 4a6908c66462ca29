#!/usr/bin/env python3
"""
Single-phrase cue tests: slot layout, detector costs and dictionary routing
"""

import math

import numpy as np
import pytest

from groundkit.core.assets import EXPECTED_COUNTS, AssetStore, build_verb_categories
from groundkit.core.cues import (
    CueAssembler,
    assemble_spc,
    detector_cost,
    fit_position_svms,
    region_key,
    size_cost,
    spc_score,
)
from groundkit.core.synth import SynthConfig, synth_grounding_dataset
from groundkit.errors import AssetError, DimensionError, MissingFeatureError
from groundkit.learners import fit_cca
from groundkit.models.cues import (
    N_SPC,
    SIZE_SLOTS,
    SLOT_INDEX,
    SPC_SLOTS,
    DetectorScoreTable,
    PhraseCueConfig,
)
from groundkit.models.geometry import BoundingBox, ImageSize
from groundkit.models.language import EntityMention, PhraseType, RelationKind, RelationTuple

IMG = ImageSize(width=100, height=100)


def entity(phrase_id, words, phrase_type=PhraseType.OTHER, start=0):
    return EntityMention(
        phrase_id=phrase_id,
        token_span=(start, start + len(words)),
        phrase_type=phrase_type,
        head_tokens=words,
    )


@pytest.fixture
def cue_config():
    return PhraseCueConfig(
        adjective_dict={"white": ["white", "people-white"], "red": ["red"]},
        object_dict={"dog": ["dog"], "dogs": ["dog"], "bench": ["chair"]},
        subject_verb_dict={"sitting": ["people-sitting", "sitting"]},
        verb_object_dict={"riding": ["riding"]},
        verb_forms={"sits": "sitting", "sitting": "sitting", "rides": "riding"},
    )


def test_slot_layout():
    assert len(SPC_SLOTS) == N_SPC == 14
    assert SPC_SLOTS[:2] == ["cca", "position"]
    assert SPC_SLOTS[-4:] == ["object_det", "adjective", "subject_verb", "verb_object"]
    assert [SLOT_INDEX[SIZE_SLOTS[t]] for t in PhraseType] == list(range(2, 10))


def test_size_cost_examples():
    assert size_cost(BoundingBox(x=0, y=0, w=100, h=100), IMG) == 0.0
    assert size_cost(BoundingBox(x=0, y=0, w=50, h=50), IMG) == pytest.approx(0.75)
    assert size_cost(BoundingBox(x=0, y=0, w=100, h=25), IMG) == pytest.approx(0.75)


def test_detector_cost_averages_matched_categories():
    table = DetectorScoreTable("object_det")
    table.add("img", 0, "dog", 0.5)
    table.add("img", 0, "cat", 0.25)
    assert detector_cost(table, ["dog", "cat"], "img", 0) == pytest.approx(-math.log(0.375))
    assert detector_cost(table, ["dog"], "img", 0) == pytest.approx(math.log(2))
    assert detector_cost(table, [], "img", 0) is None
    # unseen categories count as the probability floor
    assert detector_cost(table, ["horse"], "img", 0, prob_floor=1e-4) == pytest.approx(-math.log(1e-4))


def test_detector_table_rejects_bad_probability():
    with pytest.raises(ValueError):
        DetectorScoreTable().add("img", 0, "dog", 1.5)


def test_adjective_routing_uses_people_detector_for_people(cue_config):
    assembler = CueAssembler(cue_config)
    man = entity("1", ["a", "white", "man"], PhraseType.PEOPLE)
    dog = entity("2", ["a", "white", "dog"], PhraseType.ANIMALS)
    assert assembler.adjective_categories(man) == ["people-white"]
    assert assembler.adjective_categories(dog) == ["white"]
    assert assembler.adjective_categories(entity("3", ["a", "red", "man"], PhraseType.PEOPLE)) == ["red"]


def test_object_routing_deduplicates(cue_config):
    assembler = CueAssembler(cue_config)
    assert assembler.object_categories(entity("1", ["dog", "dogs"])) == ["dog"]
    assert assembler.object_categories(entity("2", ["a", "cloud"])) == []


def test_verb_routing_prefers_typed_detector(cue_config):
    assembler = CueAssembler(cue_config)
    man = entity("man", ["a", "man"], PhraseType.PEOPLE)
    dog = entity("dog", ["a", "dog"], PhraseType.ANIMALS)
    bench = entity("bench", ["a", "bench"], PhraseType.OTHER, start=3)
    sits_man = RelationTuple(left=man, rel_words=["sits"], right=bench, kind=RelationKind.VERB)
    sits_dog = RelationTuple(left=dog, rel_words=["sits"], right=bench, kind=RelationKind.VERB)
    assert assembler.verb_categories(man, [sits_man], as_subject=True) == ["people-sitting"]
    assert assembler.verb_categories(dog, [sits_dog], as_subject=True) == ["sitting"]
    # the bench is the object of "sits", which has no verb-object detector
    assert assembler.verb_categories(bench, [sits_man], as_subject=False) == []
    on = RelationTuple(left=man, rel_words=["on"], right=bench, kind=RelationKind.PREPOSITION)
    assert assembler.verb_categories(man, [on], as_subject=True) == []


def test_assemble_row_marks_available_slots(cue_config):
    table = DetectorScoreTable("object_det")
    table.add("img", 0, "dog", 0.9)
    table.add("img", 1, "dog", 0.1)
    assembler = CueAssembler(cue_config, detector_tables={"object_det": table})
    boxes = [BoundingBox(x=0, y=0, w=50, h=50), BoundingBox(x=50, y=50, w=50, h=50)]
    row = assemble_spc(entity("1", ["a", "dog"], PhraseType.ANIMALS), boxes, assembler, "img", IMG)

    flags = dict(zip(SPC_SLOTS, row.available))
    assert flags["cca"] and flags["size_animals"] and flags["object_det"]
    assert not flags["position"] and not flags["adjective"] and not flags["size_people"]
    assert row.costs[0, SLOT_INDEX["object_det"]] < row.costs[1, SLOT_INDEX["object_det"]]
    np.testing.assert_allclose(row.costs[:, SLOT_INDEX["size_animals"]], [0.75, 0.75])
    # unavailable slots hold zero
    assert np.all(row.costs[:, ~row.available] == 0)


def test_spc_score_masks_unavailable_slots(cue_config):
    assembler = CueAssembler(cue_config)
    boxes = [BoundingBox(x=0, y=0, w=100, h=100), BoundingBox(x=0, y=0, w=10, h=10)]
    row = assembler.assemble_row(entity("1", ["a", "cloud"], PhraseType.SCENE), boxes, "img", IMG)
    weights = np.ones(N_SPC)
    np.testing.assert_allclose(spc_score(row, weights), [0.0, 0.99])
    with pytest.raises(DimensionError):
        spc_score(row, np.ones(3))


def test_cca_slot_needs_features(cue_config):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 3))
    model = fit_cca(x, x @ rng.normal(size=(3, 3)) + 0.1 * rng.normal(size=(50, 3)), k=2)
    assembler = CueAssembler(cue_config, cca_model=model)
    boxes = [BoundingBox(x=0, y=0, w=10, h=10)]
    phrase = entity("1", ["a", "dog"])
    with pytest.raises(MissingFeatureError):
        assembler.assemble_table("img", "img.0", [phrase], boxes, IMG, vectors={})
    vectors = {"img.0/phrase/1": x[0], region_key("img", 0): x[1]}
    table = assembler.assemble_table("img", "img.0", [phrase], boxes, IMG, vectors=vectors)
    assert 0.0 <= table.costs[0, 0, SLOT_INDEX["cca"]] <= 2.0


def test_packaged_assets_have_expected_sizes():
    store = AssetStore()
    assert store.validate_counts() == []
    assert store.counts() == EXPECTED_COUNTS
    assert "sitting" in store.verbs
    config = store.phrase_cue_config()
    assert "people-white" in config.adjective_dict["white"]


def test_missing_assets_dir_raises(tmp_path):
    with pytest.raises(AssetError):
        AssetStore(assets_dir=tmp_path)


def test_build_verb_categories_threshold():
    counts = {(PhraseType.PEOPLE, "riding"): 45, (PhraseType.ANIMALS, "riding"): 3, ("other", "holding"): 30}
    categories = build_verb_categories(counts, threshold=30)
    assert categories["riding"] == ["people-riding", "riding"]
    assert categories["holding"] == ["other-holding", "holding"]


def test_position_svms_trained_per_type():
    data = synth_grounding_dataset(SynthConfig(n_images=12), seed=0)
    candidates = {c.image_id: c for c in data.candidates}
    models = fit_position_svms(data.sentences, candidates, seed=0)
    types = {e.phrase_type.value for s in data.sentences for e in s.entities}
    assert set(models) == types
    assert all(m.dim == 4 for m in models.values())
