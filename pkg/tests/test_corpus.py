from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selpref.corpus import (
    ObservationError,
    ObservationStore,
    UnknownNounError,
    class_distribution,
    class_frequency,
    parse_observations,
    prior_class_distribution,
)


def test_parse_sums_duplicates():
    store = parse_observations("eat\tobject\tapple\t2\n# note\n\neat\tobject\tapple\t3\n")
    assert store.nouns("eat", "object") == {"apple": 5}
    assert store.total("eat", "object") == 5


@pytest.mark.parametrize(
    "line", ["eat\tobject\tapple\t0", "eat\tobject\tapple\tx", "eat\tobject\tapple", "eat\t\tapple\t1"]
)
def test_parse_rejects(line):
    with pytest.raises(ObservationError) as err:
        parse_observations("eat\tobject\tmeat\t1\n" + line + "\n")
    assert err.value.lineno == 2


def test_positive_words_drop_counts():
    store = parse_observations("eat\tobject\tapple\t9\neat\tobject\tmeat\t1\n")
    assert store.positive_words("eat", "object") == {"apple", "meat"}


def test_eat_frequencies(eat, eat_store):
    freq = class_frequency(eat_store, eat, "eat", "object")
    assert freq["FOOD"] == Fraction(7, 4)
    assert freq["COGNITION"] == Fraction(1, 4)
    assert freq["FRUIT"] == Fraction(1, 2)
    assert sum(class_distribution(eat_store, eat, "eat", "object").probs.values()) == pytest.approx(1)


def test_eat_distribution(eat, eat_store):
    dist = class_distribution(eat_store, eat, "eat", "object")
    assert dist["FOOD"] == 0.4375
    assert dist["COGNITION"] == 0.0625
    assert dist.total_freq == 4


def test_unknown_noun_rejected(eat):
    store = parse_observations("eat\tobject\tpizza\t1\n")
    with pytest.raises(UnknownNounError):
        class_frequency(store, eat, "eat", "object")
    kept, dropped = store.restrict_to(eat)
    assert dropped == ["pizza"] and len(kept) == 0


def test_prior_pools_tokens(eat):
    store = parse_observations("eat\tobject\tapple\t3\nsee\tobject\tmeat\t1\n")
    prior = prior_class_distribution(store, eat)
    # 3 tokens of apple over 2 classes plus 1 of meat over 4, total mass 4.
    assert prior["FOOD"] == pytest.approx((1.5 + 0.25) / 4)


def test_store_rejects_nonpositive():
    with pytest.raises(ObservationError):
        ObservationStore({("p", "r", "w"): 0})


triples = st.tuples(
    st.sampled_from(["eat", "see"]),
    st.sampled_from(["object", "subject"]),
    st.sampled_from(["apple", "bagel", "cheese", "meat"]),
)


@settings(max_examples=80, deadline=None)
@given(st.dictionaries(triples, st.integers(1, 20), min_size=1))
def test_token_mass_is_conserved(records):
    from selpref.fixtures import eat_taxonomy

    eat = eat_taxonomy()
    store = ObservationStore(records)
    assert parse_observations(store.to_text()) == store
    for p, r in store.pairs():
        freq = class_frequency(store, eat, p, r)
        # each token's unit mass is split over its ancestor classes
        assert sum(freq.values()) == store.total(p, r)
