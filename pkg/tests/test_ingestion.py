import json

import pytest

from journeymap.errors import EmptyDataset, MalformedRow
from journeymap.ingestion import (
    EVENT_AFTER_OUTCOME,
    ILLEGAL_TRANSITION,
    LEGAL_TRANSITIONS,
    NO_OUTCOME,
    POST_PURCHASE_ITEM,
    TOO_LONG,
    UNKNOWN_SYMBOL,
    RawRecord,
    cleanse,
    cooccurrence,
    describe,
    load,
    validate,
    validate_query,
)
from journeymap.model import Dataset, Journey, stage_of


def rec(*items):
    return RawRecord(id="t", items=tuple(items))


class TestLoad:
    def test_csv_row(self):
        records = load("r01,c,e,g,i\n", format="csv")
        assert records == [RawRecord(id="r01", items=("c", "e", "g", "i"))]

    def test_jsonl_eleven_items(self):
        line = json.dumps({"id": "x", "items": ["c"] + ["e"] * 9 + ["i"]})
        records = load(line, format="jsonl")
        assert len(records[0].items) == 11

    def test_symbol_legality_deferred_to_validate(self):
        records = load("r02,c,z\n", format="csv")
        assert records[0].items == ("c", "z")

    def test_malformed_csv_row(self):
        with pytest.raises(MalformedRow) as err:
            load("r01\n", format="csv")
        assert err.value.row == 1

    def test_malformed_jsonl(self):
        with pytest.raises(MalformedRow):
            load('{"id": "x"}\n', format="jsonl")
        with pytest.raises(MalformedRow):
            load("not json\n", format="jsonl")

    def test_jsonl_label_ignored(self):
        records = load('{"id": "x", "items": ["c", "i"], "label": 0}\n', format="jsonl")
        assert records[0].items == ("c", "i")


class TestValidate:
    def test_accepts_basic_path(self):
        result = validate(rec("c", "e", "g", "i"))
        assert isinstance(result, Journey)

    def test_event_after_outcome(self):
        assert validate(rec("c", "i", "e")) == EVENT_AFTER_OUTCOME

    def test_stage2_first_is_illegal(self):
        assert validate(rec("e", "c", "g", "k")) == ILLEGAL_TRANSITION

    def test_reawareness_is_legal(self):
        result = validate(rec("c", "g", "b", "e", "i"))
        assert isinstance(result, Journey)

    def test_unknown_symbol(self):
        assert validate(rec("c", "z", "i")) == UNKNOWN_SYMBOL

    def test_post_purchase_item(self):
        assert validate(rec("c", "i", "l")) == POST_PURCHASE_ITEM

    def test_too_long(self):
        assert validate(rec(*(["c"] * 11 + ["i"]))) == TOO_LONG

    def test_no_outcome(self):
        assert validate(rec("c", "e")) == NO_OUTCOME

    def test_length_eleven_accepted(self):
        result = validate(rec(*(["c"] * 10 + ["i"])))
        assert isinstance(result, Journey)

    def test_idempotent_on_accepted(self):
        journey = validate(rec("c", "g", "b", "e", "i"))
        again = validate(RawRecord(id="t", items=journey.items))
        assert isinstance(again, Journey)
        assert again.items == journey.items

    def test_validate_query_allows_missing_outcome(self):
        result = validate_query(rec("c", "e"))
        assert isinstance(result, Journey)
        assert validate_query(rec("e", "c")) == ILLEGAL_TRANSITION


class TestCleanse:
    def test_fixture_counts(self, fixture_report):
        assert fixture_report.accepted == 104
        assert len(fixture_report.rejected) == 23

    def test_fixture_histogram(self, fixture_report):
        assert fixture_report.histogram() == {
            UNKNOWN_SYMBOL: 3,
            NO_OUTCOME: 6,
            EVENT_AFTER_OUTCOME: 5,
            ILLEGAL_TRANSITION: 3,
            POST_PURCHASE_ITEM: 4,
            TOO_LONG: 2,
        }

    def test_all_valid_input(self):
        dataset, report = cleanse([RawRecord("a", ("c", "i")), RawRecord("b", ("d", "j"))])
        assert report.rejected == ()
        assert len(dataset) == 2

    def test_preserves_order(self, fixture_records, fixture_dataset):
        accepted_ids = [r.id for r in fixture_records if isinstance(validate(r), Journey)]
        assert list(fixture_dataset.ids) == accepted_ids

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            cleanse([RawRecord("a", ("c", "e")), RawRecord("b", ("d",))])


class TestDescribe:
    def test_hand_counts(self):
        dataset, _ = cleanse([RawRecord("a", ("c", "i")), RawRecord("b", ("c", "e", "i"))])
        stats = describe(dataset)
        assert (stats.st2_min, stats.st2_max, stats.st2_mean) == (0, 1, 0.5)

    def test_single_journey(self):
        dataset, _ = cleanse([RawRecord("a", ("d", "i"))])
        stats = describe(dataset)
        assert stats.frequencies["st1"] == {"d": 1}
        assert (stats.st2_min, stats.st2_max, stats.st2_mean) == (0, 0, 0.0)

    def test_fixture_scale_mean(self, fixture_dataset):
        stats = describe(fixture_dataset)
        assert abs(stats.st2_mean - 1.32) < 0.01
        assert stats.st2_min == 0
        assert stats.st2_max == 6

    def test_frequencies_sum_to_events(self, fixture_dataset):
        stats = describe(fixture_dataset)
        total = sum(sum(t.values()) for t in stats.frequencies.values())
        assert total == sum(len(j.events) for j in fixture_dataset.journeys)


class TestCooccurrence:
    def test_paper_example(self):
        dataset, _ = cleanse([RawRecord("x", ("a", "e", "i"))])
        matrix = cooccurrence(dataset)
        assert matrix.count("a", "e") == 1
        assert matrix.count("e", "1") == 1
        assert matrix.total() == 2

    def test_duplication_doubles(self):
        dataset, _ = cleanse([RawRecord("x", ("d", "i")), RawRecord("y", ("d", "i"))])
        matrix = cooccurrence(dataset)
        assert matrix.count("d", "1") == 2

    def test_hand_enumeration(self):
        dataset, _ = cleanse([RawRecord("x", ("c", "g", "b", "e", "i"))])
        matrix = cooccurrence(dataset)
        for pair in (("c", "g"), ("g", "b"), ("b", "e"), ("e", "1")):
            assert matrix.count(*pair) == 1
        assert matrix.total() == 4

    def test_total_equals_adjacent_pairs(self, fixture_dataset):
        matrix = cooccurrence(fixture_dataset)
        assert matrix.total() == sum(len(j.events) - 1 for j in fixture_dataset.journeys)

    def test_nonzero_cells_are_legal_transitions(self, fixture_dataset):
        matrix = cooccurrence(fixture_dataset)
        stage = {"1": "st3", "0": "st3"}
        for fi, from_sym in enumerate(matrix.symbols):
            for ti, to_sym in enumerate(matrix.symbols):
                if matrix.counts[fi][ti] > 0:
                    pair = (
                        stage.get(from_sym) or stage_of(from_sym),
                        stage.get(to_sym) or stage_of(to_sym),
                    )
                    assert pair in LEGAL_TRANSITIONS
