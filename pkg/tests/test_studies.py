import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repmix.studies import (
    DatasetError,
    ReplicationSet,
    StudySummary,
    parse_dataset,
    pool,
    serialize_dataset,
)

LABELS_CSV = """label,role,estimate,std_error
original,original,0.21,0.05
1,replication,0.09,0.05
2,replication,0.21,0.06
3,replication,0.44,0.04
"""

studies = st.lists(
    st.tuples(
        st.floats(-3, 3, allow_nan=False),
        st.floats(0.01, 2.0, allow_nan=False),
    ),
    min_size=1,
    max_size=8,
).map(lambda xs: [StudySummary(f"s{i}", x, s) for i, (x, s) in enumerate(xs)])


class TestStudySummary:
    @pytest.mark.parametrize("se", [0.0, -0.1, math.inf, math.nan])
    def test_rejects_bad_std_error(self, se):
        with pytest.raises(ValueError):
            StudySummary("a", 0.1, se)

    def test_rejects_non_finite_estimate(self):
        with pytest.raises(ValueError):
            StudySummary("a", math.nan, 0.1)


class TestPool:
    def test_labels_pooled_row(self, reps):
        p = pool(reps)
        assert (round(p.estimate, 2), round(p.std_error, 2)) == (0.28, 0.03)
        assert p.estimate == pytest.approx(0.2834968017, abs=1e-9)
        assert p.std_error == pytest.approx(0.0277054258, abs=1e-9)
        assert p.label == "pooled"

    def test_single_study_is_identity(self):
        s = StudySummary("a", 0.37, 0.12)
        p = pool([s], label="x")
        assert (p.estimate, p.std_error, p.label) == (0.37, 0.12, "x")

    def test_equal_weights(self):
        p = pool([StudySummary("a", 0.1, 0.1), StudySummary("b", 0.3, 0.1)])
        assert p.estimate == pytest.approx(0.2, abs=1e-15)
        assert p.std_error == pytest.approx(0.1 / math.sqrt(2), abs=1e-15)

    def test_empty(self):
        with pytest.raises(ValueError):
            pool([])

    @given(studies, st.randoms(use_true_random=False))
    def test_permutation_invariant(self, xs, rnd):
        shuffled = list(xs)
        rnd.shuffle(shuffled)
        a, b = pool(xs), pool(shuffled)
        assert (a.estimate, a.std_error) == (b.estimate, b.std_error)

    @given(studies, studies)
    def test_associative(self, a, b):
        b = [StudySummary(f"b{i}", s.estimate, s.std_error) for i, s in enumerate(b)]
        nested = pool([pool(a, label="A")] + b)
        flat = pool(a + b)
        assert nested.estimate == pytest.approx(flat.estimate, rel=1e-12, abs=1e-14)
        assert nested.std_error == pytest.approx(flat.std_error, rel=1e-12)

    @given(studies)
    def test_pooled_se_not_larger_than_inputs(self, xs):
        assert pool(xs).std_error <= min(s.std_error for s in xs) * (1 + 1e-15)


class TestParse:
    def test_csv(self):
        data = parse_dataset(LABELS_CSV.encode(), "csv")
        assert data.m == 3
        assert data.original == StudySummary("original", 0.21, 0.05)
        assert [r.label for r in data.replications] == ["1", "2", "3"]
        assert data.replications[2].std_error == 0.04

    def test_json_matches_csv(self):
        doc = {
            "original": {"label": "original", "estimate": 0.21, "std_error": 0.05},
            "replications": [
                {"label": "1", "estimate": 0.09, "std_error": 0.05},
                {"label": "2", "estimate": 0.21, "std_error": 0.06},
                {"label": "3", "estimate": 0.44, "std_error": 0.04},
            ],
        }
        assert parse_dataset(json.dumps(doc).encode(), "json") == parse_dataset(LABELS_CSV, "csv")

    def test_bundled_json_matches_bundled_csv(self, labels):
        from importlib import resources

        text = resources.files("repmix").joinpath("datasets/labels.json").read_text()
        assert parse_dataset(text, "json") == labels

    def test_no_replications(self):
        with pytest.raises(DatasetError, match="no replications"):
            parse_dataset("label,role,estimate,std_error\no,original,0.2,0.1\n", "csv")

    def test_missing_original(self):
        with pytest.raises(DatasetError, match="missing original"):
            parse_dataset("label,role,estimate,std_error\nr,replication,0.2,0.1\n", "csv")

    def test_duplicate_labels(self):
        text = LABELS_CSV + "2,replication,0.3,0.1\n"
        with pytest.raises(DatasetError, match="duplicate") as exc:
            parse_dataset(text, "csv")
        assert exc.value.row == 5

    @pytest.mark.parametrize("bad", ["abc", "-0.1", "0"])
    def test_bad_std_error_names_row_and_field(self, bad):
        text = LABELS_CSV.replace("2,replication,0.21,0.06", f"2,replication,0.21,{bad}")
        with pytest.raises(DatasetError) as exc:
            parse_dataset(text, "csv")
        assert (exc.value.row, exc.value.field) == (3, "std_error")
        assert "row 3" in str(exc.value) and "std_error" in str(exc.value)

    def test_missing_column(self):
        with pytest.raises(DatasetError, match="std_error"):
            parse_dataset("label,role,estimate\no,original,0.2\n", "csv")

    def test_unknown_role(self):
        with pytest.raises(DatasetError, match="role"):
            parse_dataset(LABELS_CSV + "x,other,0.1,0.1\n", "csv")

    def test_invalid_utf8(self):
        with pytest.raises(DatasetError, match="UTF-8"):
            parse_dataset(b"\xff\xfe\x00", "csv")

    def test_scale_passthrough(self, labels):
        assert labels.original.scale == "SMD"
        assert labels.pooled().scale == "SMD"


class TestRoundTrip:
    @given(studies, st.sampled_from(["csv", "json"]), st.booleans())
    @settings(max_examples=50)
    def test_round_trip(self, xs, fmt, with_scale):
        if with_scale:
            xs = [StudySummary(s.label, s.estimate, s.std_error, "log OR") for s in xs]
        data = ReplicationSet(StudySummary("orig", 0.5, 0.1), tuple(xs))
        assert parse_dataset(serialize_dataset(data, fmt), fmt) == data
