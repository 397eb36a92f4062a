"""Tests for CSV ingestion, encoding, and splitting."""

import dataclasses

import numpy as np
import pytest

from churnnet import SchemaError, data


def make_record(**overrides):
    base = dict(
        state="KS", account_length=128, area_code="415", phone_number="382-4657",
        international_plan=False, voice_mail_plan=True, num_vmail_messages=25,
        total_day_minutes=265.1, total_day_calls=110, total_day_charge=45.07,
        total_eve_minutes=197.4, total_eve_calls=99, total_eve_charge=16.78,
        total_night_minutes=244.7, total_night_calls=91, total_night_charge=11.01,
        total_intl_minutes=10.0, total_intl_calls=3, total_intl_charge=2.7,
        customer_service_calls=1, churn=False,
    )
    base.update(overrides)
    return data.CustomerRecord(**base)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


HEADER = ",".join(data.FIELD_NAMES) + ",churn"
ROW = ("KS,128,415,382-4657,no,yes,25,265.1,110,45.07,197.4,99,16.78,"
       "244.7,91,11.01,10.0,3,2.7,1,False.")


class TestParsing:
    def test_round_trip(self, tmp_path, small_records):
        path = tmp_path / "rt.csv"
        data.write_csv(small_records[:50], path)
        back = data.parse_csv(path)
        assert back == small_records[:50]

    def test_single_row_values(self, tmp_path):
        path = write_lines(tmp_path / "one.csv", [HEADER, ROW])
        (rec,) = data.parse_csv(path)
        assert rec == make_record()

    def test_header_case_and_space_insensitive(self, tmp_path):
        header = ("STATE,Account_Length,area code,phone,intl plan,vmail plan,"
                  "number vmail messages,total day minutes,total day calls,"
                  "total day charge,total eve minutes,total eve calls,"
                  "total eve charge,total night minutes,total night calls,"
                  "total night charge,total intl minutes,total intl calls,"
                  "total intl charge,custserv calls,churn")
        path = write_lines(tmp_path / "alias.csv", [header, ROW])
        (rec,) = data.parse_csv(path)
        assert rec == make_record()

    def test_column_order_irrelevant(self, tmp_path):
        cols = list(data.FIELD_NAMES) + ["churn"]
        rowvals = ROW.split(",")
        order = list(reversed(range(len(cols))))
        path = write_lines(
            tmp_path / "shuffled.csv",
            [",".join(cols[i] for i in order), ",".join(rowvals[i] for i in order)],
        )
        (rec,) = data.parse_csv(path)
        assert rec == make_record()

    def test_label_spellings(self, tmp_path):
        rows = [ROW.rsplit(",", 1)[0] + "," + lab
                for lab in ("True.", "False.", "yes", "no", "TRUE", "False")]
        path = write_lines(tmp_path / "labels.csv", [HEADER] + rows)
        labels = [r.churn for r in data.parse_csv(path)]
        assert labels == [True, False, True, False, True, False]

    def test_unlabeled_file(self, tmp_path):
        path = write_lines(
            tmp_path / "nolabel.csv",
            [",".join(data.FIELD_NAMES), ROW.rsplit(",", 1)[0]],
        )
        (rec,) = data.parse_csv(path, require_label=False)
        assert rec.churn is None

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(SchemaError):
            data.parse_csv(path)

    def test_missing_label_column_rejected(self, tmp_path):
        path = write_lines(
            tmp_path / "missing.csv",
            [",".join(data.FIELD_NAMES), ROW.rsplit(",", 1)[0]],
        )
        with pytest.raises(SchemaError, match="churn"):
            data.parse_csv(path)

    def test_unknown_column_rejected(self, tmp_path):
        path = write_lines(tmp_path / "unknown.csv", [HEADER + ",zodiac", ROW + ",leo"])
        with pytest.raises(SchemaError, match="zodiac"):
            data.parse_csv(path)

    def test_duplicate_column_rejected(self, tmp_path):
        path = write_lines(tmp_path / "dup.csv", [HEADER + ",churn", ROW + ",False."])
        with pytest.raises(SchemaError, match="duplicate"):
            data.parse_csv(path)

    def test_few_bad_rows_skipped_with_warning(self, tmp_path, caplog):
        bad = ROW.replace("265.1", "none")
        rows = [ROW] * 150 + [bad]
        path = write_lines(tmp_path / "bad.csv", [HEADER] + rows)
        with caplog.at_level("WARNING"):
            records = data.parse_csv(path)
        assert len(records) == 150
        assert any("line 152" in m for m in caplog.messages)

    def test_too_many_bad_rows_rejected(self, tmp_path):
        bad = ROW.replace("265.1", "none")
        path = write_lines(tmp_path / "toobad.csv", [HEADER] + [ROW] * 50 + [bad] * 2)
        with pytest.raises(SchemaError, match="failed to parse"):
            data.parse_csv(path)

    @pytest.mark.parametrize("field,value", [
        ("total_day_minutes", "-1.0"),
        ("total_day_minutes", "inf"),
        ("account_length", "12.5"),
        ("international_plan", "maybe"),
        ("customer_service_calls", "-2"),
    ])
    def test_bad_cells(self, tmp_path, field, value):
        cols = list(data.FIELD_NAMES) + ["churn"]
        vals = ROW.split(",")
        vals[cols.index(field)] = value
        path = write_lines(tmp_path / "cell.csv", [HEADER, ",".join(vals)])
        with pytest.raises(SchemaError):
            data.parse_csv(path)

    def test_integral_float_accepted_for_int_field(self, tmp_path):
        cols = list(data.FIELD_NAMES) + ["churn"]
        vals = ROW.split(",")
        vals[cols.index("account_length")] = "128.0"
        path = write_lines(tmp_path / "intf.csv", [HEADER, ",".join(vals)])
        (rec,) = data.parse_csv(path)
        assert rec.account_length == 128


class TestEncoding:
    def test_one_hot_target(self):
        np.testing.assert_array_equal(data.one_hot_target(False), [1.0, 0.0])
        np.testing.assert_array_equal(data.one_hot_target(True), [0.0, 1.0])

    def test_schema_shape(self, small_records):
        schema = data.fit_schema(small_records)
        assert "state" not in schema.feature_names
        assert "phone_number" not in schema.feature_names
        n_area = len(schema.categorical_levels["area_code"])
        assert schema.categorical_levels["area_code"] == sorted(
            schema.categorical_levels["area_code"]
        )
        # 18 retained fields, area_code expands to its level count
        assert schema.feature_width == 17 + n_area
        assert len(schema.retained_fields) == 18

    def test_schema_deterministic(self, small_records):
        a = data.fit_schema(small_records)
        b = data.fit_schema(list(small_records))
        assert a == b

    def test_features_in_unit_range(self, small_records):
        schema = data.fit_schema(small_records)
        matrix, n_unseen = data.encode_features(small_records, schema)
        assert matrix.shape == (len(small_records), schema.feature_width)
        assert n_unseen == 0
        assert matrix.min() >= 0.0 and matrix.max() <= 1.0

    def test_one_hot_group_sums_to_one_on_observed_levels(self, small_records):
        schema = data.fit_schema(small_records)
        cols = [
            i for i, name in enumerate(schema.feature_names)
            if name.startswith("area_code=")
        ]
        matrix, _ = data.encode_features(small_records, schema)
        np.testing.assert_array_equal(matrix[:, cols].sum(axis=1), 1.0)

    def test_min_max_endpoints(self):
        records = [make_record(total_day_minutes=v) for v in (100.0, 150.0, 300.0)]
        schema = data.fit_schema(records)
        idx = schema.feature_names.index("total_day_minutes")
        feats = [data.encode(r, schema).features[idx] for r in records]
        assert feats[0] == 0.0
        assert feats[1] == pytest.approx(0.25)
        assert feats[2] == 1.0

    def test_out_of_bounds_clamps(self):
        train = [make_record(total_day_minutes=v) for v in (100.0, 300.0)]
        schema = data.fit_schema(train)
        idx = schema.feature_names.index("total_day_minutes")
        low = data.encode(make_record(total_day_minutes=50.0), schema).features[idx]
        high = data.encode(make_record(total_day_minutes=500.0), schema).features[idx]
        assert low == 0.0 and high == 1.0

    def test_constant_field_encodes_zero(self):
        records = [make_record(account_length=77) for _ in range(5)]
        schema = data.fit_schema(records)
        assert "account_length" in schema.constant_fields
        idx = schema.feature_names.index("account_length")
        assert data.encode(records[0], schema).features[idx] == 0.0

    def test_unseen_area_code_zero_group(self):
        train = [make_record(area_code=c) for c in ("408", "415", "510")]
        schema = data.fit_schema(train)
        ex = data.encode(make_record(area_code="999"), schema)
        group = [
            ex.features[schema.feature_names.index(f"area_code={c}")]
            for c in ("408", "415", "510")
        ]
        assert group == [0.0, 0.0, 0.0]
        _, n_unseen = data.encode_features([make_record(area_code="999")], schema)
        assert n_unseen == 1

    def test_unlabeled_record_has_no_target(self):
        rec = make_record(churn=None)
        schema = data.fit_schema([make_record()])
        assert data.encode(rec, schema).target is None


class TestSplit:
    def test_partition(self, small_records):
        train, hold = data.split(small_records, 0.3, seed=0)
        assert len(train) + len(hold) == len(small_records)
        assert len(hold) == round(0.3 * len(small_records))
        seen = {id(r) for r in train} | {id(r) for r in hold}
        assert len(seen) == len(small_records)

    def test_deterministic(self, small_records):
        a = data.split(small_records, 0.25, seed=42)
        b = data.split(small_records, 0.25, seed=42)
        assert a == b

    def test_seed_changes_partition(self, small_records):
        a = data.split(small_records, 0.25, seed=1)
        b = data.split(small_records, 0.25, seed=2)
        assert a[1] != b[1]

    def test_shuffles(self, small_records):
        train, hold = data.split(small_records, 0.25, seed=0)
        assert train != small_records[: len(train)]


def test_with_field_values_replaces_without_mutating(small_records):
    originals = [r.customer_service_calls for r in small_records[:10]]
    swapped = data.with_field_values(
        small_records[:10], "customer_service_calls", reversed(originals)
    )
    assert [r.customer_service_calls for r in swapped] == originals[::-1]
    assert [r.customer_service_calls for r in small_records[:10]] == originals
    assert all(
        dataclasses.replace(s, customer_service_calls=0)
        == dataclasses.replace(o, customer_service_calls=0)
        for s, o in zip(swapped, small_records)
    )
