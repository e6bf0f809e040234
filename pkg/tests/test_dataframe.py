import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import csv_frame, synthetic_politeness_csv
from mixlm.dataframe import (Column, DataFrame, derive_center, derive_transform, five_number,
                             group_stats, missing_report, read_csv, write_csv)
from mixlm.errors import ColumnTypeError, DataError, DomainError


class TestReadCsv:
    def test_sex_fixture_types(self, sex_df):
        assert sex_df.names == ["sex", "pitch"]
        assert sex_df["sex"].levels == ("female", "male")
        assert not sex_df["sex"].is_numeric
        assert list(sex_df["pitch"].values) == [233, 204, 242, 130, 112, 142]

    def test_synthetic_politeness_shape(self, synth_df):
        assert synth_df.n_rows == 84
        assert synth_df.names == ["subject", "gender", "scenario", "attitude", "frequency"]
        assert synth_df["scenario"].is_numeric
        assert synth_df["attitude"].levels == ("inf", "pol")

    def test_missing_tokens(self):
        df = csv_frame("a,b\n1,x\nNA,\n3,y\n")
        assert math.isnan(df["a"].values[1])
        assert df["b"].values[1] == -1
        assert df["b"].labels() == ["x", None, "y"]

    def test_scientific_numbers(self):
        df = csv_frame("a\n1e3\n-2.5E-2\n.5\n+4\n")
        assert list(df["a"].values) == [1000.0, -0.025, 0.5, 4.0]

    def test_mixed_column_is_categorical(self):
        df = csv_frame("a\n1\nx\n")
        assert df["a"].levels == ("1", "x")

    def test_levels_sorted_bytewise(self):
        df = csv_frame("g\nb\nB\na\nä\n")
        assert df["g"].levels == ("B", "a", "b", "ä")

    def test_bom_and_bytes(self):
        df = read_csv(io.BytesIO("﻿x,y\n1,2\n".encode("utf-8")))
        assert df.names == ["x", "y"]

    def test_quoted_fields(self):
        df = csv_frame('name,v\n"a, b",1\n"c",2\n')
        assert df["name"].levels == ("a, b", "c")

    @pytest.mark.parametrize("text,match", [
        ("", "empty input"),
        ("a,b\n", "empty data"),
        ("a,a\n1,2\n", "duplicate header"),
        ("a,b\n1,2\n3\n", "row 2"),
    ])
    def test_errors(self, text, match):
        with pytest.raises(DataError, match=match):
            csv_frame(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_csv(tmp_path / "nope.csv")


class TestWriteCsv:
    def test_round_trip(self, synth_df):
        again = csv_frame(write_csv(synth_df))
        assert again.names == synth_df.names
        for name in synth_df.names:
            a, b = synth_df[name], again[name]
            assert a.levels == b.levels
            np.testing.assert_array_equal(a.values, b.values)

    def test_integers_without_decimal(self, sex_df):
        assert "233\n" in write_csv(sex_df)

    def test_writes_to_path(self, sex_df, tmp_path):
        path = tmp_path / "out.csv"
        write_csv(sex_df, path)
        assert read_csv(path).n_rows == 6

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.one_of(st.none(), st.floats(-1e6, 1e6, allow_nan=False)), min_size=1, max_size=20))
    def test_numeric_round_trip_exact(self, values):
        if all(v is None for v in values):
            return
        df = DataFrame((Column.numeric("v", values),))
        back = csv_frame(write_csv(df))["v"].values
        np.testing.assert_array_equal(back, df["v"].values)


class TestMissing:
    def test_single_missing_frequency(self, synth_df):
        assert missing_report(synth_df) == [(69, "frequency")]

    def test_column_major_order(self):
        df = csv_frame("a,b\nNA,1\n2,NA\nNA,3\n")
        assert missing_report(df) == [(1, "a"), (3, "a"), (2, "b")]

    def test_none(self, sex_df):
        assert missing_report(sex_df) == []


class TestDerive:
    def test_center_age(self, age_df):
        c = derive_center(age_df, "age")["age.c"].values
        expected = np.array([14, 23, 35, 48, 52, 67]) - 239 / 6
        np.testing.assert_allclose(c, expected, atol=1e-12)
        np.testing.assert_allclose(c[:2], [-25.8333, -16.8333], atol=1e-4)
        assert abs(c.sum()) < 1e-9

    def test_center_keeps_missing(self):
        df = derive_center(csv_frame("x\n1\nNA\n3\n"), "x")
        v = df["x.c"].values
        assert v[0] == -1 and math.isnan(v[1]) and v[2] == 1

    def test_center_categorical_fails(self, sex_df):
        with pytest.raises(ColumnTypeError):
            derive_center(sex_df, "sex")

    def test_square(self, age_df):
        sq = derive_transform(age_df, "age", "square")["age.sq"].values
        assert sq[0] == 196 and sq[-1] == 4489

    def test_log(self, age_df):
        lg = derive_transform(age_df, "age", "log")["age.log"].values
        np.testing.assert_allclose(lg, np.log([14, 23, 35, 48, 52, 67]))

    def test_log_domain_names_row(self):
        with pytest.raises(DomainError, match="row 2"):
            derive_transform(csv_frame("x\n1\n0\n"), "x", "log")

    def test_unknown_transform(self, age_df):
        with pytest.raises(ValueError):
            derive_transform(age_df, "age", "cube")


class TestSummaries:
    def test_quartiles_of_four(self):
        mn, q1, med, q3, mx = five_number([1, 2, 3, 4])
        assert (mn, q1, med, q3, mx) == (1, 1.5, 2.5, 3.5, 4)

    def test_odd_length_hinges(self):
        assert five_number([1, 2, 3, 4, 5]) == (1, 2, 3, 4, 5)

    def test_empty(self):
        with pytest.raises(DataError):
            five_number([])

    def test_group_stats_two_factors(self, synth_df):
        stats = group_stats(synth_df, "frequency", ["attitude", "gender"])
        assert [s.labels for s in stats] == [("inf", "F"), ("inf", "M"), ("pol", "F"), ("pol", "M")]
        assert sum(s.n for s in stats) == 83

    def test_group_stats_sex(self, sex_df):
        f, m = group_stats(sex_df, "pitch", ["sex"])
        assert f.median == 233 and m.median == 130

    def test_group_stats_numeric_factor_rejected(self, sex_df):
        with pytest.raises(ColumnTypeError):
            group_stats(sex_df, "pitch", ["pitch"])


class TestFrame:
    def test_duplicate_columns(self):
        with pytest.raises(DataError):
            DataFrame((Column.numeric("a", [1]), Column.numeric("a", [2])))

    def test_ragged_columns(self):
        with pytest.raises(DataError):
            DataFrame((Column.numeric("a", [1]), Column.numeric("b", [1, 2])))

    def test_take(self, sex_df):
        sub = sex_df.take([3, 0])
        assert sub["sex"].labels() == ["male", "female"]

    def test_with_column_replaces(self, sex_df):
        df = sex_df.with_column(Column.numeric("pitch", [1] * 6))
        assert df.names == ["sex", "pitch"] and df["pitch"].values[0] == 1

    def test_unknown_column(self, sex_df):
        with pytest.raises(KeyError):
            sex_df["nope"]

    def test_values_read_only(self, sex_df):
        with pytest.raises(ValueError):
            sex_df["pitch"].values[0] = 0

    def test_synthetic_text_is_stable(self):
        assert synthetic_politeness_csv() == synthetic_politeness_csv()
