import numpy as np
import pytest

from conftest import csv_frame, frame_of
from mixlm.errors import ColumnTypeError, DataError, FormulaError


def test_sex_treatment_coding(sex_df):
    fr = frame_of(sex_df, "pitch ~ sex")
    assert fr.x_labels == ("(Intercept)", "sexmale")
    np.testing.assert_array_equal(fr.X[:, 1], [0, 0, 0, 1, 1, 1])
    np.testing.assert_array_equal(fr.X[:, 0], np.ones(6))


def test_numeric_predictor(age_df):
    fr = frame_of(age_df, "pitch ~ age")
    np.testing.assert_array_equal(fr.X[:, 1], [14, 23, 35, 48, 52, 67])


def test_intercept_only(age_df):
    fr = frame_of(age_df, "pitch ~ 1")
    assert fr.X.shape == (6, 1)


def test_interaction_columns():
    df = csv_frame("y,a,b\n1,p,u\n2,q,u\n3,r,v\n4,p,v\n5,q,v\n")
    fr = frame_of(df, "y ~ a*b")
    assert fr.x_labels == ("(Intercept)", "aq", "ar", "bv", "aq:bv", "ar:bv")
    np.testing.assert_array_equal(fr.X[:, 4], fr.X[:, 1] * fr.X[:, 3])
    assert dict((t.label(), cols) for t, cols in fr.term_columns)["a"] == (1, 2)


def test_numeric_by_categorical():
    df = csv_frame("y,x,g\n1,2,a\n2,3,b\n3,4,a\n")
    fr = frame_of(df, "y ~ x:g")
    assert fr.x_labels == ("(Intercept)", "gb:x")
    np.testing.assert_array_equal(fr.X[:, 1], [0, 3, 0])


def test_synthetic_mixed_blocks(synth_df):
    fr = frame_of(synth_df, "frequency ~ attitude + gender + (1|subject) + (1|scenario)")
    assert fr.n == 83
    assert [b.n_groups for b in fr.z_blocks] == [6, 7]
    assert fr.z_blocks[1].group_labels == tuple(str(i) for i in range(1, 8))
    assert fr.Z.shape == (83, 13)
    np.testing.assert_array_equal(fr.Z.sum(axis=1), 2 * np.ones(83))


def test_random_slope_block_width(synth_df):
    fr = frame_of(synth_df, "frequency ~ attitude + (1+attitude|subject)")
    b = fr.z_blocks[0]
    assert b.matrix.shape == (83, 12)
    assert b.column_names == ("(Intercept)", "attitudepol")
    # group j owns columns 2j and 2j+1
    rows = np.flatnonzero(b.group_codes == 2)
    np.testing.assert_array_equal(b.matrix[rows, 4], 1.0)
    np.testing.assert_array_equal(b.matrix[rows, 5], fr.X[rows, 1])


def test_missing_rows_dropped(synth_df):
    fr = frame_of(synth_df, "frequency ~ attitude + (1|subject)")
    assert 68 not in fr.kept_rows and fr.n == 83


def test_drop_row_and_subset(synth_df):
    fr = frame_of(synth_df, "frequency ~ attitude + (1|subject)")
    d = fr.drop_row(0)
    assert d.n == 82 and d.kept_rows[0] == fr.kept_rows[1]
    np.testing.assert_array_equal(d.X, fr.X[1:])
    s = fr.subset([0, 5])
    assert s.n == 2


def test_group_levels_only_present():
    df = csv_frame("y,g\n1,a\n2,b\nNA,c\n3,a\n")
    fr = frame_of(df, "y ~ 1 + (1|g)")
    assert fr.z_blocks[0].group_labels == ("a", "b")


def test_arrays_read_only(sex_df):
    fr = frame_of(sex_df, "pitch ~ sex")
    with pytest.raises(ValueError):
        fr.X[0, 0] = 5


def test_unknown_variable(sex_df):
    with pytest.raises(FormulaError, match="age"):
        frame_of(sex_df, "pitch ~ age")


def test_categorical_response(sex_df):
    with pytest.raises(ColumnTypeError):
        frame_of(sex_df, "sex ~ pitch")


def test_non_integer_numeric_grouping():
    df = csv_frame("y,g\n1,0.5\n2,1.5\n")
    with pytest.raises(ColumnTypeError):
        frame_of(df, "y ~ 1 + (1|g)")


def test_no_complete_rows():
    df = csv_frame("y,x\nNA,1\n2,NA\n")
    with pytest.raises(DataError):
        frame_of(df, "y ~ x")
