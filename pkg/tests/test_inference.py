import numpy as np
import pytest

from conftest import frame_of
from mixlm.errors import ModelError
from mixlm.inference import lrt_compare
from mixlm.lmm import fit_lmm
from mixlm.numstat import chisq_upper_p

RANDOM = " + (1|subject) + (1|scenario)"


@pytest.fixture(scope="module")
def ml_fits(synth_df):
    def fit(rhs, reml=False):
        return fit_lmm(frame_of(synth_df, "frequency ~ " + rhs + RANDOM), reml=reml)
    return {
        "gender": fit("gender"),
        "both": fit("attitude + gender"),
        "inter": fit("attitude*gender"),
        "attitude": fit("attitude"),
        "both_reml": fit("attitude + gender", reml=True),
    }


def test_basic_comparison(ml_fits):
    res = lrt_compare(ml_fits["gender"], ml_fits["both"])
    assert res.chi_df == 1
    assert res.null.n_params == 5 and res.full.n_params == 6
    assert res.chisq == pytest.approx(ml_fits["gender"].criterion - ml_fits["both"].criterion)
    assert res.p_value == pytest.approx(chisq_upper_p(res.chisq, 1))
    assert res.warnings == ()


def test_interaction_test(ml_fits):
    res = lrt_compare(ml_fits["both"], ml_fits["inter"])
    assert res.chi_df == 1 and res.chisq >= 0
    oracle = ml_fits["both"].log_likelihood - ml_fits["inter"].log_likelihood
    assert res.chisq == pytest.approx(-2 * oracle, abs=1e-9)


def test_summaries(ml_fits):
    res = lrt_compare(ml_fits["gender"], ml_fits["both"])
    assert res.full.aic == ml_fits["both"].aic
    assert res.full.log_likelihood == ml_fits["both"].log_likelihood
    assert "attitude" in res.full.formula


def test_reml_rejected(ml_fits):
    with pytest.raises(ModelError, match="ML"):
        lrt_compare(ml_fits["gender"], ml_fits["both_reml"])


def test_equal_parameters(ml_fits):
    with pytest.raises(ModelError, match="equal parameter"):
        lrt_compare(ml_fits["both"], ml_fits["both"])


def test_reversed_order(ml_fits):
    with pytest.raises(ModelError, match="more parameters"):
        lrt_compare(ml_fits["both"], ml_fits["gender"])


def test_non_nested_warning(synth_df, ml_fits):
    # the gender main effect is absent from the larger model
    full = fit_lmm(frame_of(synth_df, "frequency ~ attitude + attitude:gender" + RANDOM), reml=False)
    res = lrt_compare(ml_fits["gender"], full)
    assert res.warnings and "nested" in res.warnings[0]


def test_different_random_structure(synth_df, ml_fits):
    other = fit_lmm(frame_of(synth_df, "frequency ~ attitude + gender + (1|subject)"), reml=False)
    with pytest.raises(ModelError, match="random-effects structure"):
        lrt_compare(ml_fits["gender"], other)


def test_different_rows(synth_df, ml_fits):
    fr = frame_of(synth_df, "frequency ~ attitude + gender" + RANDOM).drop_row(0)
    with pytest.raises(ModelError, match="observations"):
        lrt_compare(ml_fits["gender"], fit_lmm(fr, reml=False))


def test_small_negative_clamped(ml_fits):
    from dataclasses import replace
    full = replace(ml_fits["both"], criterion=ml_fits["gender"].criterion + 5e-7)
    res = lrt_compare(ml_fits["gender"], full)
    assert res.chisq == 0.0 and res.p_value == 1.0


def test_large_negative_rejected(ml_fits):
    from dataclasses import replace
    full = replace(ml_fits["both"], criterion=ml_fits["gender"].criterion + 1.0)
    with pytest.raises(ModelError, match="not nested"):
        lrt_compare(ml_fits["gender"], full)


def test_sleepstudy_reference(sleep_df):
    null = fit_lmm(frame_of(sleep_df, "Reaction ~ 1 + (Days|Subject)"), reml=False)
    full = fit_lmm(frame_of(sleep_df, "Reaction ~ Days + (Days|Subject)"), reml=False)
    res = lrt_compare(null, full)
    # lme4: anova() gives Chisq 23.537 on 1 df
    assert res.chisq == pytest.approx(23.537, abs=2e-3)
    assert res.full.aic == pytest.approx(1763.94, abs=0.01)
    assert np.isfinite(res.p_value) and res.p_value < 1e-5
