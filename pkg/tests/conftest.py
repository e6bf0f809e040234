"""Shared fixtures.

The politeness-shaped dataset built here is synthetic: it mirrors the
layout of the real study (6 speakers, 7 scenarios, 2 attitudes, one missing
response) so that structural and timing checks can run without the real
file. It is never used to check published numbers.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
import pytest

from mixlm import build_model_frame, parse_formula, read_csv
from mixlm.numstat import Rng

FIXTURES = Path(__file__).parent / "fixtures"
POLITENESS = FIXTURES / "politeness_data.csv"
SUBJECTS = ("F1", "F2", "F3", "M3", "M4", "M7")


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str):
    return read_csv(FIXTURES / name)


def frame_of(df, formula: str):
    return build_model_frame(df, parse_formula(formula))


def csv_frame(text: str):
    return read_csv(io.StringIO(text))


def synthetic_politeness_csv(seed: int = 7) -> str:
    rng = Rng(seed)
    subj_int = dict(zip(SUBJECTS, 40.0 * rng.normal(6)))
    subj_slope = dict(zip(SUBJECTS, 4.0 * rng.normal(6)))
    scen_int = 15.0 * rng.normal(7)
    lines = ["subject,gender,scenario,attitude,frequency"]
    noise = rng.normal(84)
    k = 0
    for s in SUBJECTS:
        gender = s[0]
        for sc in range(1, 8):
            for att in ("pol", "inf"):
                pol = att == "pol"
                y = (256.0 - 108.0 * (gender == "M") - 19.7 * pol + subj_int[s]
                     + subj_slope[s] * pol + scen_int[sc - 1] + 25.0 * noise[k])
                cell = "NA" if (s == "M4" and sc == 7 and pol) else f"{y:.1f}"
                lines.append(f"{s},{gender},{sc},{att},{cell}")
                k += 1
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def sex_df():
    return load("sex_pitch.csv")


@pytest.fixture(scope="session")
def age_df():
    return load("age_pitch.csv")


@pytest.fixture(scope="session")
def sleep_df():
    return load("sleepstudy.csv")


@pytest.fixture(scope="session")
def synth_df():
    return csv_frame(synthetic_politeness_csv())


@pytest.fixture(scope="session")
def synth_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("synth") / "politeness_synthetic.csv"
    path.write_text(synthetic_politeness_csv())
    return path


def balanced_groups(n_groups=5, per=4, seed=3):
    """Single-factor balanced data: y = 10 + group effect + noise."""
    rng = Rng(seed)
    eff = 3.0 * rng.normal(n_groups)
    noise = rng.normal(n_groups * per)
    rows = ["g,y"]
    for j in range(n_groups):
        for i in range(per):
            rows.append(f"g{j},{float(10.0 + eff[j] + noise[j * per + i])!r}")
    return csv_frame("\n".join(rows) + "\n")


# Acceptance verdicts, keyed by criterion number; filled by test_acceptance.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}: {detail}")
