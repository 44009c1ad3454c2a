"""Visual desk runs at learning rate 0.01.

Same data, architecture, momentum, batch and epochs as the desk profile; only
the step size differs. At 0.1 the sigmoid outputs saturate within the first
few dozen updates and training stalls, so these runs show the pipeline
itself learns. They are supplementary and do not replace the acceptance
criteria.
"""
import dataclasses

import pytest

from visarith.datagen import VISUAL
from visarith.harness import PROFILES, run_experiment

pytestmark = pytest.mark.slow


def desk_visual(**changes):
    base = next(c for c in PROFILES["desk"] if c.op == "add" and c.mode == VISUAL)
    return dataclasses.replace(base, lr=0.01, **changes)


def test_visual_addition_learns():
    assert run_experiment(desk_visual()).report.digit_error < 0.05


def test_visual_subtraction_learns():
    assert run_experiment(desk_visual(op="sub")).report.digit_error < 0.07


def test_noisy_addition_denoises():
    report = run_experiment(desk_visual(noise_sigma=0.3)).report
    assert report.digit_error < 0.10
    assert report.mse_clean < report.mse_noisy_target
