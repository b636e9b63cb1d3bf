import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qutrit_feedback.analysis import (InitialCoeffs, classify_regime, detect_sudden_changes, evolve_spectra,
                                      lambda_nojump_asymptote, nojump_negativity_EV, nojump_negativity_Lambda,
                                      nojump_rate, nojump_transient_check, regime_from_spectra, simplex_grid)
from qutrit_feedback.channels import local_channels, structure_ops
from qutrit_feedback.qcore import dm, negativity
from qutrit_feedback.trajectories import no_jump_propagate

SAMPLE = (0.179, 0.2386, 0.9545)


def co(a, b, c):
    return InitialCoeffs.normalized(a, b, c)


def test_coeffs_validation():
    with pytest.raises(ValueError):
        InitialCoeffs(0.5, 0.5, 0.5)
    assert co(*SAMPLE).generic
    assert not co(1, 1, 2).generic and not co(1, 0, 2).generic


def test_sample_classifications():
    assert str(classify_regime("E", co(*SAMPLE))) == "2, sudden_death"
    assert str(classify_regime("V", co(*SAMPLE))) == "2, asymptotic_decay"
    assert str(classify_regime("Lambda", co(0.2386, 0.9545, 0.1790))) == "0, asymptotic_entangled"


def test_boundaries_are_not_classified():
    for s, c in (("E", co(1, 1, 2)), ("V", co(1, 2, 1)), ("Lambda", co(1, 3, 2)), ("E", co(1, 0, 1))):
        lab = classify_regime(s, c)
        assert not lab.classified and lab.note.startswith("boundary")
    assert classify_regime("E", co(0.5, 0.2, 0.8)).note.startswith("not tabulated")


def test_e_list_symmetry():
    # relabelling b<->c takes a>b>c to a>c>b; neither has two changes
    x, y = classify_regime("E", co(0.9, 0.4, 0.2)), classify_regime("E", co(0.9, 0.2, 0.4))
    assert x.sudden_changes < 2 and y.sudden_changes < 2


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1), st.floats(0.05, 1), st.floats(0.05, 1))
def test_table_symmetries(a, b, c):
    def key(lab):
        return lab.sudden_changes, lab.terminal, lab.classified

    assert key(classify_regime("V", co(a, b, c))) == key(classify_regime("V", co(a, c, b)))
    assert key(classify_regime("Lambda", co(a, b, c))) == key(classify_regime("Lambda", co(b, a, c)))
    lab = classify_regime("V", co(a, b, c))
    assert lab.terminal in (None, "asymptotic_decay")


def _branches(times, crossings, n_total=9):
    # linear branches -1 + t/t_c crossing zero at t_c, padded with positive eigenvalues
    rows = []
    for t in times:
        neg = [-1 + t / tc for tc in crossings]
        rows.append(sorted(neg + [1.0] * (n_total - len(neg))))
    return np.array(rows)


def test_detector_counts_branches():
    t = np.linspace(0, 4, 801)
    spec = _branches(t, [0.7, 1.9, 3.1])
    sc = detect_sudden_changes(spec, t)
    assert np.allclose(sc.times, [0.7, 1.9, 3.1], atol=1e-9) and sc.death
    assert str(regime_from_spectra(spec, t)) == "2, sudden_death"
    flat = np.tile(np.linspace(-0.3, 0.5, 9), (50, 1))
    assert len(detect_sudden_changes(flat, np.linspace(0, 1, 50))) == 0


def test_detector_ignores_exponential_tails():
    t = np.linspace(0, 30, 3001)
    spec = np.array([sorted([-np.exp(-2 * x), -0.5 + x / 10] + [1.0] * 7) for x in t])
    sc = detect_sudden_changes(spec, t)
    assert np.allclose(sc.times, [5.0], atol=1e-9)
    assert len(sc.rejected) == 1 and not sc.death
    assert str(regime_from_spectra(spec, t)) == "1, asymptotic_decay"


def test_lambda_dark_branch_survives():
    c = co(0.6, 0.7, 0.3)
    times, spec, neg = evolve_spectra("Lambda", [c], t_max=15)
    assert spec[0, -1].min() < -1e-3
    assert len(detect_sudden_changes(spec[0], times)) == 0
    assert str(regime_from_spectra(spec[0], times)) == "0, asymptotic_entangled"


def test_closed_form_anchors():
    c = co(*SAMPLE)
    assert np.isclose(nojump_negativity_EV(c, 1.0, 0.0), 2 * (c.a * c.b + c.a * c.c + c.b * c.c))
    assert nojump_negativity_EV(c, 1.0, 60.0) < 1e-20
    s = 1 / np.sqrt(3)
    assert np.isclose(nojump_negativity_EV((s, s, s), 1.0, 0.0), 2)
    assert np.isclose(nojump_negativity_Lambda(c, 2.0, 0.0), 2 * (c.a * c.b + (c.a + c.b) * c.c))
    assert np.isclose(nojump_negativity_Lambda(co(1, 1, 1), 2.0, 80.0), 1)
    # 2ab/(a^2+b^2) for a=0.179, b=0.2386
    assert abs(lambda_nojump_asymptote(c) - 0.960076) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1), st.floats(0.05, 1), st.floats(0.05, 1), st.sampled_from(["E", "V", "Lambda"]))
def test_closed_forms_match_propagation(a, b, c, s):
    coeffs = co(a, b, c)
    cs = local_channels(structure_ops(s), 2)
    ts = np.linspace(0, 10, 7)
    kets = no_jump_propagate(coeffs.ket(), cs, ts)
    direct = negativity(dm(kets))
    f = nojump_negativity_Lambda if s == "Lambda" else nojump_negativity_EV
    assert np.abs(f(coeffs, nojump_rate(s), ts) - direct).max() < 1e-6


def test_lambda_asymptote_independent_of_rate():
    coeffs = co(0.3, 0.5, 0.8)
    for g in (0.5, 1.0, 3.0):
        cs = local_channels(structure_ops("Lambda", g, g), 2)
        psi = no_jump_propagate(coeffs.ket(), cs, 40.0 / g)
        assert abs(negativity(dm(psi)) - lambda_nojump_asymptote(coeffs)) < 1e-9
        assert abs(nojump_negativity_Lambda(coeffs, 2 * g, 40.0 / g) - lambda_nojump_asymptote(coeffs)) < 1e-9


def test_transient_check():
    assert nojump_transient_check("E", co(*SAMPLE))["increases"]
    assert not nojump_transient_check("V", co(0.9545, 0.2386, 0.179))["increases"]
    r = nojump_transient_check("E", co(1, 1e-6, 1e-6))
    assert r["max_negativity"] < 1e-5


def test_grid_shape():
    g = simplex_grid(15)
    assert len(g) == 225
    assert all(min(p.a, p.b, p.c) > 0 for p in g)
    assert len({(round(p.a, 12), round(p.b, 12), round(p.c, 12)) for p in g}) == 225
