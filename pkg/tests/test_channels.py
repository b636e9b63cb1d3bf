import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qutrit_feedback.channels import (embed, ladder_indistinguishable, ladder_split, local_channels,
                                      structure_ops)
from qutrit_feedback.qcore import lindbladian, product_ket
from conftest import random_density


def test_ladder_examples():
    pi = ladder_indistinguishable(1, 1).operators[0]
    assert np.allclose(pi.conj().T @ pi, np.diag([0, 1, 1]))
    pi2 = ladder_indistinguishable(1, 2).operators[0]
    assert np.allclose(pi2.conj().T @ pi2, np.diag([0, 1, 2]))
    assert np.allclose(ladder_indistinguishable(4, 1).operators[0], 2 * pi)


def test_ladder_rejects_bad_parameters():
    for kw in ({"gamma": 0}, {"beta": -1}):
        with pytest.raises(ValueError):
            ladder_indistinguishable(**kw)
    with pytest.raises(ValueError):
        ladder_split(1, 1.2)


def test_split_identity_at_half(rng):
    pi = ladder_indistinguishable().operators
    split = ladder_split(alpha=0.5).operators
    assert np.abs(lindbladian(pi) - lindbladian(split)).max() < 1e-14
    rho = random_density(rng, 3)
    a = (lindbladian(pi) @ rho.reshape(-1)).reshape(3, 3)
    b = sum((lindbladian([op]) @ rho.reshape(-1)).reshape(3, 3) for op in split)
    assert np.abs(a - b).max() < 1e-12


def test_split_extremes():
    p1, p2 = ladder_split(alpha=1).operators
    assert np.allclose(p2, np.eye(3)[:, [2]] @ np.eye(3)[[1]] * 0 + np.outer(np.eye(3)[1], np.eye(3)[2]))
    assert np.allclose(p1, np.outer(np.eye(3)[0], np.eye(3)[1]))
    q1, q2 = ladder_split(alpha=0).operators
    assert np.allclose(q1, p2) and np.allclose(q2, p1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0.1, 3))
def test_total_dissipation_independent_of_alpha(alpha, gamma):
    cs = ladder_split(gamma, alpha)
    assert np.allclose(cs.decay_operator(), gamma * np.diag([0, 1, 1]), atol=1e-12)


def test_structures():
    assert np.allclose(structure_ops("E").decay_operator(), np.diag([0, 1, 1]))
    assert np.allclose(structure_ops("V").decay_operator(), np.diag([0, 1, 1]))
    assert np.allclose(structure_ops("Lambda").decay_operator(), np.diag([0, 0, 2]))
    assert np.allclose(structure_ops("Λ").operators[0], structure_ops("L").operators[0])
    with pytest.raises(ValueError):
        structure_ops("X")


def test_embedding():
    pi = ladder_indistinguishable().operators[0]
    assert np.allclose(embed(ladder_indistinguishable(), 0, 2).operators[0], np.kron(pi, np.eye(3)))
    assert np.allclose(embed(ladder_indistinguishable(), 1, 2).operators[0], np.kron(np.eye(3), pi))
    assert np.allclose(np.kron(pi, np.eye(3)) @ product_ket(2, 2), product_ket(1, 2))
    with pytest.raises(ValueError):
        embed(ladder_indistinguishable(), 2, 2)


def test_different_sites_commute():
    cs = local_channels(ladder_split(alpha=0.3), 2)
    for a in cs:
        for b in cs:
            if a.site != b.site:
                assert np.array_equal(a.operator @ b.operator, b.operator @ a.operator)
    assert cs.labels == ["Pi1@0", "Pi2@0", "Pi1@1", "Pi2@1"]
