import numpy as np

from qutrit_feedback.channels import ladder_indistinguishable, structure_ops
from qutrit_feedback.codes import (JUMP_LAMBDA, diffusion_code, jump_code, operator_decompose,
                                   qubit_no_go_check, search_codespace, verify_recyclability)
from qutrit_feedback.qcore import basis


def test_jump_code_closed_form():
    jc = jump_code(1.0)
    R = jc.recycler
    assert np.array_equal(R @ R @ R, np.eye(3))
    assert set(np.unique(R.real)) == {0.0, 1.0} and np.all(R.sum(axis=0) == 1)
    assert abs(JUMP_LAMBDA - 1.2092) < 1e-4
    assert np.abs(jc.feedback_unitary() - R).max() < 1e-12
    assert np.abs(jc.feedback_generator - jc.feedback_generator.conj().T).max() < 1e-12


def test_jump_code_recycles_codespace():
    for gamma in (1.0, 2.5):
        jc = jump_code(gamma)
        U = jc.feedback_unitary()
        for level in (1, 2):
            psi = basis(level)
            assert np.allclose(U @ jc.channel @ psi, np.sqrt(gamma) * psi, atol=1e-12)


def test_recyclability_report():
    jc = jump_code()
    rep = verify_recyclability(jc.channel, jc.codespace_projector, jc.recycler)
    assert rep.ok and np.allclose(rep.constants, (1, 1))
    bad = verify_recyclability(ladder_indistinguishable(1, 2).operators[0], jc.codespace_projector, jc.recycler)
    assert not bad.ok and bad.residuals[0] > 1e-3
    assert not verify_recyclability(jc.channel, jc.codespace_projector, np.eye(3)).ok


def test_operator_decompose(rng):
    pi = ladder_indistinguishable().operators[0]
    M, X, Y = operator_decompose(pi)
    assert np.allclose(M, 0)
    assert np.allclose(X, 0.5 * (pi + pi.conj().T))
    M, X, Y = operator_decompose(np.eye(3))
    assert np.allclose(M, np.eye(3)) and np.allclose(X, 0) and np.allclose(Y, 0)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    M, X, Y = operator_decompose(A)
    assert np.abs(M + X + 1j * Y - A).max() < 1e-14
    assert np.allclose(X, X.conj().T) and np.allclose(Y, Y.conj().T)
    assert all(np.allclose(u, v) for u, v in zip(operator_decompose(M + X + 1j * Y), (M, X, Y)))


def test_diffusion_code_algebra():
    dc = diffusion_code()
    _, X, _ = operator_decompose(dc.channel)
    S, F, P = dc.stabilizer, dc.feedback_generator, dc.codespace_projector
    assert np.array_equal(S @ X + X @ S, np.zeros((3, 3)))
    assert np.abs(F - F.conj().T).max() < 1e-14
    assert np.allclose(dc.channel - 1j * F, X @ (np.eye(3) - S))
    assert np.abs((np.eye(3) - S) @ P).max() == 0


def test_diffusion_single_step_identity():
    dc = diffusion_code(1.0)
    _, X, _ = operator_decompose(dc.channel)
    S = dc.stabilizer
    for q in np.linspace(-2, 2, 9):
        for level in (0, 2):
            psi = basis(level)
            out = (np.eye(3) - (0.5e-3 * np.eye(3) + X * q) @ (np.eye(3) - S)) @ psi
            assert np.abs(out - psi).max() < 1e-15


def test_qubit_no_go():
    rep = qubit_no_go_check()
    assert rep.obstruction_holds and rep.n_anticommuting > 0
    sz = np.diag([1.0, -1.0])
    X = 0.5 * np.array([[0, 1], [1, 0]])
    assert np.allclose(sz @ X + X @ sz, 0)


def test_codespace_search():
    assert search_codespace(ladder_indistinguishable()).found == [(1, 2)]
    assert "distinguishable" in search_codespace(structure_ops("V")).message
    assert "proportional" in search_codespace(ladder_indistinguishable(1, 2)).message
    assert search_codespace(structure_ops("Lambda")).decoherence_free == [(0, 1)]
