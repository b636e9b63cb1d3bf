import numpy as np
import pytest

from qutrit_feedback.channels import ladder_indistinguishable, local_channels, structure_ops
from qutrit_feedback.codes import diffusion_code, jump_code
from qutrit_feedback.errors import NumericalError
from qutrit_feedback.qcore import basis, dm, negativity, normalize, product_ket
from qutrit_feedback.trajectories import (SimParams, diffusion_trajectory, jump_trajectory, master_evolve,
                                          no_jump_propagate, replay_jumps, run_ensemble, simulate_diffusion,
                                          simulate_jumps)
from qutrit_feedback.trajectories.rng import UniformBlocks, trajectory_generator

CS2 = local_channels(ladder_indistinguishable(), 2)
W = normalize(product_ket(1, 2) + product_ket(2, 1))
CODE00_22 = normalize(product_ket(0, 0) + product_ket(2, 2))


def test_params_validation_and_rounding():
    p = SimParams(dt=1e-3, t_max=1.0, tau=0.7004)
    assert p.tau_steps == 700 and p.n_steps == 1000
    assert p.sample_steps()[-1] == 1000
    for bad in ({"dt": 0}, {"dt": 2, "t_max": 1}, {"eta": 0}, {"eta": 1.1}, {"tau": -1}):
        with pytest.raises(ValueError):
            SimParams(**bad)


def test_streams_do_not_depend_on_batch():
    a = UniformBlocks(5, [3], 2, block=7)
    b = UniformBlocks(5, [0, 1, 2, 3], 2, block=3)
    for s in range(20):
        assert np.array_equal(a.at(s)[0], b.at(s)[3])
    assert not np.array_equal(trajectory_generator(5, 0).random(4), trajectory_generator(5, 1).random(4))


def test_master_relaxes_to_ground():
    res = master_evolve(dm(basis(2)), ladder_indistinguishable(), None, SimParams(dt=1e-2, t_max=25))
    assert abs(res.states[-1][0, 0].real - 1) < 1e-6
    tr = np.einsum("tii->t", res.states).real
    assert np.abs(tr - 1).max() < 1e-9


def test_master_without_generator_is_static(rng):
    from conftest import random_density
    rho = random_density(rng, 9)
    res = master_evolve(rho, None, None, SimParams(dt=0.1, t_max=1))
    assert np.array_equal(res.states[-1], rho)


def test_master_lambda_keeps_entanglement():
    a, b, c = normalize(np.array([0.6, 0.7, 0.3]))
    psi = a * product_ket(0, 0) + b * product_ket(1, 1) + c * product_ket(2, 2)
    cs = local_channels(structure_ops("Lambda"), 2)
    res = master_evolve(dm(psi), cs, None, SimParams(dt=5e-3, t_max=15, record_stride=100))
    assert negativity(res.states[-1]) > 1e-3
    assert abs(negativity(res.states[-1]) - (4 * a * b - c * c) / 2) < 1e-8


def test_master_positivity_guard():
    with pytest.raises(NumericalError):
        master_evolve(dm(basis(2)), ladder_indistinguishable(), None, SimParams(dt=3.0, t_max=300))


def test_jump_perfect_protection_short():
    r = simulate_jumps(W, CS2, jump_code(), SimParams(dt=1e-3, t_max=2, record_stride=50), range(20))
    assert np.abs(r.negativity - 1).max() < 1e-9
    assert r.fidelity.min() > 1 - 1e-9
    assert np.allclose(r.codespace_population, 1)


def test_jump_events_pair_up_without_delay():
    rec = jump_trajectory(W, CS2, jump_code(), SimParams(dt=1e-3, t_max=5), index=3)
    times = [e.time for e in rec.events]
    assert times == sorted(times) and rec.jumps
    for j, f in zip(rec.events[0::2], rec.events[1::2]):
        assert (j.kind, f.kind) == ("jump", "feedback_applied")
        assert j.step == f.step and j.site == f.site


def test_feedback_waits_for_delay():
    rec = jump_trajectory(W, CS2, jump_code(), SimParams(dt=1e-3, t_max=5, tau=0.25), index=1)
    jumps = rec.jumps
    fbs = rec.feedbacks
    assert jumps
    for j in jumps:
        if j.step + 250 < 5000:
            assert any(f.step == j.step + 250 and f.site == j.site for f in fbs)


def test_disorder_samples():
    rec = jump_trajectory(W, CS2, jump_code(), SimParams(t_max=5, delta_var=0.04), index=0)
    deltas = [f.delta for f in rec.feedbacks]
    assert deltas and all(d != 0 for d in deltas)
    rec0 = jump_trajectory(W, CS2, jump_code(), SimParams(t_max=5), index=0)
    assert all(f.delta == 0 for f in rec0.feedbacks)


def test_large_step_warns():
    with pytest.warns(RuntimeWarning):
        jump_trajectory(W, CS2, None, SimParams(dt=0.2, t_max=1))


def test_code_must_match_unraveling():
    with pytest.raises(ValueError):
        simulate_jumps(W, CS2, diffusion_code(), SimParams(t_max=0.1))
    with pytest.raises(ValueError):
        simulate_diffusion(W, CS2, jump_code(), SimParams(t_max=0.1))


def test_density_path_stays_physical():
    r = simulate_jumps(W, CS2, jump_code(), SimParams(dt=1e-3, t_max=1, eta=0.9, tau=0.1, record_stride=100),
                       range(10), keep_states=True)
    rho = r.states
    assert np.abs(np.einsum("nsii->ns", rho) - 1).max() < 1e-9
    assert np.abs(rho - np.swapaxes(rho, 2, 3).conj()).max() < 1e-9
    assert np.linalg.eigvalsh(rho).min() > -1e-9


def test_inefficient_detection_leaps():
    r = simulate_jumps(W, CS2, jump_code(), SimParams(dt=1e-3, t_max=2, eta=0.95, record_stride=100),
                       range(30), track_event_negativity=True)
    n = 0
    for ev in r.events:
        fb = {e.step: e for e in ev if e.kind == "feedback_applied"}
        for j in (e for e in ev if e.kind == "jump"):
            assert fb[j.step].negativity_after >= j.negativity_before - 1e-9
            n += 1
    assert n > 0


def test_delay_only_degrades_11_22():
    psi = normalize(product_ket(1, 1) + product_ket(2, 2))
    r = simulate_jumps(psi, CS2, jump_code(), SimParams(dt=1e-3, t_max=4, tau=0.5, record_stride=1), range(20))
    assert np.all(np.diff(r.negativity, axis=1) <= 1e-9)


def test_replay_w_state_narrative():
    tau = 0.7
    steps, final = replay_jumps(W, CS2, jump_code(), [(0.0, 0), (tau + 0.3, 1)], tau, 3.0)
    kinds = [s.kind for s in steps]
    assert kinds == ["jump", "feedback_applied", "jump", "feedback_applied"]
    e = np.exp(-tau / 2)
    assert np.allclose(steps[0].after, normalize(product_ket(0, 2) + product_ket(1, 1)), atol=1e-12)
    assert np.allclose(steps[1].before, normalize(product_ket(0, 2) + e * product_ket(1, 1)), atol=1e-12)
    assert np.allclose(steps[1].after, normalize(product_ket(1, 2) + e * product_ket(2, 1)), atol=1e-12)
    assert np.allclose(steps[3].before, normalize(product_ket(1, 1) + product_ket(2, 0)), atol=1e-12)
    assert np.allclose(final, W, atol=1e-12)


def test_diffusion_ground_state_record():
    rec = diffusion_trajectory(basis(0), ladder_indistinguishable(), None, SimParams(dt=1e-3, t_max=20), index=2)
    dq = rec.dQ[:, 0]
    assert abs(dq.mean()) < 4 * np.sqrt(1e-3 / dq.size)
    assert abs(dq.var() / 1e-3 - 1) < 0.05
    assert not rec.flagged


def test_diffusion_code_holds_state():
    r = simulate_diffusion(CODE00_22, CS2, diffusion_code(), SimParams(dt=1e-4, t_max=0.2, record_stride=500),
                           range(20))
    assert r.fidelity[:, -1].min() > 1 - 1e-3
    assert not r.flagged.any()


def test_diffusion_flags_large_steps():
    r = simulate_diffusion(W, CS2, None, SimParams(dt=0.3, t_max=3), range(20))
    assert r.flagged.any()


def test_diffusion_dq_stored_per_channel():
    rec = diffusion_trajectory(W, CS2, None, SimParams(dt=1e-2, t_max=1), index=0)
    assert rec.dQ.shape == (100, 2)


@pytest.mark.parametrize("engine", ["jump", "diffusion"])
def test_ensemble_bit_identical_across_chunking(engine):
    code = jump_code() if engine == "jump" else None
    p = SimParams(dt=1e-3, t_max=0.5, seed=11, eta=0.9 if engine == "jump" else 1.0, record_stride=25)
    a = run_ensemble(engine, W, CS2, code, p, 12, chunk_size=12)
    b = run_ensemble(engine, W, CS2, code, p, 12, chunk_size=5)
    c = run_ensemble(engine, W, CS2, code, p, 12, chunk_size=4, workers=2)
    for other in (b, c):
        assert np.array_equal(a.negativity, other.negativity)
        assert np.array_equal(a.pt_spectra, other.pt_spectra)
        assert a.mean_negativity.tobytes() == other.mean_negativity.tobytes()


def test_ensemble_single_trajectory_mean():
    p = SimParams(dt=1e-3, t_max=0.5, seed=4)
    e = run_ensemble("jump", W, CS2, None, p, 1)
    rec = jump_trajectory(W, CS2, None, p, index=0)
    assert np.array_equal(e.mean_negativity, rec.negativity)
    assert np.all(e.stderr_negativity == 0)


def test_nojump_examples():
    E, V = local_channels(structure_ops("E"), 2), local_channels(structure_ops("V"), 2)
    psi00 = product_ket(0, 0)
    assert np.allclose(no_jump_propagate(psi00, E, 7.0), psi00)
    psi = normalize(np.arange(9.0) + 1)
    ts = np.linspace(0, 5, 11)
    assert np.allclose(no_jump_propagate(psi, E, ts), no_jump_propagate(psi, V, ts))
    a, b, c = 0.179, 0.2386, 0.9545
    v = a * product_ket(0, 0) + b * product_ket(1, 1) + c * product_ket(2, 2)
    L = local_channels(structure_ops("Lambda"), 2)
    end = no_jump_propagate(normalize(v), L, 30.0)
    assert np.allclose(end, normalize(a * product_ket(0, 0) + b * product_ket(1, 1)), atol=1e-12)


def test_nojump_underflow():
    L = local_channels(structure_ops("Lambda"), 2)
    with pytest.raises(NumericalError):
        no_jump_propagate(product_ket(2, 2), L, 1e4)
