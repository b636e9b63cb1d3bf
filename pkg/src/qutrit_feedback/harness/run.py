"""Drivers behind the command line: sweeps, regime maps and code checks."""
from __future__ import annotations

import datetime as _dt
import os
import time

import numpy as np

from .. import __version__
from ..analysis import classify_regime, numerical_regimes, simplex_grid
from ..channels import ladder_indistinguishable, structure_ops
from ..codes import (JUMP_LAMBDA, diffusion_code, jump_code, operator_decompose,
                     qubit_no_go_check, search_codespace, verify_recyclability)
from ..qcore import EPS_ZERO
from ..trajectories import master_evolve, run_ensemble
from ..trajectories.records import EnsembleResult
from .config import ExperimentConfig
from .io import sha256, write_events_csv, write_manifest, write_rows, write_series_csv

OUTPUT_ENV = "QUTRIT_FEEDBACK_OUT"


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "output")


def ensemble_run(config: ExperimentConfig, n_traj: int | None = None, sweep_value=None) -> dict:
    """Mean and standard error of the negativity over ``n_traj`` trajectories.

    With ``unraveling: none`` the master equation is integrated instead and
    the standard error is zero.
    """
    n = config.n_traj if n_traj is None else n_traj
    if n < 1:
        raise ValueError("n_traj must be at least 1")
    cs = config.channel_set(sweep_value)
    params = config.sim_params(sweep_value)
    psi = config.state()
    if config.unraveling == "none":
        from ..qcore import negativity, pt_spectrum
        res = master_evolve(np.outer(psi, psi.conj()), cs, None, params)
        dims = cs.dims
        neg = negativity(res.states, dims, (len(dims) - 1,), check=False)
        spec = pt_spectrum(res.states, dims, (len(dims) - 1,))
        return {"times": res.times, "mean": neg, "stderr": np.zeros_like(neg), "n_traj": 1,
                "spectra": spec, "result": None}
    ens: EnsembleResult = run_ensemble(config.unraveling, psi, cs, config.code(), params, n,
                                       chunk_size=config.chunk_size, workers=config.workers)
    return {"times": ens.times, "mean": ens.mean_negativity, "stderr": ens.stderr_negativity,
            "n_traj": n, "spectra": ens.pt_spectra[0], "result": ens}


def _neg_columns(spectra: np.ndarray, eps: float = EPS_ZERO) -> np.ndarray:
    out = np.where(spectra < -eps, spectra, np.nan)
    k = max(1, int(np.max(np.sum(spectra < -eps, axis=1))))
    return out[:, :k]


def _tag(value) -> str:
    return repr(float(value)).replace("-", "m")


def run_experiment(config: ExperimentConfig, out_dir: str | None = None) -> list[str]:
    """Write one CSV per sweep value and a manifest; returns the written paths."""
    out_dir = out_dir or config.output_path or default_output_dir()
    start = time.time()
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    written, entries = [], []
    for value in config.sweep_values():
        data = ensemble_run(config, sweep_value=value)
        name = config.experiment
        if value is not None:
            name += f"_{config.sweep['parameter']}={_tag(value)}"
        path = os.path.join(out_dir, name + ".csv")
        neg = _neg_columns(data["spectra"]) if config.export_trajectory else None
        write_series_csv(path, data["times"], data["mean"], data["stderr"], data["n_traj"], neg)
        files = [path]
        if config.export_trajectory and data["result"] is not None:
            ev_path = os.path.join(out_dir, name + "_events.csv")
            write_events_csv(ev_path, data["result"].events[0])
            files.append(ev_path)
        written += files
        entries.append({"sweep_value": value, "files": {os.path.basename(f): sha256(f) for f in files}})
    manifest = os.path.join(out_dir, f"{config.experiment}_manifest.json")
    write_manifest(manifest, {
        "config": config.to_dict(),
        "seed": config.seed,
        "version": __version__,
        "started_utc": stamp,
        "wall_clock_s": round(time.time() - start, 3),
        "outputs": entries,
    })
    return written + [manifest]


def classify_map(structure: str, resolution: int = 15, out: str | None = None,
                 numerical: bool = False) -> list[list]:
    """Tabulated regime (and optionally the numerically detected one) on the grid."""
    if resolution < 5:
        raise ValueError("resolution must be at least 5")
    pts = simplex_grid(resolution)
    labels = [classify_regime(structure, p) for p in pts]
    nums = numerical_regimes(structure, pts) if numerical else [None] * len(pts)
    rows = []
    for p, lab, num in zip(pts, labels, nums):
        row = [float(p.a), float(p.b), float(p.c),
               lab.sudden_changes if lab.classified else "", lab.terminal or "", lab.note]
        if numerical:
            row += [num.sudden_changes, num.terminal]
        rows.append(row)
    if out:
        header = ["a", "b", "c", "sudden_changes", "terminal", "note"]
        if numerical:
            header += ["numerical_sudden_changes", "numerical_terminal"]
        write_rows(out, header, rows)
    return rows


def verify_codes(beta: float = 1.0, structure: str | None = None, gamma: float = 1.0) -> tuple[bool, list[str]]:
    """Run the code checks; returns ``(all_passed, report_lines)``."""
    lines, ok = [], True
    if structure is not None:
        cs = structure_ops(structure, gamma, gamma)
        res = search_codespace(cs)
        lines.append(f"structure {structure}: {res.message}")
        return bool(res.found), lines

    jc = jump_code(gamma)
    pi = ladder_indistinguishable(gamma, beta).operators[0]
    rep = verify_recyclability(pi, jc.codespace_projector, jc.recycler)
    lines.append(f"jump code (gamma={gamma}, beta={beta}): lambda = 2*pi/(3*sqrt(3)) = {JUMP_LAMBDA:.10f}")
    lines.append(f"  Pi^dag Pi = c1 P_C: c1 = {rep.constants[0].real:.6g}, residual {rep.residuals[0]:.3e}")
    lines.append(f"  R Pi = c2 P_C:      c2 = {rep.constants[1].real:.6g}, residual {rep.residuals[1]:.3e}")
    lines.append(f"  R unitary: error {rep.unitarity_error:.3e}")
    err = float(np.linalg.norm(jc.feedback_unitary() - jc.recycler))
    lines.append(f"  exp(-iF) = R: residual {err:.3e}")
    if not rep.ok or err >= 1e-10:
        ok = False
        lines += ["  FAIL: " + m for m in rep.messages]
        if rep.residuals[0] >= 1e-10:
            lines.append("  recyclability violated: Pi^dag Pi not proportional to P_C")
            lines.append("  " + search_codespace(ladder_indistinguishable(gamma, beta)).message)

    dc = diffusion_code(gamma)
    _, X, _ = operator_decompose(dc.channel)
    S, F, P = dc.stabilizer, dc.feedback_generator, dc.codespace_projector
    checks = {
        "SX + XS = 0": np.abs(S @ X + X @ S).max(),
        "F Hermitian": np.abs(F - F.conj().T).max(),
        "(Pi - iF) P_C = 0": np.abs((dc.channel - 1j * F) @ P).max(),
        "S^2 = I": np.abs(S @ S - np.eye(3)).max(),
    }
    lines.append(f"diffusion code (gamma={gamma}):")
    for name, r in checks.items():
        good = r < 1e-12
        ok &= good
        lines.append(f"  {name}: residual {r:.3e}{'' if good else '  FAIL'}")
    ng = qubit_no_go_check(gamma)
    lines.append("qubit no-go scan:")
    lines += ["  " + s for s in ng.lines]
    ok &= ng.obstruction_holds
    lines.append("ALL CHECKS PASSED" if ok else "SOME CHECKS FAILED")
    return ok, lines
