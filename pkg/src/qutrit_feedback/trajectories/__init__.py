"""Deterministic and stochastic time evolution of dissipative qutrit registers."""
from .diffusion import diffusion_trajectory, simulate_diffusion
from .ensemble import run_ensemble, trace_distance_stderr
from .jumps import ReplayStep, jump_trajectory, replay_jumps, simulate_jumps
from .master import MasterResult, master_evolve
from .nojump import no_jump_propagate
from .params import SimParams
from .records import EnsembleResult, Event, TrajectoryRecord

__all__ = [
    "SimParams", "Event", "TrajectoryRecord", "EnsembleResult", "MasterResult", "ReplayStep",
    "master_evolve", "jump_trajectory", "simulate_jumps", "replay_jumps",
    "diffusion_trajectory", "simulate_diffusion", "no_jump_propagate",
    "run_ensemble", "trace_distance_stderr",
]
