"""Disentanglement of two qutrits under independent local decay.

Initial states are ``a|00> + b|11> + c|22>`` and each qutrit decays through
the E (cascade), V or Lambda pair of channels.  The module provides the
tabulated regime classification, a numerical detector for sudden changes
in the partial-transpose spectrum, and closed-form negativities of the
no-click trajectory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import local_channels, structure_kind, structure_ops
from .qcore import EPS_ZERO, pt_spectrum

TERMINALS = ("asymptotic_decay", "sudden_death", "asymptotic_entangled")
NORM_TOL = 1e-12
TIE_TOL = 1e-9


@dataclass(frozen=True)
class InitialCoeffs:
    """Real amplitudes of ``a|00> + b|11> + c|22>``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        n = self.a ** 2 + self.b ** 2 + self.c ** 2
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"coefficients not normalized: a^2+b^2+c^2 = {n!r}")

    @classmethod
    def normalized(cls, a: float, b: float, c: float) -> "InitialCoeffs":
        n = np.sqrt(a * a + b * b + c * c)
        if n == 0:
            raise ValueError("all coefficients vanish")
        return cls(a / n, b / n, c / n)

    @property
    def generic(self) -> bool:
        """True when ``a``, ``b``, ``c`` are pairwise distinct and nonzero."""
        a, b, c = self.a, self.b, self.c
        return min(abs(a), abs(b), abs(c), abs(a - b), abs(a - c), abs(b - c)) > TIE_TOL

    def ket(self) -> np.ndarray:
        psi = np.zeros(9, dtype=complex)
        psi[[0, 4, 8]] = self.a, self.b, self.c
        return psi


@dataclass(frozen=True)
class RegimeLabel:
    """Number of sudden changes before the terminal behaviour.

    Both fields are ``None`` when the point is not classified; ``note``
    then says why (a boundary between cases, or no tabulated case).
    """

    sudden_changes: int | None
    terminal: str | None
    note: str = ""

    @property
    def classified(self) -> bool:
        return self.terminal is not None

    def __str__(self):
        if not self.classified:
            return self.note
        return f"{self.sudden_changes}, {self.terminal}"


def _coeffs(coeffs) -> InitialCoeffs:
    return coeffs if isinstance(coeffs, InitialCoeffs) else InitialCoeffs(*coeffs)


def _near(x, y, tol=TIE_TOL):
    return abs(x - y) <= tol


def classify_regime(structure: str, coeffs) -> RegimeLabel:
    """Tabulated disentanglement regime of the unconditional dynamics.

    Cascade (E):  a>b>c: 0 changes, asymptotic decay;  b>a>c or a>c>b: 1,
    asymptotic decay;  b>c>a: 2, asymptotic decay;  c>b>a: 2, sudden death.
    The ordering c>a>b has no tabulated case.

    V:  a>b, a>c: 0;  a>b, a<c: 1;  a<b, a<c: 2; all asymptotic decay.  The
    case a<b, a>c follows from the b<->c symmetry of the V structure (1).

    Lambda:  2a>c, 2b>c: 0, asymptotically entangled;  2a>c, 2b<c:
    1 and asymptotically entangled if c^2<4ab, else 2 and asymptotic decay;
    2a<c, 2b<c: 2, sudden death.  The case 2a<c, 2b>c follows from the a<->b
    symmetry.  Amplitudes enter through their moduli.
    """
    k = structure_kind(structure)
    co = _coeffs(coeffs)
    a, b, c = abs(co.a), abs(co.b), abs(co.c)
    if min(a, b, c) <= TIE_TOL:
        return RegimeLabel(None, None, "boundary: a vanishing coefficient")
    if k == "E":
        for (x, y, name) in ((a, b, "a=b"), (a, c, "a=c"), (b, c, "b=c")):
            if _near(x, y):
                return RegimeLabel(None, None, f"boundary: {name}")
        if a > b > c:
            return RegimeLabel(0, "asymptotic_decay")
        if b > a > c or a > c > b:
            return RegimeLabel(1, "asymptotic_decay")
        if b > c > a:
            return RegimeLabel(2, "asymptotic_decay")
        if c > b > a:
            return RegimeLabel(2, "sudden_death")
        return RegimeLabel(None, None, "not tabulated: c>a>b")
    if k == "V":
        for (x, y, name) in ((a, b, "a=b"), (a, c, "a=c")):
            if _near(x, y):
                return RegimeLabel(None, None, f"boundary: {name}")
        return RegimeLabel(int(b > a) + int(c > a), "asymptotic_decay")
    # Lambda
    for (x, y, name) in ((2 * a, c, "2a=c"), (2 * b, c, "2b=c")):
        if _near(x, y):
            return RegimeLabel(None, None, f"boundary: {name}")
    big_a, big_b = 2 * a > c, 2 * b > c
    if big_a and big_b:
        return RegimeLabel(0, "asymptotic_entangled")
    if not big_a and not big_b:
        return RegimeLabel(2, "sudden_death")
    if _near(c * c, 4 * a * b):
        return RegimeLabel(None, None, "boundary: c^2=4ab")
    if c * c < 4 * a * b:
        return RegimeLabel(1, "asymptotic_entangled")
    return RegimeLabel(2, "asymptotic_decay")


@dataclass
class SuddenChanges:
    """Result of scanning a partial-transpose spectrum series."""

    times: list[float]
    n_initial: int
    n_final: int
    death: bool
    rejected: list[float]

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(self.times)


def _negatives(spectra, eps):
    return [s[s < -eps] for s in (np.sort(np.asarray(x, dtype=float)) for x in spectra)]


def detect_sudden_changes(spectra, times, eps: float = EPS_ZERO,
                          rate_bound: float = 4.0) -> SuddenChanges:
    """Times at which a negative partial-transpose eigenvalue reaches zero.

    ``spectra[i]`` holds all partial-transpose eigenvalues at ``times[i]``.
    When the number of eigenvalues below ``-eps`` drops between two
    samples, the vanishing branch (the one closest to zero before the drop)
    is compared with the same-rank eigenvalue after it.  A finite-time
    crossing carries it to zero or beyond; an exponentially decaying branch
    merely slips under ``eps`` and shrinks by a factor ``exp(-r h)`` with
    ``r`` at most ``rate_bound``.  Drops whose log-shrink rate stays below
    ``10 * rate_bound`` are therefore listed in ``rejected`` instead.  If
    only the negative eigenvalues are supplied, every drop is accepted.
    Crossing times are linearly interpolated; ``death`` is set when every
    initial branch crossed.
    """
    times = np.asarray(times, dtype=float)
    if len(spectra) != times.size:
        raise ValueError("spectra and times differ in length")
    full = [np.sort(np.asarray(s, dtype=float)) for s in spectra]
    neg = [s[s < -eps] for s in full]
    threshold = 10.0 * rate_bound
    found, rejected = [], []
    for i in range(1, times.size):
        prev, cur = neg[i - 1], neg[i]
        drop = prev.size - cur.size
        if drop <= 0:
            continue
        h = times[i] - times[i - 1]
        for r in range(drop):
            k = prev.size - 1 - r
            lam_prev = prev[k]
            if full[i].size > k and full[i].size > cur.size:
                lam_now = full[i][k]
                real = lam_now >= 0 or np.log(lam_prev / lam_now) / h > threshold
            else:
                lam_now, real = -eps, True
            frac = (lam_prev + eps) / (lam_prev - lam_now) if lam_now != lam_prev else 1.0
            t_cross = times[i - 1] + float(np.clip(frac, 0.0, 1.0)) * h
            (found if real else rejected).append(t_cross)
    found.sort()
    n0, n1 = neg[0].size, neg[-1].size
    death = n0 > 0 and n1 == 0 and len(found) >= n0
    return SuddenChanges(found, n0, n1, death, rejected)


def regime_from_spectra(spectra, times, eps: float = EPS_ZERO, rate_bound: float = 4.0,
                        tail: float = 0.2, stationary_rate: float = 0.05,
                        entangled_floor: float = 1e-3) -> RegimeLabel:
    """Regime label read off a computed partial-transpose spectrum series.

    The terminal behaviour is sudden death when all initial branches cross;
    otherwise it is asymptotic entanglement if a negative branch survives
    with magnitude at least ``entangled_floor`` and log-rate below
    ``stationary_rate`` over the last ``tail`` fraction of the horizon, and
    asymptotic decay in all other cases.
    """
    times = np.asarray(times, dtype=float)
    sc = detect_sudden_changes(spectra, times, eps, rate_bound)
    if sc.death:
        return RegimeLabel(len(sc) - 1, "sudden_death")
    neg = _negatives(spectra, eps)
    j = int(np.searchsorted(times, times[-1] - tail * (times[-1] - times[0])))
    end, start = neg[-1], neg[j]
    if end.size and start.size:
        lam_end, lam_start = end[-1], start[min(end.size, start.size) - 1]
        rate = np.log(lam_start / lam_end) / (times[-1] - times[j])
        if abs(lam_end) >= entangled_floor and abs(rate) < stationary_rate:
            return RegimeLabel(len(sc), "asymptotic_entangled")
    return RegimeLabel(len(sc), "asymptotic_decay")


def evolve_spectra(structure: str, coeff_list, t_max: float = 15.0, dt: float = 5e-3,
                   gamma: float = 1.0):
    """Partial-transpose spectra of the unconditional dynamics for many initial states.

    Returns ``(times, spectra, negativity)`` with spectra shaped
    ``(n_states, n_times, 9)``.
    """
    from .trajectories import SimParams, master_evolve

    cs = local_channels(structure_ops(structure, gamma, gamma), 2)
    kets = np.array([_coeffs(c).ket() for c in coeff_list])
    rho0 = np.einsum("ni,nj->nij", kets, kets.conj())
    res = master_evolve(rho0, cs, None, SimParams(dt=dt, t_max=t_max, record_stride=1))
    spec = pt_spectrum(res.states, (3, 3), 1)
    neg = -2.0 * np.where(spec < 0, spec, 0.0).sum(axis=-1)
    return res.times, spec, neg


def numerical_regimes(structure: str, coeff_list, t_max: float = 15.0, dt: float = 5e-3,
                      chunk: int = 16, **kwargs) -> list[RegimeLabel]:
    """Regime labels from master-equation runs, one per initial state."""
    out = []
    coeff_list = list(coeff_list)
    for i in range(0, len(coeff_list), chunk):
        times, spec, _ = evolve_spectra(structure, coeff_list[i:i + chunk], t_max, dt)
        out.extend(regime_from_spectra(s, times, **kwargs) for s in spec)
    return out


def simplex_grid(resolution: int = 15) -> list[InitialCoeffs]:
    """Cell-centred grid on the positive octant of the unit sphere.

    ``a = sin(th) cos(ph)``, ``b = sin(th) sin(ph)``, ``c = cos(th)`` with
    ``th, ph`` at ``(i + 1/2) (pi/2) / resolution``.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    ang = (np.arange(resolution) + 0.5) * (np.pi / 2) / resolution
    pts = []
    for th in ang:
        for ph in ang:
            pts.append(InitialCoeffs.normalized(np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)))
    return pts


def nojump_negativity_EV(coeffs, kappa: float, t):
    """No-click negativity for the E and V structures.

    ``E_N = 2 (ab e^{-k t} + ac e^{-k t} + bc e^{-2 k t}) / (a^2 + (b^2 + c^2) e^{-2 k t})``;
    with ``H_eff = -1/2 sum Pi^dag Pi`` the matching rate is ``kappa = gamma``.
    """
    co = _coeffs(coeffs)
    a, b, c = abs(co.a), abs(co.b), abs(co.c)
    e = np.exp(-kappa * np.asarray(t, dtype=float))
    return 2 * (a * b * e + a * c * e + b * c * e * e) / (a * a + (b * b + c * c) * e * e)


def nojump_negativity_Lambda(coeffs, kappa: float, t):
    """No-click negativity for the Lambda structure.

    ``E_N = 2 (ab + (a + b) c e^{-k t}) / (1 + c^2 (e^{-2 k t} - 1))``, tending
    to ``2ab / (a^2 + b^2)``; the matching rate is ``kappa = 2 gamma``.
    """
    co = _coeffs(coeffs)
    a, b, c = abs(co.a), abs(co.b), abs(co.c)
    e = np.exp(-kappa * np.asarray(t, dtype=float))
    return 2 * (a * b + (a + b) * c * e) / (1 + c * c * (e * e - 1))


def lambda_nojump_asymptote(coeffs) -> float:
    co = _coeffs(coeffs)
    a, b = abs(co.a), abs(co.b)
    return 2 * a * b / (a * a + b * b)


def lambda_unconditional_asymptote(coeffs) -> float:
    """Long-time negativity of the unconditional Lambda dynamics, ``max(0, (4ab - c^2)/2)``."""
    co = _coeffs(coeffs)
    a, b, c = abs(co.a), abs(co.b), abs(co.c)
    return max(0.0, (4 * a * b - c * c) / 2)


def nojump_rate(structure: str, gamma: float = 1.0) -> float:
    """Exponent ``kappa`` that makes the closed forms match ``H_eff = -1/2 sum Pi^dag Pi``."""
    return 2.0 * gamma if structure_kind(structure) == "L" else gamma


def nojump_transient_check(structure: str, coeffs, kappa: float | None = None,
                           t_max: float = 10.0, n: int = 4001) -> dict:
    """Maximum of the closed-form no-click negativity on a dense grid."""
    k = structure_kind(structure)
    kappa = nojump_rate(k) if kappa is None else kappa
    t = np.linspace(0.0, t_max, n)
    f = nojump_negativity_Lambda if k == "L" else nojump_negativity_EV
    curve = f(coeffs, kappa, t)
    i = int(np.argmax(curve))
    return {
        "max_negativity": float(curve[i]),
        "time_of_max": float(t[i]),
        "initial": float(curve[0]),
        "increases": bool(curve[i] > curve[0] + 1e-12),
    }
