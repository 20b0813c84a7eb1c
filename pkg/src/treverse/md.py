"""Classical MD of charged particles in a magnetic field, with the
trajectory-level conjugacy check and Green-Kubo correlator estimation.

The integrator is a palindromic splitting: half force kick, half magnetic
rotation (Boris tan-form, an exact rotation of the velocity), full drift,
half rotation, half kick.  The palindrome makes one step exactly conjugate
to its inverse under any compatible per-particle map, which is what the
conjugacy check exercises.

Trajectories are vectorized: state arrays have shape (R, N, 3) for R
independent trajectories of N particles.  Per-trajectory random streams
are derived from the master seed by counter, so results do not depend on
how trajectories are chunked.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .fields import FieldSpec, eval_field, field_scale
from .phasespace import PhasePoint, TimeReversalOp

WCA_CUTOFF = 2.0 ** (1.0 / 6.0)
COMPONENTS = "xyz"


class NotApplicable(ValueError):
    """The field admits no operation pair forcing a correlator to vanish."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters in reduced units (k_B = 1).

    The box is [-box_half, box_half]^3 with periodic boundaries; pair
    interactions use the minimum image.  wca_epsilon None turns the pair
    potential off.  The cyclotron resolution constraint dt * w_c < 0.2 is
    enforced at construction.
    """

    n: int
    field: FieldSpec
    dt: float
    steps: int
    temperature: float = 1.0
    mass: float = 1.0
    charge: float = 1.0
    box_half: float = 1.0
    wca_epsilon: float | None = None
    wca_sigma: float = 1.0
    seed: int = 0
    n_trajectories: int = 1
    equilibration: int = 0
    thermostat_interval: int = 10

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one particle")
        if self.dt <= 0.0 or self.steps < 1 or self.n_trajectories < 1:
            raise ValueError("dt, steps and n_trajectories must be positive")
        omega_c = abs(self.charge) * field_scale(self.field, self.box_half) / self.mass
        if self.dt * omega_c >= 0.2:
            raise ValueError(
                f"dt {self.dt} too large for cyclotron frequency {omega_c:.3g}")

    @property
    def box(self) -> float:
        return 2.0 * self.box_half

    @property
    def interacting(self) -> bool:
        return self.wca_epsilon is not None


@dataclass
class MDState:
    """Positions (unwrapped) and velocities, shape (R, N, 3)."""

    pos: np.ndarray
    vel: np.ndarray

    def copy(self) -> "MDState":
        return MDState(self.pos.copy(), self.vel.copy())


@dataclass(frozen=True)
class Trajectory:
    """Recorded single-trajectory time series (positions unwrapped)."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    energies: np.ndarray

    @property
    def energy_drift(self) -> float:
        e0 = self.energies[0]
        scale = max(abs(e0), 1e-300)
        return float(np.max(np.abs(self.energies - e0)) / scale)


def _wrap(pos: np.ndarray, box: float) -> np.ndarray:
    return pos - box * np.rint(pos / box)


def _pair_terms(pos: np.ndarray, cfg: SimConfig):
    """Minimum-image displacements and squared distances, diagonal masked."""
    d = pos[:, :, None, :] - pos[:, None, :, :]
    d -= cfg.box * np.rint(d / cfg.box)
    r2 = np.sum(d * d, axis=-1)
    n = pos.shape[1]
    r2[:, np.arange(n), np.arange(n)] = np.inf
    return d, r2


def forces(pos: np.ndarray, cfg: SimConfig) -> np.ndarray:
    """WCA pair forces; zero array when the potential is off."""
    if not cfg.interacting or cfg.n == 1:
        return np.zeros_like(pos)
    d, r2 = _pair_terms(pos, cfg)
    cut2 = (WCA_CUTOFF * cfg.wca_sigma) ** 2
    inv2 = np.where(r2 < cut2, cfg.wca_sigma ** 2 / r2, 0.0)
    inv6 = inv2 ** 3
    coef = 24.0 * cfg.wca_epsilon * (2.0 * inv6 * inv6 - inv6) * inv2 / cfg.wca_sigma ** 2
    return np.einsum("rijk,rij->rik", d, coef)


def potential_energy(pos: np.ndarray, cfg: SimConfig) -> np.ndarray:
    """Per-trajectory WCA potential energy (truncated and shifted)."""
    if not cfg.interacting or cfg.n == 1:
        return np.zeros(pos.shape[0])
    _, r2 = _pair_terms(pos, cfg)
    cut2 = (WCA_CUTOFF * cfg.wca_sigma) ** 2
    inside = r2 < cut2
    inv6 = np.where(inside, (cfg.wca_sigma ** 2 / r2) ** 3, 0.0)
    pair = np.where(inside, 4.0 * cfg.wca_epsilon * (inv6 * inv6 - inv6) + cfg.wca_epsilon, 0.0)
    return 0.5 * np.sum(pair, axis=(1, 2))


def energy(state: MDState, cfg: SimConfig) -> np.ndarray:
    """Per-trajectory total energy; the magnetic force does no work."""
    kinetic = 0.5 * cfg.mass * np.sum(state.vel ** 2, axis=(1, 2))
    return kinetic + potential_energy(state.pos, cfg)


def _boris_rotate(vel: np.ndarray, bvec: np.ndarray, half_angle: float) -> np.ndarray:
    """Exact rotation of velocities about bvec, tan-half-angle form."""
    t = half_angle * bvec
    vp = vel + np.cross(vel, t)
    s = 2.0 * t / (1.0 + np.sum(t * t, axis=-1, keepdims=True))
    return vel + np.cross(vp, s)


def step(state: MDState, cfg: SimConfig) -> MDState:
    """One palindromic step: kick(dt/2) rotate(dt/2) drift(dt) rotate(dt/2) kick(dt/2)."""
    dt = cfg.dt
    qm = cfg.charge / cfg.mass
    pos, vel = state.pos, state.vel
    if cfg.interacting:
        vel = vel + (0.5 * dt / cfg.mass) * forces(pos, cfg)
    bvec = eval_field(cfg.field, _wrap(pos, cfg.box))
    vel = _boris_rotate(vel, bvec, qm * dt / 4.0)
    pos = pos + dt * vel
    bvec = eval_field(cfg.field, _wrap(pos, cfg.box))
    vel = _boris_rotate(vel, bvec, qm * dt / 4.0)
    if cfg.interacting:
        vel = vel + (0.5 * dt / cfg.mass) * forces(pos, cfg)
    return MDState(pos, vel)


def init_state(cfg: SimConfig, trajectory_indices=None) -> MDState:
    """Lattice-plus-jitter positions and Maxwell-Boltzmann velocities.

    For N > 1 the center-of-mass velocity is removed; the draw temperature
    is inflated by N/(N-1) so each particle keeps variance T/m per
    component.  Jitter is bounded so no pair starts closer than 0.9 sigma.
    """
    if trajectory_indices is None:
        trajectory_indices = range(cfg.n_trajectories)
    indices = list(trajectory_indices)
    n = cfg.n
    n_side = math.ceil(n ** (1.0 / 3.0))
    spacing = cfg.box / n_side
    min_sep = 0.9 * cfg.wca_sigma if cfg.interacting else 0.0
    if cfg.interacting and n > 1 and spacing < min_sep:
        raise ValueError("packing fraction too high to place particles")
    jitter_amp = min(0.2 * spacing, 0.5 * (spacing - min_sep)) if n > 1 else 0.45 * cfg.box
    sites = np.array([((i % n_side) + 0.5, ((i // n_side) % n_side) + 0.5,
                       (i // n_side ** 2) + 0.5) for i in range(n)])
    lattice = sites * spacing - cfg.box_half

    scale = math.sqrt(cfg.temperature / cfg.mass)
    if n > 1:
        scale *= math.sqrt(n / (n - 1.0))
    pos = np.empty((len(indices), n, 3))
    vel = np.empty((len(indices), n, 3))
    for row, r in enumerate(indices):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, int(r)]))
        pos[row] = lattice + rng.uniform(-jitter_amp, jitter_amp, size=(n, 3))
        v = scale * rng.standard_normal((n, 3))
        if n > 1:
            v -= v.mean(axis=0, keepdims=True)
        vel[row] = v
    if cfg.interacting and n > 1:
        _, r2 = _pair_terms(pos, cfg)
        if np.min(r2) < min_sep ** 2:
            raise ValueError("packing fraction too high to place particles")
    return MDState(pos, vel)


def equilibrate(state: MDState, cfg: SimConfig) -> MDState:
    """Burn-in with a velocity-rescaling thermostat (off during production)."""
    if cfg.equilibration == 0 or cfg.temperature == 0.0:
        return state
    target = 1.5 * cfg.n * cfg.temperature
    for k in range(cfg.equilibration):
        state = step(state, cfg)
        if (k + 1) % cfg.thermostat_interval == 0:
            kinetic = 0.5 * cfg.mass * np.sum(state.vel ** 2, axis=(1, 2))
            factor = np.sqrt(target / np.maximum(kinetic, 1e-300))
            state = MDState(state.pos, state.vel * factor[:, None, None])
    return state


def simulate_trajectory(cfg: SimConfig, record_stride: int = 1) -> Trajectory:
    """Run one equilibrated trajectory, recording the full time series."""
    one = replace(cfg, n_trajectories=1)
    state = equilibrate(init_state(one, [0]), one)
    n_rec = cfg.steps // record_stride + 1
    times = np.empty(n_rec)
    positions = np.empty((n_rec, cfg.n, 3))
    velocities = np.empty((n_rec, cfg.n, 3))
    energies = np.empty(n_rec)
    k = 0
    for s in range(cfg.steps + 1):
        if s % record_stride == 0:
            times[k] = s * cfg.dt
            positions[k] = state.pos[0]
            velocities[k] = state.vel[0]
            energies[k] = energy(state, one)[0]
            k += 1
        if s < cfg.steps:
            state = step(state, one)
    return Trajectory(times, positions, velocities, energies)


# ---------------------------------------------------------------------------
# correlator estimation


def _normalize_pairs(pairs) -> list[tuple]:
    out = []
    for p in pairs:
        if len(p) == 2:
            out.append((None, p[0], None, p[1]))
        elif len(p) == 4:
            out.append((p[0], p[1], p[2], p[3]))
        else:
            raise ValueError(f"bad correlator pair {p!r}")
    return out


def pair_label(pair) -> str:
    i, a, j, b = pair
    left = f"v{a}" if i is None else f"v{a}[{i}]"
    right = f"v{b}" if j is None else f"v{b}[{j}]"
    return f"{left}*{right}"


@dataclass(frozen=True)
class CorrelatorEstimate:
    """Time-origin averaged correlators with per-trajectory resolution.

    per_traj has shape (R, n_pairs, n_lags); mean and jackknife standard
    errors are derived over the trajectory axis.
    """

    lags: np.ndarray
    pairs: tuple
    per_traj: np.ndarray
    energy_drift: float = 0.0

    @property
    def n_trajectories(self) -> int:
        return self.per_traj.shape[0]

    def mean(self) -> np.ndarray:
        return self.per_traj.mean(axis=0)

    def se(self) -> np.ndarray:
        return jackknife_se(self.per_traj)

    def labels(self) -> list[str]:
        return [pair_label(p) for p in self.pairs]


def jackknife_se(samples: np.ndarray) -> np.ndarray:
    """Leave-one-out jackknife standard error of the mean over axis 0."""
    r = samples.shape[0]
    if r < 2:
        return np.full(samples.shape[1:], np.inf)
    total = samples.sum(axis=0)
    loo = (total[None, ...] - samples) / (r - 1)
    center = loo.mean(axis=0)
    return np.sqrt((r - 1) / r * np.sum((loo - center) ** 2, axis=0))


def _fft_correlate(a: np.ndarray, b: np.ndarray, n_lags: int) -> np.ndarray:
    """(1/(S-lag)) sum_t a[t] b[t+lag] along the last axis, all origins."""
    s = a.shape[-1]
    size = 1
    while size < 2 * s:
        size *= 2
    fa = np.fft.rfft(a, size, axis=-1)
    fb = np.fft.rfft(b, size, axis=-1)
    cc = np.fft.irfft(fa.conj() * fb, size, axis=-1)[..., :n_lags]
    return cc / (s - np.arange(n_lags))


def _chunk_correlators(cfg: SimConfig, indices, stride: int, n_samples: int,
                       pairs) -> tuple[np.ndarray, float]:
    state = equilibrate(init_state(cfg, indices), cfg)
    r = len(indices)
    vels = np.empty((r, n_samples, cfg.n, 3))
    e0 = energy(state, cfg)
    for s in range(n_samples):
        vels[:, s] = state.vel
        if s < n_samples - 1:
            for _ in range(stride):
                state = step(state, cfg)
    drift = float(np.max(np.abs(energy(state, cfg) - e0)
                         / np.maximum(np.abs(e0), 1e-300)))
    n_lags_full = n_samples
    out = None
    for col, (i, a, j, b) in enumerate(pairs):
        ai = COMPONENTS.index(a)
        bi = COMPONENTS.index(b)
        if i is None and j is None:
            series_a = np.moveaxis(vels[:, :, :, ai], 1, -1)  # (r, N, S)
            series_b = np.moveaxis(vels[:, :, :, bi], 1, -1)
            cc = _fft_correlate(series_a, series_b, n_lags_full).mean(axis=1)
        else:
            series_a = vels[:, :, i, ai]
            series_b = vels[:, :, j, bi]
            cc = _fft_correlate(series_a, series_b, n_lags_full)
        if out is None:
            out = np.empty((r, len(pairs), n_lags_full))
        out[:, col] = cc
    return out, drift


def velocity_correlator(cfg: SimConfig, pairs, max_lag: float,
                        stride: int = 1) -> CorrelatorEstimate:
    """Ensemble- and time-origin-averaged velocity correlators.

    The lag grid is stride * dt; per-trajectory estimates are kept so the
    jackknife errors and downstream Green-Kubo integrals propagate
    consistently.
    """
    pairs = _normalize_pairs(pairs)
    dt_sample = cfg.dt * stride
    production = cfg.steps * cfg.dt
    if max_lag >= production:
        raise ValueError("max_lag must be shorter than the production window")
    n_samples = cfg.steps // stride + 1
    n_lags = int(round(max_lag / dt_sample)) + 1
    lags = np.arange(n_lags) * dt_sample

    chunk_size = max(1, min(cfg.n_trajectories,
                            2_000_000 // max(1, n_samples * cfg.n * 3)))
    chunks = [list(range(lo, min(lo + chunk_size, cfg.n_trajectories)))
              for lo in range(0, cfg.n_trajectories, chunk_size)]
    workers = int(os.environ.get("TREVERSE_THREADS", "1") or "1")

    def work(indices):
        return _chunk_correlators(cfg, indices, stride, n_samples, pairs)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    per_traj = np.concatenate([r[0][:, :, :n_lags] for r in results], axis=0)
    drift = max(r[1] for r in results)
    return CorrelatorEstimate(lags, tuple(pairs), per_traj, drift)


# ---------------------------------------------------------------------------
# Green-Kubo integrals and the symmetry verdicts

@dataclass(frozen=True)
class DiffusionTensor:
    """Green-Kubo integrals D[a, b] = int_0^tmax C_ab dt with jackknife errors.

    per_traj keeps the per-trajectory integrals (R, 3, 3) so errors of
    derived quantities (like D_xy + D_yx) propagate with the cross
    correlations intact.
    """

    d: np.ndarray
    se: np.ndarray
    t_max: float
    converged: bool
    per_traj: np.ndarray | None = None


def component_pairs() -> list[tuple]:
    """The nine particle-averaged component pairs (alpha, beta)."""
    return [(a, b) for a in COMPONENTS for b in COMPONENTS]


def diffusion_tensor(corr: CorrelatorEstimate, t_max: float) -> DiffusionTensor:
    """Integrate a 9-pair correlator estimate into the 3x3 tensor."""
    if t_max > corr.lags[-1] + 1e-12:
        raise ValueError("t_max beyond the available lag grid")
    sel = corr.lags <= t_max + 1e-12
    lag_sel = corr.lags[sel]
    per_traj_d = np.trapezoid(corr.per_traj[:, :, sel], lag_sel, axis=-1)
    mean_d = per_traj_d.mean(axis=0)
    se_d = jackknife_se(per_traj_d)

    index = {(a, b): k for k, (_, a, _, b) in enumerate(corr.pairs)}
    d = np.full((3, 3), np.nan)
    se = np.full((3, 3), np.nan)
    samples = np.full((per_traj_d.shape[0], 3, 3), np.nan)
    for r, a in enumerate(COMPONENTS):
        for c, b in enumerate(COMPONENTS):
            k = index.get((a, b))
            if k is not None:
                d[r, c] = mean_d[k]
                se[r, c] = se_d[k]
                samples[:, r, c] = per_traj_d[:, k]

    # tail criterion: diagonal correlators must have decayed at the cutoff
    converged = True
    mean_c = corr.mean()
    tail = corr.lags[sel] >= 0.8 * t_max
    for a in COMPONENTS:
        k = index.get((a, a))
        if k is None:
            continue
        c0 = abs(mean_c[k, 0])
        tail_level = float(np.mean(np.abs(mean_c[k, sel][tail])))
        if c0 > 0 and tail_level > 0.2 * c0:
            converged = False
    return DiffusionTensor(d, se, float(t_max), converged, samples)


@dataclass(frozen=True)
class AntisymmetryVerdict:
    value: float            # D_xy + D_yx
    se: float
    ratio: float            # |value| / max(|D_xx|, |D_xy|)

    @property
    def passed(self) -> bool:
        return abs(self.value) <= 3.0 * self.se


def antisymmetry_check(tensor: DiffusionTensor) -> AntisymmetryVerdict:
    """Off-diagonal antisymmetry D_xy = -D_yx within combined errors.

    The combined error is the jackknife error of the per-trajectory sums,
    which keeps the cross correlation between the two estimates; when the
    per-trajectory samples are unavailable the independent combination is
    used instead.
    """
    value = float(tensor.d[0, 1] + tensor.d[1, 0])
    if tensor.per_traj is not None and not np.any(np.isnan(tensor.per_traj[:, 0, 1])):
        se = float(jackknife_se(tensor.per_traj[:, 0, 1] + tensor.per_traj[:, 1, 0]))
    else:
        se = float(math.hypot(tensor.se[0, 1], tensor.se[1, 0]))
    scale = max(abs(tensor.d[0, 0]), abs(tensor.d[0, 1]))
    ratio = abs(value) / scale if scale > 0 else math.inf
    return AntisymmetryVerdict(value, se, ratio)


def flip_field(spec: FieldSpec) -> FieldSpec:
    """The spec with B -> -B."""
    if spec.family == "constant":
        return FieldSpec.constant(-spec.b, label=f"-({spec.label})")
    if spec.family == "axial":
        return FieldSpec.axial(-spec.coeffs, label=f"-({spec.label})")
    return FieldSpec.planar(-spec.cmat, label=f"-({spec.label})")


@dataclass(frozen=True)
class CasimirReport:
    """Correlators at field B against their partners at -B."""

    lags: np.ndarray
    pairs: tuple
    forward: np.ndarray
    reverse: np.ndarray
    se_combined: np.ndarray
    max_sigma: float

    @property
    def passed(self) -> bool:
        return self.max_sigma <= 3.0


def casimir_check(cfg: SimConfig, pairs, max_lag: float,
                  stride: int = 1) -> CasimirReport:
    """<v_i^a(0) v_j^b(t)>_B = <v_j^b(0) v_i^a(t)>_-B within 3 SE per lag."""
    pairs = _normalize_pairs(pairs)
    swapped = [(j, b, i, a) for (i, a, j, b) in pairs]
    fwd = velocity_correlator(cfg, pairs, max_lag, stride)
    rev = velocity_correlator(replace(cfg, field=flip_field(cfg.field)),
                              swapped, max_lag, stride)
    se = np.sqrt(fwd.se() ** 2 + rev.se() ** 2)
    diff = np.abs(fwd.mean() - rev.mean())
    with np.errstate(invalid="ignore", divide="ignore"):
        sigma = np.where(diff == 0.0, 0.0, diff / se)
    return CasimirReport(fwd.lags, tuple(pairs), fwd.mean(), rev.mean(),
                         se, float(np.max(sigma)))


def _slot_action(block: np.ndarray, axis: int) -> tuple[int, int]:
    """Image (component, sign) of velocity component `axis` under -R."""
    row = -block[axis]
    col = int(np.argmax(np.abs(row)))
    return col, int(round(row[col]))


def forced_zero_pairs(spec: FieldSpec) -> list[tuple[str, str]]:
    """Component pairs whose correlator two compatible symmetries force to zero.

    Two catalog operations acting identically on one velocity slot and with
    opposite signs (same image component) on the other pin the correlator
    to minus itself.
    """
    from .fields import find_compatible

    ops = [op for op in find_compatible(spec).ops if op.is_signed_permutation]
    blocks = [op.A.astype(float) for op in ops]
    forced = set()
    for ai in range(3):
        for bi in range(3):
            if ai == bi:
                continue
            for x in range(len(blocks)):
                for y in range(x + 1, len(blocks)):
                    a1, a2 = _slot_action(blocks[x], ai), _slot_action(blocks[y], ai)
                    b1, b2 = _slot_action(blocks[x], bi), _slot_action(blocks[y], bi)
                    same_a = a1 == a2
                    opposite_b = b1[0] == b2[0] and b1[1] == -b2[1]
                    same_b = b1 == b2
                    opposite_a = a1[0] == a2[0] and a1[1] == -a2[1]
                    if (same_a and opposite_b) or (same_b and opposite_a):
                        forced.add((COMPONENTS[ai], COMPONENTS[bi]))
    return sorted(forced)


@dataclass(frozen=True)
class VanishingReport:
    pairs: tuple
    max_sigma_per_pair: np.ndarray
    lags: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.max_sigma_per_pair <= 3.0))


def vanishing_correlator_check(cfg: SimConfig, max_lag: float,
                               stride: int = 1) -> VanishingReport:
    """Verify that symmetry-forced-zero correlators vanish within errors."""
    forced = forced_zero_pairs(cfg.field)
    if not forced:
        raise NotApplicable(
            f"no operation pair forces a zero correlator for {cfg.field.label}")
    corr = velocity_correlator(cfg, forced, max_lag, stride)
    with np.errstate(invalid="ignore", divide="ignore"):
        sigma = np.abs(corr.mean()) / corr.se()
    sigma = np.where(np.abs(corr.mean()) == 0.0, 0.0, sigma)
    return VanishingReport(tuple(forced), sigma.max(axis=1), corr.lags)


# ---------------------------------------------------------------------------
# conjugacy

def state_from_phasepoint(gamma: PhasePoint, cfg: SimConfig) -> MDState:
    if gamma.dim != 3 * cfg.n:
        raise ValueError("phase point does not match particle count")
    pos = gamma.coords.reshape(1, cfg.n, 3).copy()
    vel = (gamma.momenta / cfg.mass).reshape(1, cfg.n, 3).copy()
    return MDState(pos, vel)


def phasepoint_from_state(state: MDState, cfg: SimConfig) -> PhasePoint:
    return PhasePoint(state.pos[0].reshape(-1),
                      (cfg.mass * state.vel[0]).reshape(-1))


def _apply_block(state: MDState, block: np.ndarray) -> MDState:
    return MDState(state.pos @ block.T, -(state.vel @ block.T))


def conjugacy_check(op: TimeReversalOp, gamma0: PhasePoint, n_steps: int,
                    cfg: SimConfig) -> float:
    """Relative deviation of M S^n M S^n from the identity at gamma0.

    For an operation whose per-particle block satisfies the field
    compatibility condition the deviation sits at roundoff; incompatible
    blocks (e.g. the identity) give order-one deviations.
    """
    block = op.per_particle_block() if op.dim == 3 * cfg.n else None
    if block is None and op.dim == 3:
        block = op.matrix()
    if block is None:
        raise ValueError("operation must act as a common per-particle block")
    state = state_from_phasepoint(gamma0, cfg)
    for _ in range(n_steps):
        state = step(state, cfg)
    state = _apply_block(state, block)
    for _ in range(n_steps):
        state = step(state, cfg)
    state = _apply_block(state, block)
    final = phasepoint_from_state(state, cfg)
    ref = max(float(np.max(np.abs(gamma0.coords))),
              float(np.max(np.abs(gamma0.momenta))), 1e-300)
    dev = max(float(np.max(np.abs(final.coords - gamma0.coords))),
              float(np.max(np.abs(final.momenta - gamma0.momenta))))
    return dev / ref


# ---------------------------------------------------------------------------
# closed-form single-particle oracle used by tests and the verifier

def parse_sim_config(text: str) -> SimConfig:
    """Key-value simulation file mirroring the SimConfig fields.

    Recognized keys: n, dt, steps, temperature, mass, charge, box_half,
    wca_epsilon (or 'none'), wca_sigma, seed, n_trajectories, equilibration,
    thermostat_interval, field (inline field syntax).
    """
    from .fields import parse_field

    ints = {"n", "steps", "seed", "n_trajectories", "equilibration",
            "thermostat_interval"}
    floats = {"dt", "temperature", "mass", "charge", "box_half", "wca_sigma"}
    kwargs = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key == "field":
            kwargs["field"] = parse_field(value)
        elif key == "wca_epsilon":
            kwargs[key] = None if value.lower() == "none" else float(value)
        elif key in ints:
            kwargs[key] = int(value)
        elif key in floats:
            kwargs[key] = float(value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    missing = {"n", "field", "dt", "steps"} - kwargs.keys()
    if missing:
        raise ValueError(f"config misses required keys: {sorted(missing)}")
    return SimConfig(**kwargs)


def cyclotron_correlators(temperature: float, mass: float, charge: float,
                          b_z: float, lags: np.ndarray) -> dict:
    """Exact free-particle correlators in a constant field along z.

    C_xx = (T/m) cos(w t) and C_xy = -(T/m) sin(w t) with the signed
    frequency w = q B_z / m; cross pairs with z vanish.
    """
    omega = charge * b_z / mass
    amp = temperature / mass
    return {
        ("x", "x"): amp * np.cos(omega * lags),
        ("y", "y"): amp * np.cos(omega * lags),
        ("z", "z"): amp * np.ones_like(lags),
        ("x", "y"): -amp * np.sin(omega * lags),
        ("y", "x"): amp * np.sin(omega * lags),
        ("x", "z"): np.zeros_like(lags),
        ("z", "x"): np.zeros_like(lags),
        ("y", "z"): np.zeros_like(lags),
        ("z", "y"): np.zeros_like(lags),
    }
