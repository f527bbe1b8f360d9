"""Noise channels, deterministic controls, and the control ball.

The control space U is the finite coefficient space with one slot per noise
channel.  Each channel drives one retained mode with amplitude sigma_k and
either additive gain 1 or multiplicative gain 1 + (Y, e_k); the default
family sigma_k = sigma0 * mu_k^(-s_decay) keeps the map Lipschitz into the
L2-, V- and domain-of-A-valued Hilbert-Schmidt targets with constants
max sigma_k mu_k^(s/2).

Controls are piecewise constant on a uniform grid, which keeps the action
integral exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .basis import BasisSet, ModeIndex, SpectralState

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class NoiseChannel:
    mode: ModeIndex
    sigma: float
    growth: str = MULTIPLICATIVE

    def __post_init__(self):
        if self.growth not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError(f"unknown growth kind {self.growth!r}")


@dataclass(frozen=True)
class NoiseModel:
    """Diagonal diffusion coefficient as a finite family of mode channels."""

    channels: tuple[NoiseChannel, ...]
    s_decay: float | None = None

    def __post_init__(self):
        modes = [c.mode for c in self.channels]
        if len(set(modes)) != len(modes):
            raise ValueError("duplicate channel modes")

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.sigma for c in self.channels])

    @property
    def multiplicative_mask(self) -> np.ndarray:
        return np.array([c.growth == MULTIPLICATIVE for c in self.channels])

    def positions(self, basis: BasisSet) -> np.ndarray:
        """Flat mode positions of the channels on this basis."""
        cache = getattr(self, "_positions_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_positions_cache", cache)
        key = id(basis)
        if key not in cache:
            cache[key] = np.array([basis.mode_position(c.mode) for c in self.channels])
        return cache[key]

    def growth_constant(self, basis: BasisSet, s: float = 0.0) -> float:
        """c with |psi(t,Y)u|_s <= c (1 + |Y|) |u|_U at this truncation."""
        mu = basis.eigenvalues[self.positions(basis)]
        w = np.where(mu > 0, mu, 1.0) ** (s / 2.0) if s != 0.0 else np.ones_like(mu)
        return float(np.max(self.sigmas * w))

    def hilbert_schmidt_sq(self, basis: BasisSet, weight_power: int = 2) -> float:
        """sum sigma_k^2 (1 + mu_k^weight_power); finite by construction."""
        mu = basis.eigenvalues[self.positions(basis)]
        return float(np.sum(self.sigmas ** 2 * (1.0 + mu ** weight_power)))

    @classmethod
    def default_family(cls, basis: BasisSet, n_channels: int, sigma0: float = 0.1,
                       s_decay: float = 1.5, growth: str = MULTIPLICATIVE) -> "NoiseModel":
        """Channels on the lowest nonzero-eigenvalue modes, sigma0 * mu^(-s_decay)."""
        order = [m for m in basis.modes if m.eigenvalue > 0]
        if n_channels > len(order):
            raise ValueError("more channels than nonzero modes")
        chans = tuple(NoiseChannel(m, sigma0 * m.eigenvalue ** (-s_decay), growth)
                      for m in order[:n_channels])
        return cls(chans, s_decay)

    def describe(self) -> dict:
        return {
            "s_decay": self.s_decay,
            "channels": [[c.mode.field.value, c.mode.i, c.mode.j, c.mode.m,
                          c.sigma, c.growth] for c in self.channels],
        }


def psi_apply_flat(basis: BasisSet, model: NoiseModel, t: float,
                   flat: np.ndarray, u: np.ndarray) -> np.ndarray:
    """sum_k sigma_k g_k(Y) u_k e_k over (..., n_modes) / (..., n_channels)."""
    pos = model.positions(basis)
    if u.shape[-1] != model.n_channels:
        raise ValueError(
            f"control vector has {u.shape[-1]} entries, model has "
            f"{model.n_channels} channels")
    gains = np.where(model.multiplicative_mask, 1.0 + flat[..., pos], 1.0)
    out = np.zeros_like(flat)
    out[..., pos] = model.sigmas * gains * u
    return out


def psi_state_jacobian_apply(basis: BasisSet, model: NoiseModel,
                             u: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply (d/dY) psi(t,Y) u to z; diagonal, so also its own transpose."""
    pos = model.positions(basis)
    out = np.zeros_like(z)
    mult = model.multiplicative_mask
    out[..., pos] = np.where(mult, model.sigmas * u * z[..., pos], 0.0)
    return out


def apply_psi(t: float, y: SpectralState, u: np.ndarray,
              model: NoiseModel) -> SpectralState:
    """Diffusion coefficient applied to a control direction u in U."""
    u = np.asarray(u, dtype=float)
    out = psi_apply_flat(y.basis, model, t, y.coeffs, u)
    return SpectralState(y.basis, out, y.time)


# --------------------------------------------------------------------------
# Wiener sampling
# --------------------------------------------------------------------------

def path_rng(seed: int, path_index: int = 0) -> np.random.Generator:
    """Independent, scheduling-proof stream for one trajectory of an ensemble."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(path_index,)))


def sample_wiener_increment(dt: float, rng: np.random.Generator,
                            n_channels: int) -> np.ndarray:
    """One increment per channel, each N(0, dt)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return rng.normal(0.0, np.sqrt(dt), size=n_channels)


def wiener_increments(dt: float, rng: np.random.Generator, n_steps: int,
                      n_channels: int) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    return rng.normal(0.0, np.sqrt(dt), size=(n_steps, n_channels))


# --------------------------------------------------------------------------
# controls
# --------------------------------------------------------------------------

@dataclass
class ControlPath:
    """Piecewise-constant control on a uniform time grid.

    values[k] applies on [times[k], times[k+1]); the action integral is exact
    for this parameterization.
    """

    times: np.ndarray           # (K+1,), uniform, from 0 to T
    values: np.ndarray          # (K, n_channels)
    M_bound: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.times.ndim != 1:
            raise ValueError("times must be 1D and values 2D")
        if self.times.size != self.values.shape[0] + 1:
            raise ValueError("times must have one more entry than value rows")
        steps = np.diff(self.times)
        if steps.size and (np.any(steps <= 0)
                           or np.max(np.abs(steps - steps[0])) > 1e-12 * max(steps[0], 1)):
            raise ValueError("time grid must be uniform and increasing")

    @property
    def n_intervals(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @classmethod
    def zeros(cls, horizon: float, n_intervals: int, n_channels: int) -> "ControlPath":
        times = np.linspace(0.0, horizon, n_intervals + 1)
        return cls(times, np.zeros((n_intervals, n_channels)))

    @classmethod
    def constant(cls, horizon: float, n_intervals: int,
                 value: np.ndarray) -> "ControlPath":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        times = np.linspace(0.0, horizon, n_intervals + 1)
        return cls(times, np.tile(value, (n_intervals, 1)))

    def with_values(self, values: np.ndarray) -> "ControlPath":
        return replace(self, values=np.asarray(values, dtype=float))

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.times[:-1] + self.times[1:])

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_start", "t_end"]
                       + [f"channel_{k}" for k in range(self.n_channels)])
            for k in range(self.n_intervals):
                w.writerow([repr(self.times[k]), repr(self.times[k + 1])]
                           + [repr(v) for v in self.values[k]])

    @classmethod
    def load_csv(cls, path) -> "ControlPath":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or not rows[0][:2] == ["t_start", "t_end"]:
            raise ValueError(f"{path}: not a control CSV")
        body = np.array([[float(x) for x in r] for r in rows[1:]])
        times = np.concatenate([body[:, 0], body[-1:, 1]])
        return cls(times, body[:, 2:])


def action_of(h: ControlPath) -> float:
    """Half the squared L2([0,T]; U) norm; exact for piecewise-constant paths."""
    return 0.5 * float(np.sum(h.values ** 2) * h.dt)


def project_to_TM(h: ControlPath, M: float) -> ControlPath:
    """Radial projection onto the control ball of squared-norm budget M."""
    if M <= 0:
        raise ValueError("M must be positive")
    sq = 2.0 * action_of(h)
    if sq <= M:
        return replace(h, M_bound=M)
    scaled = h.values * np.sqrt(M / sq)
    return ControlPath(h.times, scaled, M_bound=M)


def oscillatory_family(h: ControlPath, n: int, amp: float, channel: int) -> ControlPath:
    """h plus amp sin(2 pi n t) on one channel, sampled at interval midpoints.

    Converges weakly (not strongly) to h as n grows; n must stay below the
    grid Nyquist frequency.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not 0 <= channel < h.n_channels:
        raise ValueError("channel out of range")
    if 2.0 * n * h.dt >= 1.0:
        raise ValueError(
            f"oscillation frequency n={n} beyond the grid Nyquist limit "
            f"{0.5 / h.dt:.1f}")
    vals = h.values.copy()
    vals[:, channel] += amp * np.sin(2.0 * np.pi * n * h.midpoints())
    return ControlPath(h.times, vals, M_bound=None)
