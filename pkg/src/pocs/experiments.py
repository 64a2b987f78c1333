"""Monte-Carlo recovery experiments: phase transitions and noisy SNR curves."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np

from .equivalent import build_equivalent_matrix
from .linalg import KAPPA, Seed, signc
from .sensing import (
    NoiseKind,
    NoiseSpec,
    SensingEnsemble,
    add_bounded_noise,
    generate_sparse_signal,
    normalize_to_convention,
)
from .solvers import BpdnConfig, bpdn_solve, recover_direction_pocs


class ConfigError(ValueError):
    pass


class Mode(str, Enum):
    POCS_NOISELESS = "pocs-noiseless"
    CS_NOISELESS = "cs-noiseless"
    POCS_NOISY = "pocs-noisy"
    METRICS_SUITE = "metrics-suite"


def _default_alphas():
    return tuple(float(a) for a in np.linspace(1.0, 3.0, 10))


@dataclass(frozen=True)
class ExperimentConfig:
    mode: Mode = Mode.POCS_NOISELESS
    n: int = 100
    s: int = 10
    m_grid: tuple = tuple(range(1, 71))
    trials: int = 100
    kappa: float = KAPPA
    success_threshold: float = 1e-3
    noise_alphas: tuple = field(default_factory=_default_alphas)
    noise_kind: NoiseKind = NoiseKind.UNIFORM_DISC
    base_seed: int = 0
    workers: int = 1
    rip_m: int = 60

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", Mode(self.mode))
            object.__setattr__(self, "noise_kind", NoiseKind(self.noise_kind))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        object.__setattr__(self, "noise_alphas", tuple(float(a) for a in self.noise_alphas))
        if not 1 <= self.s <= self.n:
            raise ConfigError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.success_threshold > 0:
            raise ConfigError(f"success threshold must be positive, got {self.success_threshold}")
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if any(m < 1 for m in self.m_grid):
            raise ConfigError("every m in the grid must be >= 1")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.rip_m < 1:
            raise ConfigError("rip_m must be >= 1")

    @property
    def taus(self) -> tuple:
        return tuple(math.pi / 10.0**a for a in self.noise_alphas)


def parse_m_grid(text: str) -> tuple:
    """Parse ``"5,10,20"`` or an inclusive range ``"a:b"`` / ``"a:b:step"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            if len(parts) != 3 or parts[2] < 1:
                raise ValueError
            return tuple(range(parts[0], parts[1] + 1, parts[2]))
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"cannot parse m grid {text!r}") from None


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"cannot parse number list {text!r}") from None


_KEY_ALIASES = {"seed": "base_seed", "threshold": "success_threshold", "alphas": "noise_alphas"}


def config_from_mapping(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Build a config from string or typed values keyed by field name (dashes allowed)."""
    known = {f.name: f for f in fields(ExperimentConfig)}
    kwargs = {}
    for raw_key, value in values.items():
        key = raw_key.strip().replace("-", "_")
        key = _KEY_ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"unknown config key {raw_key!r}")
        if isinstance(value, str):
            value = value.strip()
            try:
                if key == "m_grid":
                    value = parse_m_grid(value)
                elif key == "noise_alphas":
                    value = _parse_floats(value)
                elif key in ("n", "s", "trials", "base_seed", "workers", "rip_m"):
                    value = int(value)
                elif key in ("kappa", "success_threshold"):
                    value = float(value)
            except ValueError:
                raise ConfigError(f"bad value {value!r} for {raw_key}") from None
        kwargs[key] = value
    return replace(base or ExperimentConfig(), **kwargs)


def load_config_file(path) -> dict:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = line.split("=", 1)
            elif ":" in line:
                key, value = line.split(":", 1)
            else:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip()] = value.strip()
    return values


@dataclass(frozen=True)
class TrialRecord:
    mode: str
    m: int
    trial: int
    tau: float
    relative_error: float
    snr_db: float
    iterations: int
    converged: bool
    seed_base: int
    seed_labels: str


@dataclass(frozen=True)
class AggregateRow:
    mode: str
    m: int
    m_over_s: float
    tau: float
    success_rate: float
    mean_snr_db: float
    trials: int


@dataclass
class ExperimentTable:
    mode: str
    s: int
    threshold: float
    records: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def success_curve(self, tau: float = 0.0):
        pts = sorted((r.m, r.success_rate) for r in self.rows if r.tau == tau)
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])

    def row(self, m: int, tau: float = 0.0) -> AggregateRow:
        for r in self.rows:
            if r.m == m and r.tau == tau:
                return r
        raise KeyError((m, tau))


def snr_db(relative_error: float) -> float:
    if relative_error == 0:
        return math.inf
    return 20.0 * math.log10(1.0 / relative_error)


def _trial_seed(cfg: ExperimentConfig, m: int, tau_index: int, trial: int) -> Seed:
    return Seed(cfg.base_seed, (cfg.mode.value, m, tau_index, trial))


def run_trial(cfg: ExperimentConfig, m: int, tau_index: int, trial: int) -> TrialRecord:
    """One draw of signal, matrix (and noise), decoded per ``cfg.mode``."""
    seed = _trial_seed(cfg, m, tau_index, trial)
    x0 = generate_sparse_signal(cfg.n, cfg.s, seed.child("signal")).values
    E = SensingEnsemble.gaussian(m, cfg.n, seed.child("matrix"), kappa=cfg.kappa)
    x0 = normalize_to_convention(E, x0)
    tau = 0.0
    if cfg.mode is Mode.CS_NOISELESS:
        M = E.stacked_real()
        res = bpdn_solve(M, M @ x0, BpdnConfig(0.0))
    elif cfg.mode is Mode.POCS_NOISELESS:
        res = recover_direction_pocs(E, signc(E.A @ x0), 0.0)
    elif cfg.mode is Mode.POCS_NOISY:
        tau = cfg.taus[tau_index]
        z0 = signc(E.A @ x0)
        z = add_bounded_noise(z0, NoiseSpec(cfg.noise_kind, tau), seed.child("noise"))
        # oracle fidelity ||A_eps x0|| from the known noise
        fidelity = float(np.linalg.norm(build_equivalent_matrix(E, z - z0).matrix @ x0))
        res = recover_direction_pocs(E, z, fidelity)
    else:
        raise ConfigError(f"mode {cfg.mode.value} does not run recovery trials")
    err = float(np.linalg.norm(x0 - res.estimate) / np.linalg.norm(x0))
    return TrialRecord(
        mode=cfg.mode.value,
        m=m,
        trial=trial,
        tau=tau,
        relative_error=err,
        snr_db=snr_db(err),
        iterations=res.iterations,
        converged=res.converged,
        seed_base=cfg.base_seed,
        seed_labels="/".join(str(x) for x in (cfg.mode.value, m, tau_index, trial)),
    )


def _run_task(args):
    return run_trial(*args)


def _map_trials(cfg: ExperimentConfig, tasks: list) -> list:
    if cfg.workers == 1 or len(tasks) < 2:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))))


def aggregate(records, s: int, threshold: float) -> list:
    """Per-(m, tau) success rate and mean SNR, independent of record order."""
    groups = {}
    for r in records:
        groups.setdefault((r.m, r.tau), []).append(r)
    rows = []
    for (m, tau), recs in sorted(groups.items()):
        recs = sorted(recs, key=lambda r: r.trial)
        ok = sum(r.relative_error <= threshold for r in recs)
        rows.append(AggregateRow(
            mode=recs[0].mode,
            m=m,
            m_over_s=m / s,
            tau=tau,
            success_rate=ok / len(recs),
            mean_snr_db=float(np.mean([r.snr_db for r in recs])),
            trials=len(recs),
        ))
    return rows


def _table(cfg: ExperimentConfig, records: list) -> ExperimentTable:
    records = sorted(records, key=lambda r: (r.m, r.tau, r.trial))
    return ExperimentTable(cfg.mode.value, cfg.s, cfg.success_threshold, records,
                           aggregate(records, cfg.s, cfg.success_threshold))


def run_phase_transition(cfg: ExperimentConfig) -> ExperimentTable:
    """Noiseless success rate against ``m`` for PO-CS or the linear CS baseline."""
    if cfg.mode not in (Mode.POCS_NOISELESS, Mode.CS_NOISELESS):
        raise ConfigError(f"phase transition needs a noiseless mode, got {cfg.mode.value}")
    tasks = [(cfg, m, 0, t) for m in cfg.m_grid for t in range(cfg.trials)]
    return _table(cfg, _map_trials(cfg, tasks))


def run_noisy_snr(cfg: ExperimentConfig) -> ExperimentTable:
    """Mean SNR against ``m`` for each noise level ``tau = pi / 10**alpha``."""
    if cfg.mode is not Mode.POCS_NOISY:
        raise ConfigError(f"noisy SNR run needs mode pocs-noisy, got {cfg.mode.value}")
    tasks = [(cfg, m, i, t) for m in cfg.m_grid for i in range(len(cfg.taus))
             for t in range(cfg.trials)]
    return _table(cfg, _map_trials(cfg, tasks))


def run(cfg: ExperimentConfig) -> ExperimentTable:
    if cfg.mode is Mode.POCS_NOISY:
        return run_noisy_snr(cfg)
    return run_phase_transition(cfg)


def crossing_point(ms, rates, level: float = 0.5) -> float:
    """First ``m`` where the linearly interpolated success curve reaches ``level``."""
    ms = np.asarray(ms, dtype=np.float64)
    rates = np.asarray(rates, dtype=np.float64)
    for i in range(len(ms)):
        if rates[i] >= level:
            if i == 0:
                return float(ms[0])
            r0, r1 = rates[i - 1], rates[i]
            return float(ms[i - 1] + (level - r0) * (ms[i] - ms[i - 1]) / (r1 - r0))
    return math.nan


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
