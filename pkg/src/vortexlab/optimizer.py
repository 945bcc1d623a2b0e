"""Two-phase coefficient search maximizing the alignment score.

Phase one explores the coefficient box with a scrambled Sobol sequence;
phase two refines around the incumbent with one of two strategies:

* ``perturb_best`` (default): Gaussian perturbations of the best trial,
  step size adapted by a 1/5-success rule, proposals clipped to bounds.
* ``density_ratio``: per-coordinate kernel density of the top-quantile
  trials reweighted against the rest; candidates are drawn from the good
  model and ranked by the density ratio.

Every evaluation is appended to a JSON-lines log as it completes, so a
killed study resumes from the log and (in deterministic mode,
parallel_width = 1) reproduces the exact trial stream it would have run
uninterrupted.
"""

from __future__ import annotations

import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .madc import madc
from .ring_model import CoefficientTensor, RingConfig
from .geometry import ZeroSpeed
from .wave_dynamics import axis_field

__all__ = [
    "DimensionTooLarge",
    "NoFeasibleHistory",
    "CorruptTrialLog",
    "SearchSpace",
    "StudyConfig",
    "TrialRecord",
    "StudyResult",
    "sample_qmc",
    "propose_refinements",
    "evaluate_tensor",
    "run_study",
]

# scipy's Sobol implementation tops out at this dimension
_SOBOL_MAX_DIM = 21201

_LOG_FIELDS = ("trial_id", "phase", "score", "madc", "feasible_fraction", "coeffs", "elapsed")

REFINE_SIGMA_INIT_FACTOR = 0.1
# One success per five trials keeps sigma constant: 2**0.5 * (2**-0.125)**4 = 1
_SIGMA_GROW = 2.0**0.5
_SIGMA_SHRINK = 2.0**-0.125

_DENSITY_TOP_FRACTION = 0.25
_DENSITY_CANDIDATES = 24


class DimensionTooLarge(ValueError):
    """Search dimension exceeds the Sobol generator's supported range."""


class NoFeasibleHistory(ValueError):
    """Refinement requested but no feasible trial exists to refine around."""


class CorruptTrialLog(ValueError):
    """Trial log cannot be resumed; carries the offending line number."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"trial log line {line_no}: {reason}")
        self.line_no = line_no


@dataclass(frozen=True)
class SearchSpace:
    """The flattened coefficient box [-c_max, c_max]^dim.

    Flattening is row-major over (component, sine/cosine, j, k), i.e. the
    natural reshape of the coefficient tensor.
    """

    J: int
    K: int
    c_max: float

    @property
    def dim(self) -> int:
        return 4 * (self.J + 1) * (self.K + 1)

    def unflatten(self, flat: np.ndarray) -> CoefficientTensor:
        return CoefficientTensor.from_flat(flat, self.J, self.K)

    def flatten(self, tensor: CoefficientTensor) -> np.ndarray:
        return tensor.flatten()

    def clip(self, flat: np.ndarray) -> np.ndarray:
        return np.clip(flat, -self.c_max, self.c_max)

    @classmethod
    def from_ring_config(cls, cfg: RingConfig) -> "SearchSpace":
        return cls(J=cfg.J, K=cfg.K, c_max=cfg.c_max)


@dataclass(frozen=True)
class StudyConfig:
    n_qmc: int = 10000
    n_refine: int = 50
    seed: int = 0
    strategy: str = "perturb_best"
    parallel_width: int = 1

    def __post_init__(self):
        if self.n_qmc < 0 or self.n_refine < 0 or self.n_qmc + self.n_refine < 1:
            raise ValueError("need n_qmc >= 0, n_refine >= 0 and at least one trial")
        if self.strategy not in ("perturb_best", "density_ratio"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrialRecord:
    """One optimizer evaluation as logged.

    ``score`` is madc * feasible_fraction; a trial whose evaluation hit a
    zero-speed point (or aligned nowhere) carries score = madc =
    feasible_fraction = 0.  ``elapsed`` is wall seconds, written as 0.0 in
    deterministic mode (parallel_width = 1) so logs are byte-reproducible.
    """

    trial_id: int
    phase: str
    score: float
    madc: float
    feasible_fraction: float
    coeffs: list
    elapsed: float

    def to_json_line(self) -> str:
        return json.dumps({name: getattr(self, name) for name in _LOG_FIELDS})


@dataclass(frozen=True)
class StudyResult:
    best: TrialRecord
    history: list

    def summary(self, study: StudyConfig) -> dict:
        return {
            "best_trial_id": self.best.trial_id,
            "best_score": self.best.score,
            "n_trials": len(self.history),
            "seed": study.seed,
            "config": study.to_dict(),
        }


def sample_qmc(space: SearchSpace, n: int, seed: int, skip: int = 0) -> list:
    """n scrambled-Sobol coefficient tensors scaled to the search box.

    The stream is deterministic in (seed, space) and point i never depends
    on n; ``skip`` fast-forwards the stream for resumption.
    """
    if space.dim > _SOBOL_MAX_DIM:
        raise DimensionTooLarge(
            f"dim = {space.dim} exceeds the Sobol limit {_SOBOL_MAX_DIM}; reduce J/K"
        )
    if n == 0:
        return []
    sampler = qmc.Sobol(d=space.dim, scramble=True, seed=seed)
    if skip:
        sampler.fast_forward(skip)
    with warnings.catch_warnings():
        # resumable prefix draws are deliberately not powers of two
        warnings.filterwarnings("ignore", message=".*balance properties of Sobol.*")
        unit = sampler.random(n)
    flats = (2.0 * unit - 1.0) * space.c_max
    return [space.unflatten(flat) for flat in flats]


def _best_record(history: list) -> TrialRecord:
    best = history[0]
    for rec in history[1:]:
        if rec.score > best.score:
            best = rec
    return best


def _feasible(history: list) -> list:
    return [rec for rec in history if rec.feasible_fraction > 0.0]


def _adapted_sigma(history: list, c_max: float) -> float:
    """1/5-success step size from the refine trials committed so far."""
    sigma = REFINE_SIGMA_INIT_FACTOR * c_max
    best_so_far = -np.inf
    for rec in history:
        if rec.phase == "refine":
            sigma *= _SIGMA_GROW if rec.score > best_so_far else _SIGMA_SHRINK
        best_so_far = max(best_so_far, rec.score)
    return float(np.clip(sigma, 1e-6 * c_max, c_max))


def _propose_perturb_best(history, n, rng, space):
    best = _best_record(_feasible(history))
    center = np.asarray(best.coeffs, dtype=float)
    sigma = _adapted_sigma(history, space.c_max)
    proposals = []
    for _ in range(n):
        step = rng.standard_normal(space.dim)
        proposals.append(space.clip(center + sigma * step))
    return proposals


def _log_kde(x: np.ndarray, points: np.ndarray, bandwidth: np.ndarray) -> float:
    # product of per-coordinate Gaussian mixtures, evaluated in log space
    z = (x[None, :] - points) / bandwidth[None, :]
    per_point = -0.5 * np.sum(z * z, axis=1) - np.sum(np.log(bandwidth))
    peak = per_point.max()
    return float(peak + np.log(np.mean(np.exp(per_point - peak))))


def _propose_density_ratio(history, n, rng, space):
    feasible = _feasible(history)
    ranked = sorted(feasible, key=lambda rec: (-rec.score, rec.trial_id))
    n_good = max(2, int(np.ceil(_DENSITY_TOP_FRACTION * len(ranked))))
    good = np.array([rec.coeffs for rec in ranked[:n_good]], dtype=float)
    rest = np.array([rec.coeffs for rec in ranked[n_good:]], dtype=float)

    def bandwidth(points: np.ndarray) -> np.ndarray:
        scale = np.std(points, axis=0)
        scale = np.where(scale > 1e-12, scale, 0.1 * space.c_max)
        return scale * max(len(points), 2) ** -0.2

    bw_good = bandwidth(good)
    bw_rest = bandwidth(rest) if len(rest) else None

    proposals = []
    for _ in range(n):
        candidates = []
        for _ in range(_DENSITY_CANDIDATES):
            center = good[rng.integers(len(good))]
            cand = space.clip(center + bw_good * rng.standard_normal(space.dim))
            log_l = _log_kde(cand, good, bw_good)
            if bw_rest is None:
                log_g = -space.dim * np.log(2.0 * space.c_max)
            else:
                log_g = _log_kde(cand, rest, bw_rest)
            candidates.append((log_l - log_g, cand))
        proposals.append(max(candidates, key=lambda pair: pair[0])[1])
    return proposals


def propose_refinements(
    history: list,
    n: int,
    seed,
    strategy: str = "perturb_best",
    space: SearchSpace | None = None,
) -> list:
    """n in-bounds refinement candidates from the committed history."""
    if n == 0:
        return []
    if not _feasible(history):
        raise NoFeasibleHistory("refinement needs at least one feasible trial")
    if space is None:
        raise ValueError("propose_refinements requires the search space")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if strategy == "perturb_best":
        flats = _propose_perturb_best(history, n, rng, space)
    elif strategy == "density_ratio":
        flats = _propose_density_ratio(history, n, rng, space)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return [space.unflatten(flat) for flat in flats]


def evaluate_tensor(tensor: CoefficientTensor, ring: RingConfig) -> tuple:
    """(score, madc, feasible_fraction) for one coefficient tensor.

    A zero-speed trajectory anywhere on the evaluation grid marks the trial
    infeasible rather than raising.
    """
    try:
        report = madc(axis_field(tensor, ring), ring)
    except ZeroSpeed:
        return 0.0, 0.0, 0.0
    return report.score, report.madc, report.feasible_fraction


def _parse_log(log_path: Path, space: SearchSpace) -> list:
    history = []
    with open(log_path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip() == "":
                raise CorruptTrialLog(line_no, "blank line")
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptTrialLog(line_no, f"invalid JSON ({exc.msg})") from exc
            if tuple(raw.keys()) != _LOG_FIELDS:
                raise CorruptTrialLog(line_no, f"unexpected fields {sorted(raw)}")
            if raw["trial_id"] != line_no - 1:
                raise CorruptTrialLog(line_no, f"trial_id {raw['trial_id']} out of order")
            if raw["phase"] not in ("qmc", "refine"):
                raise CorruptTrialLog(line_no, f"unknown phase {raw['phase']!r}")
            if len(raw["coeffs"]) != space.dim:
                raise CorruptTrialLog(
                    line_no, f"coeffs length {len(raw['coeffs'])} != dim {space.dim}"
                )
            history.append(TrialRecord(**raw))
    return history


def run_study(
    study: StudyConfig,
    ring: RingConfig,
    log_path,
    limit: int | None = None,
) -> StudyResult:
    """Run (or resume) the two-phase study, appending to the JSONL log.

    ``limit`` stops the study after that many total committed trials (the
    log stays resumable); the default runs n_qmc + n_refine.  Records are
    committed strictly in trial order, one flushed line per trial.
    """
    log_path = Path(log_path)
    space = SearchSpace.from_ring_config(ring)
    n_total = study.n_qmc + study.n_refine
    if limit is not None:
        n_total = min(n_total, limit)

    history = _parse_log(log_path, space) if log_path.exists() else []
    if len(history) > study.n_qmc + study.n_refine:
        raise CorruptTrialLog(len(history), "log longer than the study budget")

    deterministic = study.parallel_width == 1

    def evaluate(tensor: CoefficientTensor) -> tuple:
        start = time.perf_counter()
        score, value, fraction = evaluate_tensor(tensor, ring)
        elapsed = 0.0 if deterministic else time.perf_counter() - start
        return score, value, fraction, elapsed

    with open(log_path, "a") as log:

        def commit(trial_id, phase, tensor, outcome):
            score, value, fraction, elapsed = outcome
            rec = TrialRecord(
                trial_id=trial_id,
                phase=phase,
                score=score,
                madc=value,
                feasible_fraction=fraction,
                coeffs=[float(x) for x in tensor.flatten()],
                elapsed=elapsed,
            )
            log.write(rec.to_json_line() + "\n")
            log.flush()
            history.append(rec)

        with ThreadPoolExecutor(max_workers=study.parallel_width) as pool:
            while len(history) < n_total:
                start_id = len(history)
                width = min(study.parallel_width, n_total - start_id)
                ids = range(start_id, start_id + width)
                if start_id < study.n_qmc:
                    ids = range(start_id, min(start_id + width, study.n_qmc))
                    tensors = sample_qmc(space, len(ids), study.seed, skip=start_id)
                    phase = "qmc"
                else:
                    tensors = propose_refinements(
                        history,
                        len(ids),
                        seed=(study.seed, start_id),
                        strategy=study.strategy,
                        space=space,
                    )
                    phase = "refine"
                if width == 1:
                    outcomes = [evaluate(tensors[0])]
                else:
                    outcomes = list(pool.map(evaluate, tensors))
                for trial_id, tensor, outcome in zip(ids, tensors, outcomes):
                    commit(trial_id, phase, tensor, outcome)

    return StudyResult(best=_best_record(history), history=list(history))
