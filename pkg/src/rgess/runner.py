"""Multi-chain orchestration: lockstep iterations across K chains with
periodic mixture adaptation at synchronization barriers.

Chains are share-nothing workers, each holding its own state and random
generator; the mixture snapshot they read is immutable. Results are therefore
bit-identical for any worker-pool size, including the size read from the
``RGESS_THREADS`` environment variable.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import adaptation as ad
from .adaptation import AdaptationConfig, Scheme
from .diagnostics import TraceRecord, rejection_rate_series
from .distributions import Gaussian, MixtureModel
from .samplers import (
    ChainState,
    TargetDensity,
    ess_step,
    gmrgess_step,
    mh_step,
    regional_mh_step,
    tmrgess_step,
)

__all__ = ["Kernel", "RunConfig", "RunResult", "RunError", "run", "pooled_snapshot"]

# Degrees of freedom of the pre-adaptation single-t pseudo-prior when the
# configuration does not pin one; long tails help early exploration.
_DEFAULT_INITIAL_DOF = 4.0


class Kernel(str, enum.Enum):
    ESS = "ess"
    GMRGESS = "gmrgess"
    TMRGESS = "tmrgess"
    REGIONAL_MH = "regional_mh"
    MH = "mh"
    GESS = "gess"


_GAUSSIAN_MIXTURE_KERNELS = {Kernel.GMRGESS, Kernel.REGIONAL_MH}
_T_MIXTURE_KERNELS = {Kernel.TMRGESS, Kernel.GESS}
_MIXTURE_KERNELS = _GAUSSIAN_MIXTURE_KERNELS | _T_MIXTURE_KERNELS


class RunError(RuntimeError):
    """A chain failed mid-run; carries the chain and iteration context."""

    def __init__(self, chain: int, iteration: int, cause: Exception):
        super().__init__(f"chain {chain} failed at iteration {iteration}: {cause}")
        self.chain = chain
        self.iteration = iteration
        self.cause = cause


@dataclass(frozen=True)
class RunConfig:
    chains: int
    iterations: int
    burn_in: int
    kernel: Kernel
    init: Gaussian
    adaptation: AdaptationConfig = field(default_factory=AdaptationConfig)
    master_seed: int = 0
    thinning: int = 1
    steps_per_iteration: int = 1
    mh_proposal_cov: np.ndarray | None = None

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError(f"chains must be >= 1, got {self.chains}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError(
                f"burn_in must lie in [0, iterations), got {self.burn_in} "
                f"with {self.iterations} iterations"
            )
        if self.thinning < 1:
            raise ValueError(f"thinning must be >= 1, got {self.thinning}")
        if self.steps_per_iteration < 1:
            raise ValueError(
                f"steps_per_iteration must be >= 1, got {self.steps_per_iteration}"
            )
        self._validate_kernel_scheme()

    def _validate_kernel_scheme(self):
        kernel, scheme = self.kernel, self.adaptation.scheme
        if kernel in _T_MIXTURE_KERNELS and scheme is not Scheme.EM_TMM:
            raise ValueError(f"kernel {kernel.value} requires the em_tmm scheme, got {scheme.value}")
        if kernel in _GAUSSIAN_MIXTURE_KERNELS and scheme is Scheme.EM_TMM:
            raise ValueError(f"kernel {kernel.value} requires a Gaussian-mixture scheme")
        if kernel is Kernel.GESS and self.adaptation.components != 1:
            raise ValueError("the gess kernel is the single-component special case; set components = 1")
        if kernel in _MIXTURE_KERNELS and self.chains < self.adaptation.components:
            raise ValueError(
                f"{self.chains} chains cannot support a "
                f"{self.adaptation.components}-component snapshot fit"
            )
        if kernel is Kernel.MH:
            if self.mh_proposal_cov is None:
                raise ValueError("the mh kernel requires mh_proposal_cov")
            cov = np.asarray(self.mh_proposal_cov, dtype=float)
            if cov.shape != (self.init.dim, self.init.dim):
                raise ValueError(
                    f"mh_proposal_cov shape {cov.shape} does not match dimension {self.init.dim}"
                )


@dataclass(frozen=True)
class RunResult:
    traces: list
    mixture_history: list
    summary: dict


def pooled_snapshot(chains) -> list:
    """Copies of the current chain points, in chain order."""
    chains = list(chains)
    if not chains:
        raise ValueError("no chains to snapshot")
    return [np.array(state.point, copy=True) for state in chains]


def worker_count(chains: int) -> int:
    """Worker-pool size: RGESS_THREADS when set, else a modest default.

    The pool size must never change results; it only rebalances work.
    """
    env = os.environ.get("RGESS_THREADS")
    if env:
        try:
            requested = int(env)
        except ValueError as exc:
            raise ValueError(f"RGESS_THREADS is not an integer: {env!r}") from exc
        return max(1, min(requested, chains))
    return max(1, min(os.cpu_count() or 1, chains, 8))


def _initial_mixture(config: RunConfig, points, adapt_rng) -> MixtureModel | None:
    """Pre-adaptation pseudo-prior bank.

    EM/VI-adapted kernels start from a least-informative single-component
    moment fit of the starting points; SA starts from a full M-component EM
    fit because its update cannot change the component count.
    """
    acfg = config.adaptation
    kernel = config.kernel
    if kernel in _T_MIXTURE_KERNELS:
        dof = acfg.fixed_dof if acfg.fixed_dof is not None else _DEFAULT_INITIAL_DOF
        comp = ad.moment_fit_student_t(points, acfg.reg_radius, dof)
        return MixtureModel([1.0], [comp], weighted_regions=acfg.weighted_regions)
    if kernel in _GAUSSIAN_MIXTURE_KERNELS:
        if acfg.scheme is Scheme.SA_GMM:
            return ad.em_gmm_fit(points, acfg.components, acfg, adapt_rng).mixture
        comp = ad.moment_fit_gaussian(points, acfg.reg_radius)
        return MixtureModel([1.0], [comp], weighted_regions=acfg.weighted_regions)
    return None


def _refit_mixture(config: RunConfig, mixture, points, adapt_rng, update_index: int):
    acfg = config.adaptation
    scheme = acfg.scheme
    if scheme is Scheme.SA_GMM:
        rate = acfg.learning_rate.rate(update_index)
        return ad.sa_gmm_update(mixture, points, rate, acfg.reg_radius)
    if scheme is Scheme.EM_GMM:
        return ad.em_gmm_fit(points, acfg.components, acfg, adapt_rng).mixture
    if scheme is Scheme.VI_GMM:
        return ad.vi_gmm_fit(points, acfg.components, acfg, adapt_rng).mixture
    if scheme is Scheme.EM_TMM:
        return ad.em_tmm_fit(points, acfg.components, acfg, adapt_rng).mixture
    raise ValueError(f"unknown adaptation scheme {scheme}")


def run(config: RunConfig, target: TargetDensity,
        _chain_seeds=None) -> RunResult:
    """Execute the configured multi-chain run against ``target``.

    Per-chain seeds are spawned from the master seed; adaptation has its own
    stream. At a barrier the mixture is refitted from the pooled points that
    existed before the barrier's iteration, all chain regions are reassigned
    under the new mixture, and only then do chains advance.

    ``_chain_seeds`` overrides the spawned per-chain seeds; it exists for the
    chain-independence tests only.
    """
    if target.dim != config.init.dim:
        raise ValueError(
            f"target dimension {target.dim} does not match init distribution "
            f"dimension {config.init.dim}"
        )
    if config.kernel is Kernel.ESS and (
        target.log_likelihood is None or target.prior is None
    ):
        raise ValueError("the ess kernel requires a target with a prior/likelihood split")

    k_chains = config.chains
    seed_seq = np.random.SeedSequence(config.master_seed)
    children = seed_seq.spawn(k_chains + 1)
    if _chain_seeds is not None:
        children[:k_chains] = [np.random.SeedSequence(s) for s in _chain_seeds]
    rngs = [np.random.default_rng(children[k]) for k in range(k_chains)]
    adapt_rng = np.random.default_rng(children[k_chains])
    chain_seeds = [
        int(children[k].generate_state(1, dtype=np.uint64)[0]) for k in range(k_chains)
    ]

    acfg = config.adaptation
    mixture = None
    states = []
    for k in range(k_chains):
        point = config.init.sample(rngs[k])
        states.append(ChainState(point=point, region=0, rng_seed=chain_seeds[k]))

    uses_mixture = config.kernel in _MIXTURE_KERNELS
    if uses_mixture:
        mixture = _initial_mixture(config, [s.point for s in states], adapt_rng)
        states = [
            replace(s, region=mixture.assign_region(s.point)) for s in states
        ]

    mh_cov = (
        np.asarray(config.mh_proposal_cov, dtype=float)
        if config.mh_proposal_cov is not None
        else None
    )

    def step_chain(k: int, snapshot, iteration: int):
        state = states[k]
        rng = rngs[k]
        rejections = 0
        try:
            for _ in range(config.steps_per_iteration):
                if config.kernel is Kernel.ESS:
                    outcome = ess_step(state, target.prior, target.log_likelihood, rng)
                elif config.kernel is Kernel.MH:
                    outcome = mh_step(state, mh_cov, target, rng)
                elif config.kernel is Kernel.REGIONAL_MH:
                    outcome = regional_mh_step(state, snapshot, target, rng)
                elif config.kernel is Kernel.GMRGESS:
                    outcome = gmrgess_step(state, snapshot, target, rng)
                else:  # TMRGESS and its single-component special case
                    outcome = tmrgess_step(state, snapshot, target, rng)
                state = outcome.next
                rejections += outcome.rejections
        except ValueError as exc:
            raise RunError(k, iteration, exc) from exc
        states[k] = state
        return rejections

    first_adapt = max(acfg.interval, 2 * acfg.components)
    workers = worker_count(k_chains)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    traces = [[] for _ in range(k_chains)]
    mixture_history = []
    if uses_mixture:
        mixture_history.append((0, mixture))
    update_index = 0

    try:
        for n in range(1, config.iterations + 1):
            if uses_mixture and n % acfg.interval == 0 and n >= first_adapt:
                snapshot_points = pooled_snapshot(states)
                update_index += 1
                mixture = _refit_mixture(
                    config, mixture, snapshot_points, adapt_rng, update_index
                )
                mixture_history.append((n, mixture))
                states[:] = [
                    replace(s, region=mixture.assign_region(s.point)) for s in states
                ]

            snapshot = mixture
            if pool is None:
                rejections = [step_chain(k, snapshot, n) for k in range(k_chains)]
            else:
                rejections = list(
                    pool.map(
                        lambda k, snap=snapshot, it=n: step_chain(k, snap, it),
                        range(k_chains),
                    )
                )

            if n % config.thinning == 0:
                for k in range(k_chains):
                    traces[k].append(
                        TraceRecord(
                            chain=k,
                            iteration=n,
                            point=np.array(states[k].point, copy=True),
                            rejections=rejections[k],
                            region=states[k].region,
                        )
                    )
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    window = acfg.interval if uses_mixture else 10
    total_steps = config.iterations * config.steps_per_iteration
    all_rej = [rec.rejections for chain in traces for rec in chain]
    summary = {
        "mean_rejections_per_iteration": float(np.mean(all_rej)) if all_rej else 0.0,
        "zero_rejection_fraction": float(np.mean([r == 0 for r in all_rej])) if all_rej else 0.0,
        "total_kernel_steps": total_steps * k_chains,
        "rejection_rate_window": window,
        "rejection_rate_series": rejection_rate_series(traces, window) if all_rej else [],
    }
    return RunResult(traces=traces, mixture_history=mixture_history, summary=summary)
