"""One-step MCMC transition kernels.

All kernels are pure functions of ``(state, parameters, rng)``: nothing is
mutated except the caller's rng, so chains holding their own generators can
step concurrently against a shared, immutable mixture snapshot.

The elliptical-slice family proposes points on the ellipse through the
current state and an auxiliary draw, shrinking the angle bracket toward zero
after every rejected proposal. The regional kernels recompute the slice
threshold at every proposal because the reverse pseudo-prior index depends on
which region the proposal lands in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .distributions import Gaussian, InverseGammaParams, MixtureModel, sample_inverse_gamma

__all__ = [
    "MAX_SHRINK_ITERS",
    "TargetDensity",
    "ChainState",
    "StepOutcome",
    "ess_step",
    "gmrgess_step",
    "tmrgess_step",
    "regional_mh_step",
    "mh_step",
    "regional_log_ratio",
    "t_auxiliary_params",
]

# Bracket shrinkage cap: theta -> 0 recovers the current point so the slice is
# never empty, but floating-point underflow of the bracket needs a guard.
MAX_SHRINK_ITERS = 1000


class TargetDensity:
    """An evaluable, possibly unnormalized log target over R^D.

    ``log_pi`` must return finite values on the support; ``-inf`` is allowed
    outside it. For plain elliptical slice sampling the target may instead be
    supplied split into a Gaussian ``prior`` and a ``log_likelihood``.
    """

    __slots__ = ("dim", "log_pi", "log_likelihood", "prior")

    def __init__(self, dim: int, log_pi, log_likelihood=None, prior: Gaussian | None = None):
        self.dim = int(dim)
        self.log_pi = log_pi
        self.log_likelihood = log_likelihood
        self.prior = prior


@dataclass(frozen=True)
class ChainState:
    """Current point of one chain plus bookkeeping carried across steps."""

    point: np.ndarray
    region: int = 0
    rejections_last_step: int = 0
    rng_seed: int = 0


@dataclass(frozen=True)
class StepOutcome:
    """Result of a single kernel step."""

    next: ChainState
    rejections: int
    angle_final: float = 0.0


def _log_uniform(rng: np.random.Generator) -> float:
    # Uniform(0, 1]: excludes 0 so the log-threshold stays finite.
    return math.log(1.0 - rng.random())


def _require_finite(value: float, what: str) -> float:
    if not np.isfinite(value):
        raise ValueError(f"{what} is not finite ({value}); slice is undefined here")
    return value


def _ellipse_shrink(x, mu, v, accepts, rng, trace_brackets=None):
    """Shared angle-bracket shrinkage loop of the ESS family.

    ``accepts(x_prop, theta)`` decides whether a proposal clears the slice.
    Returns ``(x_new, theta, rejections, accepted)``; when the shrinkage cap
    is hit the current point is returned with ``accepted`` False.

    ``trace_brackets``, if given, collects ``(theta_min, theta_max, theta)``
    per proposal for the shrinkage-monotonicity tests.
    """
    theta = rng.uniform(0.0, 2.0 * math.pi)
    theta_min, theta_max = theta - 2.0 * math.pi, theta
    x_c = x - mu
    v_c = v - mu
    rejections = 0
    for _ in range(MAX_SHRINK_ITERS):
        if trace_brackets is not None:
            trace_brackets.append((theta_min, theta_max, theta))
        x_prop = x_c * math.cos(theta) + v_c * math.sin(theta) + mu
        if accepts(x_prop, theta):
            return x_prop, theta, rejections, True
        rejections += 1
        if theta < 0.0:
            theta_min = theta
        else:
            theta_max = theta
        theta = rng.uniform(theta_min, theta_max)
    return x, 0.0, rejections, False


def ess_step(state: ChainState, prior: Gaussian, log_likelihood, rng,
             trace_brackets=None) -> StepOutcome:
    """Elliptical slice sampling step for a Gaussian-prior model.

    Draws the auxiliary point from the prior, sets the slice threshold
    log y = log L(x) + log u with u ~ Uniform(0, 1], and rotates/shrinks until
    the proposal clears the threshold.
    """
    x = state.point
    if x.shape != (prior.dim,):
        raise ValueError(f"state/prior dimension mismatch: {x.shape} vs ({prior.dim},)")
    log_l_x = _require_finite(float(log_likelihood(x)), "log-likelihood at current point")

    v = prior.sample(rng)
    log_y = log_l_x + _log_uniform(rng)

    def accepts(x_prop, _theta):
        return float(log_likelihood(x_prop)) > log_y

    x_new, theta, rejections, _ = _ellipse_shrink(
        x, prior.mean, v, accepts, rng, trace_brackets
    )
    next_state = replace(state, point=x_new, rejections_last_step=rejections)
    return StepOutcome(next=next_state, rejections=rejections, angle_final=theta)


def regional_log_ratio(mixture: MixtureModel, target: TargetDensity,
                       x1, region1: int, x2, region2: int) -> float:
    """log of the regional acceptance ratio for moving x1 (in S_i) to x2 (in S_j).

    Equals log pi(x2) + log f_j(x1) - log pi(x1) - log f_i(x2), which is the
    residual form R_i(x2)/R_j(x1) expanded in the log domain.
    """
    comp_at_x1 = mixture.component_log_densities(x1)
    comp_at_x2 = mixture.component_log_densities(x2)
    return (
        float(target.log_pi(x2))
        + comp_at_x1[region2]
        - float(target.log_pi(x1))
        - comp_at_x2[region1]
    )


def _regional_ellipse_step(state, mixture, target, v, rng, trace_brackets):
    """Ellipse/shrinkage core shared by the Gaussian- and t-mixture kernels."""
    x = state.point
    i = state.region
    log_pi = target.log_pi
    log_pi_x = _require_finite(float(log_pi(x)), "log target at current point")
    comp_at_x = mixture.component_log_densities(x)
    mu_i = mixture.components[i].mean
    log_u = _log_uniform(rng)
    weighted = mixture.weighted_regions
    log_weights = mixture._log_weights
    component_log_densities = mixture.component_log_densities

    region_of = [i]  # region of the most recent accepted proposal

    def accepts(x_prop, _theta):
        log_pi_prop = float(log_pi(x_prop))
        if log_pi_prop == -np.inf:
            return False
        comp_at_prop = component_log_densities(x_prop)
        if weighted:
            j = int((comp_at_prop + log_weights).argmax())
        else:
            j = int(comp_at_prop.argmax())
        # Residual-form test: log R_I(x') > log R_J(x) + log u, with the
        # threshold recomputed per proposal because J depends on x'.
        if log_pi_prop - comp_at_prop[i] > log_pi_x - comp_at_x[j] + log_u:
            region_of[0] = j
            return True
        return False

    x_new, theta, rejections, accepted = _ellipse_shrink(
        x, mu_i, v, accepts, rng, trace_brackets
    )
    region_new = region_of[0] if accepted else i
    next_state = ChainState(
        point=x_new, region=region_new,
        rejections_last_step=rejections, rng_seed=state.rng_seed,
    )
    return StepOutcome(next=next_state, rejections=rejections, angle_final=theta)


def gmrgess_step(state: ChainState, mixture: MixtureModel, target: TargetDensity,
                 rng, trace_brackets=None) -> StepOutcome:
    """Regional generalized ESS step with Gaussian-mixture pseudo-priors."""
    if mixture.kind != "gaussian":
        raise ValueError("gmrgess_step requires Gaussian mixture components")
    v = mixture.components[state.region].sample(rng)
    return _regional_ellipse_step(state, mixture, target, v, rng, trace_brackets)


def t_auxiliary_params(component, x) -> InverseGammaParams:
    """Inverse-gamma law of the latent scale given the current point:
    alpha' = (D + nu)/2, beta' = (nu + (x-mu)^T Sigma^-1 (x-mu))/2."""
    return InverseGammaParams(
        0.5 * (component.dim + component.dof),
        0.5 * (component.dof + component.mahalanobis_sq(x)),
    )


def tmrgess_step(state: ChainState, mixture: MixtureModel, target: TargetDensity,
                 rng, trace_brackets=None) -> StepOutcome:
    """Regional generalized ESS step with Student's-t mixture pseudo-priors.

    The auxiliary point is drawn through the scale-mixture representation:
    s from :func:`t_auxiliary_params`, then v ~ N(mu_I, s Sigma_I).
    """
    if mixture.kind != "student_t":
        raise ValueError("tmrgess_step requires Student's-t mixture components")
    comp = mixture.components[state.region]
    s = sample_inverse_gamma(t_auxiliary_params(comp, state.point), rng)
    v = comp.mean + math.sqrt(s) * (comp.chol @ rng.standard_normal(comp.dim))
    return _regional_ellipse_step(state, mixture, target, v, rng, trace_brackets)


def regional_mh_step(state: ChainState, mixture: MixtureModel,
                     target: TargetDensity, rng) -> StepOutcome:
    """Independence MH step proposing from the current region's component.

    Accepts with probability min{1, pi(x') f_J(x) / (pi(x) f_I(x'))}; the
    same formula covers within-region moves (I = J), where it is the usual
    importance-weighted independence ratio.
    """
    x = state.point
    i = state.region
    log_pi_x = _require_finite(float(target.log_pi(x)), "log target at current point")
    x_prop = mixture.components[i].sample(rng)
    log_pi_prop = float(target.log_pi(x_prop))

    accepted = False
    j = i
    if log_pi_prop > -np.inf:
        comp_at_x = mixture.component_log_densities(x)
        comp_at_prop = mixture.component_log_densities(x_prop)
        if mixture.weighted_regions:
            j = int(np.argmax(comp_at_prop + mixture._log_weights))
        else:
            j = int(np.argmax(comp_at_prop))
        log_alpha = log_pi_prop + comp_at_x[j] - log_pi_x - comp_at_prop[i]
        accepted = math.log(1.0 - rng.random()) < min(0.0, log_alpha)

    if accepted:
        next_state = replace(state, point=x_prop, region=j, rejections_last_step=0)
        return StepOutcome(next=next_state, rejections=0)
    next_state = replace(state, rejections_last_step=1)
    return StepOutcome(next=next_state, rejections=1)


def mh_step(state: ChainState, proposal_cov, target: TargetDensity,
            rng) -> StepOutcome:
    """Random-walk MH step with a symmetric Gaussian proposal."""
    x = state.point
    log_pi_x = _require_finite(float(target.log_pi(x)), "log target at current point")
    chol = np.linalg.cholesky(np.asarray(proposal_cov, dtype=float))
    x_prop = x + chol @ rng.standard_normal(x.shape[0])
    log_pi_prop = float(target.log_pi(x_prop))

    accepted = (
        log_pi_prop > -np.inf
        and math.log(1.0 - rng.random()) < min(0.0, log_pi_prop - log_pi_x)
    )
    if accepted:
        next_state = replace(state, point=x_prop, rejections_last_step=0)
        return StepOutcome(next=next_state, rejections=0)
    next_state = replace(state, rejections_last_step=1)
    return StepOutcome(next=next_state, rejections=1)
