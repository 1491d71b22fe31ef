"""Coordinate-ascent variational inference for simplex mixture models.

One iteration updates the responsibilities, then the Gamma posteriors over
the shape parameters, then the Dirichlet posterior over the weights.  The
surrogate objective recorded per iteration uses the shared single lower
bound under ``SLB_WEAK`` and the z-variable bound under ``MLB_STRONG`` (the
strong-condition path has no single objective of its own, so the z bound is
the consistent scalar to monitor).
"""

import csv
import io
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp, xlogy

from .bounds import BoundKind, ComponentExpectations, mlb_z_bound, slb_bound
from .distributions import DirichletWeights, GammaPosterior, dirichlet_kl, gamma_kl
from .special import RngStream, digamma, trigamma
from .validation import check_count

# Gamma-shape increments are analytically positive; clamping guards the
# finite-precision crossings that occur when one mean dominates the sum.
COEFF_FLOOR = 1e-10
# Components with less pooled responsibility than this fraction of N keep
# their prior-valued posteriors instead of fitting to noise.
DEGENERATE_FRACTION = 1e-8


@dataclass(frozen=True)
class Priors:
    """Broadcast scalar hyperparameters of the conjugate priors."""

    gamma_shape: float = 1.0
    gamma_rate: float = 0.01
    weight_concentration: float = 1e-3

    def __post_init__(self):
        for name in ("gamma_shape", "gamma_rate", "weight_concentration"):
            if not float(getattr(self, name)) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    def gamma_prior(self, n_components, n_dims):
        shape = np.full((n_components, n_dims), float(self.gamma_shape))
        rate = np.full((n_components, n_dims), float(self.gamma_rate))
        return GammaPosterior(shape, rate)

    def weight_prior(self, n_components):
        return DirichletWeights(np.full(n_components, float(self.weight_concentration)))


@dataclass(frozen=True)
class VariationalState:
    """Responsibilities plus factorized posteriors for one model fit."""

    responsibilities: np.ndarray
    shape_posteriors: GammaPosterior
    weight_posterior: DirichletWeights
    bound_kind: BoundKind
    priors: Priors

    def __post_init__(self):
        r = np.asarray(self.responsibilities, dtype=np.float64)
        if r.ndim != 2:
            raise ValueError("responsibilities must be an N x I matrix")
        if np.any(r < 0.0):
            raise ValueError("responsibilities must be non-negative")
        if not np.allclose(r.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("responsibility rows must sum to 1 within 1e-9")
        if self.shape_posteriors.shape.shape != (r.shape[1], self.shape_posteriors.shape.shape[-1]):
            raise ValueError("shape posteriors must form an I x K grid")
        if self.weight_posterior.concentration.shape != (r.shape[1],):
            raise ValueError("weight posterior length must match the component count")
        object.__setattr__(self, "responsibilities", r)
        object.__setattr__(self, "bound_kind", BoundKind.coerce(self.bound_kind))

    @property
    def n_obs(self):
        return self.responsibilities.shape[0]

    @property
    def n_components(self):
        return self.responsibilities.shape[1]

    @property
    def n_dims(self):
        return self.shape_posteriors.shape.shape[-1]

    def component_expectations(self):
        return ComponentExpectations.from_gamma(self.shape_posteriors)


@dataclass(frozen=True)
class TraceRecord:
    """Per-iteration convergence bookkeeping."""

    iteration: int
    surrogate: float
    mc_elbo: float | None = None
    mc_elbo_stderr: float | None = None


def _component_bounds(state):
    ce = state.component_expectations()
    if state.bound_kind is BoundKind.SLB_WEAK:
        return slb_bound(ce)
    return mlb_z_bound(ce)


def init_state(data, components, priors, bound_kind, rng):
    """Random-responsibility start with prior-valued posteriors.

    Responsibility rows are symmetric Dirichlet(1) draws; the weight
    posterior immediately absorbs their column sums.
    """
    components = check_count(components, "components")
    if data.n_obs == 0:
        raise ValueError("dataset is empty")
    if data.n_obs < components:
        raise ValueError(
            f"need at least as many observations ({data.n_obs}) as components ({components})"
        )
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    draws = gen.standard_exponential(size=(data.n_obs, components))
    r = draws / draws.sum(axis=1, keepdims=True)
    weights = DirichletWeights(priors.weight_concentration + r.sum(axis=0))
    return VariationalState(
        responsibilities=r,
        shape_posteriors=priors.gamma_prior(components, data.n_dims),
        weight_posterior=weights,
        bound_kind=BoundKind.coerce(bound_kind),
        priors=priors,
    )


def _log_responsibility_numerator(state, data):
    """N x I matrix of E[ln pi_i] + Bound_i + sum_k (mean_ik - 1) ln x_nk."""
    mean = state.shape_posteriors.mean()
    return (
        state.weight_posterior.expect_log()[None, :]
        + np.atleast_1d(_component_bounds(state))[None, :]
        + data.log_observations @ (mean - 1.0).T
    )


def update_responsibilities(state, data):
    """Softmax responsibility update under the state's surrogate bound."""
    log_rho = _log_responsibility_numerator(state, data)
    log_rho -= logsumexp(log_rho, axis=1, keepdims=True)
    r = np.exp(log_rho)
    # Explicit renormalization: when logits are huge the subtraction above
    # is only accurate to |logit| * eps, which can exceed the row-sum
    # tolerance.
    r /= r.sum(axis=1, keepdims=True)
    return replace(state, responsibilities=r)


def update_shape_posteriors(state, data):
    """Conjugate Gamma update of every shape-parameter posterior.

    The shape increment per dimension is the pooled responsibility times the
    bound's coefficient on that dimension's log expectation; the rate
    collects -ln x weighted by responsibility and can only grow past the
    prior rate for interior data.
    """
    ce = state.component_expectations()
    mean = ce.mean
    total = mean.sum(axis=1)
    coeff = mean * (np.asarray(digamma(total))[:, None] - digamma(mean))
    if state.bound_kind is BoundKind.MLB_STRONG:
        if state.n_dims != 2:
            raise ValueError(
                f"the strong-condition update is defined only for K=2, got K={state.n_dims}"
            )
        cross = mean[:, 0] * mean[:, 1] * trigamma(total)
        coeff = coeff + cross[:, None]
    coeff = np.maximum(coeff, COEFF_FLOOR)

    pooled = state.responsibilities.sum(axis=0)
    priors = state.priors
    shape = priors.gamma_shape + pooled[:, None] * coeff
    rate = priors.gamma_rate - state.responsibilities.T @ data.log_observations

    starved = pooled < DEGENERATE_FRACTION * state.n_obs
    if starved.any():
        shape[starved] = priors.gamma_shape
        rate[starved] = priors.gamma_rate
    return replace(state, shape_posteriors=GammaPosterior(shape, rate))


def update_weights(state):
    """Conjugate Dirichlet update of the weight posterior."""
    pooled = state.responsibilities.sum(axis=0)
    concentration = state.priors.weight_concentration + pooled
    return replace(state, weight_posterior=DirichletWeights(concentration))


def surrogate_objective(state, data):
    """Full surrogate lower bound at the current state.

    Responsibility-weighted expected complete-data terms plus the
    categorical entropy, minus the KL of each posterior factor from its
    prior.  Under ``MLB_STRONG`` the reported bound is the z-variable one.
    """
    r = state.responsibilities
    per_component = _log_responsibility_numerator(state, data)
    data_part = float((r * per_component).sum() - xlogy(r, r).sum())
    priors = state.priors
    weight_kl = dirichlet_kl(state.weight_posterior, priors.weight_prior(state.n_components))
    shape_kl = gamma_kl(
        state.shape_posteriors, priors.gamma_prior(state.n_components, state.n_dims)
    ).sum()
    return data_part - float(weight_kl) - float(shape_kl)


def iterate_evi(state, data, max_iters=500, rel_tol=1e-6, monitor=None):
    """Run coordinate ascent from ``state`` until the surrogate stalls.

    Stops once the relative surrogate change drops below ``rel_tol`` or
    after ``max_iters`` iterations.  A surrogate *decrease* never stops the
    loop early; under the strong condition it is the phenomenon of interest
    and is left in the trace for the caller to detect.
    """
    max_iters = check_count(max_iters, "max_iters")
    if not rel_tol > 0.0:
        raise ValueError("rel_tol must be strictly positive")
    trace = []
    previous = None
    for iteration in range(1, max_iters + 1):
        state = update_responsibilities(state, data)
        state = update_shape_posteriors(state, data)
        state = update_weights(state)
        value = surrogate_objective(state, data)
        mc = monitor(state, iteration) if monitor is not None else None
        trace.append(
            TraceRecord(
                iteration=iteration,
                surrogate=value,
                mc_elbo=None if mc is None else float(mc[0]),
                mc_elbo_stderr=None if mc is None else float(mc[1]),
            )
        )
        if previous is not None:
            if abs(value - previous) / max(abs(value), 1e-300) < rel_tol:
                break
        previous = value
    return state, trace


def run_evi(data, components, priors, bound_kind, rng, max_iters=500, rel_tol=1e-6, monitor=None):
    """Initialize and run the full variational loop; returns (state, trace)."""
    state = init_state(data, components, priors, bound_kind, rng)
    return iterate_evi(state, data, max_iters=max_iters, rel_tol=rel_tol, monitor=monitor)


def detect_nonmonotonicity(trace, tol=0.0, rel_tol=0.0):
    """Indices t with surrogate(t) < surrogate(t-1) - tol - rel_tol*|surrogate(t-1)|."""
    if not trace:
        raise ValueError("trace must be non-empty")
    if tol < 0.0 or rel_tol < 0.0:
        raise ValueError("tolerances must be non-negative")
    values = np.asarray([record.surrogate for record in trace], dtype=np.float64)
    drops = values[1:] < values[:-1] - tol - rel_tol * np.abs(values[:-1])
    return [int(i) for i in np.nonzero(drops)[0] + 1]


def trace_to_csv(trace, path=None):
    """Serialize a trace as ``iter,surrogate,mc_elbo,mc_elbo_stderr`` rows.

    Monte Carlo fields are left empty when absent.  Returns the CSV text;
    also writes it to ``path`` when given.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["iter", "surrogate", "mc_elbo", "mc_elbo_stderr"])
    for record in trace:
        writer.writerow([
            record.iteration,
            repr(float(record.surrogate)),
            "" if record.mc_elbo is None else repr(float(record.mc_elbo)),
            "" if record.mc_elbo_stderr is None else repr(float(record.mc_elbo_stderr)),
        ])
    text = buffer.getvalue()
    if path is not None:
        with open(path, "w") as handle:
            handle.write(text)
    return text
