"""Ground-truth mixture specifications and synthetic simplex datasets."""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .distributions import dirichlet_log_pdf, sample_categorical
from .special import RngStream
from .validation import as_float_array, check_count, check_positive, check_probability_vector

# Observations are clamped this far inside the simplex boundary; every
# update takes ln x, so exact zeros are never allowed through.
BOUNDARY_EPS = 1e-10


@dataclass(frozen=True)
class MixtureSpec:
    """Mixture of Dirichlet (beta for K = 2) components.

    ``weights`` is a probability vector of length I; ``shapes`` holds one
    row of positive concentration parameters per component.
    """

    weights: np.ndarray
    shapes: np.ndarray

    def __post_init__(self):
        weights = check_probability_vector(self.weights, "weights", atol=1e-12)
        if np.any(weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        shapes = check_positive(self.shapes, "shapes")
        if shapes.ndim != 2:
            raise ValueError("shapes must be a 2-d array (components x dimensions)")
        if shapes.shape[0] != weights.shape[0]:
            raise ValueError(
                f"weights length {weights.shape[0]} does not match {shapes.shape[0]} shape rows"
            )
        if shapes.shape[1] < 2:
            raise ValueError("each component needs at least 2 shape parameters")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "shapes", shapes)

    @property
    def n_components(self):
        return self.weights.shape[0]

    @property
    def n_dims(self):
        return self.shapes.shape[1]


@dataclass(frozen=True)
class Dataset:
    """Observations on the open simplex, with optional provenance.

    ``assignments`` records the latent component of each generated point for
    diagnostics; the inference engine must never read it.
    """

    observations: np.ndarray
    source: MixtureSpec | None = None
    seed: int | None = None
    assignments: np.ndarray | None = None

    def __post_init__(self):
        obs = as_float_array(self.observations, "observations")
        if obs.ndim != 2:
            raise ValueError("observations must be a 2-d array")
        if np.any(obs <= 0.0) or np.any(obs >= 1.0):
            raise ValueError("observations must be strictly interior to the simplex")
        if not np.allclose(obs.sum(axis=1), 1.0, rtol=0.0, atol=1e-12):
            raise ValueError("observation rows must sum to 1 within 1e-12")
        object.__setattr__(self, "observations", obs)

    @property
    def n_obs(self):
        return self.observations.shape[0]

    @property
    def n_dims(self):
        return self.observations.shape[1]

    @cached_property
    def log_observations(self):
        return np.log(self.observations)


def generate_dataset(spec, n, rng):
    """Draw ``n`` observations from ``spec`` using the given stream.

    Each point samples a component index from the weights and then a simplex
    point from that component; results are clamped to the open simplex and
    renormalized.  Identical (spec, n, stream) inputs reproduce the dataset
    bit for bit.
    """
    n = check_count(n, "n")
    if not isinstance(rng, RngStream):
        raise ValueError("rng must be an RngStream")
    gen = rng.generator()
    labels = sample_categorical(spec.weights, gen, size=n)
    draws = gen.gamma(spec.shapes[labels], 1.0)
    obs = draws / draws.sum(axis=1, keepdims=True)
    obs = np.clip(obs, BOUNDARY_EPS, 1.0 - BOUNDARY_EPS)
    obs = obs / obs.sum(axis=1, keepdims=True)
    return Dataset(observations=obs, source=spec, seed=rng.seed, assignments=labels)


def mixture_log_density(spec, x):
    """Log mixture density at simplex points ``x`` (broadcasts over rows)."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    logs = dirichlet_log_pdf(x[..., None, :], spec.shapes)
    out = logsumexp(logs + np.log(spec.weights), axis=-1)
    return float(out) if squeeze else out


def save_dataset(dataset, path):
    """Write a dataset as tab-separated rows under a provenance header."""
    path = Path(path)
    seed = "none" if dataset.seed is None else str(int(dataset.seed))
    lines = [f"# K={dataset.n_dims} N={dataset.n_obs} seed={seed}"]
    for row in dataset.observations:
        lines.append("\t".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def load_dataset(path):
    """Read a dataset written by :func:`save_dataset`."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path} is missing the dataset header line")
    fields = dict(part.split("=", 1) for part in lines[0].lstrip("# ").split())
    k = int(fields["K"])
    n = int(fields["N"])
    seed = None if fields["seed"] == "none" else int(fields["seed"])
    rows = [[float(v) for v in line.split("\t")] for line in lines[1:] if line]
    obs = np.asarray(rows, dtype=np.float64)
    if obs.shape != (n, k):
        raise ValueError(f"{path} header promises shape {(n, k)}, found {obs.shape}")
    return Dataset(observations=obs, seed=seed)
