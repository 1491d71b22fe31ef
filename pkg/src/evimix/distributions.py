"""Log-densities, samplers, and KL divergences for the gamma family.

Beta observations are treated throughout as two-dimensional simplex points,
so the Dirichlet code paths serve both the bivariate and the multivariate
mixture models.
"""

import numpy as np

from .special import digamma, ln_gamma, trigamma
from .validation import (
    as_float_array,
    check_positive,
    check_probability_vector,
    check_simplex,
    check_unit_interval,
)


class GammaPosterior:
    """Independent Gamma laws in shape/rate form.

    ``shape`` and ``rate`` may be scalars or broadcastable arrays; a single
    instance typically holds the full grid of per-component, per-dimension
    posteriors.
    """

    def __init__(self, shape, rate):
        shape = check_positive(shape, "shape")
        rate = check_positive(rate, "rate")
        self.shape, self.rate = np.broadcast_arrays(shape, rate)
        self.shape = np.array(self.shape, dtype=np.float64)
        self.rate = np.array(self.rate, dtype=np.float64)

    def mean(self):
        return self.shape / self.rate

    def mean_log(self):
        """E[ln u] = psi(a) - ln b; always below ln(mean) by Jensen."""
        return digamma(self.shape) - np.log(self.rate)

    def var_log(self):
        """Var[ln u] = psi'(a)."""
        return trigamma(self.shape)

    def log_pdf(self, x):
        x = check_positive(x, "x")
        a, b = self.shape, self.rate
        return a * np.log(b) - ln_gamma(a) + (a - 1.0) * np.log(x) - b * x

    def sample(self, rng, size=None):
        return sample_gamma(self.shape, self.rate, rng, size=size)

    def __repr__(self):
        return f"GammaPosterior(shape={self.shape!r}, rate={self.rate!r})"


class DirichletWeights:
    """Dirichlet law over mixture weights, parameterized by concentration."""

    def __init__(self, concentration):
        c = check_positive(concentration, "concentration")
        if c.ndim != 1:
            raise ValueError("concentration must be a one-dimensional vector")
        self.concentration = np.array(c, dtype=np.float64)

    def mean(self):
        return self.concentration / self.concentration.sum()

    def expect_log(self):
        """E[ln pi_i] = psi(c_i) - psi(sum c)."""
        c = self.concentration
        return digamma(c) - digamma(c.sum())

    def log_pdf(self, x):
        x = check_simplex(np.asarray(x, dtype=np.float64), "x")
        return dirichlet_log_pdf(x, self.concentration)

    def sample(self, rng, size=None):
        return sample_dirichlet(self.concentration, rng, size=size)

    def __repr__(self):
        return f"DirichletWeights({self.concentration!r})"


def beta_log_pdf(x, u, v):
    """Log of the beta density with shape parameters u, v at x in (0, 1)."""
    x = check_unit_interval(x, "x")
    u = check_positive(u, "u")
    v = check_positive(v, "v")
    return (
        ln_gamma(u + v) - ln_gamma(u) - ln_gamma(v)
        + (u - 1.0) * np.log(x) + (v - 1.0) * np.log1p(-x)
    )


def dirichlet_log_pdf(x, u):
    """Log Dirichlet density at simplex points x with concentration u.

    Both arguments broadcast over leading axes; the trailing axis is the
    simplex dimension.  Reduces to ``beta_log_pdf`` for K = 2.
    """
    x = check_simplex(np.asarray(x, dtype=np.float64), "x")
    u = check_positive(u, "u")
    if u.shape[-1] != x.shape[-1]:
        raise ValueError(
            f"x and u must agree on the trailing dimension, got {x.shape[-1]} and {u.shape[-1]}"
        )
    norm = ln_gamma(u.sum(axis=-1)) - ln_gamma(u).sum(axis=-1)
    return norm + ((u - 1.0) * np.log(x)).sum(axis=-1)


def sample_gamma(shape, rate, rng, size=None):
    """Draw from Gamma(shape, rate) (rate parametrization)."""
    shape = check_positive(shape, "shape")
    rate = check_positive(rate, "rate")
    return rng.gamma(shape, 1.0 / rate, size=size)


def sample_dirichlet(u, rng, size=None):
    """Draw simplex points from Dirichlet(u) via normalized gamma draws."""
    u = check_positive(u, "u")
    if u.ndim < 1:
        raise ValueError("u must have at least one dimension")
    if size is None:
        draws = rng.gamma(u, 1.0)
    else:
        draws = rng.gamma(u, 1.0, size=(size,) + u.shape)
    return draws / draws.sum(axis=-1, keepdims=True)


def sample_beta(u, v, rng, size=None):
    """Draw from Beta(u, v) as the first coordinate of a 2-dim Dirichlet."""
    u = check_positive(u, "u")
    v = check_positive(v, "v")
    return sample_dirichlet(np.stack([u, v], axis=-1), rng, size=size)[..., 0]


def sample_categorical(weights, rng, size=None):
    """Draw component indices from the given probability vector."""
    weights = check_probability_vector(weights, "weights")
    edges = np.cumsum(weights)
    edges[-1] = 1.0
    return np.searchsorted(edges, rng.random(size=size), side="right")


def gamma_kl(q, p):
    """KL(q || p) between Gamma laws, elementwise over broadcast shapes."""
    a1, b1 = q.shape, q.rate
    a2, b2 = p.shape, p.rate
    return (
        (a1 - a2) * digamma(a1)
        - ln_gamma(a1) + ln_gamma(a2)
        + a2 * (np.log(b1) - np.log(b2))
        + a1 * (b2 - b1) / b1
    )


def dirichlet_kl(q, p):
    """KL(q || p) between Dirichlet laws of equal length."""
    cq = q.concentration
    cp = p.concentration
    if cq.shape != cp.shape:
        raise ValueError("Dirichlet laws must have equal length")
    expect_log = digamma(cq) - digamma(cq.sum())
    return (
        ln_gamma(cq.sum()) - ln_gamma(cp.sum())
        - (ln_gamma(cq) - ln_gamma(cp)).sum()
        + ((cq - cp) * expect_log).sum()
    )


def as_simplex(x, name="x"):
    """Lift raw observations onto the simplex.

    1-D input or a single column of values in (0, 1) is completed to
    ``(x, 1 - x)``; anything wider is validated as simplex rows.
    """
    arr = as_float_array(x, name)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be one- or two-dimensional")
    if arr.shape[1] == 1:
        arr = check_unit_interval(arr, name)
        arr = np.concatenate([arr, 1.0 - arr], axis=1)
    return check_simplex(arr, name)
