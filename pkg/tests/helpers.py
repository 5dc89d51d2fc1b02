"""Shared fixture builders and oracles for the unit and acceptance suites."""

import numpy as np
from scipy.special import logsumexp

from rgess.adaptation import sa_update_directions
from rgess.distributions import Gaussian, MixtureModel


def two_cluster_samples(rng, n_per=500, center=10.0, sd=1.0):
    """1D data from two well-separated clusters at -center and +center."""
    left = rng.normal(-center, sd, size=n_per)
    right = rng.normal(center, sd, size=n_per)
    return np.concatenate([left, right])[:, None]


OUTLIER_CLUSTER_MEANS = np.array([[0.0, 0.0], [8.0, 0.0], [4.0, 7.0]])
OUTLIER_POINTS = np.array([[40.0, 40.0], [41.0, 39.0]])


def outlier_fixture(seed=2024):
    """200 points in three unit-covariance clusters plus two far outliers."""
    rng = np.random.default_rng(seed)
    sizes = (67, 67, 66)
    clusters = [
        rng.normal(0.0, 1.0, size=(size, 2)) + mean
        for size, mean in zip(sizes, OUTLIER_CLUSTER_MEANS)
    ]
    return np.vstack(clusters + [OUTLIER_POINTS])


def outlier_fixture_true_mixture():
    """The generating three-component mixture of the outlier fixture."""
    return MixtureModel(
        np.full(3, 1.0 / 3.0),
        [Gaussian(mean, np.eye(2)) for mean in OUTLIER_CLUSTER_MEANS],
    )


def min_distance_to_outliers(mixture):
    means = np.stack([c.mean for c in mixture.components])
    dists = np.linalg.norm(
        means[:, None, :] - OUTLIER_POINTS[None, :, :], axis=2
    )
    return float(dists.min())


def mc_kl_objective(weights, means, covs, samples):
    """Monte Carlo estimate of the KL divergence to the mixture, up to the
    parameter-free entropy term: (1/K) sum_k -log f(X_k; phi)."""
    terms = []
    for mean, cov, w in zip(means, covs, weights):
        g = Gaussian(mean, 0.5 * (cov + cov.T))
        terms.append(np.log(w) + np.array([g.log_density(x) for x in samples]))
    return -float(np.mean(logsumexp(np.stack(terms, axis=1), axis=1)))


def assert_sa_matches_fd(current, samples, rel_tol=1e-4):
    """Raw SA update directions against central finite differences of the
    Monte Carlo KL estimate.

    Mean blocks equal the negative gradient directly; weight blocks equal the
    negative gradient after centering onto the simplex; covariance blocks are
    the negative gradient preconditioned by Sigma on both sides (the update's
    natural-gradient form), so the comparison maps the finite differences
    through 2 Sigma g Sigma.
    """
    h = 1e-5
    weights = current.weights.copy()
    means = current._means.copy()
    covs = np.stack([c.cov for c in current.components])
    m, d = means.shape
    dw_raw, dw, dmeans, dcovs = sa_update_directions(current, samples)

    fd_w = np.zeros(m)
    for j in range(m):
        wp, wm = weights.copy(), weights.copy()
        wp[j] += h
        wm[j] -= h
        fd_w[j] = (
            mc_kl_objective(wp, means, covs, samples)
            - mc_kl_objective(wm, means, covs, samples)
        ) / (2 * h)
    np.testing.assert_allclose(dw_raw, -fd_w, rtol=rel_tol)
    np.testing.assert_allclose(dw, -(fd_w - fd_w.mean()), rtol=rel_tol, atol=1e-12)

    for j in range(m):
        fd_mu = np.zeros(d)
        for a in range(d):
            mp, mm = means.copy(), means.copy()
            mp[j, a] += h
            mm[j, a] -= h
            fd_mu[a] = (
                mc_kl_objective(weights, mp, covs, samples)
                - mc_kl_objective(weights, mm, covs, samples)
            ) / (2 * h)
        np.testing.assert_allclose(dmeans[j], -fd_mu, rtol=rel_tol)

    for j in range(m):
        fd_cov = np.zeros((d, d))
        for a in range(d):
            for b in range(d):
                cp, cm = covs.copy(), covs.copy()
                cp[j, a, b] += h
                cm[j, a, b] -= h
                fd_cov[a, b] = (
                    mc_kl_objective(weights, means, cp, samples)
                    - mc_kl_objective(weights, means, cm, samples)
                ) / (2 * h)
        mapped = covs[j] @ (-2.0 * fd_cov) @ covs[j]
        np.testing.assert_allclose(dcovs[j], mapped, rtol=rel_tol)


def random_sa_instance(seed, m=2, d=2, k=20):
    """Random small mixture plus samples for the SA gradient oracle."""
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.full(m, 5.0))
    comps = []
    for _ in range(m):
        a = rng.normal(scale=0.4, size=(d, d))
        cov = a @ a.T + np.eye(d)
        comps.append(Gaussian(rng.normal(scale=1.5, size=d), cov))
    mixture = MixtureModel(weights, comps)
    samples = rng.normal(scale=1.5, size=(k, d))
    return mixture, samples
