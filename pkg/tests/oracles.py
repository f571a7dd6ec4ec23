"""Independent reference implementations and random inputs shared by the tests."""

import numpy as np


def readout_like(rng, dim):
    """Identity blended with a random channel; det stays above 0.5**dim."""
    w = rng.uniform(0, 0.5)
    return (1 - w) * np.eye(dim) + w * random_stochastic(rng, dim)


def random_stochastic(rng, dim, dominant=False):
    if dominant:
        r = rng.random((dim, dim))
        diag = rng.uniform(0.6, 0.97, dim)
        r[np.diag_indices(dim)] = 0
        r = r / r.sum(axis=0) * (1 - diag)
        r[np.diag_indices(dim)] = diag
        return r
    r = rng.random((dim, dim))
    return r / r.sum(axis=0)


def random_ibu_case(seed):
    """Random channel, counts, sparse prior and iteration count."""
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 33))
    r = random_stochastic(rng, dim)
    m = rng.integers(0, 5000, dim).astype(float)
    prior = rng.uniform(0, 10, dim)
    prior[rng.random(dim) < 0.2] = 0.0
    if not prior.any():
        prior[0] = 1.0
    n = int(rng.integers(0, 30))
    return r, m, prior, n


def grid_argmin(m, r):
    """Brute-force minimiser over the scaled simplex; returns (x, coarse step)."""
    m = np.asarray(m, dtype=float)
    total = m.sum()
    dim = m.size
    h = total / 2000

    def objective(points):
        resid = m[None, :] - points @ r.T
        return np.einsum("ij,ij->i", resid, resid)

    def search(centre, step, radius):
        if dim == 2:
            lo = max(0.0, centre[0] - radius)
            hi = min(total, centre[0] + radius)
            a = np.arange(lo, hi + step / 2, step)
            pts = np.stack([a, total - a], axis=1)
        else:
            axes = [np.arange(max(0.0, c - radius), min(total, c + radius) + step / 2, step)
                    for c in centre[:2]]
            a, b = np.meshgrid(*axes, indexing="ij")
            a, b = a.ravel(), b.ravel()
            keep = a + b <= total + 1e-9
            a, b = a[keep], b[keep]
            pts = np.stack([a, b, np.clip(total - a - b, 0, None)], axis=1)
        return pts[np.argmin(objective(pts))]

    best = search(np.full(dim, total / 2), h, total)
    step = h
    for _ in range(2):
        step /= 10
        best = search(best, step, 2 * step * 10)
    return best, h
