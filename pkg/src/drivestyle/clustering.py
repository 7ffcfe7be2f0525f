"""Clustering baselines, expert-free cluster naming and internal validation.

K-Means, Gaussian mixture EM and fuzzy c-means are written out here so that
their per-iteration objective traces can be inspected; agglomerative
clustering uses SciPy's Ward linkage.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.special import logsumexp

from .errors import AmbiguousOrdering, DegenerateInput, InvalidParameters, SingleCluster, \
    SingularCovariance
from .partitions import STYLES

METHODS = ("kmeans", "gmm", "fcm", "agglomerative")


@dataclass
class ClusterModel:
    method: str
    k: int
    centers: np.ndarray                      # original feature units
    mean: np.ndarray | None = None           # standardization, when used
    std: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    trace: list[float] = field(default_factory=list)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.mean is None:
            return X
        return (X - self.mean) / self.std

    def to_dict(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            return v
        return {
            "method": self.method,
            "k": self.k,
            "centers": self.centers.tolist(),
            "standardization": None if self.mean is None else
            {"mean": self.mean.tolist(), "std": self.std.tolist()},
            "params": conv(self.params),
            "trace": [float(v) for v in self.trace],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClusterModel":
        st = d.get("standardization")
        return cls(d["method"], int(d["k"]), np.asarray(d["centers"], dtype=float),
                   None if st is None else np.asarray(st["mean"], dtype=float),
                   None if st is None else np.asarray(st["std"], dtype=float),
                   d.get("params", {}), list(d.get("trace", [])))


def _sqdist(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = (A * A).sum(1)[:, None] - 2 * A @ B.T + (B * B).sum(1)[None, :]
    return np.maximum(d, 0.0)


# --------------------------------------------------------------------------
# k-means
# --------------------------------------------------------------------------

def _kmeans_pp(Z, k, rng):
    centers = [Z[rng.integers(len(Z))]]
    for _ in range(1, k):
        d = _sqdist(Z, np.array(centers)).min(1)
        centers.append(Z[rng.choice(len(Z), p=d / d.sum())])
    return np.array(centers)


def _kmeans_once(Z, k, rng, max_iter, tol):
    C = _kmeans_pp(Z, k, rng)
    labels = None
    trace = []
    for _ in range(max_iter):
        new = _sqdist(Z, C).argmin(1)
        for j in range(k):
            if not np.any(new == j):
                # reseed an empty cluster at the point worst served by its center
                far = _sqdist(Z, C)[np.arange(len(Z)), new].argmax()
                new[far] = j
        C_new = np.array([Z[new == j].mean(0) for j in range(k)])
        trace.append(float(_sqdist(Z, C_new)[np.arange(len(Z)), new].sum()))
        shift = np.abs(C_new - C).max()
        C = C_new
        if labels is not None and np.array_equal(new, labels) or shift < tol:
            labels = new
            break
        labels = new
    return C, labels, trace


def kmeans(Z, k, seed=0, max_iter=300, tol=1e-10, n_init=10):
    """Lloyd iterations from k-means++ seeds; the restart with least inertia wins."""
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        C, labels, trace = _kmeans_once(Z, k, rng, max_iter, tol)
        if best is None or trace[-1] < best[2][-1] - 1e-12:
            best = (C, labels, trace)
    return best


# --------------------------------------------------------------------------
# Gaussian mixture
# --------------------------------------------------------------------------

def _gauss_logpdf(Z, mu, cov):
    L = np.linalg.cholesky(cov)
    sol = np.linalg.solve(L, (Z - mu).T)
    return (-0.5 * (sol ** 2).sum(0) - np.log(np.diag(L)).sum()
            - 0.5 * Z.shape[1] * np.log(2 * np.pi))


def _e_step(Z, w, mu, cov):
    logp = np.column_stack([np.log(w[j]) + _gauss_logpdf(Z, mu[j], cov[j]) for j in range(len(w))])
    norm = logsumexp(logp, axis=1)
    return np.exp(logp - norm[:, None]), float(norm.sum())


def _m_step(Z, R, reg):
    nk = R.sum(0) + 1e-300
    w = nk / len(Z)
    mu = (R.T @ Z) / nk[:, None]
    d = Z.shape[1]
    cov = np.empty((len(nk), d, d))
    for j in range(len(nk)):
        diff = Z - mu[j]
        cov[j] = (R[:, j, None] * diff).T @ diff / nk[j] + reg * np.eye(d)
    return w, mu, cov


def gmm(Z, k, seed=0, max_iter=300, tol=1e-10, reg=1e-6, retries=3):
    """EM with full covariances, initialised from k-means.

    A covariance that loses positive definiteness triggers a restart with a
    ten-times larger floor, up to ``retries`` times.
    """
    C, labels, _ = kmeans(Z, k, seed=seed)
    for attempt in range(retries + 1):
        floor = reg * 10 ** attempt
        try:
            return _gmm_run(Z, k, labels, floor, max_iter, tol)
        except np.linalg.LinAlgError:
            continue
    raise SingularCovariance(f"GMM covariance singular even with floor {floor:g}")


def _gmm_run(Z, k, labels, reg, max_iter, tol):
    R = np.eye(k)[labels]
    w, mu, cov = _m_step(Z, R, reg)
    trace = []
    for _ in range(max_iter):
        R, ll = _e_step(Z, w, mu, cov)
        trace.append(ll)
        if len(trace) > 1 and abs(trace[-1] - trace[-2]) <= tol * max(1.0, abs(trace[-1])):
            break
        w, mu, cov = _m_step(Z, R, reg)
    return w, mu, cov, R, trace, reg


# --------------------------------------------------------------------------
# fuzzy c-means
# --------------------------------------------------------------------------

def _fcm_memberships(d2, m):
    zero = d2 <= 1e-300
    U = np.empty_like(d2)
    hit = zero.any(1)
    if (~hit).any():
        inv = d2[~hit] ** (-1.0 / (m - 1))
        U[~hit] = inv / inv.sum(1, keepdims=True)
    if hit.any():
        U[hit] = zero[hit] / zero[hit].sum(1, keepdims=True)
    return U


def fcm(Z, k, seed=0, m=2.0, max_iter=300, tol=1e-9):
    """Alternating center/membership updates; objective is sum(U^m * d^2)."""
    rng = np.random.default_rng(seed)
    U = rng.dirichlet(np.ones(k), size=len(Z))
    trace = []
    for _ in range(max_iter):
        Um = U ** m
        C = (Um.T @ Z) / Um.sum(0)[:, None]
        d2 = _sqdist(Z, C)
        U_new = _fcm_memberships(d2, m)
        trace.append(float((U_new ** m * d2).sum()))
        done = np.abs(U_new - U).max() < tol
        U = U_new
        if done:
            break
    Um = U ** m
    C = (Um.T @ Z) / Um.sum(0)[:, None]
    return C, U, trace


# --------------------------------------------------------------------------
# front door
# --------------------------------------------------------------------------

def _relabel_by_first_appearance(labels):
    order = {}
    for v in labels:
        order.setdefault(int(v), len(order))
    return np.array([order[int(v)] for v in labels])


def fit_clusters(X, method: str = "kmeans", k: int = 3, seed: int = 0, max_iter: int = 300,
                 tol: float = 1e-10, standardize: bool = True,
                 linkage_method: str = "ward") -> tuple[ClusterModel, np.ndarray]:
    """Fit one baseline and return the model plus a hard assignment per row."""
    X = np.asarray(X, dtype=float)
    if method not in METHODS:
        raise InvalidParameters(f"unknown clustering method {method!r}; choose from {METHODS}")
    if X.ndim != 2 or not np.all(np.isfinite(X)):
        raise DegenerateInput("feature matrix must be 2-D and finite")
    if k < 2 or k > len(X):
        raise InvalidParameters(f"need 2 <= k <= {len(X)}, got k={k}")
    if len(np.unique(X, axis=0)) < k:
        raise DegenerateInput(f"fewer than {k} distinct rows")

    mean = std = None
    Z = X
    if standardize:
        mean = X.mean(0)
        std = X.std(0)
        std = np.where(std > 0, std, 1.0)
        Z = (X - mean) / std

    params: dict = {}
    if method == "kmeans":
        C, labels, trace = kmeans(Z, k, seed=seed, max_iter=max_iter, tol=tol)
        params["inertia"] = trace[-1]
    elif method == "gmm":
        w, mu, cov, R, trace, floor = gmm(Z, k, seed=seed, max_iter=max_iter, tol=tol)
        C, labels = mu, R.argmax(1)
        params.update(weights=w, covariances=cov, covariance_floor=floor)
    elif method == "fcm":
        C, U, trace = fcm(Z, k, seed=seed, max_iter=max_iter)
        labels = U.argmax(1)
        params.update(fuzzifier=2.0, memberships=U)
    else:
        L = linkage(Z, method=linkage_method)
        labels = _relabel_by_first_appearance(fcluster(L, k, criterion="maxclust"))
        if len(np.unique(labels)) != k:
            raise DegenerateInput(f"linkage cut produced {len(np.unique(labels))} clusters")
        C = np.array([Z[labels == j].mean(0) for j in range(k)])
        trace = []
        params["linkage"] = linkage_method

    centers = C * std + mean if standardize else C
    model = ClusterModel(method, k, np.asarray(centers), mean, std, params, list(trace))
    return model, np.asarray(labels, dtype=int)


def assign_style_labels(model: ClusterModel, styles: Sequence[str] = STYLES) -> dict[int, str]:
    """Name clusters by the mean of their standardized center coordinates, lowest first."""
    if model.k != len(styles):
        raise InvalidParameters(f"need exactly {len(styles)} clusters, model has {model.k}")
    if model.mean is not None:
        Zc = model.transform(model.centers)
    else:
        spread = model.centers.std(0)
        Zc = (model.centers - model.centers.mean(0)) / np.where(spread > 0, spread, 1.0)
    score = Zc.mean(1)
    order = np.argsort(score, kind="stable")
    if np.any(np.diff(score[order]) <= 1e-9):
        raise AmbiguousOrdering(f"cluster scores tie: {score.tolist()}")
    return {int(c): styles[rank] for rank, c in enumerate(order)}


# --------------------------------------------------------------------------
# internal validation
# --------------------------------------------------------------------------

def _groups(X, labels):
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    uniq, idx = np.unique(labels, return_inverse=True)
    if len(uniq) < 2:
        raise SingleCluster("internal validation needs at least two clusters")
    return X, idx, len(uniq)


def silhouette(X, labels, chunk: int = 2048) -> float:
    """Mean silhouette; members of singleton clusters score 0."""
    X, idx, k = _groups(X, labels)
    n = len(X)
    onehot = np.eye(k)[idx]
    counts = onehot.sum(0)
    s = np.zeros(n)
    for lo in range(0, n, chunk):
        sl = slice(lo, min(lo + chunk, n))
        D = np.sqrt(_sqdist(X[sl], X))
        sums = D @ onehot
        own = idx[sl]
        rows = np.arange(len(own))
        own_n = counts[own]
        a = np.where(own_n > 1, sums[rows, own] / np.maximum(own_n - 1, 1), 0.0)
        mean_other = sums / counts
        mean_other[rows, own] = np.inf
        b = mean_other.min(1)
        denom = np.maximum(a, b)
        val = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
        s[sl] = np.where(own_n > 1, val, 0.0)
    return float(s.mean())


def calinski_harabasz(X, labels) -> float:
    """Between/within dispersion ratio; ``inf`` when every cluster is a single point."""
    X, idx, k = _groups(X, labels)
    n = len(X)
    mean = X.mean(0)
    between = within = 0.0
    for j in range(k):
        Xj = X[idx == j]
        cj = Xj.mean(0)
        between += len(Xj) * ((cj - mean) ** 2).sum()
        within += ((Xj - cj) ** 2).sum()
    if within == 0.0:
        return float("inf")
    return float(between * (n - k) / (within * (k - 1)))


def davies_bouldin(X, labels) -> float:
    X, idx, k = _groups(X, labels)
    C = np.array([X[idx == j].mean(0) for j in range(k)])
    scatter = np.array([np.sqrt(((X[idx == j] - C[j]) ** 2).sum(1)).mean() for j in range(k)])
    M = np.sqrt(_sqdist(C, C))
    with np.errstate(divide="ignore", invalid="ignore"):
        R = (scatter[:, None] + scatter[None, :]) / M
    R[np.eye(k, dtype=bool)] = -np.inf
    R[np.isnan(R)] = np.inf
    return float(R.max(1).mean())


def internal_validation(X, labels) -> tuple[float, float, float]:
    """(silhouette, Calinski-Harabasz, Davies-Bouldin) with Euclidean distance."""
    return silhouette(X, labels), calinski_harabasz(X, labels), davies_bouldin(X, labels)
