"""Tri-factor feature-weight learning by multiplicative updates.

Minimizes

    ||U V W - T||_F^2 + alpha ||X - U V||_F^2
        + beta Tr(W L Wt) + gamma ||W||_{2,1}

over nonnegative U (n x k), V (k x d), W (d x q), where L = A - Z' is the
label-affinity Laplacian and the l2,1 term is relaxed to Tr(Wt Q W) with
Q_ii = 1 / (2 sqrt(||W_i.||^2 + epsilon)). Each sweep recomputes Q, then
updates U, V, W in that order, each against the latest values of the
others. Denominators are floored at a small positive value.

Two W-update rules are available. corrected-split (default) uses the
standard nonnegative split of the Laplacian gradient,

    W <- W * (Vt Ut T + beta W Z') / (Vt Ut U V W + beta W A + gamma Q W),

which keeps the sweep monotone; paper-faithful keeps the denominator
coupling as beta W with no affinity term in the numerator,

    W <- W * (Vt Ut T) / (Vt Ut U V W + beta W + gamma Q W).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, NumericError
from .infotheory import as_affinity

UPDATE_MODES = ("corrected-split", "paper-faithful")


@dataclass
class FactorState:
    """The optimizer triple: cluster, cluster-weight, and feature-weight matrices."""

    U: np.ndarray
    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=np.float64)
        self.V = np.asarray(self.V, dtype=np.float64)
        self.W = np.asarray(self.W, dtype=np.float64)
        for name, M in (("U", self.U), ("V", self.V), ("W", self.W)):
            if M.ndim != 2:
                raise ContractError(f"{name} must be 2-D, got shape {M.shape}")
            if not np.all(np.isfinite(M)) or np.any(M < 0):
                raise ContractError(f"{name} must be nonnegative and finite")
        n, k = self.U.shape
        if self.V.shape[0] != k or self.W.shape[0] != self.V.shape[1]:
            raise ContractError(
                f"inconsistent factor shapes U{self.U.shape} V{self.V.shape} W{self.W.shape}"
            )


@dataclass
class HyperParams:
    """Regularization weights and solver knobs.

    alpha weighs the feature-reconstruction term, beta the Laplacian term,
    gamma the row-sparsity term; k is the latent dimension (must satisfy
    k <= min(n, d), checked where the data is known).
    """

    k: int
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    max_iters: int = 500
    tol: float = 1e-6
    epsilon: float = 1e-8
    denom_floor: float = 1e-12
    update_mode: str = "corrected-split"

    def __post_init__(self):
        if self.k < 1:
            raise ContractError(f"k must be >= 1, got {self.k}")
        if self.alpha <= 0:
            raise ContractError(f"alpha must be > 0, got {self.alpha}")
        if self.beta < 0 or self.gamma < 0:
            raise ContractError("beta and gamma must be >= 0")
        if self.max_iters < 0:
            raise ContractError(f"max_iters must be >= 0, got {self.max_iters}")
        for name in ("tol", "epsilon", "denom_floor"):
            if getattr(self, name) <= 0:
                raise ContractError(f"{name} must be > 0")
        if self.update_mode not in UPDATE_MODES:
            raise ContractError(f"unknown update mode {self.update_mode!r}")


def default_latent_k(n: int, d: int) -> int:
    return max(1, round(min(n, d) / 4))


@dataclass
class LaplacianPair:
    """L = A - Z' with A the diagonal degree matrix of the affinity Z'."""

    L: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        self.L = np.asarray(self.L, dtype=np.float64)
        self.A = np.asarray(self.A, dtype=np.float64)
        q = self.L.shape[0]
        if self.L.shape != (q, q) or self.A.shape != (q, q):
            raise ContractError("L and A must be square and equally sized")
        if np.any(self.A != np.diag(np.diag(self.A))) or np.any(np.diag(self.A) < 0):
            raise ContractError("A must be diagonal and nonnegative")
        if not np.array_equal(self.L, self.L.T):
            raise ContractError("L must be symmetric")
        if np.max(np.abs(self.L.sum(axis=1))) > 1e-10:
            raise ContractError("Laplacian row sums must vanish")

    @property
    def affinity(self) -> np.ndarray:
        return self.A - self.L


def build_laplacian(Zp) -> LaplacianPair:
    """Degree diagonal and graph Laplacian of a symmetric affinity."""
    Zv = as_affinity(Zp)
    if not np.allclose(Zv, Zv.T, rtol=0, atol=0):
        raise ContractError("affinity must be symmetric")
    if np.any(Zv < 0):
        raise ContractError("affinity must be nonnegative")
    A = np.diag(Zv.sum(axis=1))
    return LaplacianPair(L=A - Zv, A=A)


def init_factors(n: int, d: int, q: int, k: int, seed: int) -> FactorState:
    """Strictly positive uniform(0.01, 1.01) factors; U, V, W drawn in order."""
    if not 1 <= k <= min(n, d):
        raise ContractError(f"need 1 <= k <= min(n, d) = {min(n, d)}, got k={k}")
    rng = np.random.default_rng(seed)
    return FactorState(
        U=rng.uniform(0.01, 1.01, (n, k)),
        V=rng.uniform(0.01, 1.01, (k, d)),
        W=rng.uniform(0.01, 1.01, (d, q)),
    )


def _q_diag(W: np.ndarray, epsilon: float) -> np.ndarray:
    return 1.0 / (2.0 * np.sqrt(np.einsum("ij,ij->i", W, W) + epsilon))


def compute_q(W, epsilon: float) -> np.ndarray:
    """Diagonal IRLS matrix of the relaxed l2,1 term: Q_ii = 1/(2 sqrt(||W_i.||^2 + eps))."""
    if epsilon <= 0:
        raise ContractError(f"epsilon must be > 0, got {epsilon}")
    W = np.asarray(W, dtype=np.float64)
    return np.diag(_q_diag(W, epsilon))


def objective_terms(
    state: FactorState, X, T, lap: LaplacianPair, hp: HyperParams, exact_l21: bool = False
) -> tuple[float, float, float, float]:
    """The four weighted objective terms, Q recomputed from the current W.

    With exact_l21 the last term reports gamma * ||W||_{2,1} instead of the
    relaxed gamma * Tr(Wt Q W); use it for monitoring only.
    """
    U, V, W = state.U, state.V, state.W
    for name, M in (("U", U), ("V", V), ("W", W)):
        if np.isnan(M).any():
            raise NumericError(f"factor {name} contains NaN")
    X = np.asarray(X, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    fit_res = U @ V @ W - T
    recon_res = X - U @ V
    t1 = float(np.sum(fit_res * fit_res))
    t2 = hp.alpha * float(np.sum(recon_res * recon_res))
    t3 = hp.beta * float(np.sum((W @ lap.L) * W))
    if exact_l21:
        t4 = hp.gamma * float(np.sum(np.sqrt(np.einsum("ij,ij->i", W, W))))
    else:
        t4 = hp.gamma * float(np.sum(_q_diag(W, hp.epsilon) * np.einsum("ij,ij->i", W, W)))
    return t1, t2, t3, t4


def objective(state: FactorState, X, T, lap: LaplacianPair, hp: HyperParams, exact_l21: bool = False) -> float:
    return sum(objective_terms(state, X, T, lap, hp, exact_l21=exact_l21))


def _guard(name: str, M: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(M)):
        raise NumericError(f"{name} update produced non-finite values")
    return M


def step(state: FactorState, X, T, lap: LaplacianPair, hp: HyperParams) -> FactorState:
    """One multiplicative sweep: Q from the incoming W, then U, V, W."""
    X = np.asarray(X, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    U, V, W = state.U, state.V, state.W
    alpha, beta, gamma = hp.alpha, hp.beta, hp.gamma
    floor = hp.denom_floor
    qdiag = _q_diag(W, hp.epsilon)
    A = lap.A
    Zp = lap.affinity

    VW = V @ W
    num = T @ VW.T + alpha * (X @ V.T)
    den = U @ (VW @ VW.T) + alpha * (U @ (V @ V.T))
    U = _guard("U", U * num / np.maximum(den, floor))

    UtU = U.T @ U
    num = U.T @ (T @ W.T) + alpha * (U.T @ X)
    den = UtU @ V @ (W @ W.T) + alpha * (UtU @ V)
    V = _guard("V", V * num / np.maximum(den, floor))

    UtU = U.T @ U
    core = V.T @ UtU @ V
    if hp.update_mode == "corrected-split":
        num = V.T @ (U.T @ T) + beta * (W @ Zp)
        den = core @ W + beta * (W @ A) + gamma * (qdiag[:, None] * W)
    else:
        num = V.T @ (U.T @ T)
        den = core @ W + beta * W + gamma * (qdiag[:, None] * W)
    W = _guard("W", W * num / np.maximum(den, floor))

    return FactorState(U=U, V=V, W=W)


@dataclass
class FitResult:
    """Final factors plus the objective trace (theta and its four terms)."""

    state: FactorState
    theta: np.ndarray
    terms: np.ndarray
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.theta) - 1


def fit(X, T, Zp, hp: HyperParams, seed: int) -> FitResult:
    """Run multiplicative sweeps from a seeded positive initialization.

    Stops when the relative objective change drops below hp.tol or after
    hp.max_iters sweeps. The trace includes the objective at
    initialization, so max_iters=0 returns the untouched initial factors.
    """
    X = np.asarray(X, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if X.ndim != 2 or T.ndim != 2 or X.shape[0] != T.shape[0]:
        raise ContractError(f"X {X.shape} and T {T.shape} must share the sample dimension")
    if np.any(X < 0) or np.any(T < 0):
        raise ContractError("X and T must be nonnegative for multiplicative updates")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(T))):
        raise ContractError("X and T must be finite")
    n, d = X.shape
    q = T.shape[1]
    Zv = as_affinity(Zp)
    if Zv.shape != (q, q):
        raise ContractError(f"affinity shape {Zv.shape} does not match q={q}")
    if hp.k > min(n, d):
        raise ContractError(f"k={hp.k} exceeds min(n, d) = {min(n, d)}")

    lap = build_laplacian(Zv)
    state = init_factors(n, d, q, hp.k, seed)
    terms = [objective_terms(state, X, T, lap, hp)]
    thetas = [sum(terms[0])]
    converged = False
    for it in range(1, hp.max_iters + 1):
        try:
            state = step(state, X, T, lap, hp)
            current = objective_terms(state, X, T, lap, hp)
        except NumericError as e:
            raise NumericError(f"iteration {it}: {e}", trace=np.asarray(thetas)) from e
        theta = sum(current)
        if not np.isfinite(theta):
            raise NumericError(
                f"iteration {it}: objective became non-finite", trace=np.asarray(thetas)
            )
        terms.append(current)
        thetas.append(theta)
        if abs(thetas[-1] - thetas[-2]) / max(thetas[-2], 1e-12) < hp.tol:
            converged = True
            break
    return FitResult(
        state=state,
        theta=np.asarray(thetas),
        terms=np.asarray(terms),
        converged=converged,
    )


def save_trace(result: FitResult, path) -> Path:
    """Objective trace as CSV: iteration, theta, term1..term4."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "theta", "term1", "term2", "term3", "term4"])
        for it, (theta, row) in enumerate(zip(result.theta, result.terms)):
            writer.writerow([it, repr(float(theta))] + [repr(float(v)) for v in row])
    return path
