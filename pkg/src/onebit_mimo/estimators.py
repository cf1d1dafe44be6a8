"""Nuclear-norm constrained one-bit channel estimators.

``pga_estimate`` and ``fw_estimate`` maximize the probit likelihood over the
pseudo-channel ``G = H S`` inside a nuclear-norm ball and map back with a
single multiplication by ``S^*``. ``ml_frobenius_estimate`` is the
unstructured baseline: gradient ascent directly on ``H`` inside a Frobenius
ball.
"""

import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .likelihood import log_likelihood_and_gradient
from .numerics import project_nuclear_ball, top_singular_pair
from .training import TrainingBlock

__all__ = [
    "STOPPING_RULE",
    "T_MAX",
    "STEP_UNDERFLOW",
    "EstimationError",
    "EstimatorConfig",
    "EstimateResult",
    "pga_estimate",
    "fw_estimate",
    "ml_frobenius_estimate",
    "recover_channel",
    "fw_step_size",
    "ESTIMATORS",
]

STOPPING_RULE = "stopping_rule"
T_MAX = "t_max"
STEP_UNDERFLOW = "step_underflow"


class EstimationError(RuntimeError):
    pass


@dataclass(frozen=True)
class EstimatorConfig:
    """Solver settings.

    ``eta0=None`` means ``0.1 / B`` for the schedule at hand, and
    ``frobenius_radius=None`` means ``N``.
    """

    beta: float = 20.1
    eta0: float | None = None
    t_max: int = 80
    epsilon: float = 1e-10
    frobenius_radius: float | None = None
    power_tol: float = 1e-8
    power_max_iter: int = 500
    power_seed: int = 0
    max_halvings: int = 60
    projection: str = "ball"
    fw_atom: str = "beta"

    def __post_init__(self):
        for name in ("beta", "epsilon", "power_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.eta0 is not None and not self.eta0 > 0:
            raise ValueError("eta0 must be positive")
        if self.frobenius_radius is not None and not self.frobenius_radius > 0:
            raise ValueError("frobenius_radius must be positive")
        if self.t_max < 1 or self.power_max_iter < 1:
            raise ValueError("t_max and power_max_iter must be >= 1")
        if self.fw_atom not in ("beta", "singular_value"):
            raise ValueError(f"unknown fw_atom {self.fw_atom!r}")
        if self.projection not in ("ball", "sphere"):
            raise ValueError(f"unknown projection {self.projection!r}")

    def step_size(self, B):
        return self.eta0 if self.eta0 is not None else 0.1 / B

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _mat_to_pairs(M):
    return [[[z.real, z.imag] for z in row] for row in np.asarray(M)]


@dataclass
class EstimateResult:
    G_hat: np.ndarray
    H_hat: np.ndarray
    iterations: int
    likelihood_trace: list
    converged_by: str
    step_halvings: int = 0
    algorithm: str = ""
    wall_time_s: float = 0.0
    diagnostic: str | None = None
    iterates_nuclear: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["G_hat"] = _mat_to_pairs(self.G_hat)
        d["H_hat"] = _mat_to_pairs(self.H_hat)
        d["likelihood_trace"] = [float(x) for x in self.likelihood_trace]
        return d


def recover_channel(G_hat, S):
    """Channel estimate ``G_hat S^*`` for unitary training ``S``."""
    if isinstance(S, TrainingBlock):
        S = S.S
    G_hat = np.asarray(G_hat, dtype=complex)
    if G_hat.shape[1] != S.shape[1]:
        raise ValueError(f"G_hat {G_hat.shape} does not match S {S.shape}")
    return G_hat @ S.conj().T


def fw_step_size(t):
    """Open-loop Frank-Wolfe step ``2 / (t + 2)`` for iteration ``t >= 1``."""
    return 2.0 / (t + 2.0)


def _stop(L_new, L_old, eps):
    return 0.0 < L_new - L_old < eps * abs(L_old)


def _finite(L, where):
    if not np.isfinite(L):
        raise EstimationError(f"non-finite log-likelihood {L} at {where}")


def _projected_ascent(objective, project, X0, eta, cfg, track=None):
    """Gradient ascent with projection and reject-and-halve step control.

    ``objective(X)`` returns ``(L, grad)``. A step that lowers the likelihood
    is discarded and retried with half the step size.
    """
    X = X0
    L, g = objective(X)
    _finite(L, "initial point")
    trace = [L]
    halvings = 0
    converged_by = T_MAX
    for t in range(1, cfg.t_max + 1):
        for _ in range(cfg.max_halvings + 1):
            Xn = project(X + eta * g)
            Ln, gn = objective(Xn)
            _finite(Ln, f"iteration {t}")
            if Ln >= L:
                break
            eta *= 0.5
            halvings += 1
        else:
            converged_by = STEP_UNDERFLOW
            break
        done = _stop(Ln, L, cfg.epsilon)
        X, L, g = Xn, Ln, gn
        trace.append(L)
        if track is not None:
            track(X)
        if done:
            converged_by = STOPPING_RULE
            break
    return X, trace, halvings, converged_by


def _context_pieces(ctx, S):
    if isinstance(S, TrainingBlock):
        S = S.S
    N = ctx.N
    if S.shape != (N, N):
        raise ValueError(f"training block {S.shape} does not match N={N}")
    return S, N, ctx.schedule.B


def pga_estimate(ctx, S, cfg=None, track_iterates=False):
    """Projected gradient ascent on the pseudo-channel."""
    cfg = cfg or EstimatorConfig()
    S_mat, N, B = _context_pieces(ctx, S)
    t0 = time.perf_counter()
    nuc = []

    def objective(X):
        return log_likelihood_and_gradient(X, ctx)

    def project(Z):
        return project_nuclear_ball(Z, cfg.beta, mode=cfg.projection)

    track = (lambda X: nuc.append(float(np.linalg.norm(X, "nuc")))) if track_iterates else None
    X, trace, halvings, how = _projected_ascent(
        objective, project, np.zeros((N, N), complex), cfg.step_size(B), cfg, track
    )
    return EstimateResult(
        G_hat=X,
        H_hat=recover_channel(X, S_mat),
        iterations=len(trace) - 1,
        likelihood_trace=trace,
        converged_by=how,
        step_halvings=halvings,
        algorithm="pga",
        wall_time_s=time.perf_counter() - t0,
        iterates_nuclear=nuc,
    )


def fw_estimate(ctx, S, cfg=None, track_iterates=False):
    """Frank-Wolfe over the nuclear-norm ball.

    The linear maximization step uses the top singular pair of the gradient,
    found by power iteration, so an iteration needs only matrix-vector work.
    """
    cfg = cfg or EstimatorConfig()
    S_mat, N, _ = _context_pieces(ctx, S)
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.power_seed)
    X = np.zeros((N, N), complex)
    L, g = log_likelihood_and_gradient(X, ctx)
    _finite(L, "initial point")
    trace = [L]
    nuc = []
    converged_by = T_MAX
    diagnostic = None
    for t in range(1, cfg.t_max + 1):
        if not np.any(g):
            diagnostic = f"zero gradient at iteration {t}"
            break
        u, s, v = top_singular_pair(g, cfg.power_tol, cfg.power_max_iter, rng)
        scale = cfg.beta if cfg.fw_atom == "beta" else s
        gamma = fw_step_size(t)
        # X + gamma (D - X) with D = scale * u v^*
        Xn = (1.0 - gamma) * X + (gamma * scale) * np.outer(u, v.conj())
        Ln, gn = log_likelihood_and_gradient(Xn, ctx)
        _finite(Ln, f"iteration {t}")
        done = _stop(Ln, L, cfg.epsilon)
        X, L, g = Xn, Ln, gn
        trace.append(L)
        if track_iterates:
            nuc.append(float(np.linalg.norm(X, "nuc")))
        if done:
            converged_by = STOPPING_RULE
            break
    return EstimateResult(
        G_hat=X,
        H_hat=recover_channel(X, S_mat),
        iterations=len(trace) - 1,
        likelihood_trace=trace,
        converged_by=converged_by,
        algorithm="fw",
        wall_time_s=time.perf_counter() - t0,
        diagnostic=diagnostic,
        iterates_nuclear=nuc,
    )


def ml_frobenius_estimate(ctx, S, cfg=None):
    """Baseline ML estimate of ``H`` inside the ball ``||H||_F <= radius``."""
    cfg = cfg or EstimatorConfig()
    S_mat, N, B = _context_pieces(ctx, S)
    radius = cfg.frobenius_radius if cfg.frobenius_radius is not None else float(N)
    SH = S_mat.conj().T
    t0 = time.perf_counter()

    def objective(W):
        L, g = log_likelihood_and_gradient(W @ S_mat, ctx)
        return L, g @ SH

    def project(W):
        nrm = np.linalg.norm(W)
        return W * (radius / nrm) if nrm > radius else W

    W, trace, halvings, how = _projected_ascent(
        objective, project, np.zeros((N, N), complex), cfg.step_size(B), cfg
    )
    return EstimateResult(
        G_hat=W @ S_mat,
        H_hat=W,
        iterations=len(trace) - 1,
        likelihood_trace=trace,
        converged_by=how,
        step_halvings=halvings,
        algorithm="mlfro",
        wall_time_s=time.perf_counter() - t0,
    )


ESTIMATORS = {
    "pga": pga_estimate,
    "fw": fw_estimate,
    "mlfro": ml_frobenius_estimate,
}
