"""Fine multifractal spectra by the Legendre route and the variational route.

The temperature function beta(q) solves sum_i (prod_m p_{m,i}^{q_m}) r_i^beta = 1;
its negated gradient parameterizes the attainable level values alpha, and the
spectrum is the Legendre transform in the inf(<alpha,q> + beta(q)) convention.
The variational route maximizes entropy functionals over explicit measure
families and is kept algorithmically independent so the two routes can
cross-validate each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.optimize import linprog

from .errors import DepthUnsupported, InfeasibleConstraint, ValidationError
from .logsum import NEG_INF, logsumexp
from .model import (
    LevelMap,
    MarkovWeights,
    ModelSpec,
    PotentialTable,
    ProductMeasureWeights,
    TargetBox,
    entropy,
    integrate,
    level_map,
)

DEFAULT_Q_CAP = 60.0


@dataclass(frozen=True)
class BetaPoint:
    """A point on the temperature function: q, beta(q), alpha = -grad beta."""

    q: np.ndarray
    beta: float
    alpha: np.ndarray
    gibbs_weights: ProductMeasureWeights


@dataclass(frozen=True)
class LegendreResult:
    """Value of the spectrum at one alpha, with the minimizing q.

    ``boundary`` marks alpha on the edge of the attainable set, where the
    infimum is a limit and f is evaluated at the q-cap; unattainable alpha
    gives f = -inf and a nan q.
    """

    f: float
    q_star: np.ndarray
    boundary: bool = False


@dataclass(frozen=True)
class SpectrumCurve:
    """Sampled (alpha, f(alpha)) pairs with the per-point minimizing q."""

    alphas: np.ndarray
    f: np.ndarray
    q_at_min: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SupResult:
    value: float
    argmax: np.ndarray


@dataclass(frozen=True)
class VariationalResult:
    value: float
    weights: Union[ProductMeasureWeights, MarkovWeights]
    constraint_gap: float


def _as_q(spec: ModelSpec, q) -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.size != spec.M:
        raise ValidationError(f"q must have {spec.M} component(s)")
    return q


def beta(spec: ModelSpec, q, tol: float = 1e-12) -> BetaPoint:
    """Solve sum_i (prod_m p_{m,i}^{q_m}) r_i^b = 1 for b by bisection.

    The left side is strictly decreasing in b because every r_i < 1, so the
    root exists and is unique for every q.
    """
    q = _as_q(spec, q)
    lp = spec.log_measures  # (M, N)
    lr = spec.log_ratios  # (N,)
    base = q @ lp  # (N,)

    def g(b: float) -> float:
        return logsumexp(base + b * lr)

    lo, hi = -1.0, 1.0
    while g(lo) < 0.0:
        lo *= 2.0
    while g(hi) > 0.0:
        hi *= 2.0
    for _ in range(200):
        if hi - lo < 1e-15:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    if abs(g(b)) > max(tol, 1e-11):
        raise ValidationError("beta bisection failed to reach tolerance")
    w = np.exp(base + b * lr)
    w = w / w.sum()
    alpha = (w @ lp.T) / (w @ lr)
    return BetaPoint(q, b, alpha, ProductMeasureWeights(w))


def beta_gradient(spec: ModelSpec, bp: BetaPoint) -> np.ndarray:
    """alpha(q) = -grad beta(q) from the Gibbs weights of the point.

    With weights w_i proportional to (prod_m p_{m,i}^{q_m}) r_i^beta this is
    (sum_i w_i log p_{m,i}) / (sum_i w_i log r_i), a ratio of two negative
    numbers, hence positive.
    """
    w = bp.gibbs_weights.w
    return (w @ spec.log_measures.T) / (w @ spec.log_ratios)


def _newton_jacobian(spec: ModelSpec, q: np.ndarray, bp: BetaPoint) -> np.ndarray:
    """d alpha / d q at a solved beta point (implicit function theorem)."""
    lp = spec.log_measures
    lr = spec.log_ratios
    u = bp.gibbs_weights.w
    A = lp @ u  # (M,)
    B = float(lr @ u)
    dbeta = -A / B  # partial beta / partial q_l
    M = spec.M
    J = np.empty((M, M))
    for l in range(M):
        du = u * (lp[l] + lr * dbeta[l])  # d u_i / d q_l (unnormalized G terms)
        dA = lp @ du
        dB = float(lr @ du)
        J[:, l] = (dA * B - A * dB) / B**2
    return J


def attainable_hull_contains(
    spec: ModelSpec, alpha, tol: float = 1e-9
) -> bool:
    """Membership of alpha in the closed attainable level-value set.

    The attainable set of a depth-1 level map is the convex hull of the
    per-symbol ratio points (log p_{m,i} / log r_i)_m.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    pts = LevelMap.from_spec(spec).symbol_ratios()  # (N, M)
    if spec.M == 1:
        v = pts[:, 0]
        return bool(v.min() - tol <= alpha[0] <= v.max() + tol)
    N = pts.shape[0]
    # theta >= 0, sum theta = 1, sum theta v_i = alpha (within tol via bounds)
    A_eq = np.vstack([pts.T, np.ones((1, N))])
    b_eq = np.concatenate([alpha, [1.0]])
    res = linprog(
        c=np.zeros(N),
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(0.0, 1.0)] * N,
        method="highs",
    )
    if res.success:
        return True
    # retry with a tol-relaxed box around alpha
    A_ub = np.vstack([pts.T, -pts.T])
    b_ub = np.concatenate([alpha + tol, -(alpha - tol)])
    res = linprog(
        c=np.zeros(N),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=np.ones((1, N)),
        b_eq=[1.0],
        bounds=[(0.0, 1.0)] * N,
        method="highs",
    )
    return bool(res.success)


def _legendre_scalar(
    spec: ModelSpec, a: float, tol: float, q_cap: float
) -> LegendreResult:
    v = LevelMap.from_spec(spec).symbol_ratios()[:, 0]
    if not (v.min() - 1e-12 <= a <= v.max() + 1e-12):
        return LegendreResult(NEG_INF, np.array([np.nan]))

    def alpha_of(q: float) -> float:
        return float(beta(spec, q).alpha[0])

    # alpha(q) is strictly decreasing; expand a bracket with
    # alpha(hi) <= a <= alpha(lo), stopping at the q-cap.
    lo, hi = -1.0, 1.0
    while alpha_of(lo) < a:
        lo *= 2.0
        if lo < -q_cap:
            bp = beta(spec, -q_cap)
            f = a * (-q_cap) + bp.beta
            return LegendreResult(f, np.array([-q_cap]), boundary=True)
    while alpha_of(hi) > a:
        hi *= 2.0
        if hi > q_cap:
            bp = beta(spec, q_cap)
            f = a * q_cap + bp.beta
            return LegendreResult(f, np.array([q_cap]), boundary=True)
    for _ in range(200):
        if hi - lo < max(tol * 1e-2, 1e-13):
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if alpha_of(mid) > a:
            lo = mid
        else:
            hi = mid
    q_star = 0.5 * (lo + hi)
    bp = beta(spec, q_star)
    return LegendreResult(a * q_star + bp.beta, np.array([q_star]))


def _legendre_newton(
    spec: ModelSpec, alpha: np.ndarray, tol: float, q_cap: float
) -> LegendreResult:
    if not attainable_hull_contains(spec, alpha, tol=1e-12):
        return LegendreResult(NEG_INF, np.full(spec.M, np.nan))
    q = np.zeros(spec.M)
    bp = beta(spec, q)
    for _ in range(200):
        h = bp.alpha - alpha
        err = float(np.max(np.abs(h)))
        if err <= max(tol, 1e-12):
            break
        J = _newton_jacobian(spec, q, bp)
        try:
            dq = np.linalg.solve(J, -h)
        except np.linalg.LinAlgError:
            dq = -h * 10.0
        # damped update: keep the residual decreasing
        step = 1.0
        for _ in range(40):
            q_new = q + step * dq
            bp_new = beta(spec, q_new)
            if float(np.max(np.abs(bp_new.alpha - alpha))) < err:
                break
            step *= 0.5
        q, bp = q_new, bp_new
        if float(np.max(np.abs(q))) > q_cap:
            q = np.clip(q, -q_cap, q_cap)
            bp = beta(spec, q)
            f = float(alpha @ q + bp.beta)
            return LegendreResult(f, q, boundary=True)
    return LegendreResult(float(alpha @ q + bp.beta), q)


def legendre(
    spec: ModelSpec,
    alpha,
    tol: float = 1e-10,
    q_cap: float = DEFAULT_Q_CAP,
) -> LegendreResult:
    """Spectrum value inf_q (<alpha, q> + beta(q)) at one alpha.

    Scalar alpha uses bisection on the monotone tangency condition
    -beta'(q) = alpha; vector alpha uses damped Newton on the gradient.
    Unattainable alpha returns -inf; attainable-boundary alpha returns the
    limiting value at the q-cap with the boundary flag set.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if alpha.size != spec.M:
        raise ValidationError(f"alpha must have {spec.M} component(s)")
    if np.any(alpha <= 0):
        raise ValidationError("alpha must be positive componentwise")
    if spec.M == 1:
        return _legendre_scalar(spec, float(alpha[0]), tol, q_cap)
    return _legendre_newton(spec, alpha, tol, q_cap)


def spectrum_sweep(spec: ModelSpec, alpha_grid) -> SpectrumCurve:
    """Legendre spectrum on a grid of alphas (unattainable points keep -inf)."""
    alphas = np.atleast_2d(np.asarray(alpha_grid, dtype=float))
    if alphas.shape[0] == 1 and alphas.shape[1] != spec.M:
        alphas = alphas.reshape(-1, spec.M)
    if alphas.shape[1] != spec.M:
        raise ValidationError("alpha grid has wrong dimension")
    f = np.empty(alphas.shape[0])
    q_at = np.empty_like(alphas)
    for i, a in enumerate(alphas):
        res = legendre(spec, a)
        f[i] = res.f
        q_at[i] = res.q_star
    return SpectrumCurve(
        alphas=alphas,
        f=f,
        q_at_min=q_at,
        meta={"method": "legendre", "label": spec.label, "osc_assumed": True},
    )


def sup_spectrum(spec: ModelSpec, C: TargetBox) -> SupResult:
    """Maximum of the concave spectrum over a target box.

    The unconstrained peak sits at alpha(0) with value the similarity
    dimension; when the box misses it, the maximizer lies on the box
    boundary and is located through the monotone parameterization by q.
    """
    if C.dim != spec.M:
        raise ValidationError("target box dimension must match spec.M")
    bp0 = beta(spec, np.zeros(spec.M))
    if C.contains_point(bp0.alpha):
        return SupResult(bp0.beta, bp0.alpha.copy())
    if spec.M == 1:
        v = LevelMap.from_spec(spec).symbol_ratios()[:, 0]
        lo = max(float(C.lo[0]), float(v.min()))
        hi = min(float(C.hi[0]), float(v.max()))
        if lo > hi:
            return SupResult(NEG_INF, np.array([np.nan]))
        a_star = min(max(float(bp0.alpha[0]), lo), hi)
        res = legendre(spec, a_star)
        return SupResult(res.f, np.array([a_star]))
    return _sup_spectrum_ascent(spec, C, bp0)


def _sup_spectrum_ascent(
    spec: ModelSpec, C: TargetBox, bp0: BetaPoint
) -> SupResult:
    # projected supergradient ascent on the concave Legendre transform;
    # the minimizing q at alpha is a supergradient there.
    a = np.clip(bp0.alpha, C.lo, C.hi)
    res = legendre(spec, a)
    if res.f == NEG_INF:
        a0 = _feasible_box_point(spec, C)
        if a0 is None:
            return SupResult(NEG_INF, np.full(spec.M, np.nan))
        a = a0
        res = legendre(spec, a)
    best_a, best_f = a.copy(), res.f
    step = 0.5
    for k in range(1, 301):
        g = res.q_star
        if np.any(~np.isfinite(g)):
            break
        trial = np.clip(a + step / math.sqrt(k) * g, C.lo, C.hi)
        tr = legendre(spec, trial)
        if tr.f == NEG_INF:
            step *= 0.5
            if step < 1e-12:
                break
            continue
        a, res = trial, tr
        if tr.f > best_f:
            best_f, best_a = tr.f, trial.copy()
        if float(np.max(np.abs(g))) * step / math.sqrt(k) < 1e-12:
            break
    return SupResult(best_f, best_a)


def _feasible_box_point(spec: ModelSpec, C: TargetBox):
    """Any attainable level point inside the box, or None."""
    pts = LevelMap.from_spec(spec).symbol_ratios()
    N = pts.shape[0]
    A_ub = np.vstack([pts.T, -pts.T])
    b_ub = np.concatenate([C.hi, -C.lo])
    res = linprog(
        c=np.zeros(N),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=np.ones((1, N)),
        b_eq=[1.0],
        bounds=[(0.0, 1.0)] * N,
        method="highs",
    )
    if not res.success:
        return None
    return pts.T @ res.x


# ---------------------------------------------------------------------------
# Variational route: explicit optimization over Bernoulli or memory-1 Markov
# measures, independent of the Legendre machinery above.


def _simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, u.size + 1) > 0)[0][-1]
    lam = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def _simplex_grid(N: int, step: float, rng: np.random.Generator):
    """Dense simplex grid for N <= 3, seeded random cover otherwise."""
    k = int(round(1.0 / step))
    if N == 2:
        t = np.arange(k + 1) / k
        return np.stack([t, 1.0 - t], axis=1)
    if N == 3:
        pts = []
        for i in range(k + 1):
            for j in range(k + 1 - i):
                pts.append((i / k, j / k, (k - i - j) / k))
        return np.array(pts)
    pts = rng.dirichlet(np.ones(N), size=20000)
    pts = np.vstack([pts, np.eye(N), np.full((1, N), 1.0 / N)])
    return pts


def _box_gap_sq(u: np.ndarray, C: TargetBox) -> float:
    gap = np.maximum(np.maximum(C.lo - u, u - C.hi), 0.0)
    return float(np.sum(gap * gap))


class _Problem:
    """Shared state for the constrained measure-family optimizers.

    The constraint is either the level value (default) or the integral of
    ``constraint_phi`` when one is given (Birkhoff-average constraints).
    """

    def __init__(self, spec, C, phi, objective, level, constraint_phi):
        self.spec = spec
        self.C = C
        self.phi = phi
        self.objective = objective
        self.level = level if level is not None else LevelMap.from_spec(spec)
        self.constraint_phi = constraint_phi

    def constraint_value(self, x):
        mu = self.measure(x)
        if self.constraint_phi is not None:
            return np.array([integrate(mu, self.constraint_phi)])
        return level_map(mu, self.level)

    def objective_value(self, x):
        mu = self.measure(x)
        if self.objective == "dimension":
            return -entropy(mu) / integrate(mu, self.level.lam)
        return entropy(mu) + integrate(mu, self.phi)

    def constraint_lipschitz(self):
        if self.constraint_phi is not None:
            v = self.constraint_phi.values
            return float(v.max() - v.min()) * self.spec.N
        lev = self.level
        lam_abs = np.abs(lev.lam.values)
        lam_min = float(lam_abs.min())
        u_max = max(
            float(np.max(np.abs(p.values))) / lam_min for p in lev.phis
        )
        p_max = max(float(np.max(np.abs(p.values))) for p in lev.phis)
        return (p_max + u_max * float(lam_abs.max())) / lam_min * self.spec.N


class _BernoulliProblem(_Problem):
    def measure(self, w):
        # finite-difference probes sit slightly off the simplex
        w = np.clip(np.asarray(w, dtype=float), 0.0, None)
        return ProductMeasureWeights(w / w.sum())

    def project(self, w):
        return _simplex_project(w)

    def seeds(self, rng, grid_step):
        return _simplex_grid(self.spec.N, grid_step, rng)

    def _face_gradients(self):
        """Hyperplane normals g_m(c): face g . w = c is affine in w."""
        if self.constraint_phi is not None:
            if self.constraint_phi.depth != 1:
                return None
            return [(self.constraint_phi.values, True)]
        if not self.level.is_depth1():
            return None
        P, lam = self.level.depth1_vectors()
        return [(P[m], lam) for m in range(self.C.dim)]

    def snap(self, w):
        """Exact affine correction onto the nearest violated box face.

        Both constraint kinds are affine-representable in w: the observable
        average w . f directly, and the level ratio after clearing its
        sign-definite denominator.
        """
        faces = self._face_gradients()
        if faces is None:
            return None
        u = self.constraint_value(w)
        w2 = np.asarray(w, dtype=float).copy()
        changed = False
        for m in range(u.size):
            c = None
            if u[m] < self.C.lo[m]:
                c = float(self.C.lo[m])
            elif u[m] > self.C.hi[m]:
                c = float(self.C.hi[m])
            if c is None:
                continue
            grad, lam = faces[m]
            if lam is True:
                g, offset = grad, c  # face: g . w = c
            else:
                g, offset = grad - c * lam, 0.0  # face: (phi - c lam) . w = 0
            g_t = g - g.mean()
            denom = float(g_t @ g_t)
            if denom <= 0:
                return None
            w2 = w2 - ((float(g @ w2) - offset) / denom) * g_t
            changed = True
        if not changed:
            return None
        return self.project(w2)


class _MarkovProblem(_Problem):
    def measure(self, theta):
        N = self.spec.N
        P = np.clip(theta.reshape(N, N).astype(float), 0.0, None)
        return MarkovWeights(P / P.sum(axis=1, keepdims=True))

    def project(self, theta):
        N = self.spec.N
        P = theta.reshape(N, N)
        return np.stack([_simplex_project(row) for row in P]).ravel()

    def seeds(self, rng, grid_step):
        N = self.spec.N
        seeds = [np.full((N, N), 1.0 / N)]
        off = (np.ones((N, N)) - np.eye(N)) / max(N - 1, 1)
        seeds.append(off)
        for _ in range(200):
            seeds.append(rng.dirichlet(np.ones(N), size=N))
        return np.stack([s.ravel() for s in seeds])

    def snap(self, theta):
        """Zero out near-vanishing transitions (face snapping)."""
        N = self.spec.N
        P = theta.reshape(N, N).copy()
        small = P < 1e-4
        if not small.any() or small.all(axis=1).any():
            return None
        P[small] = 0.0
        P = P / P.sum(axis=1, keepdims=True)
        return P.ravel()


def _numeric_gradient(fn, x, h=1e-7):
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fn(xp) - fn(xm)) / (2 * h)
    return g


def _active_faces(problem, x, tol=1e-7):
    """Affine rows (A, b) of the simplex plane plus touched box faces."""
    faces = getattr(problem, "_face_gradients", lambda: None)()
    if faces is None:
        return None
    u = problem.constraint_value(x)
    rows = [np.ones_like(np.asarray(x, dtype=float))]
    rhs = [1.0]
    for m in range(u.size):
        for c in (float(problem.C.lo[m]), float(problem.C.hi[m])):
            if abs(u[m] - c) <= tol:
                grad, lam = faces[m]
                if lam is True:
                    rows.append(np.asarray(grad, dtype=float))
                    rhs.append(c)
                else:
                    rows.append(np.asarray(grad - c * lam, dtype=float))
                    rhs.append(0.0)
                break
    if len(rows) == 1:
        return None
    return np.vstack(rows), np.array(rhs)


def _face_polish(problem, x, iters=200):
    """Ascent restricted to the active affine faces of the box constraint.

    The penalty polish is stiff across a face, so a maximizer sitting on
    the constraint boundary is refined by projecting gradients onto the
    face tangent space and re-snapping each accepted step.
    """
    active = _active_faces(problem, x)
    if active is None:
        return None
    A, b = active
    AAt = A @ A.T

    def onto_face(y):
        correction, *_ = np.linalg.lstsq(AAt, A @ y - b, rcond=None)
        y = y - A.T @ correction
        return np.clip(y, 0.0, None)

    x = onto_face(np.asarray(x, dtype=float).copy())
    f_cur = problem.objective_value(x)
    step = 0.05
    for _ in range(iters):
        g = _numeric_gradient(problem.objective_value, x)
        coeff, *_ = np.linalg.lstsq(AAt, A @ g, rcond=None)
        d = g - A.T @ coeff
        moved = False
        while step >= 1e-14:
            x_new = onto_face(x + step * d)
            f_new = problem.objective_value(x_new)
            if f_new > f_cur + 1e-16:
                x, f_cur = x_new, f_new
                moved = True
                step *= 1.5
                break
            step *= 0.5
        if not moved or step * float(np.max(np.abs(d))) < 1e-13:
            break
    return x


def _polish(problem, x0, tol):
    """Projected-gradient ascent with an increasing box-violation penalty."""
    x = problem.project(np.asarray(x0, dtype=float).copy())
    for rho in (1e3, 1e5, 1e7):

        def penalized(y):
            return problem.objective_value(y) - rho * _box_gap_sq(
                problem.constraint_value(y), problem.C
            )

        step = 0.1
        f_cur = penalized(x)
        for _ in range(250):
            g = _numeric_gradient(penalized, x)
            moved = False
            while step >= 1e-12:
                x_new = problem.project(x + step * g)
                f_new = penalized(x_new)
                if f_new > f_cur + 1e-15:
                    x, f_cur = x_new, f_new
                    moved = True
                    step *= 1.6
                    break
                step *= 0.5
            if not moved:
                break
            if step * float(np.max(np.abs(g))) < tol * 1e-3:
                break
    return x


def _best_candidate(problem, candidates, feas_tol=1e-8):
    best = None
    for x in candidates:
        gap = math.sqrt(_box_gap_sq(problem.constraint_value(x), problem.C))
        val = problem.objective_value(x)
        key = (gap <= feas_tol, -gap, val)
        if best is None or key > best[0]:
            best = (key, x, val, gap)
    _, x, val, gap = best
    return x, val, gap


def _variational_optimize(problem, grid_step, tol, seed):
    rng = np.random.default_rng(seed)
    seeds = problem.seeds(rng, grid_step)
    vals = np.array([problem.objective_value(s) for s in seeds])
    gaps = np.array(
        [math.sqrt(_box_gap_sq(problem.constraint_value(s), problem.C)) for s in seeds]
    )
    slack = grid_step * problem.constraint_lipschitz()
    feasible = gaps <= slack
    if not feasible.any():
        raise InfeasibleConstraint(
            "no seed satisfies the target constraint within the grid slack"
        )
    order = np.argsort(np.where(feasible, vals, -np.inf))[::-1]
    starts = [seeds[i] for i in order[:3]]
    starts.append(seeds[int(np.argmin(gaps))])
    candidates = []
    for s in starts:
        x = _polish(problem, s, tol)
        candidates.append(x)
        snapped = problem.snap(x)
        if snapped is not None:
            candidates.append(snapped)
    x, val, gap = _best_candidate(problem, candidates)
    if gap <= 1e-8:
        refined = _face_polish(problem, x)
        if refined is not None:
            x, val, gap = _best_candidate(problem, candidates + [refined])
    return x, val, gap


def variational_solve(
    spec: ModelSpec,
    C: TargetBox,
    phi: Optional[PotentialTable] = None,
    family: str = "bernoulli",
    objective: str = "pressure",
    grid_step: float = 1e-2,
    tol: float = 1e-6,
    seed: int = 0,
    level: Optional[LevelMap] = None,
    constraint_phi: Optional[PotentialTable] = None,
) -> VariationalResult:
    """Constrained maximization of h + int(phi) (or -h / int(Lambda)) over a
    measure family.

    The constraint keeps the level value in C, or the integral of
    ``constraint_phi`` in C when one is given.  Dense grid seeding followed
    by penalized projected-gradient polish; kept deliberately independent of
    the Legendre machinery so route agreement is a real cross-check.
    """
    if objective not in ("pressure", "dimension"):
        raise ValidationError("objective must be 'pressure' or 'dimension'")
    if objective == "pressure" and phi is None:
        raise ValidationError("pressure objective needs a potential")
    if family == "bernoulli":
        problem = _BernoulliProblem(spec, C, phi, objective, level, constraint_phi)
    elif family == "markov1":
        for table in (phi, constraint_phi):
            if table is not None and table.depth > 2:
                raise DepthUnsupported("markov1 family integrates depth <= 2")
        problem = _MarkovProblem(spec, C, phi, objective, level, constraint_phi)
    else:
        raise ValidationError("family must be 'bernoulli' or 'markov1'")
    x, val, gap = _variational_optimize(problem, grid_step, tol, seed)
    return VariationalResult(val, problem.measure(x), gap)
