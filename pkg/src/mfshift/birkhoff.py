"""Multifractal analysis of ergodic Birkhoff averages.

Observables are cylinder tables with an explicit Lipschitz constant for the
gamma-adic metric (distance gamma^j between sequences first differing after
j symbols).  The zeta route restricts cylinder sums to words whose periodic
Birkhoff average of the observable lands in a target interval; the
variational route maximizes -h / int(Lambda) over measures with matching
observable average.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ScheduleTooShort, ValidationError
from .logsum import LogAccumulator, logsumexp
from .mfzeta import (
    ShrinkingResult,
    _extrapolate_roots,
    _profile_entry,
    _solve_refined,
    default_radius_schedule,
)
from .model import ModelSpec, PotentialTable, TargetBox
from .spectrum import VariationalResult, variational_solve
from .symbolic import (
    DEFAULT_BUDGET,
    composition_arrays,
    periodic_tail_index,
    tail_sum_matrix,
    word_blocks,
)


@dataclass(frozen=True)
class ObservableTable:
    """A Lipschitz observable stored on depth-k cylinders.

    ``lip_bound`` defaults to the exact Lipschitz constant of the table
    with respect to the gamma-adic metric, max_j osc_j / gamma^j over
    prefix lengths j < depth.  A general Lipschitz function projected onto
    depth-k cylinders carries projection error at most lip_bound * gamma^k,
    which the caller owns.
    """

    f: PotentialTable
    gamma: float = 0.5
    lip_bound: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ValidationError("gamma must be in (0,1)")
        osc = self.f.oscillations()
        exact = float(
            np.max(osc / self.gamma ** np.arange(self.f.depth))
        )
        if self.lip_bound is None:
            object.__setattr__(self, "lip_bound", exact)
        elif self.lip_bound < exact - 1e-12:
            raise ValidationError(
                f"lip_bound {self.lip_bound} below table's exact constant {exact}"
            )

    @property
    def depth(self) -> int:
        return self.f.depth


def _check_interval(C: TargetBox) -> TargetBox:
    if C.dim != 1:
        raise ValidationError("Birkhoff targets are intervals in R")
    return C


def _periodic_averages(obs: ObservableTable, words: np.ndarray, n: int, budget: int):
    mat = tail_sum_matrix(obs.f, words, budget)
    t_per = periodic_tail_index(words, obs.f.depth, obs.f.N)
    return mat[np.arange(words.shape[0]), t_per] / n


def erg_constrained_coefficient(
    spec: ModelSpec,
    obs: ObservableTable,
    C: TargetBox,
    phi: PotentialTable,
    n: int,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """log cylinder sum over words whose periodic average of f lies in C."""
    if n < 1:
        raise ValidationError("need n >= 1")
    _check_interval(C)
    if obs.depth == 1 and phi.depth == 1:
        counts, log_mult = composition_arrays(n, spec.N)
        avg = (counts @ obs.f.values) / n
        mask = C.contains_points(avg[:, None])
        return logsumexp((log_mult + counts @ phi.values)[mask])
    acc = LogAccumulator()
    for block in word_blocks(n, spec.N, budget):
        sup_vals = tail_sum_matrix(phi, block, budget).max(axis=1)
        avg = _periodic_averages(obs, block, n, budget)
        acc.add_block(sup_vals[C.contains_points(avg[:, None])])
    return acc.value()


def _erg_lambda_profiles(
    spec: ModelSpec,
    obs: ObservableTable,
    C: TargetBox,
    n_values,
    budget: int,
):
    lam_vec = spec.log_ratios
    profiles = []
    for n in n_values:
        if obs.depth == 1:
            counts, log_mult = composition_arrays(n, spec.N)
            avg = (counts @ obs.f.values) / n
            mask = C.contains_points(avg[:, None])
            profiles.append(_profile_entry(log_mult[mask], counts[mask] @ lam_vec))
        else:
            parts = []
            for block in word_blocks(n, spec.N, budget):
                avg = _periodic_averages(obs, block, n, budget)
                mask = C.contains_points(avg[:, None])
                parts.append(lam_vec[block[mask]].sum(axis=1))
            s_all = np.concatenate(parts) if parts else np.empty(0)
            uniq, counts_u = np.unique(s_all, return_counts=True)
            profiles.append(_profile_entry(np.log(counts_u), uniq))
    return profiles


def erg_bowen(
    spec: ModelSpec,
    obs: ObservableTable,
    C: TargetBox,
    mode: str = "shrinking",
    n_max: int = 300,
    tol: float = 1e-4,
    r_schedule: Optional[Sequence[float]] = None,
    budget: int = DEFAULT_BUDGET,
    refine: bool = True,
):
    """Bowen root of the ergodic constrained pressure t -> P(t * Lambda).

    mode "fixed" solves at the given interval and returns a float; mode
    "shrinking" solves along a dilation schedule and returns the per-radius
    roots with their extrapolated limit.
    """
    _check_interval(C)

    def solve_at(box: TargetBox) -> float:
        return _solve_refined(
            spec,
            n_max,
            tol,
            lambda ns: _erg_lambda_profiles(spec, obs, box, ns, budget),
            refine,
        )

    if mode == "fixed":
        return solve_at(C)
    if mode != "shrinking":
        raise ValidationError("mode must be 'fixed' or 'shrinking'")
    if r_schedule is None:
        r_schedule = default_radius_schedule()
    radii = np.asarray(list(r_schedule), dtype=float)
    if radii.size < 3:
        raise ScheduleTooShort("need at least 3 radii to extrapolate")
    if np.any(radii <= 0) or np.any(np.diff(radii) >= 0):
        raise ValidationError("radius schedule must be positive and decreasing")
    roots = np.array([solve_at(C.dilate(float(r))) for r in radii])
    return ShrinkingResult(radii, roots, _extrapolate_roots(radii, roots))


def erg_spectrum_variational(
    spec: ModelSpec,
    obs: ObservableTable,
    C: TargetBox,
    family: Optional[str] = None,
    grid_step: float = 1e-2,
    tol: float = 1e-6,
    seed: int = 0,
) -> VariationalResult:
    """sup of -h(mu) / int(Lambda) over measures with int f dmu in C.

    The family defaults to the one that integrates the observable exactly:
    Bernoulli at depth 1, memory-1 Markov at depth 2.
    """
    _check_interval(C)
    if family is None:
        family = "bernoulli" if obs.depth == 1 else "markov1"
    return variational_solve(
        spec,
        C,
        phi=None,
        family=family,
        objective="dimension",
        grid_step=grid_step,
        tol=tol,
        seed=seed,
        constraint_phi=obs.f,
    )


def periodic_discrepancy_bound(obs: ObservableTable, n: int) -> float:
    """Bound on |periodic sum - any cylinder sum| of S_n(f), divided by n."""
    if n < 1:
        raise ValidationError("need n >= 1")
    return obs.lip_bound / (n * (1.0 - obs.gamma))
