"""Deterministic row-selection engines for Parseval vector systems.

Four selectors over a finite system {v_i} in complex n-space:

* bss_select      -- two-sided barrier greedy with positive weights; the
                     selected weighted sum has condition ratio at most the
                     twice-Ramanujan bound ((sqrt(q)+1)/(sqrt(q)-1))^2 at
                     oversampling q, with |J| <= ceil(q*n).
* bss_unweighted  -- drops the weights for equal-norm systems and certifies
                     an unweighted eigenvalue floor C(d) * n/m.
* rit_select      -- restricted-invertibility style lower-barrier greedy:
                     picks ceil((1-d)*m/||T||^2) rows whose Gram stays above
                     (1-sqrt(1-d))^2 * n/m.
* upper_select    -- upper-barrier greedy picking exactly k rows with a small
                     certified top eigenvalue (Bessel-type bound).

Every engine recomputes its certificate from a fresh eigendecomposition of
the reassembled selection and hard-aborts if the certificate fails; bounds
are never emitted unverified.  brute_force_best is the exhaustive oracle for
small instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import (
    CertificateFailed,
    InvalidD,
    KTooLarge,
    NoFeasibleCandidate,
    NotParseval,
    TooManySubsets,
)
from .linalg import hermitian_eig

PARSEVAL_RTOL = 1e-10
EQUAL_NORM_RTOL = 1e-10
# Forgiveness for floating-point noise in the U <= L feasibility comparison;
# certificates are still checked exactly afterwards.
FEASIBILITY_SLACK = 1e-9
RATIO_SLACK = 1e-9


def condition_ratio_bound(q: float) -> float:
    """Certified lambda_max/lambda_min bound of the two-sided selection."""
    s = math.sqrt(q)
    return ((s + 1.0) / (s - 1.0)) ** 2


def lower_certificate_constant(d: float) -> float:
    """Unweighted eigenvalue floor constant ((sqrt(1+d)-1)/(sqrt(1+d)+1))^2."""
    s = math.sqrt(1.0 + d)
    return ((s - 1.0) / (s + 1.0)) ** 2


def riesz_floor_constant(d: float) -> float:
    """Restricted-invertibility floor constant (1-sqrt(1-d))^2 for d in (0,1)."""
    return (1.0 - math.sqrt(1.0 - d)) ** 2


@dataclass(frozen=True)
class VectorSystem:
    """Finite family of m vectors in complex n-space, stored as rows.

    With parseval=True the rows must resolve the identity (sum of v v* = I);
    with equal_norm=True every squared norm must equal n/m.  Both checks run
    at construction time.
    """

    vectors: np.ndarray
    parseval: bool = False
    equal_norm: bool = False

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("vectors must form a nonempty 2-d array (m, n)")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("vector entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)
        m, n = arr.shape
        if self.parseval:
            s = arr.T @ arr.conj()
            err = float(np.linalg.norm(s - np.eye(n)))
            if err > PARSEVAL_RTOL * math.sqrt(n):
                raise NotParseval(f"identity residual {err:.3e} exceeds tolerance")
        if self.equal_norm:
            norms2 = np.sum(np.abs(arr) ** 2, axis=1)
            target = n / m
            err = float(np.abs(norms2 - target).max())
            if err > EQUAL_NORM_RTOL * max(1.0, target):
                raise ValueError(f"row norm deviation {err:.3e} exceeds tolerance")

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    def outer_sum(self, indices: Iterable[int], weights: Optional[Iterable[float]] = None) -> np.ndarray:
        """Hermitian n x n sum of (weighted) outer products over the indices."""
        idx = list(indices)
        sel = self.vectors[idx]
        if weights is None:
            a = sel.T @ sel.conj()
        else:
            w = np.asarray(list(weights), dtype=np.float64)
            a = (sel.T * w) @ sel.conj()
        return 0.5 * (a + a.conj().T)

    def gram_of(self, indices: Iterable[int]) -> np.ndarray:
        """Hermitian |J| x |J| Gram matrix <v_a, v_b> of the selected rows."""
        sel = self.vectors[list(indices)]
        g = sel @ sel.conj().T
        return 0.5 * (g + g.conj().T)


@dataclass(frozen=True)
class BarrierStep:
    """One greedy step: barrier positions, potentials and the chosen index."""

    step: int
    u: Optional[float]
    l: Optional[float]
    phi_u: Optional[float]
    phi_l: Optional[float]
    index: int
    weight: float
    lam_min: float
    lam_max: float

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "u": self.u,
            "l": self.l,
            "phi_u": self.phi_u,
            "phi_l": self.phi_l,
            "index": self.index,
            "weight": self.weight,
            "lam_min": self.lam_min,
            "lam_max": self.lam_max,
        }


@dataclass(frozen=True)
class SelectionResult:
    """Chosen index set with certified extreme eigenvalues.

    weights is empty for the unweighted engines, otherwise parallel to
    indices.  lambda_min/lambda_max are recomputed post hoc from the
    reassembled selection (the weighted sum for bss_select, the unweighted
    sum for bss_unweighted and upper_select, the coefficient Gram for
    rit_select).  barrier_log records the per-step trajectory; it is empty
    when a degenerate shortcut returned the full index set.
    """

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    lambda_min: float
    lambda_max: float
    target_q: float
    barrier_log: tuple[BarrierStep, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "weights": list(self.weights),
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "q": self.target_q,
            "steps": [s.to_dict() for s in self.barrier_log],
        }


def _full_selection(sys: VectorSystem, q: float, weighted: bool) -> SelectionResult:
    """Degenerate regime: return every index (unit weights when weighted)."""
    idx = tuple(range(sys.m))
    weights = tuple(1.0 for _ in idx) if weighted else ()
    spec = hermitian_eig(sys.outer_sum(idx))
    return SelectionResult(idx, weights, spec.lam_min, spec.lam_max, q)


def bss_select(sys: VectorSystem, q: float) -> SelectionResult:
    """Two-sided weighted barrier selection at oversampling q > 1.

    Runs ceil(q*n) greedy steps.  At each step the upper barrier u and lower
    barrier l advance by fixed increments; a candidate i is feasible when its
    upper score U(v_i) does not exceed its lower score L(v_i), and the added
    weight is the reciprocal midpoint 2/(U+L).  The schedule

        delta_l = 1, eps_l = 1/sqrt(q), l0 = -n*sqrt(q),
        delta_u = (sqrt(q)+1)/(sqrt(q)-1),
        eps_u = (sqrt(q)-1)/(sqrt(q)*(sqrt(q)+1)), u0 = n/eps_u

    keeps both potentials bounded and yields a final condition ratio of at
    most condition_ratio_bound(q).  Weights are rescaled at the end so the
    certified lambda_min is 1.  Indices may be picked repeatedly; weight then
    accumulates and |indices| counts distinct picks.

    Raises NoFeasibleCandidate if no index satisfies U <= L (a parameter or
    numerical fault; the engine never relaxes the condition silently).
    """
    if not sys.parseval:
        raise NotParseval("bss_select requires a Parseval system")
    if not q > 1.0:
        raise ValueError("oversampling q must exceed 1")
    m, n = sys.m, sys.n
    steps = math.ceil(q * n)
    if steps > 10 * m:
        raise ValueError(f"step budget ceil(q*n)={steps} exceeds the 10*m cap")
    if n == m:
        # The identity is the unique Parseval completion; unit weights keep it.
        return _full_selection(sys, q, weighted=True)

    sq = math.sqrt(q)
    delta_l, delta_u = 1.0, (sq + 1.0) / (sq - 1.0)
    eps_u = (sq - 1.0) / (sq * (sq + 1.0))
    lower, upper = -n * sq, n / eps_u

    vectors_t = sys.vectors.T  # (n, m)
    a = np.zeros((n, n), dtype=np.complex128)
    spec = hermitian_eig(a)
    weights: dict[int, float] = {}
    log: list[BarrierStep] = []

    for step in range(steps):
        u_next, l_next = upper + delta_u, lower + delta_l
        evals = spec.eigenvalues
        gaps_u = u_next - evals
        gaps_l = evals - l_next
        if gaps_u.min() <= 0.0 or gaps_l.min() <= 0.0:
            raise NoFeasibleCandidate(f"barrier crossed the spectrum at step {step}")
        phi_u = float(np.sum(1.0 / (upper - evals)))
        phi_l = float(np.sum(1.0 / (evals - lower)))
        denom_u = phi_u - float(np.sum(1.0 / gaps_u))
        denom_l = float(np.sum(1.0 / gaps_l)) - phi_l
        if denom_u <= 0.0 or denom_l <= 0.0:
            raise NoFeasibleCandidate(f"potential shift degenerate at step {step}")

        coords = np.abs(spec.eigenvectors.conj().T @ vectors_t) ** 2  # (n, m)
        inv_u, inv_l = 1.0 / gaps_u, 1.0 / gaps_l
        score_u = (inv_u**2) @ coords / denom_u + inv_u @ coords
        score_l = (inv_l**2) @ coords / denom_l - inv_l @ coords
        margin = score_l - score_u
        chosen = int(np.argmax(margin))
        slack = FEASIBILITY_SLACK * max(1.0, abs(score_u[chosen]), abs(score_l[chosen]))
        if margin[chosen] < -slack:
            raise NoFeasibleCandidate(
                f"no index with U <= L at step {step} (best margin {margin[chosen]:.3e})"
            )
        t = 2.0 / (score_u[chosen] + score_l[chosen])
        if not (t > 0.0 and math.isfinite(t)):
            raise NoFeasibleCandidate(f"non-positive weight at step {step}")

        v = sys.vectors[chosen]
        a = a + t * np.outer(v, v.conj())
        a = 0.5 * (a + a.conj().T)
        weights[chosen] = weights.get(chosen, 0.0) + t
        upper, lower = u_next, l_next
        spec = hermitian_eig(a)
        log.append(
            BarrierStep(
                step=step,
                u=upper,
                l=lower,
                phi_u=float(np.sum(1.0 / (upper - spec.eigenvalues))),
                phi_l=float(np.sum(1.0 / (spec.eigenvalues - lower))),
                index=chosen,
                weight=t,
                lam_min=spec.lam_min,
                lam_max=spec.lam_max,
            )
        )

    bound = condition_ratio_bound(q)
    if spec.lam_min <= 0.0 or spec.lam_max / spec.lam_min > bound * (1.0 + RATIO_SLACK):
        raise CertificateFailed(
            f"condition ratio {spec.lam_max / spec.lam_min:.6g} exceeds {bound:.6g}"
        )
    scale = 1.0 / spec.lam_min
    indices = tuple(sorted(weights))
    final_weights = tuple(weights[i] * scale for i in indices)
    final = hermitian_eig(sys.outer_sum(indices, final_weights))
    if final.lam_max / final.lam_min > bound * (1.0 + RATIO_SLACK):
        raise CertificateFailed("rescaled certificate lost the ratio bound")
    return SelectionResult(indices, final_weights, final.lam_min, final.lam_max, q, tuple(log))


def bss_unweighted(sys: VectorSystem, d: float) -> SelectionResult:
    """Weight-free selection for equal-norm Parseval systems.

    Runs bss_select at q = 1+d and returns the same index set without
    weights.  Each weight is at most lambda_max * m/n, so the unweighted sum
    inherits the floor lambda_min >= lower_certificate_constant(d) * n/m,
    which is verified on the reassembled sum before returning.
    """
    if not d > 0.0:
        raise ValueError("d must be positive")
    if not sys.equal_norm:
        raise ValueError("bss_unweighted requires an equal-norm system")
    weighted = bss_select(sys, 1.0 + d)
    indices = weighted.indices
    spec = hermitian_eig(sys.outer_sum(indices))
    target = lower_certificate_constant(d) * sys.n / sys.m
    if spec.lam_min < target:
        raise CertificateFailed(
            f"unweighted floor {spec.lam_min:.6g} below target {target:.6g}"
        )
    return SelectionResult(
        indices, (), spec.lam_min, spec.lam_max, 1.0 + d, weighted.barrier_log
    )


def rit_select(sys: VectorSystem, d: float) -> SelectionResult:
    """Lower-barrier greedy keeping a (1-d) proportion of rows invertible.

    Selects k = ceil((1-d) * m / ||T||^2) distinct rows, where ||T||^2 is the
    top eigenvalue of the full outer sum under unit-vector normalization (for
    Fourier rows this is m/n, giving k = ceil((1-d)*n)).  Each step adds the
    candidate maximizing the smallest eigenvalue of the selected coefficient
    Gram, i.e. the clearance above the moving lower barrier.  The certificate

        lambda_min(Gram) >= (1-sqrt(1-d))^2 * n/m

    is recomputed from the final Gram; the engine aborts on failure.
    """
    if not (0.0 < d < 1.0):
        raise InvalidD(f"d must lie in (0, 1), got {d}")
    if not sys.equal_norm:
        raise ValueError("rit_select requires an equal-norm system")
    m, n = sys.m, sys.n
    rho2 = n / m  # common squared row norm
    target = riesz_floor_constant(d) * rho2

    if n == m:
        result = _full_selection(sys, d, weighted=False)
        gspec = hermitian_eig(sys.gram_of(result.indices))
        if gspec.lam_min < target:
            raise CertificateFailed(
                f"Gram floor {gspec.lam_min:.6g} below target {target:.6g}"
            )
        return SelectionResult(result.indices, (), gspec.lam_min, gspec.lam_max, d)

    top = hermitian_eig(sys.outer_sum(range(m))).lam_max
    t_norm2 = top / rho2
    k = max(1, math.ceil((1.0 - d) * m / t_norm2))
    if k > m:
        raise CertificateFailed(f"required size {k} exceeds m={m}")

    chosen: list[int] = []
    log: list[BarrierStep] = []
    for step in range(k):
        best_idx, best_floor = -1, -math.inf
        for i in range(m):
            if i in chosen:
                continue
            g = sys.gram_of(chosen + [i])
            floor = float(np.linalg.eigvalsh(g)[0])
            if floor > best_floor:
                best_idx, best_floor = i, floor
        if best_idx < 0:
            raise CertificateFailed("ran out of candidates")
        chosen.append(best_idx)
        log.append(
            BarrierStep(
                step=step,
                u=None,
                l=best_floor,
                phi_u=None,
                phi_l=None,
                index=best_idx,
                weight=1.0,
                lam_min=best_floor,
                lam_max=float(np.linalg.eigvalsh(sys.gram_of(chosen))[-1]),
            )
        )

    indices = tuple(sorted(chosen))
    gspec = hermitian_eig(sys.gram_of(indices))
    if gspec.lam_min < target:
        raise CertificateFailed(
            f"Gram floor {gspec.lam_min:.6g} below target {target:.6g}"
        )
    return SelectionResult(indices, (), gspec.lam_min, gspec.lam_max, d, tuple(log))


def upper_select(sys: VectorSystem, k: int) -> SelectionResult:
    """Upper-barrier greedy choosing exactly k rows with small top eigenvalue.

    The barrier starts at u0 = 2*(n/m)*k and advances by u0/k per step; each
    step picks the unused candidate minimizing the shifted upper potential
    sum(1/(u' - lambda)) of the post-step sum, among those staying strictly
    under the shifted barrier.  If a step has no feasible candidate, u0 is
    doubled and the run restarts.  The reported lambda_max is recomputed from
    the final unweighted sum.
    """
    m, n = sys.m, sys.n
    if k > m:
        raise KTooLarge(f"k={k} exceeds m={m}")
    if k < 1:
        raise ValueError("k must be positive")

    u0 = 2.0 * (n / m) * k
    for _ in range(64):
        run = _upper_run(sys, k, u0)
        if run is not None:
            chosen, log = run
            break
        u0 *= 2.0
    else:  # pragma: no cover - doubling always terminates at desk scale
        raise CertificateFailed("upper barrier restart budget exhausted")

    indices = tuple(sorted(chosen))
    spec = hermitian_eig(sys.outer_sum(indices))
    return SelectionResult(indices, (), spec.lam_min, spec.lam_max, float(k), tuple(log))


def _upper_run(sys: VectorSystem, k: int, u0: float):
    m = sys.m
    delta = u0 / k
    u = u0
    a = np.zeros((sys.n, sys.n), dtype=np.complex128)
    chosen: list[int] = []
    log: list[BarrierStep] = []
    for step in range(k):
        u_next = u + delta
        best_idx, best_phi, best_vals = -1, math.inf, None
        for i in range(m):
            if i in chosen:
                continue
            v = sys.vectors[i]
            trial = a + np.outer(v, v.conj())
            vals = np.linalg.eigvalsh(0.5 * (trial + trial.conj().T))
            if vals[-1] >= u_next:
                continue
            phi = float(np.sum(1.0 / (u_next - vals)))
            if phi < best_phi:
                best_idx, best_phi, best_vals = i, phi, vals
        if best_idx < 0:
            return None
        v = sys.vectors[best_idx]
        a = a + np.outer(v, v.conj())
        a = 0.5 * (a + a.conj().T)
        chosen.append(best_idx)
        u = u_next
        log.append(
            BarrierStep(
                step=step,
                u=u,
                l=None,
                phi_u=best_phi,
                phi_l=None,
                index=best_idx,
                weight=1.0,
                lam_min=float(best_vals[0]),
                lam_max=float(best_vals[-1]),
            )
        )
    return chosen, log


def brute_force_best(sys: VectorSystem, k: int, objective: str) -> tuple[tuple[int, ...], float]:
    """Exhaustive optimum over all k-subsets by eigenvalue evaluation.

    objective is "max-of-lambda_min" or "min-of-lambda_max", both over the
    n x n unweighted outer sum.  Ties break to the lexicographically smallest
    subset.  Refuses instances with more than 10^6 subsets.
    """
    if objective not in ("max-of-lambda_min", "min-of-lambda_max"):
        raise ValueError(f"unknown objective {objective!r}")
    m, n = sys.m, sys.n
    if not 1 <= k <= m:
        raise KTooLarge(f"k={k} out of range [1, {m}]")
    total = math.comb(m, k)
    if total > 10**6:
        raise TooManySubsets(f"binomial({m},{k}) = {total} exceeds 10^6")
    maximize = objective == "max-of-lambda_min"

    best_j: Optional[tuple[int, ...]] = None
    best_val = -math.inf if maximize else math.inf
    combos = itertools.combinations(range(m), k)
    while True:
        chunk = list(itertools.islice(combos, 4096))
        if not chunk:
            break
        sel = sys.vectors[np.asarray(chunk)]  # (c, k, n)
        mats = np.einsum("cia,cib->cab", sel, sel.conj())
        mats = 0.5 * (mats + np.conj(np.transpose(mats, (0, 2, 1))))
        vals = np.linalg.eigvalsh(mats)
        scores = vals[:, 0] if maximize else vals[:, -1]
        pos = int(np.argmax(scores)) if maximize else int(np.argmin(scores))
        val = float(scores[pos])
        if (maximize and val > best_val) or (not maximize and val < best_val):
            best_val, best_j = val, chunk[pos]
    assert best_j is not None
    return best_j, best_val
