"""Tabular log-loss actor training with exact full-batch gradients.

The actor is a logits table over (state, encoding) cells; its objective is
the exact expected negative log-likelihood of the optimal action law,

    L(theta) = E[-log pi_theta(A | S, Z)]
             = sum_cells W_c * CE(T_c, softmax(logits_c)),

where T_c is the mean optimal-action distribution of cell c and W_c its
probability mass.  Gradients are taken per cell on the conditional
distribution (i.e. preconditioned by 1/W_c), which makes a unit learning
rate meaningful: per-cell cross-entropy in logits has curvature at most 1/2,
so any step below 4 descends; a halving safeguard catches the rest.

Cells whose target distributions are permutations of each other follow
permuted copies of the same trajectory from the symmetric zero
initialization, so training runs on one representative per sorted target
signature and the final logits are un-permuted afterwards.  This is an exact
reduction, not an approximation.

Two monitors are recorded at every iterate: the NLL and the modeling error
E[KL(P(A|S,Z) || pi_theta)], so excess-risk identities and the
sufficiency-gap lower bound can be checked along the whole trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info import combine_keys
from .lab import CubeLab
from .reps import RepresentationSpec

__all__ = [
    "DivergenceError",
    "TabularActor",
    "TrainReport",
    "closed_form_optimum",
    "risk_decomposition_check",
    "train_actor",
]


class DivergenceError(RuntimeError):
    def __init__(self, iteration: int):
        super().__init__(f"non-finite actor loss at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class TabularActor:
    spec_id: str
    keys: np.ndarray  # (R,) sorted packed (s, z) keys
    logits: np.ndarray  # (R, 6)
    pair_rows: np.ndarray  # (P,) int32 cell of each valid pair

    def policy_rows(self) -> np.ndarray:
        return _softmax(self.logits)


@dataclass(frozen=True)
class TrainReport:
    nll: float
    h_a_sg: float
    excess: float  # nll - h_a_sg
    delta_a: float
    modeling_error: float  # excess - delta_a
    iterations: int
    converged: bool
    lr_final: float
    halvings: int
    nll_history: np.ndarray  # (iterations + 1,) NLL at every iterate
    risk_history: np.ndarray  # E[KL(P(A|S,Z) || pi)] at every iterate
    actor: TabularActor

    def __post_init__(self):
        if self.excess < self.delta_a - 1e-7:
            raise ValueError("excess risk below the sufficiency gap")
        if self.modeling_error < -1e-7:
            raise ValueError("negative modeling error")


def _softmax(u: np.ndarray) -> np.ndarray:
    e = np.exp(u - u.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _xlogy_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """sum_a x * log(y) with 0 * log(.) := 0, per row.

    y may underflow to 0 where x > 0 under absurd step sizes; the resulting
    -inf propagates to the loss and is handled by the halving safeguard.
    """
    out = np.zeros_like(x)
    m = x > 0
    with np.errstate(divide="ignore"):
        out[m] = x[m] * np.log(y[m])
    return out.sum(axis=1)


def _cells(lab: CubeLab, spec: RepresentationSpec):
    """Group valid pairs by (s, z): targets T, weights W, pair->cell map."""
    mat = lab.encode_valid(spec)
    keys = combine_keys([lab.law.s_ids, *(mat[:, k] for k in range(mat.shape[1]))])
    uk, inv = np.unique(keys, return_inverse=True)
    counts = np.bincount(inv, minlength=uk.size).astype(np.float64)
    targets = np.empty((uk.size, 6), dtype=np.float64)
    for a in range(6):
        targets[:, a] = np.bincount(inv, weights=lab.law.adist[:, a], minlength=uk.size)
    targets /= counts[:, None]
    weights = counts / lab.law.n_pairs
    return uk, inv.astype(np.int32), targets, weights


def closed_form_optimum(lab: CubeLab, spec: RepresentationSpec) -> float:
    """Minimum achievable NLL: H(A|S,Z), reached by pi = P(.|S,Z) row-wise."""
    _, _, targets, weights = _cells(lab, spec)
    ent = -_xlogy_rows(targets, targets)
    return float((weights * ent).sum())


def train_actor(
    lab: CubeLab,
    spec: RepresentationSpec,
    lr: float = 1.0,
    max_iters: int = 5000,
    tol: float = 1e-10,
    delta_a: float | None = None,
) -> TrainReport:
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    if delta_a is None:
        delta_a = lab.info_report(spec).delta_a
    uk, inv, targets, weights = _cells(lab, spec)

    # exact signature reduction: one trainee per sorted target row
    perm = np.argsort(-targets, axis=1, kind="stable")
    sorted_t = np.take_along_axis(targets, perm, axis=1)
    sig, dinv = np.unique(sorted_t, axis=0, return_inverse=True)
    dinv = dinv.ravel()
    w = np.bincount(dinv, weights=weights, minlength=sig.shape[0])

    logits = np.zeros_like(sig)
    sig_ent = -_xlogy_rows(sig, sig)

    def losses(u: np.ndarray) -> tuple[float, float, np.ndarray]:
        p = _softmax(u)
        ce = -_xlogy_rows(sig, p)
        nll = float((w * ce).sum())
        kl = float((w * (ce - sig_ent)).sum())
        return nll, kl, p

    nll, kl, probs = losses(logits)
    nll_hist = [nll]
    kl_hist = [kl]
    converged = False
    halvings = 0
    iterations = 0
    for it in range(1, max_iters + 1):
        if not np.isfinite(nll):
            raise DivergenceError(it - 1)
        while True:
            cand = logits - lr * (probs - sig)
            nll_new, kl_new, probs_new = losses(cand)
            if np.isfinite(nll_new) and nll_new <= nll + 1e-15 * max(1.0, abs(nll)):
                break
            lr *= 0.5
            halvings += 1
            if halvings > 200:
                raise DivergenceError(it)
        improvement = nll - nll_new
        logits, nll, kl, probs = cand, nll_new, kl_new, probs_new
        nll_hist.append(nll)
        kl_hist.append(kl)
        iterations = it
        if improvement < tol:
            converged = True
            break

    # un-permute the trained representatives back onto the original cells
    full = np.empty_like(targets)
    np.put_along_axis(full, perm, logits[dinv], axis=1)
    actor = TabularActor(spec_id=spec.id, keys=uk, logits=full, pair_rows=inv)
    h_a_sg = lab.law.h_a_sg
    excess = nll - h_a_sg
    return TrainReport(
        nll=nll,
        h_a_sg=h_a_sg,
        excess=excess,
        delta_a=delta_a,
        modeling_error=excess - delta_a,
        iterations=iterations,
        converged=converged,
        lr_final=lr,
        halvings=halvings,
        nll_history=np.asarray(nll_hist),
        risk_history=np.asarray(kl_hist),
        actor=actor,
    )


def risk_decomposition_check(
    lab: CubeLab,
    spec: RepresentationSpec,
    actor: TabularActor,
    delta_a: float | None = None,
) -> float:
    """|R(pi; phi) - (ModelingError + delta_a)| with R evaluated per pair.

    R is the conditional KL risk E[KL(P*(.|S,G) || pi(.|S,Z))] summed over
    the filtered pairs; infinite KL (an actor zero where the cell mean is
    positive) is reported as ``inf`` rather than raised.
    """
    if delta_a is None:
        delta_a = lab.info_report(spec).delta_a
    law = lab.law
    pi = actor.policy_rows()
    pi_pairs = pi[actor.pair_rows]
    expert = law.adist
    support_violated = np.any((expert > 0) & (pi_pairs <= 0))
    if support_violated:
        return float("inf")
    with np.errstate(divide="ignore", invalid="ignore"):
        lr_terms = np.where(expert > 0, expert * (np.log(expert) - np.log(pi_pairs)), 0.0)
    risk = float(lr_terms.sum() / law.n_pairs)

    # cell-level modeling error: E[KL(P(.|S,Z) || pi(.|S,Z))]
    counts = np.bincount(actor.pair_rows, minlength=actor.keys.size).astype(np.float64)
    targets = np.empty_like(pi)
    for a in range(6):
        targets[:, a] = np.bincount(
            actor.pair_rows, weights=expert[:, a], minlength=actor.keys.size
        )
    targets /= counts[:, None]
    w = counts / law.n_pairs
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_rows = np.where(targets > 0, targets * (np.log(targets) - np.log(pi)), 0.0).sum(axis=1)
    modeling = float((w * kl_rows).sum())
    return abs(risk - (modeling + delta_a))
