"""NumPy implementations of the numerical kernels.

These are the reference implementations used when the compiled extension is
unavailable (or disabled via ``VAQ_DISABLE_EXT=1``). Both backends implement
identical contracts; see :mod:`vaq._kernels`.
"""

from __future__ import annotations

import numpy as np


def class_posteriors(
    log_prior: np.ndarray,
    log_theta: np.ndarray,
    log_comp: np.ndarray,
    idx: np.ndarray,
    vals: np.ndarray,
) -> np.ndarray:
    """Per-draw class posteriors given a set of recorded binary answers.

    Parameters
    ----------
    log_prior : (B, C) log prevalence per draw.
    log_theta : (B, C, J) log P(answer=1 | cause) per draw.
    log_comp : (B, C, J) log P(answer=0 | cause) per draw.
    idx : (k,) answered question indices.
    vals : (k,) recorded answers in {0, 1}, aligned with ``idx``.

    Returns
    -------
    (B, C) array; each row is a normalized posterior. Accumulation happens in
    log space with a per-row max shift before exponentiation.
    """
    ll = np.array(log_prior, dtype=np.float64, copy=True)
    if idx.size:
        v = vals.astype(np.float64)
        ll += log_theta[:, :, idx] @ v + log_comp[:, :, idx] @ (1.0 - v)
    ll -= ll.max(axis=1, keepdims=True)
    np.exp(ll, out=ll)
    ll /= ll.sum(axis=1, keepdims=True)
    return ll


def pwkl_scores(
    theta: np.ndarray,
    log_theta: np.ndarray,
    log_comp: np.ndarray,
    post: np.ndarray,
    yhat: np.ndarray,
    cand: np.ndarray,
) -> np.ndarray:
    """Posterior-weighted KL selection scores, averaged over draws.

    For each candidate question j and draw b the score is

        sum_y post[b, y] * KL(Bern(theta[b, yhat_b, j]) || Bern(theta[b, y, j]))

    computed through the algebraically equivalent form
    ``t*(log t - E_y[log theta]) + (1-t)*(log(1-t) - E_y[log(1-theta)])``,
    which avoids materializing the (B, C, m) KL tensor. Posterior rows must be
    normalized for the two forms to agree. Tiny negative rounding residues are
    clamped to zero so scores stay non-negative.

    Parameters
    ----------
    theta, log_theta, log_comp : (B, C, J) Bernoulli parameters and their logs.
    post : (B, C) normalized class posteriors per draw.
    yhat : (B,) 0-based current best cause per draw.
    cand : (m,) candidate question indices.

    Returns
    -------
    (m,) mean score per candidate across the B draws.
    """
    b_ix = np.arange(theta.shape[0])
    top = theta[b_ix, yhat][:, cand]
    log_top = log_theta[b_ix, yhat][:, cand]
    log_top_c = log_comp[b_ix, yhat][:, cand]
    avg_log = np.einsum("bc,bcm->bm", post, log_theta[:, :, cand])
    avg_log_c = np.einsum("bc,bcm->bm", post, log_comp[:, :, cand])
    scores = top * (log_top - avg_log) + (1.0 - top) * (log_top_c - avg_log_c)
    np.maximum(scores, 0.0, out=scores)
    return scores.mean(axis=0)
