"""Numba kernels for the event loops.

Both kernels run a single competing-exponential clock: total rate
R = lam_e + lam_s + lam * (#active nodes) + q_state, then the event category
is picked proportionally. This is equivalent in law to independent per-edge
Poisson clocks (superposition/thinning + memorylessness), including across
topology switches. All randomness flows through the numpy Generator passed
in, so runs are reproducible bit-for-bit from the seed.

Topology data is packed as CSR over all K states:
  indptr[k, i]:indptr[k, i+1] -> slice of `nbr` holding node i's neighbors
  nbr_cum       -> per-slice cumulative neighbor-choice probabilities
  act_ptr[k]:act_ptr[k+1] -> slice of `act_nodes` (nodes with degree > 0)
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def full_gossip_kernel(
    rng,
    n,
    lam_e,
    lam_s,
    lam,
    horizon,
    burn_in,
    q,
    p_cum,
    pi_cum,
    indptr,
    nbr,
    nbr_cum,
    act_ptr,
    act_nodes,
    uniform_split,
    deliveries_on,
):
    K = q.shape[0]
    state = int(np.searchsorted(pi_cum, rng.random()))

    N0 = np.int64(0)
    N = np.zeros(n, dtype=np.int64)
    # lazy counter integrals over [burn_in, horizon]
    int_N0 = 0.0
    last0 = burn_in
    int_N = np.zeros(n, dtype=np.float64)
    last = np.full(n, burn_in, dtype=np.float64)
    counts = np.zeros(4, dtype=np.int64)  # source, delivery, gossip, switch

    ls = lam_s if deliveries_on else 0.0
    t = 0.0
    while True:
        m = act_ptr[state + 1] - act_ptr[state]
        qs = q[state] if K > 1 else 0.0
        R = lam_e + ls + lam * m + qs
        if R <= 0.0:
            break
        t_next = t + rng.exponential(1.0 / R)
        if t_next >= horizon:
            break
        t = t_next
        u = rng.random() * R
        if u < lam_e:
            if t > last0:
                int_N0 += N0 * (t - last0)
                last0 = t
            N0 += 1
            counts[0] += 1
        elif u < lam_e + ls:
            j = int(rng.random() * n)
            if N[j] != N0:
                if t > last[j]:
                    int_N[j] += N[j] * (t - last[j])
                    last[j] = t
                N[j] = N0
            counts[1] += 1
        elif u < lam_e + ls + lam * m:
            i = act_nodes[act_ptr[state] + int(rng.random() * m)]
            lo = indptr[state, i]
            hi = indptr[state, i + 1]
            if uniform_split:
                j = nbr[lo + int(rng.random() * (hi - lo))]
            else:
                j = nbr[lo + int(np.searchsorted(nbr_cum[lo:hi], rng.random()))]
            if N[i] > N[j]:
                if t > last[j]:
                    int_N[j] += N[j] * (t - last[j])
                    last[j] = t
                N[j] = N[i]
            counts[2] += 1
        else:
            state = int(np.searchsorted(p_cum[state], rng.random()))
            counts[3] += 1

    # final flush at the horizon
    if horizon > last0:
        int_N0 += N0 * (horizon - last0)
    for i in range(n):
        if horizon > last[i]:
            int_N[i] += N[i] * (horizon - last[i])

    return int_N0, int_N, counts, N0, N


@njit(cache=True, nogil=True)
def spread_kernel(
    rng,
    n,
    lam_e,
    lam,
    time_cap,
    q,
    p_cum,
    pi_cum,
    indptr,
    nbr,
    nbr_cum,
    act_ptr,
    act_nodes,
    uniform_split,
):
    """First-passage spread of a flag planted at node 0 at time 0.

    Returns (T, n0_count); T < 0 signals the time-cap guard tripped.
    Source deliveries are disabled; the rate-lam_e source clock only counts.
    """
    K = q.shape[0]
    state = int(np.searchsorted(pi_cum, rng.random()))
    informed = np.zeros(n, dtype=np.bool_)
    informed[0] = True
    n_informed = 1
    n0 = np.int64(0)
    t = 0.0
    if n == 1:
        return 0.0, n0
    while True:
        m = act_ptr[state + 1] - act_ptr[state]
        qs = q[state] if K > 1 else 0.0
        R = lam_e + lam * m + qs
        if R <= 0.0:
            return -1.0, n0
        t += rng.exponential(1.0 / R)
        if t > time_cap:
            return -1.0, n0
        u = rng.random() * R
        if u < lam_e:
            n0 += 1
        elif u < lam_e + lam * m:
            i = act_nodes[act_ptr[state] + int(rng.random() * m)]
            if informed[i]:
                lo = indptr[state, i]
                hi = indptr[state, i + 1]
                if uniform_split:
                    j = nbr[lo + int(rng.random() * (hi - lo))]
                else:
                    j = nbr[lo + int(np.searchsorted(nbr_cum[lo:hi], rng.random()))]
                if not informed[j]:
                    informed[j] = True
                    n_informed += 1
                    if n_informed == n:
                        return t, n0
        else:
            state = int(np.searchsorted(p_cum[state], rng.random()))
