"""Compiled millisecond loop used by the trainer.

Runs a block of milliseconds for both networks in one call: input spiking,
LIF stepping, rate filtering, TD error, trace recursions and weight updates,
in the same order as ``Agent.step_ms``. The pure-numpy path in ``agent`` is
the reference; ``tests/test_kernel.py`` checks the two agree.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# per-network scalar parameter slots
DECAY_N, INV_TAU_N, DECAY_P, DECAY_Z, A_PLUS, A_MINUS, ETA = range(7)
# actor-only slots
DECAY_Q, C_E, C_W, C_T, RHO_TARGET = range(7, 12)


@njit(cache=True)
def _lif(x, w, u, fired, u_th, decay_m, gain):
    # u is the membrane deviation from rest
    n_in, n = w.shape
    for j in range(n):
        acc = 0.0
        for i in range(n_in):
            if x[i] != 0.0:
                acc += w[i, j]
        uj = u[j] * decay_m + gain * acc
        if uj > u_th:
            fired[j] = 1.0
            u[j] = 0.0
        else:
            fired[j] = 0.0
            u[j] = uj


@njit(cache=True)
def _rates(rho, fired, decay_n, inv_tau_n):
    for j in range(rho.shape[0]):
        rho[j] = decay_n * rho[j] + fired[j] * inv_tau_n


@njit(cache=True)
def _pre_post(x, fired, p_pre, p_post, decay_p):
    for j in range(p_post.shape[0]):
        p_post[j] = decay_p * p_post[j] + fired[j]
    for i in range(p_pre.shape[0]):
        p_pre[i] = decay_p * p_pre[i] + x[i]


@njit(cache=True)
def _live_feedback(rho_a, action_col, held_action, alpha, n_exc, fb_col, gate_col):
    k = 0
    for j in range(action_col.shape[0]):
        if action_col[j] + 1 > k:
            k = action_col[j] + 1
    drive = np.zeros(k)
    n_e_col = np.zeros(k)
    n_i_col = np.zeros(k)
    inh = np.zeros(k)
    for j in range(action_col.shape[0]):
        a = action_col[j]
        if j < n_exc:
            drive[a] += rho_a[j]
            n_e_col[a] += 1.0
        else:
            inh[a] += rho_a[j]
            n_i_col[a] += 1.0
    for a in range(k):
        drive[a] = drive[a] / n_e_col[a]
        if n_i_col[a] > 0:
            drive[a] -= inh[a] / n_i_col[a]
        drive[a] *= alpha
    mx = drive.max()
    s = np.exp(drive - mx)
    s /= s.sum()
    su = 0.0
    u = np.empty(k)
    for a in range(k):
        u[a] = s[a] * (np.log(s[a]) + 1.0) if s[a] > 0 else 0.0
        su += u[a]
    for j in range(action_col.shape[0]):
        a = action_col[j]
        fb_col[j] = (1.0 if a == held_action else 0.0) - s[a]
        gate_col[j] = -(u[a] - s[a] * su)


@njit(cache=True)
def run_block(
    u,
    probs,
    learn,
    ablate,
    lif,
    w_c,
    v_c,
    rho_c,
    pre_c,
    post_c,
    z_c,
    target_c,
    signs_c,
    par_c,
    w_a,
    v_a,
    rho_a,
    pre_a,
    post_a,
    z_a,
    q_a,
    target_a,
    signs_a,
    par_a,
    fb_col,
    gate_col,
    action_col,
    held_action,
    live_policy,
    policy_alpha,
    readout,
    rewards,
    terminal,
    state,
    counts,
):
    """Simulate ``u.shape[0]`` milliseconds.

    With ``live_policy`` the feedback ``A_k - s_k`` and the entropy gate are
    recomputed every millisecond from the current actor rates; otherwise the
    precomputed ``fb_col``/``gate_col`` (probabilities at the last draw) are used.

    ``v_c``/``v_a`` hold membrane deviations from rest. ``lif`` = (e_rest, v_thresh,
    decay_m, gain, dt); ``readout`` = (alpha, beta,
    n_e, n_i, gamma_decay, half_decay, n_exc_actor); ``state[0]`` carries the
    previous value estimate; ``counts`` accumulates (critic, actor) spikes.
    """
    u_th, decay_m, gain, dt = lif[1] - lif[0], lif[2], lif[3], lif[4]
    alpha, beta = readout[0], readout[1]
    n_e, n_i = int(readout[2]), int(readout[3])
    gamma_decay, half_decay = readout[4], readout[5]
    n_exc_a = int(readout[6])

    n_in = probs.shape[0]
    n_c = w_c.shape[1]
    n_a = w_a.shape[1]
    x = np.empty(n_in)
    f_c = np.empty(n_c)
    f_a = np.empty(n_a)

    for t in range(u.shape[0]):
        for i in range(n_in):
            x[i] = 1.0 if u[t, i] < probs[i] else 0.0
        _lif(x, w_c, v_c, f_c, u_th, decay_m, gain)
        _lif(x, w_a, v_a, f_a, u_th, decay_m, gain)
        _rates(rho_c, f_c, par_c[DECAY_N], par_c[INV_TAU_N])
        _rates(rho_a, f_a, par_a[DECAY_N], par_a[INV_TAU_N])
        for j in range(n_c):
            counts[0] += f_c[j]
        for j in range(n_a):
            counts[1] += f_a[j]
        if not learn:
            continue

        mean_e = 0.0
        for j in range(n_e):
            mean_e += rho_c[j]
        mean_e /= n_e
        mean_i = 0.0
        if n_i > 0:
            for j in range(n_e, n_e + n_i):
                mean_i += rho_c[j]
            mean_i /= n_i
        v_now = alpha * (mean_e - mean_i) + beta
        tgt = 0.0 if terminal[t] else v_now
        delta = gamma_decay * tgt + half_decay * rewards[t] * dt - state[0]
        state[0] = v_now

        # critic: traces then update
        _pre_post(x, f_c, pre_c, post_c, par_c[DECAY_P])
        dz, ap, am, eta_c = par_c[DECAY_Z], par_c[A_PLUS], par_c[A_MINUS], par_c[ETA]
        for i in range(n_in):
            for j in range(n_c):
                zij = dz * z_c[i, j] + ap * pre_c[i] * f_c[j] - am * post_c[j] * x[i]
                z_c[i, j] = zij
                target_c[i, j] += signs_c[j] * eta_c * delta * zij

        # actor
        if live_policy:
            _live_feedback(rho_a, action_col, held_action, policy_alpha, n_exc_a, fb_col, gate_col)
        rates_mean = 0.0
        for j in range(n_exc_a):
            rates_mean += rho_a[j]
        rates_mean /= n_exc_a
        _pre_post(x, f_a, pre_a, post_a, par_a[DECAY_P])
        dz, ap, am, eta_a = par_a[DECAY_Z], par_a[A_PLUS], par_a[A_MINUS], par_a[ETA]
        dq = par_a[DECAY_Q]
        c_e, c_w, c_t = par_a[C_E], par_a[C_W], par_a[C_T]
        rate_err = rates_mean - par_a[RHO_TARGET]
        for i in range(n_in):
            for j in range(n_a):
                zij = dz * z_a[i, j] + ap * pre_a[i] * f_a[j] - am * post_a[j] * x[i]
                z_a[i, j] = zij
                qij = dq * q_a[i, j] + fb_col[j] * zij
                q_a[i, j] = qij
                elig = zij if ablate else qij
                dw = signs_a[j] * delta * elig
                if c_e != 0.0:
                    dw += signs_a[j] * c_e * gate_col[j] * zij
                if c_w != 0.0:
                    dw -= 0.5 * c_w * w_a[i, j]
                if c_t != 0.0:
                    dw -= c_t * rate_err * zij
                target_a[i, j] += eta_a * dw
