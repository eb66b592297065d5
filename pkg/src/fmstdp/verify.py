"""Numerical certificates for the learning rules.

Every check pits the production recursion against an independent evaluation
by direct summation (discrete convolution with ``exp(-t/tau)``) or by finite
differences. Nothing here calls the trainer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import actor as act
from .critic import td_error
from .snn import LifParams, LifPopulation, lif_step
from .traces import (
    RateEstimator,
    StdpTraceSet,
    feedback_gate_update,
    rate_update,
    stdp_update,
)


@dataclass
class CheckResult:
    family: str
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def families(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for c in self.checks:
            out[c.family] = out.get(c.family, True) and c.passed
        return out

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'}  {c.family:<12} {c.name:<40} "
            f"err={c.error:.3e} tol={c.tolerance:.0e}"
            for c in self.checks
        ]


# -- oracles ------------------------------------------------------------------


def exp_convolve(signal, tau: float, dt: float = 1.0) -> np.ndarray:
    """``y[t] = sum_{s<=t} signal[s] * exp(-(t-s) dt / tau)`` by direct summation.

    ``signal`` is indexed by time along axis 0.
    """
    m = np.asarray(signal, dtype=np.float64)
    n = m.shape[0]
    if n == 0:
        return m.copy()
    lag = np.arange(n)[:, None] - np.arange(n)[None, :]
    kernel = np.where(lag >= 0, np.exp(-np.maximum(lag, 0) * dt / tau), 0.0)
    return np.tensordot(kernel, m, axes=(1, 0))


def rel_error(got, want) -> float:
    """Max abs difference scaled by the oracle's max magnitude (0 for empty/all-zero)."""
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    if want.size == 0:
        return 0.0
    scale = np.abs(want).max()
    diff = np.abs(got - want).max()
    if scale == 0.0:
        return float(diff)
    return float(diff / scale)


def entropy_of_drive(rho, alpha: float) -> float:
    s = act.softmax(alpha * np.asarray(rho, dtype=np.float64))
    return float(-(s * np.log(s)).sum())


# -- helpers ------------------------------------------------------------------


def _random_record(rng, steps, n_pre, n_post, p_pre=0.3, p_post=0.2):
    x_pre = (rng.random((steps, n_pre)) < p_pre).astype(np.float64)
    x_post = (rng.random((steps, n_post)) < p_post).astype(np.float64)
    return x_pre, x_post


def _run_traces(x_pre, x_post, feedback, a_plus, a_minus, tau_p, tau_z, tau_q):
    steps, n_pre = x_pre.shape
    n_post = x_post.shape[1]
    ts = StdpTraceSet(n_pre, n_post, a_plus, a_minus, tau_p, tau_z, tau_q)
    out = {k: np.zeros((steps,) + s) for k, s in
           (("p_pre", (n_pre,)), ("p_post", (n_post,)),
            ("z", (n_pre, n_post)), ("q", (n_pre, n_post)))}
    for t in range(steps):
        stdp_update(ts, x_pre[t], x_post[t])
        feedback_gate_update(ts, feedback[t])
        out["p_pre"][t] = ts.p_pre
        out["p_post"][t] = ts.p_post
        out["z"][t] = ts.z
        out["q"][t] = ts.q
    return out


def _piecewise_feedback(rng, steps, k, n_per_action, hold=20):
    """Per-neuron ``A_k - s_k`` held constant over blocks of ``hold`` steps."""
    fb = np.zeros((steps, k * n_per_action))
    for start in range(0, steps, hold):
        s = rng.dirichlet(np.ones(k))
        a = int(rng.integers(k))
        fb[start : start + hold] = np.repeat(act.feedback_signal(a, s), n_per_action)
    return fb


# -- check families -------------------------------------------------------------


def check_trace_recursions(rng, steps=1000, tol=1e-9) -> list[CheckResult]:
    out = []
    n_pre, n_post = 6, 4
    x_pre, x_post = _random_record(rng, steps, n_pre, n_post)
    fb = _piecewise_feedback(rng, steps, 2, n_post // 2)
    for tau in (20.0, 40.0):
        a_plus, a_minus = 1.0, 0.5
        rec = _run_traces(x_pre, x_post, fb, a_plus, a_minus, tau, tau, tau)
        p_pre = exp_convolve(x_pre, tau)
        p_post = exp_convolve(x_post, tau)
        drive = a_plus * p_pre[:, :, None] * x_post[:, None, :] - a_minus * x_pre[:, :, None] * p_post[:, None, :]
        z = exp_convolve(drive, tau)
        q = exp_convolve(fb[:, None, :] * z, tau)
        out.append(CheckResult("traces", f"P_pre recursion vs conv (tau={tau:g})", rel_error(rec["p_pre"], p_pre), tol))
        out.append(CheckResult("traces", f"P_post recursion vs conv (tau={tau:g})", rel_error(rec["p_post"], p_post), tol))
        out.append(CheckResult("traces", f"z recursion vs conv (tau={tau:g})", rel_error(rec["z"], z), tol))
        out.append(CheckResult("traces", f"q recursion vs conv (tau={tau:g})", rel_error(rec["q"], q), tol))

        est = RateEstimator(n_post, tau_n=tau)
        rho = np.zeros((steps, n_post))
        for t in range(steps):
            rho[t] = rate_update(est, x_post[t])
        out.append(CheckResult("traces", f"rate recursion vs conv (tau={tau:g})",
                               rel_error(rho, exp_convolve(x_post, tau) / tau), tol))
    return out


def _closed_form_eligibility(x_pre, x_post, tau, tau_n):
    """``((X_j . (X_i * k_tau)) * k_tau_n)(t)`` for every synapse."""
    pre_filtered = exp_convolve(x_pre, tau)
    return exp_convolve(pre_filtered[:, :, None] * x_post[:, None, :], tau_n)


def check_theorem1(rng, steps=1000, tol=1e-9, tau_z=None) -> list[CheckResult]:
    """Critic rule with A+=1, A-=0, tau_p=tau_m, tau_z=tau_n against the STE gradient path."""
    lif = LifParams()
    tau, tau_n = lif.tau_m, 20.0
    tau_z = tau_n if tau_z is None else tau_z
    alpha, n_e = 2.0, 3
    n_pre = 5
    x_pre, x_post = _random_record(rng, steps, n_pre, n_e)
    rec = _run_traces(x_pre, x_post, np.zeros((steps, n_e)), 1.0, 0.0, tau, tau_z, 40.0)
    closed = _closed_form_eligibility(x_pre, x_post, tau, tau_n)

    values = rng.uniform(0.0, 1.0, steps + 1)
    deltas = np.array([td_error(values[t], values[t + 1], 0.001, 1.0, 1000.0) for t in range(steps)])
    accumulated = np.einsum("t,tij->ij", deltas, rec["z"])
    grad_const = lif.resistance * alpha / (n_e * tau_n * tau)
    # STE gradient of the value readout, then rescaled by the absorbed constant
    ste_path = np.einsum("t,tij->ij", deltas, grad_const * closed) / grad_const if steps else accumulated
    return [
        CheckResult("theorem1", "z path vs closed-form eligibility", rel_error(rec["z"], closed), tol),
        CheckResult("theorem1", "sum delta*z vs sum delta*grad V / const", rel_error(accumulated, ste_path), tol),
    ]


def check_theorem2(rng, steps=1000, tol=1e-9) -> list[CheckResult]:
    """Actor rule (tau_q = 1/(1 - gamma*lambda)) against the nested convolution."""
    lif = LifParams()
    tau, tau_n, tau_q = lif.tau_m, 20.0, 40.0
    k, n_per_action, n_pre = 2, 2, 5
    n_post = k * n_per_action
    x_pre, x_post = _random_record(rng, steps, n_pre, n_post)
    fb = _piecewise_feedback(rng, steps, k, n_per_action)
    rec = _run_traces(x_pre, x_post, fb, 1.0, 0.0, tau, tau_n, tau_q)
    inner = _closed_form_eligibility(x_pre, x_post, tau, tau_n)
    nested = exp_convolve(fb[:, None, :] * inner, tau_q)
    deltas = rng.normal(0.0, 0.01, steps)
    return [
        CheckResult("theorem2", "q path vs nested convolution", rel_error(rec["q"], nested), tol),
        CheckResult("theorem2", "sum delta*q vs sum delta*nested",
                    rel_error(np.einsum("t,tij->ij", deltas, rec["q"]),
                              np.einsum("t,tij->ij", deltas, nested)), tol),
    ]


def _frozen_spike_voltage(lif: LifParams, w_col, x_pre, spikes):
    """Voltage with reset modelled as a fixed (theta - E_rest) drop at recorded spike times."""
    v = np.empty(x_pre.shape[0])
    vt = lif.e_rest
    drop = lif.v_thresh - lif.e_rest
    for t in range(x_pre.shape[0]):
        vt = lif.e_rest + (vt - lif.e_rest) * lif.decay + lif.gain * float(x_pre[t] @ w_col)
        if spikes[t]:
            vt -= drop
        v[t] = vt
    return v


def check_ste_voltage(rng, steps=500, tol=1e-6, h=1e-6) -> list[CheckResult]:
    """Finite-difference dV_j/dw_ij under frozen spike times vs (R/tau)(X_i * k_tau)."""
    lif = LifParams()
    n_pre = 8
    x_pre = (rng.random((steps, n_pre)) < 0.5).astype(np.float64)
    w_col = rng.uniform(0.0, 12.0, n_pre)
    pop = LifPopulation(lif, 1)
    spikes = np.zeros(steps, dtype=bool)
    for t in range(steps):
        spikes[t] = lif_step(pop, [float(x_pre[t] @ w_col)])[0] > 0
    analytic = lif.gain * exp_convolve(x_pre, lif.tau_m)
    worst = 0.0
    for i in range(n_pre):
        wp, wm = w_col.copy(), w_col.copy()
        wp[i] += h
        wm[i] -= h
        fd = (_frozen_spike_voltage(lif, wp, x_pre, spikes) - _frozen_spike_voltage(lif, wm, x_pre, spikes)) / (2 * h)
        if steps:
            worst = max(worst, float(np.abs(fd - analytic[:, i]).max()))
    return [CheckResult("ste", "dV/dw finite difference vs (R/tau) X*k_tau", worst, tol)]


def check_entropy_gate(rng, n=20, tol=1e-6, h=1e-6) -> list[CheckResult]:
    worst = 0.0
    for trial in range(n):
        alpha = (2.0, 15.0, 25.0)[trial % 3]
        k = int(rng.integers(2, 6))
        rho = rng.uniform(0.0, 0.2, k)
        s = act.softmax(alpha * rho)
        g = act.entropy_gate(s)
        for j in range(k):
            up, dn = rho.copy(), rho.copy()
            up[j] += h
            dn[j] -= h
            fd = (entropy_of_drive(up, alpha) - entropy_of_drive(dn, alpha)) / (2 * h)
            worst = max(worst, abs(alpha * g[j] - fd))
    return [CheckResult("entropy", "alpha*g_k vs finite-difference dH/drho_k", worst, tol)]


def check_td_spot_values(tol=1e-12) -> list[CheckResult]:
    cases = [
        # (v_now, v_next, reward_per_ms, dt, tau, terminal)
        (0.0, 0.0, 0.0, 1.0, 1000.0, False),
        (0.5, 0.5, 0.001, 1.0, 1000.0, False),
        (0.5, 0.7, 0.0, 1.0, 1000.0, True),
        (0.3, 0.9, 0.001, 20.0, 1000.0, False),
        (1.2, -0.4, 0.0006, 1.0, 2000.0, False),
    ]
    worst = 0.0
    for v_now, v_next, r, dt, tau, term in cases:
        target = 0.0 if term else v_next
        expected = math.exp(-dt / tau) * target + math.exp(-dt / (2 * tau)) * r * dt - v_now
        worst = max(worst, abs(td_error(v_now, v_next, r, dt, tau, term) - expected))
    # the worked value 0.5*exp(-1e-3) + 1e-3*exp(-5e-4) - 0.5 ~ 0.00049975, frozen in full
    worst = max(worst, abs(td_error(0.5, 0.5, 0.001, 1.0, 1000.0) - 4.997500416666911e-4))
    worst = max(worst, abs(td_error(0.5, 0.0, 0.0, 1.0, 1000.0, terminal=True) + 0.5))
    return [CheckResult("td", "half-step discounted TD error spot values", worst, tol)]


def verify(seed: int = 0, steps: int = 1000, tau_z: float | None = None) -> VerifyReport:
    """Run all six check families. ``tau_z`` overrides the critic eligibility constant
    in the first-theorem check (a mismatch with tau_n must fail)."""
    rng = np.random.default_rng(seed)
    report = VerifyReport()
    report.checks += check_trace_recursions(rng, steps)
    report.checks += check_theorem1(rng, steps, tau_z=tau_z)
    report.checks += check_theorem2(rng, steps)
    report.checks += check_ste_voltage(rng, min(steps, 500))
    report.checks += check_entropy_gate(rng)
    report.checks += check_td_spot_values()
    return report
