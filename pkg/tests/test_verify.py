import numpy as np

from fmstdp.verify import check_theorem1, check_trace_recursions, exp_convolve, verify


def test_all_families_pass():
    rep = verify()
    fams = rep.families()
    assert set(fams) == {"traces", "theorem1", "theorem2", "ste", "entropy", "td"}
    assert rep.passed, [c.name for c in rep.failures]


def test_mismatched_eligibility_constant_is_caught():
    rep = verify(tau_z=35.0)
    assert not rep.families()["theorem1"]


def test_empty_spike_trains_pass_vacuously():
    rng = np.random.default_rng(0)
    assert all(c.passed for c in check_trace_recursions(rng, steps=0))
    assert all(c.passed for c in check_theorem1(rng, steps=0))


def test_convolution_oracle_small_case():
    out = exp_convolve(np.array([1.0, 0.0, 2.0]), 10.0)
    d = np.exp(-0.1)
    assert np.allclose(out, [1.0, d, d * d + 2.0])


def test_report_lines_mark_each_check():
    rep = verify(steps=200)
    lines = rep.lines()
    assert len(lines) == len(rep.checks)
    assert all(l.startswith(("PASS", "FAIL")) for l in lines)
