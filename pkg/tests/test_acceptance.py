"""Acceptance criteria, one test each; verdicts are summarized at the end of the run."""

import random
import time

import numpy as np
import pytest

from isifree.capacity import channel_capacity, count_paths
from isifree.codec import StreamDecoder, encode, mcsk_code, validate_code
from isifree.evaluation import run_monte_carlo
from isifree.graph import GAP, ChannelSpec, build_constraint_graph, is_isi_free
from isifree.markov import analytic_rate, state_rates, stationary_distribution
from isifree.synthesis import DelayLimitedProblem, brute_force_synthesize, ghc, synthesize

from conftest import ACCEPTANCE_LINES, SMALL_SPECS, random_code
from oracles import exhaustive_dyadic

K1N2 = ChannelSpec(1, 2)


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def note(n: int, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {n:2d} INFO: {detail}")


def test_criterion_01_capacity():
    t0 = time.perf_counter()
    res = channel_capacity(K1N2)
    elapsed = time.perf_counter() - t0
    ok = abs(res.lam - 2.4142) < 1e-3 and abs(res.capacity_bits_per_symbol - 1.2716) < 1e-3 and elapsed < 1
    verdict(1, ok, f"lambda={res.lam:.6f} C={res.capacity_bits_per_symbol:.6f} in {elapsed:.3f}s")


BLOCK_RATES = {1: 1.25, 2: 1.25, 3: 1.2604, 4: 1.2617, 5: 1.2640}


def test_criterion_02_k1n2_rates():
    t0 = time.perf_counter()
    results = {d: synthesize(K1N2, d) for d in BLOCK_RATES}
    elapsed = time.perf_counter() - t0
    errs = {d: abs(r.rate - BLOCK_RATES[d]) for d, r in results.items()}
    exact = all(results[d].exact for d in (1, 2, 3))
    ok = max(errs.values()) <= 1e-3 and exact and elapsed < 300
    rates = " ".join(f"d{d}={r.rate:.7f}" for d, r in results.items())
    verdict(2, ok, f"{rates}; max err {max(errs.values()):.1e}; exact d<=3: {exact}; {elapsed:.1f}s")
    wider = " ".join(f"d{d}={synthesize(K1N2, d, family='prefix').rate:.7f}" for d in (1, 2, 3))
    note(2, f"variable-length (prefix) family, exhaustive: {wider}")


def test_criterion_03_depth2_code(depth2_code):
    res = synthesize(K1N2, 2)
    synth_ok = abs(analytic_rate(res.code) - 1.25) < 1e-9 and validate_code(res.code) == []
    lit_ok = validate_code(depth2_code) == [] and abs(analytic_rate(depth2_code) - 1.25) < 1e-12
    verdict(3, synth_ok and lit_ok, f"synthesized d=2 rate {analytic_rate(res.code):.9f}, "
            f"literal code rate {analytic_rate(depth2_code):.9f}, both valid: {synth_ok and lit_ok}")


def test_criterion_04_mmcsk_scheme(mmcsk_code):
    rates = state_rates(mmcsk_code)
    pi = stationary_distribution(mmcsk_code)
    r_ok = [rates[s] for s in ("-", "M1", "M2")] == [1.5, 1.0, 1.0]
    pi_ok = all(abs(pi[s] - v) < 1e-9 for s, v in (("-", 0.5), ("M1", 0.25), ("M2", 0.25)))
    rate = analytic_rate(mmcsk_code, pi)
    verdict(4, r_ok and pi_ok and rate == 1.25, f"state rates {rates}, pi {pi}, rate {rate}")


def test_criterion_05_mcsk():
    code = mcsk_code(K1N2)
    mc = run_monte_carlo(code, 10**5, seed=0)
    ok = analytic_rate(code) == 1.0 and mc.monte_carlo_rate == 1.0
    verdict(5, ok, f"analytic {analytic_rate(code)}, Monte-Carlo {mc.monte_carlo_rate}")


def test_criterion_06_oracles():
    worst = 0.0
    cells = []
    for k, n, d in ((1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2), (2, 2, 1)):
        for family in ("block", "prefix"):
            cap = 2_000_000 if (k, n, d, family) == (1, 2, 2, "prefix") else 10**6
            bf = brute_force_synthesize(ChannelSpec(k, n), d, family, policy_cap=cap).rate
            dp = synthesize(ChannelSpec(k, n), d, family=family).rate
            worst = max(worst, abs(bf - dp))
            cells.append(f"({k},{n},{d},{family})")
    rng = np.random.default_rng(2024)
    ghc_worst = 0.0
    for _ in range(200):
        q = rng.uniform(0.01, 1.0, size=rng.integers(1, 7))
        ghc_worst = max(ghc_worst, abs(ghc(q)[1] - exhaustive_dyadic(q)[0]))
    ok = worst <= 1e-6 and ghc_worst <= 1e-9
    verdict(6, ok, f"{len(cells)} DP/brute-force cells, max diff {worst:.1e}; GHC vs exhaustive, 200 cases, max diff {ghc_worst:.1e}")


def test_criterion_07_path_counts():
    graph = build_constraint_graph(K1N2)
    n30 = count_paths(graph, K1N2.start_state, 30)
    val = np.log2(n30) / 30
    verdict(7, abs(val - 1.2716) <= 0.02, f"N(30)={n30}, log2N/30={val:.5f}")


def test_criterion_08_round_trip():
    rng = random.Random(8)
    worst_buffer = 0
    failures = 0
    for i in range(1000):
        k, n = SMALL_SPECS[i % len(SMALL_SPECS)]
        depth = rng.randint(1, 2 if k == 3 else 3)
        spec = ChannelSpec(k, n)
        code = random_code(spec, depth, rng)
        bits = "".join(rng.choice("01") for _ in range(1000))
        symbols, pad = encode(code, bits)
        dec = StreamDecoder(code)
        out = dec.feed(symbols)
        dec.finish()
        ok = (
            validate_code(code) == []
            and out[: len(bits)] == bits
            and is_isi_free(spec.start_state + tuple(symbols), k)
            and dec.max_buffer <= depth + k
        )
        failures += not ok
        worst_buffer = max(worst_buffer, dec.max_buffer - depth - k)
    verdict(8, failures == 0, f"1000 random codes x 1000 bits, {failures} failures, max buffer excess {worst_buffer}")


def test_criterion_09_trends():
    problems = []
    depth_rows = []
    for k in (1, 2, 3):
        spec = ChannelSpec(k, k + 1)
        cap = channel_capacity(spec).capacity_bits_per_symbol
        rates = [synthesize(spec, d).rate for d in (1, 2, 3, 4)]
        depth_rows.append(f"k={k}: " + ",".join(f"{r:.4f}" for r in rates) + f" (C={cap:.4f})")
        if any(b < a - 1e-9 for a, b in zip(rates, rates[1:])):
            problems.append(f"rate decreases in d for k={k}")
        if any(r > cap + 1e-6 for r in rates):
            problems.append(f"rate above capacity for k={k}")
    if channel_capacity(K1N2).capacity_bits_per_symbol - synthesize(K1N2, 5).rate > 0.05:
        problems.append("k=1 d=5 not within 0.05 of capacity")
    by_n = []
    for n in range(1, 7):
        spec = ChannelSpec(1, n)
        r1 = synthesize(spec, 1).rate
        cap = channel_capacity(spec).capacity_bits_per_symbol
        by_n.append(r1)
        if r1 > cap + 1e-6:
            problems.append(f"rate above capacity for N={n}")
        if cap - synthesize(spec, 3).rate > cap - r1 + 1e-9:
            problems.append(f"d=3 gap larger than d=1 gap at N={n}")
    if any(b < a - 1e-9 for a, b in zip(by_n, by_n[1:])):
        problems.append("rate decreases in N")
    detail = "; ".join(depth_rows) + "; N=1..6 at d=1: " + ",".join(f"{r:.4f}" for r in by_n)
    verdict(9, not problems, detail + ("; " + "; ".join(problems) if problems else ""))


@pytest.mark.parametrize("k,n,d", [(1, 2, 1), (1, 2, 3), (2, 3, 2), (1, 4, 2)])
def test_criterion_10_bisection(k, n, d):
    problem = DelayLimitedProblem(ChannelSpec(k, n), d)
    res = problem.solve()
    pts = [0.5 * res.rate, res.rate - 0.01, res.rate + 0.01]
    gains = [problem.evaluate(r).gain for r in pts]
    decreasing = gains[0] > gains[1] > gains[2]
    close = abs(res.root - res.rate) <= 1e-5
    verdict(10, decreasing and close, f"(k={k},N={n},d={d}) G at {', '.join(f'{p:.4f}' for p in pts)} = "
            f"{', '.join(f'{g:+.2e}' for g in gains)}; |root-rate|={abs(res.root - res.rate):.1e}")
