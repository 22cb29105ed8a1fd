"""Acceptance gate.

Each criterion is checked at its stated size and tolerance and reports a
single ``PASS``/``FAIL`` line, collected in the terminal summary.  Run this
file directly (``python tests/test_acceptance.py``) to get just the lines.
"""
import functools
import os
import subprocess
import sys
import time

import pytest

from vietoris import suite
from vietoris.finposet import chain, labeled_posets_upto
from vietoris.hyperspace import em_preorder_witness, mask_label

RESULTS: list[tuple[int, str]] = []


@functools.lru_cache(maxsize=None)
def run(name: str, cap: int | None = None, trials: int | None = None):
    caps = {} if cap is None else {name: cap}
    cfg = suite.SuiteConfig((name,), caps, trials, suite.SEED).validate()
    return suite.run_suite(name, cfg)


def props(result) -> dict:
    return {p.name: p for p in result.properties}


def verdict(num: int, label: str, ok: bool, detail: str) -> None:
    RESULTS.append((num, f"{'PASS' if ok else 'FAIL'} criterion {num:>2} {label}: {detail}"))
    assert ok, detail


def all_pass(result, names=None):
    ps = props(result)
    names = names or list(ps)
    return all(n in ps and ps[n].failed == 0 and ps[n].passed > 0 for n in names)


def test_criterion_01_functor_laws():
    r = run("functor", 3)
    ps = props(r)
    ok = all_pass(r) and r.seconds < 60
    verdict(1, "functor laws", ok,
            f"{ps['hyperspace/functor-identity'].passed} identities, "
            f"{ps['hyperspace/functor-composition'].passed} composable pairs over "
            f"{len(labeled_posets_upto(3))} labeled posets, {r.seconds:.1f}s")


def test_criterion_02_egli_milner():
    r = run("egli-milner", 5)
    antisym = all_pass(r, ["hyperspace/em-antisymmetry", "hyperspace/em-order"])
    w2 = em_preorder_witness(chain(2))
    w3 = em_preorder_witness(chain(3))
    detail = (f"antisymmetry on convex subsets for n<=5: {'holds' if antisym else 'fails'}; "
              f"preorder witness on the 2-chain: "
              f"{'none exists' if w2 is None else [mask_label(s) for s in w2]}"
              f" (3-chain: {[mask_label(s) for s in w3]})")
    verdict(2, "Egli-Milner order", antisym and w2 is not None, detail)


def test_criterion_03_coreflexive_preservation():
    r = run("coreflexive", 8, None)
    ps = props(r)
    names = [f"coalg/coreflexive-{c}" for c in ("commutes", "reflecting", "complete", "witness")]
    per_variant = r.trials["coreflexive"]
    ok = per_variant == 200 and all_pass(r, names) and \
        all(ps[n].passed == 4 * 200 for n in names) and r.seconds < 300
    verdict(3, "coreflexive equalizers", ok,
            f"{per_variant} instances x 4 variants, clauses a/b/c + witness all pass, "
            f"{r.seconds:.1f}s")


def test_criterion_04_equalizer_lemma():
    r = run("coreflexive", 8, None)
    ps = props(r)
    names = [f"coalg/equalizer-lemma-{f}" for f in ("up", "down", "convex")]
    ok = r.trials["equalizer"] == 50 and all_pass(r, names) and \
        all(ps[n].passed == 4 * 50 for n in names)
    verdict(4, "equalizer lemma", ok, "50 instances x 4 variants, up/down/convex forms")


def test_criterion_05_regular_monos():
    r = run("regmono", 4)
    ps = props(r)
    ok = all_pass(r)
    verdict(5, "regular-mono preservation", ok,
            f"{ps['hyperspace/regmono'].passed} order-reflecting maps (labeled, <=3), "
            f"{ps['hyperspace/regmono-lemma'].passed} subset pairs for the lemma (<=4)")


def test_criterion_06_degroot():
    r = run("degroot", 4)
    ps = props(r)
    verdict(6, "de Groot square", all_pass(r),
            f"{ps['hyperspace/degroot-witness'].passed} posets <=4 (up to iso), "
            f"{ps['hyperspace/degroot-natural'].passed} naturality squares")


def test_criterion_07_duality_roundtrips():
    r = run("duality", 4)
    ps = props(r)
    ok = all_pass(r) and ps["dualalg/frame-roundtrip"].passed == 1 + 2 + 16 + 512 + 65536 \
        and ps["dualalg/algebra-roundtrip"].passed == 1 + 2 + 16 + 512
    verdict(7, "duality round trips", ok,
            f"{ps['dualalg/frame-roundtrip'].passed} frames, "
            f"{ps['dualalg/algebra-roundtrip'].passed} modal algebras, "
            f"{ps['dualalg/ordered-roundtrip'].passed} ordered coalgebras, "
            f"{ps['dualalg/pma-roundtrip'].passed} positive modal algebras, "
            f"{ps['dualalg/morphism-duality'].passed} morphism checks")


def test_criterion_08_axioms():
    r = run("axioms", 3, None)
    ps = props(r)
    ok = all_pass(r) and r.trials["axioms"] == 1000
    verdict(8, "axiom suites", ok,
            f"{ps['dualalg/axioms'].passed} complex algebras (exhaustive + 1000 sampled), "
            f"{ps['dualalg/interdefinability'].passed} interdefinability checks")


def test_criterion_09_generation():
    r = run("generation", 4)
    ps = props(r)
    ok = all_pass(r) and ps["onestep/generation"].passed == 5 and r.seconds < 600
    verdict(9, "generation", ok,
            f"{ps['dualalg/generation'].passed} (variant, poset) cases within caps, "
            f"one-step for 0..4 atoms, {r.seconds:.1f}s")


def test_criterion_10_chain_vs_bisim():
    r = run("chain", 4, None)
    ps = props(r)
    exhaustive = 1 + 2 + 16 + 512 + 65536
    ok = all_pass(r) and ps["coalg/kernel-bisim"].passed == exhaustive + 500 \
        and r.trials["chain"] == 500
    verdict(10, "terminal chain vs bisimulation", ok,
            f"{exhaustive} exhaustive + 500 sampled; sizes 1,2,4,16")


def test_criterion_11_term_laws():
    r = run("terms", 2, None)
    ps = props(r)
    ok = all_pass(r) and r.trials["terms"] == 1000
    verdict(11, "term calculus", ok,
            f"{sum(p.passed for p in ps.values())} law instances, "
            f"{ps['onestep/box-natural'].passed} naturality checks")


def test_criterion_12_determinism():
    env = {**os.environ, "PYTHONHASHSEED": "random"}
    cmd = [sys.executable, "-m", "vietoris.cli", "check"]
    start = time.perf_counter()
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, env=env)
             for _ in range(2)]
    outs = [p.communicate() for p in procs]
    codes = [p.returncode for p in procs]
    same = outs[0][0] == outs[1][0] and len(outs[0][0]) > 0
    verdict(12, "determinism", same,
            f"two default `check` runs: {'byte-identical' if same else 'differ'} "
            f"({len(outs[0][0])} bytes, exit codes {codes}), {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
