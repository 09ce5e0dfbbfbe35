"""Acceptance criteria, each at its stated bound.  Every test prints one verdict line."""

import itertools
import time

import pytest

from hogsos import fpc as F
from hogsos import suites
from hogsos.logrel import CheckerConfig, RelationChecker
from hogsos.mutcl_semantics import trace
from hogsos.mutcl_syntax import K, I, S, S1, S2, SortedPool, app, apps, enumerate_terms
from hogsos.ty import BOOL, Fun

B2B = Fun(BOOL, BOOL)


@pytest.fixture
def verdict(capsys):
    """Call with (number, title, ok, detail); prints the line uncaptured and asserts."""
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
        assert ok, detail
    return emit


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_01_s_redex_trace(verdict):
    a = b = c = BOOL
    ts = enumerate_terms(Fun(a, Fun(b, c)), 3)
    ss = enumerate_terms(Fun(a, b), 3)
    es = enumerate_terms(a, 3)
    triples = list(itertools.islice(itertools.product(ts, ss, es), 10))
    assert len(set(triples)) == 10
    bad = 0
    with Clock() as clk:
        for t, s, e in triples:
            prog = apps(S(a, b, c), t, s, e)
            want = [prog, apps(S1(a, b, c, t), s, e), app(S2(a, b, c, t, s), e),
                    app(app(t, e), app(s, e))]
            bad += trace(prog, 3).terms != want
    verdict(1, "S-redex trace", bad == 0 and clk.seconds < 1,
            f"mismatches={bad} time={clk.seconds:.2f}s")


def test_02_law_matches_gamma(verdict):
    with Clock() as clk:
        rep = suites.rho_vs_gamma(max_size=6)
    verdict(2, "derived model vs gamma", rep["mismatches"] == 0 and clk.seconds < 120,
            f"checked={rep['checked']} mismatches={rep['mismatches']} time={clk.seconds:.1f}s")


def _eta(f):
    return apps(S(BOOL, BOOL, BOOL), app(K(B2B, BOOL), I(BOOL)), f)


def _eta_rows(flavor, directions):
    pool = SortedPool(8, 4)
    fs = pool[B2B]
    rows = []
    for n in range(6):
        checker = RelationChecker(CheckerConfig(flavor, n, pool, 200))
        for f in fs:
            for left_is_f in directions:
                t, s = (f, _eta(f)) if left_is_f else (_eta(f), f)
                rows.append(checker.rel(n, B2B, t, s).outcome.value)
    return fs, rows


def test_03_eta_law_L(verdict):
    with Clock() as clk:
        fs, rows = _eta_rows("L", (True,))
    bad = sum(r != "holds" for r in rows)
    verdict(3, "eta law in L", bad == 0 and len(fs) == 8 and clk.seconds < 300,
            f"pool={len(fs)} checks={len(rows)} not-holds={bad} time={clk.seconds:.1f}s")


def test_04_eta_law_M(verdict):
    with Clock() as clk:
        fs, rows = _eta_rows("M", (True, False))
    bad = sum(r != "holds" for r in rows)
    verdict(4, "eta law in M, both directions", bad == 0 and clk.seconds < 300,
            f"pool={len(fs)} checks={len(rows)} not-holds={bad} time={clk.seconds:.1f}s")


def test_05_congruence(verdict):
    with Clock() as clk:
        rep = suites.congruence(per_op=200, seed=0, n=3, jobs=suites.default_jobs())
    verdict(5, "congruence", rep["violations"] == 0 and clk.seconds < 600,
            f"violations={rep['violations']} time={clk.seconds:.1f}s")


def test_06_fundamental(verdict):
    with Clock() as clk:
        rep = suites.fundamental(max_size=5, n=4)
    fails = rep["outcomes"]["fails"]
    verdict(6, "fundamental property", fails == 0 and clk.seconds < 300,
            f"checked={rep['checked']} outcomes={rep['outcomes']} time={clk.seconds:.1f}s")


def test_07_soundness_xcheck(verdict):
    with Clock() as clk:
        rep = suites.soundness_xcheck(pairs=100, seed=0, n=6, ctx_size=7, fuel=500,
                                      jobs=suites.default_jobs())
    verdict(7, "soundness cross-check", rep["inconsistencies"] == 0 and clk.seconds < 900,
            f"rel={rep['rel_outcomes']} ctx={rep['ctx_outcomes']} "
            f"inconsistencies={rep['inconsistencies']} time={clk.seconds:.1f}s")


def test_08_lax_bialgebra(verdict):
    with Clock() as clk:
        rep = suites.lax_bialgebra(per_op=100, seed=0)
    honest_ok = all(row["passed"] for row in rep["per_op"].values()) and len(rep["per_op"]) == 15
    control = rep["control"]
    control_ok = bool(control["rejected_ops"]) and control["replay"]["reachable_in_honest_model"]
    verdict(8, "lax bialgebra", honest_ok and control_ok and rep["passed"] and clk.seconds < 300,
            f"operators={len(rep['per_op'])} control={control['rejected_ops']} time={clk.seconds:.1f}s")


def test_09_henceforth_oracle(verdict):
    with Clock() as clk:
        rep = suites.henceforth_oracle(models=20, seed=0, max_states=5)
    rows = rep["models"]
    ok = len(rows) == 20 and all(r["equal"] and r["nu_within_lattice"] for r in rows)
    verdict(9, "henceforth vs gfp oracle", ok and clk.seconds < 60,
            f"models={len(rows)} max_nu={max(r['nu'] for r in rows)} time={clk.seconds:.2f}s")


def test_10_fpc_divergence(verdict):
    with Clock() as clk:
        w = F.omega(BOOL)
        assert F.recursive_arrow(BOOL) == F.typecheck_fpc((), w.args[1])
        cyc = F.may_terminates(w)
        v = F.finl(BOOL.left, BOOL.right, F.lam(BOOL.left.dom, F.var(0)))
        may = F.may_terminates(F.choice(v, w))
        wf = F.omega(B2B)
        sep = F.ctx_fpc_bounded(F.eta_expand(wf, B2B), wf, max_size=4)
    ok = (cyc.status == "no_certified" and may.yes and sep.is_counterexample
          and sep.context == F.fhole(B2B) and clk.seconds < 60)
    verdict(10, "FPC divergence and asymmetry", ok,
            f"omega={cyc.status} may={may.status} context={F.show_fpc(sep.context) if sep.context else None}")


def test_11_stabilization(verdict):
    with Clock() as clk:
        rep = suites.stabilization(pairs=50, seed=0, max_n=8)
    n_star = rep["n_star"]
    verdict(11, "stabilization probe", n_star is not None and n_star <= 8 and clk.seconds < 300,
            f"n*={n_star} time={clk.seconds:.1f}s")
