"""Named property suites.  Each returns a JSON-ready report dict.

Reports never contain timing; the CLI adds it on request.  All sampling
is seeded and the seed is echoed in the report.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor

from .gsos.finite import henceforth, is_logical_relation, random_model
from .gsos.gfp_oracle import gfp_matrix
from .gsos.kernel import behaviors_agree
from .gsos.mutcl_law import (
    _COMBINATOR_ARGS,
    CHECK_TYPES,
    OperatorSampler,
    check_strict,
    check_universe,
    check_weak_model,
    derived_gamma,
    lax_samples,
    replay_lax_violation,
)
from .ctx import ctx_preorder_bounded
from .logrel import CheckerConfig, RelationChecker
from .mutcl_semantics import _gamma, trace
from .mutcl_syntax import OPERATORS, SortedPool, Term, enumerate_terms, show, typecheck
from .ty import Fun as FunTy
from .ty import show_ty

SUITES = (
    "congruence",
    "fundamental",
    "soundness-xcheck",
    "lax-bialgebra",
    "rho-vs-gamma",
    "henceforth-oracle",
    "stabilization",
)


def default_jobs() -> int:
    return os.cpu_count() or 1


def _chunks(items: list, k: int) -> list[list]:
    return [items[i::k] for i in range(k)]


def _pmap(fn, items: list, jobs: int) -> list:
    """Order-preserving map; ``jobs > 1`` spreads contiguous strides over processes."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    jobs = min(jobs, len(items))
    indexed = list(enumerate(items))
    with ProcessPoolExecutor(jobs) as ex:
        parts = list(ex.map(_apply_many, [fn] * jobs, _chunks(indexed, jobs)))
    out: list = [None] * len(items)
    for part in parts:
        for i, r in part:
            out[i] = r
    return out


def _apply_many(fn, indexed):
    return [(i, fn(x)) for i, x in indexed]


def _report(name: str, failures: list, config: dict, **counts) -> dict:
    return {
        "suite": name,
        "passed": not failures,
        "config": config,
        **counts,
        "failures": failures[:20],
    }


# -- rho vs gamma -----------------------------------------------------------

def rho_vs_gamma(max_size: int = 6, types=CHECK_TYPES, pool_size: int = 4) -> dict:
    """The law-derived operational model equals the hand-written one on every enumerated term."""
    derived = derived_gamma(check=True)
    probes = SortedPool(pool_size, 3)
    uni = check_universe()
    checked = 0
    failures = []
    for ty in types:
        labels = probes[ty.dom] if isinstance(ty, FunTy) else ()
        for t in enumerate_terms(ty, max_size, uni):
            checked += 1
            if not behaviors_agree(derived(t), _gamma(t), labels):
                failures.append({"term": show(t), "type": show_ty(ty)})
    config = {"max_size": max_size, "types": [show_ty(t) for t in types]}
    return _report("rho-vs-gamma", failures, config, checked=checked, mismatches=len(failures))


# -- congruence -------------------------------------------------------------

def _congruence_worker(args):
    seed, ops, per_op, n, pool_size, pool_nodes, fuel = args
    cfg = CheckerConfig("L", n + 1, SortedPool(pool_size, pool_nodes), fuel)
    checker = RelationChecker(cfg)
    out = []
    for op in ops:
        sampler = OperatorSampler(seed * 1000 + OPERATORS.index(op))
        rng = random.Random(seed * 7919 + OPERATORS.index(op))
        stats = {"op": op, "samples": 0, "nontrivial": 0, "unknown": 0, "violations": []}
        attempts = 0
        while stats["samples"] < per_op and attempts < 50 * per_op:
            attempts += 1
            _, tys, left = sampler.sample(op)
            right = _related_partners(checker, sampler, rng, n + 1, left)
            if right is None:
                continue
            stats["samples"] += 1
            stats["nontrivial"] += right != left
            t, s = Term(op, tys, left), Term(op, tys, right)
            v = checker.rel(n + 1, typecheck(t), t, s)
            if v.unknown:
                stats["unknown"] += 1
            if v.fails:
                stats["violations"].append({"left": show(t), "right": show(s), **v.to_json()})
        out.append(stats)
    return out


def _related_partners(checker, sampler, rng, n, left):
    """Partners ``s_i`` with ``rel_n(t_i, s_i)`` holding; None if the screen rejects."""
    right = []
    for t in left:
        ty = typecheck(t)
        chosen = None
        if rng.random() < 0.6:
            cands = sampler._terms(ty)
            for _ in range(6):
                s = rng.choice(cands)
                if s != t and checker.rel(n, ty, t, s).holds:
                    chosen = s
                    break
        if chosen is None:
            if not checker.rel(n, ty, t, t).holds:
                return None
            chosen = t
        right.append(chosen)
    return tuple(right)


def congruence(per_op: int = 200, seed: int = 0, n: int = 3, pool_size: int = 8,
               pool_nodes: int = 4, fuel: int = 200, jobs: int = 1) -> dict:
    """Operands related at n+1 give composites that never fail at n+1."""
    groups = _chunks(list(OPERATORS), max(1, min(jobs, len(OPERATORS))))
    work = [(seed, g, per_op, n, pool_size, pool_nodes, fuel) for g in groups]
    per = {s["op"]: s for part in _pmap(_congruence_worker, work, jobs) for s in part}
    per_op_rep = {op: {k: v for k, v in per[op].items() if k not in ("op", "violations")}
                  | {"violations": len(per[op]["violations"])} for op in OPERATORS}
    failures = [dict(op=op, **v) for op in OPERATORS for v in per[op]["violations"]]
    short = [op for op in OPERATORS if per[op]["samples"] < per_op]
    if short:
        failures.append({"reason": "could not draw enough screened samples", "ops": short})
    config = {"per_op": per_op, "seed": seed, "n": n, "pool_size": pool_size,
              "pool_nodes": pool_nodes, "fuel": fuel}
    return _report("congruence", failures, config, per_op=per_op_rep,
                   violations=sum(len(per[op]["violations"]) for op in OPERATORS))


# -- fundamental property ---------------------------------------------------

def _fundamental_worker(args):
    terms, n, pool_size, pool_nodes, fuel = args
    cfg = CheckerConfig("L", n, SortedPool(pool_size, pool_nodes), fuel)
    checker = RelationChecker(cfg)
    out = []
    for t in terms:
        v = checker.rel(n, typecheck(t), t, t)
        out.append((show(t), v.outcome.value, v.to_json() if v.fails else None))
    return out


def fundamental(max_size: int = 5, n: int = 4, pool_size: int = 8, pool_nodes: int = 4,
                fuel: int = 200, jobs: int = 1) -> dict:
    """Every enumerated term of the check types is self-related (never fails)."""
    uni = check_universe()
    terms = [t for ty in CHECK_TYPES + _COMBINATOR_ARGS for t in enumerate_terms(ty, max_size, uni)]
    k = max(1, min(jobs, len(terms)))
    work = [(chunk, n, pool_size, pool_nodes, fuel) for chunk in _chunks(terms, k)]
    rows = [r for part in _pmap(_fundamental_worker, work, jobs) for r in part]
    rows.sort()
    failures = [{"term": t, **j} for t, o, j in rows if o == "fails"]
    counts = {o: sum(1 for _, x, _ in rows if x == o) for o in ("holds", "unknown", "fails")}
    config = {"max_size": max_size, "n": n, "pool_size": pool_size, "pool_nodes": pool_nodes,
              "fuel": fuel}
    return _report("fundamental", failures, config, checked=len(rows), outcomes=counts)


# -- seeded pair samples ----------------------------------------------------

def sample_pairs(count: int, seed: int, max_size: int = 5) -> list[tuple[Term, Term]]:
    """Seeded same-type pairs: a mix of identical, reduct-related and unrelated terms."""
    rng = random.Random(seed)
    uni = check_universe()
    by_type = {ty: enumerate_terms(ty, max_size, uni) for ty in CHECK_TYPES}
    out = []
    while len(out) < count:
        ty = rng.choice(CHECK_TYPES)
        terms = by_type[ty]
        t = rng.choice(terms)
        r = rng.random()
        if r < 0.2:
            s = t
        elif r < 0.45:
            s = rng.choice(trace(t, 50).terms)
        else:
            s = rng.choice(terms)
        if rng.random() < 0.5:
            t, s = s, t
        out.append((t, s))
    return out


# -- soundness cross-check --------------------------------------------------

def _xcheck_worker(args):
    pairs, n, ctx_size, fuel, pool_size, pool_nodes = args
    cfg = CheckerConfig("L", n, SortedPool(pool_size, pool_nodes), 200)
    checker = RelationChecker(cfg)
    out = []
    for t, s in pairs:
        v = checker.rel(n, typecheck(t), t, s)
        c = ctx_preorder_bounded(t, s, "all", ctx_size, fuel)
        out.append((show(t), show(s), v.outcome.value, c.status,
                    c.to_json() if c.is_counterexample else None))
    return out


def soundness_xcheck(pairs: int = 100, seed: int = 0, n: int = 6, ctx_size: int = 7,
                     fuel: int = 500, pool_size: int = 8, pool_nodes: int = 4, jobs: int = 1) -> dict:
    """No pair is both related at index n and separated by a context."""
    sample = sample_pairs(pairs, seed)
    strided = _chunks(list(enumerate(sample)), max(1, min(jobs, len(sample))))
    work = [([p for _, p in ch], n, ctx_size, fuel, pool_size, pool_nodes) for ch in strided]
    results = _pmap(_xcheck_worker, work, jobs)
    rows: list = [None] * len(sample)
    for ch, res in zip(strided, results):
        for (i, _), r in zip(ch, res):
            rows[i] = r
    failures = [
        {"left": t, "right": s, "rel": o, "ctx": c}
        for t, s, o, st, c in rows if o == "holds" and st == "counterexample"
    ]
    rel_counts = {o: sum(1 for r in rows if r[2] == o) for o in ("holds", "unknown", "fails")}
    ctx_counts = {o: sum(1 for r in rows if r[3] == o)
                  for o in ("no_counterexample", "unknown", "counterexample")}
    config = {"pairs": pairs, "seed": seed, "n": n, "ctx_size": ctx_size, "fuel": fuel,
              "pool_size": pool_size, "pool_nodes": pool_nodes}
    return _report("soundness-xcheck", failures, config, rel_outcomes=rel_counts,
                   ctx_outcomes=ctx_counts, inconsistencies=len(failures))


# -- lax bialgebra ----------------------------------------------------------

def lax_bialgebra(per_op: int = 100, seed: int = 0, fuel: int = 60) -> dict:
    """Weak model passes for all operators; the mutated model fails with a replayable witness."""
    samples = lax_samples(per_op, seed)
    honest = check_weak_model(samples, fuel)
    mutated = check_weak_model(samples, fuel, mutated=True)
    strict = check_strict(samples)
    failures = [
        {"op": v.op, "sample": show(v.sample), "reason": v.reason} for v in honest.failures()
    ]
    control = mutated.failures()
    replay = replay_lax_violation(control[0], fuel) if control else None
    if not control:
        failures.append({"reason": "mutated control was not rejected"})
    elif replay["reachable_in_honest_model"] is False:
        failures.append({"reason": "control witness does not replay", "replay": replay})
    if not strict.passed:
        failures.extend({"op": v.op, "sample": show(v.sample), "reason": v.reason}
                        for v in strict.failures())
    config = {"per_op": per_op, "seed": seed, "fuel": fuel}
    return _report(
        "lax-bialgebra", failures, config,
        per_op={op: {"samples": r.samples, "requirements": r.requirements, "passed": r.passed}
                for op, r in sorted(honest.per_op.items(), key=lambda kv: OPERATORS.index(kv[0]))},
        control={"rejected_ops": sorted(v.op for v in control), "replay": replay},
        strict_passed=strict.passed,
    )


# -- finite-model oracle ----------------------------------------------------

def henceforth_oracle(models: int = 20, seed: int = 0, max_states: int = 5) -> dict:
    """Henceforth limit from ⊤ equals the matrix gfp iteration; ν is within the lattice size."""
    rows = []
    failures = []
    for k in range(models):
        m = random_model(seed + k, max_states)
        res = henceforth(m, max_steps=10_000)
        oracle, _ = gfp_matrix(m)
        row = {"model_seed": seed + k, "pairs": len(m.pairs()), "nu": res.nu,
               "limit_size": len(res.limit), "equal": res.limit == oracle,
               "nu_within_lattice": res.nu <= m.lattice_size(),
               "logical_relation": is_logical_relation(m, res.limit)}
        rows.append(row)
        if not (row["equal"] and row["nu_within_lattice"] and row["logical_relation"]):
            failures.append(row)
    config = {"models": models, "seed": seed, "max_states": max_states}
    return _report("henceforth-oracle", failures, config, models=rows)


# -- stabilization ----------------------------------------------------------

def stabilization(pairs: int = 50, seed: int = 0, max_n: int = 8, pool_size: int = 8,
                  pool_nodes: int = 4, fuel: int = 200) -> dict:
    from .logrel import stabilization_probe

    sample = sample_pairs(pairs, seed)
    cfg = CheckerConfig("L", max_n, SortedPool(pool_size, pool_nodes), fuel)
    n_star, vectors = stabilization_probe(cfg, sample, max_n)
    failures = [] if n_star is not None and n_star <= max_n else [{"reason": "no stabilization"}]
    config = {"pairs": pairs, "seed": seed, "max_n": max_n, "pool_size": pool_size,
              "pool_nodes": pool_nodes, "fuel": fuel}
    summary = [{o: vec.count(o) for o in ("holds", "unknown", "fails")} for vec in vectors]
    return _report("stabilization", failures, config, n_star=n_star, per_index=summary)


def run_suite(name: str, **kw) -> dict:
    fn = {
        "congruence": congruence,
        "fundamental": fundamental,
        "soundness-xcheck": soundness_xcheck,
        "lax-bialgebra": lax_bialgebra,
        "rho-vs-gamma": rho_vs_gamma,
        "henceforth-oracle": henceforth_oracle,
        "stabilization": stabilization,
    }[name]
    return fn(**kw)
