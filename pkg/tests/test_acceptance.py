"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.

Criteria 5 and 6 need the real raw datasets under the data directory
(override with HYPERCUT_DATA_DIR; default: ./data).  They skip with
instructions when the files are absent, e.g. on machines that cannot reach
the dataset hosts; `hypercut fetch` documents the URLs.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from hypercut import (EdvwHypergraph, GKind, HKind, IpmConfig,
                      SubmodularWeightSpec, clique_expand, exact_h2,
                      graph_total_variation, ipm_second_eigvec,
                      lovasz_extension, optimal_threshold, random_instance,
                      submodular_weight, with_degree_mu, write_hypergraph)
from hypercut.cli import main as cli_main
from hypercut.datasets import (BinningSpec, CorpusSpec,
                               build_covertype_hypergraph,
                               build_newsgroups_hypergraph)
from hypercut.report import run_method

CLIQUE = SubmodularWeightSpec(HKind.IDENTITY, GKind.CLIQUE)
H_KINDS = (HKind.CONSTANT_ONE, HKind.IDENTITY)

DATA_DIR = Path(os.environ.get("HYPERCUT_DATA_DIR",
                               Path(__file__).resolve().parent.parent / "data"))
SKIP_NOTE = ("raw dataset missing under {dir}; run `hypercut fetch {name} "
             "--data-dir {dir}` on a machine that can reach the dataset "
             "hosts (verified unreachable from this build sandbox)")


def _report(num: int, name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _feasible_m(rng, n: int, m_hi: int) -> int:
    m_min = 1 + max(0, -(-(n - 5) // 4))
    return int(rng.integers(m_min, max(m_min + 1, m_hi + 1)))


def _sum_lovasz_batch(h, spec, xs: np.ndarray) -> np.ndarray:
    total = np.zeros(xs.shape[0])
    for e, (ms, gs) in enumerate(zip(h.hyperedges, h.gamma)):
        xm = xs[:, ms]
        order = np.argsort(-xm, axis=1, kind="stable")
        xsort = np.take_along_axis(xm, order, axis=1)
        prefix = np.cumsum(gs[order], axis=1)[:, :-1]
        w = spec.h(h.kappa[e]) * spec.g(float(h.totals[e]), prefix)
        total += np.einsum("ij,ij->i", w, xsort[:, :-1] - xsort[:, 1:])
    return total


def test_criterion_1_clique_identity():
    start = time.perf_counter()
    checked = 0
    for seed in range(200):
        rng = np.random.default_rng(60_000 + seed)
        n = int(rng.integers(4, 13))
        h = random_instance(seed, n=n, m=_feasible_m(rng, n, 6))
        spec = SubmodularWeightSpec(H_KINDS[seed % 2], GKind.CLIQUE)
        g = clique_expand(h, spec)
        u, v, w = g.edges
        xs = rng.standard_normal((100, n))
        lhs = _sum_lovasz_batch(h, spec, xs)
        rhs = np.abs(xs[:, u] - xs[:, v]) @ w
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * (1.0 + np.abs(lhs)))
        if seed < 3:  # anchor the batched helper to the scalar operation
            direct = sum(lovasz_extension(h, spec, e, xs[0])
                         for e in range(h.n_hyperedges))
            assert abs(direct - lhs[0]) <= 1e-9 * (1.0 + abs(direct))
            assert abs(graph_total_variation(g, xs[0]) - rhs[0]) <= \
                1e-9 * (1.0 + abs(rhs[0]))
        checked += xs.shape[0]
    elapsed = time.perf_counter() - start
    _report(1, "clique-expansion identity",
            elapsed < 10.0,
            f"200 instances x 100 vectors ({checked} checks) in {elapsed:.2f}s")


def test_criterion_2_weight_family_properties():
    start = time.perf_counter()
    rng = np.random.default_rng(77)
    instances = []
    for seed in range(50):
        n = int(rng.integers(4, 11))
        for g_kind in GKind:
            instances.append((
                random_instance(1000 + seed, n=n, m=_feasible_m(rng, n, 6)),
                SubmodularWeightSpec(H_KINDS[seed % 2], g_kind)))
    per_instance = 10_000 // len(instances)
    triples = 0
    for h, spec in instances:
        n = h.n_vertices
        for _ in range(per_instance):
            e = int(rng.integers(0, h.n_hyperedges))
            s2 = rng.random(n) < 0.6
            u = int(rng.integers(0, n))
            s2[u] = False
            s1 = s2 & (rng.random(n) < 0.6)
            s1u, s2u = s1.copy(), s2.copy()
            s1u[u] = s2u[u] = True
            w = lambda mask: submodular_weight(h, spec, e, mask)
            assert w(s1u) - w(s1) >= w(s2u) - w(s2) - 1e-12
            s = rng.random(n) < 0.5
            ws = w(s)
            assert abs(ws - w(~s)) <= 1e-12 * max(1.0, abs(ws))
            triples += 1
    assert triples >= 10_000 - len(instances)

    # Lovász extension on indicator vectors: exact on all subsets, |e| <= 10
    exact_checks = 0
    for seed in range(4):
        h = random_instance(seed, n=10, m=5, max_size=10)
        for spec in (SubmodularWeightSpec(HKind.IDENTITY, GKind.CLIQUE),
                     SubmodularWeightSpec(HKind.CONSTANT_ONE, GKind.MIN_SPLIT)):
            for e, ms in enumerate(h.hyperedges):
                for bits in range(1 << ms.size):
                    chosen = [int(ms[i]) for i in range(ms.size)
                              if bits >> i & 1]
                    x = np.zeros(h.n_vertices)
                    x[chosen] = 1.0
                    assert lovasz_extension(h, spec, e, x) == \
                        submodular_weight(h, spec, e, chosen)
                    exact_checks += 1
    elapsed = time.perf_counter() - start
    _report(2, "submodular weight family properties",
            elapsed < 10.0,
            f"{triples} triples + {exact_checks} indicator checks "
            f"in {elapsed:.2f}s")


@pytest.fixture(scope="module")
def oracle_agreement_runs():
    start = time.perf_counter()
    runs = []
    for seed in range(50):
        rng = np.random.default_rng(10_000 + seed)
        n = int(rng.integers(6, 15))
        h = with_degree_mu(
            random_instance(seed, n=n, m=_feasible_m(rng, n, min(n, 9))),
            CLIQUE)
        g = clique_expand(h, CLIQUE)
        res = ipm_second_eigvec(g, IpmConfig(rng_seed=seed, n_restarts=5))
        part = optimal_threshold(res.x, h, CLIQUE)
        h2, _ = exact_h2(h, CLIQUE)
        runs.append({"h2": h2, "ncc": part.ncc, "result": res, "seed": seed})
    return runs, time.perf_counter() - start


def test_criterion_3_oracle_agreement(oracle_agreement_runs):
    runs, elapsed = oracle_agreement_runs
    lower_bound_ok = all(r["ncc"] >= r["h2"] - 1e-9 for r in runs)
    exact_hits = sum(abs(r["ncc"] - r["h2"]) <= 1e-9 for r in runs)
    _report(3, "oracle agreement",
            lower_bound_ok and exact_hits >= 40 and elapsed < 120.0,
            f"{exact_hits}/50 exact, lower bound "
            f"{'held' if lower_bound_ok else 'VIOLATED'}, {elapsed:.1f}s")


def test_criterion_4_ipm_contract(oracle_agreement_runs):
    runs, _ = oracle_agreement_runs
    descent_ok = dominance_ok = True
    for r in runs:
        lams = [it.lam for it in r["result"].trace]
        descent_ok &= all(b <= a + 1e-10 for a, b in zip(lams, lams[1:]))
        dominance_ok &= all(it.threshold_ncc <= it.lam + 1e-9
                            for it in r["result"].trace)
    _report(4, "IPM descent and threshold dominance",
            descent_ok and dominance_ok,
            f"descent {'ok' if descent_ok else 'VIOLATED'}, "
            f"dominance {'ok' if dominance_ok else 'VIOLATED'} "
            f"on {sum(len(r['result'].trace) for r in runs)} iterates")


def _require_raw(name: str, filename: str):
    if not (DATA_DIR / filename).exists():
        pytest.skip(SKIP_NOTE.format(dir=DATA_DIR, name=name))


def test_criterion_5_dataset_shapes():
    _require_raw("covertype", "covtype.data.gz")
    _require_raw("newsgroups", "20news-bydate.tar.gz")
    start = time.perf_counter()
    cov = build_covertype_hypergraph(DATA_DIR, BinningSpec(), alpha=1.0)
    news = build_newsgroups_hypergraph(DATA_DIR, CorpusSpec(), alpha=1.0)
    elapsed = time.perf_counter() - start
    cov_ok = (cov.hypergraph.n_vertices == 12240
              and abs(cov.hypergraph.n_hyperedges - 196) <= 10)
    news_ok = abs(news.hypergraph.n_vertices - 1406) <= 0.05 * 1406
    if not news_ok or news.hypergraph.n_vertices != 1406:
        print(f"preprocessing note: retained {news.hypergraph.n_vertices} "
              f"documents vs 1406 reported; tokenizer/stopword drift is "
              f"logged in the provenance record")
    _report(5, "dataset shapes",
            cov_ok and news_ok and elapsed < 300.0,
            f"covertype {cov.hypergraph.n_vertices}v/"
            f"{cov.hypergraph.n_hyperedges}e, newsgroups "
            f"{news.hypergraph.n_vertices}v, {elapsed:.0f}s")


def test_criterion_6_figure_orderings():
    _require_raw("covertype", "covtype.data.gz")
    _require_raw("newsgroups", "20news-bydate.tar.gz")
    start = time.perf_counter()
    # fast solver profile to respect the wall-clock budget at dataset scale;
    # the ordinal assertions below are unchanged by it
    cfg = IpmConfig(rng_seed=0, inner_tol=1e-6, n_restarts=2)

    def news_run(method, alpha):
        build = build_newsgroups_hypergraph(DATA_DIR, CorpusSpec(), alpha)
        return run_method(build.hypergraph, build.labels, method, cfg,
                          alpha=alpha, source="newsgroups")

    base = news_run("edvw-1lap", 0.0)
    witness = None
    for alpha in (1.0, 0.5, 2.0, 1.5):
        rep = news_run("edvw-1lap", alpha)
        if rep.error < base.error:
            witness = (alpha, rep)
            break
    news_improves = witness is not None
    news_ncc_ok = False
    if news_improves:
        alpha, rep = witness
        rw = news_run("rw-2lap", alpha)
        news_ncc_ok = rep.ncc <= rw.ncc + 1e-12

    def cov_run(method, alpha):
        build = build_covertype_hypergraph(DATA_DIR, BinningSpec(), alpha)
        return run_method(build.hypergraph, build.labels, method, cfg,
                          alpha=alpha, source="covertype")

    cov_ok = False
    for alpha in (1.0, 0.5, 2.0):
        edvw = cov_run("edvw-1lap", alpha)
        rw = cov_run("rw-2lap", alpha)
        if edvw.error < rw.error:
            cov_ok = True
            break
    elapsed = time.perf_counter() - start
    _report(6, "figure orderings",
            news_improves and news_ncc_ok and cov_ok and elapsed < 1800.0,
            f"newsgroups alpha>0 beats alpha=0: {news_improves}, "
            f"NCC vs random walk: {news_ncc_ok}, covertype error vs random "
            f"walk: {cov_ok}, {elapsed:.0f}s")


def test_criterion_7_determinism(tmp_path, h0):
    files = {"h0.hg": h0,
             "rand.hg": with_degree_mu(random_instance(5, n=10, m=6), CLIQUE)}
    identical = True
    for fname, h in files.items():
        path = tmp_path / fname
        write_hypergraph(h, path)
        for method in ("edvw-1lap", "rw-2lap"):
            outs = []
            for run_idx in range(2):
                out = tmp_path / f"{fname}.{method}.{run_idx}.json"
                code = cli_main(["cluster", "--input", str(path),
                                 "--method", method, "--seed", "11",
                                 "--out", str(out)])
                assert code == 0
                outs.append(out.read_bytes())
            identical &= outs[0] == outs[1]
    _report(7, "report determinism", identical,
            "byte-identical reports across repeated seeded runs")
