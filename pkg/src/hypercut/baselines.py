"""Comparison methods: the EDVW random-walk Laplacian and the EDVW-blind variant.

The random-walk model does a two-step walk: from a vertex pick an incident
hyperedge proportionally to kappa, then land on a member proportionally to its
gamma within that hyperedge.  The symmetric normalized Laplacian of that walk
is clustered with the ordinary (2-)spectral pipeline and thresholded against
the same hypergraph NCC objective as the proposed method, so the two are
directly comparable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import (EdvwHypergraph, GKind, HKind, Partition,
                   SubmodularWeightSpec, with_degree_mu)
from .errors import SolverConvergenceError
from .solver import optimal_threshold, second_eigvec_2lap

logger = logging.getLogger(__name__)

#: materializing N x N matrices is refused above this size
DENSE_CAP = 4000


@dataclass(frozen=True, eq=False)
class RwLaplacian:
    """Two-step transition structure, stationary distribution and Laplacian.

    The transition matrix factors through the hyperedges
    (P = vertex->hyperedge @ hyperedge->vertex), so it is stored in factored
    form; P and L are materialized on demand for moderate sizes and exposed
    as LinearOperators above that.
    """

    p_ve: sp.csr_array   # n x m, rows sum to 1
    p_ev: sp.csr_array   # m x n, rows sum to 1
    pi: np.ndarray       # stationary distribution of the composite walk

    @property
    def n_vertices(self) -> int:
        return self.p_ve.shape[0]

    @cached_property
    def P(self) -> np.ndarray:
        if self.n_vertices > DENSE_CAP:
            raise ValueError("transition matrix too large to materialize; "
                             "use transition_operator()")
        return (self.p_ve @ self.p_ev).toarray()

    def transition_operator(self) -> spla.LinearOperator:
        n = self.n_vertices

        def matvec(x):
            return self.p_ve @ (self.p_ev @ x)

        def rmatvec(x):
            return self.p_ev.T @ (self.p_ve.T @ x)

        return spla.LinearOperator((n, n), matvec=matvec, rmatvec=rmatvec)

    @cached_property
    def L(self):
        """Symmetric normalized Laplacian, dense for moderate sizes."""
        if self.n_vertices <= DENSE_CAP:
            p = self.P
            s = np.sqrt(self.pi)
            half = (s[:, None] * p) / s[None, :]
            return np.eye(self.n_vertices) - 0.5 * (half + half.T)
        return self.laplacian_operator()

    def laplacian_operator(self) -> spla.LinearOperator:
        n = self.n_vertices
        s = np.sqrt(self.pi)
        inv_s = 1.0 / s

        def matvec(x):
            a = s * (self.p_ve @ (self.p_ev @ (inv_s * x)))
            b = inv_s * (self.p_ev.T @ (self.p_ve.T @ (s * x)))
            return x - 0.5 * (a + b)

        return spla.LinearOperator((n, n), matvec=matvec, rmatvec=matvec)

    def diagnostics(self) -> dict:
        """JSON-serializable sanity numbers for the walk construction."""
        ones = np.ones(self.n_vertices)
        row_sums = self.p_ve @ (self.p_ev @ ones)
        pi_next = self.p_ev.T @ (self.p_ve.T @ self.pi)
        return {
            "n_vertices": int(self.n_vertices),
            "n_hyperedges": int(self.p_ve.shape[1]),
            "row_sum_max_error": float(np.max(np.abs(row_sums - 1.0))),
            "pi_fixed_point_residual": float(np.abs(pi_next - self.pi).sum()),
            "pi_min": float(self.pi.min()),
            "pi": [float(p) for p in self.pi],
        }


def build_rw_laplacian(h: EdvwHypergraph, pi_tol: float = 1e-12,
                       pi_max_iters: int = 200_000) -> RwLaplacian:
    """Assemble the two-step walk and its stationary distribution.

    Hyperedge selection is kappa-proportional and ignores the gammas of the
    selecting vertex; the landing step is gamma-proportional.  The stationary
    distribution comes from power iteration on the factored transition,
    stopped at an l1 fixed-point residual of `pi_tol`.
    """
    n, m = h.n_vertices, h.n_hyperedges
    kdeg = np.zeros(n)
    for e, ms in enumerate(h.hyperedges):
        kdeg[ms] += h.kappa[e]

    rows, cols, v_ve, v_ev = [], [], [], []
    for e, (ms, gs) in enumerate(zip(h.hyperedges, h.gamma)):
        rows.append(ms)
        cols.append(np.full(ms.size, e, dtype=np.int64))
        v_ve.append(h.kappa[e] / kdeg[ms])
        v_ev.append(gs / float(h.totals[e]))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    p_ve = sp.coo_array((np.concatenate(v_ve), (rows, cols)), shape=(n, m)).tocsr()
    p_ev = sp.coo_array((np.concatenate(v_ev), (cols, rows)), shape=(m, n)).tocsr()

    pi = np.full(n, 1.0 / n)
    for _ in range(pi_max_iters):
        nxt = p_ev.T @ (p_ve.T @ pi)
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        if residual <= pi_tol:
            break
    else:
        raise SolverConvergenceError(
            "stationary distribution power iteration did not converge",
            diagnostics={"residual": residual, "iters": pi_max_iters})
    if not np.all(pi > 0.0):
        raise SolverConvergenceError("stationary distribution has zero mass")
    return RwLaplacian(p_ve, p_ev, pi)


def rw_cluster(h: EdvwHypergraph, rng_seed: int = 0) -> Partition:
    """Random-walk spectral baseline, thresholded on the hypergraph NCC.

    The second eigenvector of the normalized Laplacian lives in the
    sqrt(pi)-transformed space; it is mapped back (divided by sqrt(pi),
    the standard row-normalization of two-way spectral clustering) before
    the threshold sweep.  Deterministic given h.
    """
    spec = SubmodularWeightSpec(HKind.IDENTITY, GKind.CLIQUE)
    h_deg = with_degree_mu(h, spec)
    rwl = build_rw_laplacian(h)
    y = second_eigvec_2lap(rwl.L, nullspace=np.sqrt(rwl.pi), rng_seed=rng_seed)
    x = y / np.sqrt(rwl.pi)
    return optimal_threshold(x, h_deg, spec)


def cardinality_variant(h: EdvwHypergraph,
                        recompute_kappa_std: bool = False) -> EdvwHypergraph:
    """Copy of h with every member EDVW replaced by one.

    With `recompute_kappa_std` the hyperedge strengths are refreshed with the
    membership-indicator standard deviation over all vertices (the rule the
    dataset builders use); otherwise kappa is kept.  Idempotent either way.
    """
    from .datasets import kappa_from_std  # local import; datasets builds on core

    ones = [np.ones(ms.size) for ms in h.hyperedges]
    if recompute_kappa_std:
        kappa = np.array([kappa_from_std(ms, np.ones(ms.size), h.n_vertices)
                          for ms in h.hyperedges])
    else:
        kappa = h.kappa
    return EdvwHypergraph(h.n_vertices, h.hyperedges, ones, kappa, h.mu,
                          check_connected=False)
