"""Pointwise tensor algebra on a single chart.

Conventions: the derivative direction of a connection sits in the first
lower slot, so nabla_{e_i} e_j = Gamma^k_ij e_k, and the curvature sign
follows R(e_i, e_j) e_l = nabla_i nabla_j e_l - nabla_j nabla_i e_l.
All functions here take numpy arrays of pointwise values plus whatever
first derivatives they need; assembling those from jets is the caller's
job (see fields.py), which keeps this module easy to test against
hand-built data.
"""

from __future__ import annotations

import numpy as np

from .fields import ConnectionField, MetricField


def torsion_values(gamma: np.ndarray) -> np.ndarray:
    """T^k_ij = Gamma^k_ij - Gamma^k_ji."""
    return gamma - np.transpose(gamma, (0, 2, 1))


def nabla_g_values(g: np.ndarray, dg: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """C[i, j, k] = (nabla_i g)(e_j, e_k); dg[i, j, k] = d_i g_jk."""
    lowered = np.einsum("lij,lk->ijk", gamma, g)
    return dg - lowered - np.transpose(lowered, (0, 2, 1))


def cubic_values(metric: MetricField, conn: ConnectionField, point) -> np.ndarray:
    g, dg = metric.partial_values(point)
    return nabla_g_values(g, dg, conn.values(point))


def statistical_residual(metric: MetricField, conn: ConnectionField, point) -> float:
    """Max over torsion entries and the (i, j) symmetry defect of nabla g."""
    gamma = conn.values(point)
    c = cubic_values(metric, conn, point)
    r_tor = float(np.max(np.abs(torsion_values(gamma))))
    r_sym = float(np.max(np.abs(c - np.transpose(c, (1, 0, 2)))))
    return max(r_tor, r_sym)


def duality_residual(metric: MetricField, conn: ConnectionField, dual: ConnectionField, point) -> float:
    """Defect of d_i g_jk = g(nabla_i e_j, e_k) + g(e_j, dual-nabla_i e_k)."""
    g, dg = metric.partial_values(point)
    lhs = dg
    a = np.einsum("lij,lk->ijk", conn.values(point), g)
    b = np.einsum("lik,jl->ijk", dual.values(point), g)
    return float(np.max(np.abs(lhs - a - b)))


def curvature_values(conn: ConnectionField, point) -> np.ndarray:
    """R[k, l, i, j] = coefficient of e_k in R(e_i, e_j) e_l."""
    gamma = conn.values(point)
    dgamma = conn.d_values(point)  # dgamma[a, k, i, j] = d_a Gamma^k_ij
    term = np.einsum("ikjl->klij", dgamma)  # term[k,l,i,j] = d_i Gamma^k_jl
    quad = np.einsum("kim,mjl->klij", gamma, gamma)
    r = term + quad
    return r - np.transpose(r, (0, 1, 3, 2))


def curvature_duality_residual(
    metric: MetricField, conn: ConnectionField, dual: ConnectionField, point
) -> float:
    """Defect of g(R(X,Y)Z, W) + g(Z, dual-R(X,Y)W) = 0."""
    g = metric.values(point)
    r = curvature_values(conn, point)
    rd = curvature_values(dual, point)
    lhs = np.einsum("kzij,kw->zwij", r, g) + np.einsum("kwij,zk->zwij", rd, g)
    return float(np.max(np.abs(lhs)))


def constant_curvature_residual(metric: MetricField, conn: ConnectionField, k: float, point) -> float:
    """Defect of R(X,Y)Z = k (g(Y,Z) X - g(X,Z) Y) at the given point."""
    g = metric.values(point)
    r = curvature_values(conn, point)
    n = g.shape[0]
    eye = np.eye(n)
    model = k * (np.einsum("jl,ai->alij", g, eye) - np.einsum("il,aj->alij", g, eye))
    # model[a, l, i, j] = k (g_jl delta^a_i - g_il delta^a_j)
    return float(np.max(np.abs(r - model)))


def dual_formula_residual(
    metric: MetricField, conn: ConnectionField, dual: ConnectionField, point
) -> float:
    """Defect of dual-Gamma = 2 LC - Gamma, valid when the pair is statistical."""
    from .fields import LeviCivitaConnection

    lc = LeviCivitaConnection(metric).values(point)
    return float(np.max(np.abs(dual.values(point) - (2.0 * lc - conn.values(point)))))

# ---------------------------------------------------------------------------
# Named entry points over sample sets.  These wrap the pointwise kernels
# above into CheckResult-producing suite checks.

def levi_civita(metric: MetricField, point) -> np.ndarray:
    """Christoffel symbols of the metric at one point, Gamma[k, i, j]."""
    from .fields import LeviCivitaConnection

    return LeviCivitaConnection(metric).values(point)


def torsion(conn: ConnectionField, point) -> np.ndarray:
    return torsion_values(conn.values(point))


def nabla_g(conn: ConnectionField, metric: MetricField, point) -> np.ndarray:
    return cubic_values(metric, conn, point)


def curvature(conn: ConnectionField, point) -> np.ndarray:
    return curvature_values(conn, point)


def dual_connection(conn: ConnectionField, metric: MetricField) -> ConnectionField:
    from .fields import DualConnection

    return DualConnection(conn, metric)


def _sweep(name, points, tol, fn):
    from .errors import SubgeoError
    from .results import summarize

    residuals, incidents = [], 0
    for p in points:
        try:
            residuals.append(fn(p))
        except SubgeoError:
            incidents += 1
    return summarize(name, residuals, tol, len(points), incidents=incidents)


def is_statistical(conn: ConnectionField, metric: MetricField, points, tol):
    """Torsion-freeness plus total symmetry of nabla g over the samples."""
    return _sweep("is_statistical", points, tol,
                  lambda p: statistical_residual(metric, conn, p))


def check_curvature_duality(conn: ConnectionField, metric: MetricField, points, tol):
    dual = dual_connection(conn, metric)
    return _sweep("curvature_duality", points, tol,
                  lambda p: curvature_duality_residual(metric, conn, dual, p))


def check_constant_curvature(conn: ConnectionField, metric: MetricField, k: float, points, tol):
    res = _sweep("constant_curvature", points, tol,
                 lambda p: constant_curvature_residual(metric, conn, k, p))
    res.details["k"] = float(k)
    return res


def check_dual_involution(conn: ConnectionField, metric: MetricField, points, tol):
    """dual(dual(conn)) must reproduce conn to rounding."""
    dd = dual_connection(dual_connection(conn, metric), metric)
    return _sweep("dual_involution", points, tol,
                  lambda p: float(np.max(np.abs(dd.values(p) - conn.values(p)))))
