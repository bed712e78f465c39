"""Charted manifolds and the scalar/metric/connection field layer.

Every geometric quantity is a field evaluable as a jet at a point, so
derived objects (inverse metrics, connection coefficients, projectors)
stay differentiable to whatever order the leaf expressions support.
Finite-difference mode swaps the leaf evaluation for central differences
while leaving all derived algebra untouched, giving an independent path
through every check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exprlang
from .errors import ContractViolation
from .jets import Jet
from .linalg import jet_inverse, jet_solve, jet_values, solve_linear

FD_STEP_GRAD = 1e-6
FD_STEP_HESS = 5e-4


@dataclass(frozen=True)
class ChartedManifold:
    name: str
    dim: int
    box: tuple  # ((lo, hi), ...) of length dim
    bundle: bool = False

    def __post_init__(self):
        if len(self.box) != self.dim:
            raise ContractViolation(
                f"box has {len(self.box)} intervals for dimension {self.dim}"
            )

    def contains(self, point) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(point, self.box))

    def center(self) -> tuple:
        return tuple(0.5 * (lo + hi) for lo, hi in self.box)


# -- scalar fields ----------------------------------------------------


class ScalarField:
    """Anything evaluable as a jet; subclasses set ``dim`` and ``_jets``."""

    dim: int

    def jets(self, point, order: int) -> Jet:
        point = tuple(float(x) for x in point)
        if len(point) != self.dim:
            raise ContractViolation(f"point has {len(point)} coordinates, field needs {self.dim}")
        return self._jets(point, order)

    def value(self, point) -> float:
        return self.jets(point, 0).value


class ExprField(ScalarField):
    def __init__(self, ast, dim: int):
        self.ast = ast
        self.dim = dim

    @classmethod
    def parse(cls, text: str, dim: int, bundle: bool = False) -> "ExprField":
        return cls(exprlang.parse(text, dim, bundle=bundle), dim)

    def _jets(self, point, order):
        return exprlang.eval_jet(self.ast, point, order)

    def __repr__(self):
        return f"ExprField({exprlang.to_text(self.ast)!r})"


class FuncField(ScalarField):
    """Derived scalar field from a closure ``fn(point, order) -> Jet``."""

    def __init__(self, dim: int, fn, name: str = "derived"):
        self.dim = dim
        self._fn = fn
        self.name = name
        self._cache = {}

    def _jets(self, point, order):
        key = (point, order)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._fn(point, order)
        return hit

    def __repr__(self):
        return f"FuncField({self.name})"


class ConstField(ScalarField):
    def __init__(self, value: float, dim: int):
        self.dim = dim
        self._value = float(value)

    def _jets(self, point, order):
        return Jet.constant(self._value, self.dim, order)


class FDField(ScalarField):
    """Central-difference wrapper around another field's values.

    Supports jet orders 0..2; the step scales with the coordinate size.
    """

    def __init__(self, inner: ScalarField):
        self.inner = inner
        self.dim = inner.dim

    def _jets(self, point, order):
        if order > 2:
            raise ContractViolation(
                "finite-difference mode provides derivatives up to order 2"
            )
        f = self.inner.value
        n = self.dim
        val = f(point)
        grad = hess = None
        if order >= 1:
            grad = np.empty(n)
            for i in range(n):
                h = FD_STEP_GRAD * (1.0 + abs(point[i]))
                grad[i] = (f(_shift(point, i, h)) - f(_shift(point, i, -h))) / (2.0 * h)
        if order >= 2:
            hess = np.empty((n, n))
            steps = [FD_STEP_HESS * (1.0 + abs(point[i])) for i in range(n)]
            for i in range(n):
                hi = steps[i]
                hess[i, i] = (f(_shift(point, i, hi)) - 2.0 * val + f(_shift(point, i, -hi))) / hi**2
                for j in range(i + 1, n):
                    hj = steps[j]
                    pp = f(_shift(_shift(point, i, hi), j, hj))
                    pm = f(_shift(_shift(point, i, hi), j, -hj))
                    mp = f(_shift(_shift(point, i, -hi), j, hj))
                    mm = f(_shift(_shift(point, i, -hi), j, -hj))
                    hess[i, j] = hess[j, i] = (pp - pm - mp + mm) / (4.0 * hi * hj)
        return Jet(n, order, val, grad, hess, None)


def _shift(point, i, h):
    out = list(point)
    out[i] += h
    return tuple(out)


def make_scalar(source, dim: int, mode: str = "jet", bundle: bool = False) -> ScalarField:
    """Build a leaf field from text/AST/number, honouring the derivative mode."""
    if isinstance(source, ScalarField):
        return source
    if isinstance(source, (int, float)):
        return ConstField(float(source), dim)
    ast = exprlang.parse(source, dim, bundle=bundle) if isinstance(source, str) else source
    leaf = ExprField(ast, dim)
    return FDField(leaf) if mode == "fd" else leaf


# -- metric fields ----------------------------------------------------


class MetricField:
    """Symmetric (0,2) field; only entries with i <= j are stored."""

    def __init__(self, dim: int, entries):
        self.dim = dim
        self._entries = {}
        for i in range(dim):
            for j in range(i, dim):
                e = entries[i][j]
                if not isinstance(e, ScalarField):
                    raise ContractViolation("metric entries must be scalar fields")
                self._entries[(i, j)] = e
        self._jet_cache = {}
        self._inv_cache = {}

    @classmethod
    def from_exprs(cls, rows, dim: int, mode: str = "jet", bundle: bool = False) -> "MetricField":
        fields = [
            [make_scalar(rows[i][j], dim, mode, bundle) for j in range(dim)]
            for i in range(dim)
        ]
        return cls(dim, fields)

    def entry(self, i: int, j: int) -> ScalarField:
        return self._entries[(i, j) if i <= j else (j, i)]

    def entry_fields(self):
        """(label, field) pairs for derivative cross-checks."""
        return [(f"g_{i + 1}{j + 1}", e) for (i, j), e in sorted(self._entries.items())]

    def matrix_jets(self, point, order: int):
        point = tuple(float(x) for x in point)
        key = (point, order)
        hit = self._jet_cache.get(key)
        if hit is None:
            n = self.dim
            hit = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    jet = self.entry(i, j).jets(point, order)
                    hit[i][j] = jet
                    hit[j][i] = jet
            self._jet_cache[key] = hit
        return hit

    def values(self, point) -> np.ndarray:
        return jet_values(self.matrix_jets(point, 0))

    def inverse_jets(self, point, order: int):
        point = tuple(float(x) for x in point)
        key = (point, order)
        hit = self._inv_cache.get(key)
        if hit is None:
            hit = self._inv_cache[key] = jet_inverse(self.matrix_jets(point, order))
        return hit

    def inverse_values(self, point) -> np.ndarray:
        g = self.values(point)
        return solve_linear(g, np.eye(self.dim))

    def partial_values(self, point):
        """(g, dg) with dg[i, j, k] the i-th partial of g_jk."""
        jets = self.matrix_jets(point, 1)
        n = self.dim
        g = jet_values(jets)
        dg = np.empty((n, n, n))
        for j in range(n):
            for k in range(j, n):
                dg[:, j, k] = jets[j][k].grad
                dg[:, k, j] = dg[:, j, k]
        return g, dg


class DerivedMetric(MetricField):
    """Metric whose full jet matrix is produced by a closure."""

    def __init__(self, dim: int, matrix_fn, label: str = "derived"):
        self.dim = dim
        self._matrix_fn = matrix_fn
        self.label = label
        self._jet_cache = {}
        self._inv_cache = {}

    def entry(self, i, j):
        return FuncField(
            self.dim,
            lambda point, order, i=i, j=j: self.matrix_jets(point, order)[i][j],
            name=f"{self.label}_{i + 1}{j + 1}",
        )

    def entry_fields(self):
        return [
            (f"{self.label}_{i + 1}{j + 1}", self.entry(i, j))
            for i in range(self.dim)
            for j in range(i, self.dim)
        ]

    def matrix_jets(self, point, order: int):
        point = tuple(float(x) for x in point)
        key = (point, order)
        hit = self._jet_cache.get(key)
        if hit is None:
            hit = self._jet_cache[key] = self._matrix_fn(point, order)
        return hit


# -- connection fields ------------------------------------------------


class ConnectionField:
    """Coefficients Gamma^k_ij with the derivative direction in slot i."""

    dim: int

    def __init__(self):
        self._coeff_cache = {}

    def coeff_jets(self, point, order: int):
        point = tuple(float(x) for x in point)
        key = (point, order)
        hit = self._coeff_cache.get(key)
        if hit is None:
            hit = self._coeff_cache[key] = self._coeffs(point, order)
        return hit

    def values(self, point) -> np.ndarray:
        return jet_values(self.coeff_jets(point, 0))

    def d_values(self, point) -> np.ndarray:
        """dG[l, k, i, j] = l-th partial of Gamma^k_ij."""
        jets = self.coeff_jets(point, 1)
        n = self.dim
        out = np.empty((n, n, n, n))
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    out[:, k, i, j] = jets[k][i][j].grad
        return out

    def entry_fields(self):
        out = []
        for k in range(self.dim):
            for i in range(self.dim):
                for j in range(self.dim):
                    out.append(
                        (
                            f"Gamma^{k + 1}_{i + 1}{j + 1}",
                            FuncField(
                                self.dim,
                                lambda point, order, k=k, i=i, j=j: self.coeff_jets(point, order)[k][i][j],
                                name=f"Gamma^{k + 1}_{i + 1}{j + 1}",
                            ),
                        )
                    )
        return out


class ExprConnection(ConnectionField):
    def __init__(self, dim: int, coeff_sources, mode: str = "jet", bundle: bool = False):
        super().__init__()
        self.dim = dim
        self._fields = [
            [
                [make_scalar(coeff_sources[k][i][j], dim, mode, bundle) for j in range(dim)]
                for i in range(dim)
            ]
            for k in range(dim)
        ]

    @classmethod
    def zero(cls, dim: int) -> "ExprConnection":
        rows = [[[0.0] * dim for _ in range(dim)] for _ in range(dim)]
        return cls(dim, rows)

    def _coeffs(self, point, order):
        return [
            [[self._fields[k][i][j].jets(point, order) for j in range(self.dim)] for i in range(self.dim)]
            for k in range(self.dim)
        ]


class LeviCivitaConnection(ConnectionField):
    """Metric connection solved from the standard first-derivative formula."""

    def __init__(self, metric: MetricField):
        super().__init__()
        self.metric = metric
        self.dim = metric.dim

    def _coeffs(self, point, order):
        n = self.dim
        g = self.metric.matrix_jets(point, order + 1)
        dg = [[[g[j][k].dvar(i) for k in range(n)] for j in range(n)] for i in range(n)]
        ginv = self.metric.inverse_jets(point, order)
        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                w = [dg[i][j][l] + dg[j][i][l] - dg[l][i][j] for l in range(n)]
                for k in range(n):
                    acc = ginv[k][0] * w[0]
                    for l in range(1, n):
                        acc = acc + ginv[k][l] * w[l]
                    half = acc * 0.5
                    out[k][i][j] = half
                    out[k][j][i] = half
        return out

    def values(self, point) -> np.ndarray:
        n = self.dim
        g, dg = self.metric.partial_values(point)
        # w[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
        w = dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
        rhs = np.transpose(w, (2, 0, 1)).reshape(n, n * n)
        return 0.5 * solve_linear(g, rhs).reshape(n, n, n)


class DualConnection(ConnectionField):
    """Connection solved from the metric duality relation."""

    def __init__(self, conn: ConnectionField, metric: MetricField):
        super().__init__()
        self.base = conn
        self.metric = metric
        self.dim = conn.dim

    def _coeffs(self, point, order):
        n = self.dim
        g = self.metric.matrix_jets(point, order + 1)
        gamma = self.base.coeff_jets(point, order)
        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            # rhs[j][k] = d_i g_jk - sum_l Gamma^l_ij g_lk
            rhs = [[None] * n for _ in range(n)]
            for j in range(n):
                for k in range(n):
                    acc = g[j][k].dvar(i)
                    for l in range(n):
                        acc = acc - gamma[l][i][j] * _drop(g[l][k], order)
                    rhs[j][k] = acc
            mat = [[_drop(g[a][b], order) for b in range(n)] for a in range(n)]
            sol = jet_solve(mat, rhs)  # sol[l][k] = dual Gamma^l_ik
            for l in range(n):
                for k in range(n):
                    out[l][i][k] = sol[l][k]
        return out

    def values(self, point) -> np.ndarray:
        n = self.dim
        g, dg = self.metric.partial_values(point)
        gamma = self.base.values(point)
        out = np.empty((n, n, n))
        for i in range(n):
            rhs = dg[i] - np.einsum("lj,lk->jk", gamma[:, i, :], g)
            out[:, i, :] = solve_linear(g, rhs)
        return out


def _drop(jet: Jet, order: int) -> Jet:
    """Truncate a jet to a lower order (same point)."""
    if jet.order == order:
        return jet
    if jet.order < order:
        raise ContractViolation("cannot raise jet order by truncation")
    return Jet(
        jet.dim,
        order,
        jet.value,
        jet.grad if order >= 1 else None,
        jet.hess if order >= 2 else None,
        jet.third if order >= 3 else None,
    )


class AlphaConnection(ConnectionField):
    """One-parameter family: Levi-Civita minus alpha/2 times the raised
    cubic tensor supplied as scalar fields."""

    def __init__(self, metric: MetricField, cubic_fields, alpha: float):
        super().__init__()
        self.metric = metric
        self.dim = metric.dim
        self.alpha = float(alpha)
        self._cubic = cubic_fields  # [l][i][j] scalar fields, symmetric
        self._lc = LeviCivitaConnection(metric)

    def _coeffs(self, point, order):
        n = self.dim
        lc = self._lc.coeff_jets(point, order)
        if self.alpha == 0.0:
            return lc
        ginv = self.metric.inverse_jets(point, order)
        c = [[[self._cubic[l][i][j].jets(point, order) for j in range(n)] for i in range(n)] for l in range(n)]
        out = [[[None] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    acc = ginv[k][0] * c[0][i][j]
                    for l in range(1, n):
                        acc = acc + ginv[k][l] * c[l][i][j]
                    out[k][i][j] = lc[k][i][j] - acc * (0.5 * self.alpha)
        return out


class SumConnection(ConnectionField):
    """Coefficient-wise sum, used for perturbed fixtures."""

    def __init__(self, base: ConnectionField, delta: ConnectionField):
        super().__init__()
        if base.dim != delta.dim:
            raise ContractViolation("connection dimension mismatch")
        self.parts = (base, delta)
        self.dim = base.dim

    def _coeffs(self, point, order):
        n = self.dim
        a = self.parts[0].coeff_jets(point, order)
        b = self.parts[1].coeff_jets(point, order)
        return [
            [[a[k][i][j] + b[k][i][j] for j in range(n)] for i in range(n)]
            for k in range(n)
        ]


# -- aggregates -------------------------------------------------------


@dataclass
class Space:
    """A chart together with its metric and connection."""

    chart: ChartedManifold
    metric: MetricField
    conn: ConnectionField

    @property
    def dim(self) -> int:
        return self.chart.dim
