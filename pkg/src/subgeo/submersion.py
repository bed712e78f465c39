"""Charted submersions with a metric-orthogonal horizontal distribution.

A setup couples a total space (M, g_M, nabla), a base space (B, g_B,
nabla*), the projection components, and an optional conformal factor
phi. Everything downstream (kernel bases, lifts, projectors, the
fundamental tensors T and A, the component identities, the
four-condition theorem) is evaluated pointwise from jets, so each
residual is an honest derivative computation rather than a symbolic
shortcut.

Vertical bases follow a fixed column-pivot pattern chosen at the box
center; horizontal spaces are the g_M-orthogonal complement of the
kernel. Pointwise tensors extend their vector arguments by constant
coordinate components and project with jet-valued projector fields,
which makes the results extension-independent up to solver noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import geometry
from .errors import ContractViolation, RankDrop, SingularMatrix
from .fields import ConnectionField, DualConnection, ScalarField, Space
from .jets import Jet
from .linalg import jet_matmul, jet_solve, jet_values, solve_linear
from .results import FAIL, INCONCLUSIVE, PASS, CheckResult, biconditional, summarize

RANK_RTOL = 1e-10
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 60


@dataclass
class SplitBasis:
    point: tuple
    vertical: np.ndarray    # n x l columns spanning ker dpi
    horizontal: np.ndarray  # n x m columns, lifts of the base frame
    p_h: np.ndarray
    p_v: np.ndarray
    pivot_cols: tuple
    free_cols: tuple


class SubmersionSetup:
    def __init__(self, total: Space, base: Space, pi_fields, phi: ScalarField | None = None,
                 name: str = "submersion"):
        if len(pi_fields) != base.dim:
            raise ContractViolation(
                f"projection has {len(pi_fields)} components, base dimension is {base.dim}"
            )
        if base.dim > total.dim:
            raise ContractViolation("base dimension exceeds total dimension")
        self.total = total
        self.base = base
        self.pi = list(pi_fields)
        self.phi = phi
        self.name = name
        self._dpi_cache = {}
        self._frame_cache = {}
        self._pivot = None
        self._dual_total = None
        self._dual_base = None

    # -- dimensions ----------------------------------------------------

    @property
    def n(self) -> int:
        return self.total.dim

    @property
    def m(self) -> int:
        return self.base.dim

    @property
    def fiber_dim(self) -> int:
        return self.n - self.m

    # -- duals ---------------------------------------------------------

    @property
    def dual_total(self) -> ConnectionField:
        if self._dual_total is None:
            self._dual_total = DualConnection(self.total.conn, self.total.metric)
        return self._dual_total

    @property
    def dual_base(self) -> ConnectionField:
        if self._dual_base is None:
            self._dual_base = DualConnection(self.base.conn, self.base.metric)
        return self._dual_base

    # -- projection differentials ---------------------------------------

    def base_point(self, p) -> tuple:
        return tuple(f.value(p) for f in self.pi)

    def dpi_jets(self, p, order: int):
        p = tuple(float(x) for x in p)
        key = (p, order)
        hit = self._dpi_cache.get(key)
        if hit is None:
            comp = [f.jets(p, order + 1) for f in self.pi]
            hit = [[comp[a].dvar(i) for i in range(self.n)] for a in range(self.m)]
            self._dpi_cache[key] = hit
        return hit

    def dpi_values(self, p) -> np.ndarray:
        return jet_values(self.dpi_jets(p, 0))

    def rank_check(self, p) -> None:
        sv = np.linalg.svd(self.dpi_values(p), compute_uv=False)
        if sv.size == 0 or sv[-1] <= RANK_RTOL * max(sv[0], 1.0):
            raise RankDrop("projection differential lost rank", point=tuple(p))

    def pivot_pattern(self):
        """(pivot_cols, free_cols) chosen once at the box center."""
        if self._pivot is None:
            self._pivot = self._pivot_at(self.total.chart.center())
        return self._pivot

    def _pivot_at(self, p):
        a = self.dpi_values(p)
        _, r, perm = scipy.linalg.qr(a, pivoting=True)
        diag = np.abs(np.diag(r))
        if diag.size < self.m or diag[-1] <= RANK_RTOL * max(diag[0], 1.0):
            raise RankDrop("projection differential lost rank", point=tuple(p))
        piv = tuple(sorted(int(c) for c in perm[: self.m]))
        free = tuple(sorted(int(c) for c in perm[self.m:]))
        return piv, free

    # -- frames ----------------------------------------------------------

    def kernel_jets(self, p, order: int):
        """n x l jet matrix whose columns span ker dpi."""
        return self._frames(p, order)["kernel"]

    def lift_jets(self, p, order: int):
        """n x m jet matrix; column a is the horizontal lift of e_a."""
        return self._frames(p, order)["lift"]

    def projector_jets(self, p, order: int):
        f = self._frames(p, order)
        return f["p_h"], f["p_v"]

    def _frames(self, p, order: int):
        p = tuple(float(x) for x in p)
        key = (p, order)
        hit = self._frame_cache.get(key)
        if hit is not None:
            return hit
        n, m, l = self.n, self.m, self.fiber_dim
        dpi = self.dpi_jets(p, order)
        zero = Jet.constant(0.0, n, order)
        one = Jet.constant(1.0, n, order)

        # kernel columns from the pivot pattern
        if l:
            piv, free = self.pivot_pattern()
            try:
                kernel = self._kernel_from(dpi, piv, free, zero, one)
            except SingularMatrix:
                warnings.warn("pivot pattern degenerated; re-pivoting at the point")
                piv, free = self._pivot_at(p)
                kernel = self._kernel_from(dpi, piv, free, zero, one)
        else:
            kernel = [[] for _ in range(n)]

        # horizontal: g-orthogonal complement, spanned by ginv dpi^T
        ginv = self.total.metric.inverse_jets(p, order)
        dpi_t = [[dpi[a][i] for a in range(m)] for i in range(n)]
        h = jet_matmul(ginv, dpi_t)                     # n x m
        dpi_h = jet_matmul(dpi, h)                      # m x m
        eye = [[one if a == b else zero for b in range(m)] for a in range(m)]
        lift = jet_matmul(h, jet_solve(dpi_h, eye))     # n x m
        p_h = jet_matmul(lift, dpi)                     # n x n
        p_v = [
            [(one if i == j else zero) - p_h[i][j] for j in range(n)]
            for i in range(n)
        ]
        hit = {"kernel": kernel, "lift": lift, "p_h": p_h, "p_v": p_v}
        self._frame_cache[key] = hit
        return hit

    def _kernel_from(self, dpi, piv, free, zero, one):
        n, m = self.n, self.m
        a = [[dpi[r][c] for c in piv] for r in range(m)]
        rhs = [[-dpi[r][c] for c in free] for r in range(m)]
        sol = jet_solve(a, rhs)
        kernel = [[zero] * len(free) for _ in range(n)]
        for idx, c in enumerate(free):
            kernel[c][idx] = one
            for r, pc in enumerate(piv):
                kernel[pc][idx] = sol[r][idx]
        return kernel

    # -- value-level helpers ----------------------------------------------

    def split(self, p) -> SplitBasis:
        self.rank_check(p)
        f = self._frames(p, 0)
        piv, free = self.pivot_pattern() if self.fiber_dim else ((), ())
        vertical = (
            jet_values(f["kernel"]) if self.fiber_dim else np.zeros((self.n, 0))
        )
        return SplitBasis(
            point=tuple(p),
            vertical=vertical,
            horizontal=jet_values(f["lift"]),
            p_h=jet_values(f["p_h"]),
            p_v=jet_values(f["p_v"]),
            pivot_cols=piv,
            free_cols=free,
        )

    def horizontal_lift(self, p, w) -> np.ndarray:
        """Total-space vector with dpi(X) = w, X horizontal."""
        return jet_values(self.lift_jets(p, 0)) @ np.asarray(w, dtype=float)

    def phi_jets(self, p, order: int):
        if self.phi is None:
            return Jet.constant(0.0, self.n, order)
        return self.phi.jets(p, order)

    def e2phi(self, p) -> float:
        return math.exp(2.0 * self.phi_jets(p, 0).value)

    def dphi(self, p) -> np.ndarray:
        return self.phi_jets(p, 1).grad

    # -- fundamental tensors ------------------------------------------------

    def fundamental_T(self, p, e, f, conn: ConnectionField | None = None) -> np.ndarray:
        """T_e f with both arguments extended by projected constants."""
        conn = conn or self.total.conn
        ph_j, pv_j = self.projector_jets(p, 1)
        ph, pv = jet_values(ph_j), jet_values(pv_j)
        gamma = conn.values(p)
        ve = pv @ np.asarray(e, dtype=float)
        f_v = _linear_field(pv_j, f)
        f_h = _linear_field(ph_j, f)
        return ph @ _cov_deriv(gamma, ve, f_v) + pv @ _cov_deriv(gamma, ve, f_h)

    def fundamental_A(self, p, e, f, conn: ConnectionField | None = None) -> np.ndarray:
        conn = conn or self.total.conn
        ph_j, pv_j = self.projector_jets(p, 1)
        ph, pv = jet_values(ph_j), jet_values(pv_j)
        gamma = conn.values(p)
        he = ph @ np.asarray(e, dtype=float)
        f_v = _linear_field(pv_j, f)
        f_h = _linear_field(ph_j, f)
        return pv @ _cov_deriv(gamma, he, f_h) + ph @ _cov_deriv(gamma, he, f_v)

    # -- fibers ----------------------------------------------------------------

    def fiber_points(self, b, count: int, anchor=None):
        """Up to ``count`` points of the fiber over b, found by varying the
        free coordinates and Newton-solving the pivot coordinates."""
        if self.fiber_dim == 0:
            return [tuple(float(x) for x in b)] if count else []
        piv, free = self.pivot_pattern()
        box = self.total.chart.box
        start = list(anchor) if anchor is not None else list(self.total.chart.center())
        out = []
        for k in range(count):
            x = list(start)
            for j, c in enumerate(free):
                lo, hi = box[c]
                frac = 0.15 + 0.7 * ((0.5 + 0.6180339887498949 * k + 0.23 * j) % 1.0)
                x[c] = lo + frac * (hi - lo)
            pt = self._newton_fiber(x, b, piv)
            if pt is not None and self.total.chart.contains(pt):
                out.append(pt)
        return out

    def _newton_fiber(self, x, b, piv):
        b = np.asarray(b, dtype=float)
        x = list(x)
        for _ in range(NEWTON_MAX_ITER):
            res = np.array([f.value(x) for f in self.pi]) - b
            if np.max(np.abs(res)) <= NEWTON_TOL:
                return tuple(x)
            jac = self.dpi_values(x)[:, list(piv)]
            try:
                step = solve_linear(jac, -res)
            except SingularMatrix:
                return None
            for r, c in enumerate(piv):
                x[c] += step[r]
        return None


# -- field helpers -------------------------------------------------------------


def _linear_field(mat_jets, vec):
    """Jet components of the field sum_j M[:, j] vec_j (vec constant)."""
    vec = np.asarray(vec, dtype=float)
    out = []
    for row in mat_jets:
        acc = row[0] * float(vec[0])
        for j in range(1, len(vec)):
            acc = acc + row[j] * float(vec[j])
        out.append(acc)
    return out


def _column(mat_jets, c):
    return [row[c] for row in mat_jets]


def _cov_deriv(gamma, direction, field_jets) -> np.ndarray:
    """(nabla_d F)^k = d^i dF^k/dx^i + Gamma^k_ij d^i F^j, pointwise."""
    vals = np.array([j.value for j in field_jets])
    grads = np.vstack([j.grad for j in field_jets])
    return grads @ direction + np.einsum("kij,i,j->k", gamma, direction, vals)


def _bracket(u_jets, v_jets) -> np.ndarray:
    """[U, V]^k from order-1 field jets."""
    uv = np.array([j.value for j in u_jets])
    vv = np.array([j.value for j in v_jets])
    ug = np.vstack([j.grad for j in u_jets])
    vg = np.vstack([j.grad for j in v_jets])
    return vg @ uv - ug @ vv


def s_tensor(conn: ConnectionField, dual: ConnectionField, p, v, x) -> np.ndarray:
    """S_v x = nabla_v X - dual-nabla_v X for constant extensions."""
    diff = conn.values(p) - dual.values(p)
    return np.einsum("kij,i,j->k", diff, np.asarray(v, float), np.asarray(x, float))


def _scalar_grad(g_jets, a_jets, b_jets) -> np.ndarray:
    """Gradient of s(x) = g(A, B) from order-1 jets of all three."""
    n = len(a_jets)
    av = np.array([j.value for j in a_jets])
    bv = np.array([j.value for j in b_jets])
    ag = np.vstack([j.grad for j in a_jets])
    bg = np.vstack([j.grad for j in b_jets])
    gv = np.empty((n, n))
    dg = np.empty((n, n, n))
    for i in range(n):
        for j in range(n):
            gv[i, j] = g_jets[i][j].value
            dg[:, i, j] = g_jets[i][j].grad
    return (
        np.einsum("ijk,j,k->i", dg, av, bv)
        + np.einsum("jk,ji,k->i", gv, ag, bv)
        + np.einsum("jk,j,ki->i", gv, av, bg)
    )


class _PointFrame:
    """Everything the component identities need at one sample point."""

    def __init__(self, setup: SubmersionSetup, p):
        self.setup = setup
        self.p = tuple(float(x) for x in p)
        total = setup.total
        self.ph_jets, self.pv_jets = setup.projector_jets(p, 1)
        self.ph = jet_values(self.ph_jets)
        self.pv = jet_values(self.pv_jets)
        self.kernel_jets = setup.kernel_jets(p, 1)
        self.lift_jets = setup.lift_jets(p, 1)
        self.vcols = jet_values(self.kernel_jets) if setup.fiber_dim else np.zeros((setup.n, 0))
        self.lcols = jet_values(self.lift_jets)
        self.gamma = total.conn.values(p)
        self.gamma_dual = setup.dual_total.values(p)
        self.g = total.metric.values(p)
        self.g_jets = total.metric.matrix_jets(p, 1)
        self.cubic = geometry.nabla_g_values(
            *total.metric.partial_values(p), self.gamma
        )
        self.bp = setup.base_point(p)
        self.e2phi = setup.e2phi(p)
        self.dphi = setup.dphi(p)

    def kernel_col(self, a):
        return _column(self.kernel_jets, a)

    def lift_col(self, a):
        return _column(self.lift_jets, a)

    def s_value(self, v, x):
        return np.einsum("kij,i,j->k", self.gamma - self.gamma_dual, v, x)

    def cov(self, direction, field_jets, dual=False):
        return _cov_deriv(self.gamma_dual if dual else self.gamma, direction, field_jets)

    def fiber_cubic(self, a, b, c) -> float:
        """(hat-nabla_{V_a} hat-g)(V_b, V_c) using the kernel frame fields."""
        u = self.vcols[:, a]
        vb = self.kernel_col(b)
        wc = self.kernel_col(c)
        grad_s = _scalar_grad(self.g_jets, vb, wc)
        term1 = float(grad_s @ u)
        dvb = self.pv @ self.cov(u, vb)
        dwc = self.pv @ self.cov(u, wc)
        vbv = self.vcols[:, b]
        wcv = self.vcols[:, c]
        return term1 - float(dvb @ self.g @ wcv) - float(vbv @ self.g @ dwc)


def lemma_components(setup: SubmersionSetup, p, frame: _PointFrame | None = None) -> dict:
    """Max residual of each of the six component identities at p.

    Keys cs6..cs11; vacuous entries (no vertical directions) report 0.
    """
    f = frame or _PointFrame(setup, p)
    n, m, l = setup.n, setup.m, setup.fiber_dim
    out = {f"cs{k}": 0.0 for k in range(6, 12)}

    # cs6: horizontal cubic matches the conformally scaled base cubic
    base_cubic = geometry.cubic_values(setup.base.metric, setup.base.conn, f.bp)
    lifted = np.einsum(
        "ijk,ic,ja,kb->cab", f.cubic, f.lcols, f.lcols, f.lcols
    )
    out["cs6"] = float(np.max(np.abs(lifted - f.e2phi * base_cubic)))
    if l == 0:
        return out

    gl = f.g @ f.lcols   # lowered lift columns
    gv = f.g @ f.vcols
    for vi in range(l):
        v = f.vcols[:, vi]
        for a in range(m):
            x = f.lcols[:, a]
            sv_x = f.s_value(v, x)
            t_vx = setup.fundamental_T(p, v, x)
            t_vx_d = setup.fundamental_T(p, v, x, setup.dual_total)
            for b in range(m):
                y = f.lcols[:, b]
                r7 = float(np.einsum("ijk,i,j,k->", f.cubic, v, x, y) + sv_x @ f.g @ y)
                out["cs7"] = max(out["cs7"], abs(r7))
            a_xv = setup.fundamental_A(p, x, v)
            a_xv_d = setup.fundamental_A(p, x, v, setup.dual_total)
            s_xv = f.s_value(x, v)
            for b in range(m):
                y = f.lcols[:, b]
                r8 = float(
                    np.einsum("ijk,i,j,k->", f.cubic, x, v, y)
                    + a_xv @ f.g @ y
                    - a_xv_d @ f.g @ y
                )
                out["cs8"] = max(out["cs8"], abs(r8))
            for wi in range(l):
                w = f.vcols[:, wi]
                r9 = float(np.einsum("ijk,i,j,k->", f.cubic, x, v, w) + s_xv @ f.g @ w)
                out["cs9"] = max(out["cs9"], abs(r9))
                r10 = float(
                    np.einsum("ijk,i,j,k->", f.cubic, v, x, w)
                    + t_vx @ f.g @ w
                    - t_vx_d @ f.g @ w
                )
                out["cs10"] = max(out["cs10"], abs(r10))
    for ui in range(l):
        u = f.vcols[:, ui]
        for vi in range(l):
            for wi in range(l):
                r11 = float(
                    np.einsum(
                        "ijk,i,j,k->", f.cubic, u, f.vcols[:, vi], f.vcols[:, wi]
                    )
                    - f.fiber_cubic(ui, vi, wi)
                )
                out["cs11"] = max(out["cs11"], abs(r11))
    return out


def check_lemma_components(setup, points, tol) -> CheckResult:
    residuals, incidents = [], 0
    per = {f"cs{k}": 0.0 for k in range(6, 12)}
    for p in points:
        try:
            comp = lemma_components(setup, p)
        except Exception:
            incidents += 1
            continue
        for k, v in comp.items():
            per[k] = max(per[k], v)
        residuals.append(max(comp.values()))
    return summarize(
        "lemma_components", residuals, tol, len(points),
        details={k: per[k] for k in sorted(per)}, incidents=incidents,
    )


def four_conditions_check(setup: SubmersionSetup, points, tol) -> CheckResult:
    """The four statisticity conditions plus the biconditional against a
    direct statisticity check of the total space."""
    cond = {"condition1": 0.0, "condition2": 0.0, "condition3": 0.0, "condition4": 0.0}
    direct = 0.0
    evaluated, incidents = 0, 0
    for p in points:
        try:
            f = _PointFrame(setup, p)
            l, m = setup.fiber_dim, setup.m
            for vi in range(l):
                v = f.vcols[:, vi]
                for a in range(m):
                    x = f.lcols[:, a]
                    r1 = f.ph @ f.s_value(v, x) - (
                        setup.fundamental_A(p, x, v)
                        - setup.fundamental_A(p, x, v, setup.dual_total)
                    )
                    cond["condition1"] = max(cond["condition1"], float(np.max(np.abs(r1))))
                    r2 = f.pv @ f.s_value(x, v) - (
                        setup.fundamental_T(p, v, x)
                        - setup.fundamental_T(p, v, x, setup.dual_total)
                    )
                    cond["condition2"] = max(cond["condition2"], float(np.max(np.abs(r2))))
            # condition 3: the fibers are statistical
            for a in range(l):
                ua = f.vcols[:, a]
                for b in range(l):
                    tor = (
                        f.pv @ f.cov(ua, f.kernel_col(b))
                        - f.pv @ f.cov(f.vcols[:, b], f.kernel_col(a))
                        - _bracket(f.kernel_col(a), f.kernel_col(b))
                    )
                    cond["condition3"] = max(cond["condition3"], float(np.max(np.abs(tor))))
                    for c in range(l):
                        sym = f.fiber_cubic(a, b, c) - f.fiber_cubic(b, a, c)
                        cond["condition3"] = max(cond["condition3"], abs(sym))
            cond["condition4"] = max(
                cond["condition4"],
                geometry.statistical_residual(setup.base.metric, setup.base.conn, f.bp),
            )
            direct = max(
                direct,
                geometry.statistical_residual(setup.total.metric, setup.total.conn, p),
            )
            evaluated += 1
        except Exception:
            incidents += 1
    conditions_max = max(cond.values())
    conditions_pass = conditions_max <= tol
    direct_pass = direct <= tol
    details = dict(cond)
    details["total_space_residual"] = direct
    details["conditions_pass"] = conditions_pass
    details["total_space_pass"] = direct_pass
    details["biconditional_holds"] = conditions_pass == direct_pass
    out = summarize("four_conditions", [conditions_max] * max(evaluated, 0), tol,
                    len(points), details=details, incidents=incidents)
    if out.status != INCONCLUSIVE and not details["biconditional_holds"]:
        out.status = FAIL
    return out


def gauss_weingarten_residuals(setup: SubmersionSetup, p) -> dict:
    """Residuals of the four decomposition identities for frame fields."""
    f = _PointFrame(setup, p)
    l, m = setup.fiber_dim, setup.m
    out = {"vert_vert": 0.0, "vert_horiz": 0.0, "horiz_vert": 0.0, "horiz_horiz": 0.0}
    for a in range(l):
        va = f.vcols[:, a]
        for b in range(l):
            full = f.cov(va, f.kernel_col(b))
            r = full - setup.fundamental_T(p, va, f.vcols[:, b]) - f.pv @ full
            out["vert_vert"] = max(out["vert_vert"], float(np.max(np.abs(r))))
        for b in range(m):
            full = f.cov(va, f.lift_col(b))
            r = full - f.ph @ full - setup.fundamental_T(p, va, f.lcols[:, b])
            out["vert_horiz"] = max(out["vert_horiz"], float(np.max(np.abs(r))))
    for a in range(m):
        xa = f.lcols[:, a]
        for b in range(l):
            full = f.cov(xa, f.kernel_col(b))
            r = full - f.pv @ full - setup.fundamental_A(p, xa, f.vcols[:, b])
            out["horiz_vert"] = max(out["horiz_vert"], float(np.max(np.abs(r))))
        for b in range(m):
            full = f.cov(xa, f.lift_col(b))
            r = full - f.ph @ full - setup.fundamental_A(p, xa, f.lcols[:, b])
            out["horiz_horiz"] = max(out["horiz_horiz"], float(np.max(np.abs(r))))
    return out


def check_gauss_weingarten(setup, points, tol) -> CheckResult:
    residuals, incidents = [], 0
    worst = {}
    for p in points:
        try:
            r = gauss_weingarten_residuals(setup, p)
        except Exception:
            incidents += 1
            continue
        for k, v in r.items():
            worst[k] = max(worst.get(k, 0.0), v)
        residuals.append(max(r.values()))
    return summarize("gauss_weingarten", residuals, tol, len(points),
                     details=worst, incidents=incidents)


def check_split_identities(setup, points, tol) -> CheckResult:
    """P_H + P_V = I, dpi P_V = 0, dpi L = I at every sample."""
    residuals, incidents = [], 0
    eye_n = np.eye(setup.n)
    eye_m = np.eye(setup.m)
    for p in points:
        try:
            setup.rank_check(p)
            s = setup.split(p)
            dpi = setup.dpi_values(p)
            r = max(
                float(np.max(np.abs(s.p_h + s.p_v - eye_n))),
                float(np.max(np.abs(dpi @ s.p_v))),
                float(np.max(np.abs(dpi @ s.horizontal - eye_m))),
            )
            if setup.fiber_dim:
                r = max(r, float(np.max(np.abs(dpi @ s.vertical))))
            residuals.append(r)
        except Exception:
            incidents += 1
    return summarize("split_identities", residuals, tol, len(points), incidents=incidents)


def check_tensoriality(setup, points, tol) -> CheckResult:
    """T and A agree across two different extensions of their arguments."""
    residuals, incidents = [], 0
    for p in points:
        try:
            f = _PointFrame(setup, p)
            n = setup.n
            # scale the extension by a scalar field equal to 1 at p
            s = Jet(n, 1, 1.0, np.ones(n) * 0.7, None, None)
            r = 0.0
            probes = []
            if setup.fiber_dim:
                probes.append((f.vcols[:, 0], f.lcols[:, 0]))
                probes.append((f.vcols[:, 0], f.vcols[:, -1]))
            probes.append((f.lcols[:, 0], f.lcols[:, -1]))
            for e, w in probes:
                w_v = _linear_field(f.pv_jets, w)
                w_h = _linear_field(f.ph_jets, w)
                ve = f.pv @ e
                he = f.ph @ e
                t1 = f.ph @ _cov_deriv(f.gamma, ve, w_v) + f.pv @ _cov_deriv(f.gamma, ve, w_h)
                t2 = f.ph @ _cov_deriv(f.gamma, ve, [s * j for j in w_v]) + f.pv @ _cov_deriv(
                    f.gamma, ve, [s * j for j in w_h]
                )
                a1 = f.pv @ _cov_deriv(f.gamma, he, w_h) + f.ph @ _cov_deriv(f.gamma, he, w_v)
                a2 = f.pv @ _cov_deriv(f.gamma, he, [s * j for j in w_h]) + f.ph @ _cov_deriv(
                    f.gamma, he, [s * j for j in w_v]
                )
                r = max(r, float(np.max(np.abs(t1 - t2))), float(np.max(np.abs(a1 - a2))))
            residuals.append(r)
        except Exception:
            incidents += 1
    return summarize("tensoriality", residuals, tol, len(points), incidents=incidents)


def check_semi_riemannian(setup, points, tol) -> CheckResult:
    """Horizontal lengths preserved and fiber metric nondegenerate."""
    residuals, incidents = [], 0
    degenerate = False
    for p in points:
        try:
            f = _PointFrame(setup, p)
            gb = setup.base.metric.values(f.bp)
            r = float(np.max(np.abs(f.lcols.T @ f.g @ f.lcols - gb)))
            if setup.fiber_dim:
                ghat = f.vcols.T @ f.g @ f.vcols
                try:
                    solve_linear(ghat, np.eye(setup.fiber_dim))
                except SingularMatrix:
                    degenerate = True
                    r = float("inf")
            residuals.append(r)
        except Exception:
            incidents += 1
    out = summarize("semi_riemannian", residuals, tol, len(points), incidents=incidents)
    out.details["fiber_metric_degenerate"] = degenerate
    return out


def check_conformal_metric(setup, points, tol) -> CheckResult:
    """g_M on horizontal lifts equals e^{2 phi} g_B."""
    residuals, incidents = [], 0
    for p in points:
        try:
            f = _PointFrame(setup, p)
            gb = setup.base.metric.values(f.bp)
            residuals.append(
                float(np.max(np.abs(f.lcols.T @ f.g @ f.lcols - f.e2phi * gb)))
            )
        except Exception:
            incidents += 1
    return summarize("conformal_metric", residuals, tol, len(points), incidents=incidents)


def conformal_defect(setup: SubmersionSetup, p, x, y, z,
                     conn: ConnectionField | None = None,
                     base_conn: ConnectionField | None = None) -> float:
    """Defect of the defining relation for conformal submersions with
    horizontal distribution, for base vectors x, y, z."""
    conn = conn or setup.total.conn
    base_conn = base_conn or setup.base.conn
    f = _PointFrame(setup, p)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    z = np.asarray(z, float)
    gb = setup.base.metric.values(f.bp)
    gamma_b = base_conn.values(f.bp)
    xt = f.lcols @ x
    yt = f.lcols @ y
    zt = f.lcols @ z
    y_field = _linear_field(f.lift_jets, y)
    nab = _cov_deriv(conn.values(p), xt, y_field)
    push = setup.dpi_values(p) @ nab
    nab_base = np.einsum("kab,a,b->k", gamma_b, x, y)
    return float(
        push @ gb @ z
        - nab_base @ gb @ z
        + (f.dphi @ zt) * (x @ gb @ y)
        - (f.dphi @ xt) * (y @ gb @ z)
        - (f.dphi @ yt) * (z @ gb @ x)
    )


def check_conformal_hd(setup, points, tol) -> CheckResult:
    """Max conformal defect over coordinate-frame triples at each sample."""
    residuals, incidents = [], 0
    eye = np.eye(setup.m)
    for p in points:
        try:
            r = 0.0
            for a in range(setup.m):
                for b in range(setup.m):
                    for c in range(setup.m):
                        r = max(r, abs(conformal_defect(setup, p, eye[a], eye[b], eye[c])))
            residuals.append(r)
        except Exception:
            incidents += 1
    return summarize("conformal_hd", residuals, tol, len(points), incidents=incidents)


def check_affine_hd(setup, points, tol) -> CheckResult:
    """H(nabla_{X~} Y~) equals the lift of nabla*_X Y for frame fields."""
    residuals, incidents = [], 0
    for p in points:
        try:
            f = _PointFrame(setup, p)
            gamma_b = setup.base.conn.values(f.bp)
            r = 0.0
            for a in range(setup.m):
                xt = f.lcols[:, a]
                for b in range(setup.m):
                    nab = f.cov(xt, f.lift_col(b))
                    lifted = f.lcols @ gamma_b[:, a, b]
                    r = max(r, float(np.max(np.abs(f.ph @ nab - lifted))))
            residuals.append(r)
        except Exception:
            incidents += 1
    return summarize("affine_hd", residuals, tol, len(points), incidents=incidents)


def check_dual_conformal_pair(setup, points, tol) -> CheckResult:
    """The defining relation holds for (nabla, nabla*) iff it holds for
    their metric duals; evaluated as two residual suites."""
    r_primal, r_dual = 0.0, 0.0
    evaluated, incidents = 0, 0
    eye = np.eye(setup.m)
    for p in points:
        try:
            for a in range(setup.m):
                for b in range(setup.m):
                    for c in range(setup.m):
                        r_primal = max(r_primal, abs(
                            conformal_defect(setup, p, eye[a], eye[b], eye[c])))
                        r_dual = max(r_dual, abs(conformal_defect(
                            setup, p, eye[a], eye[b], eye[c],
                            conn=setup.dual_total, base_conn=setup.dual_base)))
            evaluated += 1
        except Exception:
            incidents += 1
    details = {"primal_max": r_primal, "dual_max": r_dual}
    return biconditional(
        "dual_conformal_pair", r_primal <= tol, r_dual <= tol,
        max(r_primal, r_dual), tol, evaluated, details=details, incidents=incidents,
    )


def induced_structures(setup: SubmersionSetup, p):
    """(g~, Gamma') induced on the base, evaluated at the fiber point p."""
    f = _PointFrame(setup, p)
    m = setup.m
    g_ind = f.lcols.T @ f.g @ f.lcols
    gamma_ind = np.empty((m, m, m))
    dpi = setup.dpi_values(p)
    for b in range(m):
        for c in range(m):
            gamma_ind[:, b, c] = dpi @ f.cov(f.lcols[:, b], f.lift_col(c))
    return g_ind, gamma_ind


def check_projectable(setup, points, tol) -> CheckResult:
    """pi_*(H(nabla_{X~} Y~)) agrees across points of the same fiber."""
    if setup.fiber_dim == 0:
        # singleton fibers: nothing to vary, pass by convention
        return summarize("projectable", [0.0] * len(points), tol, len(points))
    n_base = max(1, math.ceil(len(points) / 16))
    per_fiber = max(2, math.ceil(len(points) / (4 * n_base)))
    residuals, incidents = [], 0
    for p in points[:n_base]:
        try:
            b = setup.base_point(p)
            fpts = setup.fiber_points(b, per_fiber, anchor=p)
            if len(fpts) < 2:
                incidents += 1
                continue
            gammas = [induced_structures(setup, q)[1] for q in fpts]
            r = 0.0
            for q_gamma in gammas[1:]:
                r = max(r, float(np.max(np.abs(q_gamma - gammas[0]))))
            residuals.append(r)
        except Exception:
            incidents += 1
    return summarize("projectable", residuals, tol, n_base, incidents=incidents)


def theorem21_verify(setup: SubmersionSetup, points, tol) -> CheckResult:
    """Induced base structure of a statistical total space is statistical.

    Derivatives of the induced metric are taken through the lift fields
    (basic-field identity), so no base-space expression for g~ is needed.
    Also checks the underlying identity
    (nabla'_X g~)(Y, Z) = (nabla_{X~} g_M)(Y~, Z~).
    """
    residuals, incidents = [], 0
    premise_worst = 0.0
    identity_worst = 0.0
    m = setup.m
    for p in points:
        try:
            f = _PointFrame(setup, p)
            premise_worst = max(
                premise_worst,
                geometry.statistical_residual(setup.total.metric, setup.total.conn, p),
            )
            g_ind, gamma_ind = induced_structures(setup, p)
            dg_ind = np.empty((m, m, m))
            for a in range(m):
                for b in range(m):
                    grad_s = _scalar_grad(f.g_jets, f.lift_col(a), f.lift_col(b))
                    for c in range(m):
                        dg_ind[c, a, b] = grad_s @ f.lcols[:, c]
            cubic_ind = geometry.nabla_g_values(g_ind, dg_ind, gamma_ind)
            tor = geometry.torsion_values(gamma_ind)
            r_stat = max(
                float(np.max(np.abs(tor))),
                float(np.max(np.abs(cubic_ind - np.transpose(cubic_ind, (1, 0, 2))))),
            )
            lifted = np.einsum("ijk,ic,ja,kb->cab", f.cubic, f.lcols, f.lcols, f.lcols)
            identity_worst = max(identity_worst, float(np.max(np.abs(cubic_ind - lifted))))
            residuals.append(max(r_stat, float(np.max(np.abs(cubic_ind - lifted)))))
        except Exception:
            incidents += 1
    out = summarize("induced_statistical", residuals, tol, len(points),
                    details={"premise_residual": premise_worst,
                             "proof_identity_residual": identity_worst},
                    incidents=incidents)
    if out.status != INCONCLUSIVE and premise_worst > 10.0 * tol:
        out.status = INCONCLUSIVE
        out.details["premise_failed"] = True
    return out


# Capitalized spelling used in a few call sites; same object.
S_tensor = s_tensor
