"""Geodesic integration and curve-level identities for submersions.

Curves are integrated with a fixed-step classical Runge-Kutta scheme on
the first-order system (x' = v, v'^k = -Gamma^k_ij v^i v^j).  Time
derivatives of fields along a curve come from five-point fourth-order
stencils on the stored nodes, so every curve residual is consistent
with the integrator's own accuracy (both are O(h^4)).

The decomposition identities relate the covariant derivative of a field
along a curve in the total space to base and fiber contributions through
the fundamental tensors and the conformal factor.  They are evaluated at
interior probe nodes, where the central stencil applies.
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryExit, ContractViolation
from .fields import ConnectionField, MetricField
from .results import CheckResult, summarize
from .submersion import SubmersionSetup

DEFAULT_STEP = 1e-3
MIN_NODES = 5


class Trajectory:
    """Uniformly spaced nodes of an integrated curve."""

    def __init__(self, ts, xs, vs):
        self.ts = np.asarray(ts, dtype=float)
        self.xs = np.asarray(xs, dtype=float)
        self.vs = np.asarray(vs, dtype=float)
        if len(self.ts) != len(self.xs) or len(self.ts) != len(self.vs):
            raise ContractViolation("trajectory arrays must share a length")

    def __len__(self):
        return len(self.ts)

    @property
    def step(self) -> float:
        return float(self.ts[1] - self.ts[0]) if len(self.ts) > 1 else 0.0

    def write_csv(self, path) -> None:
        n = self.xs.shape[1]
        cols = ["t"]
        cols += [f"x{i+1}" for i in range(n)]
        cols += [f"v{i+1}" for i in range(n)]
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for k in range(len(self.ts)):
                row = [self.ts[k], *self.xs[k], *self.vs[k]]
                fh.write(",".join("%.17g" % val for val in row) + "\n")


def _accel(conn: ConnectionField, x, v) -> np.ndarray:
    gamma = conn.values(x)
    return -np.einsum("kij,i,j->k", gamma, v, v)


def integrate_geodesic(conn: ConnectionField, chart, x0, v0, t_end,
                       step: float = DEFAULT_STEP, on_exit: str = "raise") -> Trajectory:
    """Fixed-step RK4 geodesic from (x0, v0) over [0, t_end].

    Leaving the chart box raises :class:`BoundaryExit`, or truncates the
    trajectory when ``on_exit='clip'``.
    """
    if t_end <= 0.0 or step <= 0.0:
        raise ContractViolation("t_end and step must be positive")
    x = np.asarray(x0, dtype=float).copy()
    v = np.asarray(v0, dtype=float).copy()
    if not chart.contains(x):
        raise ContractViolation(f"start point {tuple(x)} outside the chart box")
    n_steps = int(round(t_end / step))
    ts = [0.0]
    xs = [x.copy()]
    vs = [v.copy()]
    for k in range(n_steps):
        t = k * step
        k1x, k1v = v, _accel(conn, x, v)
        x2, v2 = x + 0.5 * step * k1x, v + 0.5 * step * k1v
        k2x, k2v = v2, _accel(conn, x2, v2)
        x3, v3 = x + 0.5 * step * k2x, v + 0.5 * step * k2v
        k3x, k3v = v3, _accel(conn, x3, v3)
        x4, v4 = x + step * k3x, v + step * k3v
        k4x, k4v = v4, _accel(conn, x4, v4)
        x = x + (step / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (step / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not chart.contains(x):
            if on_exit == "clip":
                break
            raise BoundaryExit(t + step, tuple(x))
        ts.append(t + step)
        xs.append(x.copy())
        vs.append(v.copy())
    return Trajectory(np.array(ts), np.array(xs), np.array(vs))


# five-point stencil weights, rows = offset of the node within the window
_END_WEIGHTS = np.array([
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
])
_CENTER_WEIGHTS = np.array([1.0, -8.0, 0.0, 8.0, -1.0])


def derivative_along(values, step: float) -> np.ndarray:
    """Fourth-order time derivative of node samples (N, ...) -> (N, ...)."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < MIN_NODES:
        raise ContractViolation(f"need at least {MIN_NODES} nodes, got {n}")
    out = np.empty_like(values)
    flat = values.reshape(n, -1)
    res = out.reshape(n, -1)
    res[0] = _END_WEIGHTS[0] @ flat[:5]
    res[1] = _END_WEIGHTS[1] @ flat[:5]
    for k in range(2, n - 2):
        res[k] = _CENTER_WEIGHTS @ flat[k - 2: k + 3]
    res[n - 2] = -(_END_WEIGHTS[1] @ flat[n - 5:][::-1])
    res[n - 1] = -(_END_WEIGHTS[0] @ flat[n - 5:][::-1])
    res /= 12.0 * step
    return out


def covariant_along_curve(conn: ConnectionField, traj: Trajectory, w_nodes) -> np.ndarray:
    """(nabla_{sigma'} W)(t_k) for a field W given by its node values."""
    w_nodes = np.asarray(w_nodes, dtype=float)
    dw = derivative_along(w_nodes, traj.step)
    out = np.empty_like(w_nodes)
    for k in range(len(traj)):
        gamma = conn.values(traj.xs[k])
        out[k] = dw[k] + np.einsum("kij,i,j->k", gamma, traj.vs[k], w_nodes[k])
    return out


def geodesic_residual(conn: ConnectionField, traj: Trajectory) -> float:
    """Max norm of nabla_{sigma'} sigma' over the whole trajectory."""
    res = covariant_along_curve(conn, traj, traj.vs)
    return float(np.max(np.abs(res)))


def energy_drift(metric: MetricField, traj: Trajectory) -> float:
    """Relative drift of g(sigma', sigma') along the curve."""
    e = np.array([
        float(traj.vs[k] @ metric.values(traj.xs[k]) @ traj.vs[k])
        for k in range(len(traj))
    ])
    return float(np.max(np.abs(e - e[0])) / max(abs(e[0]), 1e-30))


def probe_indices(n_nodes: int, count: int = 9):
    """Interior node indices where the central stencil is available."""
    if n_nodes < MIN_NODES:
        raise ContractViolation(f"need at least {MIN_NODES} nodes, got {n_nodes}")
    lo, hi = 2, n_nodes - 3
    if hi < lo:
        return [2]
    count = min(count, hi - lo + 1)
    return sorted({int(round(lo + (hi - lo) * k / max(count - 1, 1))) for k in range(count)})


class _CurveProbe:
    """Window data for one interior probe node of a curve in a submersion."""

    def __init__(self, setup: SubmersionSetup, traj: Trajectory, idx: int, cache: dict):
        if idx < 2 or idx > len(traj) - 3:
            raise ContractViolation("probe index must be interior")
        self.setup = setup
        self.traj = traj
        self.idx = idx
        self.window = range(idx - 2, idx + 3)
        self.splits = []
        for k in self.window:
            hit = cache.get(k)
            if hit is None:
                hit = setup.split(traj.xs[k])
                cache[k] = hit
            self.splits.append(hit)
        self.split = self.splits[2]
        self.x = traj.xs[idx]
        self.v = traj.vs[idx]
        self.t = traj.ts[idx]
        self.gamma = setup.total.conn.values(self.x)
        self.bp = setup.base_point(self.x)
        self.gb = setup.base.metric.values(self.bp)
        self.gamma_b = setup.base.conn.values(self.bp)
        self.dphi = setup.dphi(self.x)
        self.dpis = [setup.dpi_values(traj.xs[k]) for k in self.window]
        self.dpi = self.dpis[2]

    def stencil(self, samples) -> np.ndarray:
        samples = np.asarray(samples, dtype=float)
        return (_CENTER_WEIGHTS @ samples) / (12.0 * self.traj.step)

    def cov_total(self, nodes) -> np.ndarray:
        """Covariant derivative at the probe of a field given on the window."""
        d = self.stencil(nodes)
        return d + np.einsum("kij,i,j->k", self.gamma, self.v, np.asarray(nodes)[2])

    def cov_base(self, nodes) -> np.ndarray:
        """Base covariant derivative along pi(sigma) of base-vector nodes."""
        d = self.stencil(nodes)
        w = self.dpi @ self.v
        return d + np.einsum("kij,i,j->k", self.gamma_b, w, np.asarray(nodes)[2])


def curve_decomposition_residuals(setup: SubmersionSetup, traj: Trajectory,
                                  e_fn, probes=None) -> dict:
    """Residuals of the two identities decomposing (nabla_{sigma'} E).

    ``e_fn(t, x) -> vector`` defines the test field along the curve.  The
    horizontal identity is tested against every base frame vector; the
    vertical identity componentwise.
    """
    cache: dict = {}
    if probes is None:
        probes = probe_indices(len(traj))
    m = setup.m
    r_h, r_v = 0.0, 0.0
    for idx in probes:
        pr = _CurveProbe(setup, traj, idx, cache)
        e_nodes = np.array([e_fn(traj.ts[k], traj.xs[k]) for k in pr.window])
        v_nodes = np.array([pr.splits[j].p_v @ e_nodes[j] for j in range(5)])
        pe_nodes = np.array([pr.dpis[j] @ e_nodes[j] for j in range(5)])
        e_i = e_nodes[2]
        sp = pr.split
        x_i = sp.p_h @ pr.v
        u_i = sp.p_v @ pr.v
        h_i = sp.p_h @ e_i
        w_i = sp.p_v @ e_i
        e_prime = pr.cov_total(e_nodes)
        v_prime = pr.cov_total(v_nodes)
        e_star = pr.cov_base(pe_nodes)
        a_hu = setup.fundamental_A(pr.x, h_i, u_i)
        a_xv = setup.fundamental_A(pr.x, x_i, w_i)
        t_uv = setup.fundamental_T(pr.x, u_i, w_i)
        rhs_base = e_star + pr.dpi @ (a_hu + a_xv + t_uv)
        lhs_base = pr.dpi @ (sp.p_h @ e_prime)
        px = pr.dpi @ x_i
        ph_ = pr.dpi @ h_i
        for a in range(m):
            z = np.zeros(m)
            z[a] = 1.0
            zt = sp.horizontal[:, a]
            lhs = float(lhs_base @ pr.gb @ z)
            rhs = float(
                rhs_base @ pr.gb @ z
                - (pr.dphi @ zt) * (px @ pr.gb @ ph_)
                + (pr.dphi @ x_i) * (ph_ @ pr.gb @ z)
                + (pr.dphi @ h_i) * (px @ pr.gb @ z)
            )
            r_h = max(r_h, abs(lhs - rhs))
        a_xh = setup.fundamental_A(pr.x, x_i, h_i)
        t_uh = setup.fundamental_T(pr.x, u_i, h_i)
        vert = sp.p_v @ e_prime - (a_xh + t_uh + sp.p_v @ v_prime)
        r_v = max(r_v, float(np.max(np.abs(vert))))
    return {"horizontal": r_h, "vertical": r_v}


def sigma_second_residuals(setup: SubmersionSetup, traj: Trajectory, probes=None) -> dict:
    """Residuals of the second-derivative corollary (E = sigma')."""
    cache: dict = {}
    if probes is None:
        probes = probe_indices(len(traj))
    m = setup.m
    r_h, r_v = 0.0, 0.0
    for idx in probes:
        pr = _CurveProbe(setup, traj, idx, cache)
        v_nodes = traj.vs[idx - 2: idx + 3]
        u_nodes = np.array([pr.splits[j].p_v @ v_nodes[j] for j in range(5)])
        w_nodes = np.array([pr.dpis[j] @ v_nodes[j] for j in range(5)])
        sp = pr.split
        x_i = sp.p_h @ pr.v
        u_i = sp.p_v @ pr.v
        sig2 = pr.cov_total(v_nodes)
        u_prime = pr.cov_total(u_nodes)
        sig2_star = pr.cov_base(w_nodes)
        a_xu = setup.fundamental_A(pr.x, x_i, u_i)
        t_uu = setup.fundamental_T(pr.x, u_i, u_i)
        rhs_base = sig2_star + pr.dpi @ (2.0 * a_xu + t_uu)
        lhs_base = pr.dpi @ (sp.p_h @ sig2)
        px = pr.dpi @ x_i
        norm2 = float(px @ pr.gb @ px)
        for a in range(m):
            z = np.zeros(m)
            z[a] = 1.0
            zt = sp.horizontal[:, a]
            lhs = float(lhs_base @ pr.gb @ z)
            rhs = float(
                rhs_base @ pr.gb @ z
                - (pr.dphi @ zt) * norm2
                + 2.0 * (pr.dphi @ x_i) * (px @ pr.gb @ z)
            )
            r_h = max(r_h, abs(lhs - rhs))
        a_xx = setup.fundamental_A(pr.x, x_i, x_i)
        t_ux = setup.fundamental_T(pr.x, u_i, x_i)
        vert = sp.p_v @ sig2 - (a_xx + t_ux + sp.p_v @ u_prime)
        r_v = max(r_v, float(np.max(np.abs(vert))))
    return {"horizontal": r_h, "vertical": r_v}


def projection_condition_residuals(setup: SubmersionSetup, traj: Trajectory,
                                   probes=None) -> dict:
    """The projection criterion and the base-geodesic residual for a curve.

    Returns the max over probes of the criterion expression and of the
    base acceleration; the theorem says one vanishes iff the other does.
    """
    cache: dict = {}
    if probes is None:
        probes = probe_indices(len(traj))
    m = setup.m
    cond_max, base_max = 0.0, 0.0
    for idx in probes:
        pr = _CurveProbe(setup, traj, idx, cache)
        v_nodes = traj.vs[idx - 2: idx + 3]
        w_nodes = np.array([pr.dpis[j] @ v_nodes[j] for j in range(5)])
        sp = pr.split
        x_i = sp.p_h @ pr.v
        u_i = sp.p_v @ pr.v
        sig2_star = pr.cov_base(w_nodes)
        base_max = max(base_max, float(np.max(np.abs(sig2_star))))
        a_xu = setup.fundamental_A(pr.x, x_i, u_i)
        t_uu = setup.fundamental_T(pr.x, u_i, u_i)
        vec = pr.dpi @ (2.0 * a_xu + t_uu)
        px = pr.dpi @ x_i
        norm2 = float(px @ pr.gb @ px)
        for a in range(m):
            z = np.zeros(m)
            z[a] = 1.0
            zt = sp.horizontal[:, a]
            cond = float(
                vec @ pr.gb @ z
                + 2.0 * (pr.dphi @ x_i) * (px @ pr.gb @ z)
                - (pr.dphi @ zt) * norm2
            )
            cond_max = max(cond_max, abs(cond))
    return {"condition": cond_max, "base_residual": base_max}


def default_test_field(dim: int):
    """Deterministic smooth field used by the decomposition check."""
    base = np.array([0.7, -0.4, 0.9, 0.5, -0.8, 0.6][:dim])
    slope = np.array([0.3, 0.5, -0.2, -0.6, 0.4, 0.2][:dim])
    if dim > 6:
        base = np.resize(base, dim)
        slope = np.resize(slope, dim)

    def e_fn(t, x):
        return base + t * slope

    return e_fn


def check_curve_decomposition(setup: SubmersionSetup, curves, tol) -> CheckResult:
    """Decomposition identities along integrated geodesics."""
    residuals, incidents = [], 0
    worst = {"horizontal": 0.0, "vertical": 0.0}
    e_fn = default_test_field(setup.n)
    for traj in curves:
        try:
            r = curve_decomposition_residuals(setup, traj, e_fn)
        except Exception:
            incidents += 1
            continue
        for k in worst:
            worst[k] = max(worst[k], r[k])
        residuals.append(max(r.values()))
    return summarize("curve_decomposition", residuals, tol, len(curves),
                     details=worst, incidents=incidents)


def check_sigma_second(setup: SubmersionSetup, curves, tol) -> CheckResult:
    residuals, incidents = [], 0
    worst = {"horizontal": 0.0, "vertical": 0.0}
    for traj in curves:
        try:
            r = sigma_second_residuals(setup, traj)
        except Exception:
            incidents += 1
            continue
        for k in worst:
            worst[k] = max(worst[k], r[k])
        residuals.append(max(r.values()))
    return summarize("sigma_second", residuals, tol, len(curves),
                     details=worst, incidents=incidents)


def geodesic_projection_check(setup: SubmersionSetup, curves, tol,
                              premise_factor: float = 10.0) -> CheckResult:
    """Criterion residual vanishes iff the projected curve is a base geodesic.

    Each curve must itself be a geodesic of the total space (premise).
    The check passes when every curve's two verdicts agree.
    """
    agree = True
    evaluated, incidents = 0, 0
    per_curve = []
    informative = 0.0
    for traj in curves:
        try:
            premise = geodesic_residual(setup.total.conn, traj)
            if premise > premise_factor * tol:
                incidents += 1
                per_curve.append({"premise_residual": premise, "skipped": True})
                continue
            r = projection_condition_residuals(setup, traj)
            cond_pass = r["condition"] <= tol
            base_pass = r["base_residual"] <= tol
            agree = agree and (cond_pass == base_pass)
            if cond_pass:
                informative = max(informative, r["base_residual"])
            if base_pass:
                informative = max(informative, r["condition"])
            per_curve.append({
                "condition": r["condition"],
                "base_residual": r["base_residual"],
                "agree": cond_pass == base_pass,
            })
            evaluated += 1
        except Exception:
            incidents += 1
    if evaluated == 0:
        status_residual = 0.0
    else:
        status_residual = informative
    out = CheckResult(
        name="geodesic_projection",
        samples=evaluated,
        max_residual=float(status_residual),
        tolerance=float(tol),
        status="inconclusive" if evaluated == 0 else ("pass" if agree else "fail"),
        details={"curves": per_curve},
        incidents=incidents,
    )
    return out
