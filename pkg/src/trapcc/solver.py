"""Finding trapezoidal central configurations.

The base a = r12 is fixed and each trapezoid is parameterized by its top base
c = r34 and long leg d = r14. The diagonals then follow from the sides, so the
sextic relation becomes one scalar equation in the short leg b = r23.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ccsystem import (CCSolution, MassVector, evaluate, gate_failures, lambda_dziobek,
                       mass_ratios, ratio_consistency, relation_sides, sigma_recover)
from .config import ScanConfig, Tolerances
from .errors import (ConvergedOutsideOmega, InfeasibleGeometry, MultipleRoots, NoConvergence,
                     NoPositiveMasses, NoSignChange, NotATrapezoid, ParallelogramDegenerate,
                     TrapCCError)
from .geometry import (PARALLELOGRAM_EPS, DistanceVector, TrapezoidShape, diagonals_from_sides,
                       height, trapezoid_distances)


@dataclass(frozen=True)
class RootResult:
    b: float
    iterations: int
    residual_at_root: float
    bracket_used: tuple


def relation_in_b(a, c, d, b):
    """Sextic relation residual (LHS - RHS) / a**9 with the diagonals eliminated.

    Returns None where the four sides cannot close a trapezoid.
    """
    try:
        e, f = diagonals_from_sides(TrapezoidShape(a, b, c, d))
    except (NotATrapezoid, ParallelogramDegenerate):
        return None
    lhs, rhs = relation_sides(DistanceVector.from_sides(a, b, c, d, e, f))
    return (lhs - rhs) / a**9


def b_interval(a, c, d, overshoot=0.0):
    """Admissible range for b: legs must satisfy |b - d| < a - c < b + d.

    The ordering r14 >= r23 >= r34 further pins b to [c, d], and r24 > r12
    reads b^2 > (a - c)^2 + c d^2 / a once the diagonal formula is substituted.
    ``overshoot`` > 0 extends the upper end past d by that fraction of (a - c),
    which lets a root be followed across the symmetric configuration b = d.
    """
    gap = a - c
    pad = 1e-12 * a
    lo = max(c, d - gap + pad, gap - d + pad, math.sqrt(gap * gap + c * d * d / a) + pad)
    hi = d + overshoot * gap
    if overshoot:
        hi = min(hi, d + gap - pad)
    return lo, hi


def _bisect(fn, lo, hi, f_lo, f_hi, rtol, max_iter=200):
    it = 0
    while hi - lo > rtol * max(abs(lo), abs(hi)) and it < max_iter:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        it += 1
        if f_mid is None:
            raise InfeasibleGeometry(f"residual undefined at b={mid!r} inside a bracket")
        if f_mid == 0:
            return mid, mid, 0.0, 0.0, it
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo, hi, f_lo, f_hi, it


def _polish(fn, lo, hi, f_lo, f_hi, steps=3):
    """Safeguarded Newton steps inside a tight sign-change bracket."""
    x = lo if abs(f_lo) <= abs(f_hi) else hi
    fx = f_lo if x == lo else f_hi
    for _ in range(steps):
        if fx == 0:
            break
        h = max(hi - lo, 1e-7 * abs(x))
        fp, fm = fn(x + h), fn(x - h)
        if fp is None or fm is None or fp == fm:
            break
        x_new = x - fx * 2 * h / (fp - fm)
        if not lo <= x_new <= hi:
            break
        f_new = fn(x_new)
        if f_new is None or abs(f_new) >= abs(fx):
            break
        x, fx = x_new, f_new
    return x, fx


def find_brackets(fn, lo, hi, panels):
    """Split [lo, hi] into panels; return every sign-change sub-interval."""
    xs = [lo + (hi - lo) * k / panels for k in range(panels + 1)]
    xs[-1] = hi
    vals = [fn(x) for x in xs]
    if all(v is None for v in vals):
        raise InfeasibleGeometry(f"no admissible point in [{lo!r}, {hi!r}]")
    brackets = []
    for k in range(panels):
        f0, f1 = vals[k], vals[k + 1]
        if f0 is None or f1 is None:
            continue
        if f0 == 0:
            if not brackets or brackets[-1][1] != xs[k]:
                brackets.append((xs[k], xs[k], f0, f0))
        elif f1 != 0 and (f0 < 0) != (f1 < 0):
            brackets.append((xs[k], xs[k + 1], f0, f1))
    if vals[-1] == 0:
        brackets.append((xs[-1], xs[-1], 0.0, 0.0))
    return brackets


def _check_domain(a, c, d):
    if not (a > 0 and c > 0 and d > 0):
        raise InfeasibleGeometry("a, c, d must be positive")
    if abs(a - c) <= PARALLELOGRAM_EPS * a:
        raise ParallelogramDegenerate("a == c: use rhombus_branch for the parallelogram case")
    if c > a:
        raise InfeasibleGeometry("requires a > c (r12 is the longer base)")


def _refine(fn, bracket, tol):
    lo, hi, f_lo, f_hi = bracket
    if lo == hi:
        return RootResult(lo, 0, 0.0, (lo, hi))
    lo2, hi2, f_lo2, f_hi2, it = _bisect(fn, lo, hi, f_lo, f_hi, tol.root)
    if lo2 == hi2:
        return RootResult(lo2, it, 0.0, (lo, hi))
    b, fb = _polish(fn, lo2, hi2, f_lo2, f_hi2)
    return RootResult(b, it, fb, (lo, hi))


def solve_b_all(a, c, d, cfg: ScanConfig | None = None, overshoot=0.0):
    """Every root b of the sextic relation in the admissible interval, ascending."""
    cfg = cfg or ScanConfig()
    _check_domain(a, c, d)
    lo, hi = b_interval(a, c, d, overshoot)
    if not lo < hi:
        raise InfeasibleGeometry(f"empty b interval [{lo!r}, {hi!r}] for c={c!r}, d={d!r}")
    fn = lambda b: relation_in_b(a, c, d, b)  # noqa: E731
    brackets = find_brackets(fn, lo, hi, cfg.panels)
    return [_refine(fn, br, cfg.tol) for br in brackets]


def solve_b(a, c, d, cfg: ScanConfig | None = None) -> RootResult:
    """The unique root b of the sextic relation in ``b_interval(a, c, d)``.

    Raises MultipleRoots when several panels change sign; the exception
    carries every bracket.
    """
    cfg = cfg or ScanConfig()
    _check_domain(a, c, d)
    lo, hi = b_interval(a, c, d)
    if not lo < hi:
        raise InfeasibleGeometry(f"empty b interval [{lo!r}, {hi!r}] for c={c!r}, d={d!r}")
    fn = lambda b: relation_in_b(a, c, d, b)  # noqa: E731
    brackets = find_brackets(fn, lo, hi, cfg.panels)
    if not brackets:
        raise NoSignChange(f"relation keeps one sign on [{lo!r}, {hi!r}]")
    if len(brackets) > 1:
        raise MultipleRoots(f"{len(brackets)} sign changes", [br[:2] for br in brackets])
    return _refine(fn, brackets[0], cfg.tol)


# ---------------------------------------------------------------------------
# Grid scans


@dataclass(frozen=True)
class ScanRow:
    ci: int
    di: int
    c: float
    d: float
    root: RootResult
    solution: CCSolution


@dataclass
class ScanResult:
    config: ScanConfig
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (ci, di, c, d, reason)

    def solutions(self):
        return [row.solution for row in self.rows]


def scan_cell(a, c, d, cfg: ScanConfig):
    """Accepted (root, solution) pairs and failure reasons for one grid cell."""
    if d < c:
        return [], ["empty_bracket"]
    if d > a:
        return [], ["outside_omega_domain"]
    try:
        roots = solve_b_all(a, c, d, cfg)
    except TrapCCError as exc:
        return [], [type(exc).__name__]
    if not roots:
        return [], ["NoSignChange"]
    accepted, reasons = [], []
    for root in roots:
        try:
            sol = evaluate(trapezoid_distances(a, root.b, c, d), cfg.tol)
        except TrapCCError as exc:
            reasons.append(type(exc).__name__)
            continue
        failed = gate_failures(sol, cfg.tol)
        if failed:
            reasons.append("gate:" + "+".join(failed))
        else:
            accepted.append((root, sol))
    return accepted, reasons


def _scan_column(args):
    cfg, ci = args
    c = cfg.c_values()[ci]
    rows, failures = [], []
    for di, d in enumerate(cfg.d_values()):
        accepted, reasons = scan_cell(cfg.a_fixed, c, d, cfg)
        rows.extend(ScanRow(ci, di, c, d, root, sol) for root, sol in accepted)
        failures.extend((ci, di, c, d, why) for why in reasons)
    return rows, failures


def scan_family(cfg: ScanConfig | None = None, workers: int = 1) -> ScanResult:
    """Solve for b on every (c, d) grid cell and keep the solutions passing all gates.

    Columns run in parallel when ``workers`` > 1. Results are reassembled in
    grid order, so the output does not depend on the worker count.
    """
    cfg = cfg or ScanConfig()
    jobs = [(cfg, ci) for ci in range(len(cfg.c_values()))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_column, jobs))
    else:
        parts = [_scan_column(job) for job in jobs]
    result = ScanResult(cfg)
    for rows, failures in parts:
        result.rows.extend(rows)
        result.failures.extend(failures)
    result.rows.sort(key=lambda row: (row.ci, row.di, row.root.b))
    return result


# ---------------------------------------------------------------------------
# Equal-mass families


def _root_near(a, c, d, guess, cfg):
    roots = solve_b_all(a, c, d, cfg, overshoot=0.5)
    if not roots:
        raise NoSignChange(f"no root b for c={c!r}, d={d!r}")
    if guess is None:
        inside = [rt for rt in roots if rt.b <= d] or roots
        return inside[-1].b
    return min(roots, key=lambda rt: abs(rt.b - guess)).b


def solve_equal_mass(pair, init, a_fixed=8.0, height_target=None, cfg: ScanConfig | None = None,
                     max_iter=80, tol=1e-13) -> CCSolution:
    """Trapezoidal c.c. with m_i = m_j for ``pair`` = (i, j).

    The root b is solved for at every (c, d), so the sextic relation always
    holds. Equal masses remove one more degree of freedom. A prescribed height
    removes the last one, which makes the 2x2 system in (c, d) square. With
    ``height_target`` unset, the height of the initial trapezoid is kept.
    Damped Newton is used, with a forward-difference Jacobian (step 1e-7 * a).
    """
    cfg = cfg or ScanConfig(a_fixed=a_fixed)
    i, j = sorted(pair)
    a = float(a_fixed)
    state = {"b": None}

    def distances(z, guess):
        c, d = z
        b = _root_near(a, c, d, guess, cfg)
        return trapezoid_distances(a, b, c, d), b

    def residual(z, guess):
        r, b = distances(z, guess)
        m = mass_ratios(r)
        return np.array([(m[i] - m[j]) / max(abs(m[i]), abs(m[j])),
                         (height(r) - height_target) / a]), b

    z = np.array(init, dtype=float)
    r0, state["b"] = distances(z, None)
    if height_target is None:
        height_target = height(r0)
    fz, state["b"] = residual(z, state["b"])
    step_fd = 1e-7 * a
    for _ in range(max_iter):
        norm = float(np.linalg.norm(fz))
        if norm < tol:
            break
        jac = np.empty((2, 2))
        for k in range(2):
            for sign in (1.0, -1.0):
                zp = z.copy()
                zp[k] += sign * step_fd
                try:
                    fp, _b = residual(zp, state["b"])
                    break
                except TrapCCError:
                    continue
            else:
                raise _stalled(pair, z, state["b"], a, fz, cfg)
            jac[:, k] = sign * (fp - fz) / step_fd
        try:
            dz = -np.linalg.solve(jac, fz)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at c={float(z[0])!r}, d={float(z[1])!r}") from exc
        t = 1.0
        while t > 1e-6:
            trial = z + t * dz
            if 0 < trial[0] < a * (1 - 1e-9) and 0 < trial[1] <= a:
                try:
                    ft, bt = residual(trial, state["b"])
                    if np.linalg.norm(ft) < norm:
                        break
                except TrapCCError:
                    pass
            t *= 0.5
        else:
            raise _stalled(pair, z, state["b"], a, fz, cfg)
        z, fz, state["b"] = trial, ft, bt
        if t * np.linalg.norm(dz) <= 1e-15 * a:
            break
    else:
        raise NoConvergence(f"no convergence after {max_iter} iterations (|F|={np.linalg.norm(fz):.3e})")
    if np.linalg.norm(fz) > 1e-10:
        raise _stalled(pair, z, state["b"], a, fz, cfg)
    r, _ = distances(z, state["b"])
    sol = evaluate(r, cfg.tol)
    if not sol.in_omega:
        raise ConvergedOutsideOmega("converged outside the ordered region", sol, _rhombus_witness(sol))
    return sol


def _rhombus_witness(sol: CCSolution):
    r, m = sol.distances, sol.masses
    return {"|r12-r34|/a": abs(r.r12 - r.r34) / r.r12, "|r14-r23|/a": abs(r.r14 - r.r23) / r.r12,
            "|r12-r14|/a": abs(r.r12 - r.r14) / r.r12, "|m1-m3|": abs(m.m1 - m.m3),
            "|m2-m4|": abs(m.m2 - m.m4)}


def _stalled(pair, z, b, a, fz, cfg):
    """Classify a Newton stall: near the parallelogram strip it is a boundary limit."""
    c, d = (float(v) for v in z)
    try:
        sol = evaluate(trapezoid_distances(a, b, c, d), cfg.tol)
    except TrapCCError:
        sol = None
    witness = _rhombus_witness(sol) if sol is not None else {}
    witness["|F|"] = float(np.linalg.norm(fz))
    return ConvergedOutsideOmega(
        f"equal-mass pair {tuple(pair)} drifted to c={c!r}, d={d!r} without an interior root",
        sol, witness)


# ---------------------------------------------------------------------------
# Symmetric families


def rhombus_branch(diag_ratio: float, side: float = 1.0, tol: Tolerances | None = None) -> CCSolution:
    """Rhombus c.c. with m1 = m3 = 1 and m2 = m4 = q.

    The diagonals satisfy e/f = diag_ratio and e^2 + f^2 = 4 side^2. lambda is
    linear in Dziobek's relation, and q comes from the (12) and (13) equations.
    """
    if diag_ratio < 1:
        raise ValueError("diag_ratio is e/f and must be >= 1")
    f = 2.0 * side / math.sqrt(1.0 + diag_ratio**2)
    e = diag_ratio * f
    r = DistanceVector.from_sides(side, side, side, side, e, f)
    s, xe = side**-3, e**-3
    lam = lambda_dziobek(r).lam
    q = (lam - xe) / (s - lam)
    if not (q > 0 and math.isfinite(q)):
        raise NoPositiveMasses(f"diagonal ratio {diag_ratio!r} gives mass ratio q={q!r}")
    m = MassVector(1.0, q, 1.0, q)
    m = MassVector(1.0, q, 1.0, q, ratio_consistency(r, m))
    mult = sigma_recover(r, m, lambda_dziobek(r))
    return evaluate(r, tol, masses=m, mult=mult)


def rhombus_window(side=1.0, lo=1.0, hi=3.0, iters=100):
    """Largest diagonal ratio that still yields positive masses, by bisection."""
    def ok(x):
        try:
            rhombus_branch(x, side)
            return True
        except NoPositiveMasses:
            return False

    if not ok(lo):
        raise NoPositiveMasses("no admissible ratio at the lower end")
    if ok(hi):
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def isosceles_cc(a: float, c: float, cfg: ScanConfig | None = None) -> CCSolution:
    """Isosceles trapezoid c.c. (legs b = d) with bases a > c.

    With b = d the diagonals are equal, e^2 = ac + d^2, and the relation
    factors through (e^3 - d^3). The remaining factor changes sign on (c, a).
    """
    cfg = cfg or ScanConfig(a_fixed=a)
    _check_domain(a, c, c)

    def k(d):
        e3 = (a * c + d * d) ** 1.5
        return (e3 - a**3) * (d**3 - c**3) - (a**3 - d**3) * (e3 - c**3)

    lo = max(c, 0.5 * (a - c)) * (1 + 1e-12)
    hi = a
    k_lo, k_hi = k(lo), k(hi)
    if (k_lo < 0) == (k_hi < 0):
        raise NoSignChange(f"no isosceles root for a={a!r}, c={c!r}")
    lo, hi, f_lo, f_hi, _ = _bisect(k, lo, hi, k_lo, k_hi, cfg.tol.root)
    d = lo if abs(f_lo) <= abs(f_hi) else hi
    e = math.sqrt(a * c + d * d)
    r = DistanceVector.from_sides(a, d, c, d, e, e)
    return evaluate(r, cfg.tol)
