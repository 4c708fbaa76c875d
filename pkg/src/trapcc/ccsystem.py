"""Central-configuration equations written in the mutual distances.

Unknowns besides the distances are the masses (gauge m1 = 1) and the two
multipliers: lambda (Dziobek's) and sigma (the one attached to the trapezoid
constraint). Every equation used here is a scalar polynomial or rational
expression in inverse cubes x_ij = r_ij**-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import Tolerances
from .errors import DegenerateDenominator, SingularRatio
from .geometry import (KEYS, PAIRS, DistanceVector, Residual, ShapeClass, Verdict,
                       cayley_menger, check_omega, classify_shape, delta_squared_gradient,
                       height, realizability, trapezoid_residual)

# Opposite pairs (12,34), (13,24), (14,23), the three factors of Dziobek's relation
OPPOSITE = (("r12", "r34"), ("r13", "r24"), ("r14", "r23"))
SINGULAR_REL = 1e-12


@dataclass(frozen=True)
class MassVector:
    m1: float
    m2: float
    m3: float
    m4: float
    consistency: float = 0.0

    def as_tuple(self):
        return (self.m1, self.m2, self.m3, self.m4)

    def __getitem__(self, i: int) -> float:
        return self.as_tuple()[i - 1]

    def total(self) -> float:
        return sum(self.as_tuple())

    def positive(self) -> bool:
        return all(m > 0 and math.isfinite(m) for m in self.as_tuple())


@dataclass(frozen=True)
class Multipliers:
    lam: float
    sigma: float | None = None
    lambda_spread: float = 0.0
    sigma_spread: float | None = None


@dataclass(frozen=True)
class CCSolution:
    distances: DistanceVector
    masses: MassVector
    multipliers: Multipliers
    residuals: dict
    shape: ShapeClass
    in_omega: bool
    planar: bool = True
    notes: tuple = field(default=())

    def to_flat_dict(self) -> dict:
        out = dict(self.distances.to_dict())
        out.update(m1=self.masses.m1, m2=self.masses.m2, m3=self.masses.m3, m4=self.masses.m4,
                   mass_consistency=self.masses.consistency,
                   **{"lambda": self.multipliers.lam}, sigma=self.multipliers.sigma,
                   lambda_spread=self.multipliers.lambda_spread,
                   sigma_spread=self.multipliers.sigma_spread)
        out.update({f"res_{k}": v for k, v in self.residuals.items()})
        out.update(shape=self.shape.tag.value, in_omega=self.in_omega, planar=self.planar)
        return out


def inverse_cubes(r: DistanceVector) -> dict:
    return {k: getattr(r, k) ** -3 for k in KEYS}


# ---------------------------------------------------------------------------
# Sextic relation and Dziobek's relation


def relation_sides(r: DistanceVector):
    """Both sides of (r13^3-r12^3)(r23^3-r34^3)(r24^3-r14^3) = (r12^3-r14^3)(r24^3-r34^3)(r13^3-r23^3)."""
    c = {k: getattr(r, k) ** 3 for k in KEYS}
    lhs = (c["r13"] - c["r12"]) * (c["r23"] - c["r34"]) * (c["r24"] - c["r14"])
    rhs = (c["r12"] - c["r14"]) * (c["r24"] - c["r34"]) * (c["r13"] - c["r23"])
    return lhs, rhs


def relation_residual(r: DistanceVector) -> Residual:
    lhs, rhs = relation_sides(r)
    raw = lhs - rhs
    guard = r.r13**9 * 1e-300
    return Residual(raw, raw / max(abs(lhs), abs(rhs), guard))


def _pairwise_lambdas(x):
    sums = [x[i] + x[j] for i, j in OPPOSITE]
    prods = [x[i] * x[j] for i, j in OPPOSITE]
    out = []
    for p, q in ((0, 1), (0, 2), (1, 2)):
        den = sums[p] - sums[q]
        if abs(den) <= SINGULAR_REL * (abs(sums[p]) + abs(sums[q])):
            continue
        out.append((prods[p] - prods[q]) / den)
    return out


def lambda_dziobek(r: DistanceVector) -> Multipliers:
    """Solve (x12-l)(x34-l) = (x13-l)(x24-l) = (x14-l)(x23-l) for l.

    Each of the three pairwise equalities is linear in l; pairs whose l
    coefficient vanishes are skipped. The mean of the usable solutions is
    returned together with their relative spread.
    """
    lams = _pairwise_lambdas(inverse_cubes(r))
    if not lams:
        raise DegenerateDenominator("every pairwise Dziobek equality is independent of lambda")
    lam = sum(lams) / len(lams)
    spread = (max(lams) - min(lams)) / abs(lam) if len(lams) > 1 and lam != 0 else 0.0
    return Multipliers(lam=lam, lambda_spread=spread)


def dziobek_products(r: DistanceVector, lam: float):
    x = inverse_cubes(r)
    return tuple((x[i] - lam) * (x[j] - lam) for i, j in OPPOSITE)


def dziobek_residual(r: DistanceVector):
    """Differences P1-P2 and P1-P3 of the three Dziobek products, over max |P_k|."""
    lams = _pairwise_lambdas(inverse_cubes(r))
    lam = sum(lams) / len(lams) if lams else 0.0
    p = dziobek_products(r, lam)
    scale = max(abs(v) for v in p) or 1.0
    return ((p[0] - p[1]) / scale, (p[0] - p[2]) / scale)


# ---------------------------------------------------------------------------
# Masses


def ratio_formulas(r: DistanceVector):
    """The six ratio formulas m_i/m_j = num/den.

    Yields ``(i, j, num, den, cancel)``, where ``cancel`` is |den| divided by
    the sum of the magnitudes of its two terms. It is near zero when the
    denominator is lost to cancellation.
    """
    x = inverse_cubes(r)
    q = r.r34 / r.r12

    def diff(u, v):
        return x[u] - x[v], abs(x[u] - x[v]) / (x[u] + x[v])

    d12, c12 = diff("r13", "r14")
    d13, c13 = diff("r12", "r14")
    d14, c14 = diff("r12", "r13")
    d23, c23 = diff("r12", "r24")
    d24, c24 = diff("r12", "r23")
    d34, c34 = diff("r13", "r23")
    return (
        (1, 2, -(x["r23"] - x["r24"]), d12, c12),
        (1, 3, q * (x["r23"] - x["r34"]), d13, c13),
        (1, 4, -q * (x["r24"] - x["r34"]), d14, c14),
        (2, 3, -q * (x["r13"] - x["r34"]), d23, c23),
        (2, 4, q * (x["r14"] - x["r34"]), d24, c24),
        (3, 4, -(x["r14"] - x["r24"]), d34, c34),
    )


def _safe_div(num, den):
    try:
        return num / den
    except ZeroDivisionError:
        return math.inf


def mass_ratios(r: DistanceVector) -> MassVector:
    """Masses with m1 = 1 from the six ratio formulas.

    Three formulas forming a spanning tree on the four bodies fix the masses.
    They are chosen greedily, best-conditioned denominator first, with ties
    broken by formula order. The remaining formulas and every triangle cycle
    product then measure consistency.
    """
    formulas = ratio_formulas(r)
    usable = [f for f in formulas if f[4] > SINGULAR_REL]
    order = sorted(range(len(usable)), key=lambda k: (-usable[k][4], k))
    parent = {i: i for i in range(1, 5)}

    def root(i):
        while parent[i] != i:
            i = parent[i]
        return i

    tree = []
    for k in order:
        i, j = usable[k][:2]
        ri, rj = root(i), root(j)
        if ri != rj:
            parent[ri] = rj
            tree.append(usable[k])
    if len(tree) < 3:
        isolated = sorted({root(i) for i in range(1, 5)})
        raise SingularRatio(f"mass ratio formulas leave components {isolated} unconnected")

    ratio = {(f[0], f[1]): _safe_div(f[2], f[3]) for f in usable}
    m = {1: 1.0}
    pending = list(tree)
    while pending:
        for f in list(pending):
            i, j = f[:2]
            rho = ratio[(i, j)]
            if i in m:
                m[j] = _safe_div(m[i], rho)
            elif j in m:
                m[i] = rho * m[j]
            else:
                continue
            pending.remove(f)

    worst = 0.0
    tree_pairs = {(f[0], f[1]) for f in tree}
    for (i, j), rho in ratio.items():
        if (i, j) in tree_pairs:
            continue
        implied = _safe_div(m[i], m[j])
        worst = max(worst, _rel(rho, implied))
    for i, j, k in ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)):
        if (i, j) in ratio and (j, k) in ratio and (i, k) in ratio:
            worst = max(worst, _rel(ratio[(i, j)] * ratio[(j, k)], ratio[(i, k)]))
    return MassVector(m[1], m[2], m[3], m[4], worst)


def _rel(x, y):
    if x == y:
        return 0.0
    scale = max(abs(x), abs(y))
    if not math.isfinite(scale) or scale == 0:
        return math.inf
    return abs(x - y) / scale


def ratio_consistency(r: DistanceVector, m: MassVector) -> float:
    """Worst relative disagreement between ``m`` and every well-conditioned ratio formula."""
    worst = 0.0
    for i, j, num, den, cancel in ratio_formulas(r):
        if cancel > SINGULAR_REL:
            worst = max(worst, _rel(num / den, m[i] / m[j]))
    return worst


# ---------------------------------------------------------------------------
# sigma and the full set of critical-point equations


def cc_equations(r: DistanceVector, m: MassVector, lam: float, sigma: float):
    """(lhs, rhs) of the six critical-point equations m_i m_j (x_ij - lam) = sigma * g_ij."""
    x = inverse_cubes(r)
    half_r = 0.5 * (r.r13**2 + r.r24**2 - r.r14**2 - r.r23**2)
    rhs_factor = {"r12": r.r34**2, "r34": r.r12**2, "r13": -half_r, "r24": -half_r,
                  "r14": half_r, "r23": half_r}
    out = []
    for (i, j), key in zip(PAIRS, KEYS):
        out.append((m[i] * m[j] * (x[key] - lam), sigma * rhs_factor[key]))
    return out


def sigma_recover(r: DistanceVector, m: MassVector, mult: Multipliers) -> Multipliers:
    sigma = m.m1 * m.m2 * (r.r12**-3 - mult.lam) / r.r34**2
    eqs = cc_equations(r, m, mult.lam, sigma)
    scale = max(max(abs(lhs), abs(rhs)) for lhs, rhs in eqs)
    spread = max(abs(lhs - rhs) for lhs, rhs in eqs) / scale if scale > 0 else 0.0
    return replace(mult, sigma=sigma, sigma_spread=spread)


# ---------------------------------------------------------------------------
# Reporting quantities


def grad_cayley_menger_fd(r: DistanceVector, rel_step: float = 1e-6) -> np.ndarray:
    v = r.as_array()
    g = np.empty(6)
    for k in range(6):
        step = rel_step * v[k]
        up, down = v.copy(), v.copy()
        up[k] += step
        down[k] -= step
        g[k] = (cayley_menger(DistanceVector(*up)) - cayley_menger(DistanceVector(*down))) / (2 * step)
    return g


def grad_parallel_check(r: DistanceVector, rel_step: float = 1e-6):
    """Compare the finite-difference gradient of H with 8 h^2 grad F.

    Returns ``(8 h^2, max componentwise relative deviation)``.
    """
    factor = 8.0 * height(r) ** 2
    target = factor * delta_squared_gradient(r)
    dev = np.abs(grad_cayley_menger_fd(r, rel_step) - target) / np.abs(target)
    return factor, float(dev.max())


def potential_inertia(r: DistanceVector, m: MassVector):
    """Newtonian potential U and moment of inertia I = sum m_i m_j r_ij^2 / (2M)."""
    u = 0.0
    s = 0.0
    for (i, j), key in zip(PAIRS, KEYS):
        mm = m[i] * m[j]
        rij = getattr(r, key)
        u += mm / rij
        s += mm * rij * rij
    return u, s / (2.0 * m.total())


# ---------------------------------------------------------------------------
# Assembly


def evaluate(r: DistanceVector, tol: Tolerances | None = None,
             masses: MassVector | None = None, mult: Multipliers | None = None) -> CCSolution:
    """Compute masses, multipliers, residuals, shape and region membership for ``r``."""
    tol = tol or Tolerances()
    if masses is None:
        masses = mass_ratios(r)
    if mult is None:
        mult = lambda_dziobek(r)
    if mult.sigma is None:
        mult = sigma_recover(r, masses, mult)
    residuals = {
        "relation": abs(relation_residual(r).normalized),
        "trapezoid": abs(trapezoid_residual(r).normalized),
        "cayley_menger": abs(cayley_menger(r)) / r.r13**8,
        "dziobek": max(abs(v) for v in dziobek_residual(r)),
    }
    planar = realizability(r, tol.cayley_menger).verdict is Verdict.PLANAR
    return CCSolution(
        distances=r, masses=masses, multipliers=mult, residuals=residuals,
        shape=classify_shape(r, tol.classify), in_omega=check_omega(r, tol.omega).in_omega,
        planar=planar,
    )


def gate_failures(sol: CCSolution, tol: Tolerances | None = None, need_omega: bool = True):
    """Names of the acceptance gates ``sol`` fails (empty list means accepted)."""
    tol = tol or Tolerances()
    res = sol.residuals
    failed = []
    if res["relation"] > tol.relation:
        failed.append("relation")
    if res["trapezoid"] > tol.trapezoid:
        failed.append("trapezoid")
    if res["cayley_menger"] > tol.cayley_menger:
        failed.append("cayley_menger")
    if res["dziobek"] > tol.multiplier:
        failed.append("dziobek")
    if not sol.planar:
        failed.append("realizability")
    if not sol.masses.positive():
        failed.append("positive_masses")
    if not sol.masses.consistency <= tol.mass:
        failed.append("mass_consistency")
    if not sol.multipliers.lambda_spread <= tol.multiplier:
        failed.append("lambda_spread")
    if not (sol.multipliers.sigma_spread is not None and sol.multipliers.sigma_spread <= tol.multiplier):
        failed.append("sigma_spread")
    if need_omega and not sol.in_omega:
        failed.append("omega")
    return failed
