#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# Created on 18-10-2026
# @author: pdstretch developers

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import integrate, optimize

from .sampling import derive_seed

logger = logging.getLogger(__name__)

RHO_MAX = 4e-6
P_FEASIBLE = 0.01
REFERENCE_RHO = 1.25e-10
REFERENCE_INTENSITY = 153
THEOREM_EXCESS = 2.47e-11


class DomainError(ValueError):
    """Raised when a bound is evaluated outside the parameter range it holds on."""


class InfeasibleError(ValueError):
    """Raised when a search or witness has no admissible value."""


#########################################
# In this section we collect the closed-form constants and the bound P(rho, n)
#########################################


def constants():
    """Named constants with a short note on what each one measures.

    :returns: table with columns name, value, source
    :rtype: DataFrame
    """

    rows = [
        ("walk_edges_per_sqrt_n", 64.0 / (3.0 * math.pi ** 2), "expected crossed edges of the straight walk over sqrt(n) k"),
        ("upper_path_stretch", 35.0 / (3.0 * math.pi ** 2), "expected length of the upper path over k"),
        ("delaunay_stretch_bound", 1.998, "upper bound on the stretch factor of any finite Delaunay triangulation"),
        ("delaunay_stretch_example", 1.5932, "stretch factor reached by a known point configuration"),
        ("half_circle_stretch", math.pi / 2.0, "stretch of points along a half circle over [s,t]"),
        ("animal_factor", 3.0 * math.sqrt(2.0) / 2.0, "pixels met per unit length of a polyline"),
        ("animal_size_factor", 4.24, "animal size of the shortest path over k"),
        ("animal_tail_factor", 2.55, "animal size threshold over k with vanishing probability"),
        ("theorem_excess", THEOREM_EXCESS, "lower bound on the excess stretch of the shortest path"),
        ("baccelli_stretch", 4.0 / math.pi, "earlier upper bound on the expected stretch"),
        ("origin_edge_length", 6.8, "experimental E[L0] sqrt(n)"),
        ("upper_path_tail", 1.2, "stretch above which the upper path has exponentially small probability"),
    ]

    return pd.DataFrame(rows, columns=["name", "value", "source"])


def walk_count_target():
    return 64.0 / (3.0 * math.pi ** 2)


def upper_path_target():
    return 35.0 / (3.0 * math.pi ** 2)


def independence_failure_bound(n):
    """Upper bound on the probability that I_eps(v) fails.

    .. math:: 95 n^3 e^{-0.194 n} + (19 n^2 + 13 n + 4) e^{-n \\pi}
    """

    return 95.0 * n ** 3 * np.exp(-0.194 * n) + (19.0 * n ** 2 + 13.0 * n + 4.0) * np.exp(-n * np.pi)


def _horizontality_term(rho, n):
    eps = np.sqrt(rho) * np.sqrt(rho + 2.0)
    return 31.76 * (0.75 + eps / 2.0) ** 2 * np.sqrt(rho * n)


def _p_bound(rho, n):
    return independence_failure_bound(n) + _horizontality_term(rho, n)


def eval_P(rho, n, strict=True):
    """Upper bound P(rho, n) on the probability of H_rho(v) or not I_eps_rho(v).

    .. math::

        P(\\rho, n) = 95 n^3 e^{-0.194 n} + (19n^2+13n+4)e^{-n\\pi}
        + 31.76 \\left(\\frac{3}{4} + \\frac{\\sqrt{\\rho}\\sqrt{\\rho+2}}{2}\\right)^2 \\sqrt{\\rho n}

    :param rho: rho in (0, 4e-6)
    :type rho: float
    :param n: intensity
    :type n: float
    :param strict: raise outside the rho range instead of logging a warning
    :type strict: bool

    :rtype: float
    """

    if not n > 0:
        raise DomainError("Intensity must be positive, got " + str(n))
    if not 0 < rho < RHO_MAX:
        if strict or rho <= 0:
            raise DomainError("rho must lie in (0, " + str(RHO_MAX) + "), got " + str(rho))
        logger.warning("Evaluating P(rho, n) at rho=%s, outside the range where it bounds the event", rho)

    return float(_p_bound(rho, n))


def objective(rho, n):
    """rho (1 - 16 sqrt(P(rho, n))), clamped at 0 once 16 sqrt(P) >= 1."""

    return rho * max(0.0, 1.0 - 16.0 * math.sqrt(eval_P(rho, n)))


@dataclass(frozen=True)
class BoundParams:
    rho: float
    n: float

    @property
    def p(self):
        return eval_P(self.rho, self.n)

    @property
    def objective(self):
        return objective(self.rho, self.n)

    @property
    def feasible(self):
        return self.p < P_FEASIBLE


@dataclass(frozen=True)
class SearchResult:
    rho: float
    n: int
    value: float
    reference_rho: float
    reference_n: int
    reference_value: float


def objective_and_search(rho_range=(1e-12, RHO_MAX), n_range=(50, 500), rho_points=400):
    """Maximise rho (1 - 16 sqrt(P(rho, n))) over a log grid in rho and integer n, subject to P < 0.01, then refine
    rho with a bounded scalar search around the best grid point.

    :param rho_range: search interval for rho
    :type rho_range: tuple
    :param n_range: inclusive integer range for n
    :type n_range: tuple
    :param rho_points: grid size in rho
    :type rho_points: int

    :returns: the searched optimum, and separately the value at the reference point (1.25e-10, 153)
    :rtype: SearchResult
    """

    lo, hi = rho_range
    hi = min(hi, RHO_MAX * (1.0 - 1e-9))
    rhos = np.geomspace(lo, hi, rho_points)
    ns = np.arange(n_range[0], n_range[1] + 1)
    rr, nn = np.meshgrid(rhos, ns, indexing="ij")
    p = _p_bound(rr, nn.astype(float))
    values = np.where(p < P_FEASIBLE, rr * np.clip(1.0 - 16.0 * np.sqrt(p), 0.0, None), -np.inf)

    if not np.isfinite(values).any():
        raise InfeasibleError("No (rho, n) in the search ranges has P(rho, n) < " + str(P_FEASIBLE))

    i, j = np.unravel_index(np.argmax(values), values.shape)
    best_rho, best_n, best_value = float(rhos[i]), int(ns[j]), float(values[i, j])

    left, right = math.log(rhos[max(i - 1, 0)]), math.log(rhos[min(i + 1, len(rhos) - 1)])
    if right > left:
        refined = optimize.minimize_scalar(lambda x: -objective(math.exp(x), best_n), bounds=(left, right),
                                           method="bounded")
        candidate = math.exp(refined.x)
        if eval_P(candidate, best_n) < P_FEASIBLE and objective(candidate, best_n) > best_value:
            best_rho, best_value = candidate, objective(candidate, best_n)

    reference_value = objective(REFERENCE_RHO, REFERENCE_INTENSITY)

    return SearchResult(rho=best_rho, n=best_n, value=best_value, reference_rho=REFERENCE_RHO,
                        reference_n=REFERENCE_INTENSITY, reference_value=reference_value)


def lambda_witness(p):
    """Smallest lambda in [1.6 / sqrt(p), 2 / sqrt(p)] with lambda = 2 mod 4.

    :rtype: int
    """

    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1), got " + str(p))
    lo, hi = 1.6 / math.sqrt(p), 2.0 / math.sqrt(p)
    lam = 4 * math.ceil((lo - 2.0) / 4.0) + 2
    if lam > hi:
        raise InfeasibleError("No lambda = 2 mod 4 in [" + str(lo) + ", " + str(hi) + "]")
    return int(lam)


def percolation_tail(k, p, x=4.0):
    """Tail bound 4 e^10 exp(-(x - 3.98) k sqrt(p)) on large colored animals."""

    return 4.0 * math.exp(10.0) * math.exp(-(x - 3.98) * k * math.sqrt(p))


def animal_size_bound(k, scale=1):
    return 4.24 * k / scale + 1.0


def animal_tail_threshold(k, scale=1):
    return 2.55 * k / scale + 1.0


#########################################
# Gaussian radial moments: closed forms and quadrature
#########################################

_MOMENTS = {
    (4, 0): lambda n: 3.0 / (8.0 * math.pi ** 2 * n ** 2 * math.sqrt(n)),
    (5, 0): lambda n: 1.0 / (math.pi ** 3 * n ** 3),
    (5, 1): lambda n: math.exp(-n * math.pi) * (1.0 / (2.0 * math.pi * n) + 1.0 / (math.pi ** 2 * n ** 2)
                                                + 1.0 / (math.pi ** 3 * n ** 3)),
    (6, 0): lambda n: 15.0 / (16.0 * math.pi ** 3 * n ** 3 * math.sqrt(n)),
    (8, 0): lambda n: 105.0 / (32.0 * math.pi ** 4 * n ** 4 * math.sqrt(n)),
    (10, 0): lambda n: 945.0 / (64.0 * math.pi ** 5 * n ** 5 * math.sqrt(n)),
    (12, 0): lambda n: 10395.0 / (128.0 * math.pi ** 6 * n ** 6 * math.sqrt(n)),
}


def gaussian_moment(j, n, lower=0):
    """Closed form of the integral of exp(-n pi r^2) r^j for r from lower to infinity.

    :param j: power of r, one of 4, 5, 6, 8, 10, 12
    :type j: int
    :param n: intensity
    :type n: float
    :param lower: 0, or 1 for j = 5
    :type lower: int

    :rtype: float
    """

    try:
        closed_form = _MOMENTS[(int(j), int(lower))]
    except KeyError:
        raise DomainError("No closed form for r^" + str(j) + " from " + str(lower)) from None
    return closed_form(n)


def gaussian_moment_check(j, n, lower=0):
    """Compare :py:func:`gaussian_moment` with adaptive quadrature.

    With u = r sqrt(n pi) the integral becomes (n pi)^(-(j+1)/2) times the integral of exp(-u^2) u^j. For lower=1
    both sides are multiplied by exp(n pi) so that large n does not underflow.

    :returns: quadrature value, closed form, relative error
    :rtype: float, float, float
    """

    scale = (n * math.pi) ** (-(j + 1) / 2.0)
    if lower == 0:
        value, _ = integrate.quad(lambda u: math.exp(-u * u) * u ** j, 0.0, np.inf, epsabs=0.0, epsrel=1e-13,
                                  limit=200)
        closed = gaussian_moment(j, n, 0)
    elif j == 5 and lower == 1:
        u0 = math.sqrt(n * math.pi)
        value, _ = integrate.quad(lambda w: math.exp(-(2.0 * u0 * w + w * w)) * (u0 + w) ** j, 0.0, np.inf,
                                  epsabs=0.0, epsrel=1e-13, limit=200)
        closed = 1.0 / (2.0 * math.pi * n) + 1.0 / (math.pi ** 2 * n ** 2) + 1.0 / (math.pi ** 3 * n ** 3)
    else:
        raise DomainError("No closed form for r^" + str(j) + " from " + str(lower))

    estimate = value * scale
    return estimate, closed, abs(estimate - closed) / abs(closed)


#########################################
# Angle integrals over triples of points on a circle
#########################################


def circle_det(b1, b2, b3):
    """det [[1, 1, 1], [cos b1, cos b2, cos b3], [sin b1, sin b2, sin b3]], twice the area of the inscribed triangle."""

    return np.sin(b2 - b1) + np.sin(b3 - b2) + np.sin(b1 - b3)


def _uniform(rng, lo, hi, size):
    return lo + (hi - lo) * rng.random(size)


def _mc_area(rng, size):
    betas = rng.random((3, size)) * 2.0 * np.pi
    return (2.0 * np.pi) ** 3 * np.abs(circle_det(*betas))


def _mc_area_halfplane(rng, size):
    h = _uniform(rng, -1.0, 1.0, size)
    a = np.arcsin(h)
    b3 = _uniform(rng, np.pi + a, 2.0 * np.pi - a, size)
    b2 = _uniform(rng, -a, np.pi + a, size)
    b1 = _uniform(rng, -a, np.pi + a, size)
    volume = 2.0 * (np.pi - 2.0 * a) * (np.pi + 2.0 * a) ** 2
    return volume * np.abs(circle_det(b1, b2, b3))


def _mc_area_length(rng, size):
    h = _uniform(rng, -1.0, 1.0, size)
    a = np.arcsin(h)
    b3 = _uniform(rng, np.pi + a, 2.0 * np.pi - a, size)
    b2 = _uniform(rng, -a, np.pi + a, size)
    b1 = _uniform(rng, -a, b2, size)
    volume = 2.0 * (np.pi - 2.0 * a) * (np.pi + 2.0 * a) * (b2 + a)
    return volume * circle_det(b1, b2, b3) * 2.0 * np.sin((b2 - b1) / 2.0)


def _mc_projection(alpha):
    def sample(rng, size):
        b3 = _uniform(rng, np.pi / 2.0, 3.0 * np.pi / 2.0, size)
        b2 = _uniform(rng, np.pi - b3, np.pi / 2.0, size)
        b1 = _uniform(rng, np.pi - b2 - 2.0 * alpha, np.pi - b2 + 2.0 * alpha, size)
        volume = np.pi * (b3 - np.pi / 2.0) * 4.0 * alpha
        return volume * circle_det(b1, b2, b3) * (np.cos(b1) - np.cos(b2))
    return sample


def projection_closed_form(alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    return 64.0 / 9.0 * c ** 3 * s + 32.0 / 3.0 * c * s + 32.0 / 3.0 * alpha


def monte_carlo(sampler, samples, seed, block=1000000):
    """Mean of a weighted sampler over `samples` draws, drawn in blocks with their own sub-seeds."""

    total = 0.0
    done = 0
    for index in range(math.ceil(samples / block)):
        size = min(block, samples - done)
        rng = np.random.default_rng(derive_seed(seed, index))
        total += float(np.sum(sampler(rng, size)))
        done += size
    return total / samples


def nested_gauss(f, limits, points=24):
    """Tensor Gauss-Legendre rule over a nested domain.

    :param f: integrand taking one array per variable, outermost first
    :type f: callable
    :param limits: (lo, hi) of the outermost variable, then callables mapping the outer variables to (lo, hi)
    :type limits: list
    :param points: nodes per dimension
    :type points: int

    :rtype: float
    """

    nodes, weights = np.polynomial.legendre.leggauss(points)
    lo, hi = limits[0]
    variables = [lo + (hi - lo) * (nodes + 1.0) / 2.0]
    w = weights * (hi - lo) / 2.0
    for bounds in limits[1:]:
        lo, hi = bounds(*variables)
        half = (np.asarray(hi) - np.asarray(lo)) / 2.0
        variables = [np.repeat(v, points) for v in variables]
        variables.append((np.asarray(lo)[:, None] + half[:, None] * (nodes + 1.0)[None, :]).ravel())
        w = (w[:, None] * half[:, None] * weights[None, :]).ravel()
    return float(np.sum(w * f(*variables)))


def _quad_area(points):
    value = nested_gauss(lambda b3, b2, b1: circle_det(b1, b2, b3),
                         [(0.0, 2.0 * np.pi), lambda b3: (np.zeros_like(b3), b3), lambda b3, b2: (np.zeros_like(b2), b2)],
                         points)
    return 6.0 * value


def _halfplane_limits():
    return [(-1.0, 1.0),
            lambda h: (np.pi + np.arcsin(h), 2.0 * np.pi - np.arcsin(h)),
            lambda h, b3: (-np.arcsin(h), np.pi + np.arcsin(h)),
            lambda h, b3, b2: (-np.arcsin(h), b2)]


def _quad_area_halfplane(points):
    return 2.0 * nested_gauss(lambda h, b3, b2, b1: circle_det(b1, b2, b3), _halfplane_limits(), points)


def _quad_area_length(points):
    return nested_gauss(lambda h, b3, b2, b1: circle_det(b1, b2, b3) * 2.0 * np.sin((b2 - b1) / 2.0),
                        _halfplane_limits(), points)


def _quad_projection(alpha, points):
    return nested_gauss(lambda b3, b2, b1: circle_det(b1, b2, b3) * (np.cos(b1) - np.cos(b2)),
                        [(np.pi / 2.0, 3.0 * np.pi / 2.0),
                         lambda b3: (np.pi - b3, np.full_like(b3, np.pi / 2.0)),
                         lambda b3, b2: (np.pi - b2 - 2.0 * alpha, np.pi - b2 + 2.0 * alpha)],
                        points)


def verify_integrals(samples=10 ** 7, tolerance=1e-2, seed=0, intensities=(1, 10, 153, 10 ** 4),
                     alphas=(0.01, 0.1, math.pi / 8.0), quad_points=24, moment_tolerance=1e-9):
    """Check every closed form against an independent numerical value.

    Radial moments are compared with adaptive quadrature; angle integrals with Monte Carlo over their domains, with
    a nested Gauss-Legendre value as a second estimate.

    :param samples: Monte Carlo draws per angle integral
    :type samples: int
    :param tolerance: allowed relative error of the angle integrals
    :type tolerance: float
    :param seed: master seed of the Monte Carlo draws
    :type seed: int

    :returns: report with columns integral_id, estimate, closed_form, rel_err, pass
    :rtype: DataFrame
    """

    rows = []

    def add(integral_id, estimate, closed, tol):
        rel_err = abs(estimate - closed) / abs(closed)
        rows.append((integral_id, estimate, closed, rel_err, bool(rel_err <= tol)))

    for n in intensities:
        for j, lower in sorted(_MOMENTS):
            estimate, closed, _ = gaussian_moment_check(j, n, lower)
            add("gaussian_r" + str(j) + "_from" + str(lower) + "_n" + str(n), estimate, closed, moment_tolerance)

    angle_integrals = [
        ("angles_area", _mc_area, lambda: _quad_area(quad_points), 24.0 * math.pi ** 2),
        ("angles_area_halfplane", _mc_area_halfplane, lambda: _quad_area_halfplane(quad_points), 512.0 / 9.0),
        ("angles_area_length", _mc_area_length, lambda: _quad_area_length(quad_points), 35.0 * math.pi / 3.0),
    ]
    for alpha in alphas:
        angle_integrals.append(("angles_projection_alpha" + format(alpha, ".4f"), _mc_projection(alpha),
                                lambda alpha=alpha: _quad_projection(alpha, quad_points), projection_closed_form(alpha)))

    for index, (name, sampler, quadrature, closed) in enumerate(angle_integrals):
        add(name + "_monte_carlo", monte_carlo(sampler, samples, derive_seed(seed, index)), closed, tolerance)
        add(name + "_quadrature", quadrature(), closed, tolerance)

    report = pd.DataFrame(rows, columns=["integral_id", "estimate", "closed_form", "rel_err", "pass"])
    logger.info("%d of %d integral checks passed", int(report["pass"].sum()), len(report))

    return report
