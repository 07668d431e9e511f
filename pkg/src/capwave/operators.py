"""Residual operators for steady capillary-gravity waves in conformal variables.

Scaled parameters (alpha, beta) = (g/(c^2 k), sigma k/c^2) in deep water, or
(g/(k lambda^2), k sigma/lambda^2) with lambda = m/h - gamma*h/2 in finite
depth.  The profile unknown is a zero-mean even 2pi-periodic w.

Deep water:

    F(alpha, beta, w) = w'' - (w'/2beta) C(B) - ((1 + C w')/2beta) B,
    B = W^(-1/2) - (b - 2 alpha w) W^(1/2),
    W = w'^2 + (1 + C w')^2,
    b(alpha, w) = ([W^(-1/2)] + 2 alpha [w W^(1/2)]) / [W^(1/2)],

so that B, and with it the residual, has zero mean.  Flat water w = 0 solves
with b = 1; the Crapper pair (beta_A, w_A) solves at alpha = 0.

Finite depth with constant vorticity gamma enters through the strip
conjugation C_d with d = h*k(alpha, beta), k(alpha, beta) = sqrt(g beta/(alpha
sigma)), and the vorticity bracket

    V = 1 + gamma (alpha^3 sigma/(g^3 beta))^(1/4) *
          ( [w^2]/(2h) sqrt(alpha sigma/(g beta)) + C_d(w w') - w - w C_d w' ),

    A = V^2 W_d^(-1/2) - (qhat - 2 alpha w) W_d^(1/2),
    FD(alpha, beta, w) = w'' - (w'/2beta) C_d(A) - ((1 + C_d w')/2beta) A,

with qhat the scalar that gives the residual zero mean (it enters affinely,
so it is isolated in closed form).  For alpha <= 0 every finite-depth object
continuously extends to its deep alpha = 0 counterpart, which keeps the whole
family defined on an open interval around alpha = 0.

The angle formulation: Theta(w) = atan2(w', 1 + C w'), exp(C Theta(w)) =
W(w)^(1/2), and at alpha = 0 the w-residual factors through

    G(theta) = theta' - exp(-C theta)/(2beta)
               + ([exp(-C theta)]/[exp(C theta)]) exp(C theta)/(2beta),

whose zero set matches F(0, beta, .) under w -> Theta(w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .spectral import (
    DegenerateMetricError,
    PeriodicFunction,
    derivative,
    drop_mean,
    hilbert,
    hilbert_strip,
    mean,
    mul,
    pf_atan2,
    pf_cos,
    pf_exp,
    pf_pow,
    pf_sin,
)

import numpy as np


@dataclass(frozen=True)
class DepthMode:
    """Fluid-column geometry: infinite depth, or a strip of conformal mean
    depth h carrying constant vorticity gamma."""

    h: float = math.inf
    gamma: float = 0.0

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError(f"depth must be positive, got {self.h}")
        if math.isinf(self.h) and self.gamma != 0.0:
            raise ValueError("infinite depth forces zero vorticity")

    @classmethod
    def infinite(cls):
        return cls()

    @classmethod
    def finite(cls, h: float, gamma: float = 0.0):
        if math.isinf(h):
            raise ValueError("finite depth mode needs a finite h")
        return cls(h=h, gamma=gamma)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.h)


@dataclass(frozen=True)
class WaveParams:
    """Scaled parameters plus the physical constants they were built from."""

    alpha: float
    beta: float
    g: float = 1.0
    sigma: float = 1.0
    gamma: float = 0.0
    h: float = math.inf

    def __post_init__(self):
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (self.g > 0.0 and self.sigma > 0.0):
            raise ValueError("g and sigma must be positive")
        if not self.h > 0.0:
            raise ValueError(f"depth must be positive, got {self.h}")
        if math.isinf(self.h) and self.gamma != 0.0:
            raise ValueError("infinite depth forces zero vorticity")

    @property
    def depth(self) -> DepthMode:
        return DepthMode(h=self.h, gamma=self.gamma)

    @classmethod
    def with_depth(cls, alpha, beta, depth: DepthMode, g=1.0, sigma=1.0):
        return cls(alpha=alpha, beta=beta, g=g, sigma=sigma, gamma=depth.gamma, h=depth.h)

    @property
    def lam(self) -> float:
        """Mean-flow scale lambda = sqrt(g/(k alpha)); needs alpha > 0."""
        k = wavenumber_k(self.alpha, self.beta, self.g, self.sigma)
        return math.sqrt(self.g / (k * self.alpha))


def wavenumber_k(alpha: float, beta: float, g: float = 1.0, sigma: float = 1.0) -> float:
    """k(alpha, beta) = sqrt(g*beta/(alpha*sigma)); diverges as alpha -> 0+."""
    if not alpha > 0.0:
        raise ValueError("no finite wavenumber for alpha <= 0 (deep-limit branch)")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    return math.sqrt(g * beta / (alpha * sigma))


# -- metric and angle ------------------------------------------------------------


def _metric_from(wp: PeriodicFunction, one_cwp: PeriodicFunction) -> PeriodicFunction:
    # squared grid-locally, not through padded FFT products: the metric is a
    # pointwise-positive quantity whose inverse square root amplifies any
    # delocalised rounding near its minimum (steep waves get within 1e-4 of
    # the degenerate threshold)
    parity = "even" if (wp.parity == "odd" and one_cwp.parity == "even") else "none"
    W = PeriodicFunction.from_samples(wp.samples ** 2 + one_cwp.samples ** 2, parity)
    if np.min(W.samples) < 1e-12:
        raise DegenerateMetricError("conformal metric vanishes on the grid")
    return W


def conformal_metric(w: PeriodicFunction, d: float | None = None) -> PeriodicFunction:
    """W(w) = w'^2 + (1 + C w')^2, with C the deep transform (d=None) or the
    strip transform at depth d.  Raises DegenerateMetricError when the metric
    is not bounded away from zero on the grid."""
    wp = derivative(w)
    cwp = hilbert(wp) if d is None else hilbert_strip(wp, d)
    return _metric_from(wp, 1.0 + cwp)


def theta_of(w: PeriodicFunction) -> PeriodicFunction:
    """Tangent angle Theta(w) = atan2(w', 1 + C w') on the principal branch.

    Valid while the surface slope angle stays inside (-pi, pi); a jump
    between adjacent grid points means the branch was left and is rejected.
    """
    wp = derivative(w)
    one_cwp = 1.0 + hilbert(wp)
    _metric_from(wp, one_cwp)
    th = pf_atan2(wp, one_cwp)
    jump = np.max(np.abs(np.diff(np.concatenate([th.samples, th.samples[:1]]))))
    if jump > 0.5 * np.pi:
        raise ValueError("tangent angle leaves the principal branch")
    return drop_mean(th)


# -- deep-water residual -----------------------------------------------------------


def _metric_powers(w, d=None):
    wp = derivative(w)
    wpp = derivative(wp)
    cwp = hilbert(wp) if d is None else hilbert_strip(wp, d)
    one_cwp = 1.0 + cwp
    W = _metric_from(wp, one_cwp)
    return wp, wpp, one_cwp, pf_pow(W, 0.5), pf_pow(W, -0.5)


def _bernoulli(alpha, w, whalf, winvhalf):
    return (mean(winvhalf) + 2.0 * alpha * mean(mul(w, whalf))) / mean(whalf)


def bernoulli_b(alpha: float, w: PeriodicFunction) -> float:
    """b(alpha, w) = ([W^(-1/2)] + 2 alpha [w W^(1/2)]) / [W^(1/2)]."""
    _, _, _, whalf, winvhalf = _metric_powers(w)
    return _bernoulli(alpha, w, whalf, winvhalf)


def residual_inf(params: WaveParams, w: PeriodicFunction) -> PeriodicFunction:
    """Deep-water residual F(alpha, beta, w); zero iff (alpha, beta, w) is a
    steady wave in scaled variables.  Mean-free by construction of b."""
    alpha, beta = params.alpha, params.beta
    wp, wpp, one_cwp, whalf, winvhalf = _metric_powers(w)
    b = _bernoulli(alpha, w, whalf, winvhalf)
    bracket = winvhalf - b * whalf + (2.0 * alpha) * mul(w, whalf)
    half = 0.5 / beta
    return wpp - half * mul(wp, hilbert(drop_mean(bracket))) - half * mul(one_cwp, bracket)


# -- angle-formulation residuals ---------------------------------------------------


def residual_G(beta: float, theta: PeriodicFunction) -> PeriodicFunction:
    """G(theta) = theta' - e^{-C theta}/(2b) + ([e^{-C theta}]/[e^{C theta}]) e^{C theta}/(2b)."""
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    ct = hilbert(drop_mean(theta))
    ep = pf_exp(ct)
    em = pf_exp(-ct)
    ratio = mean(em) / mean(ep)
    half = 0.5 / beta
    return derivative(theta) - half * em + (half * ratio) * ep


def residual_G_tilde(beta: float, theta: PeriodicFunction) -> PeriodicFunction:
    """The pushed-forward w-residual evaluated directly from its own display:

        Gt(theta) = (e^{C th} sin th)'
                    - (1/2b) e^{C th} sin th * C(e^{-C th})
                    + (r/2b) e^{C th} sin th * C(e^{C th})
                    - (1/2b) e^{C th} cos th * e^{-C th}
                    + (r/2b) e^{C th} cos th * e^{C th},

    with r = [e^{-C th}]/[e^{C th}].  Identically equal to
    e^{C th} sin th * C(G) + e^{C th} cos th * G, which the tests exercise.
    """
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    ct = hilbert(drop_mean(theta))
    ep = pf_exp(ct)
    em = pf_exp(-ct)
    ratio = mean(em) / mean(ep)
    eps_ = mul(ep, pf_sin(theta))
    epc = mul(ep, pf_cos(theta))
    half = 0.5 / beta
    return (derivative(eps_)
            - half * mul(eps_, hilbert(drop_mean(em)))
            + (half * ratio) * mul(eps_, hilbert(drop_mean(ep)))
            - half * mul(epc, em)
            + (half * ratio) * mul(epc, ep))


# -- finite-depth residual ----------------------------------------------------------


def _finite_depth_pieces(params: WaveParams, w: PeriodicFunction):
    """Strip metric powers, vorticity bracket and the zero-mean scalar qhat
    for alpha > 0."""
    alpha, beta, g, sigma = params.alpha, params.beta, params.g, params.sigma
    gamma, h = params.gamma, params.h
    if math.isinf(h):
        raise ValueError("finite-depth residual with alpha > 0 needs a finite depth h")
    d = h * wavenumber_k(alpha, beta, g, sigma)
    wp, wpp, one_cwp, whalf, winvhalf = _metric_powers(w, d=d)
    cwp = one_cwp - 1.0

    pref = gamma * (alpha ** 3 * sigma / (g ** 3 * beta)) ** 0.25
    const = mean(mul(w, w)) / (2.0 * h) * math.sqrt(alpha * sigma / (g * beta))
    inner = const + hilbert_strip(drop_mean(mul(w, wp)), d) - w - mul(w, cwp)
    bracket_v = 1.0 + pref * inner
    v2 = mul(bracket_v, bracket_v)

    p = mul(v2, winvhalf) + (2.0 * alpha) * mul(w, whalf)
    cp = hilbert_strip(drop_mean(p), d)
    cwhalf = hilbert_strip(drop_mean(whalf), d)
    num = mean(mul(wp, cp)) + mean(mul(one_cwp, p))
    den = mean(mul(wp, cwhalf)) + mean(mul(one_cwp, whalf))
    qhat = num / den
    return d, wp, wpp, one_cwp, whalf, p, cp, cwhalf, qhat


def q_hat(params: WaveParams, w: PeriodicFunction) -> float:
    """Scaled hydraulic head: the scalar that makes the finite-depth residual
    mean-free.  Continuously extends to b(0, w) for alpha <= 0."""
    if params.alpha <= 0.0:
        return bernoulli_b(0.0, w)
    return _finite_depth_pieces(params, w)[-1]


def residual_fd(params: WaveParams, w: PeriodicFunction) -> PeriodicFunction:
    """Finite-depth residual FD(alpha, beta, w) with constant vorticity.

    For alpha <= 0 this is, by continuous extension, exactly the deep-water
    residual at alpha = 0 (same code path, so the difference is literal zero).
    """
    if params.alpha <= 0.0:
        return residual_inf(replace(params, alpha=0.0, gamma=0.0, h=math.inf), w)
    d, wp, wpp, one_cwp, whalf, p, cp, cwhalf, qhat = _finite_depth_pieces(params, w)
    half = 0.5 / params.beta
    # A = p - qhat * whalf; C_d(A) assembled from the pieces already transformed
    a_fun = p - qhat * whalf
    ca_fun = cp - qhat * cwhalf
    return wpp - half * mul(wp, ca_fun) - half * mul(one_cwp, a_fun)


# -- physical parameter recovery ------------------------------------------------------


@dataclass(frozen=True)
class PhysicalScales:
    """Dimensional quantities recovered from a scaled parameter point."""

    k: float
    lam: float
    c: float
    m: float
    Q: float


def physical_params(params: WaveParams, w: PeriodicFunction | None = None) -> PhysicalScales:
    """Invert the scaling at alpha > 0: wavenumber k, mean-flow scale lambda
    (the wave speed c in deep water), mass flux m = h*lambda + h^2*gamma/2 and
    hydraulic head Q = lambda^2 * qhat (NaN when no profile is supplied)."""
    if params.alpha <= 0.0:
        raise ValueError("physical parameters need alpha > 0")
    k = wavenumber_k(params.alpha, params.beta, params.g, params.sigma)
    lam = math.sqrt(params.g / (k * params.alpha))
    m = params.h * lam + 0.5 * params.h ** 2 * params.gamma
    q = lam ** 2 * q_hat(params, w) if w is not None else math.nan
    return PhysicalScales(k=k, lam=lam, c=lam, m=m, Q=q)


def params_from_physical(k: float, lam: float | None = None, m: float | None = None,
                         h: float = math.inf, gamma: float = 0.0,
                         g: float = 1.0, sigma: float = 1.0) -> WaveParams:
    """Forward change of variables from (k, lambda) or (k, m) to (alpha, beta)."""
    if lam is None:
        if m is None:
            raise ValueError("need lambda or the mass flux m")
        if math.isinf(h):
            raise ValueError("mass flux is not finite in infinite depth; pass lambda")
        lam = m / h - 0.5 * gamma * h
    if not (k > 0.0 and lam > 0.0):
        raise ValueError("need k > 0 and lambda > 0")
    return WaveParams(alpha=g / (k * lam ** 2), beta=k * sigma / lam ** 2,
                      g=g, sigma=sigma, gamma=gamma, h=h)
