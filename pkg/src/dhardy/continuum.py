"""Continuum Gaussian solutions and the discrete-to-continuum experiment."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def schrodinger_gaussian(x, t, eps):
    """Free Schrödinger evolution of ``e^{-x^2/2eps}``:
    ``sqrt(eps/(eps+2it)) exp(-x^2/(2(eps+2it)))``, principal root."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    sigma = eps + 2j * t
    x = np.asarray(x, dtype=float)
    out = np.sqrt(eps / sigma) * np.exp(-x * x / (2.0 * sigma))
    return out if out.ndim else complex(out)


def heat_gaussian(x, t, eps):
    """Heat evolution of ``e^{-x^2/2eps}``: ``e^{-x^2/(4t+2eps)} / sqrt(2t/eps+1)``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    if t < 0:
        raise DomainError("t must be non-negative")
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * x / (4.0 * t + 2.0 * eps)) / math.sqrt(2.0 * t / eps + 1.0)
    return out if out.ndim else float(out)


SOLUTIONS = {"schrodinger": schrodinger_gaussian, "heat": heat_gaussian}


@dataclass(frozen=True)
class ComparisonConfig:
    """Mesh sizes and the regularity data the error bound is quoted against."""

    sobolev_s: float
    mu: float
    h_list: tuple
    t: float = 1.0

    def __post_init__(self):
        if not self.sobolev_s > 0.5:
            raise DomainError("sobolev_s must exceed 1/2")
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        hs = tuple(float(h) for h in self.h_list)
        if len(hs) < 3:
            raise DomainError("h_list needs at least three mesh sizes")
        if any(not h > 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
            raise DomainError("h_list must be positive and strictly decreasing")
        object.__setattr__(self, "h_list", hs)

    @property
    def bound_exponent(self):
        return (2.0 * self.sobolev_s - 1.0) / 8.0


@dataclass(frozen=True)
class RateReport:
    hs: tuple
    errors: tuple
    slope: float | None
    monotone: bool
    bound_exponent: float

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "error_linf", "bound_exponent_reference"])
        for h, e in zip(self.hs, self.errors):
            w.writerow([repr(h), repr(e), repr(self.bound_exponent)])
        return buf.getvalue()


def _fit_slope(hs, errors):
    if any(e <= 0 for e in errors):
        return None
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)


def mesh_error(h, eps, equation, t=1.0, amplitude=1.0, tail_tol=1e-12):
    """Max mesh error between the discrete flow of sampled Gaussian data and
    the continuum solution, over a window covering both."""
    from .evolution import EvolutionSpec, evolve_kernel
    from .lattice import sample_function

    w = int(math.ceil(math.sqrt(2.0 * eps * 40.0) / h))
    u0 = sample_function(lambda x: amplitude * np.exp(-x * x / (2.0 * eps)), h, w)
    out = evolve_kernel(u0, EvolutionSpec(equation, t, tail_tol=tail_tol))
    # the continuum solution's width at time t
    spread = math.sqrt(2.0 * (eps + 4.0 * t * t / eps) * 40.0) if equation == "schrodinger" else \
        math.sqrt((4.0 * t + 2.0 * eps) * 40.0)
    k = max(out.k_max, int(math.ceil(spread / h)))
    exact = amplitude * SOLUTIONS[equation](np.arange(-k, k + 1) * h, t, eps)
    return float(np.max(np.abs(out.on_window(-k, k) - exact)))


def convergence_experiment(cfg, eps=1.0, equation="schrodinger", amplitude=1.0, tail_tol=1e-12):
    """Mesh errors at ``cfg.t`` for Gaussian data ``amplitude * e^{-x^2/2eps}``.

    Reports the least-squares slope of ``log(error)`` against ``log(h)``
    (``None`` when some error is exactly zero) and whether errors decrease
    strictly as h shrinks.  A non-monotone sequence is reported, not raised.
    """
    if equation not in SOLUTIONS:
        raise DomainError(f"unknown equation {equation!r}")
    errors = tuple(mesh_error(h, eps, equation, cfg.t, amplitude, tail_tol) for h in cfg.h_list)
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    return RateReport(cfg.h_list, errors, _fit_slope(cfg.h_list, errors), monotone, cfg.bound_exponent)
