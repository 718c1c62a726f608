r"""Decay envelopes, the Hardy gate and the named example families.

The discrete Hardy statement for both flows reads: if a solution satisfies

.. math::
    |f_k(0)| \le c\,\frac{I_k(\alpha/h^2)}{I_0(\alpha/h^2)}, \qquad
    |f_k(1)| \le c\,\frac{I_k(\beta/h^2)}{I_0(\beta/h^2)}

with :math:`\alpha + \beta < 2`, it vanishes.  Nothing here proves that; the
gate checks the hypotheses on concrete data and flags any nonzero signal that
would contradict it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import log_ratio_orders
from .continuum import heat_gaussian
from .errors import DomainError, EvolutionMismatchError, NoEnvelopeError
from .evolution import EvolutionSpec, evolve_kernel
from .lattice import Envelope, LatticeSignal, gen_bessel_datum, norm, relative_linf_error, sample_function

EXAMPLES = ("schrodinger_a", "schrodinger_b", "sharp_schrodinger", "heat_sharp")
COVERED = "CoveredMustBeZero"
NOT_COVERED = "NotCovered"

# relative slack on the envelope comparison, absorbing last-bit differences
# between independently computed Bessel values (e.g. f_0 = I_0/I_0 = 1)
ENVELOPE_SLACK = 1e-12
NONZERO_RTOL = 1e-13


@dataclass(frozen=True)
class EnvelopeFit:
    """Result of :func:`envelope_fit`.

    ``alpha`` is 0 when the bound held all the way down to ``bracket_floor``.
    """

    alpha: float
    at_floor: bool
    bracket_floor: float


def _envelope_excess(log_abs, ks, log_c, alpha, h, slack):
    logs = log_ratio_orders(alpha / h**2, int(ks.max()))
    return float(np.max(log_abs - (log_c + logs[ks] + math.log1p(slack))))


def envelope_fit(signal, c, rtol=1e-6, floor=1e-9, ceiling=1e3, slack=ENVELOPE_SLACK):
    """Smallest alpha with ``|f_k| <= c I_k(alpha/h^2)/I_0(alpha/h^2)`` on the window.

    Bisects on ``log(alpha)`` until the bracket is ``rtol`` relative; the
    returned value is the feasible end of the bracket.  Comparisons are done
    on logarithms via the ratio recurrence, so no ``I_0`` is ever formed.

    Raises
    ------
    DomainError
        If the signal is zero or ``c <= 0``.
    NoEnvelopeError
        If the bound fails even at ``ceiling``.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    mags = np.abs(signal.values)
    nz = mags > 0
    if not nz.any():
        raise DomainError("cannot fit an envelope to the zero signal")
    log_abs = np.log(mags[nz])
    ks = np.abs(signal.ks[nz])
    log_c = math.log(c)
    h = signal.h

    def ok(a):
        return _envelope_excess(log_abs, ks, log_c, a, h, slack) <= 0.0

    if not ok(ceiling):
        raise NoEnvelopeError(f"bound fails for every alpha up to {ceiling:g} (c={c:g})")
    if ok(floor):
        return EnvelopeFit(0.0, True, floor)
    lo, hi = math.log(floor), math.log(ceiling)
    tol = math.log1p(rtol)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(math.exp(mid)):
            hi = mid
        else:
            lo = mid
    return EnvelopeFit(math.exp(hi), False, floor)


@dataclass(frozen=True)
class GateReport:
    alpha: float
    beta: float
    sum: float
    gate: str
    envelope_ok_t0: bool
    envelope_ok_t1: bool
    signal_nonzero: bool
    consistent: bool
    residual: float = field(default=0.0, compare=False)

    FIELDS = (
        "alpha", "beta", "sum", "gate",
        "envelope_ok_t0", "envelope_ok_t1", "signal_nonzero", "consistent",
    )

    def to_dict(self):
        return {name: getattr(self, name) for name in self.FIELDS}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _nonzero(*signals):
    top = max(norm(s, "linf") for s in signals)
    scale = max(norm(s, "l2") for s in signals)
    return top > 0.0 and top > NONZERO_RTOL * scale


def hardy_gate(f0, f1, alpha, beta, c=1.0, equation="schrodinger", t=1.0, tol=1e-8,
               tail_tol=1e-12, slack=ENVELOPE_SLACK):
    """Check the envelope hypotheses on a pair ``(f0, f1 = e^{tL} f0)``.

    Raises
    ------
    DomainError
        Mismatched mesh sizes or non-positive parameters.
    EvolutionMismatchError
        ``f1`` is not the time-``t`` evolution of ``f0`` to ``tol`` relative.
    """
    if not (alpha > 0 and beta > 0 and c > 0):
        raise DomainError("alpha, beta and c must be positive")
    if not math.isclose(f0.h, f1.h, rel_tol=1e-12):
        raise DomainError(f"mesh sizes differ: {f0.h} vs {f1.h}")
    evolved = evolve_kernel(f0, EvolutionSpec(equation, t, tail_tol=tail_tol))
    ref = max(norm(f1, "linf"), norm(evolved, "linf"))
    residual = relative_linf_error(evolved, f1) if ref > 0 else 0.0
    if ref > 0 and norm(f1, "linf") == 0.0:
        residual = 1.0
    if residual > tol:
        raise EvolutionMismatchError(residual, tol)
    ok0 = Envelope(alpha, c, f0.h).holds(f0, slack)
    ok1 = Envelope(beta, c, f1.h).holds(f1, slack)
    total = alpha + beta
    gate = COVERED if total < 2.0 else NOT_COVERED
    nonzero = _nonzero(f0, f1)
    consistent = not (gate == COVERED and ok0 and ok1 and nonzero)
    return GateReport(alpha, beta, total, gate, ok0, ok1, nonzero, consistent, residual)


def _heat_window(h, eps, t=1.0):
    # Gaussian below e^{-40} outside the window
    return int(math.ceil(math.sqrt((4.0 * t + 2.0 * eps) * 40.0) / h))


def make_example(name, h, epsilon=1.0):
    """Initial datum and closed-form time-1 signal of a named example.

    ``schrodinger_a``
        ``I_k(i/2h^2)/I_0(5/2h^2)``, evolving to ``e^{-2i/h^2} I_k(5i/2h^2)/I_0(5/2h^2)``.
    ``schrodinger_b``
        ``(-1)^k I_k(1/h^2)/I_0(1/h^2)``, evolving to
        ``e^{-2i/h^2} I_k((2i-1)/h^2)/I_0(1/h^2)``.
    ``sharp_schrodinger``
        ``I_k(-i/h^2)/I_0(1/h^2)``, evolving to ``e^{-2i/h^2} I_k(i/h^2)/I_0(1/h^2)``.
    ``heat_sharp``
        Mesh samples of ``e^{-x^2/2 eps}`` and of the continuum heat solution
        at t = 1 (a reference, not the discrete evolution).

    At small h the Bessel quotients can underflow to exact zeros in double
    precision (``schrodinger_a`` at h = 1/20 is below 1e-400 everywhere).
    """
    h = float(h)
    if not h > 0:
        raise DomainError("h must be positive")
    phase = np.exp(-2j / h**2)
    if name == "schrodinger_a":
        f0 = gen_bessel_datum(0.5j, 2.5, h)
        g = gen_bessel_datum(2.5j, 2.5, h)
    elif name == "schrodinger_b":
        f0 = gen_bessel_datum(1.0, 1.0, h, sign_alternate=True)
        g = gen_bessel_datum(complex(-1.0, 2.0), 1.0, h)
    elif name == "sharp_schrodinger":
        f0 = gen_bessel_datum(-1j, 1.0, h)
        g = gen_bessel_datum(1j, 1.0, h)
    elif name == "heat_sharp":
        if not epsilon > 0:
            raise DomainError("epsilon must be positive")
        w = _heat_window(h, epsilon)
        f0 = sample_function(lambda x: np.exp(-x * x / (2.0 * epsilon)), h, w)
        f1 = sample_function(lambda x: heat_gaussian(x, 1.0, epsilon), h, w)
        return f0, f1
    else:
        raise DomainError(f"unknown example {name!r}; expected one of {EXAMPLES}")
    return f0, g.with_values(g.values * phase)


def example_equation(name):
    return "heat" if name == "heat_sharp" else "schrodinger"


def small_datum_persistence(v, mu_bound, t, tail_tol=1e-12):
    """Heat flow never raises the sup norm: checks ``||e^{t L} v||_inf <= mu_bound``."""
    if not mu_bound > 0 or not t > 0:
        raise DomainError("mu_bound and t must be positive")
    if norm(v, "linf") > mu_bound * (1.0 + 1e-12):
        raise DomainError("datum exceeds mu_bound")
    out = evolve_kernel(v, EvolutionSpec("heat", t, tail_tol=tail_tol))
    return norm(out, "linf") <= mu_bound * (1.0 + 1e-10)


def figure1_rows(h=1.0 / 20, k_max=50):
    """``(k, g_k(0), parity)`` for ``g_k(0) = (-1)^k I_k(1/h^2)/I_0(1/h^2)``."""
    g0 = gen_bessel_datum(1.0, 1.0, h, sign_alternate=True)
    return [(k, g0.at(k).real, "even" if k % 2 == 0 else "odd") for k in range(-k_max, k_max + 1)]


def figure1_deviation(h=1.0 / 20, k_max=50):
    """Max over ``|k| <= k_max`` of ``|g_k(0) - (-1)^k e^{-(kh)^2/2}|``."""
    rows = figure1_rows(h, k_max)
    return max(abs(v - (-1) ** (k % 2) * math.exp(-((k * h) ** 2) / 2.0)) for k, v, _ in rows)


FIG2_C = 5.0 ** -0.25


def figure2_rows(h=1.0 / 20, k_lo=200, k_hi=250, betas=(5.0, 4.9), c=FIG2_C):
    """``(k, |g_k(1)|, bound at betas[0], bound at betas[1])`` on ``[k_lo, k_hi]``.

    ``g(1)`` is the discrete Schrödinger evolution of the alternating datum.
    """
    g0 = gen_bessel_datum(1.0, 1.0, h, sign_alternate=True)
    g1 = evolve_kernel(g0, EvolutionSpec("schrodinger", 1.0))
    ks = np.arange(k_lo, k_hi + 1)
    bounds = [c * np.exp(log_ratio_orders(b / h**2, k_hi)[ks]) for b in betas]
    return [(int(k), abs(g1.at(k)), float(bounds[0][i]), float(bounds[1][i])) for i, k in enumerate(ks)]


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()
