r"""Entire extension of the periodic representation and the line hypotheses.

A lattice signal ``f_k`` on hZ is read as the Fourier coefficients of the
2pi/h-periodic function

.. math::
    f_h(z) = \frac{h}{\sqrt{2\pi}} \sum_k f_k e^{ihkz},

which is entire when the coefficients decay like a Bessel envelope.  This
module evaluates that extension off the real axis, checks the four vertical
line bounds that go with a Bessel coefficient bound, and carries the small
closed-form families used as nonzero examples.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bessel import ComplexScaled, bessel_i_scaled, log_ratio_orders, log_tails, scaled_orders
from .errors import DomainError, NoEnvelopeError, TailCertificateError
from .lattice import Envelope, LatticeSignal, certified_window

_LOG_NORM = -0.5 * math.log(2.0 * math.pi)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class LineBoundSpec:
    """Parameters of the line hypotheses: ``u = r e^{i theta}``, shift ``b``,
    opening ``delta`` and coefficient-decay parameter ``s``."""

    r: float
    theta: float
    b: float
    delta: float
    s: float

    def __post_init__(self):
        if not self.r > 0 or not self.s > 0:
            raise DomainError("r and s must be positive")
        if not 0.0 <= self.b < 2.0 * math.pi:
            raise DomainError("b must lie in [0, 2pi)")
        if not 0.0 < self.delta < math.pi / 2:
            raise DomainError("delta must lie strictly inside (0, pi/2)")

    @property
    def u(self):
        return cmath.rect(self.r, self.theta)


def cor41_spec(r, delta, s=None):
    """Schrödinger specialisation: ``b = 0``, ``theta = pi/2``."""
    return LineBoundSpec(r, math.pi / 2, 0.0, delta, 1.0 / r if s is None else s)


def cor42_spec(r, delta, s=None):
    """Heat specialisation: ``b = 0``, ``theta = 0``."""
    return LineBoundSpec(r, 0.0, 0.0, delta, 1.0 / r if s is None else s)


PRESETS = {"cor41": cor41_spec, "cor42": cor42_spec}


class Case(str, Enum):
    INCONCLUSIVE = "Inconclusive"
    EXPLICIT_FORM = "ExplicitForm"
    ZERO = "Zero"


@dataclass(frozen=True)
class Verdict:
    case: Case
    product: float


def trichotomy(r, s, tol=1e-9):
    """Which of the three cases ``r*s`` falls in, with an equality band ``tol``."""
    if not r > 0 or not s > 0:
        raise DomainError("r and s must be positive")
    if not 0.0 < tol < 0.1:
        raise DomainError("tol must lie in (0, 0.1)")
    product = r * s
    if abs(product - 1.0) <= tol:
        case = Case.EXPLICIT_FORM
    elif product < 1.0:
        case = Case.INCONCLUSIVE
    else:
        case = Case.ZERO
    return Verdict(case, product)


def heat_parameter_flow(r, s, t):
    """Line/coefficient parameters after heat evolution for time t (h = 1)."""
    if not r > 0 or not s > 0:
        raise DomainError("r and s must be positive")
    if not t >= 0:
        raise DomainError("t must be non-negative")
    return r + 2.0 * t, s / (1.0 + 2.0 * t * s)


def appendix_onset_threshold(a, delta):
    """Smallest heat time after which a fixed ``delta`` satisfies the line
    hypotheses for coefficients bounded by ``I_k(a)``.

    Equal to ``a (cos(pi/2+delta) - 1) / cos(pi/2+delta)``, evaluated as
    ``a (1 + 1/sin(delta))`` to avoid the rounding of ``cos`` near pi/2.
    Returns ``inf`` when ``sin(delta)`` underflows.
    """
    if not a > 0:
        raise DomainError("a must be positive")
    if not 0.0 < delta < math.pi / 2:
        raise DomainError("delta must lie strictly inside (0, pi/2)")
    sd = math.sin(delta)
    if sd == 0.0:
        return math.inf
    with np.errstate(over="ignore"):
        return a * (1.0 + 1.0 / sd)


@dataclass(frozen=True)
class ExtensionCertificate:
    """Log-domain bookkeeping of one evaluation of the extension."""

    log_tail: float
    log_abs_sum: float

    def rounding_bound(self, coef_rtol=1e-13):
        """Log of the error bound from coefficient inaccuracy (cancellation)."""
        return self.log_abs_sum + math.log(coef_rtol + 4 * _EPS)


# far below the gate's floor: a delta-like signal should get a negligible tail
_FIT_FLOOR = 1e-60


def _fit_envelope(signal):
    """Some Bessel majorant of the data, for tail certificates only.

    Starts from ``c = max|f_k|`` and enlarges c when the sequence peaks away
    from k = 0 (oscillating coefficients), where no envelope with that c fits.
    """
    from .hardy import envelope_fit

    top = float(np.max(np.abs(signal.values)))
    for factor in (1.0, 1e2, 1e4, 1e6, 1e8):
        try:
            fit = envelope_fit(signal, top * factor, floor=_FIT_FLOOR)
        except NoEnvelopeError:
            continue
        return Envelope(fit.alpha if fit.alpha > 0 else fit.bracket_floor, top * factor, signal.h)
    raise TailCertificateError("no Bessel envelope fits the signal")


_MAX_TAIL_ORDERS = 1e6


def _envelope_tail_log(envelope, k_lo, k_hi, y):
    """Log of ``sum_{k outside [k_lo,k_hi]} c R_|k| e^{-hky}`` with ``R`` the
    envelope ratio, plus a geometric bound beyond the computed orders."""
    h = envelope.h
    x = envelope.alpha / h**2
    reach = max(abs(k_lo), abs(k_hi)) + 1
    spread = x * math.cosh(h * y)
    if spread > _MAX_TAIL_ORDERS:
        # whole-series bound: sum_k I_k(x) e^{-hky} = e^{x cosh(hy)}
        log_i0 = bessel_i_scaled(0, x).log_mag + x
        return math.log(envelope.c) + spread - log_i0
    nmax = int(reach + 1.2 * spread + 12.0 * math.sqrt(x) + 60)
    logs = log_ratio_orders(x, nmax)
    n = np.arange(nmax + 1)
    out = -np.inf
    for sign in (1, -1):
        terms = logs - sign * h * n * y
        ks = sign * n
        outside = (ks < k_lo) | (ks > k_hi)
        if sign < 0:
            outside[0] = False  # k = 0 is counted once, on the positive side
        if outside.any():
            out = np.logaddexp(out, np.logaddexp.reduce(terms[outside]))
        out = np.logaddexp(out, log_tails(terms)[-1])
    return math.log(envelope.c) + float(out)


def _extend(signal, z, envelope):
    z = complex(z)
    h = signal.h
    period = 2.0 * math.pi / h
    x = math.remainder(z.real, period)
    y = z.imag
    ks = signal.ks
    with np.errstate(divide="ignore"):
        logm = np.log(np.abs(signal.values)) - h * ks * y
    phase = np.angle(signal.values) + h * ks * x
    top = float(np.max(logm))
    if top == -math.inf:
        value = ComplexScaled(-math.inf)
        log_abs = -math.inf
    else:
        w = np.exp(logm - top)
        total = complex(np.sum(w * np.exp(1j * phase)))
        log_abs = top + math.log(float(np.sum(w))) + math.log(h) + _LOG_NORM
        value = ComplexScaled.from_complex(total).shifted(top + math.log(h) + _LOG_NORM)
    if envelope is None:
        log_tail = -math.inf
    else:
        log_tail = _envelope_tail_log(envelope, signal.k_min, signal.k_max, y)
        log_tail += math.log(h) + _LOG_NORM
    return value, ExtensionCertificate(log_tail, log_abs)


def extend_evaluate(signal, z, envelope=None, rtol=1e-10, fit=True, certificate=False):
    r"""Evaluate :math:`\frac{h}{\sqrt{2\pi}}\sum_k f_k e^{ihkz}` at complex ``z``.

    The stored window is summed exactly in log-shifted form.  The neglected
    tail of the infinite sequence the window stands for is bounded through a
    Bessel :class:`~dhardy.lattice.Envelope`, either the one passed in or one
    fitted to the data with ``c = max|f_k|``; the tail must be below ``rtol``
    times the modulus of the partial sum.

    Raises
    ------
    TailCertificateError
        When no envelope fits or the certified tail is too large.
    """
    if envelope is None and fit:
        envelope = _fit_envelope(signal)
    value, cert = _extend(signal, z, envelope)
    if envelope is not None and cert.log_tail > math.log(rtol) + value.log_mag:
        raise TailCertificateError(
            f"tail bound exp({cert.log_tail:.4g}) exceeds {rtol:g} x |partial sum| "
            f"= exp({value.log_mag:.4g}) at z={z}"
        )
    if certificate:
        return value, cert
    return value


def signal_evaluator(signal, envelope=None, rtol=1e-10, max_cancellation=1e-8, coef_rtol=1e-13):
    """Callable ``z -> ComplexScaled`` backed by :func:`extend_evaluate`.

    Also refuses points where cancellation in the sum leaves less than
    ``max_cancellation`` relative accuracy (given coefficients accurate to
    ``coef_rtol``); deep in the decay directions the series cannot resolve
    the function in double precision.
    """
    if envelope is None:
        envelope = _fit_envelope(signal)

    def evaluate(z):
        value, cert = extend_evaluate(signal, z, envelope, rtol=rtol, certificate=True)
        if cert.rounding_bound(coef_rtol) > math.log(max_cancellation) + value.log_mag:
            raise TailCertificateError(
                f"cancellation at z={z}: series magnitude exp({cert.log_abs_sum:.4g}) "
                f"vs value exp({value.log_mag:.4g})"
            )
        return value

    return evaluate


def explicit_form(u, h, b=0.0, const=1.0):
    """Evaluator of ``const * exp((u/h^2) cos(zh - b))`` in log form."""
    u = complex(u)
    lc = ComplexScaled.from_complex(const)

    def evaluate(z):
        w = u * cmath.cos(complex(z) * h - b) / h**2
        return ComplexScaled(w.real, w.imag) * lc

    return evaluate


def explicit_form_coefficients(u, h, b=0.0, window=None):
    """Coefficients of :func:`explicit_form` with ``const = h/sqrt(2 pi)``:
    ``I_k(u/h^2) e^{-ikb}``, unscaled (so keep ``|Re u|/h^2`` moderate)."""
    z = complex(u) / h**2
    if window is None:
        window = max(certified_window(z, 1e-16) or 1, 1)
    lm, ph = scaled_orders(window, z)
    ks = np.arange(-window, window + 1)
    idx = np.abs(ks)
    with np.errstate(under="ignore", over="ignore"):
        vals = np.exp(lm[idx] + z.real) * np.exp(1j * (ph[idx] - ks * b))
    return LatticeSignal(h, -window, vals)


def appendix_example2_coefficients(u, a, h, b=0.0, window=None):
    """Coefficients ``(a e^{-ib})^k I_k(u/(a h^2))`` with ``|u| = 1`` and ``a > 1``."""
    u = complex(u)
    if not a > 1:
        raise DomainError("a must exceed 1")
    z = u / (a * h**2)
    if window is None:
        # a^k I_k(x/a) <= I_k(x), so the I_k(|u|/h^2) tail certifies the window
        window = max(certified_window(abs(u) / h**2, 1e-17) or 1, 1)
        window = int(1.5 * window) + 5
    lm, ph = scaled_orders(window, z)
    ks = np.arange(-window, window + 1)
    idx = np.abs(ks)
    with np.errstate(under="ignore", over="ignore"):
        vals = np.exp(lm[idx] + z.real + ks * math.log(a)) * np.exp(1j * (ph[idx] - ks * b))
    return LatticeSignal(h, -window, vals)


def appendix_example2_closed(u, a, h, b=0.0, denom=None):
    r"""Closed form :math:`\frac{h}{\sqrt{2\pi}}\exp\big(\frac{u}{2h^2}(e^{i(zh-b)} + e^{-i(zh-b)}/a^2)\big)`.

    ``denom`` replaces ``a**2`` in the second exponential; it exists so the
    alternative reading of that constant can be tested and rejected.
    """
    u = complex(u)
    d = a * a if denom is None else denom
    log_pref = math.log(h) + _LOG_NORM

    def evaluate(z):
        w = complex(z) * h - b
        e = u / (2.0 * h**2) * (cmath.exp(1j * w) + cmath.exp(-1j * w) / d)
        return ComplexScaled(e.real + log_pref, e.imag)

    return evaluate


# (line id, sign of x offset pieces, sign of y) for the four hypothesis lines
def _lines(spec, h):
    th, b, dl = spec.theta, spec.b, spec.delta
    ur, ui = spec.u.real, spec.u.imag
    a_minus = th - math.pi / 2 - dl
    a_plus = th + math.pi / 2 + dl
    return [
        ("L1", (b - th + math.pi / 2 + dl) / h, -1, ur * math.cos(a_minus), -ui * math.sin(a_minus)),
        ("L2", (b - th - math.pi / 2 - dl) / h, -1, ur * math.cos(a_plus), -ui * math.sin(a_plus)),
        ("L3", (b + th + math.pi / 2 + dl) / h, +1, ur * math.cos(a_plus), ui * math.sin(a_plus)),
        ("L4", (b + th - math.pi / 2 - dl) / h, +1, ur * math.cos(a_minus), ui * math.sin(a_minus)),
    ]


@dataclass
class MarginReport:
    """Per-sample ``log|f_h| - log(c * bound)`` on the four lines.

    A positive margin means the hypothesis fails at that sample.
    """

    rows: list = field(default_factory=list)
    skipped: int = 0

    @property
    def max_margin(self):
        return max(r[4] for r in self.rows) if self.rows else -math.inf

    def by_line(self, line_id):
        return [r for r in self.rows if r[0] == line_id]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["line_id", "y", "log_lhs", "log_rhs", "margin"])
        for line_id, y, lhs, rhs, m in self.rows:
            w.writerow([line_id, repr(float(y)), repr(float(lhs)), repr(float(rhs)), repr(float(m))])
        return buf.getvalue()


def default_y_grid(h, points=41, yh_max=6.0):
    return np.linspace(0.0, yh_max, points) / h


def check_theorem21_lines(evaluator, spec, h, y_grid=None, c=1.0, skip_uncertified=False):
    """Compare an entire function with the four line bounds.

    ``L1``, ``L2`` are taken on ``y <= 0`` and ``L3``, ``L4`` on ``y >= 0``;
    ``y_grid`` gives the magnitudes ``|y|`` (default: 41 points with
    ``|y| h`` in [0, 6]).  The constant ``c`` is an explicit input.  With
    ``skip_uncertified`` the samples where a series evaluator cannot certify
    its value are left out and counted in ``report.skipped``.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    ys = default_y_grid(h) if y_grid is None else np.abs(np.asarray(y_grid, dtype=float))
    log_c = math.log(c)
    report = MarginReport()
    for line_id, x0, ysign, a_cosh, a_sinh in _lines(spec, h):
        for ay in ys:
            y = ysign * ay
            try:
                lhs = evaluator(complex(x0, y)).log_mag
            except TailCertificateError:
                if not skip_uncertified:
                    raise
                report.skipped += 1
                continue
            rhs = log_c + (a_cosh * math.cosh(y * h) + a_sinh * math.sinh(y * h)) / h**2
            report.rows.append((line_id, float(y), lhs, rhs, lhs - rhs))
    return report
