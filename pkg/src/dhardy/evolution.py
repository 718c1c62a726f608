r"""Discrete Schrödinger and heat semigroups on hZ.

Both flows act on a lattice signal by convolution with a Bessel kernel,

.. math::
    (e^{t\Delta_d} f)_k = e^{-2t/h^2}\sum_m f_m I_{k-m}(2t/h^2), \qquad
    (e^{it\Delta_d} f)_k = e^{-2it/h^2}\sum_m f_m I_{k-m}(2it/h^2),

or, equivalently, by multiplication of the periodic function
:math:`\sum_k f_k e^{ihk\xi}` with the symbol
:math:`e^{2t(\cos\xi h-1)/h^2}` (heat) or :math:`e^{2it(\cos\xi h-1)/h^2}`.
:func:`evolve_kernel` and :func:`evolve_spectral` implement the two routes
independently so each can check the other.

Both routes are serial and deterministic: repeated runs are bit-for-bit
identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bessel import kapteyn_logs, log_tails, majorant_logs, scaled_orders, to_complex_array
from .errors import DomainError, InsufficientModesError, TailCertificateError
from .lattice import LatticeSignal, norm

EQUATIONS = ("schrodinger", "heat")
METHODS = ("kernel", "spectral")


@dataclass(frozen=True)
class EvolutionSpec:
    """What to evolve by: equation, time and numerical method.

    ``modes`` only matters for the spectral method; ``None`` picks the
    smallest admissible power of two.
    """

    equation: str
    t: float
    method: str = "kernel"
    tail_tol: float = 1e-12
    modes: int | None = None

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise DomainError(f"unknown equation {self.equation!r}")
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        t = float(self.t)
        if not math.isfinite(t):
            raise DomainError("time must be finite")
        if self.equation == "heat" and t < 0:
            raise DomainError("the heat semigroup is only defined for t >= 0")
        if not 0.0 < self.tail_tol < 1.0:
            raise DomainError("tail_tol must lie in (0, 1)")
        if self.modes is not None:
            m = int(self.modes)
            if m < 2 or m & (m - 1):
                raise DomainError(f"modes must be a power of two >= 2, got {self.modes}")
        object.__setattr__(self, "t", t)


def symbol(xi, t, h, equation):
    """Fourier multiplier of the flow at frequency ``xi``; works on arrays."""
    xi = np.asarray(xi, dtype=float)
    # cos(a) - 1 = -2 sin^2(a/2), accurate near xi = 0
    expo = -4.0 * t * np.sin(xi * h / 2.0) ** 2 / h**2
    if equation == "schrodinger":
        out = np.exp(1j * expo)
    elif equation == "heat":
        out = np.exp(expo)
    else:
        raise DomainError(f"unknown equation {equation!r}")
    return out if out.ndim else out[()]


@lru_cache(maxsize=64)
def _kernel(equation, t, h, tail_tol):
    """Half kernel K_0..K_N and the certified spread N.

    N is the smallest order with ``2 * sum_{n>N} |K_n| < tail_tol``; the
    neglected part past the last computed order is bounded by ``I_n(x)``
    (heat) or Kapteyn's inequality for ``|J_n(x)|`` (Schrödinger), so
    Young's inequality turns it into an l2 certificate.
    """
    x = 2.0 * abs(t) / h**2
    # heat: e^{-x} I_n(x) is exactly the scaled value; Schrodinger: Re z = 0
    if equation == "heat":
        z = complex(x)
        nmax = int(2.0 * x + 12.0 * math.sqrt(x) + 40)
    else:
        z = complex(0.0, 2.0 * t / h**2)
        nmax = int(x + 12.0 * x ** (1.0 / 3.0) + 40)
    for _ in range(8):
        lm, ph = scaled_orders(nmax, z)
        # bound for the orders past nmax, in the kernel's scaling
        if equation == "heat":
            tail_major = majorant_logs(x, nmax + 2) - x
        else:
            tail_major = np.full(nmax + 3, -np.inf)
            tail_major[nmax + 1 :] = kapteyn_logs(x, [nmax + 1, nmax + 2])
        beyond = log_tails(tail_major)[nmax]
        computed = log_tails(lm)
        computed[-1] = -np.inf
        tails = np.logaddexp(computed, beyond) + math.log(2.0)
        ok = np.flatnonzero(tails < math.log(tail_tol))
        if ok.size:
            n_spread = int(ok[0])
            break
        nmax = int(1.5 * nmax)
    else:
        raise TailCertificateError(f"could not certify the kernel tail for t={t}, h={h}")
    half = to_complex_array(lm[: n_spread + 1], ph[: n_spread + 1])
    if equation == "schrodinger":
        # e^{-2it/h^2} has modulus one: applied as a pure phase
        half = half * np.exp(-2j * t / h**2)
    else:
        half = half.real.astype(complex)
    half.setflags(write=False)
    return n_spread, half


def kernel(equation, t, h, tail_tol=1e-12):
    """Full kernel ``K_{-N..N}`` and its spread N."""
    n_spread, half = _kernel(equation, float(t), float(h), float(tail_tol))
    return n_spread, np.concatenate([half[:0:-1], half])


def kernel_spread(equation, t, h, tail_tol=1e-12):
    return _kernel(equation, float(t), float(h), float(tail_tol))[0]


def evolve_kernel(signal, spec):
    """Evolve by direct convolution with the Bessel kernel.

    The output window grows by the certified kernel spread on each side; the
    l2 truncation error is below ``spec.tail_tol * ||signal||_2``.
    """
    if spec.method != "kernel":
        raise DomainError("evolve_kernel needs spec.method == 'kernel'")
    if spec.t == 0.0:
        return signal
    n_spread, full = kernel(spec.equation, spec.t, signal.h, spec.tail_tol)
    out = np.convolve(signal.values, full)
    return LatticeSignal(signal.h, signal.k_min - n_spread, out)


def min_modes(length, n_spread):
    need = 2 * (length + n_spread)
    return 1 << max(1, (need - 1).bit_length())


def evolve_spectral(signal, spec):
    """Evolve by multiplying the periodic representation by the symbol.

    The zero-padded signal is transformed on ``spec.modes`` points, mode j is
    multiplied by the symbol at ``2*pi*j/(modes*h)`` wrapped into
    ``[-pi/h, pi/h)``, and the inverse transform is re-windowed.  Enough
    padding keeps circular wrap-around below the same tail tolerance as the
    kernel route.
    """
    if spec.method != "spectral":
        raise DomainError("evolve_spectral needs spec.method == 'spectral'")
    n_spread = kernel_spread(spec.equation, spec.t, signal.h, spec.tail_tol)
    length = len(signal)
    need = min_modes(length, n_spread)
    modes = need if spec.modes is None else int(spec.modes)
    if modes < need:
        raise InsufficientModesError(modes, need)
    buf = np.zeros(modes, dtype=complex)
    buf[n_spread : n_spread + length] = signal.values
    xi = 2.0 * np.pi * np.fft.fftfreq(modes) / signal.h
    mult = symbol(xi, spec.t, signal.h, spec.equation)
    out = np.fft.ifft(np.fft.fft(buf) * mult)[: length + 2 * n_spread]
    return LatticeSignal(signal.h, signal.k_min - n_spread, out)


def evolve(signal, spec):
    if spec.method == "kernel":
        return evolve_kernel(signal, spec)
    return evolve_spectral(signal, spec)


def truncation_bound(signal, spec):
    """Certified l2 bound on what the finite output window leaves out."""
    return spec.tail_tol * norm(signal, "l2")
