"""Finitely windowed complex sequences on the mesh hZ."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bessel import log_ratio_orders, log_tails, majorant_logs, scaled_orders, to_complex_array
from .errors import DomainError, TailTooLargeError


@dataclass(frozen=True, eq=False)
class LatticeSignal:
    """Values ``f_k`` for ``k_min <= k < k_min + len(values)``; zero elsewhere."""

    h: float
    k_min: int
    values: np.ndarray

    def __post_init__(self):
        h = float(self.h)
        if not (h > 0 and math.isfinite(h)):
            raise DomainError(f"mesh size must be positive, got {self.h}")
        values = np.array(self.values, dtype=complex).ravel()
        if values.size == 0:
            raise DomainError("a lattice signal needs at least one stored value")
        if not np.all(np.isfinite(values)):
            raise DomainError("lattice values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k_min", int(self.k_min))
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def k_max(self):
        return self.k_min + self.values.size - 1

    @property
    def ks(self):
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def positions(self):
        return self.ks * self.h

    def at(self, k):
        """Entry ``f_k`` (zero outside the window)."""
        i = int(k) - self.k_min
        if 0 <= i < self.values.size:
            return complex(self.values[i])
        return 0j

    def on_window(self, k_min, k_max):
        """Values re-windowed onto ``[k_min, k_max]``, zero-filled or cropped."""
        out = np.zeros(k_max - k_min + 1, dtype=complex)
        lo = max(k_min, self.k_min)
        hi = min(k_max, self.k_max)
        if lo <= hi:
            out[lo - k_min : hi - k_min + 1] = self.values[lo - self.k_min : hi - self.k_min + 1]
        return out

    def with_values(self, values, k_min=None):
        return LatticeSignal(self.h, self.k_min if k_min is None else k_min, values)


def zero_signal(h, window=0):
    return LatticeSignal(h, -window, np.zeros(2 * window + 1))


def delta(h, value=1.0, k=0):
    return LatticeSignal(h, k, [value])


def norm(signal, kind="l2"):
    """l1, l2 or linf norm over the stored window (exact: outside is zero)."""
    a = np.abs(signal.values)
    if kind == "l2":
        top = a.max()
        if top == 0.0:
            return 0.0
        # rescaled so squares of tiny entries (e.g. 1e-174) do not underflow
        return float(top * np.sqrt(np.sum((a / top) ** 2)))
    if kind == "linf":
        return float(a.max())
    if kind == "l1":
        return float(a.sum())
    raise DomainError(f"unknown norm kind {kind!r}")


def union_window(*signals):
    return min(s.k_min for s in signals), max(s.k_max for s in signals)


def max_abs_difference(a, b):
    lo, hi = union_window(a, b)
    return float(np.max(np.abs(a.on_window(lo, hi) - b.on_window(lo, hi))))


def relative_linf_error(got, expected):
    """``max|got - expected| / max|expected|`` on the union of both windows."""
    scale = norm(expected, "linf")
    diff = max_abs_difference(got, expected)
    if scale == 0.0:
        return diff
    return diff / scale


@dataclass(frozen=True)
class Envelope:
    """The bound ``|f_k| <= c * I_k(alpha/h^2) / I_0(alpha/h^2)`` for all k."""

    alpha: float
    c: float
    h: float

    def __post_init__(self):
        for name in ("alpha", "c", "h"):
            if not getattr(self, name) > 0:
                raise DomainError(f"envelope {name} must be positive")

    def log_bound(self, ks):
        ks = np.abs(np.asarray(ks, dtype=int))
        logs = log_ratio_orders(self.alpha / self.h**2, int(ks.max()))
        return math.log(self.c) + logs[ks]

    def holds(self, signal, rtol=0.0):
        """True when every stored entry respects the bound (compared in logs)."""
        with np.errstate(divide="ignore"):
            lhs = np.log(np.abs(signal.values))
        return bool(np.all(lhs <= self.log_bound(signal.ks) + math.log1p(rtol)))


def certified_window(z, rel_tol, min_window=1):
    """Smallest W whose discarded tail of ``I_k(z)``, ``|k| > W``, has l1 mass
    below ``rel_tol`` times the l1 mass kept.

    The tail is bounded through ``|I_k(z)| <= I_k(|z|)`` so the certificate is
    rigorous even when ``z`` is nearly imaginary and ``I_k(z)`` oscillates.
    Returns ``None`` if no window up to the search cap qualifies.
    """
    z = complex(z)
    x = abs(z)
    if x == 0.0:
        return max(int(min_window), 0)
    nmax = int(max(2 * min_window, 1.5 * x + 12.0 * math.sqrt(x) + 60))
    for _ in range(6):
        lm, _ = scaled_orders(nmax, z)
        kept = lm + z.real
        head = np.logaddexp.accumulate(np.concatenate([[kept[0]], kept[1:] + math.log(2.0)]))
        tails = log_tails(majorant_logs(x, nmax)) + math.log(2.0)
        ok = tails < math.log(rel_tol) + head
        ok[: max(int(min_window), 0)] = False
        idx = np.flatnonzero(ok)
        if idx.size:
            return int(idx[0])
        nmax *= 2
    return None


def gen_bessel_datum(u, d, h, window=None, sign_alternate=False, rel_tail=1e-14):
    r"""Signal ``(+-1)^k I_k(u/h^2) / I_0(d/h^2)`` for ``|k| <= window``.

    Parameters
    ----------
    u : complex
        Numerator argument before division by ``h**2``.
    d : float
        Positive denominator argument before division by ``h**2``.
    h : float
        Mesh size.
    window : int, optional
        Half-width W.  Defaults to the smallest W whose discarded tail has
        relative l1 mass below ``rel_tail`` (certified through
        ``|I_k(z)| <= I_k(|z|)``).
    sign_alternate : bool
        Multiply entry k by ``(-1)^k``.

    Raises
    ------
    TailTooLargeError
        If an explicit ``window`` is too small; carries the minimal W.
    """
    u = complex(u)
    d = float(d)
    h = float(h)
    if not d > 0:
        raise DomainError("denominator argument must be positive")
    if not h > 0:
        raise DomainError("mesh size must be positive")
    need = certified_window(u / h**2, rel_tail)
    if need is None:
        raise DomainError(f"cannot certify a Bessel tail for u/h^2 = {u / h**2}")
    if window is None:
        window = max(need, 1)
    elif window < 1:
        raise DomainError("window must be at least 1")
    elif window < need:
        raise TailTooLargeError(
            f"window {window} leaves a Bessel tail above {rel_tail:g}", need
        )
    log_mag, phase = scaled_orders(window, u / h**2)
    den_log, _ = scaled_orders(0, d / h**2)
    # I_k(u/h^2)/I_0(d/h^2) = scaled_k e^{Re u/h^2} / (scaled_0 e^{d/h^2})
    shift = (u.real - d) / h**2 - den_log[0]
    half = to_complex_array(log_mag, phase, shift)
    if sign_alternate:
        half = half * np.where(np.arange(window + 1) % 2, -1.0, 1.0)
    values = np.concatenate([half[:0:-1], half])
    return LatticeSignal(h, -window, values)


def sample_function(f, h, window):
    """``values[k] = f(k h)`` for ``|k| <= window``; ``f`` is called on an array."""
    window = int(window)
    x = np.arange(-window, window + 1) * float(h)
    vals = np.asarray(f(x), dtype=complex)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape)
    return LatticeSignal(h, -window, vals)


def to_csv(signal, path=None):
    """Write ``k,re,im`` rows after a ``# h=... k_min=...`` comment line."""
    buf = io.StringIO()
    buf.write(f"# h={signal.h!r} k_min={signal.k_min}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "re", "im"])
    for k, v in zip(signal.ks, signal.values):
        w.writerow([int(k), repr(float(v.real)), repr(float(v.imag))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def from_csv(source):
    """Read a signal written by :func:`to_csv` (path or text)."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DomainError("signal CSV must start with a '# h=... k_min=...' line")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    try:
        h = float(meta["h"])
        k_min = int(meta["k_min"])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"malformed signal header: {lines[0]!r}") from exc
    rows = list(csv.DictReader(lines[1:]))
    if not rows:
        raise DomainError("signal CSV has no rows")
    ks = [int(r["k"]) for r in rows]
    if ks != list(range(k_min, k_min + len(ks))):
        raise DomainError("signal CSV rows must be consecutive from k_min")
    values = [complex(float(r["re"]), float(r["im"])) for r in rows]
    return LatticeSignal(h, k_min, values)
