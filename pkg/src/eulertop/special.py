"""Elliptic integrals, the (1/2, 1/2, 1) hypergeometric basis, and analytic
continuation of solution frames.

Everything here concerns the hypergeometric equation

    z (1 - z) f'' + (1 - 2 z) f' - f / 4 = 0,

whose solution space is spanned near z = 0 by F(z) = (2/pi) K(z) and the
logarithmic companion F(z) log z + Fstar(z).  Bases attached to the three
singular points 0, 1, infinity are provided, together with the exact
connection matrices between them and a branch-aware continuation engine that
transports value/derivative germs along paths in the z plane.

Branch conventions.  All cut-sensitive evaluations take a ``side`` argument
with the meaning "sign of an infinitesimal imaginary part added to the
argument"; +1 is the limit from the upper half-plane.  Sided evaluation never
guesses: landing on a cut without a declared side raises BranchCutError.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .core import DomainError

__all__ = [
    "Arc",
    "BranchCutError",
    "ComplexPath",
    "ConnectionMatrix",
    "ContinuationStallError",
    "DivergenceError",
    "Line",
    "PathTooCloseError",
    "RegionError",
    "SolutionFrame",
    "basis_eval",
    "connection",
    "continue_frame",
    "elliptic_K",
    "gauss_ode_residual",
    "hyper_F",
    "hyper_F_deriv",
    "hyper_Fstar",
    "hyper_Fstar_deriv",
    "phi_value",
]

# Exact entry of the connection matrices; 4 log 2, never a decimal literal.
LOG16 = 4.0 * math.log(2.0)

BASIS_IDS = ("at0", "at1", "atInf", "period")

_CUT_ATOL = 1e-14


class RegionError(DomainError):
    """Argument outside the region where a series/basis is defined."""


class BranchCutError(DomainError):
    """Evaluation landed on a branch cut with no side declared."""

    def __init__(self, message: str):
        super().__init__(message + " (pass side=+1 for the limit from Im > 0, side=-1 from below)")


class DivergenceError(DomainError):
    """Evaluation at a logarithmic singularity (K at m = 1)."""


class PathTooCloseError(ValueError):
    """Continuation path passes too close to a singular point."""


class ContinuationStallError(RuntimeError):
    """Continuation stepping stalled (required step below the minimum)."""


# ----------------------------------------------------------------------
# Elliptic integral of the first kind, parameter (not modulus) convention:
# K(m) = integral_0^1 dx / sqrt((1 - x^2)(1 - m x^2)).

def _agm_K(m: complex) -> complex:
    """AGM iteration with the branch-optimal square root at each step.

    For real m > 1 the principal square root of 1 - m makes this the limit
    from the lower half-plane (the m - i0 value); sided callers rely on that.
    """
    x = complex(1.0, 0.0)
    y = cmath.sqrt(1.0 - m)
    for _ in range(64):
        if abs(x - y) <= 1e-17 * abs(x):
            break
        x1 = 0.5 * (x + y)
        y1 = cmath.sqrt(x * y)
        # Choose the square-root branch that keeps the iterates close; on a
        # tie prefer Im(y1/x1) >= 0.  This is the optimal-AGM rule.
        ds, dd = abs(x1 + y1), abs(x1 - y1)
        if dd > ds or (dd == ds and (y1 / x1).imag < 0.0):
            y1 = -y1
        x, y = x1, y1
    return math.pi / (2.0 * x)


def elliptic_K(m: complex, side: int | None = None) -> complex:
    """Complete elliptic integral K in the parameter convention K(m**?) = ...

    Parameters
    ----------
    m : complex
        The parameter (the square of the classical modulus).
    side : {+1, -1}, optional
        Required when m lies on the cut [1, inf): selects the limit from
        Im m > 0 (+1) or Im m < 0 (-1).

    Raises
    ------
    DivergenceError
        If m = 1, where K diverges logarithmically.
    BranchCutError
        If m is on the cut and no side was given.
    """
    m = complex(m)
    if abs(m - 1.0) < 1e-15:
        raise DivergenceError("K(m) diverges logarithmically at m = 1")
    on_cut = abs(m.imag) <= _CUT_ATOL * max(1.0, abs(m)) and m.real > 1.0
    if on_cut:
        if side is None:
            raise BranchCutError(f"K evaluated on the branch cut [1, inf) at m = {m.real}")
        if side not in (+1, -1):
            raise ValueError(f"side must be +1 or -1, got {side!r}")
        # Sided values from the reciprocal-parameter identity:
        # K(m +/- i0) = (K(1/m) +/- i K(1 - 1/m)) / sqrt(m).
        x = m.real
        k_inv = _agm_K(1.0 / x)
        k_comp = _agm_K(1.0 - 1.0 / x)
        return (k_inv + side * 1j * k_comp) / math.sqrt(x)
    return _agm_K(m)


# ----------------------------------------------------------------------
# Power series at z = 0.  F is the Gauss series with squared central binomial
# coefficients; Fstar is the companion entering the logarithmic solution,
#     Fstar(z) = 4 sum_{n>=1} c_n^2 h_n z^n,
# with c_n = binom(2n, n) / 4^n and h_n = 1 - 1/2 + ... - 1/(2n).

_SERIES_RTOL = 1e-17
_SERIES_MAX_TERMS = 4000


def _series_region_check(z: complex, name: str) -> complex:
    z = complex(z)
    if abs(z) >= 1.0:
        raise RegionError(f"{name} series requires |z| < 1, got |z| = {abs(z):.6g}")
    return z


def _certified(acc: complex, term_mag: float, q: float) -> bool:
    # Certified stop: last term below the relative floor AND the geometric
    # tail bound term * q / (1 - q) below it as well.
    floor = _SERIES_RTOL * max(abs(acc), 1e-300)
    return term_mag < floor and term_mag * q / (1.0 - q) < floor


def hyper_F(z: complex) -> complex:
    """The hypergeometric series sum c_n^2 z^n on |z| < 1 (= (2/pi) K(z))."""
    z = _series_region_check(z, "hyper_F")
    q = abs(z)
    acc = 1.0 + 0.0j
    cn2 = 1.0
    zn = 1.0 + 0.0j
    for n in range(_SERIES_MAX_TERMS):
        cn2 *= ((2 * n + 1) / (2 * n + 2)) ** 2
        zn *= z
        term = cn2 * zn
        acc += term
        if _certified(acc, abs(term), q):
            return acc
    raise RegionError(f"hyper_F did not certify convergence at |z| = {q:.6g}")


def hyper_F_deriv(z: complex) -> complex:
    z = _series_region_check(z, "hyper_F_deriv")
    q = abs(z)
    acc = 0.25 + 0.0j  # n = 1 term: c_1^2 = 1/4
    cn2 = 0.25
    zn = 1.0 + 0.0j
    for n in range(1, _SERIES_MAX_TERMS):
        cn2 *= ((2 * n + 1) / (2 * n + 2)) ** 2
        zn *= z
        term = (n + 1) * cn2 * zn
        acc += term
        if _certified(acc, abs(term), q):
            return acc
    raise RegionError(f"hyper_F_deriv did not certify convergence at |z| = {q:.6g}")


def hyper_Fstar(z: complex) -> complex:
    """Companion series 4 sum c_n^2 h_n z^n of the logarithmic solution."""
    z = _series_region_check(z, "hyper_Fstar")
    q = abs(z)
    acc = 0.0 + 0.0j
    cn2, hn = 1.0, 0.0
    zn = 1.0 + 0.0j
    for n in range(_SERIES_MAX_TERMS):
        cn2 *= ((2 * n + 1) / (2 * n + 2)) ** 2
        hn += 1.0 / (2 * n + 1) - 1.0 / (2 * n + 2)
        zn *= z
        term = 4.0 * cn2 * hn * zn
        acc += term
        if abs(z) == 0.0 or _certified(acc, abs(term), q):
            return acc
    raise RegionError(f"hyper_Fstar did not certify convergence at |z| = {q:.6g}")


def hyper_Fstar_deriv(z: complex) -> complex:
    z = _series_region_check(z, "hyper_Fstar_deriv")
    q = abs(z)
    acc = 0.0 + 0.0j
    cn2, hn = 1.0, 0.0
    zn = 1.0 + 0.0j
    for n in range(_SERIES_MAX_TERMS):
        cn2 *= ((2 * n + 1) / (2 * n + 2)) ** 2
        hn += 1.0 / (2 * n + 1) - 1.0 / (2 * n + 2)
        term = 4.0 * (n + 1) * cn2 * hn * zn
        acc += term
        zn *= z
        if abs(z) == 0.0 or _certified(acc, abs(term), max(q, 1e-300)):
            return acc
    raise RegionError(f"hyper_Fstar_deriv did not certify convergence at |z| = {q:.6g}")


# ----------------------------------------------------------------------
# Sided scalar helpers used by the global phi evaluations.

def _log_sided(z: complex, side: int) -> complex:
    z = complex(z)
    if abs(z.imag) <= _CUT_ATOL * max(1.0, abs(z)) and z.real < 0.0:
        return math.log(-z.real) + side * 1j * math.pi
    return cmath.log(z)


def _sqrt_sided(z: complex, side: int) -> complex:
    z = complex(z)
    if abs(z.imag) <= _CUT_ATOL * max(1.0, abs(z)) and z.real < 0.0:
        return side * 1j * math.sqrt(-z.real)
    return cmath.sqrt(z)


def _K_sided(m: complex, side: int) -> complex:
    m = complex(m)
    if abs(m.imag) <= _CUT_ATOL * max(1.0, abs(m)) and m.real > 1.0:
        return elliptic_K(m.real, side=side)
    return elliptic_K(m)


# ----------------------------------------------------------------------
# The six named solutions.  phi1, phi3, phi5 are the holomorphic members of
# the three local bases; phi2s, phi4s, phi6s their logarithmic companions
# (the trailing s marks the starred normalization).

PHI_NAMES = ("phi1", "phi2s", "phi3", "phi4s", "phi5", "phi6s")


def phi_value(name: str, z: complex, side: int = +1) -> complex:
    """Globally continued value of one of the six named solutions.

    ``side`` is the sign of an infinitesimal imaginary part added to z; it
    resolves every branch cut the evaluation crosses (the cuts of the three
    holomorphic members jointly cover the real axis outside (0, 1)).
    The logarithmic companions are only provided inside their series disc.
    """
    z = complex(z)
    if side not in (+1, -1):
        raise ValueError(f"side must be +1 or -1, got {side!r}")
    if name == "phi1":
        return (2.0 / math.pi) * _K_sided(z, side)
    if name == "phi3":
        # Im(1 - z) = -Im z, so the side flips.
        return (2.0 / math.pi) * _K_sided(1.0 - z, -side)
    if name == "phi5":
        if abs(z) < 1e-15:
            raise RegionError("phi5 is singular at z = 0")
        # Both 1/z and -z acquire the opposite infinitesimal side.
        return (2.0 / math.pi) * _K_sided(1.0 / z, -side) / _sqrt_sided(-z, -side)
    if name == "phi2s":
        return hyper_F(z) * _log_sided(z, side) + hyper_Fstar(z)
    if name == "phi4s":
        w = 1.0 - z
        return hyper_F(w) * _log_sided(w, -side) + hyper_Fstar(w)
    if name == "phi6s":
        if abs(z) <= 1.0:
            raise RegionError(f"phi6s series requires |z| > 1, got |z| = {abs(z):.6g}")
        w = 1.0 / z
        return (hyper_F(w) * _log_sided(-z, -side) - hyper_Fstar(w)) / _sqrt_sided(-z, -side)
    raise ValueError(f"unknown solution name {name!r}, expected one of {PHI_NAMES}")


# ----------------------------------------------------------------------
# Solution frames and basis evaluation.

@dataclass(frozen=True)
class SolutionFrame:
    """A pair of solution values (with derivative germs) at a base point.

    Attributes
    ----------
    basis_id : str
        One of "at0", "at1", "atInf", "period".
    values : tuple of complex
        Values of the two basis solutions at ``base_point``.
    base_point : complex
    derivs : tuple of complex
        d/dz values at the base point; carried so frames can seed continuation.
    branch_log : dict
        Accumulated winding (in turns) of z around 0 and around 1 along
        whatever path produced this frame.
    """

    basis_id: str
    values: tuple[complex, complex]
    base_point: complex
    derivs: tuple[complex, complex] = (0.0j, 0.0j)
    branch_log: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.basis_id not in BASIS_IDS:
            raise ValueError(f"basis_id must be one of {BASIS_IDS}, got {self.basis_id!r}")


def basis_eval(basis_id: str, z: complex) -> SolutionFrame:
    """Evaluate the local basis attached to one singular point.

    Regions are strict: at0 needs |z| < 1, at1 needs |1 - z| < 1, atInf needs
    |z| > 1 with z off the ray [1, inf) (its log/sqrt prefactors are cut
    there).  "period" frames are produced by the period engine, not here.
    """
    z = complex(z)
    if basis_id == "period":
        raise ValueError("period frames are produced by the period engine, not basis_eval")
    if basis_id == "at0":
        if abs(z) >= 1.0:
            raise RegionError(f"at0 basis requires |z| < 1, got |z| = {abs(z):.6g}")
        if abs(z) < 1e-300:
            raise DivergenceError("the logarithmic solution at z = 0 diverges; evaluate off the puncture")
        on_cut = abs(z.imag) <= _CUT_ATOL and z.real < 0.0
        if on_cut:
            raise BranchCutError(f"at0 log prefactor is cut along (-inf, 0], z = {z.real}")
        f, fs = hyper_F(z), hyper_Fstar(z)
        fd, fsd = hyper_F_deriv(z), hyper_Fstar_deriv(z)
        lg = cmath.log(z)
        return SolutionFrame(
            "at0",
            (f, f * lg + fs),
            z,
            (fd, fd * lg + f / z + fsd),
            {"around0": 0.0, "around1": 0.0},
        )
    if basis_id == "at1":
        w = 1.0 - z
        if abs(w) >= 1.0:
            raise RegionError(f"at1 basis requires |1 - z| < 1, got {abs(w):.6g}")
        if abs(w) < 1e-300:
            raise DivergenceError("the logarithmic solution at z = 1 diverges; evaluate off the puncture")
        if abs(w.imag) <= _CUT_ATOL and w.real < 0.0:
            raise BranchCutError(f"at1 log prefactor is cut along z in [1, inf), z = {z.real}")
        f, fs = hyper_F(w), hyper_Fstar(w)
        fd, fsd = hyper_F_deriv(w), hyper_Fstar_deriv(w)
        lg = cmath.log(w)
        # d/dz = -d/dw throughout.
        return SolutionFrame(
            "at1",
            (f, f * lg + fs),
            z,
            (-fd, -(fd * lg + f / w + fsd)),
            {"around0": 0.0, "around1": 0.0},
        )
    if basis_id == "atInf":
        if abs(z) <= 1.0:
            raise RegionError(f"atInf basis requires |z| > 1, got |z| = {abs(z):.6g}")
        if abs(z.imag) <= _CUT_ATOL * abs(z) and z.real > 0.0:
            raise BranchCutError(f"atInf prefactors are cut along [1, inf), z = {z.real}")
        w = 1.0 / z
        f, fs = hyper_F(w), hyper_Fstar(w)
        fd, fsd = hyper_F_deriv(w), hyper_Fstar_deriv(w)
        rt = cmath.sqrt(-z)
        lg = cmath.log(-z)
        v1 = f / rt
        v2 = (f * lg - fs) / rt
        # Chain rule with w = 1/z (dw/dz = -1/z^2) and d/dz log(-z) = 1/z.
        dw = -1.0 / (z * z)
        d1 = (fd * dw) / rt - 0.5 * f / (rt * z)
        d2 = (fd * dw * lg + f / z - fsd * dw) / rt - 0.5 * (f * lg - fs) / (rt * z)
        return SolutionFrame(
            "atInf", (v1, v2), z, (d1, d2), {"around0": 0.0, "around1": 0.0}
        )
    raise ValueError(f"basis_id must be one of {BASIS_IDS}, got {basis_id!r}")


# ----------------------------------------------------------------------
# Exact connection matrices.  connection(x, y).matrix expresses the basis of
# x as combinations of the basis of y: values_x = M @ values_y, valid where
# both bases are defined (atInf blocks use the upper half-plane sheet).

@dataclass(frozen=True)
class ConnectionMatrix:
    matrix: np.ndarray
    from_basis: str
    to_basis: str


def _conn_block(from_basis: str, to_basis: str) -> np.ndarray:
    L = LOG16
    if from_basis == to_basis:
        return np.eye(2, dtype=complex)
    if (from_basis, to_basis) == ("at0", "at1"):
        return np.array(
            [[L / math.pi, -1.0 / math.pi],
             [(L * L - math.pi ** 2) / math.pi, -L / math.pi]],
            dtype=complex,
        )
    if (from_basis, to_basis) == ("at0", "atInf"):
        return np.array(
            [[L / math.pi, 1.0 / math.pi],
             [(L * (L + 1j * math.pi) - math.pi ** 2) / math.pi, (L + 1j * math.pi) / math.pi]],
            dtype=complex,
        )
    if (from_basis, to_basis) == ("at1", "at0"):
        return np.linalg.inv(_conn_block("at0", "at1"))
    if (from_basis, to_basis) == ("atInf", "at0"):
        return np.linalg.inv(_conn_block("at0", "atInf"))
    if (from_basis, to_basis) == ("at1", "atInf"):
        return _conn_block("at1", "at0") @ _conn_block("at0", "atInf")
    if (from_basis, to_basis) == ("atInf", "at1"):
        return _conn_block("atInf", "at0") @ _conn_block("at0", "at1")
    raise ValueError(f"no connection between {from_basis!r} and {to_basis!r}")


def connection(from_basis: str, to_basis: str) -> ConnectionMatrix:
    """Exact connection matrix between two of the local bases.

    The matrix satisfies values_from = matrix @ values_to pointwise in the
    common domain of the two bases; entries are exact in pi and log 16.
    Blocks involving atInf are the upper half-plane (Im z > 0) sheet; the
    lower sheet is the complex conjugate.
    """
    for b in (from_basis, to_basis):
        if b not in ("at0", "at1", "atInf"):
            raise ValueError(f"connection is defined between at0/at1/atInf, got {b!r}")
    return ConnectionMatrix(_conn_block(from_basis, to_basis), from_basis, to_basis)


# ----------------------------------------------------------------------
# Paths in the z plane.

@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def points(self, spacing: float) -> np.ndarray:
        n = max(8, int(math.ceil(self.length / spacing)) + 1)
        t = np.linspace(0.0, 1.0, n)
        return self.start + t * (self.end - self.start)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta_start: float
    theta_end: float

    @property
    def start(self) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.theta_start)

    @property
    def end(self) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.theta_end)

    @property
    def length(self) -> float:
        return abs(self.theta_end - self.theta_start) * self.radius

    def points(self, spacing: float) -> np.ndarray:
        n = max(16, int(math.ceil(self.length / spacing)) + 1)
        th = np.linspace(self.theta_start, self.theta_end, n)
        return self.center + self.radius * np.exp(1j * th)


@dataclass(frozen=True)
class ComplexPath:
    """A piecewise path of line and arc segments in an ambient plane.

    ``ambient`` records which plane the path lives in ("lambda" for the
    hypergeometric argument, or "moduli:<label>" for one moduli coordinate).
    Consecutive segments must join to within 1e-9.
    """

    segments: tuple
    ambient: str = "lambda"

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("path needs at least one segment")
        for prev, nxt in zip(self.segments, self.segments[1:]):
            if abs(complex(prev.end) - complex(nxt.start)) > 1e-9:
                raise ValueError(
                    f"segments do not join: {prev.end} -> {nxt.start}"
                )

    @property
    def start(self) -> complex:
        return complex(self.segments[0].start)

    @property
    def end(self) -> complex:
        return complex(self.segments[-1].end)

    def samples(self, spacing: float = 0.02) -> np.ndarray:
        parts = []
        for i, seg in enumerate(self.segments):
            pts = seg.points(spacing)
            parts.append(pts if i == 0 else pts[1:])
        return np.concatenate(parts)

    def to_json_dict(self) -> dict:
        segs = []
        for seg in self.segments:
            if isinstance(seg, Line):
                segs.append({
                    "kind": "line",
                    "start": [seg.start.real, seg.start.imag],
                    "end": [seg.end.real, seg.end.imag],
                })
            elif isinstance(seg, Arc):
                segs.append({
                    "kind": "arc",
                    "center": [seg.center.real, seg.center.imag],
                    "radius": seg.radius,
                    "theta": [seg.theta_start, seg.theta_end],
                })
            else:
                raise TypeError(f"unknown segment type {type(seg)!r}")
        return {"ambient": self.ambient, "segments": segs}

    @staticmethod
    def from_json_dict(data: dict) -> "ComplexPath":
        segs: list = []
        for raw in data["segments"]:
            kind = raw["kind"]
            if kind == "line":
                segs.append(Line(complex(*raw["start"]), complex(*raw["end"])))
            elif kind == "arc":
                t0, t1 = raw["theta"]
                segs.append(Arc(complex(*raw["center"]), float(raw["radius"]), float(t0), float(t1)))
            else:
                raise ValueError(f"unknown segment kind {kind!r}")
        return ComplexPath(tuple(segs), ambient=data.get("ambient", "lambda"))


# ----------------------------------------------------------------------
# Germ transport.  A germ is a (value, derivative) pair of one solution at an
# ordinary point; Taylor recentering steps it along a path.

def _taylor_coeffs(z0: complex, f0: complex, f1: complex, nterms: int) -> np.ndarray:
    a = np.empty(nterms, dtype=complex)
    a[0], a[1] = f0, f1
    s = z0 * (1.0 - z0)
    t = 1.0 - 2.0 * z0
    for n in range(nterms - 2):
        a[n + 2] = ((n + 0.5) ** 2 * a[n] - t * (n + 1) ** 2 * a[n + 1]) / (s * (n + 2) * (n + 1))
    return a


def _germ_step(z0: complex, germs: np.ndarray, z1: complex, nterms: int = 64) -> np.ndarray:
    """Advance all (value, derivative) germ rows from z0 to z1 at once."""
    h = z1 - z0
    out = np.empty_like(germs)
    for i, (f0, f1) in enumerate(germs):
        a = _taylor_coeffs(z0, f0, f1, nterms)
        powers = h ** np.arange(nterms)
        val = np.dot(a, powers)
        der = np.dot(a[1:] * np.arange(1, nterms), powers[:-1])
        out[i] = (val, der)
    return out


def _transport_germs(
    zs: np.ndarray,
    germs: np.ndarray,
    *,
    step_fraction: float = 0.35,
    min_step: float = 1e-6,
) -> tuple[np.ndarray, float, float]:
    """Transport germ rows along the polyline zs, sub-stepping as needed.

    Steps never exceed step_fraction times the distance to the nearest of
    the singular points {0, 1}; winding of z around 0 and 1 is accumulated
    and returned in turns.
    """
    cur = np.asarray(germs, dtype=complex).copy()
    w0 = w1 = 0.0
    z = complex(zs[0])
    for target in zs[1:]:
        target = complex(target)
        guard = 0
        while z != target:
            dist = min(abs(z), abs(z - 1.0))
            allowed = step_fraction * dist
            if allowed < min_step:
                raise ContinuationStallError(
                    f"step size collapsed to {allowed:.3g} near z = {z:.6g}"
                )
            gap = target - z
            if abs(gap) <= allowed:
                znew = target
            else:
                znew = z + gap * (allowed / abs(gap))
            cur = _germ_step(z, cur, znew)
            w0 += cmath.phase((znew - 0.0) / (z - 0.0)) / (2.0 * math.pi)
            w1 += cmath.phase((znew - 1.0) / (z - 1.0)) / (2.0 * math.pi)
            z = znew
            guard += 1
            if guard > 100000:
                raise ContinuationStallError("sub-stepping did not terminate")
    return cur, w0, w1


def _ode_transport(zs: np.ndarray, germs: np.ndarray, rtol: float = 1e-13) -> np.ndarray:
    """Independent check: integrate the ODE along the polyline with DOP853.

    scipy's solvers want real systems, so the two germ rows are unpacked
    into 8 real components.  The path is parameterized by arc index.
    """
    zs = np.asarray(zs, dtype=complex)
    n = len(zs)

    def z_of(t: float) -> tuple[complex, complex]:
        i = min(int(t), n - 2)
        frac = t - i
        dz = zs[i + 1] - zs[i]
        return zs[i] + frac * dz, dz

    def rhs(t, y):
        z, dz = z_of(t)
        out = np.empty_like(y)
        for k in range(2):
            f = y[4 * k] + 1j * y[4 * k + 1]
            fp = y[4 * k + 2] + 1j * y[4 * k + 3]
            fpp = (f / 4.0 - (1.0 - 2.0 * z) * fp) / (z * (1.0 - z))
            df = dz * fp
            dfp = dz * fpp
            out[4 * k], out[4 * k + 1] = df.real, df.imag
            out[4 * k + 2], out[4 * k + 3] = dfp.real, dfp.imag
        return out

    y0 = np.empty(8)
    for k in range(2):
        f, fp = germs[k]
        y0[4 * k], y0[4 * k + 1] = f.real, f.imag
        y0[4 * k + 2], y0[4 * k + 3] = fp.real, fp.imag
    sol = solve_ivp(rhs, (0.0, n - 1.0), y0, method="DOP853", rtol=rtol, atol=rtol, max_step=1.0)
    if not sol.success:
        raise ContinuationStallError(f"ODE transport failed: {sol.message}")
    y = sol.y[:, -1]
    out = np.empty((2, 2), dtype=complex)
    for k in range(2):
        out[k, 0] = y[4 * k] + 1j * y[4 * k + 1]
        out[k, 1] = y[4 * k + 2] + 1j * y[4 * k + 3]
    return out


def continue_frame(
    frame: SolutionFrame,
    path: ComplexPath,
    *,
    method: str = "taylor",
    min_step: float = 1e-6,
    spacing: float = 0.02,
) -> SolutionFrame:
    """Analytically continue a solution frame along a path.

    The frame's two solutions are transported as (value, derivative) germs by
    Taylor recentering, with steps capped at 0.35 times the distance to the
    nearest singular point.  method="ode" uses numerical integration of the
    equation instead; the two agree to ~1e-8 and the ODE route exists purely
    as an independent check.

    Raises PathTooCloseError if any sample sits closer than 10 * min_step to
    z = 0 or z = 1, and ContinuationStallError if sub-stepping collapses.
    """
    if frame.basis_id == "period":
        raise ValueError("period frames are continued by the monodromy engine")
    if abs(path.start - frame.base_point) > 1e-9:
        raise ValueError(
            f"path starts at {path.start}, frame is based at {frame.base_point}"
        )
    zs = path.samples(spacing)
    dist = np.minimum(np.abs(zs), np.abs(zs - 1.0))
    if float(dist.min()) < 10.0 * min_step:
        raise PathTooCloseError(
            f"path passes within {dist.min():.3g} of a singular point; "
            f"margin must exceed {10.0 * min_step:.3g}"
        )
    germs = np.array(
        [[frame.values[0], frame.derivs[0]], [frame.values[1], frame.derivs[1]]],
        dtype=complex,
    )
    if method == "taylor":
        new_germs, w0, w1 = _transport_germs(zs, germs, min_step=min_step)
    elif method == "ode":
        new_germs = _ode_transport(zs, germs)
        # winding depends on the path alone
        w0 = float(np.sum(np.angle(zs[1:] / zs[:-1]))) / (2.0 * math.pi)
        w1 = float(np.sum(np.angle((zs[1:] - 1.0) / (zs[:-1] - 1.0)))) / (2.0 * math.pi)
    else:
        raise ValueError(f"method must be 'taylor' or 'ode', got {method!r}")
    log = dict(frame.branch_log)
    log["around0"] = log.get("around0", 0.0) + w0
    log["around1"] = log.get("around1", 0.0) + w1
    return SolutionFrame(
        frame.basis_id,
        (complex(new_germs[0, 0]), complex(new_germs[1, 0])),
        path.end,
        (complex(new_germs[0, 1]), complex(new_germs[1, 1])),
        log,
    )


# ----------------------------------------------------------------------
# Finite-difference residual of the defining equation, used to certify that
# evaluated functions actually solve it.

def gauss_ode_residual(func, z: complex, h: float | None = None) -> complex:
    """Residual of z(1-z) f'' + (1-2z) f' - f/4 at z for a callable f.

    Uses 4th-order centered stencils; the default step 2e-3 (scaled by |z|)
    balances truncation against rounding in the second difference.
    """
    z = complex(z)
    if h is None:
        h = 2e-3 * max(1.0, abs(z))
    f0 = func(z)
    f1p, f1m = func(z + h), func(z - h)
    f2p, f2m = func(z + 2 * h), func(z - 2 * h)
    d1 = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h)
    d2 = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h)
    return z * (1.0 - z) * d2 + (1.0 - 2.0 * z) * d1 - f0 / 4.0
