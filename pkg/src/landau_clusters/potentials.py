"""Potential descriptors and smooth test functions.

A :class:`Potential` is an immutable description of a real function V on the
plane together with its declared decay exponent rho (|V(x)| <= C <x>^{-rho}).
The descriptor round-trips through plain dicts so it can live in JSON configs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import integrate

from .errors import DomainError

FAST_FAMILIES = ("zero", "gaussian", "angular_fourier", "grid")
RADIAL_FAMILIES = ("zero", "gaussian", "power", "radial_table")
EPS_FLOOR = 1e-17


def japanese(r2):
    """<x> = (1 + |x|^2)^{1/2}, given |x|^2."""
    return np.sqrt(1.0 + r2)


_FAMILY_KEYS = {
    "zero": set(),
    "gaussian": {"amplitude", "width", "rho"},
    "power": {"amplitude", "rho"},
    "powerDecay": {"amplitude", "rho"},
    "radial_table": {"nodes", "values", "rho"},
    "radialTable": {"nodes", "values", "rho"},
    "angular_fourier": {"harmonics", "rho"},
    "angularFourierRadial": {"harmonics", "rho"},
    "grid": {"x", "y", "values", "rho"},
    "gridSampled": {"x", "y", "values", "rho"},
}


@dataclass(frozen=True)
class Potential:
    """V(x) = scale * base(R_{-angle}(x - shift)) ** power."""

    family: str
    params: dict = field(default_factory=dict)
    rho: float = 4.0
    scale: float = 1.0
    shift: tuple = (0.0, 0.0)
    angle: float = 0.0
    power: int = 1

    def __post_init__(self):
        if self.family not in FAST_FAMILIES + ("power", "radial_table"):
            raise DomainError(f"unknown potential family {self.family!r}")
        if not self.rho > 1:
            raise DomainError(f"decay exponent rho must exceed 1, got {self.rho}")
        if self.family == "radial_table":
            from scipy.interpolate import CubicSpline

            r = np.asarray(self.params["nodes"], dtype=float)
            v = np.asarray(self.params["values"], dtype=float)
            object.__setattr__(self, "_spline", CubicSpline(r, v, bc_type=((1, 0.0), "not-a-knot")))
        elif self.family == "grid":
            from scipy.interpolate import RegularGridInterpolator

            p = self.params
            object.__setattr__(
                self,
                "_interp",
                RegularGridInterpolator(
                    (np.asarray(p["x"], float), np.asarray(p["y"], float)),
                    np.asarray(p["values"], float),
                    method="cubic",
                    bounds_error=False,
                    fill_value=0.0,
                ),
            )

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls) -> "Potential":
        return cls("zero", rho=1e6)

    @classmethod
    def gaussian(cls, amplitude: float = 1.0, width: float = 1.0, rho: float = 4.0) -> "Potential":
        """amplitude * exp(-|x|^2 / width^2); in X_rho for every rho."""
        return cls("gaussian", {"amplitude": float(amplitude), "width": float(width)}, rho=rho)

    @classmethod
    def power_decay(cls, rho: float, amplitude: float = 1.0) -> "Potential":
        """amplitude * <x>^{-rho}."""
        return cls("power", {"amplitude": float(amplitude)}, rho=rho)

    @classmethod
    def radial_table(cls, nodes, values, rho: float) -> "Potential":
        return cls("radial_table", {"nodes": list(map(float, nodes)), "values": list(map(float, values))}, rho=rho)

    @classmethod
    def angular_fourier(cls, harmonics, rho: float = 4.0) -> "Potential":
        """Sum of A (r/w)^{|k|} e^{-r^2/w^2} cos(k theta - phase) terms."""
        hs = [
            {"k": int(h["k"]), "amplitude": float(h.get("amplitude", 1.0)),
             "width": float(h.get("width", 1.0)), "phase": float(h.get("phase", 0.0))}
            for h in harmonics
        ]
        return cls("angular_fourier", {"harmonics": hs}, rho=rho)

    @classmethod
    def grid_sampled(cls, x, y, values, rho: float = 4.0) -> "Potential":
        return cls("grid", {"x": list(map(float, x)), "y": list(map(float, y)),
                            "values": np.asarray(values, float).tolist()}, rho=rho)

    @classmethod
    def from_descriptor(cls, d: dict[str, Any]) -> "Potential":
        d = dict(d)
        fam = d.pop("family")
        kw = {k: d.pop(k) for k in ("scale", "angle", "power") if k in d}
        if "center" in d:
            d.setdefault("shift", d.pop("center"))
        if "shift" in d:
            kw["shift"] = tuple(float(s) for s in d.pop("shift"))
        unknown = set(d) - _FAMILY_KEYS.get(fam, set(d))
        if unknown:
            raise DomainError(f"unknown keys for family {fam!r}: {sorted(unknown)}")
        if fam == "zero":
            base = cls.zero()
        elif fam == "gaussian":
            base = cls.gaussian(d.get("amplitude", 1.0), d.get("width", 1.0), d.get("rho", 4.0))
        elif fam in ("power", "powerDecay"):
            base = cls.power_decay(d["rho"], d.get("amplitude", 1.0))
        elif fam in ("radial_table", "radialTable"):
            base = cls.radial_table(d["nodes"], d["values"], d["rho"])
        elif fam in ("angular_fourier", "angularFourierRadial"):
            base = cls.angular_fourier(d["harmonics"], d.get("rho", 4.0))
        elif fam in ("grid", "gridSampled"):
            base = cls.grid_sampled(d["x"], d["y"], d["values"], d.get("rho", 4.0))
        else:
            raise DomainError(f"unknown potential family {fam!r}")
        return replace(base, **kw) if kw else base

    def descriptor(self) -> dict[str, Any]:
        d = {"family": self.family, "rho": self.rho, **self.params}
        if self.scale != 1.0:
            d["scale"] = self.scale
        if any(self.shift):
            d["shift"] = list(self.shift)
        if self.angle:
            d["angle"] = self.angle
        if self.power != 1:
            d["power"] = self.power
        return d

    # -- transforms -----------------------------------------------------------
    def scaled(self, c: float) -> "Potential":
        return replace(self, scale=self.scale * c)

    def translated(self, a) -> "Potential":
        return replace(self, shift=(self.shift[0] + a[0], self.shift[1] + a[1]))

    def rotated(self, phi: float) -> "Potential":
        return replace(self, angle=self.angle + phi)

    def pow(self, ell: int) -> "Potential":
        """Pointwise power V^ell (decay exponent rho * ell)."""
        if self.family == "gaussian" and self.power == 1:
            p = self.params
            return replace(self, params={"amplitude": p["amplitude"] ** ell,
                                         "width": p["width"] / math.sqrt(ell)},
                           rho=self.rho * ell, scale=self.scale ** ell)
        if self.family == "power" and self.power == 1:
            return replace(self, params={"amplitude": self.params["amplitude"] ** ell},
                           rho=self.rho * ell, scale=self.scale ** ell)
        return replace(self, rho=self.rho * ell, scale=self.scale ** ell, power=self.power * ell)

    # -- properties -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        if self.family == "zero" or self.scale == 0.0:
            return True
        if self.family in ("gaussian", "power"):
            return self.params["amplitude"] == 0.0
        return False

    @property
    def is_radial(self) -> bool:
        return self.family in RADIAL_FAMILIES and not any(self.shift)

    @property
    def fast_decay(self) -> bool:
        """True when V decays faster than any power (Gaussian-type or compact)."""
        return self.family in FAST_FAMILIES

    @property
    def center(self) -> tuple:
        return self.shift

    @property
    def length_scale(self) -> float:
        if self.family == "gaussian":
            return self.params["width"] / math.sqrt(self.power)
        if self.family == "angular_fourier":
            return max(h["width"] for h in self.params["harmonics"])
        if self.family == "grid":
            return 0.25 * (max(self.params["x"]) - min(self.params["x"]))
        return 1.0

    def effective_radius(self, eps: float = EPS_FLOOR) -> float:
        """Radius (about the origin) outside which |V| < eps * sup|V|; inf for algebraic decay."""
        off = math.hypot(*self.shift)
        if self.family == "zero":
            return 0.0
        if self.family == "gaussian":
            w = self.params["width"]
            return off + w * math.sqrt(math.log(1.0 / eps) / self.power)
        if self.family == "angular_fourier":
            r = 0.0
            for h in self.params["harmonics"]:
                k = abs(h["k"])
                # (r/w)^k e^{-r^2/w^2} < eps once r^2/w^2 > ln(1/eps) + k ln(r/w)
                t = math.log(1.0 / eps)
                for _ in range(50):
                    t = math.log(1.0 / eps) + 0.5 * k * math.log(max(t, 1.0))
                r = max(r, h["width"] * math.sqrt(t / self.power))
            return off + r
        if self.family == "grid":
            p = self.params
            return off + math.hypot(max(map(abs, p["x"])), max(map(abs, p["y"])))
        return math.inf

    # -- evaluation -----------------------------------------------------------
    def _base_radial(self, r2):
        f = self.family
        if f == "zero":
            return np.zeros_like(r2)
        if f == "gaussian":
            p = self.params
            return p["amplitude"] * np.exp(-r2 / p["width"] ** 2)
        if f == "power":
            return self.params["amplitude"] * (1.0 + r2) ** (-0.5 * self.rho / self.power)
        if f == "radial_table":
            r = np.sqrt(r2)
            nodes = self.params["nodes"]
            rl = nodes[-1]
            out = np.empty_like(r2)
            inside = r <= rl
            out[inside] = self._spline(r[inside])
            tail_rho = self.rho / self.power
            out[~inside] = self.params["values"][-1] * ((1.0 + r2[~inside]) / (1.0 + rl * rl)) ** (-0.5 * tail_rho)
            return out
        raise DomainError(f"{f} is not a radial family")

    def _base(self, x, y):
        f = self.family
        if f in RADIAL_FAMILIES:
            return self._base_radial(x * x + y * y)
        if f == "angular_fourier":
            r2 = x * x + y * y
            th = np.arctan2(y, x)
            out = np.zeros_like(r2)
            for h in self.params["harmonics"]:
                w, k = h["width"], h["k"]
                out += h["amplitude"] * (r2 / (w * w)) ** (0.5 * abs(k)) * np.exp(-r2 / (w * w)) * np.cos(k * th - h["phase"])
            return out
        if f == "grid":
            pts = np.stack([x.ravel(), y.ravel()], axis=-1)
            return self._interp(pts).reshape(x.shape)
        raise AssertionError(f)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        if self.is_zero:
            return np.zeros(x.shape) if x.ndim else 0.0
        xs, ys = x - self.shift[0], y - self.shift[1]
        if self.angle:
            c, s = math.cos(self.angle), math.sin(self.angle)
            xs, ys = c * xs + s * ys, -s * xs + c * ys
        out = self._base(xs, ys)
        if self.power != 1:
            out = out ** self.power
        out = self.scale * out
        return out if out.ndim else float(out)

    def radial(self, r):
        """Radial profile V(r) for radial potentials."""
        if not self.is_radial:
            raise DomainError("potential is not radial")
        r = np.asarray(r, dtype=float)
        return self(r, np.zeros_like(r))

    def xrho_norm(self, grid_radius: float = 200.0, n: int = 4001) -> float:
        """sup <x>^rho |V(x)|: closed form where available, dense grid otherwise."""
        if self.is_zero:
            return 0.0
        untransformed = not any(self.shift) and self.power == 1
        if self.family == "power" and untransformed:
            return abs(self.scale * self.params["amplitude"])
        if self.family == "gaussian" and untransformed:
            w = self.params["width"]
            t = max(0.0, 0.5 * self.rho * w * w - 1.0)
            return abs(self.scale * self.params["amplitude"]) * (1.0 + t) ** (0.5 * self.rho) * math.exp(-t / (w * w))
        if self.is_radial:
            r = np.concatenate([np.linspace(0.0, 20.0, n), np.geomspace(20.0, grid_radius, n)])
            return float(np.max(japanese(r * r) ** self.rho * np.abs(self.radial(r))))
        R = min(grid_radius, self.effective_radius(1e-20) + 1.0)
        g = np.linspace(-R, R, 801)
        X, Y = np.meshgrid(g, g, indexing="ij")
        return float(np.max(japanese(X * X + Y * Y) ** self.rho * np.abs(self(X, Y))))

    def validate(self, radius: float = 50.0, n: int = 201, slack: float = 1.0 + 1e-9) -> bool:
        """Check |V(x)| <= ||V||_{X_rho} <x>^{-rho} on a validation grid."""
        g = np.linspace(-radius, radius, n)
        X, Y = np.meshgrid(g, g, indexing="ij")
        bound = self.xrho_norm() * japanese(X * X + Y * Y) ** (-self.rho)
        return bool(np.all(np.abs(self(X, Y)) <= slack * bound + 1e-300))

    @property
    def integrable(self) -> bool:
        return self.fast_decay or self.rho > 2

    def integral(self) -> float:
        """int_{R^2} V(x) dx by adaptive quadrature in polar coordinates about the centre."""
        if not self.integrable:
            raise DomainError(f"V with rho={self.rho} <= 2 is not integrable")
        if self.is_zero:
            return 0.0
        cx, cy = self.shift
        rmax = self.effective_radius(1e-20) if self.fast_decay else math.inf
        if self.is_radial:
            val, _ = integrate.quad(lambda r: r * self.radial(r), 0.0, rmax, epsabs=1e-13, epsrel=1e-13, limit=400)
            return 2.0 * math.pi * val

        def inner(theta):
            c, s = math.cos(theta), math.sin(theta)
            f = lambda r: r * self(cx + r * c, cy + r * s)
            v, _ = integrate.quad(f, 0.0, rmax - math.hypot(cx, cy) if math.isfinite(rmax) else math.inf,
                                  epsabs=1e-13, epsrel=1e-12, limit=200)
            return v

        # the angular integrand is smooth and periodic: trapezoid converges geometrically
        n = 64
        prev = None
        while True:
            th = 2.0 * math.pi * np.arange(n) / n
            val = 2.0 * math.pi / n * sum(inner(t) for t in th)
            if prev is not None and abs(val - prev) <= 1e-12 * max(1.0, abs(val)):
                return val
            if n > 4096:
                return val
            prev, n = val, 2 * n


@dataclass(frozen=True)
class Bump:
    """Smooth bump t -> exp(1 - 1/(1 - s^2)), s = (t - center)/half_width, support away from 0."""

    center: float
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise DomainError("half_width must be positive")
        if self.center - self.half_width <= 0.0 <= self.center + self.half_width:
            raise DomainError("bump support must exclude 0")

    @property
    def support(self) -> tuple:
        return (self.center - self.half_width, self.center + self.half_width)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        s = (t - self.center) / self.half_width
        out = np.zeros(t.shape)
        inside = np.abs(s) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out if out.ndim else float(out)

    def descriptor(self) -> dict:
        return {"center": self.center, "half_width": self.half_width}
