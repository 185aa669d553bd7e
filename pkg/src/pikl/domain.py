"""Domains inside the box [-L, L]^d and their characteristic functions.

For a domain ``dom`` the characteristic function is

    F(k) = (4L)^{-d} * integral over dom of exp(i pi <k, x> / (2L)) dx

(per-axis ``L`` multiply out). It is the only geometric ingredient of the
Gram matrices. Every variant evaluates ``F`` on arrays of (possibly
non-integer) multi-indices with shape (..., d).

Disjointness of :class:`DisjointUnion` parts is NOT checked: the caller
declares it. Overlapping parts silently double count.
"""
import numpy as np

from . import _accel
from .fourier import _as_lengths
from .precision import as_real


def bessel_j1(x):
    """Bessel function of the first kind of order one, for x >= 0.

    Power series below 8, Miller's backward recurrence on [8, 25) and the
    Hankel asymptotic expansion above; absolute error below 1e-12 on [0, 1e3].
    """
    arr = as_real(x)
    out = _accel.kernels.bessel_j1(np.ascontiguousarray(arr.ravel()))
    out = np.asarray(out).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def _half_sinc(k):
    # sin(pi k / 2) / (pi k), with the removable singularity at k = 0 set to 1/2
    k = np.asarray(k, dtype=np.float64)
    zero = k == 0
    safe = np.where(zero, 1.0, k)
    return np.where(zero, 0.5, np.sin(0.5 * np.pi * safe) / (np.pi * safe))


def _full_sinc(k):
    # sin(pi k) / (pi k), limit 1 at k = 0
    k = np.asarray(k, dtype=np.float64)
    zero = k == 0
    safe = np.where(zero, 1.0, k)
    return np.where(zero, 1.0, np.sin(np.pi * safe) / (np.pi * safe))


class Domain:
    """Base class. Subclasses set ``d`` and ``L`` and implement ``_char``."""

    d: int
    L: tuple

    def char_fn(self, k):
        k = np.asarray(k, dtype=np.float64)
        if k.shape[-1:] != (self.d,):
            raise ValueError(f"multi-index must have {self.d} components")
        return np.asarray(self._char(k), dtype=np.complex128)

    def volume(self):
        return float(np.real(self.char_fn(np.zeros(self.d)))) * float(
            np.prod(4.0 * np.asarray(self.L))
        )

    def bounding_box(self):
        raise NotImplementedError

    def contains(self, x):
        raise NotImplementedError

    def _char(self, k):
        raise NotImplementedError


class Cube(Domain):
    """The full box [-L, L]^d."""

    def __init__(self, d, L):
        self.d = int(d)
        self.L = _as_lengths(L, self.d)

    def _char(self, k):
        return np.prod(_half_sinc(k), axis=-1)

    def bounding_box(self):
        Ls = np.asarray(self.L)
        return -Ls, Ls

    def contains(self, x):
        return np.all(np.abs(x) <= np.asarray(self.L), axis=-1)

    def __repr__(self):
        return f"Cube(d={self.d}, L={self.L})"


class Torus(Domain):
    """The whole extended box [-2L, 2L]^d.

    Used along axes with periodic boundary conditions: F(k) = delta_{k,0} on
    integer modes, so the penalty decouples across those axes.
    """

    def __init__(self, d, L):
        self.d = int(d)
        self.L = _as_lengths(L, self.d)

    def _char(self, k):
        return np.prod(_full_sinc(k), axis=-1)

    def bounding_box(self):
        Ls = 2.0 * np.asarray(self.L)
        return -Ls, Ls

    def contains(self, x):
        return np.all(np.abs(x) <= 2.0 * np.asarray(self.L), axis=-1)

    def __repr__(self):
        return f"Torus(d={self.d}, L={self.L})"


class Ball2D(Domain):
    """Euclidean disk of radius L centred at the origin (d = 2)."""

    def __init__(self, L, d=2):
        if d != 2:
            raise ValueError("Ball2D is only defined in dimension 2")
        self.d = 2
        self.L = _as_lengths(L, 2)
        if self.L[0] != self.L[1]:
            raise ValueError("Ball2D needs the same half-width on both axes")

    def _char(self, k):
        r = np.sqrt(np.sum(k * k, axis=-1))
        zero = r == 0
        safe = np.where(zero, 1.0, r)
        val = bessel_j1(0.5 * np.pi * safe) / (4.0 * safe)
        return np.where(zero, np.pi / 16.0, val)

    def bounding_box(self):
        Ls = np.asarray(self.L)
        return -Ls, Ls

    def contains(self, x):
        return np.sum(np.asarray(x) ** 2, axis=-1) <= self.L[0] ** 2

    def __repr__(self):
        return f"Ball2D(L={self.L[0]})"


class Scaled(Domain):
    """a * inner for a scalar 0 < |a| <= 1."""

    def __init__(self, inner, a):
        a = float(a)
        if a == 0 or abs(a) > 1:
            raise ValueError("scale factor must satisfy 0 < |a| <= 1")
        self.inner, self.a = inner, a
        self.d, self.L = inner.d, inner.L

    def _char(self, k):
        return abs(self.a) ** self.d * self.inner.char_fn(self.a * k)

    def bounding_box(self):
        lo, hi = self.inner.bounding_box()
        pts = np.stack([self.a * lo, self.a * hi])
        return pts.min(axis=0), pts.max(axis=0)

    def contains(self, x):
        return self.inner.contains(np.asarray(x) / self.a)

    def __repr__(self):
        return f"Scaled({self.inner!r}, {self.a})"


class Translated(Domain):
    """inner + z, with inner inside [-L/2, L/2]^d and max|z_i| < L_i / 2."""

    def __init__(self, inner, z):
        z = np.asarray(z, dtype=np.float64).reshape(-1)
        if z.shape != (inner.d,):
            raise ValueError("shift dimension mismatch")
        half = 0.5 * np.asarray(inner.L)
        lo, hi = inner.bounding_box()
        if np.any(lo < -half - 1e-12) or np.any(hi > half + 1e-12):
            raise ValueError("translated domain must lie inside [-L/2, L/2]^d")
        if np.any(np.abs(z) >= half):
            raise ValueError("shift must satisfy max|z_i| < L_i / 2")
        self.inner, self.z = inner, z
        self.d, self.L = inner.d, inner.L

    def _char(self, k):
        phase = np.sum(k * (0.5 * np.pi * self.z / np.asarray(self.L)), axis=-1)
        return self.inner.char_fn(k) * np.exp(1j * phase)

    def bounding_box(self):
        lo, hi = self.inner.bounding_box()
        return lo + self.z, hi + self.z

    def contains(self, x):
        return self.inner.contains(np.asarray(x) - self.z)

    def __repr__(self):
        return f"Translated({self.inner!r}, {self.z.tolist()})"


class DisjointUnion(Domain):
    """Union of parts the caller guarantees to be pairwise disjoint."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("DisjointUnion needs at least one part")
        d, L = parts[0].d, parts[0].L
        if any(p.d != d or p.L != L for p in parts):
            raise ValueError("all parts must share d and L")
        self.parts, self.d, self.L = parts, d, L

    def _char(self, k):
        return sum(p.char_fn(k) for p in self.parts)

    def bounding_box(self):
        boxes = [p.bounding_box() for p in self.parts]
        return (np.min([b[0] for b in boxes], axis=0),
                np.max([b[1] for b in boxes], axis=0))

    def contains(self, x):
        return np.any([p.contains(x) for p in self.parts], axis=0)

    def __repr__(self):
        return f"DisjointUnion({self.parts!r})"


class Product(Domain):
    """Cartesian product left x right; dimensions and half-widths concatenate."""

    def __init__(self, left, right):
        self.left, self.right = left, right
        self.d = left.d + right.d
        self.L = tuple(left.L) + tuple(right.L)

    def _char(self, k):
        dl = self.left.d
        return self.left.char_fn(k[..., :dl]) * self.right.char_fn(k[..., dl:])

    def bounding_box(self):
        a, b = self.left.bounding_box(), self.right.bounding_box()
        return np.concatenate([a[0], b[0]]), np.concatenate([a[1], b[1]])

    def contains(self, x):
        x = np.asarray(x)
        dl = self.left.d
        return self.left.contains(x[..., :dl]) & self.right.contains(x[..., dl:])

    def __repr__(self):
        return f"Product({self.left!r}, {self.right!r})"


class MonteCarlo(Domain):
    """Domain given only by an indicator; F is estimated by uniform sampling.

    Samples are drawn once from a counter-based Philox generator keyed by
    ``seed``, so values are reproducible across runs and platforms.
    """

    def __init__(self, indicator, box, L, samples=100_000, seed=0):
        lo, hi = (np.asarray(b, dtype=np.float64).reshape(-1) for b in box)
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ValueError("degenerate bounding box")
        if samples < 10_000:
            raise ValueError("Monte Carlo domains need at least 1e4 samples")
        self.indicator = indicator
        self.lo, self.hi = lo, hi
        self.d = lo.size
        self.L = _as_lengths(L, self.d)
        self.samples, self.seed = int(samples), int(seed)
        self._pts = None

    def _points(self):
        if self._pts is None:
            rng = np.random.Generator(np.random.Philox(self.seed))
            u = rng.random((self.samples, self.d))
            x = self.lo + u * (self.hi - self.lo)
            inside = np.asarray(self.indicator(x), dtype=bool)
            self._pts = x[inside]
        return self._pts

    @property
    def box_volume(self):
        return float(np.prod(self.hi - self.lo))

    def _moments(self, k):
        # first and second moments of 1_dom(x) exp(i pi <k,x>/(2L)) under the box law
        pts = self._points()
        flat = k.reshape(-1, self.d)
        w = 0.5 * np.pi / np.asarray(self.L)
        mean = np.empty(len(flat), dtype=np.complex128)
        second = np.empty(len(flat))
        for start in range(0, len(flat), 32):
            blk = flat[start:start + 32]
            vals = np.exp(1j * ((blk * w) @ pts.T))
            mean[start:start + 32] = vals.sum(axis=1) / self.samples
            # |e^{i.}|^2 = 1 on the domain, 0 outside
            second[start:start + 32] = pts.shape[0] / self.samples
        return mean, second

    def _char(self, k):
        mean, _ = self._moments(k)
        norm = float(np.prod(4.0 * np.asarray(self.L)))
        return (self.box_volume / norm * mean).reshape(k.shape[:-1])

    def stderr(self, k):
        """Standard error of the estimate of F(k), in modulus."""
        k = np.asarray(k, dtype=np.float64)
        mean, second = self._moments(k)
        norm = float(np.prod(4.0 * np.asarray(self.L)))
        var = np.maximum(second - np.abs(mean) ** 2, 0.0)
        sd = self.box_volume / norm * np.sqrt(var / self.samples)
        return sd.reshape(k.shape[:-1])

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def contains(self, x):
        return np.asarray(self.indicator(np.asarray(x)), dtype=bool)


def char_fn(dom, k):
    """F_dom(k) for one multi-index (returns complex) or an array of them."""
    out = dom.char_fn(k)
    return complex(out) if out.ndim == 0 else out


def char_fn_monte_carlo(dom, k):
    if not isinstance(dom, MonteCarlo):
        raise TypeError("char_fn_monte_carlo needs a MonteCarlo domain")
    return char_fn(dom, k)


def cylinder(L):
    """Disk of radius L times the interval [-L, L] (d = 3)."""
    return Product(Ball2D(L), Cube(1, L))


_LEAVES = {"cube", "ball2d", "torus"}


def domain_from_config(tree, L, d=None):
    """Build a domain from a JSON-style tree.

    Example: {"product": [{"ball2d": {}}, {"cube": {"d": 1}}]}. Every node may
    override the half-width with an "L" entry.
    """
    if isinstance(tree, str):
        tree = {tree: {}}
    if not isinstance(tree, dict) or len(tree) != 1:
        raise ValueError(f"domain node must be a single-key mapping, got {tree!r}")
    (kind, body), = tree.items()
    body = body or {}
    if kind in _LEAVES or kind in ("scaled", "translated"):
        if not isinstance(body, dict):
            raise ValueError(f"{kind} expects a mapping")
        Lnode = body.get("L", L)
    if kind == "cube":
        return Cube(body.get("d", d or 1), Lnode)
    if kind == "torus":
        return Torus(body.get("d", d or 1), Lnode)
    if kind == "ball2d":
        return Ball2D(Lnode)
    if kind == "scaled":
        return Scaled(domain_from_config(body["inner"], Lnode, d), body["a"])
    if kind == "translated":
        return Translated(domain_from_config(body["inner"], Lnode, d), body["z"])
    if kind == "union":
        return DisjointUnion(domain_from_config(p, L, d) for p in body)
    if kind == "product":
        if len(body) < 2:
            raise ValueError("product needs at least two factors")
        parts = [domain_from_config(p, L) for p in body]
        out = parts[0]
        for p in parts[1:]:
            out = Product(out, p)
        return out
    raise ValueError(f"unknown domain kind {kind!r}")
