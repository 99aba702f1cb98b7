"""Lifted circle homeomorphisms in the angle coordinate.

A point x of the line stands for the direction [cos(pi k x) : sin(pi k x)] of
the k-fold cover of the projective line.  Translation by 1 is the central
element h and translation by 1/k is tau_0.
"""
from dataclasses import dataclass
import numpy as np

from .presentation import inverse as word_inverse

TOL = 1e-12


def _arr(x):
    return np.asarray(x, dtype=float)


class ProjectiveLift:
    """Continuous lift of x -> A.x to the line, fixed by the value at 0 and an offset.

    The canonical lift has f(0) in [0, 1/k); offset adds offset/k.
    """

    def __init__(self, A, k=1, offset=0):
        A = np.array(A, dtype=float)
        det = np.linalg.det(A)
        if abs(det) < 1e-300:
            raise ValueError("singular matrix")
        A = A / np.sqrt(abs(det))
        self.A = A
        self.k = int(k)
        self.offset = int(offset)
        self.orientation = 1 if det > 0 else -1
        a, b, c, d = A.ravel()
        self._P = complex(a + d, c - b) / 2
        self._Q = complex(a - d, c + b) / 2
        self._shift = 0.0
        raw0 = float(self._raw(0.0))
        m = np.floor(raw0 * self.k + 1e-13)
        self._shift = (-m + self.offset) / self.k

    def _raw(self, x):
        th = np.pi * self.k * _arr(x)
        if self.orientation > 0:
            r = self._Q / self._P
            t = th + np.angle(self._P) + np.angle(1 + r * np.exp(-2j * th))
        else:
            r = self._P / self._Q
            t = -th + np.angle(self._Q) + np.angle(1 + r * np.exp(2j * th))
        return t / (np.pi * self.k)

    def __call__(self, x):
        return self._raw(x) + self._shift

    def log_derivative(self, x):
        th = np.pi * self.k * _arr(x)
        v = self.A @ np.array([np.cos(th), np.sin(th)])
        return -np.log(v[0] ** 2 + v[1] ** 2)

    def inverse(self):
        inv = getattr(self, "_inv", None)
        if inv is None:
            g = ProjectiveLift(np.linalg.inv(self.A), self.k, 0)
            y0 = float(self(0.0))
            m = int(round(-float(g(y0)) * self.k))
            inv = self._inv = ProjectiveLift(np.linalg.inv(self.A), self.k, m)
        return inv

    def with_offset(self, offset):
        return ProjectiveLift(self.A, self.k, offset)

    def fixed_directions(self):
        """Fixed points of the projective action, as x values in [0, 1/k)."""
        w, V = np.linalg.eig(self.A)
        out = []
        for i in range(2):
            if abs(w[i].imag) < 1e-12:
                v = V[:, i].real
                t = np.arctan2(v[1], v[0]) % np.pi
                out.append(t / (np.pi * self.k))
        return sorted(set(round(x, 15) for x in out))

    def to_json(self):
        return {"type": "projective", "matrix": [[float(repr_f(v)) for v in row] for row in self.A],
                "k": self.k, "liftOffset": self.offset}


def repr_f(v):
    return float("%.17g" % v)


class Translation:
    def __init__(self, t, k=1):
        self.t = float(t)
        self.k = k
        self.orientation = 1

    def __call__(self, x):
        return _arr(x) + self.t

    def inverse(self):
        return Translation(-self.t, self.k)

    def log_derivative(self, x):
        return np.zeros_like(_arr(x))

    def to_json(self):
        return {"type": "translation", "t": self.t}


class PiecewiseLift:
    """Increasing PL map of the line with f(x+1) = f(x) + 1, from knots on one period.

    xs must span [x0, x0 + 1] and ys the corresponding values (ys[-1] = ys[0] + 1).
    """

    def __init__(self, xs, ys):
        self.xs = np.array(xs, float)
        self.ys = np.array(ys, float)
        if not (np.all(np.diff(self.xs) > 0) and np.all(np.diff(self.ys) > 0)):
            raise ValueError("knots must be strictly increasing")
        if abs(self.xs[-1] - self.xs[0] - 1) > 1e-12 or abs(self.ys[-1] - self.ys[0] - 1) > 1e-12:
            raise ValueError("knots must span exactly one period")
        self.orientation = 1

    def __call__(self, x):
        x = _arr(x)
        n = np.floor(x - self.xs[0])
        return np.interp(x - n, self.xs, self.ys) + n

    def inverse(self):
        return PiecewiseLift(self.ys, self.xs)

    def log_derivative(self, x):
        x = _arr(x)
        n = np.floor(x - self.xs[0])
        i = np.clip(np.searchsorted(self.xs, x - n, side="right") - 1, 0, len(self.xs) - 2)
        s = np.diff(self.ys) / np.diff(self.xs)
        return np.log(s[i])

    def to_json(self):
        return {"type": "piecewise", "xs": [repr_f(v) for v in self.xs],
                "ys": [repr_f(v) for v in self.ys]}


# ---- twists: self-homeomorphisms of an interval, evaluated lazily ----

class Twist:
    def __call__(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def log_derivative(self, x):
        # symmetric difference; twists are only homeomorphisms in general
        h = 1e-7
        return np.log((self(x + h) - self(x - h)) / (2 * h))


class InverseTwist(Twist):
    def __init__(self, inner):
        self.inner = inner

    def __call__(self, x):
        return self.inner.inv(x)

    def inv(self, x):
        return self.inner(x)

    def to_json(self):
        return {"type": "inverse", "of": self.inner.to_json()}


class ComposeTwist(Twist):
    """outer o inner"""

    def __init__(self, outer, inner):
        self.outer, self.inner = outer, inner

    def __call__(self, x):
        return self.outer(self.inner(x))

    def inv(self, x):
        return self.inner.inv(self.outer.inv(x))

    def to_json(self):
        return {"type": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


class ConjTwist(Twist):
    """rho(w) o inner o rho(w)^-1, with rho a fixed representation."""

    def __init__(self, rep, word, inner):
        self.rep, self.word, self.inner = rep, tuple(word), inner

    def __call__(self, x):
        return self.rep.evaluate(self.word, self.inner(self.rep.evaluate_inverse(self.word, x)))

    def inv(self, x):
        return self.rep.evaluate(self.word, self.inner.inv(self.rep.evaluate_inverse(self.word, x)))

    def to_json(self):
        from .presentation import word_str
        return {"type": "conj", "word": word_str(self.word), "inner": self.inner.to_json()}


class GapTwist(Twist):
    """rho(stab)^-1 o profile, a self-map of the profile's gap."""

    def __init__(self, rep, stab, profile):
        self.rep, self.stab, self.profile = rep, tuple(stab), profile

    def __call__(self, x):
        return self.rep.evaluate_inverse(self.stab, self.profile(x))

    def inv(self, x):
        return self.profile.inv(self.rep.evaluate(self.stab, x))

    def to_json(self):
        from .presentation import word_str
        return {"type": "gap", "stabilizer": word_str(self.stab), "profile": self.profile.to_json()}


@dataclass
class Override:
    lo: float
    hi: float
    twist: object

    def locate(self, x):
        n = np.floor(x - self.lo)
        r = x - n
        return n, (r > self.lo) & (r < self.hi)


class LiftedHomeo:
    """f = base o twist on each override domain (mod 1), base elsewhere."""

    def __init__(self, base, overrides=()):
        self.base = base
        self.overrides = tuple(overrides)
        self.orientation = base.orientation

    def __call__(self, x):
        x = np.array(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        for ov in self.overrides:
            n, m = ov.locate(x)
            if np.any(m):
                x[m] = ov.twist(x[m] - n[m]) + n[m]
        y = self.base(x)
        return float(y[0]) if scalar else y

    def inv(self, y):
        x = np.atleast_1d(np.array(self.base.inverse()(y), dtype=float))
        for ov in reversed(self.overrides):
            n, m = ov.locate(x)
            if np.any(m):
                x[m] = ov.twist.inv(x[m] - n[m]) + n[m]
        return float(x[0]) if np.ndim(y) == 0 else x

    def log_derivative(self, x):
        x = np.array(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        for ov in self.overrides:
            n, m = ov.locate(x)
            if np.any(m):
                out[m] += ov.twist.log_derivative(x[m] - n[m])
                x[m] = ov.twist(x[m] - n[m]) + n[m]
        out += self.base.log_derivative(x)
        return float(out[0]) if scalar else out

    def with_override(self, lo, hi, twist):
        """Add a pre-twist on ]lo, hi[ (mod 1); stacks with an existing one on the same domain."""
        n = np.floor(lo)
        lo, hi = lo - n, hi - n
        ovs = list(self.overrides)
        for i, ov in enumerate(ovs):
            if abs(ov.lo - lo) < 1e-9 and abs(ov.hi - hi) < 1e-9:
                ovs[i] = Override(ov.lo, ov.hi, ComposeTwist(ov.twist, twist))
                return LiftedHomeo(self.base, ovs)
            a, b = sorted([(ov.lo, ov.hi), (lo, hi)])
            if b[0] < a[1] - 1e-12 or b[1] - 1 > a[0] + 1e-12:
                raise ValueError("override intervals overlap")
        ovs.append(Override(lo, hi, twist))
        return LiftedHomeo(self.base, ovs)

    def to_json(self):
        return {"orientation": self.orientation, "base": self.base.to_json(),
                "overrides": [{"interval": [repr_f(o.lo), repr_f(o.hi)], "rule": o.twist.to_json()}
                              for o in self.overrides]}


class Representation:
    """Generator letters -> lifted maps; the derived boundary letter is evaluated
    through its word followed by a central shift."""

    def __init__(self, pres, maps, derived_shift=0, history=()):
        self.pres = pres
        self.k = pres.k
        self.maps = dict(maps)
        self.derived_shift = int(derived_shift)
        self.history = tuple(history)
        self._dw = pres.boundary[pres.derived]

    def replace(self, gen, f, record=None):
        maps = dict(self.maps)
        maps[gen] = f
        hist = self.history + ((record,) if record is not None else ())
        return Representation(self.pres, maps, self.derived_shift, hist)

    def orientation(self, w):
        return self.pres.word_orientation(w)

    def _letter(self, g, e, x):
        if g == "h":
            return x + e
        if g == "t":
            return x + e / self.k
        if g == self.pres.derived:
            if e == 1:
                return self.evaluate(self._dw, x) + self.derived_shift
            return self.evaluate_inverse(self._dw, x - self.derived_shift)
        f = self.maps[g]
        return f(x) if e == 1 else f.inv(x)

    def evaluate(self, w, x):
        x = _arr(x)
        for g, e in reversed(w):
            x = self._letter(g, e, x)
        return x

    def evaluate_inverse(self, w, y):
        return self.evaluate(word_inverse(w), y)

    def log_derivative(self, w, x):
        x = _arr(x)
        tot = np.zeros_like(x)
        for g, e in reversed(tuple(self._expand(w))):
            if g in ("h", "t"):
                x = self._letter(g, e, x)
                continue
            f = self.maps[g]
            if e == 1:
                tot = tot + f.log_derivative(x)
                x = f(x)
            else:
                y = f.inv(x)
                tot = tot - f.log_derivative(y)
                x = y
        return tot

    def _expand(self, w):
        for g, e in w:
            if g == self.pres.derived:
                yield from (self._dw if e == 1 else word_inverse(self._dw))
            else:
                yield (g, e)

    def map(self, w):
        return WordMap(self, tuple(w))

    def relation_shifts(self, x=0.1234):
        """Central shift n_r with rho(r)(x) = x + n_r for each relator r."""
        out = []
        for r in self.pres.relations():
            v = float(self.evaluate(r, x)) - x
            out.append(v)
        return out

    def to_json(self):
        return {"k": self.k, "derivedShift": self.derived_shift,
                "generators": {g: f.to_json() for g, f in self.maps.items()}}


class WordMap:
    def __init__(self, rep, w):
        self.rep, self.w = rep, w
        self.orientation = rep.orientation(w)

    def __call__(self, x):
        return self.rep.evaluate(self.w, x)

    def inv(self, y):
        return self.rep.evaluate_inverse(self.w, y)


def evaluate(rep, w, x):
    return rep.evaluate(w, x)


def evaluate_inverse(rep, w, y):
    return rep.evaluate_inverse(w, y)


def log_derivative(rep, w, x):
    return rep.log_derivative(w, x)


def translation_number(f, iterations=1000, x0=0.0):
    x = float(x0)
    for _ in range(iterations):
        x = float(f(x))
    return (x - x0) / iterations


# ---- fixed points ----

@dataclass
class FixedPointRecord:
    location: float
    type: str            # attracting | repelling | neutral
    left: int            # sign of f(x) - x just left of the point
    right: int

    def to_json(self):
        return {"location": repr_f(self.location), "type": self.type,
                "displacementSign": [self.left, self.right]}


def _bisect(d, lo, hi, tol=TOL):
    lo = np.array(lo, float)
    hi = np.array(hi, float)
    slo = np.sign(d(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all((hi - lo <= tol) | (mid == lo) | (mid == hi)):
            break
        sm = np.sign(d(mid))
        same = sm == slo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _classify(d, x, span):
    eps = max(1e-10, 1e-6 * span)
    l = int(np.sign(d(x - eps)))
    r = int(np.sign(d(x + eps)))
    if l > 0 and r < 0:
        t = "attracting"
    elif l < 0 and r > 0:
        t = "repelling"
    else:
        t = "neutral"
    return FixedPointRecord(float(x), t, l, r)


def fixed_points(f, x0=0.0, n_grid=10000, tol=TOL, finv=None, refine=3):
    """Fixed points of an increasing lift f in [x0, x0 + 1).

    Displacement sign scan on a grid, bisection, then a relative re-scan of
    every short interval between consecutive fixed points (catches pairs that
    sit inside a small gap).
    """
    if getattr(f, "orientation", 1) < 0:
        return _fixed_points_reversing(f, x0, tol)

    def d(x):
        return f(x) - x

    xs = x0 + np.arange(n_grid + 1) / n_grid
    pts = _scan(d, xs, tol)
    for _ in range(refine):
        ext = sorted(set(pts))
        new = []
        if len(ext) >= 2:
            bounds = list(zip(ext[:-1], ext[1:])) + [(ext[-1], ext[0] + 1)]
        else:
            bounds = []
        for a, b in bounds:
            if b - a < 20.0 / n_grid:
                g = a + (b - a) * np.arange(1, 400) / 400
                new += [p for p in _scan(d, g, tol) if a + tol < p < b - tol]
        if not new:
            break
        pts = pts + new
    pts = sorted(set(((p - x0) % 1.0) + x0 for p in pts))
    out = []
    for p in pts:
        if out and abs(p - out[-1]) < 10 * tol:
            continue
        out.append(p)
    if len(out) > 1 and abs(out[0] + 1 - out[-1]) < 10 * tol:
        out.pop()
    spacing = np.diff(out + [out[0] + 1]) if out else []
    recs = []
    for i, p in enumerate(out):
        span = min(spacing[i], spacing[i - 1])
        recs.append(_classify(d, p, span))
    return recs


def _scan(d, xs, tol):
    v = d(xs)
    s = np.sign(v)
    pts = list(xs[s == 0])
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if len(idx):
        # bisect to floating-point resolution; tol only governs deduplication
        pts += list(_bisect(d, xs[idx], xs[idx + 1], 0.0))
    return [float(p) for p in pts]


def _fixed_points_reversing(f, x0, tol):
    # f - id is strictly decreasing on the whole line, so there is exactly one zero
    def d(x):
        return f(x) - x
    lo, hi = x0 - 1.0, x0 + 2.0
    while d(lo) < 0:
        lo -= 1
    while d(hi) > 0:
        hi += 1
    p = float(_bisect(d, lo, hi, 0.0))
    return [FixedPointRecord(p, "reversing", 1, -1)]


def check_alternation(recs):
    types = [r.type for r in recs]
    if any(t == "neutral" for t in types):
        return False
    return all(types[i] != types[(i + 1) % len(types)] for i in range(len(types))) if len(types) > 1 else len(types) == 0
