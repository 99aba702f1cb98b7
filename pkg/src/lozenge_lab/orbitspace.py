"""Planar model of the blown-up flow: boundary maps, the domain Omega,
semiconjugacies, lozenge chains, triangles and the core region."""
from dataclasses import dataclass, field
import numpy as np

from .presentation import word_str
from .circlemap import repr_f
from .fuchsian import ConstructionRejected
from .limitset import GapLocator, gap_image

EDGE_TOL = 1e-9


# ---- per-gap conjugacies ----

class Identity:
    def __call__(self, x):
        return np.asarray(x, float)

    def inv(self, y):
        return np.asarray(y, float)


class Constant:
    def __init__(self, c):
        self.c = float(c)

    def __call__(self, x):
        return np.full(np.shape(x), self.c)


class Conjugacy:
    """Increasing H: [d0, d1] -> [e0, e1] with H o f = g o H.

    f pushes [d0, d1] from d0 to d1 and g pushes [e0, e1] from e0 to e1.  H is
    affine on the fundamental domain [p, f(p)] -> [q, g(q)] and extended by
    the dynamics.
    """

    def __init__(self, f, g, dom, tgt, p, q, max_iter=400):
        self.f, self.g = f, g
        self.dom, self.tgt = (float(dom[0]), float(dom[1])), (float(tgt[0]), float(tgt[1]))
        self.max_iter = max_iter
        self.set_anchor(p, q)

    def set_anchor(self, p, q):
        self.p, self.q = float(p), float(q)
        self.fp = float(self.f(self.p))
        self.gq = float(self.g(self.q))

    def _run(self, x, f, g, p, fp, q, gq, dom, tgt):
        x = np.atleast_1d(np.asarray(x, float)).copy()
        out = np.empty_like(x)
        out[x <= dom[0]] = tgt[0]
        out[x >= dom[1]] = tgt[1]
        inside = (x > dom[0]) & (x < dom[1])
        n = np.zeros(len(x), int)
        lo = inside & (x < p)
        for _ in range(self.max_iter):
            if not lo.any():
                break
            x[lo] = f(x[lo])
            n[lo] -= 1
            lo &= x < p
        hi = inside & (x >= fp)
        for _ in range(self.max_iter):
            if not hi.any():
                break
            x[hi] = f.inv(x[hi])
            n[hi] += 1
            hi &= x >= fp
        y = q + (x - p) * (gq - q) / (fp - p)
        for _ in range(self.max_iter + 1):
            m = inside & (n > 0)
            if not m.any():
                break
            y[m] = g(y[m])
            n[m] -= 1
        for _ in range(self.max_iter + 1):
            m = inside & (n < 0)
            if not m.any():
                break
            y[m] = g.inv(y[m])
            n[m] += 1
        y = np.clip(y, tgt[0], tgt[1])
        # orbits that never reached the fundamental domain sit at an endpoint
        y[lo] = tgt[0]
        y[hi] = tgt[1]
        out[inside] = y[inside]
        return out

    def __call__(self, x):
        return self._run(x, self.f, self.g, self.p, self.fp, self.q, self.gq, self.dom, self.tgt)

    def inv(self, y):
        return self._run(y, self.g, self.f, self.q, self.gq, self.p, self.fp, self.tgt, self.dom)

    def probe_points(self, n=40, span=12):
        base = np.linspace(self.p, self.fp, n, endpoint=False)
        pts = [base]
        x = base.copy()
        for _ in range(span):
            x = self.f(x)
            pts.append(x)
        x = base.copy()
        for _ in range(span):
            x = self.f.inv(x)
            pts.append(x)
        pts = np.concatenate(pts)
        return pts[(pts > self.dom[0]) & (pts < self.dom[1])]

    def to_json(self):
        return {"domain": [repr_f(v) for v in self.dom], "target": [repr_f(v) for v in self.tgt],
                "anchor": [repr_f(self.p), repr_f(self.q)]}


def _group(found, res):
    """Indices of located points keyed by (orbit id, word)."""
    groups = {}
    for j in np.nonzero(found)[0]:
        groups.setdefault((res[j][0], tuple(res[j][1])), []).append(j)
    return groups


def _tol(y):
    return 1e-12 * np.maximum(1.0, np.abs(y))


def _anchor(lo, hi, rng):
    u = 0.5 if rng is None else rng.uniform(0.2, 0.8)
    return lo + u * (hi - lo)


def _tune(H, ok, step, tries=80):
    """Move the target anchor along g-orbits until ok(x, H(x)) holds on probe points."""
    for _ in range(tries):
        x = H.probe_points()
        y = H(x)
        # probes that have numerically merged with an endpoint carry no information
        t = _tol(np.concatenate([H.dom, H.tgt]))
        keep = (x > H.dom[0] + t[0]) & (x < H.dom[1] - t[1]) & (y > H.tgt[0] + t[2]) & (y < H.tgt[1] - t[3])
        if np.all(ok(x[keep], y[keep])):
            return True
        H.set_anchor(H.p, float(step(H.q)))
    return False


# ---- data on one representative gap ----

def fixed_point_locations(rep, oid, gap):
    """Fixed points of the stabilizer of a representative gap on its closure."""
    prof = getattr(rep, "blown", {}).get(tuple(oid))
    inner = [x for x, _ in prof.interior] if prof is not None else []
    return [gap.lo] + inner + [gap.hi]


@dataclass
class GapPieces:
    gap: object
    x1: list                   # rho_1 fixed points on the closed gap
    x2: list                   # rho_2 fixed points on the closed gap
    y2: list                   # rho_2 fixed points on tau_0 of the closed gap
    alpha: object              # [a, x1[1]] -> [x2[-2], b], or Identity
    beta: object               # [x1[-2], b] -> [tau a, y2[1]], or None for tau_0
    phi1: object               # ]a, x1[1][ -> ]a, b[, or Identity
    modified1: bool
    modified2: bool
    modified2_next: bool

    def trivial(self, piece):
        """True when the piece is the default rule on this gap orbit."""
        if piece == "alpha_on":
            return isinstance(self.alpha, Identity)
        if piece == "beta_on":
            return self.beta is None
        if piece == "phi1_on":
            return isinstance(self.phi1, Identity)
        return self.alpha is self.phi1 or (isinstance(self.alpha, Identity) and isinstance(self.phi1, Identity))

    @property
    def k_shift(self):
        return self.y2[0] - self.gap.lo

    def alpha_on(self, z):
        b = self.gap.hi
        if isinstance(self.alpha, Identity):
            return np.asarray(z, float).copy()
        return np.where(z >= self.x1[1], b, self.alpha(np.minimum(z, self.x1[1])))

    def beta_on(self, z):
        ta = self.y2[0]
        if self.beta is None:
            return np.asarray(z, float) + self.k_shift
        return np.where(z <= self.x1[-2], ta, self.beta(np.maximum(z, self.x1[-2])))

    def phi1_on(self, z):
        if isinstance(self.phi1, Identity):
            return np.asarray(z, float).copy()
        return np.where(z >= self.x1[1], self.gap.hi, self.phi1(np.minimum(z, self.x1[1])))

    def phi2_on(self, z):
        a = self.gap.lo
        e = self.x2[-2]
        if self.alpha is self.phi1:
            return np.asarray(z, float).copy()
        if isinstance(self.alpha, Identity):
            return self.phi1_on(z)
        z = np.asarray(z, float)
        inv = self.alpha.inv(np.maximum(z, e))
        return np.where(z < e, a, self.phi1_on(inv))

    def to_json(self):
        return {"gap": self.gap.orbit_id, "interval": [repr_f(self.gap.lo), repr_f(self.gap.hi)],
                "rho1FixedPoints": [repr_f(v) for v in self.x1],
                "rho2FixedPoints": [repr_f(v) for v in self.x2],
                "rho2FixedPointsNext": [repr_f(v) for v in self.y2],
                "modified": [self.modified1, self.modified2, self.modified2_next]}


def _build_pieces(rho0, rho1, rho2, oid, gap, reps, rng):
    k = rho0.pres.k
    i, m = oid
    x1 = fixed_point_locations(rho1, oid, gap)
    x2 = fixed_point_locations(rho2, oid, gap)
    nxt = (i, (m + 1) % k)
    g2 = reps[nxt]
    shift = np.round(gap.lo + 1.0 / k - g2.lo)
    y2 = [v + shift for v in fixed_point_locations(rho2, nxt, g2)]
    mod1, mod2, mod2n = len(x1) > 2, len(x2) > 2, len(y2) > 2
    a, b = gap.lo, gap.hi
    f0 = rho0.map(gap.stabilizer)
    f1 = rho1.map(gap.stabilizer)
    f2 = rho2.map(gap.stabilizer)
    if mod1:
        phi1 = Conjugacy(f1, f0, (a, x1[1]), (a, b), _anchor(a, x1[1], rng), _anchor(a, b, rng))
    else:
        phi1 = Identity()
    if not (mod1 or mod2):
        alpha = Identity()
    elif not mod2:
        # rho_2 = rho_0 on this orbit: alpha = phi_1 makes phi_2 the identity here, which the
        # upper boundary of the tau-preceding gap needs when rho_1 is unmodified there
        if not _tune(phi1, lambda x, y: y > x, f0):
            raise ConstructionRejected(f"no conjugacy with x < alpha_1(x) found on gap {oid}", "orbitspace")
        alpha = phi1
    else:
        d, e = x1[1], x2[-2]
        alpha = Conjugacy(f1, f2, (a, d), (e, b), _anchor(a, d, rng), _anchor(e, b, rng))
        if not _tune(alpha, lambda x, y: y > x, f2):
            raise ConstructionRejected(f"no conjugacy with x < alpha_1(x) found on gap {oid}", "orbitspace")
    if not (mod1 or mod2n):
        beta = None
    else:
        c, t1 = x1[-2], y2[1]
        beta = Conjugacy(f1, f2, (c, b), (y2[0], t1), _anchor(c, b, rng), _anchor(y2[0], t1, rng))
        if not _tune(beta, lambda x, y: y < x + 1.0 / k, f2.inv):
            raise ConstructionRejected(f"no conjugacy with beta_1(x) < x + 1/k found on gap {oid}", "orbitspace")
    return GapPieces(gap, x1, x2, y2, alpha, beta, phi1, mod1, mod2, mod2n)


# ---- the model ----

class OrbitSpace:
    """(rho_1, rho_2): blow-ups of rho_0 and its twist, with the maps of the planar model.

    A point x of R either lies in rho_0(w)(I) for a representative gap I (found
    by the gap locator) or is treated as a point of the minimal set.
    """

    def __init__(self, rho0, rho1, rho2, seed=None):
        pres = rho0.pres
        if not pres.sig.orientable:
            raise ConstructionRejected("the planar model is built for orientable orbifolds only", "orbitspace")
        for r in (rho0, rho1, rho2):
            if not hasattr(r, "gap_representatives"):
                raise ConstructionRejected("missing fixed-point data: attach the gap table first", "orbitspace")
        self.rho0, self.rho1, self.rho2 = rho0, rho1, rho2
        self.rho0star = rho0      # orientable: the twist does not change rho_0
        self.k = pres.k
        self.seed = seed
        self.reps = rho0.gap_representatives
        self.gaps = rho0.gap_table
        self.locator = GapLocator(rho0, rho0.certificate, self.gaps, self.reps)
        rng = None if seed is None else np.random.default_rng(seed)
        self.pieces = {oid: _build_pieces(rho0, rho1, rho2, oid, g, self.reps, rng)
                       for oid, g in sorted(self.reps.items())}

    # -- evaluation through gap orbits --

    def locate(self, x):
        """Locator result; points within rounding of a gap endpoint count as that endpoint."""
        x = np.atleast_1d(np.asarray(x, float))
        found, res = self.locator.locate(x)
        for (oid, w), idx in _group(found, res).items():
            lo, hi = gap_image(self.rho0, w, self.reps[oid])
            for j in idx:
                if min(x[j] - lo, hi - x[j]) < _tol(x[j]):
                    found[j], res[j] = False, None
        return found, res

    def _extend(self, x, piece, src, dst, default, loc=None):
        x = np.atleast_1d(np.asarray(x, float))
        found, res = loc if loc is not None else self.locate(x)
        out = default(x)
        for (oid, w), idx in _group(found, res).items():
            if self.pieces[oid].trivial(piece):
                continue
            idx = np.array(idx)
            v = getattr(self.pieces[oid], piece)(src.evaluate_inverse(w, x[idx]))
            out[idx] = dst.evaluate(w, v)
        return out

    def alpha1_minus(self, x, loc=None):
        """Left-continuous version of alpha_1 (identity on the minimal set)."""
        return self._extend(x, "alpha_on", self.rho1, self.rho2, lambda t: t.copy(), loc)

    def beta1_plus(self, x, loc=None):
        """Right-continuous version of beta_1 (tau_0 on the minimal set)."""
        return self._extend(x, "beta_on", self.rho1, self.rho2, lambda t: t + 1.0 / self.k, loc)

    def _endpoint_side(self, x, left):
        """For points of the minimal set: the gap having x as its left (or right) endpoint."""
        eps = 1e-11
        probe = x + eps if left else x - eps
        found, res = self.locate(probe)
        out = [None] * len(x)
        for j in np.nonzero(found)[0]:
            oid, w = res[j]
            lo, hi = gap_image(self.rho0, w, self.reps[oid])
            end = lo if left else hi
            if abs(end - x[j]) < 1e-9:
                out[j] = (oid, w)
        return out

    def alpha1(self, x, loc=None):
        x = np.atleast_1d(np.asarray(x, float))
        loc = loc if loc is not None else self.locate(x)
        out = self.alpha1_minus(x, loc)
        free = np.nonzero(~loc[0])[0]
        if len(free):
            side = self._endpoint_side(x[free], True)
            for j, s in zip(free, side):
                if s is not None:
                    oid, w = s
                    p = self.pieces[oid]
                    out[j] = float(self.rho2.evaluate(w, [p.x2[-2]])[0])
        return out

    def beta1(self, x, loc=None):
        x = np.atleast_1d(np.asarray(x, float))
        loc = loc if loc is not None else self.locate(x)
        out = self.beta1_plus(x, loc)
        free = np.nonzero(~loc[0])[0]
        if len(free):
            side = self._endpoint_side(x[free], False)
            for j, s in zip(free, side):
                if s is not None:
                    oid, w = s
                    p = self.pieces[oid]
                    out[j] = float(self.rho2.evaluate(w, [p.y2[1]])[0])
        return out

    def phi1(self, x, loc=None):
        return self._extend(x, "phi1_on", self.rho1, self.rho0, lambda t: t.copy(), loc)

    def phi2(self, y, loc=None):
        return self._extend(y, "phi2_on", self.rho2, self.rho0star, lambda t: t.copy(), loc)

    def chi(self, x, y):
        return self.phi1(x), self.phi2(y)

    # -- horizontal readings by bisection --

    def _bisect(self, y, pred, iters=60):
        """Boundary of {x : pred(x, y)} in [y - 1/k, y]; pred true on the left part."""
        y = np.atleast_1d(np.asarray(y, float))
        lo, hi = y - 1.0 / self.k, y.copy()
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            t = pred(mid, y)
            lo = np.where(t, mid, lo)
            hi = np.where(t, hi, mid)
            if np.all(hi - lo < 1e-15 * np.maximum(1, np.abs(y))):
                break
        return lo, hi

    # comparisons absorb the rounding of values carried through gap words
    def alpha2(self, y):
        """inf {x : beta_1(x) > y}."""
        return self._bisect(y, lambda x, yy: ~(self.beta1(x) > yy + _tol(yy)))[1]

    def alpha2_minus(self, y):
        """inf {x : beta_1(x) >= y}."""
        return self._bisect(y, lambda x, yy: ~(self.beta1(x) >= yy - _tol(yy)))[1]

    def beta2(self, y):
        """sup {x : alpha_1(x) < y}."""
        return self._bisect(y, lambda x, yy: self.alpha1(x) < yy - _tol(yy))[0]

    def beta2_plus(self, y):
        """sup {x : alpha_1^-(x) <= y}."""
        return self._bisect(y, lambda x, yy: self.alpha1_minus(x) <= yy + _tol(yy))[0]

    # -- Omega and actions --

    def in_omega(self, x, y, loc=None):
        x = np.atleast_1d(np.asarray(x, float))
        y = np.atleast_1d(np.asarray(y, float))
        loc = loc if loc is not None else self.locate(x)
        return (self.alpha1(x, loc) < y) & (y < self.beta1(x, loc))

    def act_plane(self, w, x, y):
        return self.rho1.evaluate(w, x), self.rho2.evaluate(w, y)

    def act_flow(self, w, x, y, m):
        """Return (x', y', m', flagged); flagged marks points at derivative breakpoints of rho_0."""
        x = np.atleast_1d(np.asarray(x, float))
        y = np.atleast_1d(np.asarray(y, float))
        u, v = self.phi1(x), self.phi2(y)
        dm = -self.rho0.log_derivative(w, u) + self.rho0star.log_derivative(w, v)
        flagged = self._at_breakpoint(w, u) | self._at_breakpoint(w, v)
        x2, y2 = self.act_plane(w, x, y)
        return x2, y2, np.asarray(m, float) + dm, flagged

    def _at_breakpoint(self, w, u):
        out = np.zeros(len(u), bool)
        for g, _ in w:
            f = self.rho0.maps.get(g)
            for ov in getattr(f, "overrides", ()):
                for end in (ov.lo, ov.hi):
                    d = (u - end) % 1.0
                    out |= np.minimum(d, 1 - d) < 1e-12
        return out

    # -- chains and core --

    def chain(self, i):
        return boundary_chain(self, i)

    def chains(self):
        return [self.chain(i) for i in range(1, len(self.rho0.pres.c) + 1)]

    def core_membership(self, x, y):
        """Verdict per point: 'core', 'triangle' (with its corner) or 'outside'."""
        x = np.atleast_1d(np.asarray(x, float))
        y = np.atleast_1d(np.asarray(y, float))
        loc = self.locate(x)
        found, res = loc
        inside = self.in_omega(x, y, loc)
        verdict = np.where(inside, "core", "outside").astype(object)
        corners = [None] * len(x)
        s = 1.0 / self.k
        for j in np.nonzero(found)[0]:
            oid, w = res[j]
            lo, hi = gap_image(self.rho0, w, self.reps[oid])
            if not (lo + EDGE_TOL < x[j] < hi - EDGE_TOL):
                continue
            if lo - EDGE_TOL <= y[j] <= hi + EDGE_TOL:
                verdict[j] = "triangle"
                corners[j] = (lo, hi)           # exit corner
            elif lo + s - EDGE_TOL <= y[j] <= hi + s + EDGE_TOL:
                verdict[j] = "triangle"
                corners[j] = (hi, lo + s)       # entrance corner
        return verdict, corners

    def to_json(self):
        return {"seed": self.seed, "k": self.k,
                "pieces": [p.to_json() for _, p in sorted(self.pieces.items())]}


def build_orbit_space(rho0, rho1=None, rho2=None, seed=None):
    return OrbitSpace(rho0, rho1 if rho1 is not None else rho0,
                      rho2 if rho2 is not None else rho0, seed)


# ---- lozenge chains ----

@dataclass
class Lozenge:
    x: tuple                   # ]x0, x1[
    y: tuple                   # ]y0, y1[
    corners: tuple             # two opposite corners ((x, y), (x, y))
    gap_side: str              # 'horizontal' or 'vertical'
    label: str                 # 'exit' or 'entrance'
    elementary: list = field(default_factory=list)   # sub-lozenges (x, y, corners)
    triangle: tuple = ()       # (x-range, y-range) of the triangle at the first corner

    def to_json(self):
        f = lambda t: [repr_f(v) for v in t]
        return {"x": f(self.x), "y": f(self.y), "corners": [f(c) for c in self.corners],
                "gapSide": self.gap_side, "label": self.label,
                "elementary": [{"x": f(e[0]), "y": f(e[1]), "corners": [f(c) for c in e[2]]}
                               for e in self.elementary],
                "triangle": [f(t) for t in self.triangle]}


@dataclass
class LozengeChain:
    boundary: int
    stabilizer: tuple
    lozenges: list             # one h-period, left to right

    def elementary_count(self):
        return sum(len(l.elementary) for l in self.lozenges)

    def true_corners(self):
        out = []
        for l in self.lozenges:
            for c in l.corners:
                if c not in out:
                    out.append(c)
        return out

    def fake_corners(self):
        true = set(self.true_corners())
        out = []
        for l in self.lozenges:
            for e in l.elementary:
                for c in e[2]:
                    if c not in true and c not in out:
                        out.append(c)
        return out

    def to_json(self):
        return {"boundary": self.boundary, "stabilizer": word_str(self.stabilizer),
                "lozenges": [l.to_json() for l in self.lozenges],
                "elementaryCount": self.elementary_count(),
                "fakeCorners": [[repr_f(a), repr_f(b)] for a, b in self.fake_corners()]}


def _split(xs, y0, y1, horizontal):
    """Elementary lozenges of a generalized lozenge split along its gap side."""
    out = []
    for j in range(len(xs) - 1):
        u, v = xs[j], xs[j + 1]
        if horizontal:
            cs = ((u, y0), (v, y1)) if j % 2 == 0 else ((u, y1), (v, y0))
            out.append(((u, v), (y0, y1), cs))
        else:
            cs = ((y0, u), (y1, v)) if j % 2 == 0 else ((y1, u), (y0, v))
            out.append(((y0, y1), (u, v), cs))
    return out


def boundary_chain(space, i):
    """Lozenges of boundary i over one h-period: exit over I_m, entrance over I_(m+1)."""
    k = space.k
    s = 1.0 / k
    lozenges = []
    stab = None
    for m in range(k):
        p = space.pieces[(i, m)]
        stab = p.gap.stabilizer
        a, b = p.gap.lo, p.gap.hi
        a1, b1 = a + s, b + s
        # exit: the x side ]a, b[ is the gap, split by rho_1 fixed points
        ex = Lozenge((a, b), (b, a1), ((a, b), (b, a1)), "horizontal", "exit",
                     _split(p.x1, b, a1, True), ((a, b), (a1 - s, b)))
        # entrance: the y side ]a1, b1[ is the gap, split by rho_2 fixed points there
        ys = p.y2
        en = Lozenge((b, a1), (a1, b1), ((b, a1), (a1, b1)), "vertical", "entrance",
                     _split(ys, b, a1, False), ((a1 - s, b), (a1, b1)))
        lozenges += [ex, en]
    return LozengeChain(i, stab, lozenges)
