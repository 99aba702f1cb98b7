"""Convex-cocompact actions built by ping-pong (Klein combination)."""
from dataclasses import dataclass, field
import itertools
import numpy as np

from .presentation import Presentation, word_str
from .circlemap import ProjectiveLift, LiftedHomeo, Representation


class ConstructionRejected(Exception):
    def __init__(self, msg, module="fuchsian"):
        super().__init__(msg)
        self.module = module


def rot(t):
    """Planar rotation by angle t."""
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def direction(x, k=1):
    t = np.pi * k * x
    return np.array([np.cos(t), np.sin(t)])


def hyperbolic(attr, rep, lam, k=1, reversing=False):
    """Matrix with attracting direction attr and repelling direction rep (x units),
    eigenvalue ratio lam**2."""
    M = np.column_stack([direction(attr, k), direction(rep, k)])
    D = np.diag([lam, (-1 if reversing else 1) / lam])
    return M @ D @ np.linalg.inv(M)


def elliptic(center, alpha, lam, k=1):
    """Order-alpha element B R B^-1; B pushes everything toward center."""
    B = hyperbolic(center, center + 0.5 / k, lam, k)
    return B @ rot(np.pi / alpha) @ np.linalg.inv(B), B


@dataclass
class Arc:
    lo: float
    hi: float
    letter: tuple        # word of the letter whose target this arc is
    family: str          # generator it belongs to

    def contains(self, x, tol=0.0):
        return self.lo - tol <= x <= self.hi + tol

    def to_json(self):
        return {"interval": [float(self.lo), float(self.hi)],
                "letter": word_str(self.letter), "family": self.family}


@dataclass
class PingPongCertificate:
    k: int
    arcs: list                     # one period of RP^1, i.e. inside [0, 1/k)
    table: list = field(default_factory=list)
    ok: bool = False

    def all_arcs(self):
        """Arcs over one unit period of the line."""
        out = []
        for m in range(self.k):
            for a in self.arcs:
                out.append(Arc(a.lo + m / self.k, a.hi + m / self.k, a.letter, a.family))
        return sorted(out, key=lambda a: a.lo)

    def to_json(self):
        return {"k": self.k, "arcs": [a.to_json() for a in self.arcs], "ok": self.ok,
                "table": self.table}


def _inside(lo, hi, arc, k):
    """Is [lo, hi] contained in some translate of arc by multiples of 1/k?"""
    n = np.floor((lo - arc.lo) * k)
    for m in (n - 1, n, n + 1):
        s = m / k
        if arc.lo + s - 1e-13 <= lo and hi <= arc.hi + s + 1e-13:
            return True
    return False


def verify_certificate(rep, arcs, k):
    """Endpoint check: every letter maps every arc it may precede into its target."""
    table = []
    ok = True
    for tgt in arcs:
        for src in arcs:
            same = src.family == tgt.family
            if same and (tgt.family in rep.pres.torsion or src.letter != tgt.letter):
                continue
            y0 = float(rep.evaluate(tgt.letter, src.lo))
            y1 = float(rep.evaluate(tgt.letter, src.hi))
            lo, hi = min(y0, y1), max(y0, y1)
            good = _inside(lo, hi, tgt, k)
            table.append({"letter": word_str(tgt.letter), "arc": [src.lo, src.hi], "ok": bool(good)})
            ok &= good
    # disjointness
    allarcs = sorted([(a.lo, a.hi) for a in arcs])
    for (a0, a1), (b0, b1) in zip(allarcs, allarcs[1:] + [(allarcs[0][0] + 1 / k, 0)]):
        if b0 <= a1:
            ok = False
            table.append({"overlap": [a0, a1, b0]})
    return ok, table


@dataclass
class GeometryParams:
    arrangement: list = None     # cyclic order of tokens (gen, sign); sign 0 for torsion
    lam: float = 3.0
    matrices: dict = None        # user-supplied matrices per generator
    offsets: dict = None         # user-supplied lift offsets per generator
    arc_fraction: float = 0.35   # arc radius as a fraction of the slot width

    def to_json(self):
        return {"arrangement": [[g, s] for g, s in self.arrangement] if self.arrangement else None,
                "lam": self.lam,
                "matrices": {g: np.asarray(m).tolist() for g, m in (self.matrices or {}).items()},
                "offsets": self.offsets, "arcFraction": self.arc_fraction}


def _expand(arrangement):
    toks, glued = [], set()
    for g, s in arrangement:
        if s == 0:
            toks += [(g, 1), (g, -1)]
            glued.add(len(toks) - 2)
        else:
            toks.append((g, s))
    return toks, glued


def boundary_cycles(pres, arrangement):
    """Words read off the free arcs glued by the exact ping-pong pairing.

    A letter s maps the complement of X_{s^-1} onto X_s; following the ends of
    the free arcs through these pairings gives one cycle per boundary class
    (each cycle is listed once per direction of travel).
    """
    toks, glued = _expand(arrangement)
    n = len(toks)
    pos = {t: i for i, t in enumerate(toks)}
    seen, out = set(), []
    for f0 in range(n):
        if f0 in glued:
            continue
        for d0 in (1, -1):
            if (f0, d0) in seen:
                continue
            f, d, word = f0, d0, []
            while (f, d) not in seen:
                seen.add((f, d))
                g, s = toks[(f + 1) % n if d == 1 else f]
                word.append((g, s))
                rev = pres.orientation(g) < 0
                j = pos[(g, -s)]
                d = (-d) if rev else d
                f = j if d == 1 else (j - 1) % n
            out.append(tuple(word))
    return out


def conjugacy_key(pres, w):
    """Canonical representative of the conjugacy class of w (cyclic normal form)."""
    w = pres.normal_form(w)
    while len(w) > 1:
        v = pres.normal_form(w[1:] + w[:1])
        if len(v) >= len(w):
            break
        w = v
    if not w:
        return ()
    return min(pres.normal_form(w[i:] + w[:i]) for i in range(len(w)))


def arrangement_ok(pres, arrangement):
    from .presentation import inverse
    got = {conjugacy_key(pres, w) for w in boundary_cycles(pres, arrangement)}
    for c in pres.c:
        b = pres.boundary[c]
        if not ({conjugacy_key(pres, b), conjugacy_key(pres, inverse(b))} & got):
            return False
    return True


def _candidates(pres):
    handle_orders = [o for o in itertools.permutations([("a", -1), ("b", 1), ("a", 1), ("b", -1)])
                     if o[0][0] == o[2][0]]
    cap_orders = [[-1, 1], [1, -1]]
    for ho, co, cs, rev_c, cones_first in itertools.product(
            handle_orders, cap_orders, ([1, -1], [-1, 1]), (True, False), (False, True)):
        blocks = []
        if pres.sig.orientable:
            for a, b in zip(pres.a, pres.b):
                blocks += [(a if x == "a" else b, s) for x, s in ho]
        else:
            for a in pres.a:
                blocks += [(a, s) for s in co]
        cones = [(d, 0) for d in pres.d]
        cl = list(reversed(pres.c[:-1])) if rev_c else list(pres.c[:-1])
        pairs = [(c, s) for c in cl for s in cs]
        yield (cones + blocks + pairs) if cones_first else (blocks + cones + pairs)


def default_arrangement(pres):
    """Cyclic order of ping-pong arcs for which every boundary letter is peripheral.

    Handles are interleaved blocks, cross-caps and cone points are adjacent
    pairs/clusters, non-derived boundary letters are adjacent pairs; the block
    orders are searched until the glued free arcs spell all boundary words.
    """
    for arr in _candidates(pres):
        if arrangement_ok(pres, arr):
            return arr
    raise ConstructionRejected("no peripheral arrangement found for this signature")


def _layout(pres, arrangement, lam, k, frac):
    """Matrices and arcs for an arrangement, arcs inside [0, 1/k)."""
    n = len(arrangement)
    slot = 1.0 / (n * k)
    centers = {tok: (i + 0.5) * slot for i, tok in enumerate(arrangement)}
    r = frac * slot
    mats, arcs = {}, []
    for g in pres.generators:
        if g in pres.torsion:
            alpha = pres.torsion[g]
            p = centers[(g, 0)]
            E, B = elliptic(p, alpha, lam, k)
            mats[g] = E
            # fundamental domains of the rotation around B's repelling point
            fB = ProjectiveLift(B, k)
            u = p + 0.5 / k
            w = 1.0 / (alpha * k)
            for m in range(1, alpha):
                lo = float(fB(u + (m - 0.5) * w + 0.02 * w))
                hi = float(fB(u + (m + 0.5) * w - 0.02 * w))
                sh = np.round((0.5 * (lo + hi) - p) * k) / k
                arcs.append(Arc(lo - sh, hi - sh, ((g, 1),) * m, g))
        else:
            t, s = centers[(g, 1)], centers[(g, -1)]
            rev = (not pres.sig.orientable) and g in pres.a
            mats[g] = hyperbolic(t, s, lam, k, reversing=rev)
            arcs.append(Arc(t - r, t + r, ((g, 1),), g))
            arcs.append(Arc(s - r, s + r, ((g, -1),), g))
    return mats, arcs


def build_fuchsian(sig, geom=None):
    """Return (rho0, certificate).  Raises ConstructionRejected on failure."""
    pres = sig if isinstance(sig, Presentation) else Presentation(sig)
    k = pres.k
    geom = geom or GeometryParams()
    if pres.torsion and k > 1 and not (geom.matrices and geom.offsets):
        raise ConstructionRejected("default geometry with torsion is only built for k = 1")
    arrangement = geom.arrangement or default_arrangement(pres)
    lam = geom.lam
    for attempt in range(12):
        if geom.matrices:
            mats = {g: np.asarray(m, float) for g, m in geom.matrices.items()}
            arcs = _arcs_from_matrices(pres, mats, k)
        else:
            mats, arcs = _layout(pres, arrangement, lam, k, geom.arc_fraction)
        rep = _assemble(pres, mats, geom.offsets or {})
        ok, table = verify_certificate(rep, arcs, k)
        if ok or geom.matrices:
            break
        lam *= 1.5
    cert = PingPongCertificate(k, sorted(arcs, key=lambda a: a.lo), table, ok)
    if not ok:
        bad = [t for t in table if not t.get("ok", False)][:3]
        raise ConstructionRejected(f"ping-pong inclusion failure: {bad}")
    rep = _fix_derived(rep)
    _check_torsion(rep)
    rep.certificate = cert
    rep.geometry = GeometryParams(arrangement, lam, geom.matrices, geom.offsets, geom.arc_fraction)
    return rep, cert


def _arcs_from_matrices(pres, mats, k):
    """Arcs around fixed points of user matrices (hyperbolic letters only)."""
    arcs = []
    pts = []
    for g in pres.generators:
        if g in pres.torsion:
            raise ConstructionRejected("user matrices with torsion need explicit arcs")
        f = ProjectiveLift(mats[g], k)
        w, V = np.linalg.eig(f.A)
        order = np.argsort(-np.abs(w.real))
        xs = [float((np.arctan2(V[1, i].real, V[0, i].real) % np.pi) / (np.pi * k)) for i in order]
        pts.append((g, xs[0], xs[1]))
    allp = sorted([p for _, a, b in pts for p in (a, b)])
    gaps = np.diff(allp + [allp[0] + 1 / k])
    r = 0.45 * float(np.min(gaps))
    for g, t, s in pts:
        arcs.append(Arc(t - r, t + r, ((g, 1),), g))
        arcs.append(Arc(s - r, s + r, ((g, -1),), g))
    return arcs


def _assemble(pres, mats, offsets):
    k = pres.k
    maps = {}
    for g in pres.generators:
        f = ProjectiveLift(mats[g], k, 0)
        if g in offsets:
            f = f.with_offset(int(offsets[g]))
        elif g in pres.c and g not in pres.torsion:
            f = f.with_offset(_fixing_offset(f))
        maps[g] = LiftedHomeo(f)
    return Representation(pres, maps, 0)


def _fixing_offset(f):
    """Offset making a hyperbolic lift fix the lifts of its fixed directions."""
    dirs = f.fixed_directions()
    if not dirs:
        raise ConstructionRejected("boundary letter is not hyperbolic")
    u = dirs[0]
    m = int(round((float(f(u)) - u) * f.k))
    return f.offset - m


def _fix_derived(rep):
    """Central shift for the derived boundary letter so it has fixed points."""
    pres = rep.pres
    w = pres.boundary[pres.derived]
    if pres.word_orientation(w) < 0:
        raise ConstructionRejected("derived boundary letter reverses orientation")
    xs = np.linspace(0, 1, 2001)
    d = rep.evaluate(w, xs) - xs
    lo, hi = float(d.min()), float(d.max())
    n = int(np.floor(hi))
    # need an integer e with -e in (lo, hi], i.e. displacement + e changes sign
    for e in (-n, -n + 1, -n - 1):
        if lo + e < 0 < hi + e or abs(lo + e) < 1e-12 or abs(hi + e) < 1e-12:
            return Representation(pres, rep.maps, e)
    raise ConstructionRejected(
        f"derived boundary letter {pres.derived} has no lift with fixed points in the "
        f"{pres.k}-fold cover (displacement range [{lo:.4f}, {hi:.4f}])")


def _check_torsion(rep):
    pres = rep.pres
    for d, alpha in pres.torsion.items():
        xs = np.linspace(0, 1, 101)
        v = rep.evaluate(((d, 1),) * alpha, xs) - xs
        if np.ptp(v) > 1e-9 or abs(v[0] - round(v[0])) > 1e-9:
            raise ConstructionRejected(f"torsion order of {d} is not realized in the {pres.k}-fold cover")


@dataclass
class TwistedPair:
    rho0: Representation
    rho0star: Representation


def twist(rho0):
    """rho0*: reversing generators are post-composed with tau_0."""
    pres = rho0.pres
    maps = {}
    for g, f in rho0.maps.items():
        if pres.orientation(g) < 0:
            maps[g] = LiftedHomeo(TauComposed(f.base, pres.k), f.overrides)
        else:
            maps[g] = f
    star = Representation(pres, maps, rho0.derived_shift, rho0.history)
    for attr in ("certificate", "geometry"):
        if hasattr(rho0, attr):
            setattr(star, attr, getattr(rho0, attr))
    return TwistedPair(rho0, star)


class TauComposed:
    """tau_0 o base."""

    def __init__(self, base, k):
        self.base, self.k = base, k
        self.orientation = base.orientation

    def __call__(self, x):
        return self.base(x) + 1.0 / self.k

    def inverse(self):
        inner = self.base.inverse()
        k = self.k

        class _Inv:
            orientation = inner.orientation

            def __call__(self, y):
                return inner(np.asarray(y, float) - 1.0 / k)

        return _Inv()

    def log_derivative(self, x):
        return self.base.log_derivative(x)

    def to_json(self):
        return {"type": "tauComposed", "base": self.base.to_json()}
