"""Hyperbolic modifications of a representation on a periodic gap of the minimal set."""
from dataclasses import dataclass, field
import numpy as np

from .presentation import power, word_str
from .circlemap import ConjTwist, GapTwist, InverseTwist, repr_f, _scan, _classify
from .fuchsian import ConstructionRejected
from .limitset import GAP_TOL, enumerate_gaps, representative_gaps, tighten_arcs

Q_GE_2 = "Q_GE_2"
Q1_GENUS_POS = "Q1_GENUS_POS"
Q1_DISK = "Q1_DISK"


class ProfileError(ValueError):
    pass


class BlowProfile:
    """Increasing self-map f0 of the closed gap [a, b] for its stabilizer (a repelling).

    Strict mode: f0 equals the stabilizer map gamma on collars [a, u] and
    [v, b] and is PL on [u, v] with the requested interior fixed points.
    """

    def __init__(self, gap, gamma, interior, collar, delta):
        self.gap = gap
        self.a, self.b = float(gap.lo), float(gap.hi)
        self.gamma = gamma
        self.interior = list(interior)       # (location, multiplier)
        self.u, self.v = collar
        self.delta = delta
        xs, ys = [self.u], [float(gamma(self.u))]
        for x, m in self.interior:
            xs += [x - delta, x, x + delta]
            ys += [x - m * delta, x, x + m * delta]
        xs.append(self.v)
        ys.append(float(gamma(self.v)))
        self.xs, self.ys = np.array(xs), np.array(ys)
        if np.any(np.diff(self.xs) <= 0) or np.any(np.diff(self.ys) <= 0):
            raise ProfileError("profile knots are not increasing; use smaller multipliers or spacing")

    def __call__(self, x):
        # h-equivariant: evaluated on the integer translate of the gap containing x
        x = np.asarray(x, float)
        n = np.floor(x - self.a)
        x = x - n
        y = np.interp(x, self.xs, self.ys)
        lo = x <= self.u
        hi = x >= self.v
        if np.any(lo | hi):
            g = self.gamma(np.where(lo | hi, x, self.u))
            y = np.where(lo | hi, g, y)
        return y + n

    def inv(self, y):
        y = np.asarray(y, float)
        n = np.floor(y - self.a)
        y = y - n
        x = np.interp(y, self.ys, self.xs)
        lo = y <= self.ys[0]
        hi = y >= self.ys[-1]
        if np.any(lo | hi):
            g = self.gamma.inv(np.where(lo | hi, y, self.ys[0]))
            x = np.where(lo | hi, g, x)
        return x + n

    @property
    def fixed_points(self):
        """Closed-gap fixed points with one-sided slopes (endpoint slopes from gamma)."""
        out = [(self.a, "repelling")]
        for x, m in self.interior:
            out.append((x, "attracting" if m < 1 else "repelling"))
        out.append((self.b, "attracting"))
        return out

    def slopes(self):
        return [(x, m, m) for x, m in self.interior]

    def to_json(self):
        return {"type": "blowProfile", "gap": [repr_f(self.a), repr_f(self.b)],
                "collar": [repr_f(self.u), repr_f(self.v)],
                "knots": [[repr_f(x), repr_f(y)] for x, y in zip(self.xs, self.ys)],
                "interiorFixedPoints": [{"location": repr_f(x), "multiplier": repr_f(m)}
                                        for x, m in self.interior]}


class StabilizerProfile:
    """The stabilizer map itself: the trivial modification."""

    def __init__(self, gamma):
        self.gamma = gamma

    def __call__(self, x):
        return self.gamma(x)

    def inv(self, y):
        return self.gamma.inv(y)

    def to_json(self):
        return {"type": "stabilizer"}


class InverseProfile:
    def __init__(self, inner):
        self.inner = inner

    def __call__(self, x):
        return self.inner.inv(x)

    def inv(self, y):
        return self.inner(y)

    def to_json(self):
        return {"type": "inverse", "of": self.inner.to_json()}


class TransportedProfile:
    """rho(u)^-1 o f0 o rho(u): a profile on gamma(I0) moved back to I0."""

    def __init__(self, rep, word, inner):
        self.rep, self.word, self.inner = rep, tuple(word), inner

    def __call__(self, x):
        return self.rep.evaluate_inverse(self.word, self.inner(self.rep.evaluate(self.word, x)))

    def inv(self, y):
        return self.rep.evaluate_inverse(self.word, self.inner.inv(self.rep.evaluate(self.word, y)))

    def to_json(self):
        return {"type": "transported", "word": word_str(self.word), "inner": self.inner.to_json()}


def _stab_map(rep, gap):
    return rep.map(gap.stabilizer)


def make_blow_profile(rep, gap, spec, collar_frac=0.5):
    """PL profile on `gap` with interior fixed points at relative positions.

    spec: list of (relative position in (0, 1), multiplier), multipliers
    alternating < 1, > 1 (attracting first, since the left endpoint repels).
    An empty spec gives a fixed-point-free push (the blow-down profile).
    """
    spec = [(float(p), float(m)) for p, m in spec]
    if len(spec) % 2:
        raise ProfileError("interior fixed-point count must be even")
    if any(m <= 0 for _, m in spec):
        raise ProfileError("multipliers must be positive")
    if any(abs(m - 1) < 1e-12 for _, m in spec):
        raise ProfileError("multiplier 1 is a neutral fixed point")
    pos = [p for p, _ in spec]
    if any(not 0 < p < 1 for p in pos) or any(np.diff(pos) <= 0):
        raise ProfileError("positions must be strictly increasing inside (0, 1)")
    for j, (_, m) in enumerate(spec):
        if (j % 2 == 0) != (m < 1):
            raise ProfileError("multipliers must alternate attracting (<1), repelling (>1)")
    gamma = _stab_map(rep, gap)
    a, b = float(gap.lo), float(gap.hi)
    L = b - a
    probe = a + 1e-3 * L
    if gamma(probe) <= probe:
        raise ProfileError("gap stabilizer must push rightward (left endpoint repelling)")
    interior = [(a + p * L, m) for p, m in spec]
    pts = [a] + [x for x, _ in interior] + [b]
    sep = np.min(np.diff(pts))
    mmax = max([1.0] + [m for _, m in spec])
    delta = 0.2 * sep / mmax
    # the collars must avoid interior fixed points of the current map too
    cur = [r.location for r in gap_fixed_points(rep, gap)[1:-1]]
    first, last = b, a
    if interior:
        first = interior[0][0] - interior[0][1] * delta
        last = interior[-1][0] + interior[-1][1] * delta
    if cur:
        first, last = min(first, cur[0]), max(last, cur[-1])
    if not interior and not cur:
        first = last = 0.5 * (a + b)
    # gamma(u) part way from a to the first knot; v symmetric near b
    u = float(gamma.inv(a + collar_frac * (first - a)))
    v = float(gamma(b - collar_frac * (b - last)))
    if interior:
        u = min(u, interior[0][0] - 2 * delta)
        v = max(v, interior[-1][0] + 2 * delta)
    return BlowProfile(gap, gamma, interior, (u, v), delta)


def stabilizer_profile(rep, gap):
    return StabilizerProfile(_stab_map(rep, gap))


# ---- the modification ----

@dataclass
class ModificationRecord:
    case: str
    generator: str
    orbit: tuple                  # (i, m)
    intervals: list               # I_0 ... I_{l-1}
    overrides: list               # [(lo, hi)] on the generator
    claim_ok: bool
    profile: object = None
    fixed: list = field(default_factory=list)

    def to_json(self):
        return {"case": self.case, "generator": self.generator, "gapOrbit": list(self.orbit),
                "intervals": [[repr_f(a), repr_f(b)] for a, b in self.intervals],
                "overrides": [[repr_f(a), repr_f(b)] for a, b in self.overrides],
                "claim": self.claim_ok,
                "profile": self.profile.to_json() if self.profile is not None else None}


def _interval(rep, w, I):
    y = rep.evaluate(w, np.array(I, float))
    return (float(min(y)), float(max(y)))


def _distinct_mod1(ivs, tol=GAP_TOL):
    for i in range(len(ivs)):
        for j in range(i + 1, len(ivs)):
            d = (ivs[i][0] - ivs[j][0]) % 1.0
            if min(d, 1 - d) <= tol:
                return False
    return True


def _same_mod1(I, J, tol=GAP_TOL):
    d = (I[0] - J[0]) % 1.0
    return min(d, 1 - d) <= tol


def _path_avoids(rep, w0, ivs, x, domains):
    """Letters of w' built from x never act on a modified domain along the path."""
    ell = len(w0)
    for j in range(ell - 1):
        g, e = w0[ell - 1 - j]          # s_{j+1}, applied to I_j
        if g != x:
            continue
        src = ivs[j] if e == 1 else _interval(rep, ((g, -1),), ivs[j])
        if any(_same_mod1(src, D) for D in domains):
            return False
    return True


def modify_on_gap(rep, gap, f0):
    """Return (rep', record) with rho'(stab) = f0 on the gap and rho' = rho off its orbit.

    The change is made on the orbit representative I0 (the gap of c_i or one of
    its 1/k translates); a conjugate gap is transported there by its address.
    """
    pres = rep.pres
    i = gap.boundary
    c = pres.c[i - 1]
    reps = getattr(rep, "gap_representatives", None)
    if gap.address:
        if reps is None:
            raise ConstructionRejected("conjugate gap given without representative data", "blowup")
        I0 = reps[gap.orbit_id]
        F = TransportedProfile(rep, gap.address, f0)
        sign = I0.stabilizer[0][1]
    else:
        I0 = gap
        F = f0
        st = pres.normal_form(gap.stabilizer)
        if st not in (pres.normal_form(((c, 1),)), pres.normal_form(((c, -1),))):
            raise ConstructionRejected("gap stabilizer is not a boundary letter or its conjugate", "blowup")
        sign = 1 if st == pres.normal_form(((c, 1),)) else -1
    if sign < 0:
        F = InverseProfile(F)       # profile for c_i itself
    I = (float(I0.lo), float(I0.hi))
    q = len(pres.c)
    if i < q:
        psi = GapTwist(rep, ((c, 1),), F)
        f = rep.maps[c].with_override(I[0], I[1], psi)
        rec = ModificationRecord(Q_GE_2, c, I0.orbit_id, [I], [I], True, f0)
        new = rep.replace(c, f, rec)
        _carry(rep, new)
        return new, rec
    w0 = pres.boundary[c]
    ell = len(w0)
    # I_j = rho(s_j ... s_1)(I0)
    ivs = [I]
    for j in range(1, ell):
        ivs.append(_interval(rep, w0[ell - j:], I))
    claim = _distinct_mod1(ivs)
    if not claim:
        raise ConstructionRejected("intervals I_0 ... I_(l-1) are not pairwise distinct", "blowup")
    x, e = w0[0]
    wp = w0[1:]
    J = ivs[-1]
    psi = ConjTwist(rep, wp, GapTwist(rep, ((c, 1),), F))
    overrides = []
    if e == 1:
        f = rep.maps[x].with_override(J[0], J[1], psi)
        overrides.append(J)
    else:
        Jp = _interval(rep, ((x, -1),), J)
        f = rep.maps[x].with_override(Jp[0], Jp[1], ConjTwist(rep, ((x, -1),), InverseTwist(psi)))
        overrides.append(Jp)
    if x in pres.torsion:
        case = Q1_DISK
        alpha = pres.torsion[x]
        orbit = [_interval(rep, power(((x, 1),), m), J) for m in range(alpha)]
        if not _distinct_mod1(orbit):
            raise ConstructionRejected("the torsion orbit of the modified interval collides", "blowup")
        K = orbit[-1]
        overrides.append(K)
        f = f.with_override(K[0], K[1], ConjTwist(rep, power(((x, 1),), alpha - 1), InverseTwist(psi)))
    else:
        case = Q_GE_2 if q >= 2 else Q1_GENUS_POS
    if not _path_avoids(rep, w0, ivs, x, overrides):
        raise ConstructionRejected("the path I_0 ... I_(l-2) meets a modified domain", "blowup")
    rec = ModificationRecord(case, x, I0.orbit_id, ivs, overrides, claim, f0)
    new = rep.replace(x, f, rec)
    _carry(rep, new)
    return new, rec


def _carry(old, new):
    for attr in ("certificate", "geometry", "gap_representatives", "gap_table", "tight_arcs"):
        if hasattr(old, attr):
            setattr(new, attr, getattr(old, attr))
    new.blown = dict(getattr(old, "blown", {}))


def attach_gaps(rep, msa, max_len=None):
    """Record the gap table, orbit representatives I_{i,m} and tight arcs on an unmodified rep."""
    rep.gap_representatives = representative_gaps(rep, msa)
    rep.gap_table = enumerate_gaps(msa, rep, max_len)
    rep.tight_arcs = tighten_arcs(rep.certificate, rep.gap_table)
    if not hasattr(rep, "blown"):
        rep.blown = {}
    return rep


def hyperbolic_blow_up(rep, plan):
    """Apply (orbit_id, spec) entries in order; spec as for make_blow_profile."""
    reps = rep.gap_representatives
    seen = set()
    for oid, spec in plan:
        oid = tuple(oid)
        if oid in seen:
            raise ConstructionRejected(f"gap orbit {oid} listed twice in the plan", "blowup")
        if oid not in reps:
            raise ConstructionRejected(f"unknown gap orbit {oid}", "blowup")
        seen.add(oid)
        gap = reps[oid]
        prof = make_blow_profile(rep, gap, spec)
        rep, _ = modify_on_gap(rep, gap, prof)
        rep.blown[oid] = prof
    return rep


def blow_down(rep, orbit_id):
    """Replace the action of the stabilizer on the gap orbit by a fixed-point-free push."""
    gap = rep.gap_representatives[tuple(orbit_id)]
    prof = make_blow_profile(rep, gap, [])
    new, _ = modify_on_gap(rep, gap, prof)
    new.blown.pop(tuple(orbit_id), None)
    return new


def gap_fixed_points(rep, gap, n_grid=4000):
    """Fixed points of the gap stabilizer on the closed gap, left to right."""
    f = rep.map(gap.stabilizer)
    L = gap.hi - gap.lo
    xs = np.linspace(gap.lo - 0.05 * L, gap.hi + 0.05 * L, n_grid + 1)

    def d(x):
        return f(x) - x

    pts = sorted(p for p in _scan(d, xs, 0.0) if gap.lo - 1e-9 <= p <= gap.hi + 1e-9)
    return [_classify(d, p, L / n_grid) for p in pts]
