"""Minimal invariant set: certified interval covers, gaps and their stabilizers."""
from dataclasses import dataclass, field
import warnings
import numpy as np

from .presentation import boundary_power, inverse, word_str
from .circlemap import fixed_points, repr_f

GAP_TOL = 1e-9


@dataclass
class Piece:
    lo: float
    hi: float
    word: tuple        # w with piece = rho(w)(X_last)
    last: object       # the arc X_last (fuchsian.Arc)


@dataclass
class MinimalSetApprox:
    depth: int
    cover: np.ndarray           # (n, 2) sorted disjoint intervals in [0, 1) (may poke past 1)
    pieces: list
    k: int
    inner_points: list = field(default_factory=list)
    eps_min: float = 0.0

    def total_length(self):
        return float(np.sum(self.cover[:, 1] - self.cover[:, 0]))

    def membership(self, x, eps=1e-12):
        """+1 inside the cover, -1 outside, 0 within eps of an endpoint."""
        x = np.atleast_1d(np.asarray(x, float))
        r = x - np.floor(x)
        out = np.full(x.shape, -1)
        for lo, hi in self.cover:
            for s in (-1.0, 0.0, 1.0):
                a, b = lo + s, hi + s
                inside = (r > a + eps) & (r < b - eps)
                edge = (np.abs(r - a) <= eps) | (np.abs(r - b) <= eps)
                out = np.where(inside, 1, np.where(edge & (out < 1), 0, out))
        return out

    def intervals_in(self, a, b):
        """Cover intervals (lifted) fully inside ]a, b[."""
        out = []
        n0 = int(np.floor(a)) - 1
        for n in range(n0, int(np.ceil(b)) + 1):
            for lo, hi in self.cover:
                if lo + n > a and hi + n < b:
                    out.append((lo + n, hi + n))
        return out

    def to_json(self):
        return {"depth": self.depth, "k": self.k,
                "cover": [[repr_f(a), repr_f(b)] for a, b in self.cover]}


def _normalize(lo, hi):
    n = np.floor(lo)
    return lo - n, hi - n


def _children(rep, cert_arcs, piece):
    """Depth+1 pieces inside a piece: rho(w mu)(X_nu) for every nu that may follow mu."""
    mu = piece.last
    w = piece.word + mu.letter
    tors = rep.pres.torsion
    srcs = [a for a in cert_arcs
            if a.family != mu.family or (mu.family not in tors and a.letter == mu.letter)]
    ends = np.array([[a.lo, a.hi] for a in srcs]).ravel()
    img = rep.evaluate(w, ends).reshape(-1, 2)
    out = []
    for a, (y0, y1) in zip(srcs, img):
        lo, hi = (y0, y1) if y0 <= y1 else (y1, y0)
        out.append(Piece(lo, hi, w, a))
    return out


def compute_minimal_set(rep, depth=5, eps_min=0.0, cert=None, arcs=None):
    """Depth-th refinement of the base arcs (tight arcs once a gap table is attached)."""
    cert = cert or rep.certificate
    k = cert.k
    base = arcs or getattr(rep, "tight_arcs", None) or cert.arcs
    pieces = [Piece(a.lo, a.hi, (), a) for a in base]
    for level in range(depth):
        nxt = []
        for p in pieces:
            nxt.extend(_children(rep, base, p))
        if nxt and min(p.hi - p.lo for p in nxt) < 1e-14:
            warnings.warn(f"cover truncated at depth {level}: intervals below 1e-14")
            depth = level
            break
        pieces = nxt
    # one period of RP^1 refined; the other k-1 are its tau translates
    allp = [Piece(p.lo + m / k, p.hi + m / k, (("t", 1),) * m + p.word, p.last)
            for m in range(k) for p in pieces]
    iv = np.array(sorted(_normalize(p.lo, p.hi) for p in allp))
    return MinimalSetApprox(depth, iv, allp, k, eps_min=eps_min)


def is_gap(msa, a, b, rel=1e-3):
    """No cover interval fits strictly inside ]a, b[ (shrunk by rel of its length)."""
    m = rel * (b - a)
    return len(msa.intervals_in(a + m, b - m)) == 0


def peripheral_gap(rep, msa, word):
    """For a boundary word, the complementary interval of its fixed points that is a gap."""
    recs = fixed_points(rep.map(word), 0.0)
    xs = [r.location for r in recs]
    if not xs:
        return None
    out = []
    for i, u in enumerate(xs):
        v = xs[i + 1] if i + 1 < len(xs) else xs[0] + 1
        if is_gap(msa, u, v):
            out.append((u, v))
    return out


# ---- gaps ----

@dataclass
class Gap:
    lo: float
    hi: float
    boundary: int              # i: stabilizer conjugate to c_i
    orbit: int                 # m: tau-translate class of the representative, 0 <= m < k
    stabilizer: tuple          # word with translation number 0, lo repelling, hi attracting
    address: tuple             # rho(address) maps the representative gap onto this one
    blown: bool = False
    profile_fixed_points: list = field(default_factory=list)

    @property
    def orbit_id(self):
        return (self.boundary, self.orbit)

    def contains(self, x):
        return self.lo < x < self.hi

    def to_json(self):
        return {"interval": [repr_f(self.lo), repr_f(self.hi)], "boundary": self.boundary,
                "gapOrbit": self.orbit, "stabilizer": word_str(self.stabilizer),
                "address": word_str(self.address), "blown": self.blown,
                "profileFixedPoints": [repr_f(v) for v in self.profile_fixed_points]}


class UnresolvedGap(RuntimeError):
    pass


def _shift_word(n):
    return (("h", 1 if n > 0 else -1),) * abs(int(n))


def representative_gaps(rep, msa):
    """{(i, m): Gap} with I_{i,m} = I_{i,0} + m/k, I_{i,0} the first gap of c_i in [0, 1)."""
    pres = rep.pres
    k = pres.k
    out = {}
    for i, c in enumerate(pres.c, start=1):
        w = ((c, 1),)
        recs = fixed_points(rep.map(w), 0.0)
        xs = [r.location for r in recs]
        gaps = []
        for j, u in enumerate(xs):
            v = xs[j + 1] if j + 1 < len(xs) else xs[0] + 1
            if is_gap(msa, u, v):
                gaps.append((u, v, recs[j].type))
        if len(gaps) != k:
            raise UnresolvedGap(f"boundary letter {c}: found {len(gaps)} peripheral gaps per period, expected {k}")
        lo, hi, typ = min(gaps)
        s = 1 if typ == "repelling" else -1
        for m in range(k):
            a = lo + m / k
            n = np.floor(a)
            out[(i, m)] = Gap(a - n, hi + m / k - n, i, m, ((c, s),), ())
    return out


def gap_image(rep, word, gap):
    y = rep.evaluate(word, np.array([gap.lo, gap.hi]))
    return float(min(y)), float(max(y))


def _key(lo):
    return int(np.floor(lo / GAP_TOL + 0.5))


def enumerate_gaps(msa, rep, max_len=None):
    """Gaps rho(w)(I_{i,m}) for reduced words |w| <= max_len, sorted by left endpoint in [0, 1).

    The first word found (BFS, lexicographic ties) is the address.  The
    default length reaches every gap meeting a free arc of the certificate.
    """
    pres = rep.pres
    if max_len is None:
        max_len = max(3, max(len(w) for w in pres.boundary.values()) // 2 + 1)
    reps = representative_gaps(rep, msa)
    found = []
    seen = set()
    per = _key(1.0)
    for w in pres.reduced_words(max_len):
        for (i, m), g in reps.items():
            lo, hi = gap_image(rep, w, g)
            n = np.floor(lo)
            lo, hi = lo - n, hi - n
            kk = _key(lo) % per
            if any((kk + d) % per in seen for d in (-1, 0, 1)):
                continue
            seen.add(kk)
            s = g.stabilizer[0][1] * rep.orientation(w)
            stab = pres.normal_form(w + ((pres.c[i - 1], s),) + inverse(w))
            found.append(Gap(lo, hi, i, m, stab, _shift_word(-n) + w))
    found.sort(key=lambda g: g.lo)
    return found


def top_level_gaps(cert, gaps):
    """The gap containing each free arc; entry j follows the j-th arc in sorted order."""
    arcs = sorted(cert.all_arcs(), key=lambda a: a.lo)
    out = []
    for a, b in zip(arcs, arcs[1:] + arcs[:1]):
        hi = b.lo + (1 if b.lo < a.hi else 0)
        mid = 0.5 * (a.hi + hi)
        mid -= np.floor(mid)
        hit = [g for g in gaps if g.contains(mid) or g.contains(mid + 1)]
        if len(hit) != 1:
            raise UnresolvedGap(f"free arc at {mid:.6f} is not covered by an enumerated gap")
        out.append(hit[0])
    return out


def tighten_arcs(cert, gaps):
    """Base arcs shrunk to the hull of the minimal set inside them.

    Their endpoints are gap endpoints, hence points of the minimal set, so any
    representation agreeing with rho on the minimal set refines them identically.
    """
    from .fuchsian import Arc
    arcs = sorted(cert.all_arcs(), key=lambda a: a.lo)
    top = top_level_gaps(cert, gaps)
    tight = []
    for j, a in enumerate(arcs):
        gl, gr = top[j - 1], top[j]
        lo = gl.hi + np.round(a.lo - gl.hi)
        hi = gr.lo + np.round(a.hi - gr.lo)
        tight.append(Arc(float(lo), float(hi), a.letter, a.family))
    out = []
    for b in cert.arcs:
        c = 0.5 * (b.lo + b.hi)
        out.append(min(tight, key=lambda t: abs(0.5 * (t.lo + t.hi) - c)))
    return out


def check_dichotomy(rep, gaps, tol=GAP_TOL):
    """Generator images of enumerated gaps are enumerated gaps or disjoint from all of them."""
    bad = []
    los = np.array([g.lo for g in gaps])
    his = np.array([g.hi for g in gaps])
    los = np.concatenate([los - 1, los, los + 1])
    his = np.concatenate([his - 1, his, his + 1])
    for g in gaps:
        for s in rep.pres.generators:
            for e in (1, -1):
                lo, hi = gap_image(rep, ((s, e),), g)
                n = np.floor(lo)
                lo, hi = lo - n, hi - n
                j = np.searchsorted(los, lo)
                for t in (j - 1, j):
                    a, b = los[t], his[t]
                    same = abs(a - lo) < tol and abs(b - hi) < tol
                    overlap = min(b, hi) - max(a, lo) > tol
                    if overlap and not same:
                        bad.append((g, (s, e), (a, b)))
    return bad


# ---- locating points in gaps ----

class GapLocator:
    """Find, for x in R, a word g and a representative gap I with x in rho(g)(I).

    Points are pulled back through the ping-pong arcs until they land in a
    top-level gap; points that never do are reported as (numerically) in the
    minimal set.
    """

    def __init__(self, rep, cert, gaps, reps, max_iter=80, max_expansion=1e10):
        self.rep = rep
        self.k = cert.k
        self.arcs = sorted(cert.all_arcs(), key=lambda a: a.lo)
        self.reps = reps
        self.top = top_level_gaps(cert, gaps)
        self.max_iter = max_iter
        # beyond this accumulated expansion the pulled-back point is noise;
        # the point is within ~1/max_expansion of the minimal set
        self.max_log = np.log(max_expansion)

    def locate(self, x):
        """Return (found mask, list of (orbit_id, word) or None)."""
        x = np.atleast_1d(np.asarray(x, float)).copy()
        words = [[] for _ in x]
        res = [None] * len(x)
        active = np.ones(len(x), bool)
        logexp = np.zeros(len(x))
        for _ in range(self.max_iter):
            idx = np.nonzero(active)[0]
            if len(idx) == 0:
                break
            y = x[idx]
            for g in self.top:
                n = np.floor(y - g.lo)
                r = y - n
                m = (r > g.lo) & (r < g.hi) & active[idx]
                for j in np.nonzero(m)[0]:
                    t = idx[j]
                    res[t] = (g.orbit_id, tuple(words[t]) + _shift_word(n[j]) + g.address)
                    active[t] = False
            idx = np.nonzero(active)[0]
            if len(idx) == 0:
                break
            y = x[idx]
            moved = np.zeros(len(idx), bool)
            for a in self.arcs:
                n = np.floor(y - a.lo)
                r = y - n
                m = (r >= a.lo) & (r <= a.hi) & ~moved
                if np.any(m):
                    sel = idx[m]
                    logexp[sel] += self.rep.log_derivative(inverse(a.letter), x[sel])
                    x[sel] = self.rep.evaluate_inverse(a.letter, x[sel])
                    for t in sel:
                        words[t].extend(a.letter)
                    moved |= m
            active[idx[~moved]] = False   # neither in an arc nor a top gap: numerical edge
            active &= logexp < self.max_log
        found = np.array([r is not None for r in res])
        return found, res

    def gap_of(self, x):
        """Endpoints (lo, hi) of the gap containing x, or None."""
        found, res = self.locate([x])
        if not found[0]:
            return None
        oid, w = res[0]
        return gap_image(self.rep, w, self.reps[oid])


def sample_limit_points(rep, n, rng, length=10):
    """Attracting fixed points of random reduced words: exact points of the minimal set.

    Peripheral words (conjugates of boundary powers) are skipped, since their
    fixed points are gap endpoints and rounding may put them inside the gap.
    """
    pres = rep.pres
    k = pres.k
    letters = [(g, e) for g in pres.generators for e in (1, -1)]
    out = []
    while len(out) < n:
        w = []
        while len(w) < length:
            l = letters[rng.integers(len(letters))]
            if w and (w[-1] == (l[0], -l[1]) or (l[0] in pres.torsion and w[-1][0] == l[0])):
                continue
            w.append(l)
        if boundary_power(pres, tuple(w)) is not None:
            continue
        M = np.eye(2)
        for g, e in w:
            A = rep.maps[g].base.A
            M = M @ (A if e == 1 else np.linalg.inv(A))
        ev, V = np.linalg.eig(M)
        if abs(abs(ev[0]) - abs(ev[1])) < 1e-6 or np.iscomplexobj(ev) and np.any(np.abs(ev.imag) > 0):
            continue
        v = V[:, int(np.argmax(np.abs(ev)))].real
        th = np.arctan2(v[1], v[0]) % np.pi
        x = th / (np.pi * k) + rng.integers(k) / k
        out.append(x - np.floor(x))
    return np.array(out)


class TauRestriction:
    """x -> x + 1/k on the cover of the minimal set."""

    def __init__(self, msa):
        self.msa = msa
        self.k = msa.k

    def __call__(self, x):
        return np.asarray(x, float) + 1.0 / self.k

    def power(self, n, x):
        return np.asarray(x, float) + n / self.k

    def cover_residual(self):
        """Max endpoint mismatch between the cover and its 1/k translate."""
        cov = self.msa.cover
        sh = cov + 1.0 / self.k
        sh = sh - np.floor(sh[:, :1])
        sh = sh[np.argsort(sh[:, 0])]
        if len(sh) != len(cov):
            return np.inf
        return float(np.max(np.abs(sh - cov)))

    def equivariance_residual(self, rep, w, xs):
        """max |rho(w)(x + 1/k) - rho(w)(x) - o(w)/k| over xs."""
        o = rep.orientation(w)
        return float(np.max(np.abs(rep.evaluate(w, xs + 1.0 / self.k) - rep.evaluate(w, xs) - o / self.k)))


def tau_restriction(msa):
    return TauRestriction(msa)
