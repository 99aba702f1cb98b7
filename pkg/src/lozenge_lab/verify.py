"""Property suites for representations and the planar model."""
from dataclasses import dataclass, field
import numpy as np

from .presentation import boundary_power, inverse, random_word, word_str
from .circlemap import fixed_points, check_alternation
from .limitset import sample_limit_points


@dataclass
class CheckResult:
    name: str
    passed: bool
    claim: str
    details: dict = field(default_factory=dict)
    mandatory: bool = True

    def to_json(self):
        return {"name": self.name, "passed": bool(self.passed), "claim": self.claim,
                "mandatory": self.mandatory, "details": _jsonable(self.details)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def _stab_residual(rep, g):
    """Displacement of the gap endpoints by the stabilizer, modulo the central translation."""
    d = rep.evaluate(g.stabilizer, np.array([g.lo, g.hi])) - [g.lo, g.hi]
    return float(np.max(np.abs(d - np.round(d))))


def blown_boundaries(rep):
    return sorted({i for i, _ in getattr(rep, "blown", {})})


def _sample_words(pres, rng, count, max_len):
    words = [((c, 1),) for c in pres.c]
    while len(words) < count:
        n = int(rng.integers(1, max_len + 1))
        words.append(random_word(pres, n, rng))
    return words


# ---- fixed points ----

def audit_fixed_points(rep, count=40, max_len=4, seed=0, extra=()):
    """Fixed points per period of sampled elements.

    Unmodified letters: none or 2k hyperbolic alternating points.  Excess is
    allowed only on elements conjugate to powers of modified gap stabilizers.
    """
    pres = rep.pres
    k = pres.k
    rng = np.random.default_rng(seed)
    words = _sample_words(pres, rng, count, max_len) + [tuple(w) for w in extra]
    blown = blown_boundaries(rep)
    rows, bad = [], []
    for w in words:
        f = rep.map(w)
        recs = fixed_points(f)
        n = len(recs)
        types = [r.type for r in recs]
        neutral = "neutral" in types
        bp = boundary_power(pres, w) if w else None
        allowed_excess = bp is not None and bp[0] in blown
        if f.orientation < 0:
            ok = n == 1 and not neutral
        elif n in (0, 2 * k):
            ok = not neutral and check_alternation(recs)
        else:
            ok = allowed_excess and not neutral and check_alternation(recs) and n > 2 * k
        rows.append({"word": word_str(w), "count": n, "types": types, "ok": ok})
        if not ok:
            bad.append(word_str(w))
    return CheckResult("fixedPointAudit", not bad,
                       "finitely many hyperbolic fixed points; excess only on modified gap stabilizers",
                       {"seed": seed, "samples": len(words), "failures": bad, "rows": rows})


def tau_orbits(recs, k, tol=1e-9):
    """Group fixed points into tau orbits (translates by 1/k)."""
    xs = sorted(r.location % (1.0 / k) for r in recs)
    groups = []
    for x in xs:
        if groups and abs(x - groups[-1][0]) < tol:
            groups[-1].append(x)
        else:
            groups.append([x])
    if len(groups) > 1 and abs(groups[0][0] + 1.0 / k - groups[-1][0]) < tol:
        groups[0] += groups.pop()
    return groups


# ---- (k)-convergence ----

def _period(rep):
    return 1.0 / rep.pres.k


def _repelling_point(rep, w, n=400):
    """Where rho(w)^-1 collapses the circle R / (1/k)Z."""
    P = _period(rep)
    grid = np.arange(n) / n * P
    y = np.mod(rep.evaluate_inverse(w, grid), P)
    ang = 2 * np.pi * y / P
    c = np.angle(np.mean(np.exp(1j * ang)))
    return (c % (2 * np.pi)) / (2 * np.pi) * P


def _image_arc(rep, w, lo, hi):
    """Length and left end of rho(w)([lo, hi]); reversing words flip the arc."""
    y = rep.evaluate(w, np.array([lo, hi]))
    return float(abs(y[1] - y[0])), float(min(y))


def contraction_profile(rep, w, radii=(0.2, 0.1, 0.05, 0.02, 0.01)):
    """Image diameters of nested compacta avoiding the repelling tau-orbit."""
    P = _period(rep)
    xm = _repelling_point(rep, w)
    out = []
    target = None
    for r in radii:
        lo, hi = xm + r * P, xm + (1 - r) * P
        d, y0 = _image_arc(rep, w, lo, hi)
        out.append(d / P)
        target = np.mod(y0 + 0.5 * d, P)
    return xm, target, out


def _circle_dist(a, b, P):
    d = abs(a - b) % P
    return min(d, P - d)


def check_k_convergence(rep, samples=100, length=20, seed=0, threshold=0.1, rate=0.95, msa=None):
    """Random length-`length` words contract compacta off the repelling orbit onto the attracting one."""
    pres = rep.pres
    rng = np.random.default_rng(seed)
    P = _period(rep)
    good, rows = 0, []
    swap_bad = 0
    for _ in range(samples):
        w = random_word(pres, length, rng)
        if rep.orientation(w) < 0:
            w = w + w[-1:]
            w = pres.normal_form(w)
        xm, xp, diams = contraction_profile(rep, w)
        ok = max(diams) < threshold
        xm2, xp2, diams2 = contraction_profile(rep, inverse(w))
        swap = _circle_dist(xp2, xm, P) < 1e-6 and _circle_dist(xm2, xp, P) < 1e-6
        in_mu = True
        if msa is not None:
            in_mu = bool(msa.membership(np.array([xp % 1.0]))[0] >= 0)
        ok = ok and in_mu
        swap_bad += not swap
        good += ok
        rows.append({"word": word_str(w), "diameters": diams, "swap": swap, "targetInMinimalSet": in_mu})
    frac = good / samples
    return CheckResult("kConvergence", frac >= rate and swap_bad == 0,
                       "compacta avoiding the repelling orbit contract onto the attracting orbit",
                       {"seed": seed, "samples": samples, "length": length, "passRate": frac,
                        "swapFailures": swap_bad, "rows": rows[:10]})


@dataclass
class ConvergenceVerdict:
    descriptor: str
    classification: str           # stationary | gapPowerCoset | contracting | UNCLASSIFIED
    repelling: float = None
    attracting: float = None
    factors: list = field(default_factory=list)

    def to_json(self):
        return {"sequence": self.descriptor, "classification": self.classification,
                "repelling": self.repelling, "attracting": self.attracting,
                "contractionFactors": list(self.factors)}


def classify_sequence(rep, seq, descriptor="", threshold=0.1):
    """Place a sequence of words in the almost-(k)-convergence trichotomy."""
    pres = rep.pres
    P = _period(rep)
    nfs = [pres.normal_form(w) for w in seq]
    if len(set(nfs)) <= max(1, len(seq) // 4):
        return ConvergenceVerdict(descriptor, "stationary")
    w1, w2 = nfs[-2], nfs[-1]
    xm, xp, d = contraction_profile(rep, w2)
    xm1, xp1, d1 = contraction_profile(rep, w1)
    if max(d) < threshold and _circle_dist(xp, xp1, P) < threshold * P:
        return ConvergenceVerdict(descriptor, "contracting", float(xm), float(xp), d)
    # gamma_n = g^(p_n) a: consecutive quotients are powers of one modified gap stabilizer
    blown = blown_boundaries(rep)
    hits = set()
    for u, v in zip(nfs[-4:-1], nfs[-3:]):
        q = pres.normal_form(v + inverse(u))
        bp = boundary_power(pres, q) if q else None
        if bp is None or bp[0] not in blown:
            return ConvergenceVerdict(descriptor, "UNCLASSIFIED")
        hits.add((bp[0], pres.normal_form(bp[2])))
    if len(hits) == 1:
        return ConvergenceVerdict(descriptor, "gapPowerCoset")
    return ConvergenceVerdict(descriptor, "UNCLASSIFIED")


def sample_sequences(rep, count=200, seed=0, length=20):
    """Mixed recipes: constant, prefixes of a random word, powers, stabilizer power cosets."""
    pres = rep.pres
    rng = np.random.default_rng(seed)
    out = []
    stabs = [((c, 1),) for c in pres.c]
    blown = blown_boundaries(rep)
    for j in range(count):
        kind = j % 4
        if kind == 0:
            w = random_word(pres, 5, rng)
            out.append((f"constant {word_str(w)}", [w] * 8))
        elif kind == 1:
            w = random_word(pres, length + 8, rng)
            out.append((f"prefixes of {word_str(w)}", [w[:n] for n in range(length, length + 8)]))
        elif kind == 2:
            g = random_word(pres, int(rng.integers(2, 5)), rng)
            g = pres.normal_form(g + g[:1]) if rep.orientation(g) < 0 else g
            out.append((f"powers of {word_str(g)}", [g * n for n in range(6, 14)]))
        else:
            i = blown[int(rng.integers(len(blown)))] if blown else int(rng.integers(1, len(pres.c) + 1))
            u = random_word(pres, int(rng.integers(0, 3)), rng)
            a = random_word(pres, int(rng.integers(0, 3)), rng)
            g = pres.normal_form(u + stabs[i - 1] + inverse(u))
            out.append((f"({word_str(g)})^n {word_str(a)}",
                        [pres.normal_form(g * n + a) for n in range(12, 20)]))
    return out


def check_almost_convergence(rep, count=200, seed=0):
    verdicts = [classify_sequence(rep, seq, d) for d, seq in sample_sequences(rep, count, seed)]
    counts = {}
    for v in verdicts:
        counts[v.classification] = counts.get(v.classification, 0) + 1
    return CheckResult("almostKConvergence", counts.get("UNCLASSIFIED", 0) == 0,
                       "every sampled sequence is stationary, a gap-stabilizer power coset, or contracting",
                       {"seed": seed, "counts": counts,
                        "unclassified": [v.descriptor for v in verdicts if v.classification == "UNCLASSIFIED"]}), verdicts


# ---- characterization conditions ----

def check_characterization_conditions(rep, seed=0, stab_len=6, n_points=12, n_words=60):
    pres = rep.pres
    k = pres.k
    rng = np.random.default_rng(seed)
    P = 1.0 / k
    out = {}
    # (1) gaps are periodic
    bad = []
    for g in rep.gap_table:
        if not g.stabilizer or _stab_residual(rep, g) > 1e-9:
            bad.append([g.lo, g.hi])
    out["periodicGaps"] = {"passed": not bad, "failures": bad}
    # (2) point stabilizers are trivial or cyclic
    words = pres.reduced_words(stab_len)[1:]
    pts = list(sample_limit_points(rep, n_points // 2, rng)) + [g.lo for g in rep.gap_table[:n_points // 2]]
    pts = np.array(pts)
    found = [[] for _ in pts]
    for w in words:
        y = rep.evaluate(w, pts)
        d = (y - pts) / P
        hit = np.abs(d - np.round(d)) < 1e-9 / P
        for j in np.nonzero(hit)[0]:
            found[j].append(w)
    cyc_bad = []
    for x, ws in zip(pts, found):
        if not ws:
            continue
        g0 = min(ws, key=len)
        for w in ws:
            if not any(pres.equal(w, g0 * n) or pres.equal(w, inverse(g0) * n) for n in range(1, stab_len + 1)):
                cyc_bad.append([float(x), word_str(w), word_str(g0)])
                break
    out["cyclicStabilizers"] = {"passed": not cyc_bad, "failures": cyc_bad, "searchDepth": stab_len}
    # (3) fixed sets: none, one orbit or two orbits
    sample = _sample_words(pres, rng, n_words, 4)
    sample += [((c, 1),) * 2 for c in pres.c]
    blown = blown_boundaries(rep)
    fx_bad, exact = [], True
    for w in sample:
        if rep.orientation(w) < 0:
            continue
        recs = fixed_points(rep.map(w))
        orbits = tau_orbits(recs, k)
        fails = len(orbits) > 2 or any("neutral" == r.type for r in recs)
        bp = boundary_power(pres, w)
        on_modified = bp is not None and bp[0] in blown
        exact &= fails == on_modified
        if fails:
            fx_bad.append(word_str(w))
    out["fixedSetAlternative"] = {"passed": not fx_bad, "failures": fx_bad,
                                  "failuresExactlyOnModifiedStabilizerPowers": bool(exact)}
    # (4) the orbit of a pair in U is discrete
    lp = sample_limit_points(rep, 2, rng)
    x, y = sorted(lp)
    if y - x >= P:
        y -= P * np.floor((y - x) / P)
    X = np.array([rep.evaluate(w, [x])[0] for w in words])
    Y = np.array([rep.evaluate(w, [y])[0] for w in words])
    n = np.floor((X - x) / P + 0.5)
    X, Y = X - n * P, Y - n * P
    dist = np.maximum(np.abs(X - x), np.abs(Y - y))
    dist = dist[dist > 1e-12]
    md = float(dist.min()) if len(dist) else np.inf
    out["discreteDiagonalOrbit"] = {"passed": md > 1e-6, "minReturn": md, "pair": [x, y]}
    passed = all(v["passed"] for v in out.values())
    return CheckResult("characterization", passed, "periodic gaps, cyclic stabilizers, fixed-set alternative, discrete pair orbit",
                       {"seed": seed, **out}, mandatory=False)


# ---- planar model ----

class CorruptedAlpha:
    """Proxy with a non-monotone alpha_1 (negative control)."""

    def __init__(self, space, amp=0.05, freq=40.0):
        self.space, self.amp, self.freq = space, amp, freq

    def __getattr__(self, name):
        return getattr(self.space, name)

    def alpha1(self, x, loc=None):
        x = np.atleast_1d(np.asarray(x, float))
        return self.space.alpha1(x, loc) + self.amp * np.sin(self.freq * 2 * np.pi * x)


def corner_points(space):
    pts = []
    for ch in space.chains():
        for c in ch.true_corners():
            pts.append(c)
    return pts


def check_axis_lemmas(space, n_pairs=10_000, n_top=1000, n_double=200, seed=0):
    rng = np.random.default_rng(seed)
    k = space.k
    P = 1.0 / k
    res = {}
    # monotonicity on ordered pairs and strict separation
    x = np.sort(rng.uniform(0, 1, n_pairs + 1))
    loc = space.locate(x)
    A, B = space.alpha1(x, loc), space.beta1(x, loc)
    da, db = np.diff(A), np.diff(B)
    res["monotone"] = {"passed": bool(np.all(da >= -1e-12) and np.all(db >= -1e-12)),
                       "worst": [float(da.min()), float(db.min())], "pairs": n_pairs}
    res["separation"] = {"passed": bool(np.all(A < B)), "minGap": float(np.min(B - A))}
    res["bounds"] = {"passed": bool(np.all(x <= A + 1e-12) and np.all(B <= x + P + 1e-12))}
    # every gap carries a stabilizer for both actions
    bad = []
    for g in space.gaps:
        for r in (space.rho1, space.rho2):
            if _stab_residual(r, g) > 1e-9:
                bad.append([g.lo, g.hi])
    res["periodicGaps"] = {"passed": not bad, "failures": bad}
    # top correspondence on pairs of the minimal set
    lp = sample_limit_points(space.rho0, 2 * n_top, rng)
    u, v = lp[:n_top], lp[n_top:]
    v = u + np.mod(v - u, P)
    keep = v - u > 1e-9
    u, v = u[keep], v[keep]
    tu, tv = u, space.alpha1_minus(v)
    inside = space.in_omega(tu, tv)
    pairs = np.round(np.stack([tu, tv], 1), 12)
    injective = len({tuple(p) for p in pairs}) == len({tuple(p) for p in np.round(np.stack([u, v], 1), 12)})
    cs = corner_points(space)
    cx = np.array([c[0] for c in cs])
    cy = np.array([c[1] for c in cs])
    onto = bool(np.all(space.in_omega(cx, space.alpha1_minus(cy))) and np.all((cx < cy) & (cy < cx + P)))
    res["top"] = {"passed": bool(np.all(inside) and injective and onto), "inOmega": int(inside.sum()),
                  "samples": int(len(u)), "injective": injective, "cornersHit": onto}
    # double identities next to corners
    ends = np.concatenate([cx, cy])
    near = sample_limit_points(space.rho0, n_double, rng)
    pts = np.concatenate([ends, near])[:n_double]
    r1 = space.alpha2_minus(space.beta1_plus(pts)) - pts
    r2 = space.beta2_plus(space.alpha1_minus(pts)) - pts
    worst = float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
    res["double"] = {"passed": worst < 1e-8, "residual": worst, "points": int(len(pts))}
    # (tau restricted to the minimal set)^k = h
    t = lp.copy()
    for _ in range(k):
        t = space.beta1_plus(t)
    r = float(np.max(np.abs(t - (lp + 1))))
    res["tauPower"] = {"passed": r < 1e-8, "residual": r}
    passed = all(v["passed"] for v in res.values())
    return CheckResult("axisLemmas", passed, "monotone separated boundary maps, periodic gaps, top bijection, double identities",
                       {"seed": seed, **res})


def check_boundary_maps(space, n=1000, n_words=20, seed=0):
    """Equivariance of alpha_1 and beta_1."""
    rng = np.random.default_rng(seed)
    pres = space.rho0.pres
    x = rng.uniform(0, 1, n)
    A, B = space.alpha1_minus(x), space.beta1_plus(x)
    worst = 0.0
    for _ in range(n_words):
        w = random_word(pres, int(rng.integers(1, 5)), rng)
        x1 = space.rho1.evaluate(w, x)
        worst = max(worst, np.max(np.abs(space.rho2.evaluate(w, A) - space.alpha1_minus(x1))),
                    np.max(np.abs(space.rho2.evaluate(w, B) - space.beta1_plus(x1))))
    return CheckResult("boundaryMapEquivariance", worst < 1e-7, "rho2(g) alpha_1 = alpha_1 rho1(g), same for beta_1",
                       {"seed": seed, "residual": float(worst)})


def check_semiconjugacies(space, n=1000, n_words=20, n_omega=10_000, n_tri=200, seed=0):
    rng = np.random.default_rng(seed)
    pres = space.rho0.pres
    k = space.k
    P = 1.0 / k
    res = {}
    x = rng.uniform(0, 1, n)
    p1, p2 = space.phi1(x), space.phi2(x)
    worst = 0.0
    for _ in range(n_words):
        w = random_word(pres, int(rng.integers(1, 5)), rng)
        e1 = np.abs(space.rho0.evaluate(w, p1) - space.phi1(space.rho1.evaluate(w, x)))
        e2 = np.abs(space.rho0star.evaluate(w, p2) - space.phi2(space.rho2.evaluate(w, x)))
        worst = max(worst, e1.max(), e2.max())
    res["equivariance"] = {"passed": worst < 1e-7, "residual": float(worst), "samples": n, "elements": n_words}
    # phi2 o alpha1 = phi1 on gap samples
    xs = x[space.locate(x)[0]][:n_tri]
    r = float(np.max(np.abs(space.phi2(space.alpha1(xs)) - space.phi1(xs)))) if len(xs) else 0.0
    res["lowerBoundary"] = {"passed": r < 1e-8, "residual": r}
    # chi(Omega) inside Omega_0
    xo = rng.uniform(0, 1, n_omega)
    loc = space.locate(xo)
    A, B = space.alpha1(xo, loc), space.beta1(xo, loc)
    yo = A + rng.uniform(0, 1, n_omega) * (B - A)
    ok = (yo > A) & (yo < B)
    X, Y = space.phi1(xo[ok], ), space.phi2(yo[ok])
    inside = (X <= Y) & (Y <= X + P)
    res["chiInOmega0"] = {"passed": bool(np.all(inside)), "samples": int(ok.sum()),
                          "strict": int(np.sum((X < Y) & (Y < X + P)))}
    # triangle dichotomy on every representative gap
    tri = {}
    for oid, pc in sorted(space.pieces.items()):
        a, b = pc.gap.lo, pc.gap.hi
        ta = a + P
        u = np.linspace(a, b, 41)[1:-1]
        bu = space.beta1(u)
        uu = np.repeat(u, 5)
        vv = ta + np.tile(np.linspace(0, 1, 5), len(u)) * (np.repeat(bu, 5) - ta)
        X, Y = space.phi1(uu), space.phi2(vv)
        modified = pc.modified1 or pc.modified2_next
        if modified:
            hor = (np.abs(Y - ta) < 1e-8) & (X >= a - 1e-8) & (X <= b + 1e-8)
            ver = (np.abs(X - b) < 1e-8) & (Y >= ta - 1e-8) & (Y <= b + P + 1e-8)
            ok = bool(np.all(hor | ver))
        else:
            ok = bool(np.all((X >= a - 1e-12) & (X <= b + 1e-12) & (Y >= ta - 1e-12) & (Y <= X + P + 1e-12)))
        tri[str(oid)] = {"modified": modified, "passed": ok}
    res["triangleDichotomy"] = {"passed": all(v["passed"] for v in tri.values()), "gaps": tri}
    passed = all(v["passed"] for v in res.values())
    return CheckResult("semiconjugacies", passed, "phi equivariance, chi(Omega) in Omega_0, triangle dichotomy",
                       {"seed": seed, **res})


def check_plane_action(space, n=1000, n_words=10, seed=0):
    rng = np.random.default_rng(seed)
    pres = space.rho0.pres
    x = rng.uniform(0, 1, n)
    loc = space.locate(x)
    A, B = space.alpha1(x, loc), space.beta1(x, loc)
    y = A + rng.uniform(0.01, 0.99, n) * (B - A)
    bad = 0
    for _ in range(n_words):
        w = random_word(pres, int(rng.integers(1, 5)), rng)
        X, Y = space.act_plane(w, x, y)
        bad += int(np.sum(~space.in_omega(X, Y)))
    X, Y = space.act_plane((("h", 1),), x, y)
    shift = float(max(np.max(np.abs(X - x - 1)), np.max(np.abs(Y - y - 1))))
    return CheckResult("planeAction", bad == 0 and shift < 1e-12, "the plane action preserves Omega",
                       {"seed": seed, "escapes": bad, "hShift": shift})


def check_flow_cocycle(space, n=50, seed=0):
    rng = np.random.default_rng(seed)
    pres = space.rho0.pres
    worst, flagged = 0.0, 0
    for _ in range(n):
        g = random_word(pres, int(rng.integers(1, 4)), rng)
        d = random_word(pres, int(rng.integers(1, 4)), rng)
        x = rng.uniform(0, 1, 1)
        loc = space.locate(x)
        A, B = space.alpha1(x, loc), space.beta1(x, loc)
        y = A + rng.uniform(0.05, 0.95) * (B - A)
        m = rng.normal(size=1)
        x1, y1, m1, f1 = space.act_flow(d, x, y, m)
        x2, y2, m2, f2 = space.act_flow(g, x1, y1, m1)
        x3, y3, m3, f3 = space.act_flow(g + d, x, y, m)
        flagged += int(f1[0] or f2[0] or f3[0])
        worst = max(worst, abs(x3[0] - x2[0]), abs(y3[0] - y2[0]), abs(m3[0] - m2[0]))
    xs = np.array([0.3])
    h = space.act_flow((("h", 1),), xs, xs + 0.1, np.array([0.7]))
    return CheckResult("flowCocycle", worst < 1e-6 and h[2][0] == 0.7, "act(g d) = act(g) act(d) on the line bundle",
                       {"seed": seed, "residual": float(worst), "flagged": flagged, "hKeepsFiber": bool(h[2][0] == 0.7)})


def side_is_gap(space, lo, hi, tol=1e-9):
    for g in space.gaps:
        n = np.round(lo - g.lo)
        if abs(g.lo + n - lo) < tol and abs(g.hi + n - hi) < tol:
            return True
    return False


def check_chains(space, expected=None):
    """Exactly one side of each generalized lozenge is a gap; horizontal gap iff exit; labels alternate."""
    rows, ok = [], True
    counts = {}
    for ch in space.chains():
        labels = [l.label for l in ch.lozenges]
        alt = all(labels[j] != labels[(j + 1) % len(labels)] for j in range(len(labels)))
        ok &= alt
        for l in ch.lozenges:
            hx, hy = side_is_gap(space, *l.x), side_is_gap(space, *l.y)
            good = (hx != hy) and ((hx and l.label == "exit") or (hy and l.label == "entrance"))
            ok &= good
            rows.append({"boundary": ch.boundary, "x": list(l.x), "y": list(l.y),
                         "label": l.label, "xGap": hx, "yGap": hy, "ok": good})
        counts[ch.boundary] = ch.elementary_count()
    if expected is not None:
        ok &= counts == expected
    return CheckResult("chains", bool(ok), "one gap side per lozenge; horizontal gap side means exit",
                       {"elementaryCounts": counts, "expected": expected, "rows": rows})


def sample_plane(space, n, rng):
    x = rng.uniform(0, 1, n)
    y = x + rng.uniform(-0.1, 1.0 / space.k + 0.1, n)
    return x, y


def check_core_invariance(space, other, n=10_000, seed=0):
    rng = np.random.default_rng(seed)
    x, y = sample_plane(space, n, rng)
    v1, _ = space.core_membership(x, y)
    v2, _ = other.core_membership(x, y)
    diff = int(np.sum(v1 != v2))
    counts = {s: int(np.sum(v1 == s)) for s in ("core", "triangle", "outside")}
    return CheckResult("coreInvariance", diff == 0, "the core region does not depend on the conjugacy choices",
                       {"seed": seed, "samples": n, "disagreements": diff, "counts": counts,
                        "seeds": [space.seed, other.seed]})
