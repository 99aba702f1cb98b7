"""Orbifold group presentations and word arithmetic.

Words are tuples of letters (gen, e) with e = +1 or -1, read left to right.
As maps a word s_l ... s_1 acts by applying s_1 first.
"""
from dataclasses import dataclass
from fractions import Fraction
import re


class SignatureError(ValueError):
    pass


class UnknownGenerator(KeyError):
    pass


@dataclass(frozen=True)
class OrbifoldSignature:
    genus: int = 0
    orientable: bool = True
    cone_orders: tuple = ()
    boundary_count: int = 1
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "cone_orders", tuple(int(a) for a in self.cone_orders))

    def euler_characteristic(self):
        g, q = self.genus, self.boundary_count
        chi = Fraction(2 - 2 * g - q) if self.orientable else Fraction(2 - g - q)
        for a in self.cone_orders:
            chi -= 1 - Fraction(1, a)
        return chi

    def validate(self):
        if self.genus < 0:
            raise SignatureError("genus must be nonnegative")
        if not self.orientable and self.genus < 1:
            raise SignatureError("a non-orientable orbifold needs at least one cross-cap")
        if self.boundary_count < 1:
            raise SignatureError("q >= 1 is required: only orbifolds with boundary are handled")
        if self.k < 1:
            raise SignatureError("cover degree k must be >= 1")
        if any(a < 2 for a in self.cone_orders):
            raise SignatureError("cone orders must be >= 2")
        chi = self.euler_characteristic()
        if chi >= 0:
            raise SignatureError(
                f"Euler characteristic {chi} is not negative: the group is elementary "
                "(virtually abelian), no convex-cocompact hyperbolic action")
        return self

    def to_json(self):
        return {"genus": self.genus, "orientable": self.orientable,
                "coneOrders": list(self.cone_orders),
                "boundaryCount": self.boundary_count, "k": self.k}

    @classmethod
    def from_json(cls, d):
        return cls(genus=int(d.get("genus", 0)), orientable=bool(d.get("orientable", True)),
                   cone_orders=tuple(d.get("coneOrders", d.get("cone_orders", ()))),
                   boundary_count=int(d.get("boundaryCount", d.get("boundary_count", 1))),
                   k=int(d.get("k", 1)))


# ---- words ----

def inverse(w):
    return tuple((g, -e) for g, e in reversed(w))


def power(w, n):
    if n < 0:
        return inverse(w) * (-n)
    return tuple(w) * n


def word_str(w):
    if not w:
        return "1"
    out = []
    for g, e in w:
        out.append(g if e == 1 else g + "^-1")
    return " ".join(out)


_tok = re.compile(r"([A-Za-z]+\d*)(?:\^(-?\d+))?")


def parse_word(s):
    """Parse 'a1 b1 a1^-1' (exponents may be any nonzero integer)."""
    s = s.strip()
    if s in ("", "1"):
        return ()
    w = []
    for tok in s.replace("*", " ").split():
        m = _tok.fullmatch(tok)
        if m is None:
            raise ValueError(f"bad token {tok!r}")
        n = int(m.group(2)) if m.group(2) else 1
        e = 1 if n > 0 else -1
        w.extend([(m.group(1), e)] * abs(n))
    return tuple(w)


def syllables(w):
    out = []
    for g, e in w:
        if out and out[-1][0] == g:
            out[-1][1] += e
        else:
            out.append([g, e])
    return out


class Presentation:
    """Generators, relations and boundary letters of the orbifold group."""

    def __init__(self, sig):
        sig.validate()
        self.sig = sig
        g, p, q = sig.genus, len(sig.cone_orders), sig.boundary_count
        self.a = [f"a{i}" for i in range(1, g + 1)]
        self.b = [f"b{i}" for i in range(1, g + 1)] if sig.orientable else []
        self.d = [f"d{j}" for j in range(1, p + 1)]
        self.c = [f"c{i}" for i in range(1, q + 1)]
        self.torsion = {f"d{j + 1}": a for j, a in enumerate(sig.cone_orders)}
        self.derived = self.c[-1]
        gens = []
        if sig.orientable:
            for ai, bi in zip(self.a, self.b):
                gens += [ai, bi]
        else:
            gens += self.a
        gens += self.d + self.c[:-1]
        self.generators = gens            # free-product generators
        self.alphabet = gens + [self.derived]
        self._long_rhs = self._surface_word()
        self.boundary = {c: self._boundary(i + 1) for i, c in enumerate(self.c)}

    @property
    def k(self):
        return self.sig.k

    def _surface_word(self):
        w = []
        if self.sig.orientable:
            for ai, bi in zip(self.a, self.b):
                w += [(ai, 1), (bi, 1), (ai, -1), (bi, -1)]
        else:
            for ai in self.a:
                w += [(ai, 1), (ai, 1)]
        w += [(dj, 1) for dj in self.d]
        return tuple(w)

    def _boundary(self, i):
        q = len(self.c)
        if i < q:
            return ((self.c[i - 1], 1),)
        head = tuple((self.c[j], -1) for j in range(q - 2, -1, -1))
        return self.normal_form(head + self._long_rhs, expand=False)

    def orientation(self, gen):
        if gen in ("h", "t"):
            return 1
        if not self.sig.orientable and gen in self.a:
            return -1
        if gen == self.derived:
            return self.word_orientation(self.boundary[gen])
        if gen not in self.alphabet:
            raise UnknownGenerator(gen)
        return 1

    def word_orientation(self, w):
        s = 1
        for g, e in w:
            s *= self.orientation(g)
        return s

    def relations(self):
        rels = [((dj, 1),) * a for dj, a in self.torsion.items()]
        long_lhs = tuple((c, 1) for c in self.c)
        rels.append(long_lhs + inverse(self._long_rhs))
        return rels

    def normal_form(self, w, expand=True):
        """Free-product normal form; torsion runs reduced to exponent in [1, alpha-1]."""
        flat = []
        for g, e in w:
            if g == self.derived and expand:
                flat.extend(self.boundary[g] if e == 1 else inverse(self.boundary[g]))
            elif g in self.alphabet:
                flat.append((g, e))
            else:
                raise UnknownGenerator(g)
        stack = []   # syllables [gen, exponent]
        for g, e in flat:
            if stack and stack[-1][0] == g:
                stack[-1][1] += e
                n = stack[-1][1]
                if g in self.torsion:
                    n %= self.torsion[g]
                    stack[-1][1] = n
                if n == 0:
                    stack.pop()
            else:
                n = e % self.torsion[g] if g in self.torsion else e
                stack.append([g, n])
        out = []
        for g, n in stack:
            out.extend([(g, 1 if n > 0 else -1)] * abs(n))
        return tuple(out)

    def length(self, w):
        """Length in the symmetric alphabet: d^r counts min(r, alpha - r)."""
        n = 0
        for g, e in syllables(self.normal_form(w)):
            if g in self.torsion:
                a = self.torsion[g]
                n += min(e % a, a - e % a)
            else:
                n += abs(e)
        return n

    def equal(self, u, v):
        return self.normal_form(u) == self.normal_form(v)

    def cyclic_reduce(self, w):
        """Return (p, r) with nf(w) = p r p^-1 and r cyclically reduced."""
        w = self.normal_form(w)
        p = ()
        while len(w) > 1:
            v = self.normal_form(w[1:] + w[:1])
            if len(v) >= len(w):
                break
            p = p + w[:1]
            w = v
        return p, w

    def conjugator(self, w, t):
        """A word u with nf(u t u^-1) = nf(w), or None."""
        p, r = self.cyclic_reduce(w)
        q, s = self.cyclic_reduce(t)
        if len(r) != len(s):
            return None
        for i in range(max(len(s), 1)):
            rot = self.normal_form(s[i:] + s[:i])
            if rot == r:
                u = self.normal_form(p + inverse(s[:i]) + inverse(q))
                if self.normal_form(u + t + inverse(u)) == self.normal_form(w):
                    return u
        return None

    def is_boundary_conjugate(self, w):
        """Return (i, u, s) with w = u c_i^s u^-1 in normal form, or None."""
        for i, c in enumerate(self.c):
            for s in (1, -1):
                u = self.conjugator(w, self.boundary[c] if s == 1 else inverse(self.boundary[c]))
                if u is not None:
                    return i + 1, u, s
        return None

    def reduced_words(self, max_len):
        """All normal forms of symmetric length <= max_len (BFS order, lexicographic ties)."""
        letters = []
        for g in self.generators:
            letters.append((g, 1))
            letters.append((g, -1))
        seen = {(): 0}
        frontier = [()]
        out = [()]
        for n in range(1, max_len + 1):
            nxt = []
            for w in frontier:
                for l in letters:
                    v = self.normal_form(w + (l,))
                    if v not in seen:
                        seen[v] = n
                        nxt.append(v)
            nxt.sort()
            out.extend(nxt)
            frontier = nxt
        return out

    def to_json(self):
        return {"signature": self.sig.to_json(), "generators": list(self.generators),
                "relations": [word_str(r) for r in self.relations()],
                "derivedBoundary": self.derived,
                "boundaryWords": {c: word_str(w) for c, w in self.boundary.items()}}


def build_presentation(sig):
    return Presentation(sig)


def commutator(x, y):
    return ((x, 1), (y, 1), (x, -1), (y, -1))


def random_word(pres, length, rng):
    """Uniform-ish random normal form of the given length (no cancellation, torsion runs kept short)."""
    letters = [(g, e) for g in pres.generators for e in (1, -1)]
    w = []
    while len(w) < length:
        l = letters[rng.integers(len(letters))]
        if w and w[-1] == (l[0], -l[1]):
            continue
        if l[0] in pres.torsion and w and w[-1][0] == l[0]:
            continue
        w.append(l)
    return tuple(w)


def boundary_power(pres, w):
    """Return (i, n, u) with nf(w) = u c_i^n u^-1 and n != 0, or None."""
    p, r = pres.cyclic_reduce(w)
    if not r:
        return None
    for i, c in enumerate(pres.c, start=1):
        _, b = pres.cyclic_reduce(pres.boundary[c])
        if not b or len(r) % len(b):
            continue
        n = len(r) // len(b)
        for s in (1, -1):
            u = pres.conjugator(w, power(pres.boundary[c], s * n))
            if u is not None:
                return i, s * n, u
    return None
