"""Deterministic SVG of one fundamental period of the planar model."""
import numpy as np

W = 560          # plot width in px
M = 50           # margin


def _f(v):
    return f"{v:.3f}"


class Canvas:
    def __init__(self, k):
        self.k = k
        self.ymax = 1.0 + 1.0 / k
        self.h = W * self.ymax
        self.items = []

    def px(self, x, y):
        return M + W * x, M + self.h - W * y

    def add(self, s):
        self.items.append(s)

    def rect(self, x0, x1, y0, y1, **attrs):
        a, b = self.px(x0, y1)
        c, d = self.px(x1, y0)
        self.add(f'<rect x="{_f(a)}" y="{_f(b)}" width="{_f(c - a)}" height="{_f(d - b)}"{_attrs(attrs)}/>')

    def poly(self, pts, closed=False, **attrs):
        s = " ".join(f"{_f(u)},{_f(v)}" for u, v in (self.px(x, y) for x, y in pts))
        tag = "polygon" if closed else "polyline"
        self.add(f'<{tag} points="{s}"{_attrs(attrs)}/>')

    def dot(self, x, y, r=3.0, **attrs):
        u, v = self.px(x, y)
        self.add(f'<circle cx="{_f(u)}" cy="{_f(v)}" r="{_f(r)}"{_attrs(attrs)}/>')

    def text(self, x, y, s, size=12, anchor="start"):
        self.add(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}" '
                 f'font-family="sans-serif">{s}</text>')

    def svg(self):
        width, height = W + 2 * M + 170, self.h + 2 * M
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
                f'viewBox="0 0 {_f(width)} {_f(height)}">')
        defs = ('<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" '
                'patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="6" stroke="#c0392b" '
                'stroke-width="1"/></pattern></defs>')
        return "\n".join([head, defs] + self.items + ["</svg>"]) + "\n"


def _attrs(d):
    return "".join(f' {k.replace("_", "-")}="{v}"' for k, v in d.items())


def _clip_x(lo, hi):
    return max(lo, 0.0), min(hi, 1.0)


def render_omega(space=None, chains=(), msa=None, k=1, n_graph=600, title=""):
    """SVG bytes: axes, minimal-set cover, gaps, boundary graphs, lozenges, triangles, corners."""
    if space is not None:
        k = space.k
    cv = Canvas(k)
    ymax = cv.ymax
    cv.rect(0, 1, 0, ymax, fill="white", stroke="black", stroke_width="1")
    # gaps of the minimal set as light bands on both axes
    if space is not None:
        for g in space.gaps:
            if g.hi - g.lo < 2e-3:
                continue
            for n in (0, 1):
                lo, hi = g.lo + n, g.hi + n
                if lo < 1:
                    a, b = _clip_x(lo, hi)
                    cv.rect(a, b, 0, ymax, fill="#eef3fb", stroke="none")
                if lo < ymax:
                    cv.rect(0, 1, lo, min(hi, ymax), fill="#f6f0e6", stroke="none")
    # the cover of the minimal set along the axes
    if msa is not None:
        for lo, hi in msa.cover:
            for n in (0, 1):
                a, b = lo + n, hi + n
                if a < 1:
                    cv.poly([(a, 0), (min(b, 1), 0)], stroke="black", stroke_width="4", fill="none")
                if a < ymax:
                    cv.poly([(0, a), (0, min(b, ymax))], stroke="black", stroke_width="4", fill="none")
    # Omega between the graphs of alpha_1 and beta_1
    if space is not None:
        xs = np.linspace(0, 1, n_graph + 1)
        A = space.alpha1(xs)
        B = space.beta1(xs)
        cv.poly(list(zip(xs, np.minimum(A, ymax))), stroke="#1f4e9c", stroke_width="1.5", fill="none")
        cv.poly(list(zip(xs, np.minimum(B, ymax))), stroke="#1f4e9c", stroke_width="1.5", fill="none")
        cv.poly([(0, 0), (1, 1)], stroke="#999999", stroke_dasharray="4,3", fill="none")
        cv.poly([(0, 1.0 / k), (1, ymax)], stroke="#999999", stroke_dasharray="4,3", fill="none")
    # lozenges, triangles and corners
    for ch in chains:
        for l in ch.lozenges:
            for n in (-1, 0, 1):
                if l.triangle:
                    (tx0, tx1), (ty0, ty1) = l.triangle
                    tri = [(tx0 + n, ty0 + n), (tx0 + n, ty1 + n), (tx1 + n, ty1 + n)] if l.label == "exit" \
                        else [(tx0 + n, ty0 + n), (tx1 + n, ty0 + n), (tx1 + n, ty1 + n)]
                    if all(-1e-9 <= p[0] <= 1 + 1e-9 and -1e-9 <= p[1] <= ymax + 1e-9 for p in tri):
                        cv.poly(tri, closed=True, fill="url(#hatch)", stroke="#c0392b", stroke_width="0.6")
                for (ex0, ex1), (ey0, ey1), _ in l.elementary:
                    if ex0 + n >= -1e-9 and ex1 + n <= 1 + 1e-9 and ey1 + n <= ymax + 1e-9 and ey0 + n >= -1e-9:
                        col = "#2e7d32" if l.label == "exit" else "#6a1b9a"
                        cv.rect(ex0 + n, ex1 + n, ey0 + n, ey1 + n, fill="none", stroke=col, stroke_width="1")
        for n in (-1, 0, 1):
            for x, y in ch.true_corners():
                if 0 <= x + n <= 1 and 0 <= y + n <= ymax:
                    cv.dot(x + n, y + n, 3.5, fill="black")
            for x, y in ch.fake_corners():
                if 0 <= x + n <= 1 and 0 <= y + n <= ymax:
                    cv.dot(x + n, y + n, 3.0, fill="white", stroke="#1565c0", stroke_width="1.2")
    # labels and legend
    cv.text(M + W / 2, M + cv.h + 32, "x (stable axis)", anchor="middle")
    cv.text(24, M + cv.h / 2, "y", anchor="middle")
    if title:
        cv.text(M + W / 2, 28, title, size=14, anchor="middle")
    lx, ly = M + W + 20, M + 20
    legend = [("black", "minimal set cover"), ("#1f4e9c", "graphs of alpha1, beta1"),
              ("#2e7d32", "exit lozenge"), ("#6a1b9a", "entrance lozenge"),
              ("#c0392b", "triangle"), ("black", "true corner"), ("#1565c0", "fake corner")]
    for j, (c, t) in enumerate(legend):
        y = ly + 20 * j
        cv.add(f'<rect x="{_f(lx)}" y="{_f(y - 9)}" width="10" height="10" fill="{c}"/>')
        cv.text(lx + 16, y, t, size=11)
    return cv.svg().encode("utf-8")
