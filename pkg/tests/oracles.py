"""Independent reference computations used by the tests.

Written directly from coordinate formulas, without going through the
package's kernel, so that agreement means something.
"""

from fractions import Fraction
from itertools import combinations

import sympy


def det(m):
    """Determinant by cofactor expansion along the first row (small matrices)."""
    if len(m) == 1:
        return m[0][0]
    total = 0
    for j, entry in enumerate(m[0]):
        if entry == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * entry * det(minor)
    return total


def xy(p):
    return Fraction(p[0]), Fraction(p[1])


def concyclic_det(p1, p2, p3, p4):
    rows = []
    for p in (p1, p2, p3, p4):
        x, y = xy(p)
        rows.append([x * x + y * y, x, y, 1])
    return det(rows)


def all_subsets_concyclic(points):
    return all(concyclic_det(*s) == 0 for s in combinations(points, 4))


def orient(p, q, r):
    (px, py), (qx, qy), (rx, ry) = xy(p), xy(q), xy(r)
    return det([[px, py, 1], [qx, qy, 1], [rx, ry, 1]])


def line_coeffs(p, q):
    (px, py), (qx, qy) = xy(p), xy(q)
    return qy - py, px - qx, qx * py - px * qy


def meet(p1, p2, q1, q2):
    """Intersection of line p1p2 with line q1q2 by Cramer's rule."""
    a1, b1, c1 = line_coeffs(p1, p2)
    a2, b2, c2 = line_coeffs(q1, q2)
    d = det([[a1, b1], [a2, b2]])
    return det([[-c1, b1], [-c2, b2]]) / d, det([[a1, -c1], [a2, -c2]]) / d


def circumcenter(p, q, r):
    """Solve |X-p|^2 = |X-q|^2 = |X-r|^2 as a 2x2 linear system."""
    (px, py), (qx, qy), (rx, ry) = xy(p), xy(q), xy(r)
    m = [[2 * (qx - px), 2 * (qy - py)], [2 * (rx - px), 2 * (ry - py)]]
    rhs = [qx * qx + qy * qy - px * px - py * py, rx * rx + ry * ry - px * px - py * py]
    d = det(m)
    return det([[rhs[0], m[0][1]], [rhs[1], m[1][1]]]) / d, det([[m[0][0], rhs[0]], [m[1][0], rhs[1]]]) / d


def sq(p, q):
    (px, py), (qx, qy) = xy(p), xy(q)
    return (px - qx) ** 2 + (py - qy) ** 2


def circle_meet(c1, r1, c2, r2, known):
    """Solve both circle equations symbolically and drop the known root."""
    x, y = sympy.symbols("x y")
    eqs = [
        (x - sympy.Rational(*frac(c1[0]))) ** 2 + (y - sympy.Rational(*frac(c1[1]))) ** 2 - sympy.Rational(*frac(r1)),
        (x - sympy.Rational(*frac(c2[0]))) ** 2 + (y - sympy.Rational(*frac(c2[1]))) ** 2 - sympy.Rational(*frac(r2)),
    ]
    roots = [(Fraction(str(s[x])), Fraction(str(s[y]))) for s in sympy.solve(eqs, [x, y], dict=True)]
    others = [r for r in roots if r != xy(known)]
    assert len(others) == 1, roots
    return others[0]


def frac(v):
    f = Fraction(v)
    return f.numerator, f.denominator


def reference_configuration(A):
    """B, C, K, L straight from the statement's definitions, all indices 0-based mod 5."""
    n = 5
    B = [None] * n
    for i in range(n):
        B[(i + 3) % n] = meet(A[i], A[(i + 1) % n], A[(i + 2) % n], A[(i + 3) % n])
    K = [None] * n
    for i in range(n):
        K[(i + 2) % n] = circumcenter(A[i], A[(i + 1) % n], B[(i + 2) % n])
    C = [None] * n
    for i in range(n):
        # circles (A_i A_{i+1} B_{i+2}) and (A_{i+1} A_{i+2} B_{i+3}) meet at A_{i+1} and C_{i+1}
        k1, k2 = K[(i + 2) % n], K[(i + 3) % n]
        p = xy(A[(i + 1) % n])
        # reflect p across the line of centers k1 k2
        a, b, c = line_coeffs(k1, k2)
        t = 2 * (a * p[0] + b * p[1] + c) / (a * a + b * b)
        C[(i + 1) % n] = (p[0] - t * a, p[1] - t * b)
    L = [circumcenter(C[(i + 1) % n], B[(i + 2) % n], B[(i + 3) % n]) for i in range(n)]
    return B, C, K, L


def on_line(p, q, x):
    a, b, c = line_coeffs(p, q)
    return a * x[0] + b * x[1] + c


def reflect(p, c1, c2):
    """Mirror image of p in the line through c1 and c2."""
    a, b, c = line_coeffs(c1, c2)
    x, y = xy(p)
    t = 2 * (a * x + b * y + c) / (a * a + b * b)
    return x - t * a, y - t * b
