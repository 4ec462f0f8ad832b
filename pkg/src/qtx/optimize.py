"""Golden-section search on a bracketing interval."""
import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_min(f, a, b, tol):
    """Minimize a unimodal ``f`` on ``[a, b]`` down to an interval ``<= tol``.

    Returns ``(x_min, f(x_min))``.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        h *= INV_PHI
        if fc < fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * h
            fd = f(d)
        if h <= 4 * math.ulp(max(abs(a), abs(b))):
            break
    return (c, fc) if fc < fd else (d, fd)


def golden_section_max(f, a, b, tol):
    x, fx = golden_section_min(lambda x: -f(x), a, b, tol)
    return x, -fx
