"""Shared fixtures and brute-force oracles.

The oracles loop over lattice vectors one at a time with plain Python
arithmetic, so they share no vectorised code with the package.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from gevrey_nse.spectral import SpectralField, make_grid, random_band


def lattice(N):
    r = range(-N, N + 1)
    return [k for k in itertools.product(r, r, r) if k != (0, 0, 0)]


def coeff_at(u, k):
    N = u.grid.N
    return u.coeff[:, k[0] + N, k[1] + N, k[2] + N]


def oracle_gevrey(u, s, alpha, theta=1.0):
    terms = []
    for k in lattice(u.grid.N):
        ka = math.sqrt(k[0] ** 2 + k[1] ** 2 + k[2] ** 2)
        c = coeff_at(u, k)
        p = sum(abs(complex(x)) ** 2 for x in c)
        terms.append(ka ** (2 * s) * math.exp(2 * alpha * ka**theta) * p)
    return math.sqrt(math.fsum(terms))


def oracle_wiener(u, r, alpha=0.0):
    terms = []
    for k in lattice(u.grid.N):
        ka = math.sqrt(k[0] ** 2 + k[1] ** 2 + k[2] ** 2)
        c = coeff_at(u, k)
        terms.append(ka**r * math.exp(alpha * ka) * math.sqrt(sum(abs(complex(x)) ** 2 for x in c)))
    return math.fsum(terms)


def oracle_inner(u, v):
    """Exact rational sum, rounded once."""
    total = Fraction(0)
    for k in lattice(u.grid.N):
        a, b = coeff_at(u, k), coeff_at(v, k)
        for x, y in zip(a, b):
            x, y = complex(x), complex(y)
            total += Fraction(x.real) * Fraction(y.real) + Fraction(x.imag) * Fraction(y.imag)
    return float(total)


def oracle_advection(u, v):
    """sum_{j+l=k} i (u_hat(j) . l) v_hat(l), unprojected, as a dict k -> 3-list."""
    N = u.grid.N
    out = {}
    modes = lattice(N)
    for j in modes:
        uj = [complex(x) for x in coeff_at(u, j)]
        if not any(uj):
            continue
        for l in modes:
            k = (j[0] + l[0], j[1] + l[1], j[2] + l[2])
            if k == (0, 0, 0) or max(abs(x) for x in k) > N:
                continue
            dot = uj[0] * l[0] + uj[1] * l[1] + uj[2] * l[2]
            if dot == 0:
                continue
            vl = coeff_at(v, l)
            acc = out.setdefault(k, [0j, 0j, 0j])
            for m in range(3):
                acc[m] += 1j * dot * complex(vl[m])
    return out


def oracle_trilinear(u, v, w):
    """(B(u, v), w) for solenoidal w via the brute-force convolution."""
    adv = oracle_advection(u, v)
    total = []
    for k, vec in adv.items():
        wk = coeff_at(w, k)
        total.extend((vec[m] * complex(wk[m]).conjugate()).real for m in range(3))
    return math.fsum(total)


def rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def random_field(N, seed, amplitude=1.0, band=None):
    lo, hi = band or (1, N)
    return random_band(make_grid(N), lo, hi, seed=seed, amplitude=amplitude)


def raw_field(N, seed, scale=1.0):
    """Random real field that is not solenoidal."""
    g = make_grid(N)
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((3,) + g.shape) + 1j * rng.standard_normal((3,) + g.shape)
    return SpectralField(g, scale * c)


@pytest.fixture
def grid8():
    return make_grid(8)


@pytest.fixture
def grid4():
    return make_grid(4)


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE = {}


def record_criterion(number, title, ok, detail=""):
    """Store a criterion outcome and echo it (visible with -s or in the summary)."""
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}" + (f" [{detail}]" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: (int(str(k).rstrip("abc")), str(k))):
            terminalreporter.write_line(ACCEPTANCE[key])
