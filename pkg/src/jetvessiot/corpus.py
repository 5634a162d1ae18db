"""Named example systems and a generator of random small solved systems."""

import random
from dataclasses import dataclass
from fractions import Fraction

from .expr import Expr, ZERO
from .jet import Chart, unit
from .system import ReducedCNF, make_first_order, make_solved


def wave():
    """Wave equation as a first-order system, with its integrability condition."""
    return make_first_order(["x", "t"], ["u", "v", "w"],
                            {"u_x": "w", "u_t": "v", "v_t": "w_x", "w_t": "v_x"}, name="wave_r1_1")


def wave_r1():
    """The same system before the integrability condition w_t = v_x is added."""
    return make_first_order(["x", "t"], ["u", "v", "w"],
                            {"u_x": "w", "u_t": "v", "v_t": "w_x"}, name="wave_r1")


def five_var():
    return make_first_order(
        ["x", "y", "z", "s", "t"], ["u", "v", "w"],
        {"u_t": "0", "v_t": "0", "w_t": "0", "u_s": "0",
         "v_s": "2*u_x + 4*u_y", "w_s": "-u_x - 3*u_y",
         "u_z": "v_x + 2*w_x + 3*v_y + 4*w_y"}, name="five_var")


def uxx_uyy():
    """u_xx = a u, u_yy = b u with symbolic constants a, b."""
    return make_solved(["x", "y"], ["u"], {"u_xx": "a*u", "u_yy": "b*u"}, order=2,
                       params=["a", "b"], name="uxx_uyy")


def uxy():
    return make_solved(["x", "y"], ["u"], {"u_xy": "0"}, order=2, name="uxy")


def named_systems():
    return {"wave_r1_1": wave(), "wave_r1": wave_r1(), "five_var": five_var(),
            "uxx_uyy": uxx_uyy(), "uxy": uxy()}


@dataclass
class RandomSystemConfig:
    max_n: int = 3
    max_m: int = 3
    max_degree: int = 2
    max_terms: int = 3
    coeff_range: int = 3
    nested: bool = True


def random_system(rng, cfg=None):
    """A random valid first-order solved system with polynomial right sides.

    For each dependent variable a first principal class c is drawn; with
    cfg.nested the principal pairs are (alpha, k) for k >= c.  The right side
    of a class-k equation is a sparse polynomial of degree <= max_degree in
    x, u and the parametric first-order jets of class <= k.
    """
    cfg = cfg or RandomSystemConfig()
    n = rng.randint(1, cfg.max_n)
    m = rng.randint(1, cfg.max_m)
    indep = ["x", "y", "z"][:n]
    dep = ["u", "v", "w"][:m]
    chart = Chart(indep, dep, 1)
    B = set()
    for alpha in range(1, m + 1):
        if cfg.nested:
            c = rng.randint(1, n + 1)
            B |= {(alpha, k) for k in range(c, n + 1)}
        else:
            B |= {(alpha, k) for k in range(1, n + 1) if rng.random() < 0.5}
    eqs = {}
    for alpha, k in sorted(B, key=lambda p: (p[1], p[0])):
        pool = [Expr.var(chart.x(i)) for i in range(1, n + 1)]
        pool += [Expr.var(chart.u(b)) for b in range(1, m + 1)]
        pool += [Expr.var(chart.jet(g, unit(n, j))) for j in range(1, k + 1)
                 for g in range(1, m + 1) if (g, j) not in B]
        rhs = ZERO
        for _ in range(rng.randint(0, cfg.max_terms)):
            c = rng.randint(-cfg.coeff_range, cfg.coeff_range)
            if c == 0:
                continue
            t = Expr.const(Fraction(c))
            for _ in range(rng.randint(0, cfg.max_degree)):
                t = t * rng.choice(pool)
            rhs = rhs + t
        eqs[(alpha, k)] = rhs
    return ReducedCNF(chart, eqs, name="random")


def random_corpus(count, seed=0, cfg=None):
    rng = random.Random(seed)
    return [random_system(rng, cfg) for _ in range(count)]
