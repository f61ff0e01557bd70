"""Regression suite over the closed-form examples, run by ``graphzeta selfcheck``.

Every check is deterministic given the seed, so the JSON report (and hence
the manifest digest) is reproducible.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .chromatic import ChromaticPoly, chromatic_function, coloring_count_bruteforce
from .gas import ChargeDistribution, hypothesis_check, phase_transition_check, star_gas_charges
from .graph import EdgeSubgraph, Graph, complete_graph, path_graph, star_graph
from .oracle import mc_partition_estimate
from .thermo import StarGasSpec, mean_energy, free_energy_per_particle, star_partition
from .zeta import convergence_abscissa_uniform, evaluate, transport, tree_zeta_closed_form, zeta


def _random_tree(n: int, rng: random.Random) -> Graph:
    return Graph.from_edges(n, ((rng.randrange(v), v) for v in range(1, n)))


def _check_k2():
    z = zeta(complete_graph(2))
    return evaluate(z, 3, 1) == Fraction(3, 4) and evaluate(z, 2, 0) == 1


def _check_stars_paths():
    for n in range(3, 9):
        s, l = star_graph(n), path_graph(n)
        zs = zeta(s, use_tree_shortcut=False)
        if zs != tree_zeta_closed_form(s):
            return False
        # path edge i and star edge i both carry one factor 1 - p^{-1} T_i
        if zeta(l, use_tree_shortcut=False) != transport(zs, l.edges, list(range(n - 1))):
            return False
    return True


def _check_random_trees(rng):
    for _ in range(10):
        t = _random_tree(rng.randint(2, 8), rng)
        if zeta(t, use_tree_shortcut=False) != tree_zeta_closed_form(t):
            return False
    return True


def _check_triangle_pendant():
    g = Graph(4, ((0, 1), (0, 2), (1, 2), (2, 3)))
    chi = chromatic_function(g, EdgeSubgraph(g, frozenset()))
    target = ChromaticPoly.falling_factorial(4) + ChromaticPoly((2,)) * ChromaticPoly.falling_factorial(3)
    if chi != target:
        return False
    h = EdgeSubgraph(g, frozenset())
    return all(chi(p) == coloring_count_bruteforce(g, h, p) for p in (2, 3, 5, 7))


def _check_abscissa():
    return all(convergence_abscissa_uniform(complete_graph(n)) == Fraction(-2, n) for n in range(2, 8))


def _check_star_gas():
    for M in (2, 4, 6, 8):
        for p in (2, 3, 5):
            v = phase_transition_check(star_graph(M), p, star_gas_charges(M))
            if v.kind != "transition_at" or v.beta != 1 or v.pole_order != M // 2:
                return False
    v = phase_transition_check(complete_graph(3), 2, ChargeDistribution.uniform(3))
    return v.kind == "unbounded_interval"


def _check_hypotheses():
    a = hypothesis_check(star_graph(3), ChargeDistribution((1, 1, -1)))
    b = hypothesis_check(complete_graph(3), ChargeDistribution((1, 1, -1)))
    c = hypothesis_check(complete_graph(3), ChargeDistribution.uniform(3))
    return (a.H1, a.H2, b.H1, b.H2, c.H1) == (True, True, True, False, False)


def _check_thermo():
    if star_partition(StarGasSpec(4, 0, 2, 0)) != 1:
        return False
    h = 1e-5
    fd = (free_energy_per_particle(1.0, 3, 0.5 + h) - free_energy_per_particle(1.0, 3, 0.5 - h)) / (2 * h)
    return abs(fd - mean_energy(3, 0.5)) < 1e-6


def run_selfcheck(seed: int = 0, samples: int = 20000) -> dict:
    rng = random.Random(seed)
    checks: list[tuple[str, Callable[[], bool]]] = [
        ("k2_closed_form", _check_k2),
        ("stars_and_paths", _check_stars_paths),
        ("random_trees", lambda: _check_random_trees(rng)),
        ("triangle_pendant_chromatic", _check_triangle_pendant),
        ("complete_graph_abscissa", _check_abscissa),
        ("star_gas_transition", _check_star_gas),
        ("hypotheses", _check_hypotheses),
        ("star_thermodynamics", _check_thermo),
    ]
    results = []
    for name, fn in checks:
        results.append({"name": name, "passed": bool(fn())})
    est = mc_partition_estimate(complete_graph(3), 2, 1, samples, seed)
    exact = float(evaluate(zeta(complete_graph(3)), 2, 1))
    results.append({"name": "k3_monte_carlo", "passed": abs(est.mean - exact) <= 4 * est.stderr,
                    "mean": est.mean, "stderr": est.stderr, "exact": exact})
    return {"seed": seed, "samples": samples, "checks": results,
            "passed": all(r["passed"] for r in results)}
