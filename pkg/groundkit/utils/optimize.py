"""
Derivative-free simplex search (Nelder-Mead)
"""

from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5


class NelderMeadResult(BaseModel):
    """Best vertex found by the simplex search"""

    x: List[float] = Field(..., description="Best point")
    fun: float = Field(..., description="Objective at the best point")
    evals: int = Field(..., description="Function evaluations used")
    iterations: int = Field(..., description="Simplex iterations")
    reason: str = Field(..., description="xtol, ftol or max_evals")


class _Vertex:
    __slots__ = ("x", "f", "age")

    def __init__(self, x: np.ndarray, f: float, age: int):
        self.x = x
        self.f = f
        self.age = age


def initial_simplex(
    x0: np.ndarray, init_scale: float, mode: Literal["absolute", "relative"]
) -> List[np.ndarray]:
    """x0 plus one vertex per coordinate direction"""
    points = [x0.copy()]
    for i in range(x0.size):
        point = x0.copy()
        if mode == "relative":
            point[i] = point[i] * 1.05 if point[i] != 0 else 0.00025
        else:
            point[i] = point[i] + init_scale
        points.append(point)
    return points


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0,
    init_scale: float = 0.25,
    simplex_mode: Literal["absolute", "relative"] = "absolute",
    max_evals: int = 2000,
    xtol: float = 1e-8,
    ftol: float = 1e-12,
    cfg: Optional[object] = None,
) -> NelderMeadResult:
    """
    Minimize f with the standard simplex method

    Reflection 1, expansion 2, contraction 0.5, shrink 0.5. Vertices with
    equal values are ordered by age, older first, so ties never reorder the
    simplex arbitrarily. Stops when the simplex diameter drops to xtol, the
    spread of values drops to ftol, or the evaluation budget runs out.

    Args:
        f: objective on R^d
        x0: starting point
        cfg: optional object with init_scale, simplex_mode, max_evals, xtol, ftol
             attributes (a SearchConfig) overriding the keyword defaults
    """
    if cfg is not None:
        init_scale = getattr(cfg, "init_scale", init_scale)
        simplex_mode = getattr(cfg, "simplex_mode", simplex_mode)
        max_evals = getattr(cfg, "max_evals", max_evals)
        xtol = getattr(cfg, "xtol", xtol)
        ftol = getattr(cfg, "ftol", ftol)

    x0 = np.asarray(x0, dtype=float).reshape(-1)
    counter = {"evals": 0, "age": 0}

    def make_vertex(point: np.ndarray) -> _Vertex:
        counter["evals"] += 1
        vertex = _Vertex(point, float(f(point)), counter["age"])
        counter["age"] += 1
        return vertex

    simplex = [make_vertex(p) for p in initial_simplex(x0, init_scale, simplex_mode)]
    n = x0.size
    iterations = 0
    reason = "max_evals"

    while True:
        simplex.sort(key=lambda v: (v.f, v.age))
        best, worst = simplex[0], simplex[-1]

        diameter = max(float(np.max(np.abs(v.x - best.x))) for v in simplex[1:]) if n else 0.0
        if diameter <= xtol:
            reason = "xtol"
            break
        if worst.f - best.f <= ftol:
            reason = "ftol"
            break
        if counter["evals"] >= max_evals:
            break
        iterations += 1

        centroid = np.mean([v.x for v in simplex[:-1]], axis=0)
        reflected = make_vertex(centroid + REFLECT * (centroid - worst.x))

        if best.f <= reflected.f < simplex[-2].f:
            simplex[-1] = reflected
            continue

        if reflected.f < best.f:
            expanded = make_vertex(centroid + EXPAND * (reflected.x - centroid))
            simplex[-1] = expanded if expanded.f < reflected.f else reflected
            continue

        if reflected.f < worst.f:
            outside = make_vertex(centroid + CONTRACT * (reflected.x - centroid))
            if outside.f <= reflected.f:
                simplex[-1] = outside
                continue
        else:
            inside = make_vertex(centroid - CONTRACT * (centroid - worst.x))
            if inside.f < worst.f:
                simplex[-1] = inside
                continue

        simplex = [best] + [make_vertex(best.x + SHRINK * (v.x - best.x)) for v in simplex[1:]]

    simplex.sort(key=lambda v: (v.f, v.age))
    return NelderMeadResult(
        x=simplex[0].x.tolist(),
        fun=simplex[0].f,
        evals=counter["evals"],
        iterations=iterations,
        reason=reason,
    )
