"""Thin wrapper over the HiGHS dual simplex for LPs with side constraints."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .errors import SolverError

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def solve_lp(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None):
    """Minimize ``c @ x`` over ``x >= 0`` subject to the given rows.

    Returns the scipy result; raises :class:`SolverError` unless optimal.
    """
    res = linprog(
        np.asarray(c, dtype=np.float64),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs-ds",
        options=HIGHS_OPTIONS,
    )
    if res.status != 0:
        raise SolverError(f"LP failed: {res.message}")
    return res
