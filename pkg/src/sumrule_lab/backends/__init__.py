"""Backend selection for the Riccati hot loop.

The compiled extension is preferred when importable; the NumPy lane-batch
implementation is the fallback and the reference.  SUMRULE_LAB_BACKEND
forces the choice: "compiled", "python" or "auto" (default).
Profile-recording solves always run on the python backend.
"""

from __future__ import annotations

import os

from . import riccati_np
from .common import eta_poly_coeffs, pot_payload

try:
    from . import _riccati_cy

    _HAVE_COMPILED = True
except ImportError:
    _riccati_cy = None
    _HAVE_COMPILED = False


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _HAVE_COMPILED else ("python",)


def backend_name() -> str:
    choice = os.environ.get("SUMRULE_LAB_BACKEND", "auto").lower()
    if choice == "python":
        return "python"
    if choice == "compiled":
        if not _HAVE_COMPILED:
            raise ImportError("SUMRULE_LAB_BACKEND=compiled but the extension is not built")
        return "compiled"
    return "compiled" if _HAVE_COMPILED else "python"


def get_solver(name: str | None = None):
    name = name or backend_name()
    if name == "compiled":
        if not _HAVE_COMPILED:
            raise ImportError("compiled backend not available")
        return _riccati_cy.solve_riccati
    return riccati_np.solve_riccati


def solve_riccati(payload, ks, x_lo, x_hi, eta_pair=None, atol=1e-12, rtol=1e-10,
                  max_steps=2_000_000, record=False):
    if record:
        return riccati_np.solve_riccati(
            payload, ks, x_lo, x_hi, eta_pair, atol, rtol, max_steps, record=True
        )
    return get_solver()(payload, ks, x_lo, x_hi, eta_pair, atol, rtol, max_steps)


__all__ = [
    "available_backends",
    "backend_name",
    "eta_poly_coeffs",
    "get_solver",
    "pot_payload",
    "solve_riccati",
]
