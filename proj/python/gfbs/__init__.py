"""Generalized forward-backward splitting engine (Python bindings)."""

from ._gfbs import (
    GfbsError,
    algorithms,
    certify,
    compare,
    generate,
    main,
    prox,
    prox_conjugate,
    q_norm,
    run,
)

__all__ = [
    "GfbsError",
    "algorithms",
    "certify",
    "compare",
    "generate",
    "main",
    "prox",
    "prox_conjugate",
    "q_norm",
    "run",
]
