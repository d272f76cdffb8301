"""Shared generators for the test suite."""

import numpy as np

from ginfo import CanonicalTwoModeParams, build_symplectic_form, canonical_two_mode_matrix
from ginfo.symplectic import symplectic_spectrum

FORM2 = build_symplectic_form(2)


def random_valid_canonical(rng, margin=1e-6):
    """Random canonical parameters of a physically admissible two-mode state."""
    while True:
        a, b = rng.uniform(0.55, 2.5, size=2)
        c, d = rng.uniform(-1.0, 1.0, size=2)
        p = CanonicalTwoModeParams(a, b, c, d)
        m = canonical_two_mode_matrix(p)
        if np.linalg.eigvalsh(m).min() < margin:
            continue
        if symplectic_spectrum(m, FORM2).min() < 1.0 + margin:
            continue
        return p


def random_nondegenerate_canonical(rng, floor=0.05, margin=1e-6):
    """Valid canonical parameters with both correlations bounded away from 0."""
    while True:
        p = random_valid_canonical(rng, margin)
        scale = np.sqrt(p.a * p.b)
        if min(abs(p.c), abs(p.d)) >= floor * scale:
            return p
