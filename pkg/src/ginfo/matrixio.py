"""Plain-text covariance-matrix files.

Format: one comment header naming the ordering and mode count, then one row
of 17-significant-digit decimals per matrix row. The decimal round trip is
bit exact.
"""

from __future__ import annotations

import numpy as np

from .policy import DEFAULT_POLICY, NumericPolicy
from .symplectic import CovarianceMatrix, Ordering

_HEADER_TAG = "# cvm"


def _ordering_name(ordering: Ordering | None) -> str:
    return "custom" if ordering is None else ordering.value


def _ordering_from_name(name: str) -> Ordering | None:
    if name == "custom":
        return None
    for member in Ordering:
        if member.value == name:
            return member
    raise ValueError(f"unknown ordering {name!r} in matrix file")


def dump_cvm(cvm: CovarianceMatrix) -> str:
    lines = [f"{_HEADER_TAG} modes={cvm.n_modes} ordering={_ordering_name(cvm.ordering)}"]
    for row in cvm.matrix:
        lines.append(" ".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


def save_cvm(path, cvm: CovarianceMatrix) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_cvm(cvm))


def parse_cvm(text: str, policy: NumericPolicy = DEFAULT_POLICY) -> CovarianceMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(_HEADER_TAG):
        raise ValueError("matrix file must start with a '# cvm' header line")
    fields = dict(tok.split("=", 1) for tok in lines[0][len(_HEADER_TAG):].split())
    try:
        modes = int(fields["modes"])
        ordering = _ordering_from_name(fields["ordering"])
    except KeyError as exc:
        raise ValueError(f"matrix header is missing the {exc.args[0]!r} field") from exc
    rows = [np.array([float(x) for x in ln.split()]) for ln in lines[1:]]
    matrix = np.vstack(rows)
    if matrix.shape != (2 * modes, 2 * modes):
        raise ValueError(f"matrix body {matrix.shape} does not match modes={modes}")
    return CovarianceMatrix(matrix, ordering=ordering, policy=policy)


def load_cvm(path, policy: NumericPolicy = DEFAULT_POLICY) -> CovarianceMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return parse_cvm(fh.read(), policy)
