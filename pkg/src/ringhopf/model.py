"""Core data types for unidirectional ring networks.

A ring of n nodes (n >= 3) couples node j to node j+1 (indices mod n).
The linearisation at a point is determined by the diagonal entries a_j
(internal dynamics) and the coupling entries b_j, giving the Jacobian

    J = [[a_1, b_1, 0, ..., 0],
         [0,   a_2, b_2, ..., 0],
         ...
         [b_n, 0, ..., 0, a_n]]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MIN_NODES = 3

ADJACENCY_CONVENTION = "entry[i][j] counts arrows from node j+1 to node i+1"


class RingFormatError(ValueError):
    """A ring document could not be parsed or has inconsistent dimensions."""


@dataclass(frozen=True)
class RingParams:
    """Linearisation data of an n-node unidirectional ring."""

    n: int
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.n or len(self.b) != self.n:
            raise RingFormatError(
                f"expected {self.n} diagonal and coupling entries, "
                f"got len(a)={len(self.a)}, len(b)={len(self.b)}"
            )
        for name, values in (("a", self.a), ("b", self.b)):
            for j, v in enumerate(values):
                if not math.isfinite(v):
                    raise RingFormatError(f"{name}[{j}] is not finite: {v}")

    def jacobian(self) -> np.ndarray:
        J = np.diag(np.asarray(self.a, dtype=float))
        for j in range(self.n):
            J[j, (j + 1) % self.n] = self.b[j]
        return J

    def trace(self) -> float:
        return float(sum(self.a))

    def coupling_product(self) -> float:
        """Signed product c = (-1)^(n+1) b_1 ... b_n (the constant shift in p)."""
        return float((-1) ** (self.n + 1) * math.prod(self.b))

    def to_dict(self) -> dict:
        return {"n": self.n, "a": list(self.a), "b": list(self.b)}


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    n_ok: bool
    finite: bool
    zero_couplings: tuple[int, ...]
    messages: tuple[str, ...]


def validate(params: RingParams) -> ValidationReport:
    """Report-only structural checks: minimum size and zero couplings.

    Finiteness and length consistency are enforced at construction, so a
    constructed RingParams always reports finite=True.
    """
    messages = []
    n_ok = params.n >= MIN_NODES
    if not n_ok:
        messages.append(f"n={params.n} is below the minimum of {MIN_NODES}")
    zeros = tuple(j for j, v in enumerate(params.b) if v == 0.0)
    for j in zeros:
        messages.append(f"b[{j}] is zero: no imaginary eigenvalue is possible")
    return ValidationReport(
        ok=n_ok,
        n_ok=n_ok,
        finite=True,
        zero_couplings=zeros,
        messages=tuple(messages),
    )


def require_valid(params: RingParams) -> None:
    """Raise if params fails the hard validity checks (n >= 3)."""
    report = validate(params)
    if not report.n_ok:
        raise RingFormatError("; ".join(report.messages))


def cyclic_relabel(params: RingParams, shift: int) -> RingParams:
    """Rotate node labels by `shift`, preserving cyclic order.

    This is the ring's graph automorphism; the eigenvalue multiset of J is
    unchanged (permutation similarity).
    """
    if not 0 <= shift < params.n:
        raise ValueError(f"shift must be in [0, {params.n}), got {shift}")
    a = params.a[shift:] + params.a[:shift]
    b = params.b[shift:] + params.b[:shift]
    return RingParams(params.n, a, b)


def time_rescale(params: RingParams, delta: float) -> RingParams:
    """Scale time by delta > 0; every entry (and eigenvalue) scales by delta."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    a = tuple(delta * v for v in params.a)
    b = tuple(delta * v for v in params.b)
    return RingParams(params.n, a, b)


@dataclass(frozen=True)
class AdmissibleOdeFamily:
    """One-parameter family of admissible ring ODEs.

    Node equations:  dx_j/dt = (a_j + lam) x_j + b_j x_{j+1} + cubic_j x_j^3.
    The origin is an equilibrium for every lam, and the Jacobian there is
    exactly J + lam*I.
    """

    base: RingParams
    cubic: tuple[float, ...] = None
    lam: float = 0.0

    def __post_init__(self):
        if self.cubic is None:
            object.__setattr__(self, "cubic", (-1.0,) * self.base.n)
        else:
            object.__setattr__(self, "cubic", tuple(float(v) for v in self.cubic))
        if len(self.cubic) != self.base.n:
            raise RingFormatError(
                f"cubic has {len(self.cubic)} entries, expected {self.base.n}"
            )

    def jacobian(self, lam: float | None = None) -> np.ndarray:
        if lam is None:
            lam = self.lam
        return self.base.jacobian() + lam * np.eye(self.base.n)

    def vector_field(self, x: np.ndarray, lam: float | None = None) -> np.ndarray:
        if lam is None:
            lam = self.lam
        a = np.asarray(self.base.a)
        b = np.asarray(self.base.b)
        g = np.asarray(self.cubic)
        x = np.asarray(x, dtype=float)
        nxt = np.roll(x, -1)
        return (a + lam) * x + b * nxt + g * x**3

    def to_dict(self) -> dict:
        d = self.base.to_dict()
        d["cubic"] = list(self.cubic)
        d["lambda"] = self.lam
        return d


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Dense nonnegative-integer adjacency matrix.

    Convention: entries[i][j] is the number of arrows from node j to node i.
    """

    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise RingFormatError(f"adjacency matrix is not {self.n}x{self.n}")
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v < 0:
                    raise RingFormatError(f"entry[{i}][{j}] is negative: {v}")

    def matrix(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rows": [list(r) for r in self.rows],
            "convention": ADJACENCY_CONVENTION,
        }


def _load_document(path) -> dict:
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise RingFormatError(f"{path}: empty document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RingFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise RingFormatError(f"{path}: top-level value must be an object")
    return doc


def _get(doc: dict, key: str, path) -> object:
    if key not in doc:
        raise RingFormatError(f"{path}: missing field '{key}'")
    return doc[key]


def load_ring(path) -> RingParams:
    doc = _load_document(path)
    try:
        return RingParams(
            n=int(_get(doc, "n", path)),
            a=tuple(_get(doc, "a", path)),
            b=tuple(_get(doc, "b", path)),
        )
    except (TypeError, ValueError) as exc:
        raise RingFormatError(f"{path}: {exc}") from exc


def load_family(path) -> AdmissibleOdeFamily:
    doc = _load_document(path)
    base = RingParams(
        n=int(_get(doc, "n", path)),
        a=tuple(_get(doc, "a", path)),
        b=tuple(_get(doc, "b", path)),
    )
    cubic = tuple(doc["cubic"]) if "cubic" in doc else None
    lam = float(doc.get("lambda", 0.0))
    return AdmissibleOdeFamily(base=base, cubic=cubic, lam=lam)


def load_adjacency(path) -> AdjacencyMatrix:
    doc = _load_document(path)
    try:
        return AdjacencyMatrix(
            n=int(_get(doc, "n", path)),
            rows=tuple(tuple(r) for r in _get(doc, "rows", path)),
        )
    except (TypeError, ValueError) as exc:
        raise RingFormatError(f"{path}: {exc}") from exc


def save(obj, path) -> None:
    """Write a RingParams, AdmissibleOdeFamily or AdjacencyMatrix as JSON.

    Floats are emitted with repr, so save/load round-trips are bit-exact.
    """
    Path(path).write_text(json.dumps(obj.to_dict(), indent=2) + "\n")
