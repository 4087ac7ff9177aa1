"""Problem containers and the common result type for the embedded solvers."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"
    UNBOUNDED = "Unbounded"


class SolverError(RuntimeError):
    """A solve that should have succeeded did not."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


_SENSES = ("<=", "=", ">=")


@dataclass
class LinearProgram:
    """``maximize c.x  s.t.  A x (sense) b,  lo <= x <= hi``.

    ``sense`` holds one of ``"<="``, ``"="``, ``">="`` per row.  ``bounds``
    is an ``(n, 2)`` array; infinities are allowed.  The default bounds are
    ``[0, inf)``.
    """

    objective: np.ndarray
    A: np.ndarray = None
    b: np.ndarray = None
    sense: Sequence[str] = ()
    bounds: np.ndarray = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if self.A is None:
            self.A = np.zeros((0, n))
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if self.A.size == 0:
            self.A = self.A.reshape(0, n)
        self.b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float).ravel()
        m = self.A.shape[0]
        if isinstance(self.sense, str):
            self.sense = [self.sense] * m
        self.sense = list(self.sense) if len(self.sense) else ["<="] * m
        if self.bounds is None:
            self.bounds = np.column_stack([np.zeros(n), np.full(n, np.inf)])
        self.bounds = np.asarray(self.bounds, dtype=float).reshape(n, 2)
        if self.A.shape[1] != n:
            raise ValueError(f"constraint rows have {self.A.shape[1]} columns, objective has {n}")
        if self.b.size != m or len(self.sense) != m:
            raise ValueError("A, b and sense disagree on the number of rows")
        bad = [s for s in self.sense if s not in _SENSES]
        if bad:
            raise ValueError(f"unknown constraint sense {bad[0]!r}")
        if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
            raise ValueError("a lower bound exceeds its upper bound")

    @property
    def n(self):
        return self.objective.size

    @property
    def constraints(self):
        return [(self.A[i], self.b[i], self.sense[i]) for i in range(self.A.shape[0])]

    @classmethod
    def from_rows(cls, objective, rows, bounds=None):
        """Build from ``(a, b, sense)`` tuples."""
        n = len(objective)
        if rows:
            A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n)
            b = [r[1] for r in rows]
            sense = [r[2] for r in rows]
        else:
            A, b, sense = None, None, ()
        return cls(objective, A, b, sense, bounds)


@dataclass
class QuadConstraint:
    """``x_I' Q x_I + q.x <= rhs`` with ``Q`` PSD acting on ``x[index]``.

    ``index=None`` means ``Q`` spans every variable.
    """

    Q: np.ndarray
    q: np.ndarray
    rhs: float
    index: Optional[np.ndarray] = None

    def __post_init__(self):
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        self.q = np.asarray(self.q, dtype=float).ravel()
        self.rhs = float(self.rhs)
        if self.index is not None:
            self.index = np.asarray(self.index, dtype=np.int64).ravel()
            if self.Q.shape != (self.index.size, self.index.size):
                raise ValueError("Q does not match its index set")
        elif self.Q.shape != (self.q.size, self.q.size):
            raise ValueError("Q does not match the variable count")

    def value(self, x):
        xi = x if self.index is None else x[self.index]
        return float(xi @ self.Q @ xi + self.q @ x - self.rhs)


@dataclass
class ConvexQcp(LinearProgram):
    quad: list = field(default_factory=list)

    def __post_init__(self):
        super().__post_init__()
        for c in self.quad:
            if c.q.size != self.n:
                raise ValueError("quadratic constraint has the wrong width")


@dataclass
class SolveResult:
    status: Status
    x: np.ndarray
    objective_value: float
    kkt_residual: float
    iterations: int = 0

    @property
    def ok(self):
        return self.status is Status.OPTIMAL
