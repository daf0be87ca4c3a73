"""Dense linear operators between coordinate spaces."""

from dataclasses import dataclass

import numpy as np

__all__ = ["LinOp"]


@dataclass(frozen=True, eq=False)
class LinOp:
    """A linear map ``R^n -> R^m`` stored as an ``(m, n)`` matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.ndim == 1:
            M = M.reshape(-1, 1)
        if M.ndim != 2 or not np.all(np.isfinite(M)):
            raise ValueError("LinOp needs a finite 2-D matrix")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def zero(cls, rows, cols):
        return cls(np.zeros((rows, cols)))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def cols(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, x):
        """Apply to one point ``(n,)`` or a stack of points ``(k, n)``."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.cols:
            raise ValueError(f"operator expects dimension {self.cols}, got {x.shape[-1]}")
        return x @ self.matrix.T

    def _check(self, other):
        if not isinstance(other, LinOp):
            return NotImplemented
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return LinOp(self.matrix + other.matrix)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return LinOp(self.matrix - other.matrix)

    def __neg__(self):
        return LinOp(-self.matrix)

    def __matmul__(self, other):
        """Operator composition ``self ∘ other``."""
        return LinOp(self.matrix @ other.matrix)

    def hstack(self, *others):
        """Operator on a product space acting blockwise: ``(x1, x2, ...) -> A x1 + B x2 + ...``."""
        return LinOp(np.hstack([self.matrix] + [o.matrix for o in others]))

    def key(self):
        return (self.shape, self.matrix.tobytes())

    def __eq__(self, other):
        return isinstance(other, LinOp) and self.shape == other.shape and bool(
            np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash(self.key())

    def tolist(self):
        return self.matrix.tolist()

    def __repr__(self):
        return f"LinOp({self.matrix.tolist()})"
