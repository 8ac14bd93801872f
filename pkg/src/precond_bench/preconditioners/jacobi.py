"""Control run: on the unit-diagonal scaled system Jacobi is the identity."""

from precond_bench.preconditioners.base import PreconditionerOperator
from precond_bench.types import Vector

CONTROL_LABEL = "control"


class JacobiControl(PreconditionerOperator):
    precond_class = "control"

    def __init__(self, n: int):
        super().__init__(n, CONTROL_LABEL, apply_cost=0, generation_cost=0)

    def _apply(self, r: Vector) -> Vector:
        return r.copy()


def build_jacobi_control(n: int) -> JacobiControl:
    return JacobiControl(n)


__all__ = ["JacobiControl", "build_jacobi_control", "CONTROL_LABEL"]
