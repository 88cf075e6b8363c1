import logging

from ..errors import GuardError
from ..model.decision import SelectionMatrix
from ..model.rate import UtilityKind
from .base import ProblemContext, SelectionResult, make_result

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_CELLS = 16


def exhaustive_optimize(context: ProblemContext, kind, max_cells: int = EXHAUSTIVE_MAX_CELLS) -> SelectionResult:
    """Score all ``2 ** (L * B)`` selection matrices and keep the best.

    Ties go to the smallest binary encoding (:meth:`SelectionMatrix.to_int`).

    Raises:
        GuardError: ``L * B`` exceeds ``max_cells``.
    """
    kind = UtilityKind.parse(kind)
    L, B = context.shape
    cells = L * B
    if cells > max_cells:
        raise GuardError(f"exhaustive search over {cells} cells exceeds the limit of {max_cells}", cells, max_cells)

    best_sel, best = None, None
    trace, gp_iterations = [], []
    for code in range(1 << cells):
        selection = SelectionMatrix.from_int(code, L, B)
        solution = context.evaluate(selection, kind)
        gp_iterations.append(solution.gp_iterations)
        if best is None or solution.utility > best.utility:
            best_sel, best = selection, solution
        trace.append(best.utility)
    logger.debug("exhaustive search scored %d candidates, best %.6g", 1 << cells, best.utility)
    return make_result(best_sel, best, trace, iterations=1 << cells, gp_iterations=gp_iterations,
                       evaluations=1 << cells)
