import numpy as np
import pytest

from cbolab import Objective


@pytest.fixture
def constant_objective() -> Objective:
    """f == 0 everywhere: softmax weights are exactly uniform."""
    return Objective(
        name="constant",
        evaluate=lambda x: 0.0,
        evaluate_batch=lambda X: np.zeros(X.shape[0]),
    )


def make_constant_objective() -> Objective:
    return Objective(
        name="constant",
        evaluate=lambda x: 0.0,
        evaluate_batch=lambda X: np.zeros(X.shape[0]),
    )
