import numpy as np
import pytest

from divtween.criteria import CriteriaVector
from divtween.generators import domain_classifier, make_synthetic_domain
from divtween.motion import BoundaryCondition, MotionSequence


@pytest.fixture(scope="session")
def domain6():
    return make_synthetic_domain(6, 16, seed=101)


@pytest.fixture(scope="session")
def classifier6(domain6):
    return domain_classifier(domain6)


@pytest.fixture(scope="session")
def cond16(domain6):
    rng = np.random.default_rng(555)
    x1 = MotionSequence(domain6.trajectory(1, 5, rng, jitter=0.2))
    x2 = MotionSequence(domain6.trajectory(4, 5, rng, jitter=0.2))
    return BoundaryCondition(x1=x1, x2=x2)


def objective_pair(f1: float, f2: float, label: int = 0) -> CriteriaVector:
    """A consistent criteria vector carrying exactly the requested objective values."""
    beta = (f1 + f2 - 1.0) / 2.0
    alpha1 = f1 - beta
    return CriteriaVector(
        f1=float(f1),
        f2=float(f2),
        alpha1=alpha1,
        alpha2=1.0 - alpha1,
        beta=beta,
        label=label,
        confidence=0.5,
    )
