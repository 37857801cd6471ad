from __future__ import annotations

import numpy as np
import pytest

from cesge.data.models import DeflatorVector, Economy, IOTable, LinkedObservation
from cesge.synthetic.generator import SyntheticSpec, generate_economy


@pytest.fixture
def one_sector() -> IOTable:
        return IOTable(A=[[0.5]], a0=[0.5], d=[1.0], labels=('concrete',), year=2000)


@pytest.fixture
def three_sector() -> IOTable:
        A = np.array([
                [0.10, 0.20, 0.05],
                [0.15, 0.10, 0.25],
                [0.05, 0.30, 0.10],
        ])
        return IOTable(A=A, a0=1.0 - A.sum(axis=0), d=[10.0, 20.0, 5.0], labels=('agri', 'steel', 'services'), year=2000)


@pytest.fixture
def make_economy():
        """Seeded synthetic economy; γ optional einheitlich überschrieben."""

        def factory(n: int = 8, seed: int = 0, gamma=None, **spec_options) -> Economy:
                economy = generate_economy(SyntheticSpec(n=n, seed=seed, **spec_options))
                return economy if gamma is None else economy.with_gamma(gamma)

        return factory


@pytest.fixture
def static_observation(three_sector) -> LinkedObservation:
        """Beide Perioden identisch, alle Deflatoren 1."""

        return LinkedObservation(table0=three_sector, table1=three_sector.copy(year=2005), deflators=DeflatorVector(p=np.ones(4)))
