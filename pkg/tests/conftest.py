import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from topoindex import (
    ModelSpec,
    build_hamiltonian,
    build_lattice,
    position_operators,
    sample_disorder,
)


@pytest.fixture(scope="session")
def clean_periodic_l12():
    spec = ModelSpec(L=12, boundary="periodic", disorder_width=0.0, seed=0)
    lattice = build_lattice(spec)
    H = build_hamiltonian(spec, lattice, sample_disorder(spec, 0))
    return spec, lattice, H


@pytest.fixture(scope="session")
def clean_open_l20():
    spec = ModelSpec(L=20, boundary="open", disorder_width=0.0, seed=0)
    lattice = build_lattice(spec)
    H = build_hamiltonian(spec, lattice, sample_disorder(spec, 0))
    X, Y = position_operators(lattice, "raw")
    return spec, lattice, H, X, Y


@pytest.fixture(scope="session")
def disordered_open_l12():
    spec = ModelSpec(L=12, boundary="open", disorder_width=8.0, seed=21)
    lattice = build_lattice(spec)
    H = build_hamiltonian(spec, lattice, sample_disorder(spec, 0))
    X, Y = position_operators(lattice, "raw")
    return spec, lattice, H, X, Y
