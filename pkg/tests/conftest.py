"""Shared fixtures: small concrete categories used across the suite."""

import numpy as np
import pytest

from cstarcat.category import CStarCategory


def matrix_units(dy, dx):
    units = []
    for i in range(dy):
        for j in range(dx):
            m = np.zeros((dy, dx), dtype=np.complex128)
            m[i, j] = 1.0
            units.append(m)
    return units


def full_matrix_category(dims):
    """Category with hom(x, y) = all dim(y) x dim(x) matrices."""
    objects = [(f"x{i}", d) for i, d in enumerate(dims)]
    homs = {
        (x, y): matrix_units(dims[y], dims[x])
        for x in range(len(dims))
        for y in range(len(dims))
    }
    return CStarCategory(objects, homs, assume_orthonormal=True)


@pytest.fixture
def m2():
    return full_matrix_category([2])


@pytest.fixture
def cat23():
    return full_matrix_category([2, 3])
