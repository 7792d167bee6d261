import cmath

import pytest

from bicritical_atlas.families import newton_parameter
from bicritical_atlas.orbits import center_search_antipodal, center_search_newton


@pytest.fixture(scope="session")
def newton_center_2():
    """Smallest-|a| period-4 tricorn center on the symmetry locus."""
    centers = center_search_newton(2, (1.001, 10.0), samples=2000)
    return min(centers, key=abs)


@pytest.fixture(scope="session")
def newton_center_3():
    centers = center_search_newton(3, (1.001, 10.0), samples=4000)
    return min(centers, key=abs)


@pytest.fixture(scope="session")
def parabolic_datum_n2(newton_center_2):
    """A simple parabolic on the boundary of the period-4 component."""
    from bicritical_atlas.parabolic import find_boundary_parabolic
    return find_boundary_parabolic(newton_parameter(newton_center_2),
                                   cmath.exp(1j * cmath.pi / 3), 4)


@pytest.fixture(scope="session")
def antipodal_center_r1():
    """A period-2 tongue center of the antipodal family."""
    centers = center_search_antipodal(1)
    return min(centers, key=abs)
