"""Shared fixtures: solved default contention points for both backoff modes."""

import pytest

import laacap as L


@pytest.fixture(scope="session")
def fcw_setup():
    params = L.SystemParams(mode=L.FCW)
    cp = L.solve_fixed_point(params)
    return params, cp, L.build_transforms(params, cp)


@pytest.fixture(scope="session")
def vcw_setup():
    params = L.SystemParams(mode=L.VCW)
    cp = L.solve_fixed_point(params)
    return params, cp, L.build_transforms(params, cp)


@pytest.fixture(scope="session")
def both_setups(fcw_setup, vcw_setup):
    return {L.FCW: fcw_setup, L.VCW: vcw_setup}
