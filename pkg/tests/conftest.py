"""Shared fixtures: a fixed power budget, fast solver knobs and instance search."""

import pytest

from channel.channels import cascade
from channel.instances import random_channel_set
from numerics.rng import RngStream
from optimizer.conditions import check_prop1, check_prop2
from optimizer.settings import AOConfig
from rate.snr import PowerBudget, closed_form_optima, rate_breakdown

PB = PowerBudget(p_a=1.0, p_c=1.0, p_max=1.0, sigma2=0.1)


@pytest.fixture
def pb() -> PowerBudget:
    return PB


@pytest.fixture
def fast_ao() -> AOConfig:
    return AOConfig(bisection_eps=1e-3, max_ao_iters=10, randomization_count=50, bm_max_iters=500)


def instance(seed: int, m: int):
    cs = random_channel_set(RngStream(seed), m)
    return cs, cascade(cs)


def find_instance(m: int, predicate, limit: int = 2000):
    """First seeded random instance for which predicate(cs, casc) holds."""
    for seed in range(limit):
        cs, casc = instance(seed, m)
        if predicate(cs, casc):
            return cs, casc
    raise AssertionError(f"no instance with M={m} satisfies the predicate in {limit} draws")


def prop1_holds(cs, casc) -> bool:
    opt = closed_form_optima(PB, cs, casc)
    return check_prop1(rate_breakdown(PB, cs, casc, opt.theta_u_star))


def prop2_holds(cs, casc) -> bool:
    opt = closed_form_optima(PB, cs, casc)
    rb = rate_breakdown(PB, cs, casc, opt.theta_c_star)
    return check_prop2(rb, rb.r_u, rb.r_c)
