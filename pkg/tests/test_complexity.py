import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlga import ConfigError, LatticeSpec, sector_basis
from qlga.complexity import (
    ResourceEstimate,
    count_variables,
    estimate_all,
    t_classical,
    t_quantum,
    t_quantum_pairwise,
)


def test_count_variables_small():
    assert count_variables(2, 2, 2).exact_ops == 6
    assert count_variables(5, 2, 0).exact_ops == 1


def test_count_variables_large():
    est = count_variables(20**3, 6, 100)
    assert est.exact_ops is None
    assert abs(est.log10_approx - 310) <= 1
    assert abs(est.log10_ops - 310) <= 1


@given(st.integers(1, 30), st.integers(1, 2), st.data())
def test_log_path_matches_exact_binomial(l, m, data):
    n = data.draw(st.integers(0, l * m))
    est = count_variables(l, m, n)
    lg = (math.lgamma(l * m + 1) - math.lgamma(n + 1) - math.lgamma(l * m - n + 1)) / math.log(10)
    exact = math.comb(l * m, n)
    assert abs(lg - math.log10(exact)) <= 1e-9 * max(1.0, math.log10(exact))
    assert est.exact_ops == exact


@pytest.mark.parametrize("d,extent,n", [(1, 5, 2), (1, 6, 3), (2, 3, 1), (2, 3, 2)])
def test_count_matches_sector_basis(d, extent, n):
    lat = LatticeSpec(d, extent)
    assert count_variables(lat.n_sites, lat.slots_per_site, n).exact_ops == sector_basis(lat, n).shape[0]


def test_count_variables_domain():
    with pytest.raises(ConfigError):
        count_variables(2, 2, 5)
    with pytest.raises(ConfigError):
        count_variables(0, 2, 0)


def test_t_classical():
    assert abs(t_classical(20, 3, 100).log10_ops - 312) <= 1
    assert t_classical(7, 2, 0).exact_ops == 49
    assert t_classical(10, 1, 1).exact_ops == 2000


def test_t_quantum():
    assert t_quantum(20, 3).exact_ops == 19_200_000
    assert t_quantum(1, 3).exact_ops == 6
    assert t_quantum(2, 1).exact_ops == 16


def test_t_quantum_pairwise():
    est = t_quantum_pairwise(20, 3)
    assert est.exact_ops == 921_600_000_000
    assert abs(est.log10_ops - 11.965) <= 0.05
    assert t_quantum_pairwise(1, 2).exact_ops == 16
    assert t_quantum_pairwise(2, 2).exact_ops == 1024


@given(st.integers(2, 1000), st.integers(1, 4))
def test_pairwise_dominates(q, d):
    assert t_quantum(q, d).log10_ops <= t_quantum_pairwise(q, d).log10_ops


def test_estimate_all_finite():
    rows = estimate_all(1, 1, 0)
    assert [r.formula_id for r in rows] == ["variables", "classical", "quantum", "quantum_pairwise"]
    assert all(math.isfinite(r.log10_ops) for r in rows)


def test_inconsistent_estimate_rejected():
    with pytest.raises(ValueError):
        ResourceEstimate("quantum", 3.0, 999)
    with pytest.raises(ValueError):
        ResourceEstimate("quantum", float("inf"))
