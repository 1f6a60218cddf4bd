# Test 08 - Services
"""
The result cache and the verification suites.
"""

import pytest

from prisma.core.errors import InputError
from prisma.services.cache_service import CacheService, canonical_json
from prisma.services.verification_service import (
    SUITES,
    SuiteOptions,
    default_options,
    rooted_trees,
    verification_service,
)

SMALL = {
    "remark-1-5": SuiteOptions(),
    "closure-basic": SuiteOptions(trials=2, box=2),
    "convex-identities": SuiteOptions(trials=2, box=2),
    "tree-order": SuiteOptions(max_vertices=3),
    "chain-intersection": SuiteOptions(max_vertices=3, box=2),
    "pure-cx": SuiteOptions(max_vertices=3, box=1),
    "root-extraction": SuiteOptions(max_vertices=3),
    "face-decomposition": SuiteOptions(trials=2, box=3, max_pairs=50),
    "prismality-certificates": SuiteOptions(max_vertices=3),
    "grothendieck-idempotent": SuiteOptions(trials=3),
    "hilbert-oracle": SuiteOptions(trials=3, box=4),
}


# --- Cache ---

def test_cache_round_trip(cache):
    key = cache.make_key("hilbert", {"cone": {"dim": 2}}, {})
    assert cache.get(key) is None
    assert cache.set(key, {"hilbert_basis": [[1, 0]]})
    assert cache.get(key) == {"hilbert_basis": [[1, 0]]}
    assert cache.delete(key)
    assert cache.get(key) is None


def test_cache_keys_depend_on_everything():
    base = CacheService.make_key("member", {"point": [1]}, {"budget": 5})
    assert base.startswith("member:")
    assert base == CacheService.make_key("member", {"point": [1]}, {"budget": 5})
    assert base != CacheService.make_key("member", {"point": [1]}, {"budget": 6})
    assert base != CacheService.make_key("member", {"point": [2]}, {"budget": 5})
    assert base != CacheService.make_key("span", {"point": [1]}, {"budget": 5})


def test_canonical_json_sorts_keys():
    assert canonical_json({"b": 1, "a": 2}) == canonical_json({"a": 2, "b": 1})


def test_clear_and_health(cache):
    cache.set(cache.make_key("span", {}, {}), [1])
    cache.set(cache.make_key("hilbert", {}, {}), [2])
    result = cache.clear()
    assert result["status"] == "cleared" and result["removed"] == 2
    assert cache.health_check()["status"] == "healthy"


def test_disabled_cache_never_stores(tmp_path):
    disabled = CacheService(tmp_path, enabled=False)
    key = disabled.make_key("span", {}, {})
    assert not disabled.set(key, [1])
    assert disabled.get(key) is None
    assert disabled.health_check()["status"] == "disabled"


# --- Verification suites ---

def test_every_suite_is_registered():
    assert verification_service.suite_names == sorted(SMALL)
    assert len(SUITES) == 11


def test_unknown_suite_is_an_input_error():
    with pytest.raises(InputError):
        verification_service.run("nope", SuiteOptions())


def test_rooted_tree_enumeration():
    assert rooted_trees(3) == [(-1,), (-1, 0), (-1, 0, 0), (-1, 0, 1)]
    assert len(rooted_trees(5)) == 1 + 1 + 2 + 6 + 24


@pytest.mark.parametrize("name", sorted(SMALL))
def test_small_suites_pass(name):
    report = verification_service.run(name, SMALL[name])
    assert report.suite == name
    assert report.properties
    assert report.passed, [p.model_dump() for p in report.properties if not p.passed]


def test_reports_are_reproducible():
    options = SuiteOptions(seed=3, trials=3)
    first = verification_service.run("grothendieck-idempotent", options).model_dump()
    second = verification_service.run("grothendieck-idempotent", options).model_dump()
    assert first == second


def test_default_options_take_overrides():
    options = default_options(seed=99, box=None)
    assert options.seed == 99 and options.box is None


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(SMALL))
def test_full_suites_pass(name):
    assert verification_service.run(name, default_options()).passed


def test_hilbert_oracle_covers_both_dimensions():
    suite = SUITES["hilbert-oracle"]
    units = suite.units(suite.resolve(SuiteOptions()))
    assert [d for d, _ in units].count(2) == 50
    assert [d for d, _ in units].count(3) == 50
    pinned = suite.units(suite.resolve(SuiteOptions(dim=3, trials=4)))
    assert pinned == [(3, 0), (3, 1), (3, 2), (3, 3)]
