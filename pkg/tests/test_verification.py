"""Tests für den Prüfkatalog und den verify-Ablauf."""
import json

import pytest

from checks.check_manager import CheckManager, get_check_manager
from cyclewalk.errors import UsageError
from cyclewalk.verification import (
    CHECK_FUNCTIONS,
    check_absolute_zeta_descriptor,
    check_coprime_certificates,
    check_fourth_power,
    check_period_table,
    check_phi_product_identity,
    check_sector_closed_forms,
    check_walk_zeta_closed_form,
    run_check,
    run_checks,
    specs_up_to,
)


@pytest.fixture
def small_catalog(tmp_path):
    data = {
        "version": "1.0",
        "categories": [
            {"id": "b", "name": "B", "order": 2, "checks": [
                {"id": "phi", "name": "Φ", "enabled": True,
                 "function": "check_phi_product_identity", "params": {"max_n": 12}},
            ]},
            {"id": "a", "name": "A", "order": 1, "checks": [
                {"id": "closed", "name": "Sektoren", "enabled": True,
                 "function": "check_sector_closed_forms", "params": {"states": [3]}},
                {"id": "off", "name": "aus", "enabled": False,
                 "function": "check_fourth_power", "params": {"states": [3]}},
            ]},
        ],
    }
    path = tmp_path / "checks.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return CheckManager(str(path))


def test_catalog_order_and_filters(small_catalog):
    assert [c["id"] for c in small_catalog.get_all_checks()] == ["closed", "off", "phi"]
    assert [c["id"] for c in small_catalog.get_enabled_checks()] == ["closed", "phi"]
    assert [c["id"] for c in small_catalog.get_enabled_checks("b")] == ["phi"]
    assert small_catalog.get_check_data("phi")["category_id"] == "b"
    assert small_catalog.get_params("phi") == {"max_n": 12}
    assert small_catalog.get_check_data("missing") is None


def test_missing_catalog_is_empty(tmp_path):
    manager = CheckManager(str(tmp_path / "nope.json"))
    assert manager.get_all_checks() == []
    assert not manager.load_checks()


def test_shipped_catalog_references_known_functions():
    manager = get_check_manager()
    checks = manager.get_all_checks()
    assert len(checks) >= 15
    assert all(c["function"] in CHECK_FUNCTIONS for c in checks)
    assert len({c["id"] for c in checks}) == len(checks)


@pytest.mark.parametrize("check_id", ["u_orthogonal", "product_identity", "divisibility"])
def test_shipped_catalog_covers_full_grid(check_id):
    assert get_check_manager().get_params(check_id)["max_dim"] == 60


def test_divisibility_check_on_small_grid():
    passed, detail = CHECK_FUNCTIONS["check_divisibility"](max_dim=12)
    assert passed, detail


def test_run_checks_with_custom_manager(small_catalog):
    outcomes = run_checks(manager=small_catalog)
    assert [o.check_id for o in outcomes] == ["closed", "phi"]
    assert all(o.passed for o in outcomes)
    assert outcomes[0].to_dict()["category"] == "a"
    assert outcomes[0].render().startswith("✅ closed")


def test_run_checks_only_and_unknown_id(small_catalog):
    assert [o.check_id for o in run_checks(only=["off"], manager=small_catalog)] == ["off"]
    with pytest.raises(UsageError):
        run_checks(only=["missing"], manager=small_catalog)


def test_run_check_turns_errors_into_failures():
    outcome = run_check({"id": "bad", "function": "check_fourth_power", "params": {"states": [4]}})
    assert not outcome.passed
    with pytest.raises(UsageError):
        run_check({"id": "x", "function": "does_not_exist"})


def test_specs_up_to_respects_dimension():
    specs = specs_up_to(12, families=("M",))
    assert {s.label for s in specs} == {"M,3,2", "M,3,3", "M,3,4", "M,5,2"}


def test_individual_checks_on_small_inputs():
    assert check_phi_product_identity(20)[0]
    assert check_sector_closed_forms([3, 5])[0]
    assert check_period_table("M", [3, 5], [3], 6)[0]
    assert check_period_table("F", [3, 5], [3], 6)[0]
    assert check_coprime_certificates([3], 5)[0]
    assert check_fourth_power([3])[0]
    assert check_walk_zeta_closed_form([3])[0]
    assert check_absolute_zeta_descriptor([3, 5])[0]


@pytest.mark.slow
def test_full_catalog_passes():
    outcomes = run_checks()
    failed = [o.check_id for o in outcomes if not o.passed]
    assert failed == []
