import json
from pathlib import Path

import pytest

from aperiodica.discrepancy import discrepancy_report, exceeds, largest_inscribed_ball
from aperiodica.errors import InvalidParameterError, NotRepetitiveError, PartialTowerError
from aperiodica.hullbuilder import (
    PatchTower,
    TowerBudget,
    WordPrefix,
    build_tower,
    distinguish,
    emit_hull_element,
    load_tower,
    verify_tower,
)
from aperiodica.pointsets import build_source
from aperiodica.scalar import QuadNum

EXAMPLE_L = build_source("exampleL")
FIB = build_source("fib")
HALF_FIB = build_source("halffib")
SMALL = TowerBudget(window_length=2_000, max_window=2_000)
FIRST_WINDOW = TowerBudget(window_length=1_000, max_window=1_000)


@pytest.fixture(scope="module")
def deviant_tower() -> PatchTower:
    return build_tower(EXAMPLE_L, "D", [2], SMALL)


@pytest.fixture(scope="module")
def normal_tower() -> PatchTower:
    return build_tower(EXAMPLE_L, "N", [2], SMALL)


def test_word_prefix():
    word = WordPrefix(letters="DND")
    assert len(word) == 3
    assert [word.letter(i) for i in (1, 2, 3)] == ["D", "N", "D"]
    for letters in ("", "DX", "dn"):
        with pytest.raises(ValueError):
            WordPrefix(letters=letters)


def test_depth_one_tower(deviant_tower: PatchTower, normal_tower: PatchTower):
    assert deviant_tower.complete
    assert deviant_tower.depth == 1
    assert deviant_tower.rho == 1
    level = deviant_tower.levels[0]
    assert level.kind == "D"
    assert exceeds(level.deviant_report.ratio, 2)
    assert level.deviant_report.sign == 1
    assert level.region == level.deviant_region
    assert [p + level.offset for p in level.points] == [p[0] for p in EXAMPLE_L.enumerate(level.region)]

    other = normal_tower.levels[0]
    assert other.kind == "N"
    assert other.region == other.normal_region
    assert discrepancy_report(EXAMPLE_L, 1, other.region).sign <= 0

    assert all(check.passed for check in verify_tower(deviant_tower))
    assert all(check.passed for check in verify_tower(normal_tower, EXAMPLE_L))


def test_build_tower_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        build_tower(EXAMPLE_L, "DX", [1, 2], SMALL)
    with pytest.raises(InvalidParameterError):
        build_tower(EXAMPLE_L, "DD", [2, 1], SMALL)
    with pytest.raises(InvalidParameterError):
        build_tower(EXAMPLE_L, "DD", [1], SMALL)
    with pytest.raises(InvalidParameterError):
        build_tower(EXAMPLE_L, "DDDD", [1, 2, 3, 4], SMALL)
    with pytest.raises(InvalidParameterError):
        build_tower(build_source("sub"), "D", [1], SMALL)


def test_partial_tower_for_bounded_discrepancy():
    tower = build_tower(FIB, "D", [2], FIRST_WINDOW)
    assert not tower.complete
    assert tower.failure_level == 1
    assert tower.depth == 0
    assert "deviant" in tower.failure_reason
    with pytest.raises(PartialTowerError):
        emit_hull_element(tower)


def test_example_l_patches_do_not_recur():
    with pytest.raises(NotRepetitiveError):
        build_tower(EXAMPLE_L, "DD", [1, 2], SMALL)


def test_emit_hull_element(deviant_tower: PatchTower):
    window = emit_hull_element(deviant_tower)
    top = deviant_tower.levels[-1]
    assert window.depth == 1
    assert window.word == deviant_tower.word
    assert largest_inscribed_ball(window.support).center == (QuadNum(0),)
    assert [p + window.recentering for p in window.points] == top.points
    assert emit_hull_element(deviant_tower) == window


def test_distinguish(deviant_tower: PatchTower, normal_tower: PatchTower):
    evidence = distinguish(deviant_tower, normal_tower, 1)
    assert evidence.letters == ("D", "N")
    assert evidence.overlay_shift == 0
    assert evidence.count_deviant > evidence.count_normal
    assert evidence.ratio > 0
    assert evidence.passed
    assert distinguish(normal_tower, deviant_tower, 1).ratio == evidence.ratio

    with pytest.raises(InvalidParameterError):
        distinguish(deviant_tower, deviant_tower, 1)
    with pytest.raises(InvalidParameterError):
        distinguish(deviant_tower, normal_tower, 2)
    with pytest.raises(InvalidParameterError):
        distinguish(deviant_tower, build_tower(EXAMPLE_L, "N", [1], SMALL), 1)


def test_load_tower(deviant_tower: PatchTower, tmp_path: Path):
    path = tmp_path / "tower.json"
    path.write_text(deviant_tower.to_json())
    assert load_tower(path) == deviant_tower

    data = json.loads(path.read_text())
    data["levels"][0]["points"][0] = "1/3"
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    with pytest.raises(InvalidParameterError):
        load_tower(tampered)


def test_tower_budget():
    budget = TowerBudget()
    assert (budget.window_length, budget.growth, budget.max_window) == (1_000, 10, 1_000_000)
    with pytest.raises(ValueError):
        TowerBudget(growth=1)
    with pytest.raises(ValueError):
        TowerBudget(window_length=5_000, max_window=1_000)


def test_distinguish_rejects_overlay_beyond_ell(deviant_tower: PatchTower, normal_tower: PatchTower):
    # same selected region, but a support recentered 5 units away
    level = normal_tower.levels[0]
    moved = level.copy(update={"support": level.support.translate(5), "offset": level.offset - 5})
    assert moved.region == level.region
    far = normal_tower.copy(update={"levels": [moved]})

    evidence = distinguish(deviant_tower, far, 1)
    assert evidence.overlay_shift == 5
    assert evidence.shift_bound == 1
    assert not evidence.within_shift_bound
    assert not evidence.passed
    assert evidence.ratio == distinguish(deviant_tower, normal_tower, 1).ratio


def test_half_fibonacci_first_level():
    deviant = build_tower(HALF_FIB, "D", ["1/8"], FIRST_WINDOW)
    normal = build_tower(HALF_FIB, "N", ["1/8"], FIRST_WINDOW)
    assert deviant.complete and normal.complete

    level = deviant.levels[0]
    (lo, hi) = level.deviant_region.components[0]
    assert float(lo) == pytest.approx(7.1631, abs=1e-3)
    assert float(hi) == pytest.approx(28.5344, abs=1e-3)
    assert level.deviant_report.sign == -1
    assert level.normal_report.sign == 1
    assert float(level.deviant_region.components[0][0] - level.normal_region.components[0][0]) == pytest.approx(
        1.3090, abs=1e-3
    )
    assert normal.levels[0].region == level.normal_region
    assert all(check.passed for check in verify_tower(deviant, HALF_FIB))
    assert all(check.passed for check in verify_tower(normal, HALF_FIB))

    evidence = distinguish(deviant, normal, 1)
    assert evidence.overlay_shift == 0
    assert evidence.ratio == QuadNum(1) / 4
    assert evidence.passed


def test_half_fibonacci_second_level_needs_larger_windows():
    tower = build_tower(HALF_FIB, "DD", ["1/8", "1/4"], FIRST_WINDOW)
    assert not tower.complete
    assert tower.failure_level == 2
    assert tower.depth == 1
    assert "shift-robust" in tower.failure_reason
    assert [float(r) for r in tower.repetitivity] == pytest.approx([38.007, 14.517], abs=1e-3)


def test_recurrence_window_cap():
    # the first recurrence window of a 21-unit patch is 427 units long
    tower = build_tower(HALF_FIB, "DD", ["1/8", "1/4"], TowerBudget(window_length=100, max_window=400))
    assert tower.failure_level == 2
    assert "recurrence" in tower.failure_reason


@pytest.fixture(scope="module")
def half_fibonacci_towers() -> dict[str, PatchTower]:
    return {word: build_tower(HALF_FIB, word, ["1/8", "1/4"]) for word in ("DD", "DN", "ND", "NN")}


@pytest.mark.slow
def test_half_fibonacci_depth_two(half_fibonacci_towers: dict[str, PatchTower]):
    towers = half_fibonacci_towers
    assert all(tower.complete for tower in towers.values())
    assert towers["DD"].levels[0] == towers["DN"].levels[0]
    assert towers["ND"].levels[0] == towers["NN"].levels[0]
    for tower in towers.values():
        assert all(check.passed for check in verify_tower(tower, HALF_FIB))
        top = tower.levels[1]
        (lo, hi) = top.deviant_region.components[0]
        assert float(lo) == pytest.approx(57899.0631, abs=1e-3)
        assert float(hi) == pytest.approx(77794.5205, abs=1e-3)
        assert top.deviant_report.sign == -1
        assert top.verification is not None and top.verification.passed
        assert float(top.ell_level) == pytest.approx(77.013, abs=1e-3)


@pytest.mark.slow
@pytest.mark.parametrize(
    "u, v, level, ratio", [("DD", "ND", 1, "1/4"), ("DD", "DN", 2, "3/4"), ("NN", "ND", 2, "3/4")]
)
def test_half_fibonacci_distinguish(
    half_fibonacci_towers: dict[str, PatchTower], u: str, v: str, level: int, ratio: str
):
    evidence = distinguish(half_fibonacci_towers[u], half_fibonacci_towers[v], level)
    assert evidence.ratio == QuadNum.of(ratio)
    assert evidence.within_shift_bound
    assert evidence.passed


@pytest.mark.slow
def test_half_fibonacci_unit_deviance():
    deviant = build_tower(HALF_FIB, "D", [1])
    normal = build_tower(HALF_FIB, "N", [1])
    assert deviant.complete and normal.complete
    (lo, hi) = deviant.levels[0].deviant_region.components[0]
    assert float(lo) == pytest.approx(245523.0590, abs=1e-3)
    assert float(hi) == pytest.approx(752582.9184, abs=1e-3)
    assert exceeds(deviant.levels[0].deviant_report.ratio, 1)
    assert all(check.passed for check in verify_tower(deviant, HALF_FIB))
    assert distinguish(deviant, normal, 1).passed
