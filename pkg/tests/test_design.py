import json
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, strategies as st

from pdc_ldpc import (
    DifferenceDesign,
    SearchExhaustedError,
    expansion_sets,
    is_four_cycle_free,
    lh_lower_bound,
    load_design,
    random_design,
    save_design,
    six_cycle_witnesses,
    uniform_design,
)
from pdc_ldpc.design import SixCycleWitness

from conftest import ALIASED_W3, cycle_free_designs, raw_designs


def test_uniform_columns():
    assert uniform_design(4, 2).diffs == ((7,), (5,), (3,), (1,))
    assert uniform_design(3, 3).diffs == ((5, 2), (3, 6), (1, 10))


def test_uniform_fourth_gap_scales_by_four():
    d = uniform_design(4, 5)
    for i, col in enumerate(d.diffs, start=1):
        assert col[2] == 4 * (2 * (4 - i) + 1)
        assert col[3] == 4 * (4 * i - 2)


@pytest.mark.parametrize("a", [1, 2, 7, 64])
@pytest.mark.parametrize("w", [2, 5, 8])
def test_uniform_total_and_deterministic(a, w):
    assert uniform_design(a, w) == uniform_design(a, w)
    assert uniform_design(a, w).construction == "uniform"


@pytest.mark.parametrize("a,w", [(0, 2), (3, 1), (-1, 4)])
def test_uniform_rejects_bad_parameters(a, w):
    with pytest.raises(ValueError):
        uniform_design(a, w)


@pytest.mark.parametrize(
    "diffs",
    [[[1, 2], [3]], [[0], [2]], [[-3], [1]]],
)
def test_design_validation(diffs):
    with pytest.raises(ValueError):
        DifferenceDesign(a=2, w=3 if len(diffs[0]) == 2 else 2, diffs=diffs)


def test_expansion_sets_aliased_w3(aliased_w3):
    sets = expansion_sets(aliased_w3)
    assert sets.per_column == [[4, 5, 9], [3, 7, 10], [1, 12, 13]]
    assert sets.combined == sorted([4, 5, 9, 3, 7, 10, 1, 12, 13])


@given(raw_designs())
def test_combined_size(design):
    a, w = design.a, design.w
    assert len(expansion_sets(design).combined) == a * w * (w - 1) // 2


def _four_cycle_free_by_pairs(design):
    # oracle: any two copies of base columns meeting in two rows share a row difference
    diffs = []
    for i in range(design.a):
        pos = design.positions(i)
        diffs += [q - p for p in pos for q in pos if q > p]
    return len(diffs) == len(set(diffs))


@given(raw_designs(max_diff=6))
def test_four_cycle_free_matches_pairwise_oracle(design):
    assert is_four_cycle_free(design) == _four_cycle_free_by_pairs(design)


def test_short_w2_is_four_cycle_free(short_w2):
    assert is_four_cycle_free(short_w2)
    assert not is_four_cycle_free(DifferenceDesign.from_lists([[2], [2]]))


def test_aliased_w3_witnesses(aliased_w3):
    found = {(w.first_column, w.first, w.second_column, w.second, w.sum_column, w.total) for w in six_cycle_witnesses(aliased_w3)}
    assert (1, 3, 2, 1, 0, 4) in found
    assert (0, 5, 1, 7, 2, 12) in found


def test_uniform_w2_has_no_witness():
    for a in range(1, 12):
        assert six_cycle_witnesses(uniform_design(a, 2)) == []


def test_witness_can_reuse_one_element():
    # 2 + 2 = 4 uses the same gap of column 0 twice
    ws = six_cycle_witnesses(DifferenceDesign.from_lists([[2], [4]]))
    assert SixCycleWitness(0, 2, 0, 2, 1, 4) in ws


def test_nested_runs_of_one_copy_are_not_witnesses():
    # 1 + 3 = 4 inside column [1, 3] is a single column copy, no cycle
    assert six_cycle_witnesses(DifferenceDesign.from_lists([[1, 3]])) == []
    # but 1 + 1 = 2 in column [1, 2] joins three shifted copies
    assert SixCycleWitness(0, 1, 0, 1, 0, 2) in six_cycle_witnesses(DifferenceDesign.from_lists([[1, 2]]))


@given(raw_designs(max_a=4, max_w=3, max_diff=8))
def test_witnesses_are_valid_sums(design):
    sets = expansion_sets(design).per_column
    for w in six_cycle_witnesses(design):
        assert w.first + w.second == w.total
        assert w.first in sets[w.first_column]
        assert w.second in sets[w.second_column]
        assert w.total in sets[w.sum_column]


@given(raw_designs(max_a=4, max_w=3, max_diff=8))
def test_witness_free_means_no_sum_triple_across_columns(design):
    # brute force over value pairs from different columns
    if six_cycle_witnesses(design):
        return
    sets = expansion_sets(design).per_column
    pool = [(i, v) for i, s in enumerate(sets) for v in s]
    values = {v for _, v in pool}
    for (i, x), (j, y) in combinations_with_replacement(pool, 2):
        if i != j:
            assert x + y not in values


@pytest.mark.parametrize("a,w,expected", [(4, 2, 5), (3, 3, 10), (8, 3, 25), (8, 4, 49)])
def test_lh_lower_bound(a, w, expected):
    assert lh_lower_bound(a, w) == expected


@given(st.integers(1, 50))
def test_lh_lower_bound_w2(a):
    assert lh_lower_bound(a, 2) == a + 1


def test_short_w2_meets_bound(short_w2):
    assert short_w2.lh == 5 == lh_lower_bound(4, 2)


@given(cycle_free_designs())
def test_random_design_is_four_cycle_free(design):
    assert is_four_cycle_free(design)
    assert design.lh >= lh_lower_bound(design.a, design.w)


def test_random_design_reproducible():
    assert random_design(6, 3, 37, seed=11) == random_design(6, 3, 37, seed=11)
    assert random_design(4, 2, 4, seed=0).construction == "random"


def test_random_design_avoids_six_cycles():
    d = random_design(3, 3, 40, seed=5, avoid_six_cycles=True)
    assert six_cycle_witnesses(d) == []


def test_random_design_exhausted():
    with pytest.raises(SearchExhaustedError, match="exhausted"):
        random_design(2, 3, 1)
    # five distinct gaps out of five values in one draw: 5!/5**5 odds
    with pytest.raises(SearchExhaustedError, match="after 1 attempts"):
        random_design(5, 2, 5, seed=0, max_attempts=1)


def test_json_round_trip(tmp_path, aliased_w3):
    path = tmp_path / "d.json"
    save_design(aliased_w3, path)
    data = json.loads(path.read_text())
    assert list(data) == ["a", "w", "diffs", "construction", "seed"]
    assert data["diffs"] == ALIASED_W3
    assert load_design(path) == aliased_w3


@given(raw_designs())
def test_dict_round_trip(design):
    assert DifferenceDesign.from_dict(json.loads(design.to_json())) == design


@pytest.mark.parametrize("text", ["not json", "[1, 2]", '{"a": 2}', '{"a": 2, "w": 2, "diffs": [[1]]}'])
def test_load_rejects_malformed(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ValueError):
        load_design(path)
