import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curalloc.attributes import (
    AttributeSchema,
    AttributeVector,
    location_mode,
    quantize_object,
    quantize_user,
    rarity,
    raw_distance,
    weighted_distance,
)

from oracles import mode_brute, quantize_brute, weighted_distance_brute


def vec(schema, *values):
    return AttributeVector(schema=schema, values=tuple(values))


class TestSchema:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            AttributeSchema(dimensions=())

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError):
            AttributeSchema(dimensions=(("d", ("x", "x")),))

    def test_vector_validation(self, schema_2d):
        with pytest.raises(ValueError):
            vec(schema_2d, 0, 5)
        with pytest.raises(ValueError):
            vec(schema_2d, 0)

    def test_label_round_trip(self, schema_2d):
        v = schema_2d.vector("nonman", "asian")
        assert v.values == (1, 2)
        assert schema_2d.labels_of(v) == ("nonman", "asian")


class TestQuantize:
    def test_half_share(self):
        schema = AttributeSchema(dimensions=(("g", ("A", "B")),))
        occ = [vec(schema, 0), vec(schema, 0), vec(schema, 1), vec(schema, 1)]
        assert quantize_user(vec(schema, 0), occ).proportions == (0.5,)

    def test_identical_occupants_give_ones(self, schema_2d):
        v = vec(schema_2d, 1, 2)
        occ = [v] * 7
        assert quantize_user(v, occ).proportions == (1.0, 1.0)

    def test_two_dim_example(self):
        schema = AttributeSchema(dimensions=(("p", ("A", "B")), ("q", ("X", "Y"))))
        occ = [vec(schema, 0, 0), vec(schema, 0, 1), vec(schema, 1, 1)]
        got = quantize_user(vec(schema, 0, 1), occ).proportions
        assert got == pytest.approx((2 / 3, 2 / 3), abs=1e-15)
        assert got == pytest.approx(quantize_brute(vec(schema, 0, 1), occ))

    def test_object_quantization(self, schema_1d):
        single = [vec(schema_1d, 2)]
        assert quantize_object(vec(schema_1d, 2), single).proportions == (1.0,)
        coll = [vec(schema_1d, 0), vec(schema_1d, 0), vec(schema_1d, 1), vec(schema_1d, 2)]
        assert quantize_object(vec(schema_1d, 1), coll).proportions == (0.25,)

    def test_two_dim_object_example(self):
        schema = AttributeSchema(dimensions=(("p", ("A", "B")), ("q", ("X", "Y"))))
        coll = [
            vec(schema, 0, 0),
            vec(schema, 1, 1),
            vec(schema, 1, 1),
            vec(schema, 1, 1),
        ]
        got = quantize_object(vec(schema, 0, 0), coll).proportions
        assert got == pytest.approx((0.25, 0.25))
        assert got == pytest.approx(quantize_brute(vec(schema, 0, 0), coll))

    def test_errors(self, schema_2d, schema_1d):
        with pytest.raises(ValueError, match="empty"):
            quantize_user(vec(schema_2d, 0, 0), [])
        with pytest.raises(ValueError, match="schema"):
            quantize_user(vec(schema_2d, 0, 0), [vec(schema_1d, 0)])

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_share_sums_to_one_per_dimension(self, data):
        """Summing q over the distinct categories in a context yields 1."""
        schema = AttributeSchema(dimensions=(("a", ("x", "y", "z")), ("b", ("u", "v"))))
        draws = data.draw(
            st.lists(
                st.tuples(st.integers(0, 2), st.integers(0, 1)),
                min_size=1,
                max_size=100,
            )
        )
        occ = [vec(schema, *v) for v in draws]
        for d, card in enumerate(schema.cardinalities):
            total = 0.0
            seen = {v.values[d] for v in occ}
            for c in seen:
                probe = [0, 0]
                probe[d] = c
                total += quantize_user(vec(schema, *probe), occ).proportions[d]
            assert total == pytest.approx(1.0, abs=1e-12)
            aggregate = [
                quantize_user(v, occ).proportions[d] for v in occ
            ]
            assert all(0.0 <= p <= 1.0 for p in aggregate)


class TestRarity:
    def test_unique_member(self, schema_2d):
        v = vec(schema_2d, 1, 1)
        assert rarity(v, [v]) == 1.0

    def test_product(self):
        schema = AttributeSchema(dimensions=(("p", ("A", "B")), ("q", ("X", "Y", "Z", "W"))))
        coll = [vec(schema, 0, 0), vec(schema, 0, 1), vec(schema, 1, 2), vec(schema, 1, 3)]
        # shares: 0.5 in dim p, 0.25 in dim q
        assert rarity(vec(schema, 0, 0), coll) == pytest.approx(0.125)

    def test_eight_object_example(self):
        schema = AttributeSchema(dimensions=(("p", ("A", "B")), ("q", ("X", "Y", "Z", "W"))))
        coll = [vec(schema, 0, i % 4) for i in range(4)] + [
            vec(schema, 1, i % 4) for i in range(4)
        ]
        # query shares dim p with 4 of 8 and dim q with 2 of 8
        assert rarity(vec(schema, 0, 1), coll) == pytest.approx(0.5 * 0.25)

    def test_out_of_collection_flags(self, schema_1d):
        coll = [vec(schema_1d, 0), vec(schema_1d, 1)]
        with pytest.warns(UserWarning, match="out-of-collection"):
            assert rarity(vec(schema_1d, 2), coll) == 0.0


class TestWeightedDistance:
    def test_identical_is_zero(self, schema_2d):
        v = vec(schema_2d, 0, 1)
        occ = [v, vec(schema_2d, 1, 2)]
        assert weighted_distance(v, v, occ) == 0.0

    def test_equal_shares_cancel(self):
        schema = AttributeSchema(dimensions=(("g", ("A", "B")),))
        occ = [vec(schema, 0)] * 5 + [vec(schema, 1)] * 5
        assert weighted_distance(vec(schema, 0), vec(schema, 1), occ) == 0.0

    def test_skewed_shares(self):
        schema = AttributeSchema(dimensions=(("g", ("A", "B")),))
        occ = [vec(schema, 0)] * 9 + [vec(schema, 1)]
        got = weighted_distance(vec(schema, 0), vec(schema, 1), occ)
        assert got == pytest.approx(0.8)

    def test_empty_occupancy(self, schema_2d):
        with pytest.raises(ValueError):
            weighted_distance(vec(schema_2d, 0, 0), vec(schema_2d, 0, 1), [])

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_metric_properties(self, data):
        schema = AttributeSchema(dimensions=(("a", ("x", "y", "z")), ("b", ("u", "v"))))
        draws = data.draw(
            st.lists(
                st.tuples(st.integers(0, 2), st.integers(0, 1)),
                min_size=1,
                max_size=40,
            )
        )
        occ = [vec(schema, *v) for v in draws]
        x = vec(schema, *data.draw(st.tuples(st.integers(0, 2), st.integers(0, 1))))
        y = vec(schema, *data.draw(st.tuples(st.integers(0, 2), st.integers(0, 1))))
        dxy = weighted_distance(x, y, occ)
        assert dxy >= 0.0
        assert dxy == weighted_distance(y, x, occ)
        assert dxy <= np.sqrt(schema.depth) + 1e-12
        assert dxy == pytest.approx(weighted_distance_brute(x, y, occ), abs=1e-12)
        # dropping the mismatch indicator changes nothing: matching dims
        # contribute zero share difference anyway
        plain = np.sqrt(
            sum(
                (quantize_user(x, occ).proportions[d] - quantize_user(y, occ).proportions[d])
                ** 2
                for d in range(schema.depth)
            )
        )
        assert dxy == pytest.approx(plain, abs=1e-12)


class TestRawDistance:
    def test_identical(self, schema_2d):
        v = vec(schema_2d, 1, 1)
        assert raw_distance(v, v) == 0.0

    def test_all_mismatch(self, schema_2d):
        assert raw_distance(vec(schema_2d, 0, 0), vec(schema_2d, 1, 1)) == pytest.approx(
            np.sqrt(2)
        )

    def test_single_mismatch_in_three_dims(self):
        schema = AttributeSchema(
            dimensions=(("a", ("x", "y")), ("b", ("x", "y")), ("c", ("x", "y")))
        )
        assert raw_distance(vec(schema, 0, 0, 0), vec(schema, 0, 1, 0)) == 1.0

    def test_schema_mismatch(self, schema_2d, schema_1d):
        with pytest.raises(ValueError):
            raw_distance(vec(schema_2d, 0, 0), vec(schema_1d, 0))


class TestLocationMode:
    def test_majority(self):
        schema = AttributeSchema(dimensions=(("p", ("A", "B")), ("q", ("X", "Y"))))
        occ = [vec(schema, 0, 0), vec(schema, 0, 1), vec(schema, 1, 1)]
        assert location_mode(occ).values == (0, 1)

    def test_single_occupant(self, schema_2d):
        v = vec(schema_2d, 1, 2)
        assert location_mode([v]) == v

    def test_tie_breaks_to_lowest_index(self):
        schema = AttributeSchema(dimensions=(("g", ("A", "B")),))
        occ = [vec(schema, 0), vec(schema, 1)]
        assert location_mode(occ).values == (0,)
        assert location_mode(list(reversed(occ))).values == (0,)

    def test_permutation_invariance(self):
        schema = AttributeSchema(dimensions=(("g", ("A", "B", "C")),))
        rng = np.random.default_rng(7)
        occ = [vec(schema, int(v)) for v in rng.integers(0, 3, size=25)]
        baseline = location_mode(occ)
        for _ in range(10):
            shuffled = [occ[i] for i in rng.permutation(len(occ))]
            assert location_mode(shuffled) == baseline
            assert location_mode(shuffled).values == mode_brute(shuffled)

    def test_empty(self):
        with pytest.raises(ValueError):
            location_mode([])
