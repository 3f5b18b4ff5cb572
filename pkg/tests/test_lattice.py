import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticewire.exceptions import ConfigurationError, InvalidPointError
from latticewire.lattice import (
    SCHEMES,
    BinaryCode,
    ConstructionALattice,
    build_binary_code,
    carve_codebook,
    carve_pam_codebook,
    coset_index,
    get_scheme,
    gf2_rank,
    min_squared_distance,
    randomness_set,
)

from oracles import brute_min_squared_distance, enumerate_code


def as_set(arr):
    return {tuple(int(v) for v in row) for row in np.asarray(arr)}


class TestBinaryCode:
    def test_repetition2(self):
        assert as_set(build_binary_code("repetition2").codewords) == {(0, 0), (1, 1)}

    def test_full2(self):
        assert as_set(build_binary_code("full(2)").codewords) == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_parity4_is_even_weight_code(self):
        code = build_binary_code("parity4")
        even = {v for v in itertools.product((0, 1), repeat=4) if sum(v) % 2 == 0}
        assert as_set(code.codewords) == even
        assert len(code.codewords) == 8
        assert code.minimum_distance == 2

    def test_rm13(self):
        code = build_binary_code("rm13")
        words = code.codewords
        assert words.shape == (16, 8)
        assert len(as_set(words)) == 16
        assert code.minimum_distance == 4
        assert (code.length, code.dimension) == (8, 4)

    @pytest.mark.parametrize("name", ["full(1)", "full(3)", "repetition2", "parity4", "rm13"])
    def test_enumeration_matches_brute_force(self, name):
        code = build_binary_code(name)
        assert gf2_rank(code.generators) == code.dimension
        assert as_set(code.codewords) == set(enumerate_code(code.generators))
        assert (0,) * code.length in as_set(code.codewords)

    def test_unknown_name(self):
        with pytest.raises(ConfigurationError):
            build_binary_code("golay24")

    def test_dependent_generators_rejected(self):
        with pytest.raises(ConfigurationError):
            BinaryCode("bad", [[1, 1, 0], [0, 1, 1], [1, 0, 1]])

    def test_information_index_round_trip(self):
        code = build_binary_code("rm13")
        for j, w in enumerate(code.codewords):
            assert code.information_index(w) == j
        with pytest.raises(InvalidPointError):
            code.information_index([1, 0, 0, 0, 0, 0, 0, 0])


class TestCarving:
    def test_d2_sets(self):
        cb = carve_codebook(build_binary_code("repetition2"), 4, 2)
        assert as_set(cb.cosets[0]) == {(0, 2), (2, 0), (2, 2), (0, 0)}
        assert as_set(cb.cosets[1]) == {(1, 3), (3, 1), (3, 3), (1, 1)}

    def test_z2_conventional(self):
        cb = carve_codebook(build_binary_code("full(1)"), 2, 0)
        assert cb.cosets[:, :, 0].tolist() == [[0], [1]]

    def test_z_one_secret_two_random(self):
        cb = get_scheme("coset-z-1s2r").codebook()
        assert cb.cosets[:, :, 0].tolist() == [[0, 2, 4, 6], [1, 3, 5, 7]]

    def test_pam_rule(self):
        cb = carve_pam_codebook(8, 3, 0)
        assert cb.cosets[:, 0, 0].tolist() == list(range(8))
        with pytest.raises(ConfigurationError):
            carve_pam_codebook(8, 2, 0)

    def test_too_much_randomness(self):
        with pytest.raises(ConfigurationError):
            carve_codebook(build_binary_code("repetition2"), 4, 3)
        with pytest.raises(ConfigurationError):
            randomness_set(2, 5, 1)

    def test_truncated_randomness_is_lexicographic(self):
        t = randomness_set(2, 6, 2)
        assert t.tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]

    @pytest.mark.parametrize("name", list(SCHEMES))
    def test_scheme_table(self, name):
        s = get_scheme(name)
        cb = s.codebook()
        assert (cb.L, cb.M, cb.k, cb.r) == (s.L, s.M, s.k, s.r)
        assert cb.cosets.shape == (2**s.k, 2**s.r, s.L)
        pts = cb.points
        assert len(as_set(pts)) == 2 ** (s.k + s.r)
        assert pts.min() >= 0 and pts.max() <= s.M - 1

    @pytest.mark.parametrize("name", [n for n, s in SCHEMES.items() if s.code_name])
    def test_construction_a_membership(self, name):
        cb = get_scheme(name).codebook()
        lat = ConstructionALattice(cb.code)
        for j in range(2**cb.k):
            for p in cb.cosets[j]:
                assert lat.contains(p)
                assert cb.code.contains(p % 2)
            diffs = cb.cosets[j][:, None, :] - cb.cosets[j][None, :, :]
            assert np.all(diffs % 2 == 0)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigurationError):
            get_scheme("coset-a2")


class TestCosetIndex:
    def test_examples(self):
        d2 = get_scheme("coset-d2").codebook()
        assert coset_index((1, 3), d2) == 1
        for name, s in SCHEMES.items():
            assert coset_index(np.zeros(s.L, dtype=int), s.codebook()) == 0

    @pytest.mark.parametrize("name", list(SCHEMES))
    def test_exhaustive_counts(self, name):
        cb = get_scheme(name).codebook()
        got = np.array([coset_index(p, cb) for p in cb.points])
        assert np.array_equal(np.bincount(got, minlength=2**cb.k), np.full(2**cb.k, 2**cb.r))

    @pytest.mark.parametrize("name", [n for n, s in SCHEMES.items() if s.code_name])
    def test_index_is_systematic_information_value(self, name):
        cb = get_scheme(name).codebook()
        for p in cb.points:
            assert coset_index(p, cb) == cb.code.information_index(p % 2)

    def test_point_outside(self):
        with pytest.raises(InvalidPointError):
            coset_index((0, 1), get_scheme("coset-d2").codebook())


class TestMinDistance:
    @pytest.mark.parametrize("name, d2", [("coset-d2", 2), ("conv-e8", 4), ("conv-z2", 1)])
    def test_examples(self, name, d2):
        cb = get_scheme(name).codebook()
        assert min_squared_distance(cb) == d2 == brute_min_squared_distance(cb.points)

    def test_single_point(self):
        cb = carve_codebook(build_binary_code("full(1)"), 2, 0)
        one = type(cb)(1, 2, 0, 0, cb.cosets[:1])
        with pytest.raises(ValueError):
            min_squared_distance(one)


@settings(max_examples=200, deadline=None)
@given(
    name=st.sampled_from(["repetition2", "parity4", "rm13", "full(3)"]),
    data=st.data(),
)
def test_lattice_closed_under_addition(name, data):
    lat = ConstructionALattice(build_binary_code(name))
    L = lat.dimension
    words = lat.code.codewords
    pick = st.integers(0, len(words) - 1)
    shift = st.lists(st.integers(-50, 50), min_size=L, max_size=L)
    a = words[data.draw(pick)] + 2 * np.array(data.draw(shift))
    b = words[data.draw(pick)] + 2 * np.array(data.draw(shift))
    assert lat.contains(a) and lat.contains(b)
    assert lat.contains(a + b) and lat.contains(a - b)
