"""Whitehead automorphisms, orbit minimization, and the orbit decision."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from freemono.decider import image_rank
from freemono.whitehead import (
    OrbitCertificate,
    WhiteheadAut,
    apply,
    compose_letter_images,
    enumerate_whitehead,
    equivalent,
    find_conjugator,
    identity_aut,
    minimize,
    nielsen_decompose,
    orbit_canonical,
    orbit_gcd_invariant,
    type1_generators,
    type2_all,
)
from freemono.words import (
    concat,
    conjugate,
    cyclic_core,
    invert,
    random_word,
    reduce,
    substitute,
)

from oracles import orbit_components, reduced_words_upto


def small_words(max_len=6):
    letters = st.integers(min_value=-2, max_value=2).filter(lambda a: a != 0)
    return st.lists(letters, max_size=max_len).map(reduce)


class TestGenerators:
    def test_counts_rank_two(self):
        assert len(type1_generators(2)) == 4
        assert len(type2_all(2)) == 16
        assert len(enumerate_whitehead(2)) == 20
        with_x1 = [a for a in type2_all(2) if a.multiplier == 1]
        assert len(with_x1) == 4

    def test_identity(self):
        e = identity_aut(2)
        assert e.is_identity()
        assert e((1, 2, -1)) == (1, 2, -1)
        assert sum(a.is_identity() for a in enumerate_whitehead(2)) >= 1

    def test_validation(self):
        with pytest.raises(ValueError):
            WhiteheadAut(2, perm=(1, 1))
        with pytest.raises(ValueError):
            WhiteheadAut(2, multiplier=1, cut=frozenset({2}))
        with pytest.raises(ValueError):
            WhiteheadAut(2, multiplier=1, cut=frozenset({1, -1}))
        with pytest.raises(ValueError):
            WhiteheadAut(2, perm=(1, 2), multiplier=1, cut=frozenset({1}))


class TestApply:
    def test_type_one_swap(self):
        swap = WhiteheadAut(2, perm=(2, 1))
        assert swap((1, -2)) == (2, -1)
        assert apply(swap, (1, 1)) == (2, 2)

    def test_type_two_table(self):
        aut = WhiteheadAut(2, multiplier=2, cut=frozenset({2, 1}))
        assert aut.letter_image(1) == (1, 2)
        assert aut.letter_image(2) == (2,)
        assert aut((1,)) == (1, 2)
        both = WhiteheadAut(2, multiplier=2, cut=frozenset({2, 1, -1}))
        assert both.letter_image(1) == (-2, 1, 2)
        neither = WhiteheadAut(2, multiplier=2, cut=frozenset({2}))
        assert neither.is_identity()

    def test_describe(self):
        assert WhiteheadAut(2, perm=(2, 1)).describe() == "typeI a>b b>a"
        aut = WhiteheadAut(2, multiplier=2, cut=frozenset({2, 1}))
        assert aut.describe() == "typeII a=b S={a,b}"

    @given(small_words())
    @settings(max_examples=60, deadline=None)
    def test_inverse_cancels(self, w):
        for aut in enumerate_whitehead(2):
            assert aut.inverse()(aut(w)) == w

    @given(small_words(), small_words())
    @settings(max_examples=60, deadline=None)
    def test_homomorphism(self, a, b):
        for aut in enumerate_whitehead(2)[:8]:
            assert aut(concat(a, b)) == concat(aut(a), aut(b))


class TestMinimize:
    def test_examples(self):
        minimal, moves = minimize([(1, 2, -1)], 2)
        assert minimal == ((2,),)
        minimal, _ = minimize([(1, 2)], 2)
        assert len(minimal[0]) == 1
        minimal, moves = minimize([(1, 2, -1, -2)], 2)
        assert minimal == ((1, 2, -1, -2),)
        assert moves == ()

    def test_moves_replay(self):
        w = (1, 1, 2, -1)
        minimal, moves = minimize([w], 2)
        img = cyclic_core(w)
        for aut in moves:
            img = cyclic_core(aut(img))
        assert img == minimal[0]

    @given(small_words())
    @settings(max_examples=60, deadline=None)
    def test_minimal_is_stable(self, w):
        minimal, _ = minimize([w], 2)
        again, moves = minimize([minimal[0]], 2)
        assert again == minimal
        assert moves == ()


class TestGcdInvariant:
    def test_examples(self):
        assert orbit_gcd_invariant((1, 1), 2) == 2
        assert orbit_gcd_invariant((1, 2, -1, -2), 2) == 0
        assert orbit_gcd_invariant((1, 2), 2) == 1

    @given(small_words())
    @settings(max_examples=40, deadline=None)
    def test_constant_on_orbit(self, w):
        g = orbit_gcd_invariant(w, 2)
        for aut in enumerate_whitehead(2):
            assert orbit_gcd_invariant(aut(w), 2) == g


class TestFindConjugator:
    def test_examples(self):
        assert find_conjugator((1, 2), (2, 1)) == (1,)
        assert find_conjugator((1,), (2,)) is None
        assert find_conjugator((), ()) == ()

    @given(small_words(), small_words(3))
    @settings(max_examples=80, deadline=None)
    def test_found_conjugator_works(self, w, g):
        v = conjugate(w, g)
        c = find_conjugator(v, w)
        assert c is not None
        assert concat(c, w, invert(c)) == v


class TestEquivalent:
    def test_primitive_to_primitive(self):
        cert = equivalent([(1,)], [(1, 2)], 2)
        assert cert is not None
        assert cert.apply((1,)) == (1, 2)

    def test_distinct_orbits(self):
        assert equivalent([(1, 1)], [(1, 1, 1)], 2) is None
        assert equivalent([(1, 1)], [(1, 2, -1, -2)], 2) is None
        assert equivalent([(1,)], [()], 2) is None

    def test_exact_equality_not_conjugacy(self):
        cert = equivalent([(2, 1)], [(1, 2)], 2)
        assert cert is not None
        assert cert.apply((2, 1)) == (1, 2)

    def test_identity_case(self):
        cert = equivalent([(1, 2)], [(1, 2)], 2)
        assert cert is not None
        assert cert.apply((1, 2)) == (1, 2)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            equivalent([(1,)], [(1,), (2,)], 2)

    def test_certificate_is_automorphism(self):
        cert = equivalent([(1, 1, 2)], [(2, 2, 1)], 2)
        assert cert is not None
        images = cert.letter_images()
        assert image_rank(images) == 2
        assert substitute((1, 1, 2), images) == (2, 2, 1)

    def test_serialize_mentions_moves_and_conjugator(self):
        cert = equivalent([(1,)], [(1, 2)], 2)
        text = cert.serialize()
        assert text.splitlines()[-1].startswith("conj ")
        for line in text.splitlines()[:-1]:
            assert line.startswith("typeI") or line.startswith("typeII")

    @given(small_words(4), st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=50, deadline=None)
    def test_replay_on_random_orbit_images(self, u, seed):
        rng = random.Random(seed)
        auts = enumerate_whitehead(2)
        v = u
        for _ in range(rng.randrange(4)):
            v = rng.choice(auts)(v)
        g = random_word(rng, 2, rng.randrange(3))
        v = conjugate(v, g)
        cert = equivalent([u], [v], 2)
        assert cert is not None
        assert cert.apply(u) == v

    @given(small_words(4), small_words(4))
    @settings(max_examples=40, deadline=None)
    def test_symmetric(self, u, v):
        assert (equivalent([u], [v], 2) is None) == (equivalent([v], [u], 2) is None)


class TestOrbitCanonical:
    def test_primitive_class(self):
        assert orbit_canonical((1,), 2) == orbit_canonical((2, 1, 1), 2) == orbit_canonical((2,), 2)

    def test_separates_powers(self):
        forms = {orbit_canonical(w, 2) for w in [(1,), (1, 1), (1, 1, 1), (1, 2, -1, -2)]}
        assert len(forms) == 4

    @given(small_words(4), small_words(4))
    @settings(max_examples=60, deadline=None)
    def test_matches_equivalent(self, u, v):
        same = orbit_canonical(u, 2) == orbit_canonical(v, 2)
        assert same == (equivalent([u], [v], 2) is not None)


class TestAgainstMoveComponents:
    def test_partition_of_short_words(self):
        comp = orbit_components(2, 6)
        words = reduced_words_upto(2, 3, include_identity=True)
        reps: list = []
        for w in words:
            for r in reps:
                if comp[r] == comp[w]:
                    assert equivalent([r], [w], 2) is not None, (r, w)
                    break
            else:
                for r in reps:
                    assert equivalent([r], [w], 2) is None, (r, w)
                reps.append(w)


class TestTupleEquivalence:
    def test_swap_pair(self):
        cert = equivalent([(1,), (2,)], [(2,), (1,)], 2)
        assert cert is not None
        assert cert.apply((1,)) == (2,)
        assert cert.apply((2,)) == (1,)

    def test_basis_to_nonbasis(self):
        assert equivalent([(1,), (2,)], [(1,), (1,)], 2) is None

    def test_joint_versus_separate(self):
        # separately equivalent but not jointly: both map to x1 yet no
        # single automorphism sends x1 to x1 and x1x2x1^-1 to x1
        assert equivalent([(1,)], [(1,)], 2) is not None
        assert equivalent([(1, 2, -1)], [(1,)], 2) is not None
        joint = equivalent([(1,), (1, 2, -1)], [(1,), (1,)], 2)
        assert joint is None


class TestNielsenDecompose:
    def test_roundtrip_examples(self):
        for images in [((1, 2), (2,)), ((2,), (1,)), ((-1,), (2, 1))]:
            moves = nielsen_decompose(images, 2)
            assert compose_letter_images(moves, 2) == images

    def test_rejects_non_automorphism(self):
        with pytest.raises(AssertionError):
            nielsen_decompose(((1, 1), (2,)), 2)

    @given(st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_roundtrip_random_compositions(self, seed):
        rng = random.Random(seed)
        auts = enumerate_whitehead(2)
        picked = [rng.choice(auts) for _ in range(rng.randrange(1, 5))]
        images = compose_letter_images(picked, 2)
        moves = nielsen_decompose(images, 2)
        assert compose_letter_images(moves, 2) == images
