from gravgla import linalg
from gravgla.clifford import MONOMIALS
from gravgla.glaoid import coords, default_ideal
from gravgla.slashed import (NL, auxiliary_table, cl_span, complement_indices, explicit_basis_slashed,
                             f_matrix, freeness_decomposition, gr_islash, parity_split, projection_to_complement,
                             rank_tables, slashed_ideal)


def test_filtered_rank_tables():
    t = rank_tables()
    assert t["Lslash"] == [11, 44, 77, 88, 88]
    assert t["Pslash"] == [21, 48, 67, 72, 72]
    assert t["image"] == [11, 44, 67, 72, 72]
    assert t["Islash"] == [0, 0, 10, 16, 16]
    assert t["Islash_total"] == 32


def test_f_not_onto_at_low_levels():
    t = rank_tables()
    assert t["image"][0] < t["Pslash"][0]
    assert t["image"][1] < t["Pslash"][1]
    assert all(t["image"][k] == t["Pslash"][k] for k in (2, 3, 4))


def test_auxiliary_table():
    t = auxiliary_table()
    assert t["left"] == [6, 24, 42, 48, 48]
    assert t["right"] == [16, 28, 32, 32, 32]
    assert t["surjective"] == [False, False, True, True, True]


def test_kernel_is_generated_in_level_two():
    top = slashed_ideal()
    assert len(top) == 32
    assert linalg.span_equal(cl_span(slashed_ideal(2)), top, NL)
    assert linalg.span_equal(slashed_ideal(2), explicit_basis_slashed(), NL)


def test_kernel_vectors_are_killed():
    F = f_matrix()
    for v in slashed_ideal():
        col = linalg.matrix([[x] for x in v])
        assert all(x == 0 for x in (F * col).entries())


def test_freeness_ranks():
    fr = freeness_decomposition()
    assert len(fr.A) == 9 and len(fr.B) == 2
    assert len(fr.cl_A) == 16 * 9 and len(fr.cl_B) == 16 * 2
    assert linalg.span_equal(fr.cl_B, slashed_ideal(), NL)
    assert linalg.rank(fr.cl_A + fr.cl_B, NL) == NL
    # free Z2-graded modules have balanced parity
    assert parity_split(fr.cl_B) == (16, 16)


def test_associated_graded_recovers_ideal():
    ideal = default_ideal()
    ranks = []
    for k in range(5):
        g = gr_islash(k)
        ranks.append(len(g))
        if g:
            assert linalg.span_equal(g, ideal.rows[k], len(coords(k)))
    assert ranks == [0, 0, 10, 16, 6]


def test_complement_and_projection():
    comp = complement_indices()
    assert len(comp) == 144 == NL - 32
    P = projection_to_complement()
    assert (P.nrows(), P.ncols()) == (144, NL)
    for v in slashed_ideal()[:5]:
        col = linalg.matrix([[x] for x in v])
        assert all(x == 0 for x in (P * col).entries())


def test_constant_fiber_sizes():
    assert NL == 176 == len(MONOMIALS) * 11
