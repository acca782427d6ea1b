import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralblockade.errors import InvalidDimensionError, ShapeError
from chiralblockade.fock import (
    FockSpace,
    Operator,
    destroy,
    embed,
    expectation,
    identity,
    mode_operators,
    number,
)
from chiralblockade.liouville import DensityMatrix


def ket(n, levels):
    v = np.zeros(levels, dtype=complex)
    v[n] = 1
    return v


def test_destroy_ladder():
    assert np.allclose(destroy(2) @ ket(1, 2), ket(0, 2))
    assert np.allclose(destroy(3) @ ket(2, 3), np.sqrt(2) * ket(1, 3))
    assert np.allclose(destroy(3) @ ket(0, 3), 0)


@pytest.mark.parametrize("n", [1, 0, -3, 2.5])
def test_destroy_rejects_small_dimension(n):
    with pytest.raises(InvalidDimensionError):
        destroy(n)


def test_space_validation():
    with pytest.raises(InvalidDimensionError):
        FockSpace((3, 1, 3))
    assert FockSpace.truncated(2).dim == 27
    assert FockSpace((2, 3, 4)).dim == 24


def test_basis_is_row_major_and_matches_kron():
    space = FockSpace((2, 3, 4))
    assert space.index((0, 0, 0)) == 0
    assert space.index((0, 0, 1)) == 1
    assert space.index((0, 1, 0)) == 4
    assert space.index((1, 0, 0)) == 12
    for i in range(space.dim):
        assert space.index(space.occupations(i)) == i
    na, nm, nb = (ket(k, d) for k, d in zip((1, 2, 3), space.mode_dims))
    assert np.array_equal(np.kron(na, np.kron(nm, nb)), space.basis_state((1, 2, 3)))


def test_embed_identity_and_slot():
    space = FockSpace((2, 2, 2))
    for slot in range(3):
        lifted = embed(identity(FockSpace((2,))), slot, space)
        assert np.array_equal(lifted.matrix, np.eye(8))
    a = embed(destroy(2), "a", space)
    assert np.allclose(a @ space.basis_state((1, 1, 1)), space.basis_state((0, 1, 1)))


def test_embed_shape_errors():
    with pytest.raises(ShapeError):
        embed(destroy(3), 0, FockSpace((2, 2, 2)))
    with pytest.raises(ShapeError):
        embed(destroy(2), 5, FockSpace((2, 2, 2)))
    with pytest.raises(ShapeError):
        Operator(FockSpace((2,)), np.eye(3))


def test_number_eigenvalue():
    space = FockSpace((3, 2, 2))
    n_a = number(space, "a")
    assert n_a.element((2, 0, 0), (2, 0, 0)) == pytest.approx(2)
    a = embed(destroy(3), 0, space)
    assert np.array_equal((a.dag() @ a).matrix, n_a.matrix)


def test_expectation_examples():
    space = FockSpace.truncated(2)
    n_a = number(space, "a")
    vac = DensityMatrix.vacuum(space)
    assert expectation(identity(space), vac) == pytest.approx(1)
    assert expectation(n_a, vac) == 0
    assert expectation(n_a, DensityMatrix.fock(space, (1, 0, 0))) == pytest.approx(1)
    with pytest.raises(ShapeError):
        expectation(number(FockSpace((2, 2, 2)), "a"), vac)


def test_operator_is_immutable():
    a = destroy(3)
    with pytest.raises(ValueError):
        a.matrix[0, 1] = 5


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=3))
def test_commutators_and_adjoint(dims):
    space = FockSpace(tuple(dims))
    ops = mode_operators(space)
    top = [space.occupations(i) for i in range(space.dim)]
    for k, x in enumerate(ops):
        comm = (x @ x.dag() - x.dag() @ x).matrix
        # [x, x+] = 1 on every basis state below the top level of mode k
        below = np.array([occ[k] < dims[k] - 1 for occ in top])
        sub = comm[np.ix_(below, below)]
        assert np.max(np.abs(sub - np.eye(below.sum()))) <= 1e-14
        single = destroy(dims[k])
        assert np.array_equal(embed(single.dag(), k, space).matrix, embed(single, k, space).dag().matrix)
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            for p in (ops[i], ops[i].dag()):
                for q in (ops[j], ops[j].dag()):
                    assert np.max(np.abs((p @ q - q @ p).matrix)) <= 1e-14
