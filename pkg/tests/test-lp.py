import numpy as np
import pytest

from zecap.errors import Infeasible, LpError, Unbounded
from zecap.lp import LpProblem, solve_lp


def test_two_variable_maximization():
    'vertex optimum of a small inequality system'
    p = LpProblem(c=[-1, -1], a_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    sol = solve_lp(p)
    assert sol.optimum == pytest.approx(-2.8, abs=1e-12)
    assert sol.x == pytest.approx([1.6, 1.2], abs=1e-12)
    assert sol.iterations >= 2


def test_negative_right_hand_side():
    'rows with negative b are flipped and need phase 1'
    p = LpProblem(c=[1, 1], a_ub=[[-1, -1]], b_ub=[-2])
    sol = solve_lp(p)
    assert sol.optimum == pytest.approx(2, abs=1e-12)
    assert sol.x.sum() == pytest.approx(2, abs=1e-12)


def test_redundant_equalities():
    'linearly dependent equality rows are dropped after phase 1'
    p = LpProblem(c=[1, 2], a_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    sol = solve_lp(p)
    assert sol.optimum == pytest.approx(1, abs=1e-12)
    assert sol.x == pytest.approx([1, 0], abs=1e-12)


def test_infeasible():
    'phase 1 residual above tolerance'
    p = LpProblem(c=[0, 0], a_ub=[[1, 1]], b_ub=[0.5],
                  a_eq=[[1, 1]], b_eq=[1])
    with pytest.raises(Infeasible) as excinfo:
        solve_lp(p)
    assert excinfo.value.residual == pytest.approx(0.5, abs=1e-9)
    assert isinstance(excinfo.value, LpError)


def test_unbounded():
    'a ray along which the objective decreases'
    p = LpProblem(c=[-1, 0], a_ub=[[1, -1]], b_ub=[1])
    with pytest.raises(Unbounded):
        solve_lp(p)


def test_minimax_over_simplex():
    'min u s.t. f(x) + f(x + 1) <= u on a 5-cycle, sum f = 1'
    k = 5
    a_ub = np.zeros((k, k + 1))
    for x in range(k):
        a_ub[x, x] = a_ub[x, (x + 1) % k] = 1
        a_ub[x, -1] = -1
    a_eq = [[1] * k + [0]]
    c = [0] * k + [1]
    sol = solve_lp(LpProblem(c, a_ub, [0] * k, a_eq, [1]))
    assert sol.optimum == pytest.approx(0.4, abs=1e-12)
    assert sol.x[:k] == pytest.approx([0.2] * k, abs=1e-12)


def test_problem_dimensions():
    'shapes are checked on construction'
    with pytest.raises(ValueError):
        LpProblem(c=[])
    with pytest.raises(ValueError):
        LpProblem(c=[1, 2], a_ub=[[1, 2, 3]], b_ub=[1])
    with pytest.raises(ValueError):
        LpProblem(c=[1, 2], a_ub=[[1, 2]], b_ub=[1, 2])
    with pytest.raises(ValueError):
        LpProblem(c=[1, 2], names=['a'])


def test_to_text():
    'plain text dump lists the objective and every row'
    p = LpProblem(c=[0, 1], a_ub=[[1, -1]], b_ub=[0], a_eq=[[1, 0]],
                  b_eq=[1], names=['f', 'u'], title='demo')
    text = p.to_text()
    lines = text.splitlines()
    assert lines[0] == '# demo'
    assert lines[2].startswith('min')
    assert lines[3].startswith('ub0') and lines[3].endswith('<= 0')
    assert lines[4].startswith('eq0') and lines[4].endswith('= 1')
    assert repr(p) == 'LpProblem(vars=2, ub=1, eq=1)'
