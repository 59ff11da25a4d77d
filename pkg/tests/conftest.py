import pytest

from covar import (
    Matrix,
    Poly,
    make_finite_group,
    symbolic_general_linear,
    verified,
)

SWAP = [["0", "1"], ["1", "0"]]
CYCLE3 = [["0", "0", "1"], ["1", "0", "0"], ["0", "1", "0"]]
SWAP3 = [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "1"]]


@pytest.fixture
def s2():
    return make_finite_group([(SWAP, SWAP)])


@pytest.fixture
def s3():
    return make_finite_group([(CYCLE3, CYCLE3), (SWAP3, SWAP3)])


@pytest.fixture
def vandermonde_pair(s2):
    x1, x2 = Poly.gens(s2.x_vars)
    return [verified(s2, [x1, x2]), verified(s2, [x1**2, x2**2])]


@pytest.fixture
def scalar_action():
    return symbolic_general_linear(1, "scalar", "scalar", x_copies=2, w_copies=1)


@pytest.fixture
def conj2():
    return symbolic_general_linear(2, "gl_conjugation", "gl_conjugation",
                                   x_copies=2, w_copies=1)


def word_covariants(action, words):
    """Covariants (A, B) -> A^i B^j built directly on the given action."""
    v = {name: Poly.var(name, action.x_vars) for name in action.x_vars}
    n = action.n
    labels = "ab"
    mats = []
    for copy in range(2):
        mats.append(Matrix([[v[f"{labels[copy]}{i}{j}"] for j in range(1, n + 1)]
                            for i in range(1, n + 1)]))
    out = []
    for i, j in words:
        M = Matrix.identity(n, next(iter(v.values())))
        for _ in range(i):
            M = M * mats[0]
        for _ in range(j):
            M = M * mats[1]
        out.append(verified(action, [M.entries[r][c]
                                     for r in range(n) for c in range(n)]))
    return out
