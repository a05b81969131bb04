"""Shared generators for randomized tests.

Random complexes are built with honest d∘d = 0: the differential is
factored as d^k = R_{k+1} S_k where the columns of R_{k+1} are drawn from
the kernel of S_{k+1}, so consecutive compositions vanish identically.
"""

from fractions import Fraction

from kbhom.complexes import Complex, DoubleComplex, tensor_double
from kbhom.linalg import Matrix, kernel_basis


def random_matrix(rng, rows, cols, density=0.5, span=3):
    entries = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                v = rng.randint(-span, span)
                if v:
                    entries[(i, j)] = Fraction(v)
    return Matrix(rows, cols, entries)


def random_complex(rng, lo=0, hi=3, max_dim=4):
    dims = {k: rng.randint(0, max_dim) for k in range(lo, hi + 1)}
    mids = {k: rng.randint(1, max_dim) for k in range(lo, hi + 1)}
    s = {k: random_matrix(rng, mids[k], dims.get(k, 0)) for k in range(lo, hi + 1)}
    diffs = {}
    for k in range(lo, hi):
        tgt = dims.get(k + 1, 0)
        if not dims.get(k) or not tgt:
            continue
        ker = kernel_basis(s[k + 1])
        coeff = random_matrix(rng, ker.dim, mids[k])
        diffs[k] = (ker.basis * coeff) * s[k]
    return Complex(dims, diffs)


def dc_from_complex(c, direction):
    """Place a complex along rows (direction 1, cells (k,0)) or columns."""
    if direction == 1:
        spaces = {(k, 0): d for k, d in c.spaces.items()}
        return DoubleComplex(spaces, d1={(k, 0): m for k, m in c.diffs.items()})
    spaces = {(0, k): d for k, d in c.spaces.items()}
    return DoubleComplex(spaces, d2={(0, k): m for k, m in c.diffs.items()})


def random_double_complex(rng, max_dim=3):
    """A random honest bicomplex: row complex ⊗ column complex."""
    row = random_complex(rng, 0, rng.randint(1, 2), max_dim)
    col = random_complex(rng, 0, rng.randint(1, 2), max_dim)
    return tensor_double(dc_from_complex(row, 1), dc_from_complex(col, 2))


def convolve(a: dict, b: dict) -> dict:
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            if x and y:
                out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def split_ses(a, c, twist=None):
    """0 -> A -> A⊕C -> C -> 0 with an optional compatible twist block.

    The twist h: C^k -> A^{k+1} must satisfy d_A h + h d_C = 0; the
    inclusion and projection are then chain maps and the sequence is
    degreewise split exact.
    """
    from kbhom.complexes import ChainMap

    twist = twist or {}
    spaces = {}
    for k in set(a.spaces) | set(c.spaces):
        spaces[k] = a.dim(k) + c.dim(k)
    diffs = {}
    for k in sorted(spaces):
        entries = {}
        for (i, j), v in a.d(k).entries.items():
            entries[(i, j)] = v
        for (i, j), v in c.d(k).entries.items():
            entries[(a.dim(k + 1) + i, a.dim(k) + j)] = v
        for (i, j), v in twist.get(k, Matrix.zero(0, 0)).entries.items():
            entries[(i, a.dim(k) + j)] = v
        m = Matrix(spaces.get(k + 1, 0), spaces.get(k, 0), entries)
        if not m.is_zero():
            diffs[k] = m
    b = Complex(spaces, diffs)
    f = ChainMap(a, b, {k: Matrix(b.dim(k), a.dim(k),
                                  {(i, i): 1 for i in range(a.dim(k))})
                        for k in a.spaces})
    g = ChainMap(b, c, {k: Matrix(c.dim(k), b.dim(k),
                                  {(i, a.dim(k) + i): 1 for i in range(c.dim(k))})
                        for k in c.spaces})
    return f, g


def random_split_ses(rng, lo=0, hi=2, max_dim=3):
    """A random degreewise-split short exact sequence with a twisted middle."""
    a = random_complex(rng, lo, hi, max_dim)
    c = random_complex(rng, lo, hi, max_dim)
    lift = {k: random_matrix(rng, a.dim(k), c.dim(k))
            for k in set(a.spaces) | set(c.spaces)}
    twist = {}
    for k in sorted(set(a.spaces) | set(c.spaces)):
        g_k = lift.get(k, Matrix.zero(a.dim(k), c.dim(k)))
        g_k1 = lift.get(k + 1, Matrix.zero(a.dim(k + 1), c.dim(k + 1)))
        twist[k] = a.d(k) * g_k - g_k1 * c.d(k)
    return split_ses(a, c, twist)
