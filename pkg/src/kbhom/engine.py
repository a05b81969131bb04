"""Koszul-Brylinski engine.

Builds the bicomplex K^{p,q} = A^{-p,q} of a model (first differential
the derived Koszul operator, second differential delbar), totalizes it,
and reads homology off in the geometric indexing

    H_k = H^{k-n}(total complex),   k = 0 .. 2n,

so tables match the theorem-level statements directly.  Also computes
the Hodge diamond (columnwise delbar-cohomology) and Hochschild
dimensions through the HKR antidiagonal sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import Complex, DoubleComplex, homology_dims, total_complex
from .models import DolbeaultPoissonModel, koszul_differential


@dataclass(frozen=True, eq=False)
class KBDims:
    """Koszul-Brylinski homology dimensions, k in [0, 2n]."""

    n: int
    dims: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.dims.items():
            if v < 0:
                raise ValueError("negative dimension")
            if not 0 <= k <= 2 * self.n:
                if v:
                    raise ValueError(f"nonzero dimension at k={k} outside [0, {2 * self.n}]")
                continue
            if v:
                clean[int(k)] = int(v)
        object.__setattr__(self, "dims", clean)

    def __getitem__(self, k: int) -> int:
        return self.dims.get(k, 0)

    def __eq__(self, other):
        return (isinstance(other, KBDims) and self.n == other.n
                and self.dims == other.dims)

    def table(self) -> list:
        return [(k, self[k]) for k in range(2 * self.n + 1)]

    def records(self) -> list:
        """JSON-ready rows, one {"k": ..., "dim": ...} per degree."""
        return [{"k": k, "dim": self[k]} for k in range(2 * self.n + 1)]


@dataclass(frozen=True, eq=False)
class HodgeDiamond:
    """Dolbeault dimensions h^{p,q}, 0 <= p,q <= n."""

    n: int
    h: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (p, q), v in self.h.items():
            if v < 0:
                raise ValueError("negative Hodge number")
            if not (0 <= p <= self.n and 0 <= q <= self.n):
                if v:
                    raise ValueError(f"nonzero Hodge number at {(p, q)} outside range")
                continue
            if v:
                clean[(int(p), int(q))] = int(v)
        object.__setattr__(self, "h", clean)

    def __getitem__(self, key) -> int:
        return self.h.get(key, 0)

    def __eq__(self, other):
        return (isinstance(other, HodgeDiamond) and self.n == other.n
                and self.h == other.h)


@dataclass(frozen=True, eq=False)
class HHDims:
    """Hochschild homology dimensions, Z-graded (support in [-n, n])."""

    dims: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.dims.items():
            if v < 0:
                raise ValueError("negative dimension")
            if v:
                clean[int(k)] = int(v)
        object.__setattr__(self, "dims", clean)

    def __getitem__(self, k: int) -> int:
        return self.dims.get(k, 0)

    def __eq__(self, other):
        return isinstance(other, HHDims) and self.dims == other.dims

    def records(self) -> list:
        return [{"k": k, "dim": v} for k, v in sorted(self.dims.items())]


def kb_double_complex(m: DolbeaultPoissonModel) -> DoubleComplex:
    """The bicomplex with cell (p,q) = model space (-p,q), p in [-n, 0].

    d1 is the derived Koszul differential reindexed (it raises p by one
    because it lowers the model's holomorphic degree), d2 is delbar.
    Building the Koszul differential validates the model first.
    """
    kos = koszul_differential(m)
    spaces = {(-a, q): m.dim(a, q) for (a, q) in m.cells()}
    d1 = {}
    d2 = {}
    for (a, q) in m.cells():
        block = kos.at(m, a, q)
        if not block.is_zero():
            d1[(-a, q)] = block
        bar = m.delbar_at(a, q)
        if not bar.is_zero():
            d2[(-a, q)] = bar
    return DoubleComplex(spaces, d1, d2)


def kb_homology(m: DolbeaultPoissonModel) -> KBDims:
    """H_k for k in [0, 2n], read off the total complex at degree k - n."""
    total = total_complex(kb_double_complex(m))
    h = homology_dims(total)
    return KBDims(m.n, {k: h.get(k - m.n, 0) for k in range(2 * m.n + 1)})


def hodge_diamond(m: DolbeaultPoissonModel) -> HodgeDiamond:
    """h^{p,q} = dim H^q of the column (p, •) under delbar."""
    out = {}
    for p in range(m.n + 1):
        column = Complex({q: m.dim(p, q) for q in range(m.n + 1)},
                         {q: m.delbar_at(p, q) for q in range(m.n + 1)
                          if not m.delbar_at(p, q).is_zero()})
        for q, h in homology_dims(column).items():
            if h:
                out[(p, q)] = h
    return HodgeDiamond(m.n, out)


def hkr_hochschild(h: HodgeDiamond) -> HHDims:
    """HH_k = sum of h^{p,q} over the antidiagonal p - q = k."""
    dims: dict = {}
    for (p, q), v in h.h.items():
        dims[p - q] = dims.get(p - q, 0) + v
    return HHDims(dims)


def euler_char(d: KBDims) -> int:
    """Alternating sum of the KB dimensions."""
    return sum((-1) ** k * v for k, v in d.dims.items())
