"""Model constructors and the "kbmodel/1" JSON serialization.

Constructors build invariant-form models on wedge-monomial bases:

* ``torus(n, pi)`` — all differentials zero, contraction from a constant
  bivector; the derived Koszul differential vanishes identically.
* ``parallelizable(n, c, pi)`` — Chevalley-Eilenberg differentials
  d(dz^k) = -Σ c^k_{ij} dz^i ∧ dz^j on the holomorphic generators,
  mirrored on the antiholomorphic ones (structure constants are
  rational, so conjugation is the identity).
* ``hodge_formal(diamond)`` — dimensions only, every operator zero.

Whether a model computes the Dolbeault cohomology of an actual manifold
is provenance recorded in metadata, never used in computation.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .engine import HodgeDiamond
from .linalg import Matrix
from .models import (
    DolbeaultPoissonModel,
    ModelValidationError,
    WedgeBasis,
    contraction_from_bivector,
    derivation_blocks,
    validate_model,
)

FORMAT = "kbmodel/1"

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


class ModelFileError(ValueError):
    """A model file is malformed (parse-level problem, not a math one)."""


class StructureConstantError(ValueError):
    """Structure constants are inconsistent (antisymmetry or Jacobi)."""


def torus(n: int, pi_coeffs=None) -> DolbeaultPoissonModel:
    """Invariant-form torus model: del = delbar = 0 on wedge monomials."""
    wedge = WedgeBasis.exterior(n)
    basis = {cell: wedge.labels(*cell) for cell in wedge.monomials}
    bare = DolbeaultPoissonModel(n, basis, wedge=wedge, name=f"torus{n}")
    contraction = {}
    if pi_coeffs is not None:
        contraction = contraction_from_bivector(bare, pi_coeffs)
    model = DolbeaultPoissonModel(
        n, basis, contraction_blocks=contraction, wedge=wedge, name=f"torus{n}",
        metadata={"family": "torus",
                  "asserts": "invariant forms compute the Dolbeault cohomology"})
    report = validate_model(model)
    if not report.ok:
        bad = report.first_failure()
        raise ModelValidationError(
            f"torus construction broke {bad.identity} at {bad.bidegree}",
            identity=bad.identity, bidegree=bad.bidegree)
    return model


def point() -> DolbeaultPoissonModel:
    """The n = 0 model: a single basis element, every operator zero."""
    return torus(0)


def _structure_images(n: int, structure: dict) -> dict:
    images: dict = {}
    for (i, j, k), c in structure.items():
        if not (1 <= i < j <= n):
            raise StructureConstantError(
                f"structure constant key ({i},{j},{k}) must have 1 <= i < j <= n")
        if not 1 <= k <= n:
            raise StructureConstantError(f"generator index {k} out of range")
        c = c if isinstance(c, Fraction) else Fraction(c)
        if c:
            images.setdefault(k, []).append((-c, (i, j)))
    return images


def parallelizable(n: int, structure: dict,
                   pi_coeffs=None) -> DolbeaultPoissonModel:
    """Invariant-form model of a complex parallelizable quotient.

    ``structure`` maps (i, j, k) with i < j to the rational constant
    c^k_{ij}; the holomorphic differential is the Chevalley-Eilenberg one
    and the antiholomorphic differential mirrors it on conjugate
    generators.  The Jacobi identity is checked before anything else;
    a bivector whose derived differential breaks the operator identities
    is rejected.
    """
    wedge = WedgeBasis.exterior(n)
    images = _structure_images(n, structure)
    del_blocks = derivation_blocks(wedge, images, hol=True)
    delbar_blocks = derivation_blocks(wedge, images, hol=False)
    # Jacobi <=> the CE differential squares to zero on the generators
    upper = del_blocks.get((2, 0))
    lower = del_blocks.get((1, 0))
    if upper is not None and lower is not None and not (upper * lower).is_zero():
        raise StructureConstantError(
            "structure constants violate the Jacobi identity")
    basis = {cell: wedge.labels(*cell) for cell in wedge.monomials}
    bare = DolbeaultPoissonModel(n, basis, del_blocks=del_blocks,
                                 delbar_blocks=delbar_blocks, wedge=wedge)
    contraction = {}
    if pi_coeffs is not None:
        contraction = contraction_from_bivector(bare, pi_coeffs)
    model = DolbeaultPoissonModel(
        n, basis, del_blocks=del_blocks, delbar_blocks=delbar_blocks,
        contraction_blocks=contraction, wedge=wedge, name=f"parallelizable{n}",
        metadata={"family": "parallelizable",
                  "asserts": "invariant forms compute the Dolbeault cohomology"})
    report = validate_model(model)
    if not report.ok:
        bad = report.first_failure()
        raise ModelValidationError(
            f"bivector rejected: {bad.identity} fails at bidegree {bad.bidegree}",
            identity=bad.identity, bidegree=bad.bidegree)
    return model


def hodge_formal(h: HodgeDiamond) -> DolbeaultPoissonModel:
    """A formal model carrying only dimensions; all operators are zero.

    Only the zero bivector makes sense downstream: there is no wedge
    structure to contract against.
    """
    basis = {}
    for (p, q), d in sorted(h.h.items()):
        basis[(p, q)] = [f"e{p},{q}:{i}" for i in range(d)]
    return DolbeaultPoissonModel(h.n, basis, name="formal",
                                 metadata={"family": "formal"})


def _matrix_to_strings(m: Matrix) -> list:
    return [[str(v) for v in row] for row in m.to_rows()]


def _parse_rational(s, where: str) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str) or not _RATIONAL_RE.match(s):
        raise ModelFileError(f"{where}: {s!r} is not a rational 'a/b' or integer string")
    return Fraction(s)


def save_model(m: DolbeaultPoissonModel) -> dict:
    """The kbmodel/1 dictionary for m (wedge data is not serialized)."""

    def blocks_out(blocks: dict) -> list:
        return [{"from": [p, q], "matrix": _matrix_to_strings(mat)}
                for (p, q), mat in sorted(blocks.items())]

    return {
        "format": FORMAT,
        "name": m.name,
        "n": m.n,
        "basis": {f"{p},{q}": list(labels)
                  for (p, q), labels in sorted(m.basis.items())},
        "del": blocks_out(m.del_blocks),
        "delbar": blocks_out(m.delbar_blocks),
        "contraction": blocks_out(m.contraction_blocks),
        "metadata": dict(sorted(m.metadata.items())),
    }


_TOP_KEYS = {"format", "name", "n", "basis", "del", "delbar", "contraction",
             "metadata"}


def load_model(data: dict, lax: bool = False,
               validate: bool = True) -> DolbeaultPoissonModel:
    """Rebuild and validate a model from a kbmodel/1 dictionary.

    Unknown fields are rejected unless ``lax``.  The operator identities
    are checked before the model is returned; ``validate=False`` defers
    that to the caller (used by the checker to print a full report).
    """
    if not isinstance(data, dict):
        raise ModelFileError("model file must be a JSON object")
    if data.get("format") != FORMAT:
        raise ModelFileError(
            f"unsupported format {data.get('format')!r}, expected {FORMAT!r}")
    if not lax:
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ModelFileError(f"unknown fields: {sorted(unknown)}")
    n = data.get("n")
    if not isinstance(n, int) or n < 0:
        raise ModelFileError("field 'n' must be a nonnegative integer")
    raw_basis = data.get("basis")
    if not isinstance(raw_basis, dict):
        raise ModelFileError("field 'basis' must be an object")
    basis = {}
    for key, labels in raw_basis.items():
        try:
            p, q = (int(x) for x in key.split(","))
        except ValueError:
            raise ModelFileError(f"basis key {key!r} is not 'p,q'") from None
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise ModelFileError(f"basis[{key!r}] must be a list of strings")
        basis[(p, q)] = labels

    def blocks_in(field_name: str) -> dict:
        raw = data.get(field_name, [])
        if not isinstance(raw, list):
            raise ModelFileError(f"field {field_name!r} must be a list of blocks")
        out = {}
        for idx, entry in enumerate(raw):
            where = f"{field_name}[{idx}]"
            if not isinstance(entry, dict):
                raise ModelFileError(f"{where}: block must be an object")
            if not lax and set(entry) - {"from", "matrix"}:
                raise ModelFileError(
                    f"{where}: unknown fields {sorted(set(entry) - {'from', 'matrix'})}")
            src = entry.get("from")
            if (not isinstance(src, list) or len(src) != 2
                    or not all(isinstance(x, int) for x in src)):
                raise ModelFileError(f"{where}: 'from' must be [p, q]")
            rows = entry.get("matrix")
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ModelFileError(f"{where}: 'matrix' must be a list of rows")
            ncols = len(rows[0]) if rows else 0
            entries = {}
            for i, row in enumerate(rows):
                if len(row) != ncols:
                    raise ModelFileError(f"{where}: ragged matrix rows")
                for j, s in enumerate(row):
                    v = _parse_rational(s, f"{where}.matrix[{i}][{j}]")
                    if v:
                        entries[(i, j)] = v
            out[(src[0], src[1])] = Matrix(len(rows), ncols, entries)
        return out

    name = data.get("name", "model")
    if not isinstance(name, str):
        raise ModelFileError("field 'name' must be a string")
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ModelFileError("field 'metadata' must be an object")
    try:
        model = DolbeaultPoissonModel(
            n, basis, del_blocks=blocks_in("del"),
            delbar_blocks=blocks_in("delbar"),
            contraction_blocks=blocks_in("contraction"),
            name=name, metadata=metadata)
    except ValueError as exc:
        if isinstance(exc, (ModelFileError, ModelValidationError)):
            raise
        raise ModelFileError(str(exc)) from None
    if validate:
        report = validate_model(model)
        if not report.ok:
            bad = report.first_failure()
            raise ModelValidationError(
                f"model file fails {bad.identity} at bidegree {bad.bidegree}",
                identity=bad.identity, bidegree=bad.bidegree)
    return model


def model_to_json(m: DolbeaultPoissonModel) -> str:
    return json.dumps(save_model(m), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


def write_model(m: DolbeaultPoissonModel, path) -> None:
    Path(path).write_text(model_to_json(m), encoding="utf-8")


def read_model(path, lax: bool = False,
               validate: bool = True) -> DolbeaultPoissonModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    except OSError as exc:
        raise ModelFileError(f"{path}: {exc.strerror or exc}") from None
    return load_model(data, lax=lax, validate=validate)
