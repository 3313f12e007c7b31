"""Shipped knowledge: the built-in schema, the material table, and constants.

The YAML files under ``data/v1`` are the source of truth for the ontology
content; this module only loads and validates them.  Values in the material
table must satisfy the ideal-gas invariants, which the loader checks on
every load rather than trusting the files.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping

import yaml

from .equations import EquationTemplate
from .errors import ParseError, UnknownMaterial
from .ontology import OntologySchema, load_schema


@dataclass(frozen=True)
class PhysicalConstants:
    """Universal constants and the entropy/energy reference state."""

    R_univ: float = 8.31446261815324  # J/(mol.K)
    T0: float = 293.15  # K, reference temperature: u(T0) = 0
    p0: float = 1.0e5  # Pa, reference pressure: s(T0, p0) = 0


CONSTANTS = PhysicalConstants()

_DEFAULT_DATA_DIR = Path(__file__).resolve().parent / "data" / "v1"

# materials.yaml is instance data, not schema content
_MATERIALS_FILE = "materials.yaml"


@dataclass(frozen=True)
class MaterialRecord:
    name: str
    molar_mass: float  # kg/mol
    specific_gas_constant: float  # J/(kg.K)
    cv: float  # J/(kg.K)
    cp: float  # J/(kg.K)
    is_ideal_gas: bool

    @property
    def kappa(self) -> float:
        return self.cp / self.cv


def default_data_dir() -> Path:
    return _DEFAULT_DATA_DIR


def _resolve_dir(data_dir: str | Path | None) -> Path:
    return Path(data_dir) if data_dir is not None else _DEFAULT_DATA_DIR


@lru_cache(maxsize=None)
def _load_schema_cached(directory: str) -> OntologySchema:
    root = Path(directory)
    paths = sorted(p for p in root.glob("*.yaml") if p.name != _MATERIALS_FILE)
    if not paths:
        raise ParseError(f"no schema files found in {root}", source=str(root))
    sources = {p.name: p.read_text(encoding="utf-8") for p in paths}
    return load_schema(sources)


def builtin_schema(data_dir: str | Path | None = None) -> OntologySchema:
    """Load (and cache) the schema shipped with the package.

    ``data_dir`` points at an alternative directory with the same file
    layout; the default is the packaged ``data/v1``.
    """
    return _load_schema_cached(str(_resolve_dir(data_dir)))


def _relative_error(actual: float, expected: float) -> float:
    return abs(actual - expected) / max(abs(actual), abs(expected), 1.0)


def _check_record(record: MaterialRecord, source: str) -> None:
    for field_name in ("molar_mass", "specific_gas_constant", "cv", "cp"):
        if not getattr(record, field_name) > 0.0:
            raise ParseError(
                f"material {record.name}: {field_name} must be positive",
                source=source,
            )
    derived_R = CONSTANTS.R_univ / record.molar_mass
    if _relative_error(record.specific_gas_constant, derived_R) > 1e-9:
        raise ParseError(
            f"material {record.name}: specific_gas_constant {record.specific_gas_constant!r}"
            f" does not match R_univ / molar_mass = {derived_R!r}",
            source=source,
        )
    derived_cp = record.cv + record.specific_gas_constant
    if record.is_ideal_gas and _relative_error(record.cp, derived_cp) > 1e-9:
        raise ParseError(
            f"material {record.name}: cp {record.cp!r} does not match"
            f" cv + R = {derived_cp!r}",
            source=source,
        )


@lru_cache(maxsize=None)
def _load_materials_cached(
    directory: str,
) -> tuple[Mapping[str, MaterialRecord], Mapping[str, str]]:
    path = Path(directory) / _MATERIALS_FILE
    if not path.is_file():
        raise ParseError(f"material table not found: {path}", source=str(path))
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            f"invalid YAML in material table: {exc}",
            source=str(path),
            line=None if mark is None else mark.line + 1,
            column=None if mark is None else mark.column + 1,
        ) from exc
    if not isinstance(data, dict) or "materials" not in data:
        raise ParseError("material table must have a 'materials' section", source=str(path))

    allowed = {"molar_mass", "specific_gas_constant", "cv", "cp", "is_ideal_gas"}
    records: dict[str, MaterialRecord] = {}
    for name, fields in data["materials"].items():
        if not isinstance(fields, dict) or set(fields) != allowed:
            raise ParseError(
                f"material {name}: expected exactly the fields {sorted(allowed)}",
                source=str(path),
            )
        record = MaterialRecord(
            name=str(name),
            molar_mass=float(fields["molar_mass"]),
            specific_gas_constant=float(fields["specific_gas_constant"]),
            cv=float(fields["cv"]),
            cp=float(fields["cp"]),
            is_ideal_gas=bool(fields["is_ideal_gas"]),
        )
        _check_record(record, str(path))
        records[record.name] = record

    synonyms: dict[str, str] = {}
    for alias, target in (data.get("synonyms") or {}).items():
        if target not in records:
            raise ParseError(
                f"synonym {alias!r} points at unknown material {target!r}",
                source=str(path),
            )
        synonyms[str(alias)] = str(target)

    unknown_sections = set(data) - {"materials", "synonyms"}
    if unknown_sections:
        raise ParseError(
            f"unexpected sections in material table: {sorted(unknown_sections)}",
            source=str(path),
        )
    return records, synonyms


def materials_table(data_dir: str | Path | None = None) -> dict[str, MaterialRecord]:
    records, _ = _load_materials_cached(str(_resolve_dir(data_dir)))
    return dict(records)


def material_synonyms(data_dir: str | Path | None = None) -> dict[str, str]:
    _, synonyms = _load_materials_cached(str(_resolve_dir(data_dir)))
    return dict(synonyms)


def material_lookup(name: str, data_dir: str | Path | None = None) -> MaterialRecord:
    """Return the record for ``name``, accepting listed synonyms."""
    records, synonyms = _load_materials_cached(str(_resolve_dir(data_dir)))
    canonical = name if name in records else synonyms.get(name)
    if canonical is None:
        raise UnknownMaterial(name, sorted(records))
    return records[canonical]


def equation_catalog(schema: OntologySchema | None = None) -> list[EquationTemplate]:
    """All equation templates of the schema in name order."""
    schema = schema if schema is not None else builtin_schema()
    return [schema.equations[name] for name in sorted(schema.equations)]
