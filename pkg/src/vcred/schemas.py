"""Document schemas and the mapping from documents to attribute vectors.

Positions 1-3 of every attribute vector are reserved:

1. hash of the holder's wallet id,
2. credential serial (0 until the issuer folds its serial in),
3. hash of the schema id (always disclosed in presentations).

Schema fields follow from position 4 in declaration order. Positions past
the last field are padding and hold 0.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import SchemaError

WID_POSITION = 1
SERIAL_POSITION = 2
SCHEMA_POSITION = 3
FIRST_FIELD_POSITION = 4
RESERVED = {"wid": WID_POSITION, "serial": SERIAL_POSITION, "schema": SCHEMA_POSITION}

FIELD_TYPES = ("text", "int", "date")
EPOCH = dt.date(1970, 1, 1)


def days_since_epoch(value) -> int:
    if isinstance(value, str):
        value = dt.date.fromisoformat(value)
    if isinstance(value, dt.datetime):
        value = value.date()
    if not isinstance(value, dt.date):
        raise SchemaError(f"not a date: {value!r}")
    return (value - EPOCH).days


def years_before(day: dt.date, years: int) -> dt.date:
    try:
        return day.replace(year=day.year - years)
    except ValueError:  # 29 February
        return day.replace(year=day.year - years, day=28)


@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: str
    required: bool = True
    range: bool = False
    updatable: bool = False


@dataclass(frozen=True)
class Schema:
    schema_id: str
    fields: tuple
    expiry_field: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate field names in {self.schema_id}")
        for f in self.fields:
            if f.type not in FIELD_TYPES:
                raise SchemaError(f"unknown field type {f.type!r} for {f.name}")
            if f.name in RESERVED:
                raise SchemaError(f"field name {f.name!r} is reserved")
        if self.expiry_field is not None and self.expiry_field not in names:
            raise SchemaError(f"expiry field {self.expiry_field!r} not declared")

    @property
    def min_length(self) -> int:
        return FIRST_FIELD_POSITION - 1 + len(self.fields)

    def field(self, name: str) -> FieldSpec:
        for f in self.fields:
            if f.name == name:
                return f
        raise SchemaError(f"schema {self.schema_id} has no field {name!r}")

    def position(self, name: str) -> int:
        if name in RESERVED:
            return RESERVED[name]
        for k, f in enumerate(self.fields):
            if f.name == name:
                return FIRST_FIELD_POSITION + k
        raise SchemaError(f"schema {self.schema_id} has no field {name!r}")

    def positions(self) -> dict:
        out = dict(RESERVED)
        out.update({f.name: FIRST_FIELD_POSITION + k for k, f in enumerate(self.fields)})
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Schema":
        try:
            fields = [
                FieldSpec(
                    name=f["name"],
                    type=f["type"],
                    required=bool(f.get("required", True)),
                    range=bool(f.get("range", False)),
                    updatable=bool(f.get("updatable", False)),
                )
                for f in data["fields"]
            ]
            return cls(data["schema_id"], fields, data.get("expiry_field"))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "schema_id": self.schema_id,
            "expiry_field": self.expiry_field,
            "fields": [
                {"name": f.name, "type": f.type, "required": f.required,
                 "range": f.range, "updatable": f.updatable}
                for f in self.fields
            ],
        }


def load_schema(path) -> Schema:
    with open(path) as fh:
        return Schema.from_dict(json.load(fh))


def builtin_schemas() -> dict:
    out = {}
    for entry in sorted(resources.files("vcred.schema_data").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            s = Schema.from_dict(json.loads(entry.read_text()))
            out[s.schema_id] = s
    return out


@dataclass(frozen=True)
class Document:
    """A government-issued document as submitted to the authority."""

    schema_id: str
    fields: tuple = field(repr=False)  # ((name, value), ...) in submission order
    wid: str = ""

    def __post_init__(self):
        items = self.fields.items() if isinstance(self.fields, dict) else self.fields
        object.__setattr__(self, "fields", tuple((str(k), v) for k, v in items))

    def get(self, name, default=None):
        return dict(self.fields).get(name, default)

    def replace_field(self, name, value) -> "Document":
        fields = dict(self.fields)
        fields[name] = value
        return Document(self.schema_id, tuple(fields.items()), self.wid)

    @classmethod
    def from_dict(cls, data: dict) -> "Document":
        try:
            return cls(data["schema_id"], tuple(data["fields"].items()), data["wid"])
        except (KeyError, AttributeError, TypeError) as exc:
            raise SchemaError(f"malformed document: {exc}") from None

    def to_dict(self) -> dict:
        return {"schema_id": self.schema_id, "wid": self.wid, "fields": dict(self.fields)}


def _check_value(fspec: FieldSpec, value):
    if fspec.type == "text":
        if not isinstance(value, str):
            raise SchemaError(f"{fspec.name} must be text")
    elif fspec.type == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"{fspec.name} must be an integer")
    else:
        try:
            days_since_epoch(value)
        except (ValueError, TypeError):
            raise SchemaError(f"{fspec.name} must be an ISO date") from None


def validate_document(doc: Document, schema: Schema, today: dt.date | None = None) -> list:
    """Return a list of problems; empty means the document conforms."""
    problems = []
    if doc.schema_id != schema.schema_id:
        problems.append(f"document is a {doc.schema_id}, expected {schema.schema_id}")
    values = dict(doc.fields)
    known = {f.name for f in schema.fields}
    for name in values:
        if name not in known:
            problems.append(f"unexpected field {name!r}")
    for fspec in schema.fields:
        value = values.get(fspec.name)
        if value is None or value == "":
            if fspec.required:
                problems.append(f"missing required field {fspec.name!r}")
            continue
        try:
            _check_value(fspec, value)
        except SchemaError as exc:
            problems.append(str(exc))
    if not doc.wid:
        problems.append("missing wallet id")
    if schema.expiry_field and not problems:
        today = today or dt.date.today()
        if days_since_epoch(values[schema.expiry_field]) <= days_since_epoch(today):
            problems.append("document expired")
    return problems


def wid_scalar(pp, wid: str) -> int:
    return pp.hash_to_scalar(b"attr/wid", [wid.encode()])


def schema_scalar(pp, schema_id: str) -> int:
    return pp.hash_to_scalar(b"attr/schema", [schema_id.encode()])


def encode_field_value(pp, schema: Schema, name: str, value) -> int:
    """Scalar for one field value; absent optional values encode as 0."""
    if name == "wid":
        return wid_scalar(pp, value)
    fspec = schema.field(name)
    if value is None or value == "":
        return 0
    _check_value(fspec, value)
    if fspec.type == "text":
        return pp.hash_to_scalar(b"attr/text", [schema.schema_id.encode(), name.encode(), value.encode()])
    if fspec.type == "int":
        return value % pp.q
    return days_since_epoch(value) % pp.q


def encode_attributes(pp, doc: Document, schema: Schema, l: int | None = None):
    """Attribute vector and position map for ``doc`` (serial slot left at 0)."""
    l = schema.min_length if l is None else l
    if l < schema.min_length:
        raise SchemaError(f"schema {schema.schema_id} needs {schema.min_length} positions, key has {l}")
    values = dict(doc.fields)
    M = [0] * l
    M[WID_POSITION - 1] = wid_scalar(pp, doc.wid)
    M[SCHEMA_POSITION - 1] = schema_scalar(pp, schema.schema_id)
    positions = schema.positions()
    for fspec in schema.fields:
        M[positions[fspec.name] - 1] = encode_field_value(pp, schema, fspec.name, values.get(fspec.name))
    return tuple(M), positions
