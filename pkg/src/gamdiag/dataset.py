"""Columnar dataset: the single substrate every diagnostic reads from.

A :class:`DiagnosticDataset` stores the response, covariates and the fitted
model's per-observation parameter values as immutable float64 / int32 columns,
with a role attached to each column.  All downstream operations are plain
column scans, so storage is deliberately flat.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDatasetError, ParseError, SchemaError

ROLES = ("response", "covariate", "param")

_MAGIC = b"GDG1"
_DTYPE_F64 = 0
_DTYPE_I32 = 1
_DTYPE_CAT = 2


@dataclass
class DiagnosticDataset:
    """Immutable columnar store of observations and model parameters.

    Columns are float64 (numeric) or int32 dictionary codes (categorical,
    code -1 marking a missing cell).  Every column has exactly ``n`` entries.
    """

    n: int
    columns: dict[str, np.ndarray]
    roles: dict[str, str]
    levels: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        for name, col in self.columns.items():
            if col.shape != (self.n,):
                raise SchemaError(f"column {name!r} has length {len(col)}, expected {self.n}")
            col.flags.writeable = False
        for name, role in self.roles.items():
            if name not in self.columns:
                raise SchemaError(f"role given for unknown column {name!r}")
            if role not in ROLES:
                raise SchemaError(f"unknown role {role!r} for column {name!r}")

    def column(self, name: str) -> np.ndarray:
        """Read-only view of a column; raises KeyError for unknown names."""
        if name not in self.columns:
            raise KeyError(f"unknown column {name!r}")
        return self.columns[name]

    def names_with_role(self, role: str) -> list[str]:
        return [c for c, r in self.roles.items() if r == role]

    @property
    def response_name(self) -> str:
        names = self.names_with_role("response")
        if len(names) != 1:
            raise SchemaError(f"expected exactly one response column, found {names}")
        return names[0]

    def response(self) -> np.ndarray:
        return self.column(self.response_name)

    def params_for(self, family) -> dict[str, np.ndarray]:
        """Parameter columns required by ``family``, keyed by parameter name.

        Raises SchemaError when a required parameter column is absent.
        """
        theta = {}
        for pname in family.param_names:
            if pname not in self.columns or self.roles.get(pname) != "param":
                raise SchemaError(
                    f"family {family.name!r} needs parameter column {pname!r}"
                )
            theta[pname] = self.column(pname)
        return theta

    def is_categorical(self, name: str) -> bool:
        return name in self.levels


def _decode_numeric(values: list[str], colname: str, allow_nan: bool) -> np.ndarray:
    out = np.empty(len(values), dtype=np.float64)
    for i, cell in enumerate(values):
        cell = cell.strip()
        if cell == "":
            out[i] = np.nan
        else:
            try:
                out[i] = float(cell)
            except ValueError:
                raise ParseError(
                    f"non-numeric value {cell!r} in column {colname!r} at data row {i + 1}",
                    row=i + 1,
                    column=colname,
                ) from None
        if not allow_nan and not np.isfinite(out[i]):
            raise ParseError(
                f"missing or non-finite value in column {colname!r} at data row {i + 1}",
                row=i + 1,
                column=colname,
            )
    return out


def _encode_categorical(values: list[str]) -> tuple[np.ndarray, list[str]]:
    codes = np.empty(len(values), dtype=np.int32)
    table: dict[str, int] = {}
    levels: list[str] = []
    for i, cell in enumerate(values):
        cell = cell.strip()
        if cell == "":
            codes[i] = -1
            continue
        if cell not in table:
            table[cell] = len(levels)
            levels.append(cell)
        codes[i] = table[cell]
    return codes, levels


def _looks_numeric(values: list[str]) -> bool:
    for cell in values:
        cell = cell.strip()
        if cell == "":
            continue
        try:
            float(cell)
        except ValueError:
            return False
    return True


def load_csv(path, schema: dict[str, str]) -> DiagnosticDataset:
    """Load an RFC-4180 CSV with a header row into a DiagnosticDataset.

    ``schema`` maps column name to role.  Response and parameter columns must
    parse as finite numbers; covariate columns that contain non-numeric text
    are dictionary-encoded as categoricals.
    """
    for role in schema.values():
        if role not in ROLES:
            raise SchemaError(f"unknown role {role!r} in schema")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        missing = [name for name in schema if name not in header]
        if missing:
            raise SchemaError(f"{path}: schema columns missing from header: {missing}")
        rows = [row for row in reader if row]
    if not rows:
        raise EmptyDatasetError(f"{path}: no data rows")

    positions = {name: header.index(name) for name in schema}
    raw = {name: [row[pos] for row in rows] for name, pos in positions.items()}

    columns: dict[str, np.ndarray] = {}
    levels: dict[str, list[str]] = {}
    for name, role in schema.items():
        cells = raw[name]
        if role in ("response", "param"):
            columns[name] = _decode_numeric(cells, name, allow_nan=False)
        elif _looks_numeric(cells):
            columns[name] = _decode_numeric(cells, name, allow_nan=True)
        else:
            codes, lv = _encode_categorical(cells)
            columns[name] = codes
            levels[name] = lv
    return DiagnosticDataset(n=len(rows), columns=columns, roles=dict(schema), levels=levels)


def write_csv(ds: DiagnosticDataset, path) -> None:
    """Write the dataset back to CSV with full float precision (round-trips)."""
    names = list(ds.columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        cols = []
        for name in names:
            col = ds.columns[name]
            if name in ds.levels:
                lv = ds.levels[name]
                cols.append(["" if c < 0 else lv[c] for c in col])
            elif col.dtype == np.float64:
                cols.append([repr(float(v)) for v in col])
            else:
                cols.append([str(int(v)) for v in col])
        for i in range(ds.n):
            writer.writerow([c[i] for c in cols])


def write_binary(ds: DiagnosticDataset, path) -> None:
    """Length-prefixed little-endian column dump (fast path, magic GDG1)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(ds.columns)))
        for name, col in ds.columns.items():
            nb = name.encode("utf-8")
            fh.write(struct.pack("<I", len(nb)))
            fh.write(nb)
            if name in ds.levels:
                fh.write(struct.pack("<B", _DTYPE_CAT))
                fh.write(struct.pack("<Q", ds.n))
                lv = ds.levels[name]
                fh.write(struct.pack("<I", len(lv)))
                for level in lv:
                    lb = level.encode("utf-8")
                    fh.write(struct.pack("<I", len(lb)))
                    fh.write(lb)
                fh.write(np.ascontiguousarray(col, dtype="<i4").tobytes())
            elif col.dtype == np.float64:
                fh.write(struct.pack("<B", _DTYPE_F64))
                fh.write(struct.pack("<Q", ds.n))
                fh.write(np.ascontiguousarray(col, dtype="<f8").tobytes())
            else:
                fh.write(struct.pack("<B", _DTYPE_I32))
                fh.write(struct.pack("<Q", ds.n))
                fh.write(np.ascontiguousarray(col, dtype="<i4").tobytes())


def read_binary(path, schema: dict[str, str]) -> DiagnosticDataset:
    """Read a GDG1 binary column file written by :func:`write_binary`."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ParseError(f"{path}: bad magic, not a GDG1 file")
        (ncol,) = struct.unpack("<I", fh.read(4))
        columns: dict[str, np.ndarray] = {}
        levels: dict[str, list[str]] = {}
        n = None
        for _ in range(ncol):
            (name_len,) = struct.unpack("<I", fh.read(4))
            name = fh.read(name_len).decode("utf-8")
            (dtype_byte,) = struct.unpack("<B", fh.read(1))
            (cn,) = struct.unpack("<Q", fh.read(8))
            if n is None:
                n = cn
            elif cn != n:
                raise ParseError(f"{path}: column {name!r} length {cn} != {n}")
            if dtype_byte == _DTYPE_CAT:
                (nlev,) = struct.unpack("<I", fh.read(4))
                lv = []
                for _ in range(nlev):
                    (ll,) = struct.unpack("<I", fh.read(4))
                    lv.append(fh.read(ll).decode("utf-8"))
                levels[name] = lv
                columns[name] = np.frombuffer(fh.read(4 * cn), dtype="<i4").copy()
            elif dtype_byte == _DTYPE_F64:
                columns[name] = np.frombuffer(fh.read(8 * cn), dtype="<f8").copy()
            elif dtype_byte == _DTYPE_I32:
                columns[name] = np.frombuffer(fh.read(4 * cn), dtype="<i4").copy()
            else:
                raise ParseError(f"{path}: unknown dtype byte {dtype_byte} for {name!r}")
    if n is None or n == 0:
        raise EmptyDatasetError(f"{path}: no rows")
    missing = [name for name in schema if name not in columns]
    if missing:
        raise SchemaError(f"{path}: schema columns missing: {missing}")
    keep = {name: columns[name] for name in schema}
    keep_levels = {k: v for k, v in levels.items() if k in schema}
    return DiagnosticDataset(n=int(n), columns=keep, roles=dict(schema), levels=keep_levels)


def from_arrays(columns: dict[str, np.ndarray], roles: dict[str, str]) -> DiagnosticDataset:
    """Build a dataset from in-memory arrays (used by scenario generators)."""
    cols = {}
    n = None
    for name, arr in columns.items():
        arr = np.asarray(arr)
        if arr.dtype != np.int32:
            arr = np.asarray(arr, dtype=np.float64)
        arr = arr.copy()
        if n is None:
            n = len(arr)
        cols[name] = arr
    if n is None or n == 0:
        raise EmptyDatasetError("no columns or zero rows")
    return DiagnosticDataset(n=n, columns=cols, roles=dict(roles))
