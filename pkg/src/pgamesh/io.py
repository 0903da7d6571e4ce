"""OBJ and STL readers, an OBJ writer, and JSON helpers for results."""
from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import ParseError
from .mesh import TriMesh


@dataclass
class MeshFile:
    path: Optional[str]
    format: str  # "OBJ", "ASCII-STL" or "binary-STL"
    mesh: TriMesh
    diagnostics: List[str] = field(default_factory=list)
    digest: str = ""


def _text(data):
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        line = bytes(data)[:exc.start].count(b"\n") + 1
        raise ParseError("invalid UTF-8", line=line) from None


def parse_obj(data, diagnostics: Optional[list] = None) -> TriMesh:
    """Read ``v`` and ``f`` records; polygons are fan-triangulated from their first vertex.

    Other record types are skipped and noted in ``diagnostics`` when given.
    """
    diag = diagnostics if diagnostics is not None else []
    verts = []
    faces = []
    face_lines = []
    skipped = {}
    for lineno, raw in enumerate(_text(data).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "v":
            try:
                vals = [float(t) for t in tokens[1:]]
            except ValueError:
                raise ParseError(f"malformed vertex record {raw.strip()!r}", line=lineno) from None
            if len(vals) < 3:
                raise ParseError("vertex record needs three coordinates", line=lineno)
            xyz = vals[:3]
            if len(vals) == 4:
                w = vals[3]
                if w == 0.0:
                    raise ParseError("vertex weight is zero", line=lineno)
                xyz = [c / w for c in xyz]
            if not all(math.isfinite(c) for c in xyz):
                raise ParseError("non-finite vertex coordinate", line=lineno)
            verts.append(xyz)
        elif tag == "f":
            idx = []
            for t in tokens[1:]:
                head = t.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError:
                    raise ParseError(f"malformed face index {t!r}", line=lineno) from None
                if i == 0:
                    raise ParseError("face index 0 is not valid (indices are 1-based)", line=lineno)
                i = len(verts) + i if i < 0 else i - 1
                if i < 0:
                    raise ParseError(f"face index {head} out of range", line=lineno)
                idx.append(i)
            if len(idx) < 3:
                raise ParseError(f"face with {len(idx)} vertices", line=lineno)
            for k in range(1, len(idx) - 1):
                faces.append((idx[0], idx[k], idx[k + 1]))
                face_lines.append(lineno)
        else:
            skipped[tag] = skipped.get(tag, 0) + 1
    n = len(verts)
    for (a, b, c), lineno in zip(faces, face_lines):
        bad = [i for i in (a, b, c) if i >= n]
        if bad:
            raise ParseError(f"face index {bad[0] + 1} out of range (have {n} vertices)", line=lineno)
        if a == b or b == c or a == c:
            raise ParseError("face repeats a vertex", line=lineno)
    for tag, count in sorted(skipped.items()):
        diag.append(f"ignored {count} '{tag}' record(s)")
    return TriMesh(np.array(verts, dtype=np.float64).reshape(-1, 3),
                   np.array(faces, dtype=np.int64).reshape(-1, 3))


def write_obj(m: TriMesh, stream=None) -> str:
    """OBJ text with shortest round-trip float formatting."""
    lines = [f"v {repr(float(x))} {repr(float(y))} {repr(float(z))}" for x, y, z in m.positions]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in m.faces]
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    return text


_STL_RECORD = np.dtype([("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")])


def _is_ascii_stl(data: bytes) -> bool:
    if not data.lstrip().startswith(b"solid"):
        return False
    if len(data) >= 84:
        (count,) = struct.unpack_from("<I", data, 80)
        if 84 + 50 * count == len(data):
            return False  # binary file whose header happens to start with "solid"
    return b"\x00" not in data[80:]


def weld(triangles, epsilon=0.0):
    """Merge corner positions into shared vertices.

    ``epsilon == 0`` merges exactly equal coordinates; otherwise positions are
    snapped to a grid of spacing ``epsilon`` before merging.
    """
    corners = np.asarray(triangles, dtype=np.float64).reshape(-1, 3)
    if corners.shape[0] == 0:
        return np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64)
    keys = corners if epsilon == 0.0 else np.round(corners / epsilon)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    positions = corners[first]
    faces = inverse.reshape(-1, 3)
    return positions, faces


def _drop_collapsed(faces, diag):
    ok = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    if not np.all(ok):
        diag.append(f"dropped {int(np.sum(~ok))} triangle(s) collapsed by welding")
    return faces[ok]


def parse_stl(data, weld_epsilon=0.0, diagnostics: Optional[list] = None) -> TriMesh:
    """ASCII or binary STL; stored normals are ignored, orientation comes from winding."""
    diag = diagnostics if diagnostics is not None else []
    if isinstance(data, str):
        data = data.encode("utf-8")
    data = bytes(data)
    if _is_ascii_stl(data):
        tris = _ascii_stl_triangles(_text(data))
    else:
        if len(data) < 84:
            raise ParseError("truncated binary STL header")
        (count,) = struct.unpack_from("<I", data, 80)
        need = 84 + 50 * count
        if len(data) < need:
            raise ParseError(f"truncated binary STL: {count} triangles declared, "
                             f"{(len(data) - 84) // 50} present")
        if len(data) > need:
            diag.append(f"ignored {len(data) - need} trailing byte(s)")
        rec = np.frombuffer(data, dtype=_STL_RECORD, count=count, offset=84)
        tris = rec["v"].astype(np.float64)
        if not np.all(np.isfinite(tris)):
            raise ParseError("non-finite vertex coordinate in binary STL")
    positions, faces = weld(tris, weld_epsilon)
    return TriMesh(positions, _drop_collapsed(faces, diag))


def _ascii_stl_triangles(text):
    tris = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        key = tokens[0].lower()
        if key == "outer":
            current = []
        elif key == "vertex":
            if current is None:
                raise ParseError("vertex outside a facet loop", line=lineno)
            try:
                xyz = [float(t) for t in tokens[1:4]]
            except ValueError:
                raise ParseError("malformed vertex record", line=lineno) from None
            if len(xyz) != 3 or not all(math.isfinite(c) for c in xyz):
                raise ParseError("malformed vertex record", line=lineno)
            current.append(xyz)
        elif key == "endloop":
            if current is None or len(current) != 3:
                raise ParseError("facet loop must have exactly three vertices", line=lineno)
            tris.append(current)
            current = None
        elif key in ("solid", "facet", "endfacet", "endsolid"):
            continue
        else:
            raise ParseError(f"unexpected token {tokens[0]!r}", line=lineno)
    if current is not None:
        raise ParseError("unterminated facet loop")
    return np.array(tris, dtype=np.float64).reshape(-1, 3, 3)


def write_stl_binary(m: TriMesh) -> bytes:
    rec = np.zeros(m.n_faces, dtype=_STL_RECORD)
    rec["v"] = m.positions[m.faces].astype(np.float32)
    header = b"binary STL".ljust(80, b" ")
    return header + struct.pack("<I", m.n_faces) + rec.tobytes()


def write_stl_ascii(m: TriMesh, name="mesh") -> str:
    out = [f"solid {name}"]
    for tri in m.positions[m.faces]:
        out.append("  facet normal 0 0 0")
        out.append("    outer loop")
        out.extend(f"      vertex {repr(float(x))} {repr(float(y))} {repr(float(z))}" for x, y, z in tri)
        out.append("    endloop")
        out.append("  endfacet")
    out.append(f"endsolid {name}")
    return "\n".join(out) + "\n"


def detect_format(path, data: bytes) -> str:
    """By suffix when it is .obj or .stl, otherwise by content."""
    suffix = Path(path).suffix.lower() if path else ""
    if suffix not in (".obj", ".stl"):
        if len(data) >= 84 and 84 + 50 * struct.unpack_from("<I", data, 80)[0] == len(data):
            suffix = ".stl"
        elif data.lstrip().startswith(b"solid"):
            suffix = ".stl"
        else:
            suffix = ".obj"
    if suffix == ".obj":
        return "OBJ"
    return "ASCII-STL" if _is_ascii_stl(data) else "binary-STL"


def load_mesh(path, weld_epsilon=0.0) -> MeshFile:
    data = Path(path).read_bytes()
    fmt = detect_format(path, data)
    diag: list = []
    if fmt == "OBJ":
        mesh = parse_obj(data, diag)
    else:
        mesh = parse_stl(data, weld_epsilon, diag)
    return MeshFile(str(path), fmt, mesh, diag, hashlib.sha256(data).hexdigest())


def clean_number(x):
    """Python float for JSON; non-finite values are rejected."""
    v = float(x)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {v!r} in result")
    return v


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return clean_number(obj)
    return obj


def dumps(record) -> str:
    """Sorted-key JSON; floats use the shortest repr that round-trips."""
    return json.dumps(to_jsonable(record), sort_keys=True, indent=2, allow_nan=False)
