"""Declarative network description files.

The on-disk format is JSON with a fixed schema; complex scalars are
two-element ``[re, im]`` arrays (bare numbers are accepted on input and mean
a real value), and matrices are row-major nested arrays of complex scalars:

    {
      "initial_dim": 1,
      "components": [
        {"name": "cav", "S": [[[1,0]]], "L": [[[2,0]]], "H": [[[0,0]]]}
      ],
      "connections": [
        {"from": "cav.out[1]", "to": "cav.in[1]", "gain": [1,0]}
      ],
      "options": {"tol": 1e-9, "seed": 0}
    }

Component block shapes must be multiples of the initial dimension ``d``:
``S`` is ``(n*d) x (n*d)``, ``L`` is ``(n*d) x d``, ``H`` is ``d x d``.
Ports are 1-based: ``name.out[k]`` / ``name.in[j]``.  Each port may appear
in at most one connection; the induced gain matrix is therefore diagonal,
with the declaration order of the connections fixing the internal channel
order on both sides.

Writing is canonical (always ``[re, im]`` pairs), and floats survive a
write/parse round trip bit-exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .belavkin import SLHTriple, make_slh
from .errors import ParseError
from .network import Wiring

_PORT_RE = re.compile(r"^(?P<name>[^.\s]+)\.(?P<dir>out|in)\[(?P<k>[0-9]+)\]$")


@dataclass(frozen=True, eq=False)
class ComponentDecl:
    """One named component with raw parameter arrays."""

    name: str
    S: np.ndarray
    L: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        for attr in ("S", "L", "H"):
            arr = np.ascontiguousarray(getattr(self, attr), dtype=np.complex128)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    def __eq__(self, other):
        return (
            isinstance(other, ComponentDecl)
            and self.name == other.name
            and np.array_equal(self.S, other.S)
            and np.array_equal(self.L, other.L)
            and np.array_equal(self.H, other.H)
        )

    def channel_count(self, d: int) -> int:
        return self.S.shape[0] // d


@dataclass(frozen=True)
class Connection:
    src: tuple  # (component name, 1-based output port)
    dst: tuple  # (component name, 1-based input port)
    gain: complex = 1.0 + 0j


@dataclass(frozen=True)
class Options:
    tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True)
class NetworkSpec:
    initial_dim: int
    components: tuple
    connections: tuple = ()
    options: Options = field(default_factory=Options)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _complex_scalar(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise ParseError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _complex_matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ParseError(f"{where}: expected a non-empty nested array")
    rows = []
    width = None
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            raise ParseError(f"{where}[{i}]: expected a non-empty row")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{where}[{i}]: ragged row (length {len(row)}, expected {width})")
        rows.append([_complex_scalar(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return np.array(rows, dtype=np.complex128)


def _parse_port(value, where: str) -> tuple[str, str, int]:
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected a port string like 'name.out[1]'")
    m = _PORT_RE.match(value)
    if not m:
        raise ParseError(f"{where}: malformed port {value!r} (want 'name.out[k]' or 'name.in[k]')")
    return m.group("name"), m.group("dir"), int(m.group("k"))


def parse_obj(obj) -> NetworkSpec:
    """Validate a decoded JSON object against the schema."""
    if not isinstance(obj, dict):
        raise ParseError("top level: expected a JSON object")
    unknown = set(obj) - {"initial_dim", "components", "connections", "options"}
    if unknown:
        raise ParseError(f"top level: unknown keys {sorted(unknown)!r}")
    d = obj.get("initial_dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError(f"initial_dim: expected a positive integer, got {d!r}")

    raw_components = obj.get("components")
    if not isinstance(raw_components, list) or not raw_components:
        raise ParseError("components: expected a non-empty array")
    components = []
    counts = {}
    for i, c in enumerate(raw_components):
        where = f"components[{i}]"
        if not isinstance(c, dict):
            raise ParseError(f"{where}: expected an object")
        missing = {"name", "S", "L", "H"} - set(c)
        if missing:
            raise ParseError(f"{where}: missing keys {sorted(missing)!r}")
        extra = set(c) - {"name", "S", "L", "H"}
        if extra:
            raise ParseError(f"{where}: unknown keys {sorted(extra)!r}")
        name = c["name"]
        if not isinstance(name, str) or not name or "." in name:
            raise ParseError(f"{where}.name: expected a non-empty string without '.', got {name!r}")
        if name in counts:
            raise ParseError(f"{where}.name: duplicate component name {name!r}")
        S = _complex_matrix(c["S"], f"{where}.S")
        L = _complex_matrix(c["L"], f"{where}.L")
        H = _complex_matrix(c["H"], f"{where}.H")
        if S.shape[0] != S.shape[1] or S.shape[0] % d != 0:
            raise ParseError(f"{where}.S: shape {S.shape} is not square with size a multiple of {d}")
        n = S.shape[0] // d
        if n < 1:
            raise ParseError(f"{where}.S: component must have at least one channel")
        if L.shape != (n * d, d):
            raise ParseError(f"{where}.L: shape {L.shape}, want ({n * d}, {d})")
        if H.shape != (d, d):
            raise ParseError(f"{where}.H: shape {H.shape}, want ({d}, {d})")
        counts[name] = n
        components.append(ComponentDecl(name, S, L, H))

    raw_connections = obj.get("connections", [])
    if not isinstance(raw_connections, list):
        raise ParseError("connections: expected an array")
    connections = []
    used_out, used_in = set(), set()
    for i, c in enumerate(raw_connections):
        where = f"connections[{i}]"
        if not isinstance(c, dict):
            raise ParseError(f"{where}: expected an object")
        missing = {"from", "to"} - set(c)
        if missing:
            raise ParseError(f"{where}: missing keys {sorted(missing)!r}")
        extra = set(c) - {"from", "to", "gain"}
        if extra:
            raise ParseError(f"{where}: unknown keys {sorted(extra)!r}")
        src_name, src_dir, src_k = _parse_port(c["from"], f"{where}.from")
        dst_name, dst_dir, dst_k = _parse_port(c["to"], f"{where}.to")
        if src_dir != "out":
            raise ParseError(f"{where}.from: must reference an 'out' port")
        if dst_dir != "in":
            raise ParseError(f"{where}.to: must reference an 'in' port")
        for nm, k, which in ((src_name, src_k, "from"), (dst_name, dst_k, "to")):
            if nm not in counts:
                raise ParseError(f"{where}.{which}: unknown component {nm!r}")
            if not 1 <= k <= counts[nm]:
                raise ParseError(f"{where}.{which}: port {k} out of range 1..{counts[nm]}")
        if (src_name, src_k) in used_out:
            raise ParseError(f"{where}.from: output port {c['from']!r} already connected")
        if (dst_name, dst_k) in used_in:
            raise ParseError(f"{where}.to: input port {c['to']!r} already connected")
        used_out.add((src_name, src_k))
        used_in.add((dst_name, dst_k))
        gain = _complex_scalar(c["gain"], f"{where}.gain") if "gain" in c else 1.0 + 0j
        connections.append(Connection((src_name, src_k), (dst_name, dst_k), gain))

    raw_options = obj.get("options", {})
    if not isinstance(raw_options, dict):
        raise ParseError("options: expected an object")
    extra = set(raw_options) - {"tol", "seed"}
    if extra:
        raise ParseError(f"options: unknown keys {sorted(extra)!r}")
    tol = raw_options.get("tol", 1e-9)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol <= 0:
        raise ParseError(f"options.tol: expected a positive number, got {tol!r}")
    seed = raw_options.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ParseError(f"options.seed: expected a nonnegative integer, got {seed!r}")
    options = Options(tol=float(tol), seed=seed)

    return NetworkSpec(d, tuple(components), tuple(connections), options)


def parse(path: str) -> NetworkSpec:
    """Load and validate a network description file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_obj(obj)


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def complex_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_pairs(m: np.ndarray) -> list:
    return [[complex_pair(z) for z in row] for row in np.asarray(m)]


def to_obj(spec: NetworkSpec) -> dict:
    """Canonical JSON object for a network description."""
    return {
        "initial_dim": spec.initial_dim,
        "components": [
            {"name": c.name, "S": matrix_pairs(c.S), "L": matrix_pairs(c.L), "H": matrix_pairs(c.H)}
            for c in spec.components
        ],
        "connections": [
            {
                "from": f"{c.src[0]}.out[{c.src[1]}]",
                "to": f"{c.dst[0]}.in[{c.dst[1]}]",
                "gain": complex_pair(c.gain),
            }
            for c in spec.connections
        ],
        "options": {"tol": spec.options.tol, "seed": spec.options.seed},
    }


def write(spec: NetworkSpec, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_obj(spec), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# model assembly
# ---------------------------------------------------------------------------


def component_triple(c: ComponentDecl, d: int, tol: float = 1e-9, validate: bool = True) -> SLHTriple:
    return make_slh(c.S, c.L, c.H, d=d, name=c.name, tol=tol, validate=validate)


def build(spec: NetworkSpec, tol: float | None = None, validate: bool = True):
    """Assemble the open-loop model and the wiring implied by the connections.

    Returns ``(open_loop_triple, wiring)``; the wiring is ``None`` when the
    file declares no connections.  Channel labels of the open-loop model are
    ``(component name, local 1-based channel)``, so port references map
    directly onto labels.  The induced gain matrix is diagonal because every
    port appears at most once.
    """
    from .network import concatenate

    tol = spec.options.tol if tol is None else tol
    d = spec.initial_dim
    triples = [component_triple(c, d, tol=tol, validate=validate) for c in spec.components]
    open_loop = concatenate(triples)
    if not spec.connections:
        return open_loop, None
    internal_out = tuple((c.src[0], c.src[1]) for c in spec.connections)
    internal_in = tuple((c.dst[0], c.dst[1]) for c in spec.connections)
    gains = np.diag([c.gain for c in spec.connections]).astype(np.complex128)
    return open_loop, Wiring(internal_out, internal_in, gains)


def reduced_spec(model: SLHTriple, initial_dim: int, options: Options, name: str = "reduced") -> NetworkSpec:
    """Package a triple as a single-component description with no connections."""
    comp = ComponentDecl(name, model.S.data, model.L.data, model.H)
    return NetworkSpec(initial_dim, (comp,), (), options)


def parse_state(path: str, d: int) -> np.ndarray:
    """Load a density matrix file: a bare nested array or {"rho": array}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(obj, dict):
        if "rho" not in obj:
            raise ParseError(f"{path}: state object must carry a 'rho' key")
        obj = obj["rho"]
    rho = _complex_matrix(obj, "rho")
    if rho.shape != (d, d):
        raise ParseError(f"rho: shape {rho.shape}, want ({d}, {d})")
    return rho
