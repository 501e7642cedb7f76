"""Operator description files.

Files are YAML (JSON is accepted too, being a subset). Two scenarios exist.

Lattice perturbation of the Laplacian::

    scenario: laplacian        # optional, the default
    space: lattice-l2          # lattice-l1 | lattice-l2 | lattice-linf
    window: [-1, 1]            # optional inclusive index range
    terms:                     # K f = sum <functional, f> vector
      - functional: [[0, 3.0]] # sparse [index, value] pairs
        vector: [[0, 1.0]]

Values are numbers or complex strings such as ``"1+2j"``. A term may be
given as ``diagonal: [[index, value], ...]`` as a shorthand for point
potentials.

Multiplication operator plus integral kernel on an interval::

    scenario: interval
    interval: [0.0, 1.0]
    nodes: 64
    coupling: -1.0             # Z = M + coupling * K
    symbol: {name: identity}   # identity | square | cosine, or {samples: [...]}
    kernel: {name: constant, value: 1.0}
                               # constant | product | exponential, or {samples: [[...]]}

Tabulated samples are taken at the Gauss-Legendre nodes of the interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .interval import DEFAULT_NODES, MIN_NODES, KernelModel, MultiplicationModel
from .operators import NuclearOperatorRep, OperatorError
from .spectrum import IntervalProblem


class OperatorFileError(ValueError):
    """Malformed operator file; the message carries ``path:line`` diagnostics."""


SYMBOLS = {
    "identity": lambda t: t,
    "square": lambda t: t * t,
    "cosine": lambda t: np.cos(np.pi * t),
}


def _kernel_builtin(name: str, value: complex, scale: float):
    if name == "constant":
        return lambda t, s: value * np.ones(np.broadcast(t, s).shape)
    if name == "product":
        return lambda t, s: value * t * s
    if name == "exponential":
        return lambda t, s: value * np.exp(-np.abs(t - s) / scale)
    raise KeyError(name)


KERNELS = ("constant", "product", "exponential")


@dataclass(frozen=True)
class LoadedOperator:
    scenario: str
    lattice: NuclearOperatorRep | None = None
    interval: IntervalProblem | None = None


class _Locator:
    """Maps a key path in the parsed document to its source line."""

    def __init__(self, source: str, name: str):
        self.name = name
        try:
            self.root = yaml.compose(source)
        except yaml.YAMLError:
            self.root = None

    def line(self, path: tuple) -> int | None:
        node = self.root
        best = node.start_mark.line + 1 if node is not None else None
        for key in path:
            if isinstance(node, yaml.MappingNode):
                node = next((v for k, v in node.value if k.value == key), None)
            elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
                node = node.value[key]
            else:
                node = None
            if node is None:
                break
            best = node.start_mark.line + 1
        return best

    def error(self, path: tuple, msg: str) -> OperatorFileError:
        line = self.line(path)
        where = f"{self.name}:{line}" if line else self.name
        trail = "".join(f"[{k}]" if isinstance(k, int) else f".{k}" for k in path).lstrip(".")
        return OperatorFileError(f"{where}: {trail or 'document'}: {msg}")


def _scalar(v: Any, loc: _Locator, path: tuple) -> complex:
    if isinstance(v, bool):
        raise loc.error(path, f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise loc.error(path, f"expected a number or complex string, got {v!r}")


def _real(v, loc, path) -> float:
    z = _scalar(v, loc, path)
    if z.imag:
        raise loc.error(path, "expected a real number")
    return z.real


def _pairs(v: Any, loc: _Locator, path: tuple) -> dict[int, complex]:
    if not isinstance(v, list):
        raise loc.error(path, "expected a list of [index, value] pairs")
    out: dict[int, complex] = {}
    for i, pair in enumerate(v):
        if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], int) and not isinstance(pair[0], bool)):
            raise loc.error(path + (i,), f"expected [integer index, value], got {pair!r}")
        out[pair[0]] = out.get(pair[0], 0) + _scalar(pair[1], loc, path + (i, 1))
    return out


def _lattice(doc: dict, loc: _Locator) -> NuclearOperatorRep:
    space = doc.get("space", "lattice-l2")
    if space not in ("lattice-l1", "lattice-l2", "lattice-linf"):
        raise loc.error(("space",), f"unknown lattice space {space!r}")
    terms_raw = doc.get("terms", [])
    if not isinstance(terms_raw, list):
        raise loc.error(("terms",), "expected a list of terms")
    terms = []
    for n, t in enumerate(terms_raw):
        p = ("terms", n)
        if not isinstance(t, dict):
            raise loc.error(p, "expected a mapping with functional/vector or diagonal")
        if "diagonal" in t:
            for k, v in _pairs(t["diagonal"], loc, p + ("diagonal",)).items():
                terms.append(({k: v}, {k: 1.0}))
            continue
        missing = [k for k in ("functional", "vector") if k not in t]
        if missing:
            raise loc.error(p, f"missing {', '.join(missing)}")
        terms.append((_pairs(t["functional"], loc, p + ("functional",)), _pairs(t["vector"], loc, p + ("vector",))))
    window = doc.get("window")
    if window is not None:
        if not (isinstance(window, list) and len(window) == 2 and all(isinstance(x, int) for x in window)):
            raise loc.error(("window",), "expected [lo, hi] integers")
        window = tuple(window)
    try:
        K = NuclearOperatorRep.from_terms(terms, space, window)
    except OperatorError as exc:
        raise loc.error(("window",) if window else ("terms",), str(exc)) from exc
    return K.without_zero_terms() if K.rank else K


def _interval(doc: dict, loc: _Locator) -> IntervalProblem:
    iv = doc.get("interval", [0.0, 1.0])
    if not (isinstance(iv, list) and len(iv) == 2):
        raise loc.error(("interval",), "expected [alpha, beta]")
    alpha, beta = _real(iv[0], loc, ("interval", 0)), _real(iv[1], loc, ("interval", 1))
    if not alpha < beta:
        raise loc.error(("interval",), "need alpha < beta")
    nodes = doc.get("nodes", DEFAULT_NODES)
    if not isinstance(nodes, int) or nodes < MIN_NODES:
        raise loc.error(("nodes",), f"node count must be an integer >= {MIN_NODES}")
    coupling = _real(doc.get("coupling", -1.0), loc, ("coupling",))

    sym = doc.get("symbol", {"name": "identity"})
    if not isinstance(sym, dict):
        raise loc.error(("symbol",), "expected a mapping")
    if "samples" in sym:
        vals = sym["samples"]
        if not isinstance(vals, list) or len(vals) != nodes:
            raise loc.error(("symbol", "samples"), f"expected {nodes} samples")
        model = MultiplicationModel.from_samples([_real(v, loc, ("symbol", "samples", i)) for i, v in enumerate(vals)], alpha, beta)
    else:
        name = sym.get("name")
        if name not in SYMBOLS:
            raise loc.error(("symbol", "name"), f"unknown symbol {name!r}; built-ins: {sorted(SYMBOLS)}")
        model = MultiplicationModel.from_function(SYMBOLS[name], alpha, beta, nodes)

    ker = doc.get("kernel")
    if not isinstance(ker, dict):
        raise loc.error(("kernel",), "expected a kernel mapping")
    if "samples" in ker:
        rows = ker["samples"]
        if not (isinstance(rows, list) and len(rows) == nodes and all(isinstance(r, list) and len(r) == nodes for r in rows)):
            raise loc.error(("kernel", "samples"), f"expected a {nodes}x{nodes} table")
        table = [[_scalar(v, loc, ("kernel", "samples", i, j)) for j, v in enumerate(r)] for i, r in enumerate(rows)]
        kernel = KernelModel.from_samples(table, alpha, beta)
    else:
        name = ker.get("name")
        if name not in KERNELS:
            raise loc.error(("kernel", "name"), f"unknown kernel {name!r}; built-ins: {list(KERNELS)}")
        value = _scalar(ker.get("value", 1.0), loc, ("kernel", "value"))
        scale = _real(ker.get("scale", 1.0), loc, ("kernel", "scale"))
        kernel = KernelModel.from_function(_kernel_builtin(name, value, scale), alpha, beta, nodes)
    return IntervalProblem(model, kernel, coupling)


def parse_operator(source: str, name: str = "<operator>") -> LoadedOperator:
    loc = _Locator(source, name)
    try:
        doc = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{name}:{mark.line + 1}:{mark.column + 1}" if mark else name
        problem = getattr(exc, "problem", None) or str(exc)
        raise OperatorFileError(f"{where}: {problem}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise loc.error((), "top level must be a mapping")
    scenario = doc.get("scenario", "laplacian")
    if scenario == "laplacian":
        return LoadedOperator("laplacian", lattice=_lattice(doc, loc))
    if scenario == "interval":
        return LoadedOperator("interval", interval=_interval(doc, loc))
    raise loc.error(("scenario",), f"unknown scenario {scenario!r}")


def load_operator(path) -> LoadedOperator:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OperatorFileError(f"{path}: cannot read operator file: {exc.strerror}") from exc
    return parse_operator(text, str(path))


def dump_lattice(K: NuclearOperatorRep) -> str:
    """Inverse of the lattice branch of :func:`parse_operator`."""

    def val(z):
        z = complex(z)
        return z.real if z.imag == 0 else str(z).strip("()")

    terms = []
    for phi, f in zip(K.functionals, K.vectors):
        terms.append(
            {
                "functional": [[K.start + k, val(v)] for k, v in enumerate(phi) if v != 0],
                "vector": [[K.start + k, val(v)] for k, v in enumerate(f) if v != 0],
            }
        )
    doc = {"scenario": "laplacian", "space": K.space, "window": list(K.window), "terms": terms}
    return yaml.safe_dump(doc, sort_keys=False)
