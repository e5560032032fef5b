"""Layer 3: Run artefacts -- CSV tables, manifests, digests, input files."""

from __future__ import annotations

import configparser
import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .chiral import HalfLineTestFunction
from .errors import ConvergenceError, UsageError
from .subspace import (
    ComplexHilbertSpaceReal,
    StandardSubspace,
    canonical_factorial_subspace,
    random_factorial_subspace,
)
from .wedge import WedgeCauchyData


log = logging.getLogger(__name__)

ARTIFACT_VERSION = "0.1.0"
MANIFEST_NAME = "manifest.txt"
_SECTION = "manifest"
_RESERVED = ("model", "artifact_version", "status")

HEADERS = {
    "alpha_curve": ("alpha", "entropy", "err_estimate"),
    "beta_sweep": ("beta", "relative_entropy", "beta_derivative"),
    "endpoints": ("quantity", "value", "err_estimate"),
    "subspace_table": ("alpha", "spectral", "fock", "abs_diff"),
    "selftest": ("check", "value", "tolerance", "passed"),
    "spectral_measure": ("lambda", "weight"),
    "modular_spectrum": ("mode", "lambda", "weight"),
}


# -- CSV -----------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits, so that a float survives a text round trip."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write ``rows`` under ``header``; every row must match its width."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row {row!r} does not match header {tuple(header)}")
            writer.writerow([_cell(v) for v in row])
    log.debug("wrote %s", path)
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, [])
        return header, [row for row in reader if row]


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as f:
        while True:
            chunk = f.read(1024 * 1024)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


# -- manifest --------------------------------------------------------------


@dataclass
class RunManifest:
    """Flat ``key = value`` record of one run.

    ``parameters`` holds the resolved configuration, so the manifest can
    be fed back as a configuration file.  Output digests are stored as
    ``output.<file> = <sha256>``.
    """

    model: str
    parameters: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    artifact_version: str = ARTIFACT_VERSION
    status: str = "complete"

    def record(self, path: Path) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def lines(self) -> list[str]:
        out = [
            f"model = {self.model}",
            f"artifact_version = {self.artifact_version}",
            f"status = {self.status}",
        ]
        out += [f"{k} = {v}" for k, v in sorted(self.parameters.items())]
        out += [f"output.{k} = {v}" for k, v in sorted(self.outputs.items())]
        return out

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.lines()) + "\n", encoding="utf-8")
        log.info("manifest written to %s (status %s)", path, self.status)
        return path

    @classmethod
    def read(cls, path: Path) -> RunManifest:
        items = read_flat_file(path)
        if "model" not in items:
            raise UsageError("model", f"{path} is not a run manifest")
        outputs = {k[len("output."):]: v for k, v in items.items() if k.startswith("output.")}
        params = {
            k: v for k, v in items.items() if k not in _RESERVED and not k.startswith("output.")
        }
        return cls(
            model=items["model"],
            parameters=params,
            outputs=outputs,
            artifact_version=items.get("artifact_version", ""),
            status=items.get("status", ""),
        )


def read_flat_file(path: Path) -> dict[str, str]:
    """Parse a section-less ``key = value`` file."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string(f"[{_SECTION}]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise UsageError("config", f"cannot parse {path}: {exc}") from exc
    return dict(parser[_SECTION])


def verify_outputs(manifest: RunManifest, out_dir: Path) -> list[str]:
    """Names of recorded outputs whose digest differs (or that are missing)."""
    bad = []
    for name, digest in sorted(manifest.outputs.items()):
        path = Path(out_dir) / name
        if not path.exists() or sha256_file(path) != digest:
            bad.append(name)
    return bad


def require_verified(manifest: RunManifest, out_dir: Path) -> None:
    bad = verify_outputs(manifest, out_dir)
    if bad:
        raise ConvergenceError(f"outputs differ from manifest: {', '.join(bad)}")
    log.info("all %d outputs match the manifest", len(manifest.outputs))


# -- test functions and Cauchy data ----------------------------------------


def _floats(tokens: Sequence[str], key: str) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise UsageError(key, f"expected numbers, got {' '.join(tokens)!r}") from exc


def _columns(path: Path, names: Sequence[str], key: str) -> list[np.ndarray]:
    try:
        header, rows = read_csv(path)
    except OSError as exc:
        raise UsageError(key, f"cannot read {path}: {exc}") from exc
    missing = [n for n in names if n not in header]
    if missing:
        raise UsageError(key, f"{path} lacks columns {missing}")
    idx = [header.index(n) for n in names]
    try:
        table = np.array([[float(r[i]) for i in idx] for r in rows])
    except (ValueError, IndexError) as exc:
        raise UsageError(key, f"malformed row in {path}: {exc}") from exc
    if table.ndim != 2 or table.shape[0] == 0:
        raise UsageError(key, f"{path} has no data rows")
    return [table[:, j] for j in range(len(names))]


def load_test_function_csv(path: Path) -> HalfLineTestFunction:
    u, f, fp = _columns(path, ("u", "f", "fprime"), "test_function")
    return HalfLineTestFunction.from_samples(u, f, fp, label=f"csv:{path}")


def load_cauchy_csv(path: Path, mass: float = 1.0) -> WedgeCauchyData:
    x, phi, dphi, pi = _columns(path, ("x", "phi", "phiprime", "pi"), "cauchy_data")
    return WedgeCauchyData.from_samples(x, phi, dphi, pi, mass=mass, label=f"csv:{path}")


def parse_test_function(text: str) -> HalfLineTestFunction:
    """``bump a b [amp]``, ``poly-bump a b k [amp]`` or ``csv:path``."""
    text = text.strip()
    if text.startswith("csv:"):
        return load_test_function_csv(Path(text[4:]))
    kind, *args = text.split()
    if kind == "bump" and len(args) in (2, 3):
        return HalfLineTestFunction.bump(*_floats(args, "test_function"))
    if kind == "poly-bump" and len(args) in (3, 4):
        a, b, k, *amp = _floats(args, "test_function")
        if k != int(k):
            raise UsageError("test_function", f"poly-bump order must be an integer, got {k}")
        return HalfLineTestFunction.poly_bump(a, b, int(k), *amp)
    raise UsageError("test_function", f"unknown test function {text!r}")


_CAUCHY_KINDS = {
    "gauss-bump": WedgeCauchyData.gauss_bump,
    "momentum-bump": WedgeCauchyData.momentum_bump,
    "wave-packet": WedgeCauchyData.wave_packet,
}


def parse_cauchy_data(text: str, mass: float = 1.0) -> WedgeCauchyData:
    """``gauss-bump c w``, ``momentum-bump c w``, ``wave-packet c w`` or ``csv:path``.

    An optional trailing number scales the data.
    """
    text = text.strip()
    if text.startswith("csv:"):
        return load_cauchy_csv(Path(text[4:]), mass)
    kind, *args = text.split()
    if kind not in _CAUCHY_KINDS or len(args) not in (2, 3):
        raise UsageError("cauchy_data", f"unknown Cauchy data {text!r}")
    c, w, *scale = _floats(args, "cauchy_data")
    data = _CAUCHY_KINDS[kind](c, w, mass)
    return data.scaled(scale[0]) if scale else data


# -- subspace files --------------------------------------------------------


def _matrix(text: str, key: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    try:
        return np.array([[float(t) for t in r.replace(",", " ").split()] for r in rows])
    except ValueError as exc:
        raise UsageError(key, f"cannot parse matrix: {exc}") from exc


def load_subspace_file(path: Path) -> tuple[StandardSubspace, np.ndarray | None]:
    """Read an INI subspace description.

    ``[ambient]`` has ``dimension`` (complex) and ``metric`` /
    ``complex_structure`` given as ``canonical`` or rows separated by
    ``;``.  ``[subspace]`` has ``basis`` (columns separated by ``;``) and an
    optional ``vector``.
    """
    parser = configparser.ConfigParser(interpolation=None)
    if not parser.read(path, encoding="utf-8"):
        raise UsageError("subspace_file", f"cannot read {path}")
    try:
        amb = parser["ambient"]
        sub = parser["subspace"]
        n = int(amb["dimension"])
        basis_text = sub["basis"]
    except (KeyError, ValueError) as exc:
        raise UsageError("subspace_file", f"{path}: missing or bad entry {exc}") from exc

    canonical = ComplexHilbertSpaceReal.canonical(n)
    metric_text = amb.get("metric", "canonical").strip()
    cs_text = amb.get("complex_structure", "canonical").strip()
    g = canonical.metric if metric_text == "canonical" else _matrix(metric_text, "metric")
    J = (
        canonical.complex_structure
        if cs_text == "canonical"
        else _matrix(cs_text, "complex_structure")
    )
    ambient = ComplexHilbertSpaceReal(g, J)
    basis = _matrix(basis_text, "basis").T
    L = StandardSubspace(ambient, basis)
    vector = None
    if "vector" in sub:
        vector = np.array(_floats(sub["vector"].replace(",", " ").split(), "vector"))
    return L, vector


def parse_subspace(
    text: str, rng: np.random.Generator, vector_norm: float = 0.5
) -> tuple[StandardSubspace, np.ndarray]:
    """``canonical lam``, ``random pairs`` or a path to a subspace file.

    When no vector is given a random element of ``L`` of norm
    ``vector_norm`` is drawn from ``rng``.
    """
    tokens = text.split()
    if tokens and tokens[0] == "canonical" and len(tokens) == 2:
        L, f = canonical_factorial_subspace(_floats(tokens[1:], "subspace_file")[0]), None
    elif tokens and tokens[0] == "random" and len(tokens) == 2:
        L, _ = random_factorial_subspace(rng, int(_floats(tokens[1:], "subspace_file")[0]))
        f = None
    else:
        L, f = load_subspace_file(Path(text.strip()))
    L.check_standard()
    if f is None:
        f = L.random_vector(rng, vector_norm)
    elif f.shape != (L.ambient.dim_real,):
        raise UsageError("subspace_file", f"vector has {f.size} entries, expected {L.ambient.dim_real}")
    return L, f
