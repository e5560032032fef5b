"""Run configuration -- defaults, INI files and flag overrides."""

from __future__ import annotations

import configparser
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Mapping

from .data import format_float, read_flat_file
from .errors import UsageError
from .spectral import AlphaGrid

log = logging.getLogger(__name__)

MODELS = ("chiral", "wedge", "subspace", "selftest")
WEDGE_METHODS = ("momentum", "kernel")
_MANIFEST_ONLY = ("artifact_version", "status")


def _float_tuple(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _positive(key: str, value: float) -> None:
    if not value > 0:
        raise UsageError(key, f"must be positive, got {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """Every parameter of one run.

    Resolution order is flags > configuration file > these defaults.
    """

    model: str = "chiral"
    beta: float = 1.0
    betas: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0, 16.0, 64.0)
    mass: float = 1.0
    alpha_grid: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    ladder_k: tuple[int, int] = (3, 7)
    wedge_ladder_k: tuple[int, int] = (5, 9)
    tol: float = 1e-10
    epsilons: tuple[float, ...] = (1e-3, 1e-4, 1e-5)
    test_function: str = "bump 0.5 1.5"
    cauchy_data: str = "gauss-bump 2.0 1.0"
    wedge_method: str = "momentum"
    subspace_file: str = "canonical 2.0"
    fock_cutoff: int = 40
    seed: int = 20240607
    out_dir: str = "petzrenyi-out"

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise UsageError("model", f"unknown model {self.model!r}, expected one of {MODELS}")
        if self.wedge_method not in WEDGE_METHODS:
            raise UsageError("wedge_method", f"expected one of {WEDGE_METHODS}")
        for key in ("beta", "mass", "tol"):
            _positive(key, getattr(self, key))
        if not self.betas:
            raise UsageError("betas", "beta sweep is empty")
        for b in self.betas:
            _positive("betas", b)
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise UsageError("epsilons", "need positive regulators")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise UsageError("epsilons", "regulators must be strictly decreasing")
        for key in ("ladder_k", "wedge_ladder_k"):
            k_first, k_last = getattr(self, key)
            if k_first < 1 or k_last - k_first < 2:
                raise UsageError(key, "need k_first >= 1 and at least three rungs")
        if self.fock_cutoff < 1:
            raise UsageError("fock_cutoff", f"must be at least 1, got {self.fock_cutoff}")
        AlphaGrid(self.alpha_grid)

    @property
    def grid(self) -> AlphaGrid:
        return AlphaGrid(self.alpha_grid)

    # -- sources ----------------------------------------------------------

    def with_values(self, values: Mapping[str, str | None]) -> RunConfig:
        """Return a copy with textual ``values`` applied; ``None`` is skipped."""
        changes: dict[str, Any] = {}
        for key, text in values.items():
            if text is None:
                continue
            parse = _PARSERS.get(key)
            if parse is None:
                raise UsageError(key, "unknown configuration key")
            try:
                changes[key] = parse(str(text).strip())
            except ValueError as exc:
                raise UsageError(key, f"bad value {text!r}: {exc}") from exc
        return replace(self, **changes)

    @classmethod
    def from_file(cls, path: Path, model: str | None = None) -> RunConfig:
        """Defaults overlaid with ``path``.

        ``path`` is either an INI file with a ``[run]`` section and optional
        per-model sections, or a flat run manifest.
        """
        return cls().with_values(read_config_file(path, model))

    @classmethod
    def resolve(
        cls,
        path: Path | None = None,
        overrides: Mapping[str, str | None] | None = None,
        model: str | None = None,
    ) -> RunConfig:
        cfg = cls() if path is None else cls.from_file(path, model)
        cfg = cfg.with_values(overrides or {})
        if model is not None and cfg.model != model:
            cfg = replace(cfg, model=model)
        log.debug("resolved configuration %s", cfg.as_dict())
        return cfg

    def as_dict(self) -> dict[str, str]:
        """Textual form, exact for floats, as recorded in a manifest."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                out[f.name] = ",".join(
                    str(v) if isinstance(v, int) else format_float(v) for v in value
                )
            elif isinstance(value, float):
                out[f.name] = format_float(value)
            else:
                out[f.name] = str(value)
        return out


def read_config_file(path: Path, model: str | None = None) -> dict[str, str]:
    """Flatten a configuration file to ``key -> text``."""
    path = Path(path)
    if not path.exists():
        raise UsageError("config", f"no such file {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.MissingSectionHeaderError:
        items = read_flat_file(path)
        items = {
            k: v
            for k, v in items.items()
            if k not in _MANIFEST_ONLY and not k.startswith("output.")
        }
        log.info("reading run manifest %s as configuration", path.name)
        return items
    except configparser.Error as exc:
        raise UsageError("config", f"cannot parse {path}: {exc}") from exc

    unknown = [s for s in parser.sections() if s not in ("run",) + MODELS]
    if unknown:
        raise UsageError(unknown[0], "unknown configuration section")
    items: dict[str, str] = dict(parser["run"]) if parser.has_section("run") else {}
    section = model or items.get("model")
    if section and parser.has_section(section):
        items.update(parser[section])
    return items


def _ladder(text: str) -> tuple[int, int]:
    parts = [int(t) for t in text.replace(",", " ").split()]
    if len(parts) != 2:
        raise ValueError("expected 'k_first,k_last'")
    return parts[0], parts[1]


def _grid(text: str) -> tuple[float, ...]:
    return AlphaGrid.parse(text).values


_PARSERS: dict[str, Callable[[str], Any]] = {
    "model": str,
    "beta": float,
    "betas": _float_tuple,
    "mass": float,
    "alpha_grid": _grid,
    "ladder_k": _ladder,
    "wedge_ladder_k": _ladder,
    "tol": float,
    "epsilons": _float_tuple,
    "test_function": str,
    "cauchy_data": str,
    "wedge_method": str,
    "subspace_file": str,
    "fock_cutoff": int,
    "seed": int,
    "out_dir": str,
}
