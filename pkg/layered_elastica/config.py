"""Run configuration shared by the command-line subcommands."""
from __future__ import annotations

import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from .errors import ValidationError
from .medium import ElasticMedium
from .quadrature import QuadConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "LAYERED_ELASTICA_THREADS"
# 17 significant digits round-trip every double
CSV_FORMAT = "%.17g"

DEFAULT_MEDIUM = {"lambda": 2.0, "mu": 1.0, "rho_plus": 1.0, "rho_minus": 2.0, "omega": 1.0, "dim": 2}


def thread_cap() -> int:
    raw = os.getenv(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, n)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Order-preserving map over a thread pool capped by LAYERED_ELASTICA_THREADS."""
    work = list(items)
    n = min(thread_cap(), len(work)) or 1
    if n == 1:
        return [fn(x) for x in work]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, work))


@dataclass(frozen=True)
class GridAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class GridSpec:
    axes: Tuple[GridAxis, ...]

    @classmethod
    def parse(cls, text: str, dim: int) -> "GridSpec":
        """'x1:a:b:n,x2:c:d:n' with one axis per coordinate, in order."""
        axes = []
        for i, chunk in enumerate(t for t in text.split(",") if t.strip()):
            parts = chunk.strip().split(":")
            if len(parts) != 4:
                raise ValidationError(f"grid axis {chunk!r} must look like name:start:stop:count")
            name, a, b, n = parts
            if name != f"x{i + 1}":
                raise ValidationError(f"grid axis {i + 1} must be named x{i + 1}, got {name!r}")
            try:
                axis = GridAxis(name, float(a), float(b), int(n))
            except ValueError as exc:
                raise ValidationError(f"malformed grid axis {chunk!r}") from exc
            if axis.count < 1:
                raise ValidationError(f"grid axis {name} needs at least one point")
            axes.append(axis)
        if len(axes) != dim:
            raise ValidationError(f"grid has {len(axes)} axes, expected {dim}")
        return cls(tuple(axes))

    def points(self) -> np.ndarray:
        """Row-major: the first axis varies slowest."""
        mesh = np.meshgrid(*(a.values() for a in self.axes), indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)

    @property
    def size(self) -> int:
        return int(np.prod([a.count for a in self.axes]))


def parse_vector(text: str, length: Optional[int] = None) -> List[float]:
    """'[1, 2.5]' or '1,2.5'."""
    try:
        data = json.loads(text) if text.strip().startswith("[") else [float(t) for t in text.split(",")]
        values = [float(v) for v in data]
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"cannot read a vector from {text!r}") from exc
    if length is not None and len(values) != length:
        raise ValidationError(f"expected {length} numbers, got {len(values)} in {text!r}")
    return values


def _load_json(path: Union[str, Path], what: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"{what} file {p} does not exist")
    try:
        with open(p, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} file {p} is not valid JSON: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    medium: ElasticMedium
    quad: QuadConfig = QuadConfig()
    output_path: Optional[Path] = None
    seed: int = 0
    dim: int = 2
    grid: Optional[GridSpec] = None
    options: dict = field(default_factory=dict)

    @classmethod
    def load(cls, subcommand: str, medium_path: Optional[str], quad_path: Optional[str] = None,
             output_path: Optional[str] = None, seed: int = 0, dim: Optional[int] = None,
             grid: Optional[str] = None, **options: object) -> "RunConfig":
        data = DEFAULT_MEDIUM if medium_path is None else _load_json(medium_path, "medium")
        medium = ElasticMedium.from_dict(data)
        if dim is not None:
            medium = medium.with_dim(dim)
        quad = QuadConfig()
        if quad_path is not None:
            try:
                quad = QuadConfig.from_dict(_load_json(quad_path, "quadrature"))
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"bad quadrature config: {exc}") from exc
        out = None if output_path is None else Path(output_path)
        if out is not None and not out.parent.exists():
            raise ValidationError(f"output directory {out.parent} does not exist")
        spec = None if grid is None else GridSpec.parse(grid, medium.dim)
        return cls(subcommand, medium, quad, out, int(seed), medium.dim, spec, dict(options))


def atomic_write(path: Union[str, Path], text: str) -> None:
    """Write to a sibling temp file, then rename over the target."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("wrote %s (%d bytes)", target, len(text))


def _cell(v: object) -> str:
    if isinstance(v, str):
        return v
    return CSV_FORMAT % float(v)  # type: ignore[arg-type]


def format_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"
