"""Problem JSON files and the grid-function CSVs that go with them.

Schema::

    {"timescale": {"components": [{"type": "interval", "lo": 0, "hi": 1},
                                  {"type": "point", "t": 2}]},
     "f": "1", "kernel": "5",
     "psi": "<expression or path.csv>",      # optional
     "omega": "<expression or path.csv>",    # optional
     "grid": {"h_max": 0.001},
     "solver": {"tol": 1e-10, "max_iter": 100}}

CSV paths are resolved relative to the problem file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .calculus import GridFunction
from .errors import InputError, UnboundVariable
from .expr import Expr, parse, to_string, variables
from .timescale import TimeScale
from .volterra import DEFAULT_H_MAX, DEFAULT_TOL, VolterraProblem


def _is_csv_ref(text: str, base: Path) -> bool:
    return text.strip().lower().endswith(".csv") or (base / text).is_file()


@dataclass
class FunctionRef:
    """A ``psi``/``omega`` entry: either a parsed expression or a CSV file."""

    expr: Expr | None = None
    path: Path | None = None

    @classmethod
    def parse(cls, text: str, base: Path, name: str) -> "FunctionRef":
        if not isinstance(text, str):
            raise InputError(f"'{name}' must be a string")
        if _is_csv_ref(text, base):
            path = (base / text).resolve()
            if not path.is_file():
                raise InputError(f"'{name}' CSV file {str(path)!r} does not exist")
            return cls(path=path)
        e = parse(text)
        if "s" in variables(e):
            raise UnboundVariable("s")
        return cls(expr=e)

    def sample(self, problem: VolterraProblem) -> GridFunction:
        if self.expr is not None:
            return problem.sample(self.expr)
        return GridFunction.from_csv(self.path.read_text(), problem.grid)


@dataclass
class ProblemSpec:
    timescale: TimeScale
    f: Expr
    kernel: Expr
    h_max: float = DEFAULT_H_MAX
    tol: float = DEFAULT_TOL
    max_iter: int | None = None
    psi: FunctionRef | None = None
    omega: FunctionRef | None = None

    def build(self) -> VolterraProblem:
        return VolterraProblem(self.timescale, self.f, self.kernel, h_max=self.h_max)

    def to_dict(self) -> dict:
        out = {
            "timescale": self.timescale.to_dict(),
            "f": to_string(self.f),
            "kernel": to_string(self.kernel),
            "grid": {"h_max": self.h_max},
            "solver": {"tol": self.tol},
        }
        if self.max_iter is not None:
            out["solver"]["max_iter"] = self.max_iter
        return out


def _positive(value, name, integer=False):
    ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if integer:
        ok = ok and float(value).is_integer()
    if not ok or not math.isfinite(value) or value <= 0:
        kind = "positive integer" if integer else "positive number"
        raise InputError(f"{name} must be a {kind}, got {value!r}")
    return int(value) if integer else float(value)


def parse_problem(data: dict, base: Path = Path(".")) -> ProblemSpec:
    if not isinstance(data, dict):
        raise InputError("problem JSON must be an object")
    for key in ("timescale", "f", "kernel"):
        if key not in data:
            raise InputError(f"problem JSON is missing '{key}'")
    ts = TimeScale.from_dict(data["timescale"])
    for key in ("f", "kernel"):
        if not isinstance(data[key], str):
            raise InputError(f"'{key}' must be an expression string")
    f = parse(data["f"])
    if "s" in variables(f):
        raise UnboundVariable("s")
    kernel = parse(data["kernel"])
    grid = data.get("grid", {}) or {}
    solver = data.get("solver", {}) or {}
    if not isinstance(grid, dict) or not isinstance(solver, dict):
        raise InputError("'grid' and 'solver' must be objects")
    spec = ProblemSpec(
        timescale=ts,
        f=f,
        kernel=kernel,
        h_max=_positive(grid.get("h_max", DEFAULT_H_MAX), "grid.h_max"),
        tol=_positive(solver.get("tol", DEFAULT_TOL), "solver.tol"),
        max_iter=None if solver.get("max_iter") is None else _positive(solver["max_iter"], "solver.max_iter", True),
    )
    for key in ("psi", "omega"):
        if data.get(key) is not None:
            setattr(spec, key, FunctionRef.parse(data[key], base, key))
    return spec


def load_problem(path) -> ProblemSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {str(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    return parse_problem(data, path.parent)


def load_timescale(path) -> TimeScale:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {str(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(data, dict) and "timescale" in data:
        data = data["timescale"]
    return TimeScale.from_dict(data)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
