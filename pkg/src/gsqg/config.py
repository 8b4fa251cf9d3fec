"""Experiment configuration: JSON parsing and validation.

Schema (defaults in brackets)::

    {
      "alpha": float in (0, 2],            required
      "beta": float in [1, 2],             required
      "T": float > 0,                      required
      "dt_list": [float, ...],             required, >= 3 distinct steps dividing T
      "ic": preset name or {"seed": int, "decay_exponent": float [2.0], "band": int [8]},
                                           required
      "grid_n": even int >= 8              [128]
      "scheme": "godunov"|"strang"|"both"  ["both"]
      "norm_orders": [float in [-4, 12]]   [[0, 1, 3]]
      "substep": {"cfl_fraction": float in (0, 1] [0.5],
                  "max_substep": float > 0 or null [null -> dt/8]}
      "output_dir": path                   ["results"]
      "snapshot_times": [float]            [[]]
      "max_dt": float > 0 or null          [null -> preset default]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dynamics import DEFAULT_CFL_FRACTION, ModelParams, SubstepPolicy
from .errors import ConfigParseError, ConfigValidationError
from .presets import PRESET_NAMES, RandomBand
from .splitting import SchemeKind

LATTICE_TOL = 1e-9

_TOP_KEYS = {
    "alpha", "beta", "T", "dt_list", "ic", "grid_n", "scheme", "norm_orders",
    "substep", "output_dir", "snapshot_times", "max_dt",
}
_REQUIRED = ("alpha", "beta", "T", "dt_list", "ic")
_SUBSTEP_KEYS = {"cfl_fraction", "max_substep"}
_RANDOM_KEYS = {"seed", "decay_exponent", "band"}


@dataclass(frozen=True)
class SubstepConfig:
    cfl_fraction: float = DEFAULT_CFL_FRACTION
    max_substep: float | None = None

    def policy(self, dt: float) -> SubstepPolicy:
        if self.max_substep is None:
            return SubstepPolicy.for_step(dt, self.cfl_fraction)
        return SubstepPolicy(self.max_substep, self.cfl_fraction)


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float
    beta: float
    T: float
    dt_list: tuple[float, ...]
    ic: str | RandomBand
    grid_n: int = 128
    scheme: str = "both"
    norm_orders: tuple[float, ...] = (0.0, 1.0, 3.0)
    substep: SubstepConfig = field(default_factory=SubstepConfig)
    output_dir: Path = Path("results")
    snapshot_times: tuple[float, ...] = ()
    max_dt: float | None = None

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.alpha, self.beta)

    @property
    def schemes(self) -> list[SchemeKind]:
        if self.scheme == "both":
            return [SchemeKind.GODUNOV, SchemeKind.STRANG]
        return [SchemeKind.parse(self.scheme)]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ic"] = asdict(self.ic) if isinstance(self.ic, RandomBand) else self.ic
        out["output_dir"] = str(self.output_dir)
        for key in ("dt_list", "norm_orders", "snapshot_times"):
            out[key] = list(out[key])
        return out


def _no_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ConfigParseError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"{key!r} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigValidationError(f"{key!r} must be finite")
    return float(value)


def _integer(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(f"{key!r} must be an integer, got {value!r}")
    return value


def _numbers(value, key: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ConfigParseError(f"{key!r} must be a list of numbers")
    return tuple(_number(v, key) for v in value)


def _check_keys(doc: dict, allowed: set, where: str):
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigParseError(f"unknown key {unknown[0]!r} in {where}")


def _on_lattice(t: float, dt: float) -> bool:
    n = round(t / dt)
    return abs(n * dt - t) <= LATTICE_TOL * max(abs(t), dt)


def _parse_ic(value, grid_n: int):
    if isinstance(value, str):
        if value not in PRESET_NAMES or value == "random_band":
            raise ConfigValidationError(
                f"ic {value!r} must be one of steady_mode, two_mode, classic_shear, "
                "or a random spec {seed, decay_exponent, band}"
            )
        return value
    if not isinstance(value, dict):
        raise ConfigParseError("'ic' must be a preset name or an object")
    _check_keys(value, _RANDOM_KEYS, "'ic'")
    if "seed" not in value:
        raise ConfigParseError("missing key 'seed' in 'ic'")
    spec = RandomBand(
        seed=_integer(value["seed"], "ic.seed"),
        decay_exponent=_number(value.get("decay_exponent", 2.0), "ic.decay_exponent"),
        band=_integer(value.get("band", 8), "ic.band"),
    )
    if not 1 <= spec.band <= grid_n // 4:
        raise ConfigValidationError(f"ic.band must satisfy 1 <= band <= grid_n/4 = {grid_n // 4}")
    if spec.seed < 0:
        raise ConfigValidationError("ic.seed must be nonnegative")
    return spec


def parse_config(text: str | bytes) -> ExperimentConfig:
    """Parse and validate a JSON experiment document."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigParseError("config must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "config")
    for key in _REQUIRED:
        if key not in doc:
            raise ConfigParseError(f"missing required key {key!r}")

    alpha = _number(doc["alpha"], "alpha")
    if not 0 < alpha <= 2:
        raise ConfigValidationError(f"alpha ∈ (0,2] required, got {alpha}")
    beta = _number(doc["beta"], "beta")
    if not 1 <= beta <= 2:
        raise ConfigValidationError(f"beta ∈ [1,2] required, got {beta}")

    grid_n = _integer(doc.get("grid_n", 128), "grid_n")
    if grid_n < 8 or grid_n % 2:
        raise ConfigValidationError(f"grid_n must be an even integer >= 8, got {grid_n}")

    T = _number(doc["T"], "T")
    if not T > 0:
        raise ConfigValidationError(f"T must be positive, got {T}")
    dt_list = _numbers(doc["dt_list"], "dt_list")
    if len(dt_list) < 3 or len(set(dt_list)) != len(dt_list):
        raise ConfigValidationError("dt_list needs at least 3 distinct entries")
    for dt in dt_list:
        if not 0 < dt <= T:
            raise ConfigValidationError(f"every dt must lie in (0, T], got {dt}")
        if not _on_lattice(T, dt):
            raise ConfigValidationError(
                f"dt={dt!r} does not divide T={T!r}: T must be an integer multiple of every dt"
            )

    scheme = doc.get("scheme", "both")
    if scheme not in ("godunov", "strang", "both"):
        raise ConfigValidationError(f"scheme must be 'godunov', 'strang' or 'both', got {scheme!r}")

    norm_orders = _numbers(doc.get("norm_orders", [0, 1, 3]), "norm_orders")
    if not norm_orders or any(not -4 <= s <= 12 for s in norm_orders):
        raise ConfigValidationError("norm_orders must be a nonempty list with entries in [-4, 12]")

    sub = doc.get("substep", {})
    if not isinstance(sub, dict):
        raise ConfigParseError("'substep' must be an object")
    _check_keys(sub, _SUBSTEP_KEYS, "'substep'")
    cfl = _number(sub.get("cfl_fraction", DEFAULT_CFL_FRACTION), "substep.cfl_fraction")
    if not 0 < cfl <= 1:
        raise ConfigValidationError(f"substep.cfl_fraction must lie in (0, 1], got {cfl}")
    max_substep = sub.get("max_substep")
    if max_substep is not None:
        max_substep = _number(max_substep, "substep.max_substep")
        if not max_substep > 0:
            raise ConfigValidationError("substep.max_substep must be positive")

    output_dir = doc.get("output_dir", "results")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigParseError("'output_dir' must be a nonempty string")

    snapshot_times = _numbers(doc.get("snapshot_times", []), "snapshot_times")
    for t in snapshot_times:
        if not -LATTICE_TOL <= t <= T + LATTICE_TOL or not all(_on_lattice(t, dt) for dt in dt_list):
            raise ConfigValidationError(
                f"snapshot time {t!r} must lie in [0, T] on the step lattice of every dt"
            )

    max_dt = doc.get("max_dt")
    if max_dt is not None:
        max_dt = _number(max_dt, "max_dt")
        if not max_dt > 0:
            raise ConfigValidationError("max_dt must be positive")

    return ExperimentConfig(
        alpha=alpha,
        beta=beta,
        T=T,
        dt_list=dt_list,
        ic=_parse_ic(doc["ic"], grid_n),
        grid_n=grid_n,
        scheme=scheme,
        norm_orders=norm_orders,
        substep=SubstepConfig(cfl, max_substep),
        output_dir=Path(output_dir),
        snapshot_times=snapshot_times,
        max_dt=max_dt,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_bytes())
