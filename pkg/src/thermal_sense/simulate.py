"""Synthetic 8x8 thermal scene generator.

The thermal model is deliberately simple: each pixel takes the maximum
of the ambient background, an elliptical body contribution, and any
point-source contributions, plus Gaussian read noise, then passes
through the sensor quantizer. Contributions decay as exp(-d^2/2) with
d the distance (in grid units) outside the shape boundary, so warm
shapes have a soft one-pixel skirt.

A duvet attenuates the apparent body temperature toward the room
temperature; the attenuation decays exponentially as the duvet warms
up, so frames taken right after covering are the hardest to tell apart
from an empty bed.

Every frame is seeded independently, so datasets are reproducible
byte-for-byte and frames may be rendered in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .core import (
    GRID_SIZE,
    ConditionTag,
    Dataset,
    Label,
    LabeledSample,
    ThermalFrame,
    flatten,
    quantize,
)
from .errors import ConfigError, DataFormatError, InvalidInputError

DEFAULT_DUVET_F0 = 0.35
DEFAULT_DUVET_TAU_MIN = 4.0

# Pixel centers sit at integer coordinates 0..7; the grid covers [-0.5, 7.5].
_GRID_LO = -0.5
_GRID_HI = GRID_SIZE - 0.5
_ROWS, _COLS = np.meshgrid(
    np.arange(GRID_SIZE, dtype=np.float64),
    np.arange(GRID_SIZE, dtype=np.float64),
    indexing="ij",
)


def duvet_factor(minutes: float, f0: float = DEFAULT_DUVET_F0,
                 tau_min: float = DEFAULT_DUVET_TAU_MIN) -> float:
    """Fraction of body-over-room contrast transmitted through a duvet.

    factor(t) = 1 - (1 - f0) * exp(-t / tau); strictly increasing from
    f0 at t=0 toward 1 as the duvet warms up.
    """
    if not np.isfinite(minutes) or minutes < 0:
        raise InvalidInputError(f"minutes must be finite and non-negative, got {minutes!r}")
    if not (0.0 < f0 <= 1.0) or tau_min <= 0:
        raise InvalidInputError("need 0 < f0 <= 1 and tau_min > 0")
    return 1.0 - (1.0 - f0) * math.exp(-minutes / tau_min)


@dataclass(frozen=True)
class PersonConfig:
    """A lying body modeled as a warm rotated ellipse in grid coordinates."""

    center: tuple[float, float]
    orientation_deg: float = 0.0
    semi_axes: tuple[float, float] = (2.8, 1.2)
    skin_temp_c: float = 32.0

    def __post_init__(self) -> None:
        a, b = self.semi_axes
        if a <= 0 or b <= 0:
            raise ConfigError("semi-axes must be positive")
        if not (28.0 <= self.skin_temp_c <= 37.0):
            raise ConfigError(f"skin temperature {self.skin_temp_c} outside [28, 37]")

    def footprint_within_grid(self) -> bool:
        a, b = self.semi_axes
        th = math.radians(self.orientation_deg)
        half_r = math.hypot(a * math.cos(th), b * math.sin(th))
        half_c = math.hypot(a * math.sin(th), b * math.cos(th))
        r, c = self.center
        return (
            r - half_r >= _GRID_LO and r + half_r <= _GRID_HI
            and c - half_c >= _GRID_LO and c + half_c <= _GRID_HI
        )


@dataclass(frozen=True)
class PointSource:
    """A compact warm object (water bottle, small pet stand-in)."""

    center: tuple[float, float]
    radius: float = 0.35
    temp_c: float = 37.0

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ConfigError("radius must be non-negative")
        if self.temp_c > 45.0:
            raise ConfigError(f"point source at {self.temp_c} exceeds 45 C")


@dataclass(frozen=True)
class SceneConfig:
    room_temp_c: float
    person: PersonConfig | None = None
    heat_sources: tuple[PointSource, ...] = ()
    duvet_minutes: float | None = None
    noise_sigma: float = 0.0
    seed: int = 0
    duvet_f0: float = DEFAULT_DUVET_F0
    duvet_tau_min: float = DEFAULT_DUVET_TAU_MIN
    # Optional body clipped at the view edge ("someone standing next to
    # the bed"); exempt from the footprint check, off by default.
    edge_person: PersonConfig | None = None

    def __post_init__(self) -> None:
        if not (15.0 <= self.room_temp_c <= 35.0):
            raise ConfigError(f"room temperature {self.room_temp_c} outside [15, 35]")
        if self.noise_sigma < 0 or not np.isfinite(self.noise_sigma):
            raise ConfigError("noise sigma must be finite and non-negative")
        if self.duvet_minutes is not None:
            if self.person is None:
                raise ConfigError("duvet_minutes given without a person")
            if self.duvet_minutes < 0:
                raise ConfigError("duvet_minutes must be non-negative")
        if self.person is not None and not self.person.footprint_within_grid():
            raise ConfigError("person footprint extends outside the 8x8 grid")


def _ellipse_excess_distance(person: PersonConfig) -> np.ndarray:
    """Distance (grid units, approximate) of each pixel outside the ellipse; 0 inside."""
    th = math.radians(person.orientation_deg)
    dr = _ROWS - person.center[0]
    dc = _COLS - person.center[1]
    a, b = person.semi_axes
    u = (dr * math.cos(th) + dc * math.sin(th)) / a
    v = (-dr * math.sin(th) + dc * math.cos(th)) / b
    rho = np.hypot(u, v)
    return np.maximum(rho - 1.0, 0.0) * min(a, b)


def render(cfg: SceneConfig) -> ThermalFrame:
    """Render one frame: max-composed contributions + noise, quantized."""
    field = np.full((GRID_SIZE, GRID_SIZE), cfg.room_temp_c, dtype=np.float64)

    for body, duvet_minutes in ((cfg.person, cfg.duvet_minutes), (cfg.edge_person, None)):
        if body is None:
            continue
        factor = 1.0 if duvet_minutes is None else duvet_factor(
            duvet_minutes, cfg.duvet_f0, cfg.duvet_tau_min)
        effective = cfg.room_temp_c + (body.skin_temp_c - cfg.room_temp_c) * factor
        d = _ellipse_excess_distance(body)
        field = np.maximum(field, effective * np.exp(-0.5 * d * d))

    for src in cfg.heat_sources:
        d = np.maximum(np.hypot(_ROWS - src.center[0], _COLS - src.center[1]) - src.radius, 0.0)
        field = np.maximum(field, src.temp_c * np.exp(-0.5 * d * d))

    rng = np.random.default_rng(cfg.seed)
    noisy = field + rng.normal(0.0, cfg.noise_sigma, field.shape) if cfg.noise_sigma > 0 else field
    return quantize(noisy)


@dataclass(frozen=True)
class SimParams:
    """Tunable ranges for dataset generation (flat key=value config file)."""

    room_lo: float = 20.0
    room_hi: float = 21.0
    hot_room_lo: float = 24.0
    hot_room_hi: float = 25.0
    skin_lo: float = 30.0
    skin_hi: float = 34.0
    noise_sigma: float = 0.1
    duvet_f0: float = DEFAULT_DUVET_F0
    duvet_tau_min: float = DEFAULT_DUVET_TAU_MIN
    bottle_temp_c: float = 37.0
    bottle_radius_lo: float = 0.3
    bottle_radius_hi: float = 0.4
    bottle_row_lo: float = 1.5
    bottle_row_hi: float = 6.5
    bottle_col_lo: float = 1.5
    bottle_col_hi: float = 6.5
    person_row_lo: float = 2.6
    person_row_hi: float = 4.4
    person_col_lo: float = 2.2
    person_col_hi: float = 4.8
    person_orient_deg: float = 25.0
    person_semi_a_lo: float = 2.3
    person_semi_a_hi: float = 2.9
    person_semi_b_lo: float = 1.0
    person_semi_b_hi: float = 1.4


DEFAULT_SIM_PARAMS = SimParams()


def load_sim_params(path) -> SimParams:
    """Read SimParams overrides from a flat key=value file ('#' comments)."""
    known = {f.name for f in fields(SimParams)}
    overrides: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise DataFormatError(f"{path}:{lineno}: expected key=value")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in known:
                raise DataFormatError(f"{path}:{lineno}: unknown parameter {key!r}")
            try:
                overrides[key] = float(value.strip())
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: bad value for {key!r}") from None
    return replace(SimParams(), **overrides)


def _frame_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def _draw_person(rng: np.random.Generator, p: SimParams) -> PersonConfig:
    return PersonConfig(
        center=(
            rng.uniform(p.person_row_lo, p.person_row_hi),
            rng.uniform(p.person_col_lo, p.person_col_hi),
        ),
        orientation_deg=rng.uniform(-p.person_orient_deg, p.person_orient_deg),
        semi_axes=(
            rng.uniform(p.person_semi_a_lo, p.person_semi_a_hi),
            rng.uniform(p.person_semi_b_lo, p.person_semi_b_hi),
        ),
        skin_temp_c=rng.uniform(p.skin_lo, p.skin_hi),
    )


def _draw_bottle(rng: np.random.Generator, p: SimParams) -> PointSource:
    return PointSource(
        center=(
            rng.uniform(p.bottle_row_lo, p.bottle_row_hi),
            rng.uniform(p.bottle_col_lo, p.bottle_col_hi),
        ),
        radius=rng.uniform(p.bottle_radius_lo, p.bottle_radius_hi),
        temp_c=p.bottle_temp_c,
    )


def _scene(seed_key: tuple[int, ...], p: SimParams, *, hot: bool = False,
           person: bool = False, bottle: bool = False,
           duvet_minutes: float | None = None) -> SceneConfig:
    rng = np.random.default_rng(seed_key)
    room = rng.uniform(p.hot_room_lo, p.hot_room_hi) if hot else rng.uniform(p.room_lo, p.room_hi)
    return SceneConfig(
        room_temp_c=room,
        person=_draw_person(rng, p) if person else None,
        heat_sources=(_draw_bottle(rng, p),) if bottle else (),
        duvet_minutes=duvet_minutes,
        noise_sigma=p.noise_sigma,
        seed=_frame_seed(rng),
        duvet_f0=p.duvet_f0,
        duvet_tau_min=p.duvet_tau_min,
    )


def _sample(cfg: SceneConfig, label: Label, tag: ConditionTag) -> LabeledSample:
    return LabeledSample(flatten(render(cfg)), label, tag)


def generate_main(n_per_class: int, seed: int,
                  params: SimParams = DEFAULT_SIM_PARAMS) -> Dataset:
    """Baseline dataset: n occupied frames followed by n empty frames."""
    if n_per_class < 1:
        raise InvalidInputError("n_per_class must be at least 1")
    samples = [
        _sample(_scene((seed, 0, i), params, person=True), Label.PERSON, ConditionTag.BASELINE)
        for i in range(n_per_class)
    ]
    samples += [
        _sample(_scene((seed, 1, i), params), Label.NO_PERSON, ConditionTag.BASELINE)
        for i in range(n_per_class)
    ]
    return Dataset(tuple(samples), "main")


def generate_variational(n_per_cell: int, seed: int,
                         params: SimParams = DEFAULT_SIM_PARAMS) -> Dataset:
    """Perturbed dataset: hot room, warm bottle, and duvet conditions.

    Each condition contributes n_per_cell occupied and n_per_cell empty
    frames (6 * n_per_cell total). Occupied duvet frames are split evenly
    across covered-for-0/5/10-minutes tags; empty duvet frames carry the
    duvet_0 tag.
    """
    if n_per_cell < 1:
        raise InvalidInputError("n_per_cell must be at least 1")
    if n_per_cell % 3 != 0:
        raise InvalidInputError("n_per_cell must be divisible by 3 for the duvet time split")
    third = n_per_cell // 3
    duvet_cells = (
        (0.0, ConditionTag.DUVET_0),
        (5.0, ConditionTag.DUVET_5),
        (10.0, ConditionTag.DUVET_10),
    )
    samples = []
    for i in range(n_per_cell):
        samples.append(_sample(_scene((seed, 2, i), params, hot=True, person=True),
                               Label.PERSON, ConditionTag.HOT_ROOM))
    for i in range(n_per_cell):
        samples.append(_sample(_scene((seed, 3, i), params, hot=True),
                               Label.NO_PERSON, ConditionTag.HOT_ROOM))
    for i in range(n_per_cell):
        samples.append(_sample(_scene((seed, 4, i), params, person=True, bottle=True),
                               Label.PERSON, ConditionTag.WATER_BOTTLE))
    for i in range(n_per_cell):
        samples.append(_sample(_scene((seed, 5, i), params, bottle=True),
                               Label.NO_PERSON, ConditionTag.WATER_BOTTLE))
    for i in range(n_per_cell):
        minutes, tag = duvet_cells[i // third]
        samples.append(_sample(_scene((seed, 6, i), params, person=True, duvet_minutes=minutes),
                               Label.PERSON, tag))
    for i in range(n_per_cell):
        samples.append(_sample(_scene((seed, 7, i), params),
                               Label.NO_PERSON, ConditionTag.DUVET_0))
    return Dataset(tuple(samples), "variational")
