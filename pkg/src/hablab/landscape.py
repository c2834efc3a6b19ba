"""Scenario parsing and the continuous problem description.

A landscape is a box domain `omega`, a finite set of disjoint open boxes
`b_region` (the degraded region) strictly inside it, a diffusion rate, a
piecewise-constant growth profile and a list of degradation rates.  The
growth law is logistic with spatial weight, f(x, u) = u * (m(x) - u); the
degraded region carries a plain linear sink -c*u instead of growth.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Union

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ScenarioError


class Destruction(enum.Enum):
    """Distinguished marker for the c -> infinity (destruction) limit."""

    INF = "inf"


DESTRUCTION = Destruction.INF

CValue = Union[float, Destruction]

_SCENARIO_KEYS = {"dim", "omega", "b", "d", "m_default", "m_patches", "c"}
_PATCH_KEYS = {"box", "value"}


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with real bounds (interval in 1D, rectangle in 2D)."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def measure(self) -> float:
        m = 1.0
        for a, b in zip(self.lo, self.hi):
            m *= b - a
        return m

    def contains(self, point: tuple[float, ...], closed: bool = True) -> bool:
        if closed:
            return all(a <= p <= b for p, a, b in zip(point, self.lo, self.hi))
        return all(a < p < b for p, a, b in zip(point, self.lo, self.hi))

    def strictly_inside(self, outer: "Box") -> bool:
        """True when this box has positive distance to the boundary of `outer`."""
        return all(
            oa < a and b < ob
            for a, b, oa, ob in zip(self.lo, self.hi, outer.lo, outer.hi)
        )

    def closure_disjoint(self, other: "Box") -> bool:
        return any(
            self.hi[k] < other.lo[k] or other.hi[k] < self.lo[k]
            for k in range(self.dim)
        )


@dataclass(frozen=True)
class GrowthProfile:
    """Piecewise-constant growth weight m(x): a default value overridden by
    (box, value) patches applied in order; later patches win on overlap.
    Patch values apply on the closed patch box (the boundary has measure
    zero, so quadrature is unaffected)."""

    default: float = 1.0
    patches: tuple[tuple[Box, float], ...] = ()

    def values(self, points: np.ndarray) -> np.ndarray:
        """Evaluate m at an (N, dim) array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        m = np.full(pts.shape[0], float(self.default))
        for box, val in self.patches:
            inside = np.ones(pts.shape[0], dtype=bool)
            for k in range(box.dim):
                inside &= (pts[:, k] >= box.lo[k]) & (pts[:, k] <= box.hi[k])
            m[inside] = val
        return m

    def value_at(self, point: tuple[float, ...]) -> float:
        val = float(self.default)
        for box, patch_val in self.patches:
            if box.contains(point):
                val = patch_val
        return val

    @property
    def is_constant(self) -> bool:
        return not self.patches


@dataclass(frozen=True)
class Landscape:
    """Validated continuous problem data. Immutable; safe to share."""

    dim: int
    omega: Box
    b_region: tuple[Box, ...]
    diffusion: float
    growth: GrowthProfile
    c_values: tuple[CValue, ...] = (0.0,)

    def validate(self) -> "Landscape":
        if self.dim not in (1, 2):
            raise ScenarioError(f"dim must be 1 or 2, got {self.dim}")
        if self.omega.dim != self.dim:
            raise ScenarioError("omega bounds do not match dim")
        for a, b in zip(self.omega.lo, self.omega.hi):
            if not a < b:
                raise ScenarioError("empty omega: lower bound must be below upper")
        if not self.diffusion > 0:
            raise ScenarioError(f"diffusion d must be positive, got {self.diffusion}")
        for box in self.b_region:
            if box.dim != self.dim:
                raise ScenarioError("b component does not match dim")
            for a, b in zip(box.lo, box.hi):
                if not a < b:
                    raise ScenarioError("degenerate b component (zero width)")
            if not box.strictly_inside(self.omega):
                raise ScenarioError(
                    "b component must be compactly inside omega "
                    f"(got {box.lo}..{box.hi} in {self.omega.lo}..{self.omega.hi})"
                )
        for first, second in itertools.combinations(self.b_region, 2):
            if not first.closure_disjoint(second):
                raise ScenarioError("b components must be pairwise disjoint")
        for box, _ in self.growth.patches:
            if box.dim != self.dim:
                raise ScenarioError("growth patch does not match dim")
        for c in self.c_values:
            if isinstance(c, Destruction):
                continue
            if not c >= 0:
                raise ScenarioError(f"degradation rate c must be >= 0, got {c}")
        if not any(
            self.growth.value_at(center) > 0
            for center, _ in self.undisturbed_cells()
        ):
            raise ScenarioError(
                "growth must be positive somewhere in the undisturbed region"
            )
        return self

    # -- exact piecewise-constant geometry ---------------------------------

    def cells(self) -> Iterator[tuple[tuple[float, ...], float]]:
        """Yield (center, measure) over the coarsest rectangular partition on
        which membership in omega/b/patches is constant."""
        breaks = []
        for k in range(self.dim):
            pts = {self.omega.lo[k], self.omega.hi[k]}
            for box in self.b_region:
                pts.add(min(max(box.lo[k], self.omega.lo[k]), self.omega.hi[k]))
                pts.add(min(max(box.hi[k], self.omega.lo[k]), self.omega.hi[k]))
            for box, _ in self.growth.patches:
                pts.add(min(max(box.lo[k], self.omega.lo[k]), self.omega.hi[k]))
                pts.add(min(max(box.hi[k], self.omega.lo[k]), self.omega.hi[k]))
            breaks.append(sorted(pts))
        if self.dim == 1:
            for a, b in zip(breaks[0][:-1], breaks[0][1:]):
                if b > a:
                    yield ((a + b) / 2,), b - a
        else:
            for (xa, xb) in zip(breaks[0][:-1], breaks[0][1:]):
                for (ya, yb) in zip(breaks[1][:-1], breaks[1][1:]):
                    if xb > xa and yb > ya:
                        yield ((xa + xb) / 2, (ya + yb) / 2), (xb - xa) * (yb - ya)

    def undisturbed_cells(self) -> Iterator[tuple[tuple[float, ...], float]]:
        for center, meas in self.cells():
            if not any(box.contains(center) for box in self.b_region):
                yield center, meas

    @property
    def measure_omega(self) -> float:
        return self.omega.measure

    @property
    def measure_b(self) -> float:
        return sum(box.measure for box in self.b_region)

    def max_growth(self) -> float:
        """Largest growth value attained on the undisturbed region."""
        return max(self.growth.value_at(center) for center, _ in self.undisturbed_cells())

    def finite_c(self) -> tuple[float, ...]:
        return tuple(c for c in self.c_values if not isinstance(c, Destruction))

    @property
    def has_destruction(self) -> bool:
        return any(isinstance(c, Destruction) for c in self.c_values)


def habitat_fraction_removed(landscape: Landscape) -> float:
    """|B| / |Omega|, the fraction of habitat degraded/destroyed."""
    return landscape.measure_b / landscape.measure_omega


def c_star(landscape: Landscape) -> float:
    """Mean growth over the undisturbed region per unit degraded area,
    (1/|B|) * integral of m over omega \\ B.  The integral is exact for
    piecewise-constant growth.  Sign threshold for the indefinite-weight
    eigenproblem and a lower bound for the extinction threshold."""
    vol_b = landscape.measure_b
    if vol_b <= 0:
        raise ScenarioError("c_star requires a nonempty degraded region")
    total = 0.0
    for center, meas in landscape.undisturbed_cells():
        total += landscape.growth.value_at(center) * meas
    return total / vol_b


# -- parsing ---------------------------------------------------------------


def _parse_box(raw: object, dim: int, what: str) -> Box:
    if not isinstance(raw, list):
        raise ScenarioError(f"{what} must be an array")
    if dim == 1:
        if len(raw) != 2 or not all(isinstance(v, (int, float)) for v in raw):
            raise ScenarioError(f"{what} must be [lo, hi] in 1D")
        return Box((float(raw[0]),), (float(raw[1]),))
    if len(raw) != 2 or not all(isinstance(side, list) and len(side) == 2 for side in raw):
        raise ScenarioError(f"{what} must be [[xlo, xhi], [ylo, yhi]] in 2D")
    for side in raw:
        if not all(isinstance(v, (int, float)) for v in side):
            raise ScenarioError(f"{what} bounds must be numbers")
    return Box((float(raw[0][0]), float(raw[1][0])), (float(raw[0][1]), float(raw[1][1])))


def _parse_c(raw: object) -> tuple[CValue, ...]:
    entries = raw if isinstance(raw, list) else [raw]
    out: list[CValue] = []
    for entry in entries:
        if isinstance(entry, str):
            if entry != "inf":
                raise ScenarioError(f'c entries must be numbers or "inf", got {entry!r}')
            out.append(DESTRUCTION)
        elif isinstance(entry, (int, float)):
            out.append(float(entry))
        else:
            raise ScenarioError(f"invalid c entry: {entry!r}")
    if not out:
        raise ScenarioError("c must not be an empty list")
    return tuple(out)


def build_landscape(config_text: str) -> Landscape:
    """Parse a scenario document into a validated Landscape.

    Schema (TOML): dim = 1|2; omega = [lo, hi] (1D) or per-axis pairs (2D);
    b = [box, ...]; d = positive number; m_default = number (default 1.0);
    m_patches = [{box = ..., value = ...}, ...]; c = number | "inf" | list.
    Unknown keys are rejected.
    """
    try:
        doc = tomllib.loads(config_text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"scenario parse error: {exc}") from exc
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    for key in ("dim", "omega", "d"):
        if key not in doc:
            raise ScenarioError(f"scenario is missing required key {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int):
        raise ScenarioError("dim must be an integer")
    omega = _parse_box(doc["omega"], dim, "omega")
    b_region = tuple(
        _parse_box(raw, dim, "b component") for raw in doc.get("b", [])
    )
    if not isinstance(doc["d"], (int, float)):
        raise ScenarioError("d must be a number")
    patches: list[tuple[Box, float]] = []
    for raw in doc.get("m_patches", []):
        if not isinstance(raw, dict) or set(raw) != _PATCH_KEYS:
            raise ScenarioError("m_patches entries must be {box = ..., value = ...}")
        if not isinstance(raw["value"], (int, float)):
            raise ScenarioError("m_patches value must be a number")
        patches.append((_parse_box(raw["box"], dim, "m_patches box"), float(raw["value"])))
    growth = GrowthProfile(float(doc.get("m_default", 1.0)), tuple(patches))
    c_values = _parse_c(doc.get("c", [0.0]))
    return Landscape(
        dim=dim,
        omega=omega,
        b_region=b_region,
        diffusion=float(doc["d"]),
        growth=growth,
        c_values=c_values,
    ).validate()


def load_landscape(path: str | Path) -> Landscape:
    return build_landscape(Path(path).read_text(encoding="utf-8"))


# -- serialization ---------------------------------------------------------


def _fmt_box(box: Box, dim: int) -> str:
    if dim == 1:
        return f"[{box.lo[0]!r}, {box.hi[0]!r}]"
    return (
        f"[[{box.lo[0]!r}, {box.hi[0]!r}], [{box.lo[1]!r}, {box.hi[1]!r}]]"
    )


def landscape_to_toml(landscape: Landscape) -> str:
    """Serialize so that build_landscape(landscape_to_toml(l)) == l."""
    lines = [f"dim = {landscape.dim}"]
    lines.append(f"omega = {_fmt_box(landscape.omega, landscape.dim)}")
    boxes = ", ".join(_fmt_box(b, landscape.dim) for b in landscape.b_region)
    lines.append(f"b = [{boxes}]")
    lines.append(f"d = {landscape.diffusion!r}")
    lines.append(f"m_default = {landscape.growth.default!r}")
    if landscape.growth.patches:
        patches = ", ".join(
            f"{{ box = {_fmt_box(box, landscape.dim)}, value = {val!r} }}"
            for box, val in landscape.growth.patches
        )
        lines.append(f"m_patches = [{patches}]")
    c_items = ", ".join(
        '"inf"' if isinstance(c, Destruction) else repr(c) for c in landscape.c_values
    )
    lines.append(f"c = [{c_items}]")
    return "\n".join(lines) + "\n"
