"""Run configuration: one JSON file with a section per module."""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import Settings
from ..exceptions import ConfigError, ParameterError
from ..gls import (
    AnalyticPsi,
    DegeneratePsi,
    MeasureSpec,
    PsiFunction,
    ScaledPsi,
    TabulatedPsi,
)
from ..model import (
    Domain,
    DomainKind,
    InequalityKind,
    InequalityParams,
    ValidationMode,
    WeightSpec,
)
from ..quad.settings import McConfig, MethodChoice, QuadSettings
from ..scaling import Direction, EnvelopeRole, FunctionalKind, Regime
from ..trialfuncs import (
    TrialFunction,
    constant,
    linear_ramp,
    log_cusp,
    product,
    radial_power,
    smooth_bump,
)


class Command(str, Enum):
    """Commands of the ``hslab`` entry point."""

    CHECK_SCALING = "check-scaling"
    CHECK_BALANCE = "check-balance"
    ESTIMATE_CONSTANT = "estimate-constant"
    GLS_NORM = "gls-norm"
    ENVELOPE = "envelope"
    VERIFY_ALL = "verify-all"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class FunctionConfig(_Section):
    """Trial function by family name and its options."""

    family: Literal[
        "log_cusp", "smooth_bump", "radial_power", "linear_ramp", "constant", "product"
    ] = "smooth_bump"
    d: int = Field(default=1, ge=1)
    theta: float = Field(default=1.0, gt=0.0, description="Dilation factor")
    amplitude: float = 1.0
    shift: float = 0.0
    radius: float = Field(default=1.0, gt=0.0, description="smooth_bump support radius")
    order: float = Field(default=1.0, gt=0.0, description="smooth_bump profile order")
    center: list[float] | None = None
    exponent: float = Field(default=-0.25, description="radial_power exponent")
    cutoff: float = Field(default=1.0, gt=0.0, description="radial_power cutoff")
    length: float = Field(default=1.0, gt=0.0, description="linear_ramp length")
    value: float = Field(default=1.0, description="constant value")
    factors: list[FunctionConfig] = Field(default_factory=list)

    def build(self) -> TrialFunction:
        if self.family == "product":
            if len(self.factors) != 2:
                raise ConfigError("product functions take exactly two factors")
            u = product(self.factors[0].build(), self.factors[1].build())
        elif self.family == "log_cusp":
            u = log_cusp(self.d)
        elif self.family == "smooth_bump":
            center = tuple(self.center) if self.center else None
            u = smooth_bump(self.d, center, self.radius, self.order)
        elif self.family == "radial_power":
            u = radial_power(self.d, self.exponent, self.cutoff)
        elif self.family == "linear_ramp":
            u = linear_ramp(self.d, self.length)
        else:
            u = constant(self.value, self.d)
        u = u.dilate(self.theta) if self.theta != 1.0 else u
        u = u.scaled(self.amplitude) if self.amplitude != 1.0 else u
        return u.shifted(self.shift) if self.shift != 0.0 else u


class DomainConfig(_Section):
    kind: DomainKind = DomainKind.WHOLE_SPACE
    radius: float | None = None
    lo: float | None = None
    hi: float | None = None
    m: int | None = None

    def build(self, d: int) -> Domain:
        try:
            if self.kind is DomainKind.BALL:
                return Domain.ball(d, self._need(self.radius, "radius"))
            if self.kind is DomainKind.BOX:
                return Domain.box(d, self._need(self.lo, "lo"), self._need(self.hi, "hi"))
            if self.kind is DomainKind.SURFACE:
                return Domain.surface(d, int(self._need(self.m, "m")), self.radius)
        except ValidationError as e:
            raise ParameterError(str(e)) from e
        return Domain.whole_space(d)

    @staticmethod
    def _need(value: float | None, name: str) -> float:
        if value is None:
            raise ConfigError(f"domain needs '{name}'")
        return value


class QuadConfig(_Section):
    """Quadrature overrides; unset fields fall back to ``HSLAB_*`` settings."""

    samples: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    pair_exponent: float | None = None
    origin_exponent: float | None = None
    block_size: int | None = Field(default=None, ge=1)
    workers: int | None = Field(default=None, ge=1)
    tol: float | None = Field(default=None, gt=0.0, lt=1.0)
    window_factor: float | None = Field(default=None, gt=1.0)
    inner_samples: int | None = None
    origin_exclusion: float | None = Field(default=None, gt=0.0, lt=1.0)
    method: MethodChoice = MethodChoice.AUTO

    def build(self, settings: Settings) -> QuadSettings:
        base = settings.quad_settings()
        mc = McConfig(
            n_samples=self.samples or base.mc.n_samples,
            seed=self.seed if self.seed is not None else base.mc.seed,
            pair_exponent=self.pair_exponent,
            origin_exponent=self.origin_exponent,
            block_size=self.block_size or base.mc.block_size,
            workers=self.workers or base.mc.workers,
        )
        return QuadSettings(
            tol=self.tol or base.tol,
            mc=mc,
            window_factor=self.window_factor or base.window_factor,
            inner_samples=self.inner_samples or base.inner_samples,
            origin_exclusion=self.origin_exclusion or base.origin_exclusion,
            method=self.method,
        )


class ScalingConfig(_Section):
    functional: FunctionalKind = FunctionalKind.TARGET
    theta_grid: list[float] | None = None
    m: int | None = None


class ConstantsConfig(_Section):
    scan: Literal["blowup", "remark", "derivative", "quotient"] = "blowup"
    lam: float = Field(default=0.5, gt=0.0, lt=1.0, alias="lambda")
    d: int = Field(default=1, ge=1)
    grid: list[float] = Field(default_factory=lambda: [1.5, 1.7, 1.8, 1.9, 1.95])
    threshold: float | None = None
    m: int | None = None
    rhs_p: float = Field(default=2.0, ge=1.0)
    family: Literal["log_cusp", "smooth_bump"] = "log_cusp"
    alpha1: float = 0.0
    alpha2: float = 0.0
    s_grid: list[float] = Field(default_factory=lambda: [1.0, 1.5, 2.0])
    ratio_bound: float = Field(default=50.0, gt=1.0)


class PsiConfig(_Section):
    """ψ as an analytic formula, a table, a degenerate point or an upper-bound scaling."""

    kind: Literal["analytic", "table", "degenerate", "upper"] = "analytic"
    a: float = 1.0
    b: float = 2.0
    coefficient: float = 1.0
    power: float = 0.0
    factors: list[tuple[float, float]] = Field(default_factory=list)
    p: list[float] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)
    r: float = 2.0
    constant: float = 1.0
    lam: float | None = Field(default=None, alias="lambda")
    base: PsiConfig | None = None

    def build(self) -> PsiFunction:
        if self.kind == "table":
            return TabulatedPsi(self.p, self.values)
        if self.kind == "degenerate":
            return DegeneratePsi(self.r)
        if self.kind == "upper":
            if self.base is None or self.lam is None:
                raise ConfigError("upper ψ needs 'base' and 'lambda'")
            return ScaledPsi.hardy_sobolev_upper(self.base.build(), self.constant, self.lam)
        return AnalyticPsi(self.a, self.b, self.coefficient, self.power, self.factors)


class GlsConfig(_Section):
    task: Literal[
        "norm", "natural", "anisotropic", "embedding", "weak_sharpness", "psi5"
    ] = "norm"
    psi: PsiConfig = Field(default_factory=PsiConfig)
    psi_other: PsiConfig | None = Field(
        default=None, description="ψ₁ of the weak-sharpness ratio"
    )
    measure: MeasureSpec = Field(default_factory=MeasureSpec)
    grid_size: int | None = Field(default=None, ge=2)
    p_vector: list[float] = Field(default_factory=lambda: [2.0, 2.0])
    lam: float = Field(default=0.5, gt=0.0, lt=1.0, alias="lambda")
    mode: Literal["literature_upper", "certified_lower"] = "literature_upper"
    constant: float = Field(default=1.0, gt=0.0)
    constant_table: PsiConfig | None = None
    intervals: list[tuple[float, float]] = Field(default_factory=list)
    r_grid: list[float] = Field(default_factory=list)
    nu_constant: float = Field(default=1.0, gt=0.0, description="Constant ν(p, q)")
    p_max: float = Field(default=8.0, gt=1.0)
    check_function: bool = False


class WeightConfig(_Section):
    """Radial weight as a power ``|z|^{-exponent}`` or a table in ``(radius, value)``."""

    kind: Literal["power", "table"] = "power"
    exponent: float = 0.0
    radius: list[float] = Field(default_factory=list)
    values: list[float] = Field(default_factory=list)

    def build(self) -> WeightSpec:
        if self.kind == "power":
            return WeightSpec.power(self.exponent)
        if len(self.radius) < 2 or len(self.radius) != len(self.values):
            raise ConfigError("tabulated weights need matching radius and values")
        if any(v <= 0 for v in self.values) or any(r <= 0 for r in self.radius):
            raise ConfigError("tabulated weights need positive radii and values")
        log_r, log_v = np.log(self.radius), np.log(self.values)

        def table(z: np.ndarray) -> np.ndarray:
            return np.exp(np.interp(np.log(z), log_r, log_v))

        return WeightSpec.tabulated(table)


class EnvelopeConfig(_Section):
    weight: WeightConfig = Field(default_factory=WeightConfig)
    trial_exponent: float = 0.0
    regime: Regime = Regime.NEAR_ZERO
    role: EnvelopeRole = EnvelopeRole.TARGET
    direction: Direction | None = None
    z_grid: list[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0, 4.0])
    theta_grid: list[float] | None = None
    conditions: dict[str, float] | None = Field(
        default=None,
        description="mu0, mu_inf, alpha0, alpha_inf, beta0, beta_inf for the weighted check",
    )
    use_infinity_rhs: bool = False


class RunConfig(_Section):
    """Everything a run needs; echoed into its report."""

    command: Command
    kind: InequalityKind = InequalityKind.ORDINARY
    mode: ValidationMode = Field(
        default=ValidationMode.PERMISSIVE,
        description="strict: all admissibility bounds; permissive: integrability",
    )
    params: InequalityParams | None = None
    function: FunctionConfig = Field(default_factory=FunctionConfig)
    domain: DomainConfig = Field(default_factory=DomainConfig)
    quad: QuadConfig = Field(default_factory=QuadConfig)
    scaling: ScalingConfig = Field(default_factory=ScalingConfig)
    constants: ConstantsConfig = Field(default_factory=ConstantsConfig)
    gls: GlsConfig = Field(default_factory=GlsConfig)
    envelope: EnvelopeConfig = Field(default_factory=EnvelopeConfig)
    output: str | None = None
    format: Literal["json", "csv"] = "json"
    strict_numerics: bool = False

    @model_validator(mode="after")
    def _check_params(self) -> RunConfig:
        needs_params = {Command.CHECK_SCALING, Command.CHECK_BALANCE}
        if self.command in needs_params and self.params is None:
            raise ValueError(f"{self.command.value} needs a 'params' section")
        if self.command is Command.CHECK_BALANCE and self.params is not None:
            self.params.require(self.kind)
        return self

    def dump(self) -> dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


def load_config(path: str | Path | None, overrides: dict[str, Any]) -> RunConfig:
    """Merge the config file with flag overrides (flags win) and validate.

    ``overrides`` uses dotted keys, e.g. ``{"quad.seed": 7}``.

    Raises:
        ConfigError: If the file cannot be read or is not a JSON object
        pydantic.ValidationError: If the merged config does not validate
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = data
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value
    return RunConfig.model_validate(data)
