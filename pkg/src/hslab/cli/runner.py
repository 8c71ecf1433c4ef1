"""Dispatch of a validated run config to the owning module."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from collections.abc import Callable
from typing import Any

from ..config import Settings
from ..constants import (
    blowup_params,
    dd_constant_probe,
    dd_params,
    lower_bound_scan,
    rayleigh_quotient,
    remark_params,
    remark_scan_general_alpha,
)
from ..exceptions import ConfigError, ParameterError, ScalingAbortedError
from ..gls import (
    DEFAULT_GRID_SIZE,
    anisotropic_norm,
    bgls_norm,
    check_embedding_51a,
    natural_psi,
    psi5_and_check_52,
    weak_sharpness_ratio,
)
from ..model import Domain, DomainKind, InequalityParams, ValidationMode, validate_params
from ..norms import NormKind, NormSpec
from ..observability import MetricsLogger, run_context
from ..oracles import configure_oracle_cache, oracle_cache
from ..quad.settings import QuadSettings
from ..scaling import (
    EnvelopeSpec,
    FunctionalKind,
    check_necessary_condition,
    check_weighted_conditions,
    default_theta_grid,
    fit_scaling,
    weight_envelope,
)
from ..trialfuncs import TrialFunction, log_cusp, smooth_bump
from .acceptance import run_acceptance
from .report import Report, WarningCollector
from .runconfig import Command, RunConfig

logger = logging.getLogger(__name__)
metrics = MetricsLogger(logger)

Handler = Callable[[RunConfig, QuadSettings, Settings], Any]


def _params(config: RunConfig) -> InequalityParams:
    if config.params is None:
        raise ConfigError(f"{config.command.value} needs a 'params' section")
    return config.params


def _check_balance(config: RunConfig, quad: QuadSettings, settings: Settings) -> Any:
    params = _params(config)
    if config.mode is ValidationMode.PERMISSIVE:
        logger.warning(
            "Permissive validation: only integrability constraints are checked",
            extra={"kind": config.kind.value},
        )
    violations = validate_params(params, config.mode, config.kind)
    result: dict[str, Any] = {
        "mode": config.mode.value,
        "violations": violations,
        "admissible": not violations,
    }
    if violations:
        logger.warning(
            "Inadmissible parameters, necessary condition not checked",
            extra={"violations": violations},
        )
        return result
    condition = check_necessary_condition(
        config.kind, params, config.scaling.m or config.domain.m
    )
    return {**result, **condition.to_dict()}


def _check_scaling(config: RunConfig, quad: QuadSettings, settings: Settings) -> Any:
    params = _params(config)
    u = config.function.build()
    kind = config.scaling.functional
    if kind is FunctionalKind.SURFACE and config.domain.kind is not DomainKind.SURFACE:
        m = config.scaling.m or config.domain.m
        if m is None:
            raise ConfigError("surface scaling needs 'scaling.m'")
        domain = Domain.surface(u.d, m, config.domain.radius)
    else:
        domain = config.domain.build(u.d)
    spec = NormSpec(kind=NormKind.TARGET, params=params, settings=quad)
    try:
        grid = config.scaling.theta_grid or default_theta_grid(settings.theta_points)
        report = fit_scaling(kind, u, spec, domain, grid)
    except ScalingAbortedError as e:
        logger.warning("Scaling fit aborted", extra={"reason": str(e)})
        partial = e.partial.to_dict()
        partial["flags"] = [*partial.get("flags", []), "aborted"]
        return partial
    return {**report.to_dict(), "accepted": report.accepted}


def _family(name: str) -> Callable[[int], TrialFunction]:
    return log_cusp if name == "log_cusp" else smooth_bump


def _estimate_constant(config: RunConfig, quad: QuadSettings, settings: Settings) -> Any:
    c = config.constants
    if c.scan == "blowup":
        return lower_bound_scan(
            config.kind,
            c.lam,
            c.d,
            c.grid,
            c.threshold,
            family=_family(c.family),
            m=c.m,
            rhs_p=c.rhs_p,
            settings=quad,
        ).to_dict()
    if c.scan == "remark":
        return remark_scan_general_alpha(
            c.alpha1, c.alpha2, c.lam, c.d, c.grid, settings=quad
        ).to_dict()
    if c.scan == "derivative":
        return dd_constant_probe(
            c.lam, c.d, c.grid, c.s_grid, c.ratio_bound, settings=quad
        ).to_dict()
    params = _params(config)
    u = config.function.build()
    sample = rayleigh_quotient(
        u, config.kind, params, config.domain.build(u.d), quad, m=c.m
    )
    return {**sample.to_dict(), "table": [sample.row()]}


def _gls_norm(config: RunConfig, quad: QuadSettings, settings: Settings) -> Any:
    g = config.gls
    grid_size = g.grid_size or settings.psi_grid_size or DEFAULT_GRID_SIZE
    u = config.function.build()
    psi = g.psi.build()
    domain = config.domain.build(u.d)

    if g.task == "norm":
        result = bgls_norm(
            u, psi, g.measure, domain=domain, settings=quad, grid_size=grid_size
        )
        return {"psi": psi.describe(), **result.to_dict()}
    if g.task == "natural":
        natural = natural_psi(
            u, psi.a, psi.b, g.measure, domain=domain, settings=quad, grid_size=grid_size
        )
        result = bgls_norm(u, natural, g.measure, domain=domain, settings=quad)
        return {"psi": natural.describe(), **result.to_dict()}
    if g.task == "anisotropic":
        bounded = None if domain.kind is DomainKind.WHOLE_SPACE else domain
        value = anisotropic_norm(u, g.p_vector, domain=bounded, tol=quad.tol)
        return {"p_vector": g.p_vector, **value.to_dict()}
    if g.task == "embedding":
        table = g.constant_table.build() if g.constant_table else None
        return check_embedding_51a(
            u,
            psi,
            g.lam,
            mode=g.mode,
            constant=g.constant,
            constant_table=table,
            settings=quad,
            grid_size=grid_size,
        ).to_dict()
    if g.task == "weak_sharpness":
        if g.psi_other is None or not g.intervals:
            raise ConfigError("weak_sharpness needs 'psi_other' and 'intervals'")
        return weak_sharpness_ratio(
            u, psi, g.psi_other.build(), g.lam, g.intervals, quad, grid_size
        ).to_dict()
    params = _params(config)
    return psi5_and_check_52(
        lambda p, q: g.nu_constant,
        g.r_grid,
        params,
        lambda p, q: g.constant,
        u=u if g.check_function else None,
        p_max=g.p_max,
        grid_size=grid_size,
        settings=quad,
    ).to_dict()


def _envelope(config: RunConfig, quad: QuadSettings, settings: Settings) -> Any:
    e = config.envelope
    d = config.params.d if config.params else config.function.d
    spec = EnvelopeSpec(
        weight=e.weight.build(),
        trial_exponent=e.trial_exponent,
        regime=e.regime,
        role=e.role,
        direction=e.direction,
        theta_grid=tuple(e.theta_grid) if e.theta_grid else None,
        d=d,
    )
    results: dict[str, Any] = weight_envelope(spec, e.z_grid).to_dict()
    if e.conditions is not None:
        conditions = check_weighted_conditions(
            **e.conditions, params=_params(config), use_infinity_rhs=e.use_infinity_rhs
        )
        results["conditions"] = conditions.to_dict()
    return results


def _verify_all(config: RunConfig, quad: QuadSettings, settings: Settings) -> Any:
    outcomes = run_acceptance(quad)
    return {
        "passed": all(o.passed for o in outcomes),
        "criteria": [o.to_dict() for o in outcomes],
    }


def validation_message(mode: ValidationMode, violations: list[str]) -> str:
    return f"{mode.value} validation failed: {', '.join(violations)}"


def _scan_params(config: RunConfig) -> list[InequalityParams]:
    c = config.constants
    if c.scan == "blowup":
        tuples = [
            blowup_params(config.kind, c.lam, c.d, p, c.m, c.rhs_p) for p in c.grid
        ]
    elif c.scan == "remark":
        tuples = [remark_params(c.alpha1, c.alpha2, c.lam, c.d, p) for p in c.grid]
    else:
        # non-integrable pairs are skipped by the scan itself
        tuples = [
            dd_params(c.lam, c.d, p, s)
            for p in c.grid
            for s in c.s_grid
            if c.lam * p < 1
        ]
    return [params.model_copy(update={"lam": c.lam}) for params in tuples]


def validate_run(config: RunConfig) -> None:
    """Check every parameter tuple a run will use in the configured mode.

    ``check-balance`` reports its violations instead, and ``verify-all``
    brings its own tuples.

    Raises:
        ParameterError: Naming the violated constraints
    """
    if config.command in (Command.CHECK_BALANCE, Command.VERIFY_ALL):
        return
    scan = config.constants.scan
    if config.command is Command.ESTIMATE_CONSTANT and scan != "quotient":
        tuples = _scan_params(config)
    elif config.params is not None:
        tuples = [config.params]
    else:
        return

    violations: list[str] = []
    for params in tuples:
        for violation in validate_params(params, config.mode):
            if violation not in violations:
                violations.append(violation)
    if violations:
        raise ParameterError(validation_message(config.mode, violations))


HANDLERS: dict[Command, Handler] = {
    Command.CHECK_BALANCE: _check_balance,
    Command.CHECK_SCALING: _check_scaling,
    Command.ESTIMATE_CONSTANT: _estimate_constant,
    Command.GLS_NORM: _gls_norm,
    Command.ENVELOPE: _envelope,
    Command.VERIFY_ALL: _verify_all,
}


def collect_flags(node: Any) -> list[str]:
    """Distinct numerical flags anywhere in a results tree, in order of appearance."""
    found: list[str] = []
    if isinstance(node, dict):
        for key, value in node.items():
            if key == "flags" and isinstance(value, list):
                found.extend(f for f in value if isinstance(f, str) and f not in found)
            else:
                found.extend(f for f in collect_flags(value) if f not in found)
    elif isinstance(node, list):
        for value in node:
            found.extend(f for f in collect_flags(value) if f not in found)
    return found


def config_digest(config: RunConfig) -> str:
    text = json.dumps(config.dump(), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def run(config: RunConfig, settings: Settings | None = None) -> Report:
    """Execute ``config`` and assemble its report.

    Identical configs, seeds included, give identical ``results`` sections.
    """
    settings = settings or Settings()
    configure_oracle_cache(settings.cache_max_size)
    quad = config.quad.build(settings)
    echo = config.dump()
    collector = WarningCollector()
    package_logger = logging.getLogger("hslab")
    package_logger.addHandler(collector)
    start = time.perf_counter()
    try:
        with run_context(
            command=config.command.value,
            seed=quad.mc.seed,
            config_digest=config_digest(config),
        ):
            logger.info("Starting run", extra={"command": config.command.value})
            validate_run(config)
            results = HANDLERS[config.command](config, quad, settings)
    finally:
        package_logger.removeHandler(collector)
    wall_time = time.perf_counter() - start
    stats = oracle_cache().get_stats()
    metrics.log_cache_metrics(stats.hits, stats.misses, stats.evictions, stats.size)

    warnings = list(collector.messages)
    warnings.extend(f"flag: {flag}" for flag in collect_flags(results))
    logger.info(
        "Finished run",
        extra={"command": config.command.value, "wall_time": wall_time},
    )
    return Report(
        command=config.command.value,
        config=echo,
        results=results,
        wall_time=wall_time,
        warnings=warnings,
    )
