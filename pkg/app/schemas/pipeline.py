"""Pipeline and multiverse grid Pydantic schemas."""

from __future__ import annotations

import itertools
import re
from enum import Enum
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.constants import ALLOWED_WEIGHT_EXPONENTS, FCS1_STAGES, FCS2_STAGES, ORA_STAGES
from app.core.exceptions import ConfigurationError
from processing.model.config import (
    AnalysisConfig,
    Correction,
    GeneStatistic,
    NesMode,
    OraTail,
    PermutationScheme,
    UniversePolicy,
)
from processing.ora.goseq import BiasCovariate, GoseqMethod
from processing.preprocess.conversion import DupStrategy
from processing.preprocess.filtering import FilterRule, parse_filter_rule
from processing.preprocess.normalization import NormalizationMethod


class GsaMethod(str, Enum):
    """Gene set analysis method."""

    ORA_FISHER = "ora_fisher"
    ORA_EASE = "ora_ease"
    GOSEQ = "goseq"
    GSEA = "gsea"
    GSEA_PRERANK = "gsea_prerank"
    PADOG = "padog"


class MethodFamily(str, Enum):
    ORA = "ora"
    FCS1 = "fcs1"  # consumes the expression matrix
    FCS2 = "fcs2"  # consumes a gene ranking


class DeTest(str, Enum):
    WELCH = "welch"
    MODERATED_T = "moderated_t"


_FAMILY = {
    GsaMethod.ORA_FISHER: MethodFamily.ORA,
    GsaMethod.ORA_EASE: MethodFamily.ORA,
    GsaMethod.GOSEQ: MethodFamily.ORA,
    GsaMethod.GSEA: MethodFamily.FCS1,
    GsaMethod.PADOG: MethodFamily.FCS1,
    GsaMethod.GSEA_PRERANK: MethodFamily.FCS2,
}


class PipelineSpec(BaseModel):
    """One choice per analysis axis."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    name: str | None = Field(default=None, description="Label used for the output directory")
    prefilter: str = Field(default="total:10", description="total:T | count:c:k | cpm:c[:k] | none")
    dedupe: DupStrategy = DupStrategy.KEEP_FIRST
    normalize: NormalizationMethod = NormalizationMethod.TMM
    de_test: DeTest = DeTest.WELCH
    method: GsaMethod = GsaMethod.ORA_FISHER
    statistic: GeneStatistic | None = Field(
        default=None, description="Ranking metric; signal_to_noise for matrix GSEA, signed_logp for prerank"
    )
    scheme: PermutationScheme | None = Field(
        default=None, description="Permutation scheme; phenotype for matrix GSEA, gene_set for prerank"
    )
    universe: UniversePolicy = UniversePolicy.INTERSECTION
    ora_tail: OraTail = Field(default=OraTail.EXACT, description="exact | binomial tail for Fisher and EASE")
    p_exp: float = 1.0
    nes_mode: NesMode = NesMode.SAME_SIGN
    goseq_method: GoseqMethod = GoseqMethod.WALLENIUS
    goseq_bias: BiasCovariate = BiasCovariate.LENGTH
    correction: Correction = Correction.BH
    alpha: float = Field(default=0.05, gt=0.0, le=1.0)
    seed: int = Field(default=42, ge=0, lt=2**64)
    n_perm: int = Field(default=1000, ge=1)
    n_resamples: int = Field(default=2000, ge=1)
    min_size: int = Field(default=5, ge=1)
    max_size: int = Field(default=500, ge=1)
    sd_floor: float = Field(default=1e-8, gt=0.0)
    prior_df: float = Field(default=4.0, gt=0.0)

    @field_validator("prefilter")
    @classmethod
    def validate_prefilter(cls, v: str) -> str:
        try:
            return str(parse_filter_rule(v))
        except ConfigurationError as e:
            raise ValueError(e.message) from e

    @field_validator("p_exp")
    @classmethod
    def validate_p_exp(cls, v: float) -> float:
        if float(v) not in ALLOWED_WEIGHT_EXPONENTS:
            raise ValueError(f"p_exp must be one of {ALLOWED_WEIGHT_EXPONENTS}")
        return float(v)

    @model_validator(mode="after")
    def validate_axes(self) -> PipelineSpec:
        if self.min_size > self.max_size:
            raise ValueError("min_size must not exceed max_size")
        family = self.family
        scheme = self.resolved_scheme
        if family is MethodFamily.FCS2 and scheme is PermutationScheme.PHENOTYPE:
            raise ValueError("phenotype permutation cannot be combined with a pre-ranked method")
        if self.method is GsaMethod.GSEA and scheme is PermutationScheme.GENE_LABEL:
            raise ValueError("gene_label permutation applies to gsea_prerank only")
        if self.method is GsaMethod.PADOG and scheme is not PermutationScheme.PHENOTYPE:
            raise ValueError("padog uses phenotype permutation only")
        if self.method is GsaMethod.GSEA and self.statistic is GeneStatistic.SIGNED_LOGP:
            raise ValueError("signed_logp ranks need a DE table; use gsea_prerank")
        return self

    @property
    def family(self) -> MethodFamily:
        return _FAMILY[self.method]

    @property
    def resolved_scheme(self) -> PermutationScheme | None:
        if self.scheme is not None:
            return self.scheme
        if self.family is MethodFamily.FCS1:
            return PermutationScheme.PHENOTYPE
        if self.family is MethodFamily.FCS2:
            return PermutationScheme.GENE_SET
        return None

    @property
    def resolved_statistic(self) -> GeneStatistic | None:
        if self.statistic is not None:
            return self.statistic
        if self.method is GsaMethod.GSEA:
            return GeneStatistic.SIGNAL_TO_NOISE
        if self.family is MethodFamily.FCS2:
            return GeneStatistic.SIGNED_LOGP
        return None

    @property
    def filter_rule(self) -> FilterRule:
        return parse_filter_rule(self.prefilter)

    @property
    def stages(self) -> list[str]:
        return {
            MethodFamily.ORA: ORA_STAGES,
            MethodFamily.FCS1: FCS1_STAGES,
            MethodFamily.FCS2: FCS2_STAGES,
        }[self.family].copy()

    def analysis_config(self, workers: int = 1) -> AnalysisConfig:
        return AnalysisConfig(
            seed=self.seed,
            n_permutations=self.n_perm,
            weight_exponent=self.p_exp,
            min_size=self.min_size,
            max_size=self.max_size,
            universe=self.universe,
            scheme=self.resolved_scheme or PermutationScheme.PHENOTYPE,
            statistic=self.resolved_statistic or GeneStatistic.SIGNAL_TO_NOISE,
            correction=self.correction,
            nes_mode=self.nes_mode,
            ora_tail=self.ora_tail,
            sd_floor=self.sd_floor,
            n_resamples=self.n_resamples,
            prior_df=self.prior_df,
            workers=workers,
        )

    def options(self) -> dict[str, Any]:
        """JSON-ready options with defaults resolved, excluding the name."""
        data = self.model_dump(mode="json", exclude={"name"})
        data["scheme"] = self.resolved_scheme.value if self.resolved_scheme else None
        data["statistic"] = self.resolved_statistic.value if self.resolved_statistic else None
        return data


_UNSAFE = re.compile(r"[^A-Za-z0-9_.=-]+")


def _label(value: Any) -> str:
    text = value.value if isinstance(value, Enum) else str(value)
    return _UNSAFE.sub("_", text)


class MultiverseGrid(BaseModel):
    """
    A set of pipelines: an explicit ``pipelines`` list, or a ``base`` spec
    crossed with every combination of ``axes`` values.
    """

    model_config = ConfigDict(extra="forbid")

    pipelines: list[PipelineSpec] | None = None
    base: dict[str, Any] = Field(default_factory=dict)
    axes: dict[str, list[Any]] = Field(default_factory=dict)
    alpha: float | None = Field(default=None, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def validate_layout(self) -> MultiverseGrid:
        if self.pipelines is not None and self.axes:
            raise ValueError("give either 'pipelines' or 'base' + 'axes', not both")
        if self.pipelines is None and not self.axes:
            raise ValueError("grid needs 'pipelines' or 'axes'")
        unknown = set(self.axes) - set(PipelineSpec.model_fields)
        if unknown:
            raise ValueError(f"unknown axes: {', '.join(sorted(unknown))}")
        if any(len(values) == 0 for values in self.axes.values()):
            raise ValueError("every axis needs at least one value")
        return self

    def expand(self) -> list[PipelineSpec]:
        """Concrete, uniquely named pipeline specs in grid order."""
        if self.pipelines is not None:
            specs = [
                spec if spec.name else spec.model_copy(update={"name": f"pipeline{i:02d}"})
                for i, spec in enumerate(self.pipelines)
            ]
        else:
            names = list(self.axes)
            specs = []
            for values in itertools.product(*(self.axes[n] for n in names)):
                options = {**self.base, **dict(zip(names, values, strict=True))}
                options["name"] = "__".join(f"{n}-{_label(v)}" for n, v in zip(names, values, strict=True))
                specs.append(PipelineSpec.model_validate(options))
        seen: set[str] = set()
        for spec in specs:
            if spec.name in seen:
                raise ConfigurationError(f"Duplicate pipeline name '{spec.name}' in grid")
            seen.add(spec.name)
        if len(specs) < 2:
            raise ConfigurationError("A multiverse grid needs at least two pipelines")
        return specs

    @property
    def varying_axes(self) -> list[str]:
        return list(self.axes)


def load_yaml(path: str | Path) -> dict[str, Any]:
    """Read a YAML mapping; an empty file gives an empty mapping."""
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in {path}: {e}") from e
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must contain a mapping")
    return data


def load_pipeline_spec(config_path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> PipelineSpec:
    """
    Build a PipelineSpec: model defaults, then the config file, then overrides.

    The config file may hold the options at top level or under ``pipeline:``.
    Overrides whose value is None are ignored.
    """
    options: dict[str, Any] = {}
    if config_path is not None:
        data = load_yaml(config_path)
        options.update(data.get("pipeline", data))
    options.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return PipelineSpec.model_validate(options)
