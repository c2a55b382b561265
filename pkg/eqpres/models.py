from typing import Any, Dict, Generic, List, Literal, Optional, Tuple, TypeVar

from pydantic import BaseModel, Field, field_validator, model_validator

T = TypeVar("T")

EQPRES_VERSION = "1.0.0"
PRESENTATION_FORMAT_VERSION = "equivariant-presentation-v1"
CERTIFICATE_VERSION = "deweak-certificate-v1"
HOMOLOGY_REPORT_VERSION = "homology-report-v1"
SCHEMA_VERSION = "1.0"

NAME_PATTERN = r"^[A-Za-z_][A-Za-z0-9_]*$"

GammaWord = List[Tuple[str, int]]


def _check_bijection(images: List[int], degree: int, what: str) -> None:
    if len(images) != degree:
        raise ValueError(f"{what}: expected {degree} images, got {len(images)}")
    if sorted(images) != list(range(degree)):
        raise ValueError(f"{what}: images {images} are not a bijection of 0..{degree - 1}")


# --- presentation files -----------------------------------------------------


class GammaGeneratorSpec(BaseModel):
    name: str = Field(pattern=NAME_PATTERN)
    images: List[int]


class GammaSpec(BaseModel):
    degree: int = Field(ge=1)
    generators: List[GammaGeneratorSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_generators(self):
        names = [gen.name for gen in self.generators]
        if len(set(names)) != len(names):
            raise ValueError(f"Γ-generator names must be distinct: {names}")
        for gen in self.generators:
            _check_bijection(gen.images, self.degree, f"Γ-generator '{gen.name}'")
        return self


class OrbitActionSpec(BaseModel):
    generator: str
    images: List[int]


class OrbitSpec(BaseModel):
    rep_name: str = Field(pattern=NAME_PATTERN)
    domain_size: int = Field(ge=1)
    base_point: int = Field(default=0, ge=0)
    action: List[OrbitActionSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_action(self):
        if self.base_point >= self.domain_size:
            raise ValueError(f"orbit '{self.rep_name}': base_point outside the domain")
        for entry in self.action:
            _check_bijection(
                entry.images,
                self.domain_size,
                f"orbit '{self.rep_name}' action of '{entry.generator}'",
            )
        return self


class IotaSpec(BaseModel):
    symbol: str
    images: List[int]


class PresentationFile(BaseModel):
    """Serialized (weakly) finite Γ-equivariant presentation."""

    format_version: Literal["equivariant-presentation-v1"] = PRESENTATION_FORMAT_VERSION
    name: str = ""
    gamma: GammaSpec
    orbits: List[OrbitSpec] = Field(default_factory=list)
    relators: List[str] = Field(default_factory=list)
    mode: Literal["finite", "weak"] = "finite"
    iota: List[IotaSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_references(self):
        gamma_names = [gen.name for gen in self.gamma.generators]
        rep_names = [orbit.rep_name for orbit in self.orbits]
        if len(set(rep_names)) != len(rep_names):
            raise ValueError(f"orbit names must be distinct: {rep_names}")
        for orbit in self.orbits:
            given = [entry.generator for entry in orbit.action]
            unknown = sorted(set(given) - set(gamma_names))
            if unknown:
                raise ValueError(f"orbit '{orbit.rep_name}' acts by unknown Γ-generators {unknown}")
            if sorted(given) != sorted(gamma_names):
                raise ValueError(
                    f"orbit '{orbit.rep_name}' must give exactly one action per Γ-generator"
                )
        if self.mode == "finite" and self.iota:
            raise ValueError("iota is only allowed in weak mode")
        if self.mode == "weak":
            base = {f"{orbit.rep_name}.{orbit.base_point}" for orbit in self.orbits}
            named = [entry.symbol for entry in self.iota]
            if sorted(named) != sorted(base):
                raise ValueError(f"weak mode needs iota for exactly the base symbols {sorted(base)}")
            for entry in self.iota:
                _check_bijection(entry.images, self.gamma.degree, f"iota of '{entry.symbol}'")
        return self


# --- certificates -----------------------------------------------------------


class R0PrimeEntry(BaseModel):
    index: int = Field(ge=0)
    kind: Literal["conjugation", "transport"]
    word: str
    trivial: bool
    source: Dict[str, Any] = Field(default_factory=dict)


class TraceStepModel(BaseModel):
    kind: Literal["free_reduce", "free_expand", "apply_relator"]
    position: int = Field(ge=0)
    letter: Optional[str] = None
    gamma: Optional[GammaWord] = None
    relator: Optional[int] = Field(default=None, ge=0)
    split: Optional[int] = Field(default=None, ge=0)
    direction: Optional[Literal["forward", "backward"]] = None

    @model_validator(mode="after")
    def check_fields(self):
        if self.kind == "apply_relator":
            missing = [
                key
                for key in ("gamma", "relator", "split", "direction")
                if getattr(self, key) is None
            ]
            if missing:
                raise ValueError(f"apply_relator step is missing {missing}")
        elif self.letter is None:
            raise ValueError(f"{self.kind} step needs a letter")
        return self


class TraceRecord(BaseModel):
    s: str
    t: str
    start: str
    end: str
    steps: List[TraceStepModel] = Field(default_factory=list)


class WitnessEntry(BaseModel):
    y: GammaWord
    x: str
    word: str


class CertificateBundle(BaseModel):
    format_version: Literal["deweak-certificate-v1"] = CERTIFICATE_VERSION
    presentation: str = ""
    X: List[str]
    Y: List[GammaWord]
    witnesses: List[WitnessEntry] = Field(default_factory=list)
    r0prime: List[R0PrimeEntry] = Field(default_factory=list)
    iota: List[IotaSpec] = Field(default_factory=list)
    traces: List[TraceRecord] = Field(default_factory=list)

    @field_validator("r0prime")
    @classmethod
    def check_indices(cls, entries: List[R0PrimeEntry]):
        if [entry.index for entry in entries] != list(range(len(entries))):
            raise ValueError("r0prime indices must be 0..n-1 in order")
        return entries


# --- reports ----------------------------------------------------------------


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ValidationReport(BaseModel):
    mode: Literal["finite", "weak"]
    gamma_order: int = Field(ge=1)
    num_symbols: int = Field(ge=0)
    num_expanded_relators: int = Field(default=0, ge=0)
    realized_order: Optional[int] = Field(default=None, ge=1)
    checks: List[CheckResult] = Field(default_factory=list)
    passed: bool = False

    @model_validator(mode="after")
    def summarize(self):
        self.passed = bool(self.checks) and all(check.passed for check in self.checks)
        return self


class TraceVerdict(BaseModel):
    s: str
    t: str
    valid: bool
    relator_applications: int = Field(default=0, ge=0)
    detail: str = ""


class TraceCheckReport(BaseModel):
    presentation: str = ""
    num_traces: int = Field(default=0, ge=0)
    valid_traces: int = Field(default=0, ge=0)
    verdicts: List[TraceVerdict] = Field(default_factory=list)
    checks: List[CheckResult] = Field(default_factory=list)
    passed: bool = False

    @model_validator(mode="after")
    def summarize(self):
        self.passed = bool(self.checks) and all(check.passed for check in self.checks)
        return self


class DeweakSummary(BaseModel):
    source: str = ""
    output: str = ""
    X: List[str] = Field(default_factory=list)
    Y_size: int = Field(default=0, ge=0)
    num_r0prime: int = Field(default=0, ge=0)
    num_trivial_r0prime: int = Field(default=0, ge=0)
    num_traces: int = Field(default=0, ge=0)
    valid_traces: int = Field(default=0, ge=0)
    max_relator_applications: int = Field(default=0, ge=0)
    realized_order: int = Field(default=1, ge=1)
    source_order: int = Field(default=1, ge=1)
    order_matches: bool = False

    @model_validator(mode="after")
    def summarize(self):
        self.order_matches = self.realized_order == self.source_order
        return self


class HomologyLimits(BaseModel):
    max_group_order: int = Field(default=360, ge=1)
    max_symbols: int = Field(default=12, ge=1)
    max_relation_rank: int = Field(default=2500, ge=1)
    bar_max_order: int = Field(default=24, ge=1)
    bar_integer_max_order: int = Field(default=12, ge=1)
    generation_max_h2_order: int = Field(default=4096, ge=1)


class AbelianInvariants(BaseModel):
    invariant_factors: List[int] = Field(default_factory=list)
    free_rank: int = Field(default=0, ge=0)


class GammaActionMatrix(BaseModel):
    generator: str
    matrix: List[List[int]]


class GenerationResult(BaseModel):
    rank: int = Field(ge=0)
    generators: List[List[int]] = Field(default_factory=list)
    method: Literal["exhaustive", "basis_scan"] = "exhaustive"


class HomologyReport(BaseModel):
    report_version: str = HOMOLOGY_REPORT_VERSION
    group_order: int = Field(ge=1)
    num_symbols: int = Field(ge=0)
    relation_rank: int = Field(ge=0)
    h1: AbelianInvariants
    h2_invariant_factors: List[int] = Field(default_factory=list)
    h2_basis_representatives: List[List[int]] = Field(default_factory=list)
    gamma_action_matrices: List[GammaActionMatrix] = Field(default_factory=list)
    gamma_generation: Optional[GenerationResult] = None
    five_term_diagnostics: List[CheckResult] = Field(default_factory=list)
    oracle: Optional[Dict[str, Any]] = None

    @field_validator("h2_invariant_factors")
    @classmethod
    def check_chain(cls, factors: List[int]):
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors {factors} do not form a divisibility chain")
        return factors


# --- CLI envelope -----------------------------------------------------------


class ErrorInfo(BaseModel):
    code: str
    message: str
    retryable: bool = False


class CommandResponse(BaseModel, Generic[T]):
    status: Literal["success", "failure", "error"]
    command: str
    version: str = EQPRES_VERSION
    schema_version: str = SCHEMA_VERSION
    data: Optional[T] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[ErrorInfo] = None
