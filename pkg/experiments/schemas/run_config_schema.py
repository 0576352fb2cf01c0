import hashlib
import json
from typing import Annotated, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from detection.services import AcquisitionSpec, AnalysisBand, ModulationSpec
from kinetics.services import BindingModel, ConcentrationSchedule, IndexMap, time_grid
from optics.services import (
    GOLD_PERMITTIVITY_795NM,
    LayerStack,
    PrismGeometry,
    drude_permittivity,
    kretschmann_stack,
)
from quantum.services import LossChain, LossPoint, LossStage


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ComplexValue(StrictModel):
    real: float
    imag: Annotated[float, Field(ge=0, description="Absorption; non-negative for passive media")]

    def to_complex(self) -> complex:
        return complex(self.real, self.imag)


class DrudeConfig(StrictModel):
    plasma_energy_ev: Annotated[float, Field(gt=0)] = 9.03
    damping_ev: Annotated[float, Field(ge=0)] = 0.067
    eps_inf: float = 9.84


class SweepConfig(StrictModel):
    theta_min_deg: Annotated[float, Field(gt=0, lt=90)] = 63.0
    theta_max_deg: Annotated[float, Field(gt=0, lt=90)] = 70.0
    step_deg: Annotated[float, Field(gt=0, description="Internal-angle grid spacing")] = 0.01
    prism_correction: bool = True

    @model_validator(mode="after")
    def check_range(self) -> "SweepConfig":
        if self.theta_min_deg >= self.theta_max_deg:
            raise ValueError(
                f"theta_min_deg must be below theta_max_deg (got {self.theta_min_deg}, {self.theta_max_deg})"
            )
        return self


class OpticsConfig(StrictModel):
    """Prism / gold film / analyte stack and the angle sweep."""
    wavelength_nm: Annotated[float, Field(gt=0)] = 795.0
    prism_index: Annotated[float, Field(gt=1)] = 1.51
    face_angle_deg: Annotated[float, Field(gt=0, lt=90)] = 45.0
    metal_thickness_nm: Annotated[float, Field(ge=0)] = 50.0
    gold_permittivity: Optional[ComplexValue] = None
    drude: Optional[DrudeConfig] = None
    analyte_index: Annotated[float, Field(gt=0)] = 1.33
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @model_validator(mode="after")
    def check_metal_source(self) -> "OpticsConfig":
        if self.gold_permittivity is not None and self.drude is not None:
            raise ValueError("Give either gold_permittivity or drude, not both")
        return self

    def metal_permittivity(self) -> complex:
        if self.drude is not None:
            return drude_permittivity(
                self.wavelength_nm, self.drude.plasma_energy_ev, self.drude.damping_ev, self.drude.eps_inf
            )
        if self.gold_permittivity is not None:
            return self.gold_permittivity.to_complex()
        return GOLD_PERMITTIVITY_795NM

    def build_stack(self) -> LayerStack:
        return kretschmann_stack(
            prism_index=self.prism_index,
            metal_permittivity=self.metal_permittivity(),
            metal_thickness_nm=self.metal_thickness_nm,
            analyte_index=self.analyte_index,
            wavelength_nm=self.wavelength_nm,
        )

    def build_geometry(self) -> PrismGeometry:
        return PrismGeometry(face_angle_deg=self.face_angle_deg, prism_index=self.prism_index)


class SourceConfig(StrictModel):
    """Twin-beam source, given either by its gain or by a measured squeezing."""
    gain: Optional[Annotated[float, Field(ge=1)]] = None
    squeezing_db: Optional[Annotated[float, Field(ge=0)]] = None
    squeezing_upstream_transmission: Annotated[
        float,
        Field(gt=0, le=1, description="Symmetric transmission the squeezing was measured behind"),
    ] = 1.0
    seed_flux: Annotated[float, Field(gt=0, description="Seed photons N0 per measurement window")] = 1e8
    bright_seed: bool = True

    @model_validator(mode="after")
    def check_exactly_one(self) -> "SourceConfig":
        if (self.gain is None) == (self.squeezing_db is None):
            raise ValueError("Give exactly one of gain or squeezing_db")
        return self


class LossStageConfig(StrictModel):
    label: Annotated[str, Field(min_length=1)]
    transmission: Annotated[float, Field(ge=0, le=1)]
    beam: Literal["probe", "conjugate", "both"] = "both"


class LossPointConfig(StrictModel):
    label: Annotated[str, Field(min_length=1)]
    probe_stages: Annotated[int, Field(ge=0, description="Stages of the probe chain before this point")]
    conjugate_stages: Optional[Annotated[int, Field(ge=0)]] = None

    def to_point(self) -> LossPoint:
        conjugate = self.probe_stages if self.conjugate_stages is None else self.conjugate_stages
        return LossPoint(self.label, self.probe_stages, conjugate)


class LossConfig(StrictModel):
    stages: List[LossStageConfig] = Field(default_factory=list)
    points: List[LossPointConfig] = Field(default_factory=list)

    def build_chain(self) -> LossChain:
        probe = [LossStage(s.label, s.transmission) for s in self.stages if s.beam in ("probe", "both")]
        conjugate = [LossStage(s.label, s.transmission) for s in self.stages if s.beam in ("conjugate", "both")]
        return LossChain(probe_stages=tuple(probe), conjugate_stages=tuple(conjugate))

    def build_points(self) -> List[LossPoint]:
        if self.points:
            return [p.to_point() for p in self.points]
        chain = self.build_chain()
        return [LossPoint("total", len(chain.probe_stages), len(chain.conjugate_stages))]


class KineticsConfig(StrictModel):
    """Langmuir binding run read out at a locked angle."""
    ka: Annotated[float, Field(ge=0, description="Association rate, 1/(M s)")]
    kd: Annotated[float, Field(ge=0, description="Dissociation rate, 1/s")]
    concentration_molar: Annotated[float, Field(ge=0)]
    switch_s: Optional[Annotated[float, Field(gt=0, description="Start of the buffer wash")]] = None
    duration_s: Annotated[float, Field(gt=0)]
    step_s: Annotated[float, Field(gt=0)]
    gamma_max: Annotated[float, Field(gt=0)] = 1.0
    n_buffer: Annotated[float, Field(gt=0)] = 1.33
    delta_n_max: Annotated[float, Field(ge=0)] = 0.005
    bulk_step: float = 0.0
    lock_offset_deg: Annotated[float, Field(description="Lock this far left of the resonance")] = 0.8
    locked_angle_deg: Optional[Annotated[float, Field(gt=0, lt=90)]] = None
    method: Literal["ode", "analytic"] = "ode"
    sample_label: str = ""

    def build_schedule(self) -> ConcentrationSchedule:
        if self.switch_s is None:
            return ConcentrationSchedule.constant(self.concentration_molar)
        return ConcentrationSchedule.association_dissociation(self.concentration_molar, self.switch_s)

    def build_model(self) -> BindingModel:
        return BindingModel(
            ka=self.ka,
            kd=self.kd,
            schedule=self.build_schedule(),
            gamma_max=self.gamma_max,
            sample_label=self.sample_label,
        )

    def build_index_map(self) -> IndexMap:
        return IndexMap(n_buffer=self.n_buffer, delta_n_max=self.delta_n_max, bulk_step=self.bulk_step)

    def build_grid(self):
        return time_grid(self.duration_s, self.step_s)


class AcquisitionConfig(StrictModel):
    sample_rate_hz: Annotated[float, Field(gt=0)] = 50e6
    segment_length: Annotated[int, Field(gt=1, description="Samples per FFT segment, a power of two")] = 2 ** 14
    segments_per_point: Annotated[int, Field(ge=1)] = 16
    tone_frequency_hz: Annotated[float, Field(gt=0)] = 2e6
    modulation_depth: Annotated[float, Field(gt=0, lt=1)] = 0.05
    inner_offset_hz: Annotated[float, Field(ge=0)] = 50e3
    outer_offset_hz: Annotated[float, Field(gt=0)] = 500e3
    exclusion_halfwidth_bins: Annotated[int, Field(ge=1)] = 3
    dc_cutoff_hz: Annotated[float, Field(ge=0)] = 100e3
    dump_spectrum: Annotated[bool, Field(description="Also write the first segment spectrum of each mode")] = False

    @field_validator("segment_length")
    @classmethod
    def validate_power_of_two(cls, v: int) -> int:
        if v & (v - 1):
            raise ValueError(f"segment_length must be a power of two (got {v})")
        return v

    @model_validator(mode="after")
    def check_nyquist(self) -> "AcquisitionConfig":
        if self.sample_rate_hz <= 2 * self.tone_frequency_hz:
            raise ValueError("sample_rate_hz must exceed twice tone_frequency_hz")
        if self.inner_offset_hz >= self.outer_offset_hz:
            raise ValueError("inner_offset_hz must be below outer_offset_hz")
        return self

    def build_acquisition(self, rng_seed: int) -> AcquisitionSpec:
        return AcquisitionSpec(
            sample_rate=self.sample_rate_hz,
            segment_length=self.segment_length,
            segments_per_point=self.segments_per_point,
            rng_seed=rng_seed,
        )

    def build_modulation(self) -> ModulationSpec:
        return ModulationSpec(tone_frequency=self.tone_frequency_hz, modulation_depth=self.modulation_depth)

    def build_band(self) -> AnalysisBand:
        return AnalysisBand(
            inner_offset_hz=self.inner_offset_hz,
            outer_offset_hz=self.outer_offset_hz,
            exclusion_halfwidth_bins=self.exclusion_halfwidth_bins,
            dc_cutoff_hz=self.dc_cutoff_hz,
        )


class InitialGuessConfig(StrictModel):
    ka: Annotated[float, Field(gt=0)]
    kd: Annotated[float, Field(gt=0)]
    delta_n_max: Annotated[float, Field(gt=0)]


class FitConfig(StrictModel):
    """Synthetic-data kinetic fit at coherent and squeezed noise levels."""
    noise_sigma: Annotated[float, Field(gt=0, description="Coherent-light reflectivity noise")] = 1e-3
    squeezing_db: Annotated[float, Field(ge=0, description="Noise reduction of the squeezed run")] = 4.0
    initial_guess: InitialGuessConfig
    restarts: Annotated[int, Field(ge=0)] = 0


COMMAND_BLOCKS = {
    "dip": ("optics",),
    "squeezing_scan": ("optics", "source"),
    "bind": ("optics", "kinetics"),
    "snr": ("optics", "source", "kinetics"),
    "budget": ("source",),
    "fit": ("optics", "kinetics", "fit"),
}


class RunConfig(StrictModel):
    """One experiment run. Blocks a command does not use may be omitted."""
    rng_seed: Annotated[int, Field(ge=0, lt=2 ** 64)] = 0
    optics: OpticsConfig = Field(default_factory=OpticsConfig)
    source: Optional[SourceConfig] = None
    loss: LossConfig = Field(default_factory=LossConfig)
    kinetics: Optional[KineticsConfig] = None
    acquisition: AcquisitionConfig = Field(default_factory=AcquisitionConfig)
    fit: Optional[FitConfig] = None

    def require_blocks(self, command: str) -> None:
        """Raises ValueError naming the blocks the command needs but the config lacks."""
        missing = [block for block in COMMAND_BLOCKS[command] if getattr(self, block) is None]
        if missing:
            raise ValueError(f"Command '{command}' needs config block(s): {', '.join(missing)}")

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
