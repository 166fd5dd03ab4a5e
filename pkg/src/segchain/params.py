"""Hardware presets and shared run parameters.

Three projected hardware stages, from near-term to optimistic.  Distances in
km, times in seconds, alpha in dB/km.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .noise import NoiseParams
from .timing import LinkParams

C_FIBER_KM_S = 2.0e5  # signal velocity in fiber
DEFAULT_NMUX = 12


class SchemeId(enum.Enum):
    SEG_ED = "seg-ed"
    SEG_NOED = "seg-noed"
    SEG_PROB = "seg-prob"
    PEG_ED = "peg-ed"


def ncode_for(scheme: SchemeId | str) -> int:
    """Pairs consumed per hop: 3 for the encoded schemes, 1 otherwise."""
    return 3 if SchemeId(scheme) in (SchemeId.SEG_ED, SchemeId.PEG_ED) else 1


@dataclass(frozen=True)
class HardwareParams:
    p_cou: float
    eta_d: float
    alpha_db_km: float
    f0: float
    beta: float
    delta: float
    tcoh_s: float

    def noise(self) -> NoiseParams:
        return NoiseParams(f0=self.f0, beta=self.beta, delta=self.delta, tcoh_s=self.tcoh_s)

    def link(self, l0_km: float, ncode: int, nmux: int = DEFAULT_NMUX) -> LinkParams:
        return LinkParams(
            p_cou=self.p_cou,
            eta_d=self.eta_d,
            alpha_db_km=self.alpha_db_km,
            l0_km=l0_km,
            c_km_s=C_FIBER_KM_S,
            nmux=nmux,
            ncode=ncode,
        )


STAGES: dict[int, HardwareParams] = {
    1: HardwareParams(p_cou=0.2, eta_d=0.9, alpha_db_km=0.2, f0=0.97,
                      beta=0.005, delta=0.005, tcoh_s=0.25),
    2: HardwareParams(p_cou=0.4, eta_d=0.9, alpha_db_km=0.15, f0=0.99,
                      beta=0.001, delta=0.001, tcoh_s=1.0),
    3: HardwareParams(p_cou=0.5, eta_d=0.95, alpha_db_km=0.1, f0=0.999,
                      beta=0.0001, delta=0.0001, tcoh_s=2.5),
}


def load_stage(stage: int) -> HardwareParams:
    try:
        return STAGES[stage]
    except KeyError:
        raise ValueError(f"unknown hardware stage {stage}; expected 1, 2 or 3") from None
