"""Physical constants and unit conventions.

Every frequency in the package is carried as a photon energy in eV, lengths
are in nm and forces are reported in pN.  The conversions below are the only
place where SI units appear.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    hbar_c: float = 197.3269804          # eV nm
    k_B: float = 8.617333262e-5          # eV / K
    force_unit: float = 1.602176634e-10  # N per (eV / nm)

    @property
    def pN_per_eV_nm(self) -> float:
        return self.force_unit * 1e12


CODATA = PhysicalConstants()

HBAR_C = CODATA.hbar_c
K_B = CODATA.k_B
PN_PER_EV_NM = CODATA.pN_per_eV_nm
