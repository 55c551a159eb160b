"""Shared material defaults for the benchmark problems.

The bulk solid is compressible neo-Hookean with kappa_vol = 1e6 Pa and
kappa_iso = 0.214e6 Pa; its nominal small-strain stiffness E = 3e5 Pa
serves as the characteristic scale for the gap-medium parameters
(kappa_vol_gap = gamma_c * kappa_char, E_gap = gamma_e * E_char).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..materials import IsoForm, NeoHookean, ThirdMedium

BULK_KAPPA_VOL = 1.0e6   # Pa
BULK_KAPPA_ISO = 0.214e6  # Pa
BULK_E_CHAR = 3.0e5      # Pa, nominal characteristic Young's modulus
BULK_KAPPA_CHAR = BULK_KAPPA_VOL


@dataclass
class GapMediumParams:
    gamma_c: float
    gamma_e: float
    kappa_fbar: float
    kappa_char: float = BULK_KAPPA_CHAR
    e_char: float = BULK_E_CHAR

    def kernel(self) -> ThirdMedium:
        return ThirdMedium(
            kappa_vol=self.gamma_c * self.kappa_char,
            E=self.gamma_e * self.e_char,
            kappa_fbar=self.kappa_fbar,
        )


def bulk_kernel(iso_form: IsoForm = "classical") -> NeoHookean:
    return NeoHookean(kappa_vol=BULK_KAPPA_VOL, kappa_iso=BULK_KAPPA_ISO, iso_form=iso_form)
