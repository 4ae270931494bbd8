"""Fingerprint energy versus number of averaged residuals.

Pure noise averages away as 1/N; a real source leaves a floor: the
energy of its deterministic fingerprint. The fitted e_inf separates
the two cases.

Run: python demos/02_energy_decay.py
"""

import numpy as np

from ganprint.denoise import Residual
from ganprint.fingerprint import (
    INVERSE_N,
    energy_progression,
    fit_energy_curve,
)

DHASH = "0" * 64
rng = np.random.default_rng(2)
ns = [2, 8, 32, 128]


def residuals_with_floor(fingerprint_std):
    f = rng.normal(0, fingerprint_std, size=(64, 64, 1))
    return [Residual(planes=(f + rng.normal(0, 2.0, size=f.shape)).astype(np.float32),
                     source_id=str(i), denoiser_hash=DHASH)
            for i in range(max(ns))]


for name, amp in (("pure noise", 0.0), ("planted fingerprint", 0.6)):
    curve = energy_progression(residuals_with_floor(amp), ns)
    fit = fit_energy_curve(curve, INVERSE_N)
    print(f"{name} (true floor {amp ** 2:.3f}):")
    for n, e in curve.points:
        print(f"  N={n:>4}  energy={e:.5f}")
    print(f"  fit: E(N) = {fit.e_inf:.5f} + {fit.e0:.3f}/N  (rss={fit.rss:.2e})\n")
