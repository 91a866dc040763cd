"""Copying fidelity of an optical amplifier run as a polarization cloner.

Feeding N photons to a gain medium and keeping the runs that end with M
realizes the best physically allowed N -> M copier: stimulated emission
copies the input mode, spontaneous emission adds the unavoidable noise.
The script checks the birth-chain simulation against the closed formula,
then reproduces the intensity-domain analysis: synthetic fidelity data
from a mean-intensity amplifier law with quality Q = 0.8 and the
least-squares recovery of Q.

Run:  python demos/cloning_amplifier.py
"""

import numpy as np

from qclink import cloning

print("copy counts   formula   birth chain (exact)   Monte Carlo (1e5)")
for n, m in ((1, 2), (1, 3), (2, 4), (3, 6), (4, 8)):
    formula = cloning.fidelity_opt(n, m)
    exact = cloning.birth_process_exact(n, m)
    mc, se = cloning.birth_process_mc(n, m, trials=100_000, seed=n * 10 + m)
    print(f"{n} -> {m:2d}      {formula:.6f}  {exact:.6f}"
          f"            {mc:.6f} +- {se:.6f}")

print()
print("limits: F(1, M -> inf) ->", cloning.fidelity_opt(1, 10 ** 9),
      "(the classical 2/3)")
print()

mu = np.logspace(np.log10(0.5), np.log10(50.0), 50)
data = cloning.generate_fidelity_dataset(0.8, mu, gain=10.0,
                                         noise_sigma=0.005, seed=1)
q_hat, rss = cloning.fit_q(data)
print(f"synthetic amplifier data: 50 points, gain 10, noise sigma 0.005")
print(f"recovered quality: Q = {q_hat:.4f} (rss = {rss:.2e})")
print()
print("mu_in   measured F   Q=1 law   Q=0 law")
for mu_in, mu_out, fid in data[::10]:
    print(f"{mu_in:6.2f}  {fid:.4f}      "
          f"{cloning.fidelity_classical(mu_in, mu_out, 1.0):.4f}    "
          f"{cloning.fidelity_classical(mu_in, mu_out, 0.0):.4f}")

print()
print("integer intensities make the amplifier law collapse onto the")
print("optimal copying formula at Q = 1:")
worst = max(abs(cloning.fidelity_classical(n, m, 1.0)
                - cloning.fidelity_opt(n, m))
            for n in range(1, 51) for m in range(n, 51))
print(f"largest difference over 1 <= N <= M <= 50: {worst:.1e}")

print()
print("Poisson-averaged copying fidelity vs the mean-intensity law at Q=1")
print("(a diagnostic: the mixture is not claimed to equal the law)")
for mu_in in (1.0, 5.0, 20.0):
    mix = cloning.poisson_mixture_fidelity(mu_in, 10.0)
    law = cloning.fidelity_classical(mu_in, 10.0 * mu_in, 1.0)
    print(f"mu_in = {mu_in:4.1f}: mixture {mix:.4f}, law {law:.4f}, "
          f"gap {mix - law:+.4f}")
