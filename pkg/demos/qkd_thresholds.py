"""Where does an entangled-pair key protocol stop working?

Sweeps the disturbance D caused by an individual attack and watches three
criteria: the one-way information advantage I(A;B) - I(A;E), the maximal
CHSH value of the pair state, and the positivity of its partial
transpose. The first two give way at the same disturbance, the third at
a larger one.

Run:  python demos/qkd_thresholds.py
"""

import numpy as np

from qclink import qcore, qkd

print("D      I(A;B)   I(A;E)   CHSH    min PT eig  entangled")
for d in np.arange(0.0, 0.41, 0.025):
    dist = qkd.symbol_distribution(qkd.AttackParams(d))
    rho = qkd.rho_ab(d)
    entangled, lo = qcore.is_entangled(rho)
    print(f"{d:5.3f}  {qkd.mutual_information(dist, 'ab'):7.4f}"
          f"  {qkd.mutual_information(dist, 'ae'):7.4f}"
          f"  {qcore.chsh_max(rho):6.4f}  {lo:+9.5f}   {entangled}")

print()
print("Critical disturbances (bisection to 1e-6):")
one_way = qkd.threshold("one_way")
chsh = qkd.threshold("chsh")
ent = qkd.threshold("entanglement")
print(f"  one-way key agreement fails at D = {one_way:.6f}")
print(f"  CHSH violation stops at        D = {chsh:.6f}")
print(f"  entanglement survives up to    D = {ent:.6f}")
print()
print(f"  one-way vs CHSH difference: {abs(one_way - chsh):.2e}")
print(f"  reference points: (1 - 1/sqrt(2))/2 = {(1 - 2 ** -0.5) / 2:.6f},"
      f"  1 - 1/sqrt(2) = {1 - 2 ** -0.5:.6f}")
print()
print("The one-way boundary coincides with the CHSH boundary: as long as")
print("the shared pair could still violate a Bell inequality, the sifted")
print("bits can be turned into a key without two-way post-processing.")
