"""Why the fractional rates cannot be improved: sharpness at work.

Fix alpha = 2 and pick the mode k_h = floor((alpha/nu)^(1/5)) + 1, which
grows like h^(-4/5).  For that mode the scheme's frequency error is O(1):
mu_k ~ k - alpha, so the computed wave drifts a full beat out of phase and
the space-time L1 error approaches a computable constant (4/pi) c_j(T) times
k^(-p_j).  Measured over a refinement ladder, the ratio of measured to
predicted norm climbs monotonically toward 1: the lower-bound construction is
visible in plain numbers.
"""

import math

from wavecompact import build_mesh, choose_k_h, config_from_dict, dispersion
from wavecompact.experiments import run_sharpness

# the frequency selector and its predicted shift
print("frequency selection at alpha = 2 (tau = h/2):")
print(f"  {'N':>6} {'k_h':>6} {'mu_k - (k - 2)':>15}")
for n in (128, 256, 512):
    mesh = build_mesh(math.pi, math.pi, n, 2 * n)
    k = choose_k_h(2.0, mesh)
    shift = dispersion(k, mesh).mu_k - (k - 2.0)
    print(f"  {n:6d} {k:6d} {shift:15.4e}")
print()

for j, label in ((0, "initial displacement"), (1, "initial velocity"), (2, "forcing")):
    cfg = config_from_dict({
        "kind": "sharpness",
        "mesh": {"X": math.pi, "T": math.pi, "N": 128, "M": 256, "refinements": 2},
        "data": {"harmonic": {"j": j}},
        "alpha": 2.0,
    })
    result = run_sharpness(cfg, emit=False)
    print(f"sharpness for the {label} family (j={j}):")
    print(f"  {'N':>6} {'k_h':>6} {'measured':>12} {'predicted':>12} {'ratio':>8}")
    for row in result.rows:
        print(f"  {row.N:6d} {row.k_h:6d} {row.measured:12.6f} "
              f"{row.predicted:12.6f} {row.ratio:8.4f}")
    print()
