"""From raw matrix to recovery guarantee: the certificate calculus.

Walks one small instance through every certificate this package computes:
restricted isometry constants, null-space constants, the l1-quotient
sandwich, ensemble moments (cross coherence and distortion), the
Christoffel function, and finally an end-to-end error budget compared with
the error the decoder actually achieves.

Run:  python3 demos/certificate_tour.py
"""

import math

import numpy as np

from qcbp import analysis
from qcbp.ensembles import EnsembleSpec, build_matrix, noise_vector, sparse_signal
from qcbp.solver import DecodeOptions, qcbp_decode
from qcbp.streams import RandomStream

root = RandomStream(7)

# ---------------------------------------------------------------------------
# 1. RIP by brute force (the only regime where that is possible)

m, N, s = 10, 20, 2
mat = build_matrix(EnsembleSpec("gaussian"), m, N, root.child("matrix"))
A = mat.entries.real
rep = analysis.rip_constant(A, 2 * s)          # doubled order for the NSP step
print("RIP: delta_%d = %.4f over %d supports (exhaustive)"
      % (2 * s, rep.delta, rep.supports_examined))

sampled = analysis.rip_constant(A, 2 * s, mode="sampled", trials=300,
                                stream=root.child("rip"))
print("     sampled(300) = %.4f  (a lower bound: %.4f <= %.4f)"
      % (sampled.delta, sampled.delta, rep.delta))

# ---------------------------------------------------------------------------
# 2. null-space constants and budget factors, if the RIP is good enough

limit = 4.0 / math.sqrt(41.0)
print()
if rep.delta < limit:
    rho, tau = analysis.nsp_from_rip(rep.delta)
    print("NSP: delta=%.4f < 4/sqrt(41)=%.4f -> rho=%.4f, tau=%.4f"
          % (rep.delta, limit, rho, tau))
else:
    print("NSP: delta=%.4f >= 4/sqrt(41)=%.4f; no guarantee at this size."
          % (rep.delta, limit))
    print("     (Gaussian matrices this small rarely satisfy the bound;")
    print("      the calculus below uses illustrative constants instead.)")
    rho, tau = 0.5, 2.0

consts = analysis.budget_constants(rho, tau, quotient_l1=1.0)
print("budget factors: tail=%.3f  noise=%.3f  excess=%.3f"
      % (consts.tail_factor, consts.noise_factor, consts.excess_factor))

# ---------------------------------------------------------------------------
# 3. the quotient sandwich on a structured instance

print()
dft = build_matrix(EnsembleSpec("partial_dft_subset"), 8, 64,
                   root.child("dft"))
order = 4.0
bounds = analysis.quotient_bounds(dft, order)
emp = analysis.quotient_empirical(dft, order, n_directions=8,
                                  stream=root.child("dirs"))
print("l1 quotient of an 8x64 distinct-row DFT at order %g:" % order)
print("  analytic sandwich [%.10f, %.10f], empirical %.10f"
      % (bounds.lower, bounds.upper, emp))
print("  (orthogonal rows collapse the sandwich to sqrt(2); the empirical")
print("   probe decodes each direction to ~1e-9, so it may sit a hair")
print("   below the analytic value)")

# ---------------------------------------------------------------------------
# 4. ensemble moments: cross coherence and distortion

print()
spec = EnsembleSpec("partial_dft_independent")
mu = analysis.cross_coherence(spec, 4, 16, trials=400, seed=root.child("mu"))
print("cross coherence, iid DFT rows (m=4, N=16, 400 trials):")
print("  N mu / m^2 = %.3f  (theory: 1 - 1/m = %.3f; +/- %.3f std err)"
      % (16 * mu.value / 16.0, 1.0 - 1.0 / 4.0,
         16 * mu.std_error / 16.0))

xi_flat = analysis.distortion(spec, 4, 16, trials=50, seed=root.child("xf"))
xi_cheb = analysis.distortion(EnsembleSpec("chebyshev_bos"), 20, 100,
                              trials=400, seed=root.child("xc"))
print("distortion: iid DFT = %.2e (exactly zero row norms),"
      % xi_flat.value)
print("            Chebyshev(20,100) = %.4f <= closed-form bound %.4f"
      % (xi_cheb.value, analysis.chebyshev_distortion_bound(20, 100)))

# ---------------------------------------------------------------------------
# 5. the Christoffel function behind the Chebyshev distortion

print()
for t in (0.0, 0.5, 0.99, 1.0):
    v_sum = analysis.christoffel_chebyshev(t, 50)
    v_closed = analysis.christoffel_chebyshev(t, 50, method="closed")
    print("christoffel N=50 at t=%-5g: sum=%.12f closed=%.12f" %
          (t, v_sum, v_closed))
print("  (the two forms agree to machine precision; the spike toward the")
print("   endpoints, value (2N-1)/N, is what the distortion bound prices in)")

# ---------------------------------------------------------------------------
# 6. an end-to-end error budget against reality

print()
inst = root.child("endtoend")
m2, N2, s2 = 32, 64, 4
g = build_matrix(EnsembleSpec("gaussian"), m2, N2, inst.child("A"))
A2 = g.entries.real
x0 = sparse_signal(N2, s2, inst.child("x")).real
e = noise_vector(m2, 1e-3, inst.child("e")).real
y = A2 @ x0 + e
res = qcbp_decode(A2, y, 1e-3, DecodeOptions(step_ratio=0.03))
observed = np.linalg.norm(res.solution - x0)

# illustrative constants (certifying delta_2s for s=4 is out of brute-force
# range); the point is the budget's shape, not its tightness
budget = analysis.error_budget(analysis.budget_constants(0.5, 2.0, 1.0),
                               sigma_s1=0.0, s=s2, p=2.0, eta=1e-3,
                               err_norm=np.linalg.norm(e))
print("end to end (m=%d, N=%d, s=%d, eta=||e||=1e-3):" % (m2, N2, s2))
print("  observed l2 error:  %.3e" % observed)
print("  budget evaluation:  %.3e  (illustrative constants)" % budget)
print("  the guarantee is worst-case; typical instances do much better")

# ---------------------------------------------------------------------------
# 7. how many samples would a guarantee need?

print()
L, m_req = analysis.bos_measurement_bound(512, 15, eps=0.01, delta=0.5)
_, m_alt = analysis.bos_measurement_bound(512, 15, eps=0.01, delta=0.5,
                                          variant="alternative")
print("measurement-count calculator (N=512, s=15, eps=1e-2, delta=1/2):")
print("  primary variant:     m >= %d" % m_req)
print("  alternative variant: m >= %d" % m_alt)
print("  both are worst-case counts with unit frontend constant; the")
print("  experiments show recovery at m in the low hundreds")
