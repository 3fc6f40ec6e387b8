"""Function approximation from random samples, end to end.

Takes the built-in smooth target cos(pi t) exp(-t) on [-1, 1], samples it
at a small number of random arcsine-distributed points, and recovers a
sparse Chebyshev expansion by noise-aware decoding.  Sweeps the noise
radius to show the tradeoff: too small and the decoder chases sample
noise, too large and it gives up and returns the zero expansion.

Run:  python3 demos/approximation_demo.py
"""

import numpy as np

from qcbp.polyapprox import (approximate, l2_error, reference_coefficients,
                             target_function)

N = 80          # dictionary size (Chebyshev polynomials T_0 .. T_{N-1})
M = 60          # number of random samples
NOISE = 1e-4    # per-sample additive noise magnitude

print("target: cos(pi t) exp(-t) on [-1, 1], %d basis functions, "
      "%d samples, noise %.0e" % (N, M, NOISE))

# The radius passed to the decoder bounds the l2 norm of the sample
# perturbation; the natural guess from a per-sample magnitude is
# sqrt(M) * NOISE.  Sweep around that guess on both sides.
guess = np.sqrt(M) * NOISE
print("natural radius guess sqrt(M)*noise = %.3e\n" % guess)

print("%-12s %-14s %-14s %-10s" % ("radius", "weighted l2", "plain l2",
                                   "nonzeros"))
for scale in [0.0, 0.1, 1.0, 10.0, 1e5]:
    radius = guess * scale
    approx = approximate(target_function, N, M, eta=radius, seed=3,
                         noise_magnitude=NOISE)
    err = l2_error(approx, target_function, mode="weighted")
    plain = l2_error(approx, target_function, mode="unweighted")
    nnz = int(np.sum(np.abs(approx.coefficients) > 1e-8))
    print("%-12.3e %-14.6e %-14.6e %-10d" % (radius, err, plain, nnz))

print("""
Reading the table: at radius zero the decoder interpolates the noisy
samples exactly and the error floor is set by the noise.  Near the
natural guess the error is comparable with a sparser expansion.  Far
above it the feasible set contains the zero vector, the decoder returns
it, and the error saturates at the norm of the target itself.
""")

# How good could any expansion of this length be?  Compare against the
# reference coefficients computed by quadrature at the same truncation.
ref = reference_coefficients(target_function, N)
best = l2_error(ref, target_function, mode="weighted")
print("quadrature reference at the same truncation: weighted l2 %.6e"
      % best)
print("(any gap to the table above is the price of sampling at m < N)")
