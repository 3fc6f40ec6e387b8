"""Certificates and constant formulas for compressed-sensing recovery.

Everything here is either a closed-form constant (null-space / budget
constants, polylog measurement counts, Christoffel values) or a Monte-Carlo
estimator of a matrix functional (restricted isometry constants, quotients,
cross coherence, distortion, singular-value deviation).  Estimators draw
fresh matrices through RandomStream children so runs are reproducible and
order-independent; all of them are documented as one-sided estimates where
the underlying quantity is a supremum.
"""

import itertools
import math

import numpy as np

from .ensembles import build_matrix
from .solver import DecodeOptions, qcbp_decode
from .streams import as_stream

# Monte-Carlo stand-in for the unspecified universal constant in the
# singular-value deviation bound; generous on purpose (diagnostic, not proof)
_SV_DIAGNOSTIC_CONSTANT = 10.0

# relative threshold under which the smallest scaled singular value is
# treated as zero (rank deficiency)
_SIGMA_MIN_CUTOFF = 1e-8


# ---------------------------------------------------------------------------
# small result records


class RIPReport:
    """Restricted isometry constant for one sparsity order.

    `delta` is the smallest constant bounding the two-sided restricted
    isometry inequality; in sampled mode it is a lower bound on the true
    value (a max over a random subset of supports).
    """

    def __init__(self, s, delta, mode, supports_examined):
        self.s = int(s)
        self.delta = float(delta)
        self.mode = mode
        self.supports_examined = int(supports_examined)

    def __repr__(self):
        return ("RIPReport(s=%d, delta=%.6g, mode=%r, supports_examined=%d)"
                % (self.s, self.delta, self.mode, self.supports_examined))


class NSPConstants:
    """Robust null-space property constants derived from a RIP constant."""

    def __init__(self, rho, tau):
        if not 0.0 <= rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if tau <= 0.0:
            raise ValueError("tau must be positive")
        self.rho = float(rho)
        self.tau = float(tau)

    def __iter__(self):  # allows tuple unpacking: rho, tau = constants
        return iter((self.rho, self.tau))

    def __repr__(self):
        return "NSPConstants(rho=%.6g, tau=%.6g)" % (self.rho, self.tau)


class BudgetConstants:
    """The three positive factors of the recovery error budget.

    tail_factor multiplies the best s-term approximation error,
    noise_factor multiplies the declared threshold, and excess_factor
    multiplies the unmodeled part of the measurement error.
    """

    def __init__(self, tail_factor, noise_factor, excess_factor):
        if tail_factor <= 0 or noise_factor <= 0 or excess_factor <= 0:
            raise ValueError("budget constants must be positive")
        self.tail_factor = float(tail_factor)
        self.noise_factor = float(noise_factor)
        self.excess_factor = float(excess_factor)

    def __iter__(self):
        return iter((self.tail_factor, self.noise_factor, self.excess_factor))

    def __repr__(self):
        return ("BudgetConstants(tail_factor=%.6g, noise_factor=%.6g, "
                "excess_factor=%.6g)" % tuple(self))


class QuotientBounds:
    """Sandwich bounds for the l1 quotient of one matrix instance.

    `lower` is the entry-bound-based lower bound (None when the entry bound
    does not hold for the instance), `upper` the reciprocal-singular-value
    upper bound (math.inf when the scaled adjoint is rank deficient),
    `empirical` an optional Monte-Carlo lower estimate filled in by
    quotient_empirical.
    """

    def __init__(self, order, lower, upper, sigma_min, empirical=None):
        self.order = float(order)
        self.lower = None if lower is None else float(lower)
        self.upper = float(upper)
        self.sigma_min = float(sigma_min)
        self.empirical = None if empirical is None else float(empirical)

    def to_json(self):
        upper = self.upper if math.isfinite(self.upper) else "inf"
        return {
            "lambda": self.order,
            "lower": self.lower,
            "upper": upper,
            "empirical": self.empirical,
            "sigma_min": self.sigma_min,
        }

    def __repr__(self):
        return ("QuotientBounds(order=%g, lower=%r, upper=%r, sigma_min=%.6g, "
                "empirical=%r)" % (self.order, self.lower, self.upper,
                                   self.sigma_min, self.empirical))


class MomentEstimate:
    """A Monte-Carlo mean with its standard error."""

    def __init__(self, value, trials, std_error):
        self.value = float(value)
        self.trials = int(trials)
        self.std_error = float(std_error)

    def to_json(self):
        return {"value": self.value, "trials": self.trials,
                "std_error": self.std_error}

    def __repr__(self):
        return ("MomentEstimate(value=%.6g, trials=%d, std_error=%.3g)"
                % (self.value, self.trials, self.std_error))


# ---------------------------------------------------------------------------
# deterministic vector / constant calculus


def best_s_term_error(x, s, q=2.0):
    """l^q norm of x minus its best s-term approximation.

    The s largest-modulus entries are removed (ties broken toward the lower
    index) and the l^q norm of the remainder is returned.
    """
    x = np.asarray(x).ravel()
    s = int(s)
    if s < 0 or s > x.size:
        raise ValueError("s must satisfy 0 <= s <= len(x)")
    if q < 1:
        raise ValueError("q must be at least 1")
    a = np.abs(x)
    # stable sort on -|x| keeps equal moduli in index order
    order = np.argsort(-a, kind="stable")
    rest = a[order[s:]]
    if rest.size == 0:
        return 0.0
    if math.isinf(q):
        return float(rest.max())
    return float(np.sum(rest ** q) ** (1.0 / q))


def _gram_deviation(G, supports):
    """max over the given supports of the Gram spectral deviation from 1."""
    idx = np.asarray(supports, dtype=int)
    sub = G[idx[:, :, None], idx[:, None, :]]
    eigs = np.linalg.eigvalsh(sub)
    return float(np.max(np.abs(eigs - 1.0)))


def rip_constant(A, s, mode="exhaustive", trials=500, stream=None):
    """Restricted isometry constant of order s.

    mode="exhaustive" maximizes the spectral deviation of the column Gram
    matrix over all supports of size s (requires C(N, s) <= 1e6);
    mode="sampled" maximizes over `trials` uniformly drawn supports and is
    therefore a lower bound.
    """
    B = np.asarray(getattr(A, "entries", A))
    N = B.shape[1]
    s = int(s)
    if s < 1 or s > N:
        raise ValueError("s must satisfy 1 <= s <= N")
    G = B.conj().T @ B
    chunk = max(1, 200000 // (s * s))

    if mode == "exhaustive":
        total = math.comb(N, s)
        if total > 10 ** 6:
            raise ValueError("exhaustive RIP over %d supports exceeds the "
                             "1e6 budget" % total)
        delta = 0.0
        batch = []
        for sup in itertools.combinations(range(N), s):
            batch.append(sup)
            if len(batch) == chunk:
                delta = max(delta, _gram_deviation(G, batch))
                batch = []
        if batch:
            delta = max(delta, _gram_deviation(G, batch))
        return RIPReport(s, delta, "exhaustive", total)

    if mode == "sampled":
        if trials < 1:
            raise ValueError("trials must be positive")
        gen = as_stream(stream if stream is not None else 0).generator
        delta = 0.0
        remaining = int(trials)
        while remaining > 0:
            take = min(chunk, remaining)
            batch = [np.sort(gen.choice(N, size=s, replace=False))
                     for _ in range(take)]
            delta = max(delta, _gram_deviation(G, batch))
            remaining -= take
        return RIPReport(s, delta, "sampled", trials)

    raise ValueError("mode must be 'exhaustive' or 'sampled'")


def nsp_from_rip(delta2s):
    """Null-space property constants from a RIP constant of doubled order.

    Valid for delta2s < 4/sqrt(41); raises otherwise.
    """
    delta = float(delta2s)
    limit = 4.0 / math.sqrt(41.0)
    if delta < 0:
        raise ValueError("delta2s must be nonnegative")
    if delta >= limit:
        raise ValueError("RIP condition violated: delta2s must be below "
                         "4/sqrt(41) ~= %.6f, got %g" % (limit, delta))
    denom = math.sqrt(1.0 - delta * delta) - delta / 4.0
    rho = delta / denom
    tau = math.sqrt(1.0 + delta) / denom
    return NSPConstants(rho, tau)


def budget_constants(rho, tau, quotient_l1):
    """Error-budget factors from null-space constants and an l1 quotient.

    rho=0 is accepted as the zero-RIP limit.
    """
    rho = float(rho)
    tau = float(tau)
    quotient_l1 = float(quotient_l1)
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if quotient_l1 < 0:
        raise ValueError("the quotient is nonnegative")
    tail = 2.0 * (1.0 + rho) ** 2 / (1.0 - rho)
    noise = 2.0 * (3.0 + rho) * tau / (1.0 - rho)
    excess = tail * ((rho + 2.0) * quotient_l1 + tau)
    return BudgetConstants(tail, noise, excess)


def simultaneous_quotient_upper(rho, tau, quotient_l1):
    """Upper bound for the combined (l^q, l1) quotient: (rho+2)*Q + tau."""
    return (float(rho) + 2.0) * float(quotient_l1) + float(tau)


def error_budget(consts, sigma_s1, s, p=2.0, eta=0.0, err_norm=0.0):
    """Evaluate the recovery error budget.

    tail_factor * sigma_s1 / s^(1-1/p)
      + s^(1/p-1/2) * (noise_factor * eta
                       + excess_factor * max(err_norm - eta, 0)).
    """
    s = float(s)
    if s < 1:
        raise ValueError("s must be at least 1")
    p = float(p)
    if not 1.0 <= p <= 2.0:
        raise ValueError("p must lie in [1, 2]")
    C, D, E = consts
    tail = C * float(sigma_s1) / s ** (1.0 - 1.0 / p)
    excess = max(float(err_norm) - float(eta), 0.0)
    return tail + s ** (1.0 / p - 0.5) * (D * float(eta) + E * excess)


# ---------------------------------------------------------------------------
# quotient calculus


def sigma_min_scaled(A):
    """Smallest singular value of sqrt(m/N) times the adjoint matrix.

    For the Bernoulli selector model only the selected rows enter (zero
    rows are bookkeeping, not measurements), while m stays the nominal
    count used in the scaling.
    """
    rows = A.measurement_rows() if hasattr(A, "measurement_rows") else np.asarray(A)
    m = getattr(A, "m", rows.shape[0])
    N = rows.shape[1]
    if rows.shape[0] > N:
        raise ValueError("m <= N is required")
    svals = np.linalg.svd(rows, compute_uv=False)
    scale = math.sqrt(m / N)
    if svals.size < min(rows.shape) or rows.shape[0] == 0:
        return 0.0
    # singular values of the adjoint coincide with those of the matrix; a
    # row count below N means the adjoint's smallest singular value is the
    # matrix's smallest, not an artificial zero
    return float(scale * svals[-1])


def quotient_bounds(A, order, entry_bound=None):
    """Sandwich bounds for the order-`order` l1 quotient of one instance.

    The lower bound (1/K) * sqrt(m/order) is reported only when the
    instance actually satisfies the entrywise bound |A_ij| <= K/sqrt(m);
    the upper bound sqrt(m/order) / sigma_min is flagged infinite when the
    scaled adjoint is rank deficient.
    """
    order = float(order)
    if order <= 0:
        raise ValueError("order must be positive")
    rows = A.measurement_rows() if hasattr(A, "measurement_rows") else np.asarray(A)
    m = getattr(A, "m", rows.shape[0])
    if entry_bound is None:
        spec = getattr(A, "spec", None)
        entry_bound = getattr(spec, "entry_bound", None)

    smin = sigma_min_scaled(A)
    svals_max = float(np.linalg.norm(rows, 2)) * math.sqrt(m / rows.shape[1])
    root = math.sqrt(m / order)
    if smin <= _SIGMA_MIN_CUTOFF * max(svals_max, 1e-300):
        upper = math.inf
    else:
        upper = root / smin

    lower = None
    if entry_bound is not None and entry_bound > 0:
        if np.max(np.abs(rows)) <= entry_bound / math.sqrt(m) + 1e-9:
            lower = root / float(entry_bound)
    return QuotientBounds(order, lower, upper, smin)


def quotient_empirical(A, order, n_directions=32, stream=None, opts=None,
                       eta=0.0):
    """Monte-Carlo lower estimate of the order-`order` l1 quotient.

    Decodes the m canonical basis directions plus `n_directions` random
    unit directions and returns the largest decode objective divided by
    sqrt(order).  The true quotient is a supremum over all directions, so
    this is a lower estimate; with eta > 0 the same directions estimate the
    threshold variant, which can only be smaller.
    """
    order = float(order)
    if order <= 0:
        raise ValueError("order must be positive")
    if n_directions < 0:
        raise ValueError("n_directions must be nonnegative")
    rows = A.measurement_rows() if hasattr(A, "measurement_rows") else np.asarray(A)
    m = rows.shape[0]
    if sigma_min_scaled(A) <= _SIGMA_MIN_CUTOFF:
        raise ValueError("quotient_empirical needs a full-row-rank matrix")
    if opts is None:
        opts = DecodeOptions(tol_feas=1e-9, tol_rel=1e-11, max_iter=200000,
                             step_ratio=0.03)
    gen = as_stream(stream if stream is not None else 0).generator

    directions = [np.eye(m, dtype=complex)[k] for k in range(m)]
    for _ in range(int(n_directions)):
        g = gen.standard_normal(m) + 1j * gen.standard_normal(m)
        directions.append(g / np.linalg.norm(g))

    best = 0.0
    for e in directions:
        res = qcbp_decode(rows, e, eta, opts)
        best = max(best, res.objective)
    return best / math.sqrt(order)


# ---------------------------------------------------------------------------
# ensemble moment estimators


def _as_trial_stream(seed):
    return as_stream(seed if seed is not None else 0)


def _offdiag_square_sums(rows):
    """Row-wise sums of squared inner products with the other rows."""
    G = rows @ rows.conj().T
    sq = np.abs(G) ** 2
    np.fill_diagonal(sq, 0.0)
    return sq.sum(axis=1)


def coherence_statistic(matrix, reduction="sum"):
    """Single-instance cross-coherence statistic (see cross_coherence)."""
    rows = (matrix.measurement_rows() if hasattr(matrix, "measurement_rows")
            else np.asarray(matrix))
    m = getattr(matrix, "m", rows.shape[0])
    N = rows.shape[1]
    if rows.shape[0] < 2:
        return 0.0
    per_row = _offdiag_square_sums(rows)
    stat = per_row.sum() if reduction == "sum" else per_row.max()
    return float((m / N) ** 2 * stat)


def distortion_statistic(matrix):
    """Single-instance distortion statistic max_k |(m/N)||a_k||^2 - 1|."""
    rows = (matrix.measurement_rows() if hasattr(matrix, "measurement_rows")
            else np.asarray(matrix))
    m = getattr(matrix, "m", rows.shape[0])
    N = rows.shape[1]
    if rows.shape[0] == 0:
        return 0.0
    sq = np.einsum("ij,ij->i", rows, rows.conj()).real
    return float(np.max(np.abs((m / N) * sq - 1.0)))


def cross_coherence(spec, m, N, trials=500, seed=None, reduction="sum"):
    """Monte-Carlo cross-coherence estimate for an ensemble.

    Per fresh matrix the statistic is (m/N)^2 times either the full sum of
    squared off-diagonal row inner products (reduction="sum", the quantity
    whose expectation the m^2/N upper bound actually controls and the
    default here) or the worst row's sum (reduction="max", the literal
    definition).  Note the matrix rows already carry the 1/sqrt(m)
    normalization, so no extra scaling appears here beyond (m/N)^2.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if reduction not in ("sum", "max"):
        raise ValueError("reduction must be 'sum' or 'max'")
    root = _as_trial_stream(seed)
    vals = np.empty(trials)
    for t in range(int(trials)):
        mat = build_matrix(spec, m, N, root.child(t))
        vals[t] = coherence_statistic(mat, reduction)
    std_error = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MomentEstimate(vals.mean(), trials, std_error)


def distortion(spec, m, N, trials=500, seed=None):
    """Monte-Carlo distortion estimate: E max_k |(m/N)||a_k||^2 - 1|."""
    if trials < 1:
        raise ValueError("trials must be positive")
    root = _as_trial_stream(seed)
    vals = np.empty(trials)
    for t in range(int(trials)):
        mat = build_matrix(spec, m, N, root.child(t))
        vals[t] = distortion_statistic(mat)
    std_error = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MomentEstimate(vals.mean(), trials, std_error)


def sv_deviation_empirical(spec, m, N, trials=200, seed=None):
    """Observed worst singular-value deviation of the scaled adjoint vs the
    coherence/distortion diagnostic bound.

    Returns {"deviation": .., "bound": ..} where deviation is the
    Monte-Carlo mean of max_k |sigma_k(sqrt(m/N) A*) - 1| and bound is
    xi_hat + 10 * sqrt((1 + xi_hat) * mu_hat * ln m) with mu_hat and xi_hat
    the cross-coherence and distortion estimates from the same draws (sum
    convention, matching cross_coherence; the constant 10 stands in for an
    unspecified universal constant, so this is diagnostic only).
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    root = _as_trial_stream(seed)
    scale = math.sqrt(m / N)
    dev = np.empty(trials)
    mu = np.empty(trials)
    xi = np.empty(trials)
    for t in range(int(trials)):
        mat = build_matrix(spec, m, N, root.child(t))
        rows = mat.measurement_rows()
        if rows.shape[0] == 0:
            dev[t] = 1.0  # no measurement rows: every singular value is 0
            mu[t] = 0.0
            xi[t] = 0.0
            continue
        svals = np.linalg.svd(rows, compute_uv=False)
        dev[t] = np.max(np.abs(scale * svals - 1.0))
        mu[t] = coherence_statistic(mat)
        xi[t] = distortion_statistic(mat)
    mu_hat = float(mu.mean())
    xi_hat = float(xi.mean())
    log_m = math.log(m) if m > 1 else 0.0
    bound = xi_hat + _SV_DIAGNOSTIC_CONSTANT * math.sqrt(
        (1.0 + xi_hat) * mu_hat * log_m)
    return {"deviation": float(dev.mean()), "bound": float(bound)}


# ---------------------------------------------------------------------------
# Chebyshev system constants


def christoffel_chebyshev(t, N, method="sum"):
    """Normalized Christoffel function of the Chebyshev system at t.

    method="sum" (default, ground truth) evaluates (1/N) sum_j |phi_j(t)|^2
    directly; method="closed" uses the Dirichlet-kernel closed form
    1 - 1/(2N) + sin((2N-1)x)/(2N sin x) with x = arccos t, falling back to
    the sum where sin x vanishes (t at the interval endpoints).
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0):
        raise ValueError("Chebyshev sample locations live in [-1, 1]")
    x = np.arccos(t_arr)

    if method == "closed":
        sx = np.sin(x)
        safe = np.abs(sx) > 1e-12
        out = np.empty_like(t_arr)
        out[safe] = (1.0 - 0.5 / N
                     + np.sin((2 * N - 1) * x[safe]) / (2.0 * N * sx[safe]))
        if not np.all(safe):
            out[~safe] = christoffel_chebyshev(t_arr[~safe], N, method="sum")
        return float(out) if out.ndim == 0 else out
    if method != "sum":
        raise ValueError("method must be 'sum' or 'closed'")

    k = np.arange(1, N)
    # |phi_1|^2 = 1 and |phi_{j+1}|^2 = 2 cos^2(j x)
    sq = 1.0 + 2.0 * np.sum(np.cos(np.multiply.outer(x, k)) ** 2, axis=-1)
    out = sq / N
    return float(out) if np.ndim(out) == 0 else out


def chebyshev_distortion_bound(m, N):
    """Distortion upper bound (9 sqrt 6 / (2 pi^(1/4))) * sqrt(m/N)."""
    m = int(m)
    N = int(N)
    if m <= 1 or m > N:
        raise ValueError("the bound needs 1 < m <= N")
    return 9.0 * math.sqrt(6.0) / (2.0 * math.pi ** 0.25) * math.sqrt(m / N)


def s_star(m, N):
    """The sparsity scale m / ln(e N / m)."""
    m = int(m)
    N = int(N)
    if m < 1 or m > N:
        raise ValueError("1 <= m <= N is required")
    return m / math.log(math.e * N / m)


def bos_measurement_bound(N, s, eps, delta, K=1.0, variant="primary", c=1.0):
    """Polylog factor L and measurement count m = ceil(c * s * L).

    variant="primary" uses the tail-probability-explicit factor; variant
    "alternative" the squared-log-in-s factor.  Every logarithm must come
    out positive, otherwise the inputs are outside the regime where the
    formula means anything and a ValueError is raised.  The frontend
    constant c stands in for the unspecified universal constant (default 1).
    """
    N = int(N)
    s = int(s)
    eps = float(eps)
    delta = float(delta)
    K = float(K)
    if s < 2:
        raise ValueError("s must be at least 2")
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise ValueError("eps and delta must lie in (0, 1)")
    if K < 1.0:
        raise ValueError("the system bound K is at least 1")
    if c <= 0:
        raise ValueError("the frontend constant must be positive")

    base = K * K * s / delta ** 2

    def _ln(v, label):
        if v <= 1.0:
            raise ValueError("nonpositive logarithm for %s" % label)
        return math.log(v)

    ln_base = _ln(base, "K^2 s / delta^2")
    lnN = _ln(N, "N")
    if variant == "primary":
        first = _ln(base * ln_base, "(K^2 s/delta^2) ln(K^2 s/delta^2)")
        second = _ln(ln_base / (eps * delta),
                     "ln(K^2 s/delta^2) / (eps delta)")
        L = (K * K / delta ** 2) * ln_base * max(
            first * lnN / delta ** 4, second / delta)
    elif variant == "alternative":
        lns = math.log(s)
        L = (K * K / delta ** 2) * max(
            lns * lns * _ln(base * lnN, "(K^2 s/delta^2) ln N") * lnN,
            math.log(1.0 / eps))
    else:
        raise ValueError("variant must be 'primary' or 'alternative'")
    m = math.ceil(c * s * L)
    return L, int(m)
