"""Quadratically constrained basis pursuit.

qcbp_decode solves

    minimize ||z||_1   subject to   ||A z - y||_2 <= eta

(basis pursuit when eta = 0) with an over-relaxed Chambolle-Pock
primal-dual iteration: the l1 proximal map is complex soft-thresholding,
the constraint enters through the support function of the l2 ball of
radius eta around y, and each step is extrapolated by a fixed relaxation
factor below 2 (plain averaged operator theory guarantees convergence for
any factor in (0, 2); the extrapolation roughly halves the iteration
count).  A Fenchel dual candidate is maintained along the way, so
termination is certified by an actual duality gap rather than by iterate
stagnation.  When the feasible set is empty the decoder returns the zero
vector by convention.

reference_decode solves the same program by Douglas-Rachford splitting with
exact (SVD-based) ball projections.  It is deliberately a different
algorithm with different internals, kept small and slow, and is used only
as a test oracle.
"""

import math

import numpy as np

_TINY = np.finfo(float).tiny

# fixed over-relaxation factor for the primal-dual iteration; any value in
# (0, 2) keeps the iteration an averaged fixed-point map, 1.9 is a safe
# near-optimal choice in practice
_RELAXATION = 1.9


class DecodeOptions:
    """Tuning knobs for qcbp_decode.

    tol_feas : float or None
        Absolute feasibility slack.  None (default) resolves to
        1e-6 * max(1, ||y||_2) at call time.
    tol_rel : float
        Relative duality-gap target, default 1e-9.
    max_iter : int
        Iteration cap, default 50000.
    step_ratio : float
        Ratio of primal to dual step size; the product is always
        0.99 / sigma_max(A)^2.  Smaller values favor the dual update and
        substantially speed up tightly constrained decodes; 0.1 is a robust
        default across the ensembles used here (1.0 is the canonical
        balanced choice).
    """

    def __init__(self, tol_feas=None, tol_rel=1e-9, max_iter=50000, step_ratio=0.1):
        if tol_feas is not None and tol_feas < 0:
            raise ValueError("tol_feas must be nonnegative")
        if tol_rel < 0:
            raise ValueError("tol_rel must be nonnegative")
        if max_iter < 1:
            raise ValueError("max_iter must be positive")
        if step_ratio <= 0:
            raise ValueError("step_ratio must be positive")
        self.tol_feas = tol_feas
        self.tol_rel = float(tol_rel)
        self.max_iter = int(max_iter)
        self.step_ratio = float(step_ratio)


class DecodeResult:
    """Decoder output: solution, residual_norm, objective, status, iterations."""

    def __init__(self, solution, residual_norm, objective, status, iterations):
        self.solution = solution
        self.residual_norm = float(residual_norm)
        self.objective = float(objective)
        self.status = status
        self.iterations = int(iterations)

    def __repr__(self):
        return ("DecodeResult(status=%r, objective=%.6g, residual_norm=%.3g, "
                "iterations=%d)" % (self.status, self.objective,
                                    self.residual_norm, self.iterations))


def _as_array(A):
    entries = getattr(A, "entries", A)
    B = np.asarray(entries)
    if B.ndim != 2:
        raise ValueError("expected a matrix, got shape %r" % (B.shape,))
    return B


def _soft_threshold(u, thresh):
    # entrywise shrinkage of the modulus; works for real and complex u
    a = np.abs(u)
    return u * (np.maximum(a - thresh, 0.0) / np.maximum(a, _TINY))


def operator_norm(A, tol=1e-4):
    """Largest singular value of A by power iteration on A*A.

    Deterministic start vector (no randomness involved), relative
    tolerance `tol` on the value.  Raises on the zero matrix.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    B = _as_array(A)
    m, N = B.shape
    if not np.any(B):
        raise ValueError("operator norm of the zero matrix is not useful here")
    Bh = B.conj().T
    # ones plus a ramp: nonzero projection on almost anything
    v = 1.0 + np.arange(N) / max(N, 1)
    v = v / np.linalg.norm(v)
    if np.iscomplexobj(B):
        v = v.astype(complex)
    sigma = 0.0
    hits = 0
    for _ in range(100000):
        w = Bh @ (B @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            # start vector happened to sit in the null space; bend it
            v = v + np.linspace(1.0, 2.0, N) * (1.0 / math.sqrt(N))
            v = v / np.linalg.norm(v)
            continue
        new_sigma = math.sqrt(nrm)
        v = w / nrm
        if abs(new_sigma - sigma) <= tol * new_sigma:
            hits += 1
            if hits >= 2:  # two quiet checks in a row, not a transient
                return new_sigma
        else:
            hits = 0
        sigma = new_sigma
    return sigma


def range_distance(A, y):
    """Euclidean distance from y to the column space of A (least squares)."""
    B = _as_array(A)
    y = np.asarray(y).ravel()
    if y.shape[0] != B.shape[0]:
        raise ValueError("dimension mismatch: A is %dx%d, y has length %d"
                         % (B.shape[0], B.shape[1], y.shape[0]))
    if not np.any(B):
        return float(np.linalg.norm(y))
    # rcond=-1 keeps every singular value above machine precision; the
    # default cutoff would misreport nearly-singular square systems
    # (e.g. dense nonharmonic frames) as being far from their range
    z, _, _, _ = np.linalg.lstsq(B, y, rcond=-1)
    return float(np.linalg.norm(B @ z - y))


def qcbp_decode(A, y, eta, opts=None):
    """Decode y through the QCBP program with threshold eta.

    Parameters
    ----------
    A : SensingMatrix or 2-d array
    y : complex vector of length m
    eta : float
        Nonnegative residual threshold (0 gives basis pursuit).
    opts : DecodeOptions, optional

    Returns
    -------
    DecodeResult
        status is "converged" when the iterate is feasible within tol_feas
        and the certified duality gap is below
        max(tol_rel * objective, 10 * tol_feas * ||dual||); "max_iter" when
        the budget ran out first; "infeasible_set_empty" when y is farther
        than eta + 10*tol_feas from the range of A, in which case the
        solution is the zero vector.
    """
    B = _as_array(A)
    y = np.asarray(y).ravel()
    m, N = B.shape
    if y.shape[0] != m:
        raise ValueError("dimension mismatch: A is %dx%d, y has length %d"
                         % (m, N, y.shape[0]))
    if not np.all(np.isfinite(B)) or not np.all(np.isfinite(y)):
        raise ValueError("non-finite entries in the problem data")
    eta = float(eta)
    if not math.isfinite(eta) or eta < 0:
        raise ValueError("eta must be a nonnegative finite real")
    if opts is None:
        opts = DecodeOptions()

    ny = float(np.linalg.norm(y))
    tol_feas = opts.tol_feas if opts.tol_feas is not None else 1e-6 * max(1.0, ny)

    complex_data = np.iscomplexobj(B) and np.any(B.imag)
    complex_data = complex_data or (np.iscomplexobj(y) and np.any(y.imag))
    out_dtype = complex

    # trivial feasibility of zero
    if ny <= eta:
        return DecodeResult(np.zeros(N, dtype=out_dtype), ny, 0.0, "converged", 0)

    # Def.-2 empty-feasible-set convention (borderline goes to the solve)
    if range_distance(B, y) > eta + 10.0 * tol_feas:
        return DecodeResult(np.zeros(N, dtype=out_dtype), ny, 0.0,
                            "infeasible_set_empty", 0)

    if complex_data:
        Bw = np.ascontiguousarray(B, dtype=complex)
        yw = np.asarray(y, dtype=complex)
    else:
        # everything real: run the iteration in real arithmetic (2x cheaper)
        Bw = np.ascontiguousarray(B.real, dtype=float)
        yw = np.asarray(y.real, dtype=float)
    Bh = np.ascontiguousarray(Bw.conj().T)

    # Power iteration approaches the norm from below; with a flat top
    # spectrum the change-based stop can sit ~0.5% under the true value,
    # which would push tau*sigma*||A||^2 past 1 and destabilize the
    # iteration (the dual prox at eta=0 adds no containment).  A tighter
    # tolerance plus 1% inflation keeps the product strictly inside.
    L = 1.01 * operator_norm(Bw, 1e-5)
    tau = math.sqrt(0.99 * opts.step_ratio) / L
    sigma = math.sqrt(0.99 / opts.step_ratio) / L

    rho = _RELAXATION
    x = np.zeros(N, dtype=Bw.dtype)
    Bx = np.zeros(m, dtype=Bw.dtype)   # tracks Bw @ x across relaxed updates
    p = np.zeros(m, dtype=Bw.dtype)

    check_every = 16
    best_dual = -math.inf

    for it in range(1, opts.max_iter + 1):
        g = Bh @ p
        xt = _soft_threshold(x - tau * g, tau)
        Bxt = Bw @ xt

        if it % check_every == 0:
            # dual candidate: rescale p into the feasible set ||A*p||_inf <= 1
            over = max(1.0, float(np.max(np.abs(g))))
            pn = float(np.linalg.norm(p)) / over
            dual_val = (-float(np.real(np.vdot(p, yw))) / over) - eta * pn
            if dual_val > best_dual:
                best_dual = dual_val
            slack = 10.0 * tol_feas * max(pn, 1e-12)
            # two primal candidates: the proximal output xt settles fast in
            # objective, the relaxed iterate x drives its residual far below
            # tol_feas; accept whichever certifies first
            resid = float(np.linalg.norm(Bxt - yw))
            obj = float(np.abs(xt).sum())
            if resid <= eta + tol_feas and \
                    obj - best_dual <= max(opts.tol_rel * obj, slack):
                return DecodeResult(xt.astype(out_dtype), resid, obj,
                                    "converged", it)
            resid = float(np.linalg.norm(Bx - yw))
            obj = float(np.abs(x).sum())
            if resid <= eta + tol_feas and \
                    obj - best_dual <= max(opts.tol_rel * obj, slack):
                resid = float(np.linalg.norm(Bw @ x - yw))  # exact, not tracked
                return DecodeResult(x.astype(out_dtype), resid, obj,
                                    "converged", it)

        q = p + sigma * (2.0 * Bxt - Bx - yw)
        if eta > 0.0:
            nq = np.linalg.norm(q)
            pt = q * max(0.0, 1.0 - sigma * eta / max(nq, _TINY))
        else:
            pt = q
        x = x + rho * (xt - x)
        p = p + rho * (pt - p)
        Bx = Bx + rho * (Bxt - Bx)

    # budget exhausted: hand back one last proximal candidate with an
    # exactly computed residual
    g = Bh @ p
    xt = _soft_threshold(x - tau * g, tau)
    resid = float(np.linalg.norm(Bw @ xt - yw))
    obj = float(np.abs(xt).sum())
    return DecodeResult(xt.astype(out_dtype), resid, obj, "max_iter",
                        opts.max_iter)


# ---------------------------------------------------------------------------
# independent oracle: Douglas-Rachford with exact ball projections


def _ball_projection_factors(s_pos, rho_pos, rho_fixed, eta):
    """Find mu >= 0 with || residual(mu) ||_2 = eta for the ball projection.

    residual(mu)^2 = sum rho_i / (1 + mu s_i^2)^2 + rho_fixed, strictly
    decreasing and convex in mu, so safeguarded Newton from 0 converges
    monotonically (same flavor as a least-squares secular equation).
    """
    s2 = s_pos * s_pos
    mu = 0.0
    for _ in range(300):
        w = 1.0 + mu * s2
        g = float(np.sum(rho_pos / (w * w))) + rho_fixed
        rn = math.sqrt(g)
        h = rn - eta
        if h <= 1e-15 * max(eta, rn):
            break
        dg = float(np.sum(-2.0 * rho_pos * s2 / (w * w * w)))
        dh = dg / (2.0 * rn)
        step = h / dh
        mu_new = mu - step
        if not math.isfinite(mu_new) or mu_new <= mu:
            mu_new = mu * 2.0 + 1.0  # safeguard, essentially never taken
        mu = mu_new
    return mu


def reference_decode(A, y, eta, tol=1e-12):
    """Small-scale QCBP oracle (Douglas-Rachford, exact projections).

    Only intended for tests: requires m, N <= 64, solves to a certified
    relative duality gap `tol` and returns the (feasible) solution vector.
    """
    B = _as_array(A)
    y = np.asarray(y, dtype=complex).ravel()
    m, N = B.shape
    if m > 64 or N > 64:
        raise ValueError("reference_decode is desk-scale only (m, N <= 64)")
    if y.shape[0] != m:
        raise ValueError("dimension mismatch")
    if tol <= 0 or tol > 1e-10:
        raise ValueError("oracle tolerance must be in (0, 1e-10]")
    eta = float(eta)

    ny = float(np.linalg.norm(y))
    if ny <= eta:
        return np.zeros(N, dtype=complex)

    B = np.asarray(B, dtype=complex)
    U, svals, Vh = np.linalg.svd(B, full_matrices=True)
    cutoff = max(m, N) * np.finfo(float).eps * (svals[0] if svals.size else 0.0)
    pos = svals > cutoff
    s_pos = svals[pos]
    V_pos = Vh[:pos.sum()].conj().T          # N x r
    U_pos = U[:, :len(svals)][:, pos]        # m x r

    ytil = U.conj().T @ y
    # component of y that no z can touch
    fixed_mask = np.ones(m, dtype=bool)
    fixed_mask[:len(svals)] = ~pos
    unreachable = float(np.linalg.norm(ytil[fixed_mask]))
    if unreachable > eta + 1e-9 * max(1.0, ny):
        return np.zeros(N, dtype=complex)   # empty feasible set, Def.-2 zero

    def project(w):
        """Euclidean projection of w onto {z : ||Az - y|| <= eta}, plus the
        multiplier vector mu*(Az - y) certifying it."""
        res = B @ w - y
        rn = float(np.linalg.norm(res))
        if rn <= eta:
            return w, np.zeros(m, dtype=complex)
        ctil = U.conj().T @ res
        if eta == 0.0:
            coeff = ctil[:len(svals)][pos] / s_pos
            z = w - V_pos @ coeff
            pd = U_pos @ (ctil[:len(svals)][pos] / (s_pos * s_pos))
            return z, pd
        rho = np.abs(ctil) ** 2
        rho_pos = rho[:len(svals)][pos]
        rho_fixed = float(np.sum(rho[fixed_mask]))
        mu = _ball_projection_factors(s_pos, rho_pos, rho_fixed, eta)
        shrink = (mu * s_pos) * ctil[:len(svals)][pos] / (1.0 + mu * s_pos * s_pos)
        z = w - V_pos @ shrink
        # residual of z in U coordinates, for the exact multiplier
        res_new = ctil.copy()
        res_new[:len(svals)][pos] = ctil[:len(svals)][pos] / (1.0 + mu * s_pos * s_pos)
        pd = mu * (U @ res_new)
        return z, pd

    # warm start from the least-squares preimage
    u = V_pos @ (ytil[:len(svals)][pos] / s_pos)
    step = 0.25 * float(np.max(np.abs(u))) + 1e-8

    for it in range(1, 400001):
        x = _soft_threshold(u, step)
        z, pd = project(2.0 * x - u)
        u = u + z - x
        if it % 4 == 0:
            obj = float(np.abs(z).sum())
            # dual candidate -pd/step, pushed into ||A* p||_inf <= 1
            apd = B.conj().T @ pd
            over = max(1.0, float(np.max(np.abs(apd))) / step)
            phat = (pd / step) / over
            dual_val = -float(np.real(np.vdot(phat, y))) - eta * float(np.linalg.norm(phat))
            gap = obj - dual_val
            if gap <= tol * max(1.0, obj):
                return z
    raise RuntimeError("reference_decode failed to certify a solution in 400000 iterations")
