"""Random sensing ensembles: matrices, signals, and noise.

All constructions are seeded through RandomStream, return immutable numpy
arrays, and store complex entries regardless of whether the underlying model
is real.  Supported measurement models:

``gaussian``
    Entries independent real normal with variance 1/m.
``partial_dft_independent``
    m rows of the unitary DFT drawn i.i.d. uniformly (duplicates possible).
``partial_dft_subset``
    A uniformly random size-m subset of DFT rows (all distinct).
``partial_dft_bernoulli``
    Every DFT row kept independently with probability m/N; the output matrix
    is N x N with the non-selected rows zeroed.  Here m is the *expected*
    number of measurements.
``nonharmonic_fourier``
    Complex exponentials with integer frequencies evaluated at uniform
    random points of (0,1).
``chebyshev_bos``
    Normalized Chebyshev polynomials sampled from the arcsine measure.
``custom_isometry``
    Independent uniformly drawn rows of a user-supplied N x N isometry.

Each model is a bounded orthonormal system (BOS) except ``gaussian``; the
BOS bound is 1 for the Fourier flavors and sqrt(2) for Chebyshev.
"""

import json
import math
import struct

import numpy as np

from .streams import RandomStream

MAGIC = b"QCBPMAT1"

BOS_KINDS = (
    "partial_dft_independent",
    "partial_dft_bernoulli",
    "partial_dft_subset",
    "nonharmonic_fourier",
    "chebyshev_bos",
    "custom_isometry",
)
KINDS = ("gaussian",) + BOS_KINDS

# kinds whose sample points are row indices of an isometry rather than
# continuous sample locations
_INDEX_KINDS = (
    "partial_dft_independent",
    "partial_dft_bernoulli",
    "partial_dft_subset",
    "custom_isometry",
)


class EnsembleSpec:
    """Description of a random measurement model.

    Parameters
    ----------
    kind : str
        One of the kinds listed in the module docstring.
    entry_bound : float, optional
        Uniform bound on the orthonormal system (1 for the Fourier kinds,
        sqrt(2) for Chebyshev; both are filled in automatically).  Required
        ``>= 1`` for BOS kinds.
    unitary : array, optional
        The N x N isometry of a ``custom_isometry`` spec.  Checked at
        construction: ``max |U_ij| <= entry_bound / sqrt(N)`` and unit-norm
        rows.
    """

    def __init__(self, kind, entry_bound=None, unitary=None):
        if kind not in KINDS:
            raise ValueError("unknown ensemble kind %r" % (kind,))
        self.kind = kind
        if kind in ("partial_dft_independent", "partial_dft_bernoulli",
                    "partial_dft_subset", "nonharmonic_fourier"):
            if entry_bound is not None and not math.isclose(entry_bound, 1.0):
                raise ValueError("entry bound of the Fourier kinds is 1")
            entry_bound = 1.0
        elif kind == "chebyshev_bos":
            if entry_bound is not None and not math.isclose(entry_bound, math.sqrt(2.0)):
                raise ValueError("entry bound of the Chebyshev system is sqrt(2)")
            entry_bound = math.sqrt(2.0)
        self.entry_bound = None if entry_bound is None else float(entry_bound)

        self.unitary = None
        if kind == "custom_isometry":
            if unitary is None:
                raise ValueError("custom_isometry needs the isometry matrix")
            if self.entry_bound is None or self.entry_bound < 1.0:
                raise ValueError("custom_isometry needs an entry bound >= 1")
            U = np.array(unitary, dtype=complex)
            if U.ndim != 2 or U.shape[0] != U.shape[1]:
                raise ValueError("the isometry must be square")
            n = U.shape[0]
            if np.max(np.abs(U)) > self.entry_bound / math.sqrt(n) + 1e-12:
                raise ValueError("isometry violates the entry bound K/sqrt(N)")
            row_norms = np.linalg.norm(U, axis=1)
            if np.max(np.abs(row_norms - 1.0)) > 1e-10:
                raise ValueError("isometry rows are not unit-norm")
            U.flags.writeable = False
            self.unitary = U
        elif unitary is not None:
            raise ValueError("only custom_isometry takes a unitary matrix")

    @property
    def is_bos(self):
        return self.kind in BOS_KINDS

    def __repr__(self):
        return "EnsembleSpec(kind=%r, entry_bound=%r)" % (self.kind, self.entry_bound)


class SensingMatrix:
    """A realized sensing matrix plus its ensemble metadata.

    Attributes
    ----------
    entries : complex ndarray
        The matrix itself (read-only).  For ``partial_dft_bernoulli`` this
        is N x N with zero rows where the selector came up empty.
    spec : EnsembleSpec
    m : int
        The nominal measurement count (expected count for the Bernoulli
        model, the row count otherwise); all 1/sqrt(m) and m/N scalings use
        this number.
    sample_points : ndarray or None
        Sample locations (BOS kinds): real points for the continuous
        systems, row indices for subsampled isometries.  For the Bernoulli
        model its length is the realized selection count, not m.
    rows_distinct : bool
        True when no two (retained) rows can coincide by construction.
    seed : tuple or None
        (master_seed, stream_id) of the stream that built the matrix.
    """

    def __init__(self, entries, spec, m, sample_points=None, rows_distinct=False, seed=None):
        entries = np.asarray(entries, dtype=complex)
        entries.flags.writeable = False
        self.entries = entries
        self.spec = spec
        self.m = int(m)
        if sample_points is not None:
            sample_points = np.asarray(sample_points)
            sample_points.flags.writeable = False
        self.sample_points = sample_points
        self.rows_distinct = bool(rows_distinct)
        self.seed = seed

    @property
    def N(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def measurement_rows(self):
        """The rows that actually carry measurements.

        Identical to ``entries`` except for the Bernoulli model, where only
        the selected rows are returned.  Row-wise certificates (distortion,
        scaled singular values) are defined on these rows.
        """
        if self.spec.kind == "partial_dft_bernoulli":
            return self.entries[np.asarray(self.sample_points, dtype=int)]
        return self.entries

    def __repr__(self):
        return "SensingMatrix(kind=%r, m=%d, N=%d)" % (self.spec.kind, self.m, self.N)


def _draw_subset(gen, n, k):
    """Uniform size-k subset of range(n) by a partial Fisher-Yates shuffle."""
    pool = np.arange(n)
    for i in range(k):
        j = i + int(gen.integers(0, n - i))
        pool[i], pool[j] = pool[j], pool[i]
    out = pool[:k]
    out.sort()
    return out


def _dft_rows(indices, N):
    # rows of the unitary DFT (times sqrt(N)): exp(2*pi*i * t * j / N)
    j = np.arange(N)
    phase = 2.0 * np.pi * np.multiply.outer(np.asarray(indices, dtype=float), j) / N
    return np.exp(1j * phase)


def _chebyshev_rows(t, N):
    # phi_1 = 1, phi_{j+1}(t) = sqrt(2) cos(j arccos t)
    theta = np.arccos(np.clip(np.asarray(t, dtype=float), -1.0, 1.0))
    j = np.arange(N)
    rows = np.sqrt(2.0) * np.cos(np.multiply.outer(theta, j))
    rows[..., 0] = 1.0
    return rows


def _nonharmonic_rows(t, N):
    freqs = np.arange(1, N + 1) - math.ceil(N / 2)
    phase = 2.0 * np.pi * np.multiply.outer(np.asarray(t, dtype=float), freqs)
    return np.exp(1j * phase)


def sample_chebyshev_points(count, stream):
    """Draw `count` points of [-1,1] from the Chebyshev (arcsine) measure.

    Uses the exact pushforward t = cos(pi*u) with u uniform, so no
    rejection or inversion error is involved.
    """
    if count < 1:
        raise ValueError("count must be positive")
    u = stream.generator.random(count)
    return np.cos(np.pi * u)


def build_matrix(spec, m, N, stream):
    """Draw an m x N sensing matrix from the given ensemble.

    Parameters
    ----------
    spec : EnsembleSpec
    m, N : int
        Measurement count and ambient dimension, 1 <= m <= N.  For
        ``partial_dft_bernoulli`` m is the expected number of selected rows
        and the returned matrix is N x N.
    stream : RandomStream

    Returns
    -------
    SensingMatrix
    """
    m = int(m)
    N = int(N)
    if N < 1 or m < 1:
        raise ValueError("m and N must be positive")
    if m > N:
        raise ValueError("m <= N is required for kind %r" % (spec.kind,))
    gen = stream.generator
    seed = (stream.master_seed, stream.stream_id)
    scale = 1.0 / math.sqrt(m)

    if spec.kind == "gaussian":
        entries = gen.standard_normal((m, N)) * scale
        return SensingMatrix(entries.astype(complex), spec, m, seed=seed)

    if spec.kind == "partial_dft_independent":
        idx = gen.integers(0, N, size=m)
        entries = scale * _dft_rows(idx, N)
        return SensingMatrix(entries, spec, m, sample_points=idx, seed=seed)

    if spec.kind == "partial_dft_subset":
        idx = _draw_subset(gen, N, m)
        entries = scale * _dft_rows(idx, N)
        return SensingMatrix(entries, spec, m, sample_points=idx,
                             rows_distinct=True, seed=seed)

    if spec.kind == "partial_dft_bernoulli":
        keep = gen.random(N) < m / N
        idx = np.flatnonzero(keep)
        entries = np.zeros((N, N), dtype=complex)
        if idx.size:
            entries[idx] = scale * _dft_rows(idx, N)
        return SensingMatrix(entries, spec, m, sample_points=idx,
                             rows_distinct=True, seed=seed)

    if spec.kind == "nonharmonic_fourier":
        t = gen.random(m)
        entries = scale * _nonharmonic_rows(t, N)
        return SensingMatrix(entries, spec, m, sample_points=t, seed=seed)

    if spec.kind == "chebyshev_bos":
        t = sample_chebyshev_points(m, stream)
        entries = (scale * _chebyshev_rows(t, N)).astype(complex)
        return SensingMatrix(entries, spec, m, sample_points=t, seed=seed)

    if spec.kind == "custom_isometry":
        U = spec.unitary
        if U.shape[0] != N:
            raise ValueError("isometry is %dx%d but N=%d requested" % (U.shape + (N,)))
        idx = gen.integers(0, N, size=m)
        entries = math.sqrt(N / m) * U[idx]
        return SensingMatrix(entries, spec, m, sample_points=idx, seed=seed)

    raise ValueError("unknown ensemble kind %r" % (spec.kind,))


def evaluate_bos(spec, t, N):
    """Evaluate the N system functions of a BOS spec at one sample location.

    Returns (phi_1(t), ..., phi_N(t)) without any 1/sqrt(m) scaling.  For the
    subsampled-isometry kinds t is a row index.
    """
    if not spec.is_bos:
        raise ValueError("%r is not a bounded orthonormal system" % (spec.kind,))
    if spec.kind == "chebyshev_bos":
        if not -1.0 <= t <= 1.0:
            raise ValueError("Chebyshev sample locations live in [-1,1]")
        return _chebyshev_rows(float(t), N).astype(complex)
    if spec.kind == "nonharmonic_fourier":
        return _nonharmonic_rows(float(t), N)
    # row index systems: phi_j(t) = sqrt(N) * U[t, j]
    i = int(t)
    if not 0 <= i < N:
        raise ValueError("row index out of range")
    if spec.kind == "custom_isometry":
        U = spec.unitary
        if U.shape[0] != N:
            raise ValueError("isometry size does not match N")
        return math.sqrt(N) * U[i]
    return _dft_rows([i], N)[0]


def sparse_signal(N, s, stream):
    """An s-sparse vector with uniformly random support and normal entries."""
    N = int(N)
    s = int(s)
    if s < 0 or s > N:
        raise ValueError("sparsity must satisfy 0 <= s <= N")
    x = np.zeros(N, dtype=complex)
    if s == 0:
        return x
    gen = stream.generator
    support = _draw_subset(gen, N, s)
    x[support] = gen.standard_normal(s)
    return x


def noise_vector(dim, magnitude, stream):
    """A noise vector of exactly the requested Euclidean norm.

    The direction is a normalized real standard normal draw (uniform on the
    real sphere), stored as a complex array like everything else.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    if magnitude == 0:
        return np.zeros(dim, dtype=complex)
    g = stream.generator.standard_normal(dim)
    return (magnitude / np.linalg.norm(g)) * g.astype(complex)


# ---------------------------------------------------------------------------
# binary container + JSON sidecar


def save_matrix(matrix, path):
    """Write a SensingMatrix to `path` (binary) and `path`.json (metadata).

    Layout: the 8-byte magic "QCBPMAT1", little-endian u64 row count, u64
    column count, then the entries row-major as interleaved little-endian
    f64 (re, im) pairs.  A custom isometry is appended in the same (re, im)
    format after a u64 size field, flagged in the sidecar.  The sidecar
    records kind, K, seed and sample_points.
    """

    def _pairs(arr):
        out = np.empty(arr.shape + (2,), dtype="<f8")
        out[..., 0] = arr.real
        out[..., 1] = arr.imag
        return out

    entries = matrix.entries
    rows, cols = entries.shape
    unitary = matrix.spec.unitary
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", rows, cols))
        fh.write(_pairs(entries).tobytes())
        if unitary is not None:
            fh.write(struct.pack("<Q", unitary.shape[0]))
            fh.write(_pairs(unitary).tobytes())

    points = matrix.sample_points
    if points is not None:
        points = [int(p) if np.issubdtype(np.asarray(points).dtype, np.integer) else float(p)
                  for p in points]
    meta = {
        "kind": matrix.spec.kind,
        "K": matrix.spec.entry_bound,
        "seed": list(matrix.seed) if matrix.seed is not None else None,
        "sample_points": points,
        "unitary_stored": unitary is not None,
    }
    if matrix.spec.kind == "partial_dft_bernoulli":
        # the binary header stores the physical row count N; keep the
        # nominal/expected m so the matrix reloads with its scalings intact
        meta["m_nominal"] = matrix.m
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def load_matrix(path):
    """Read a SensingMatrix written by save_matrix."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError("%s: not a QCBPMAT1 container" % (path,))
        rows, cols = struct.unpack("<QQ", fh.read(16))
        raw = np.fromfile(fh, dtype="<f8", count=rows * cols * 2)
        if raw.size != rows * cols * 2:
            raise ValueError("%s: truncated matrix payload" % (path,))
        tail = fh.read()
    raw = raw.reshape(rows, cols, 2)
    entries = raw[:, :, 0] + 1j * raw[:, :, 1]

    with open(str(path) + ".json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    kind = meta["kind"]
    if kind == "custom_isometry":
        if meta.get("unitary_stored") and len(tail) >= 8:
            (n,) = struct.unpack("<Q", tail[:8])
            upairs = np.frombuffer(tail[8:], dtype="<f8", count=n * n * 2)
            if upairs.size != n * n * 2:
                raise ValueError("%s: truncated isometry payload" % (path,))
            upairs = upairs.reshape(n, n, 2)
            spec = EnsembleSpec(kind, entry_bound=meta.get("K"),
                                unitary=upairs[:, :, 0] + 1j * upairs[:, :, 1])
        else:
            # written before the isometry was persisted; rebuild a bare spec
            spec = EnsembleSpec.__new__(EnsembleSpec)
            spec.kind = kind
            spec.entry_bound = meta.get("K")
            spec.unitary = None
    else:
        spec = EnsembleSpec(kind, entry_bound=meta.get("K"))
    m = meta.get("m_nominal", rows)
    points = meta.get("sample_points")
    if points is not None:
        if kind in _INDEX_KINDS:
            points = np.asarray(points, dtype=int)
        else:
            points = np.asarray(points, dtype=float)
    seed = meta.get("seed")
    return SensingMatrix(entries, spec, m, sample_points=points,
                         rows_distinct=kind in ("partial_dft_subset", "partial_dft_bernoulli"),
                         seed=tuple(seed) if seed else None)
