"""Deterministic random streams for reproducible experiments.

Every randomized routine in this package draws from a RandomStream: a thin
wrapper around numpy's counter-based Philox generator keyed by
(master_seed, stream_id).  Child streams are derived by hashing a path of
labels into a fresh stream_id, so independent tasks (trials, grid points,
directions) can be seeded up front and run in any order -- including in
parallel -- without changing the numbers they produce.

Determinism is promised within one build of this package on one platform;
bit-exact reproduction across numpy versions or languages is not.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


class RandomStream:
    """A named, reproducible source of randomness.

    Parameters
    ----------
    master_seed : int
        Experiment-level seed, shared by every stream of one run.
    stream_id : int
        Identifies this stream within the run.  Streams with distinct ids
        are statistically independent; equal (master_seed, stream_id)
        pairs replay identical sequences.
    """

    def __init__(self, master_seed, stream_id=0):
        self.master_seed = int(master_seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._generator = None

    def child(self, *path):
        """Derive a sub-stream from a path of ints/strings.

        The path is hashed (together with this stream's id) into the child's
        stream_id, so e.g. ``root.child("trial", 7)`` is stable no matter how
        many other children exist or in which order they are created.
        """
        h = hashlib.blake2s(digest_size=8)
        h.update(self.stream_id.to_bytes(8, "little"))
        for part in path:
            if isinstance(part, (bool, float)):
                # floats/bools silently hashing as ints invites collisions
                raise TypeError("stream path parts must be int or str, got %r" % (part,))
            if isinstance(part, (int, np.integer)):
                h.update(b"i")
                h.update(int(part).to_bytes(16, "little", signed=True))
            elif isinstance(part, str):
                h.update(b"s")
                h.update(part.encode("utf-8"))
                h.update(b"\x00")
            else:
                raise TypeError("stream path parts must be int or str, got %r" % (part,))
        return RandomStream(self.master_seed, int.from_bytes(h.digest(), "little"))

    @property
    def generator(self):
        """The lazily created numpy Generator backing this stream."""
        if self._generator is None:
            key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
            self._generator = np.random.Generator(np.random.Philox(key=key))
        return self._generator

    def __repr__(self):
        return "RandomStream(master_seed=%d, stream_id=%d)" % (self.master_seed, self.stream_id)


def as_stream(seed_or_stream):
    """Accept either an integer seed or a RandomStream."""
    if isinstance(seed_or_stream, RandomStream):
        return seed_or_stream
    return RandomStream(int(seed_or_stream))
