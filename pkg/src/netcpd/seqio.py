"""File formats for adjacency sequences.

Two interchangeable on-disk representations:

* a packed binary container (``.nsq``) storing each snapshot's upper
  triangle as a bitset, compact for dense simulation output;
* a plain-text edge list, one ``time node node`` triple per line, easy to
  produce from external tooling and to inspect by hand.

Both store symmetric 0/1 matrices only and record whether the diagonal is
meaningful.  Times are 1-based in the text format to match the package-wide
snapshot numbering; arrays in memory stay 0-indexed.
"""

from __future__ import annotations

import struct

import numpy as np

_MAGIC = b"NSQ1"
_FLAG_SELF_LOOPS = 1
_EDGE_HEADER = "# netcpd-edges v1"


def _check_sequence(seq: np.ndarray) -> np.ndarray:
    seq = np.asarray(seq)
    if seq.ndim != 3 or seq.shape[1] != seq.shape[2]:
        raise ValueError("expected a (T, n, n) array")
    if not np.isin(seq, (0, 1)).all():
        raise ValueError("snapshots must be 0/1 valued")
    if not np.array_equal(seq, np.transpose(seq, (0, 2, 1))):
        raise ValueError("snapshots must be symmetric")
    return seq.astype(np.uint8, copy=False)


def save_sequence_bits(path, seq: np.ndarray, self_loops: bool = True) -> None:
    """Write the packed binary container."""
    seq = _check_sequence(seq)
    if not self_loops and seq.shape[0] and np.any(seq[:, np.arange(seq.shape[1]),
                                                    np.arange(seq.shape[1])]):
        raise ValueError("nonzero diagonal in a sequence marked loop-free")
    t_total, n = seq.shape[0], seq.shape[1]
    rows, cols = np.triu_indices(n)
    flags = _FLAG_SELF_LOOPS if self_loops else 0
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<BBII", 1, flags, t_total, n))
        for t in range(t_total):
            fh.write(np.packbits(seq[t][rows, cols]).tobytes())


def load_sequence_bits(path) -> tuple[np.ndarray, bool]:
    """Read the packed binary container; returns (sequence, self_loops)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}, not a packed sequence file")
        header = fh.read(10)
        if len(header) != 10:
            raise ValueError("truncated header")
        version, flags, t_total, n = struct.unpack("<BBII", header)
        if version != 1:
            raise ValueError(f"unsupported container version {version}")
        self_loops = bool(flags & _FLAG_SELF_LOOPS)
        rows, cols = np.triu_indices(n)
        block = -(-rows.size // 8)  # bytes per snapshot
        payload = fh.read()
    if len(payload) != block * t_total:
        raise ValueError(
            f"payload holds {len(payload)} bytes, expected {block * t_total}"
        )
    seq = np.zeros((t_total, n, n), dtype=np.uint8)
    for t in range(t_total):
        chunk = np.frombuffer(payload, dtype=np.uint8, count=block,
                              offset=t * block)
        bits = np.unpackbits(chunk)[: rows.size]
        seq[t][rows, cols] = bits
        seq[t][cols, rows] = bits
    return seq, self_loops


def save_edge_list(path, seq: np.ndarray, self_loops: bool = True) -> None:
    """Write the text edge list: header plus one ``t i j`` line per edge."""
    seq = _check_sequence(seq)
    t_total, n = seq.shape[0], seq.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"{_EDGE_HEADER} n_steps={t_total} n_nodes={n} "
            f"self_loops={int(self_loops)}\n"
        )
        for t in range(t_total):
            rows, cols = np.nonzero(np.triu(seq[t]))
            for i, j in zip(rows, cols):
                fh.write(f"{t + 1} {i} {j}\n")


def load_edge_list(path) -> tuple[np.ndarray, bool]:
    """Read the text edge list; returns (sequence, self_loops)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith(_EDGE_HEADER):
            raise ValueError("missing edge-list header")
        fields = dict(
            item.split("=") for item in header[len(_EDGE_HEADER):].split()
        )
        t_total = int(fields["n_steps"])
        n = int(fields["n_nodes"])
        self_loops = bool(int(fields.get("self_loops", 1)))
        seq = np.zeros((t_total, n, n), dtype=np.uint8)
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                t, i, j = (int(x) for x in line.split())
            except ValueError as exc:
                raise ValueError(f"line {line_no}: expected 't i j'") from exc
            if not (1 <= t <= t_total and 0 <= i < n and 0 <= j < n):
                raise ValueError(f"line {line_no}: edge ({t}, {i}, {j}) out of range")
            seq[t - 1, i, j] = 1
            seq[t - 1, j, i] = 1
    return seq, self_loops
