"""CSV readers and writers for tables, sequences, frames, waveforms and traces."""

from __future__ import annotations

import csv

import numpy as np

from .bits import bits_from_index

__all__ = [
    "read_bcal_csv",
    "read_frame_csv",
    "read_sequence_csv",
    "write_bcal_csv",
    "write_frame_csv",
    "write_profile_csv",
    "write_sequence_csv",
    "write_trace_csv",
    "write_waveform_csv",
]


def _fmt(x):
    return repr(float(x))


def write_bcal_csv(path, table):
    """One row per ``k``; columns labelled by the big-endian info bit string; cells ``"re,im"``."""
    t = np.asarray(table, dtype=complex)
    n_bo = int(round(np.log2(t.shape[1])))
    labels = ["".join(map(str, bits_from_index(c, n_bo))) for c in range(t.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        w.writerow(["k", *labels])
        for k, row in enumerate(t):
            w.writerow([k, *(f"{_fmt(v.real)},{_fmt(v.imag)}" for v in row)])


def read_bcal_csv(path):
    """Inverse of :func:`write_bcal_csv`; returns ``(labels, table)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    labels = rows[0][1:]
    table = np.array([[complex(*map(float, cell.split(","))) for cell in r[1:]] for r in rows[1:]])
    return labels, table


def _write_columns(path, header, columns, int_first=True):
    data = np.column_stack(columns)
    fmt = ["%d" if int_first else "%.17g"] + ["%.17g"] * (data.shape[1] - 1)
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt=fmt)


def _write_complex(path, index_name, values):
    v = np.asarray(values, dtype=complex)
    _write_columns(path, [index_name, "re", "im"], [np.arange(v.size), v.real, v.imag])


def _read_complex(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1] + 1j * data[:, 2]


def write_sequence_csv(path, seq):
    """Overlaid sequence as ``(m, re, im)`` rows."""
    _write_complex(path, "m", seq)


def read_sequence_csv(path):
    return _read_complex(path)


def write_frame_csv(path, frame):
    """Subcarrier coefficients as ``(k, re, im)`` rows."""
    values = getattr(frame, "values", frame)
    _write_complex(path, "k", values)


def read_frame_csv(path):
    return _read_complex(path)


def write_waveform_csv(path, samples, t=None):
    """Time samples as ``(n, re, im, abs)``; ``t`` replaces ``n`` for oversampled grids."""
    s = np.asarray(samples, dtype=complex)
    n = np.arange(s.size) if t is None else np.asarray(t, dtype=float)
    _write_columns(path, ["n", "re", "im", "abs"], [n, s.real, s.imag, np.abs(s)],
                   int_first=t is None)


def write_profile_csv(path, profile):
    """Fast-path shaping ``W[k]*R0(k+L-s)`` (before normalization), fingerprint on the first line."""
    v = np.asarray(profile.shaping, dtype=complex)
    with open(path, "w") as fh:
        fh.write(f"# fingerprint={profile.fingerprint}\n")
        np.savetxt(fh, np.column_stack([np.arange(v.size), v.real, v.imag]), delimiter=",",
                   header="k,re,im", comments="", fmt=["%d", "%.17g", "%.17g"])


def write_trace_csv(path, trace):
    """Receiver stages (dict of equal-length or shorter arrays) side by side; short columns padded empty."""
    names = list(trace)
    cols = [np.asarray(trace[k]) for k in names]
    header = []
    for name, c in zip(names, cols):
        header += [f"{name}_re", f"{name}_im"] if np.iscomplexobj(c) else [name]
    n = max(c.size for c in cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", *header])
        for i in range(n):
            row = [i]
            for c in cols:
                width = 2 if np.iscomplexobj(c) else 1
                if i < c.size:
                    row += [_fmt(c[i].real), _fmt(c[i].imag)] if width == 2 else [_fmt(c[i])]
                else:
                    row += [""] * width
            w.writerow(row)
