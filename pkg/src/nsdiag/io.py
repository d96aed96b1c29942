"""Run file formats: the native format and the dead-birth text format.

The native format is line-oriented text with shortest-round-trip decimal
floats, so a run survives write/read bit-exactly, live counts and thread
labels included.  The dead-birth format is the whitespace-separated
interchange convention used by constrained samplers: one dead point per
line, parameter columns followed by the log-likelihood and the birth
contour, with prior-born points marked by a sentinel birth value below
every log-likelihood in the file.
"""

import json
import os
import tempfile

import numpy as np

from .errors import BirthChainAmbiguous, BirthContourMissing, FormatVersionError
from .runs import NSRun, validate_run

__all__ = [
    "FORMAT_VERSION",
    "write_native",
    "read_native",
    "save_run",
    "load_run",
    "write_dead_birth",
    "parse_dead_birth",
    "atomic_write",
]

FORMAT_VERSION = 1
_MAGIC = "nsdiag-run"


def write_native(run):
    """Serialize a run to the native text format (exact round trip)."""
    lines = [f"{_MAGIC} {FORMAT_VERSION}"]
    lines.append("meta " + json.dumps(run.meta, default=str, sort_keys=True))
    lines.append(f"npoints {run.n_points} ndims {run.n_dims}")
    for i in range(run.n_points):
        cells = [
            str(int(run.thread_labels[i])),
            str(int(run.nlive[i])),
            repr(float(run.loglike[i])),
            repr(float(run.birth_loglike[i])),
        ]
        cells += [repr(float(v)) for v in run.params[i]]
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def read_native(text):
    """Parse the native text format back into a run.

    Raises
    ------
    FormatVersionError
        If the header declares an unsupported version.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_MAGIC):
        raise ValueError("not a native run file (missing header)")
    version = int(lines[0].split()[1])
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"unsupported format version {version} (supported: {FORMAT_VERSION})"
        )
    if not lines[1].startswith("meta "):
        raise ValueError("missing meta line")
    meta = json.loads(lines[1][5:])
    head = lines[2].split()
    if head[0] != "npoints" or head[2] != "ndims":
        raise ValueError("missing npoints/ndims line")
    n, d = int(head[1]), int(head[3])
    labels = np.empty(n, dtype=np.int64)
    nlive = np.empty(n, dtype=np.int64)
    loglike = np.empty(n)
    birth = np.empty(n)
    params = np.empty((n, d))
    for i in range(n):
        cells = lines[3 + i].split()
        if len(cells) != 4 + d:
            raise ValueError(f"malformed point record on line {4 + i}")
        labels[i] = int(cells[0])
        nlive[i] = int(cells[1])
        loglike[i] = float(cells[2])
        birth[i] = float(cells[3])
        params[i] = [float(v) for v in cells[4:]]
    return NSRun(params, loglike, birth, nlive, labels, meta)


def save_run(run, path):
    """Write a run to ``path`` atomically."""
    atomic_write(path, write_native(run))


def load_run(path, run_id=None):
    """Read a native run file; tags ``meta['run_id']`` (default: file stem)."""
    with open(path) as f:
        run = read_native(f.read())
    if "run_id" not in run.meta:
        stem = os.path.splitext(os.path.basename(path))[0]
        run.meta["run_id"] = run_id if run_id is not None else stem
    return run


def write_dead_birth(run):
    """Serialize a run in the dead-birth interchange format.

    Columns: parameters, log-likelihood, birth contour.  Prior-born points
    keep their ``-inf`` birth, which any reader must treat as the sentinel.
    """
    lines = []
    for i in range(run.n_points):
        cells = [repr(float(v)) for v in run.params[i]]
        cells += [repr(float(run.loglike[i])), repr(float(run.birth_loglike[i]))]
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def parse_dead_birth(text, prior_birth_sentinel=None):
    """Parse dead-birth text into a run.

    Birth values at or below the sentinel map to ``-inf`` (born from the
    prior).  By default the sentinel is the smallest birth value in the
    file, provided it lies strictly below every log-likelihood; pass
    ``prior_birth_sentinel`` to override for files using other conventions.

    Live counts are reconstructed from the birth contours and threads by
    birth chaining.  Tied log-likelihoods, ragged rows and broken birth
    chains are rejected with the offending line number.
    """
    rows = []
    line_numbers = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = [float(v) for v in stripped.split()]
        except ValueError as exc:
            raise ValueError(f"unparseable value on line {lineno}: {exc}") from None
        rows.append(row)
        line_numbers.append(lineno)
    if not rows:
        raise ValueError("no data rows")
    width = len(rows[0])
    if width < 3:
        raise ValueError("need at least one parameter column plus loglike and birth")
    for row, lineno in zip(rows, line_numbers):
        if len(row) != width:
            raise ValueError(
                f"ragged row on line {lineno}: {len(row)} columns, expected {width}"
            )
    data = np.array(rows)
    params, loglike, birth = data[:, :-2], data[:, -2], data[:, -1]

    if prior_birth_sentinel is None:
        bmin = birth.min()
        if bmin < loglike.min():
            prior_birth_sentinel = bmin
        else:
            prior_birth_sentinel = -np.inf
    birth = np.where(birth <= prior_birth_sentinel, -np.inf, birth)

    order = np.argsort(loglike, kind="stable")
    ties = np.flatnonzero(np.diff(loglike[order]) == 0)
    if ties.size:
        i, j = order[ties[0]], order[ties[0] + 1]
        raise ValueError(
            "tied log-likelihoods on lines "
            f"{line_numbers[i]} and {line_numbers[j]}: duplicated points?"
        )
    for i in np.flatnonzero(~(loglike > birth)):
        raise ValueError(
            f"birth contour >= loglike on line {line_numbers[int(i)]}"
        )
    try:
        run = NSRun.from_points(params, loglike, birth)
    except (BirthContourMissing, BirthChainAmbiguous) as exc:
        index = getattr(exc, "point_index", None)
        where = (
            f" (line {line_numbers[int(order[index])]})" if index is not None else ""
        )
        raise type(exc)(f"{exc}{where}") from None
    return run


def atomic_write(path, text):
    """Write text to ``path`` via a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
