"""Run directories: plot-ready CSV files and a hashed manifest."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
from pathlib import Path

from . import __version__
from .solver import trace_rows
from .spectral import write_grid_csv

MANIFEST = "manifest.json"


def _fmt(v):
    return f"{v:.17g}"


def write_text(path, text):
    """UTF-8, LF line endings."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_json(path, obj):
    write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def snapshot_indices(n_states, every):
    """Every ``every``-th state and the last one; none when ``every`` is 0."""
    if every <= 0 or n_states == 0:
        return []
    idx = list(range(0, n_states, every))
    if idx[-1] != n_states - 1:
        idx.append(n_states - 1)
    return idx


def emit_plotdata(traj, out_dir, snapshot_every=0):
    """Write ``trace.csv`` and the selected ``snapshot_XXXX.csv`` files.

    Returns the written file names. Output is byte-identical for identical
    trajectories.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["t,max_u,l2,hs,h_used"]
    lines += [",".join(_fmt(v) for v in row) for row in trace_rows(traj)]
    write_text(out / "trace.csv", "\n".join(lines) + "\n")
    names = ["trace.csv"]
    for i in snapshot_indices(len(traj), snapshot_every):
        name = f"snapshot_{i:04d}.csv"
        try:
            write_grid_csv(out / name, traj.states[i])
        except OSError as exc:
            raise OSError(f"cannot write {out / name}: {exc.strerror}") from exc
        names.append(name)
    return names


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def content_hash(files):
    """Digest over ``name  sha256`` lines in name order."""
    h = hashlib.sha256()
    for name in sorted(files):
        h.update(f"{name}  {files[name]}\n".encode())
    return h.hexdigest()


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


class RunManifest:
    """Manifest of one run directory; :meth:`finalize` hashes every other file."""

    def __init__(self, out_dir, command, config_echo, seed=None):
        self.out_dir = Path(out_dir)
        self.data = {"tool_version": __version__, "command": command,
                     "config_echo": config_echo, "seed": seed, "started": _now(),
                     "finished": None, "status": "running", "files": {}, "content_hash": None}

    def finalize(self, status, summary=None):
        files = {}
        for path in sorted(self.out_dir.iterdir()):
            if path.is_file() and path.name != MANIFEST:
                files[path.name] = file_digest(path)
        self.data.update(finished=_now(), status=status, files=files,
                         content_hash=content_hash(files))
        if summary is not None:
            self.data["summary"] = summary
        write_json(self.out_dir / MANIFEST, self.data)
        return self.data


def verify_manifest(out_dir):
    """Names of files that are missing, extra or modified since the manifest."""
    out = Path(out_dir)
    with open(out / MANIFEST, encoding="utf-8") as fh:
        data = json.load(fh)
    recorded = data.get("files", {})
    present = {p.name for p in out.iterdir() if p.is_file() and p.name != MANIFEST}
    problems = sorted(present.symmetric_difference(recorded))
    for name in sorted(present & set(recorded)):
        if file_digest(out / name) != recorded[name]:
            problems.append(name)
    if content_hash(recorded) != data.get("content_hash"):
        problems.append(MANIFEST)
    return problems


def default_out_dir():
    stamp = _dt.datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    return os.path.join("runs", stamp)
