"""YAML run configuration: schema, defaults and validation.

Canonical document (every key except the first four is optional)::

    alpha: 0.7
    s: 0.6
    lengths: [0.3]
    reaction: {kind: inverse_power, c: 1.0, p: 1.0}
    dim: 1                      # inferred from lengths
    scale: 1.0
    modes: 128
    u0: {kind: zero}            # or {kind: mode, amplitude: 0.5, mode: [1]}
    h: 0.001
    t_max: 1.0
    quench_eps: null            # 1e-3 * c
    h_min: 1.0e-10
    snapshot_every: 0
    out_dir: null
    steady: {tol: 1.0e-9, max_iter: 100000}
"""

from __future__ import annotations

import copy
import math

import numpy as np
import yaml

from .reaction import KINDS, ReactionSpec
from .solver import SolveConfig
from .spectral import DomainSpec, FractionalParams, SpectralField, build_basis

U0_CONSTRAINT = "0 <= u0 << c"

_TOP_KEYS = {"alpha", "s", "dim", "lengths", "scale", "modes", "reaction", "u0", "h", "t_max",
             "quench_eps", "h_min", "snapshot_every", "out_dir", "steady"}
_REACTION_KEYS = {"kind", "c", "p", "f_max_cutoff"}
_U0_KEYS = {"kind", "amplitude", "mode"}
_STEADY_KEYS = {"tol", "max_iter"}
_REQUIRED = ("alpha", "s", "lengths", "reaction")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _number(value, path):
    # PyYAML reads "1e-3" as a string, so numeric strings are accepted
    if isinstance(value, bool):
        raise ConfigError(path, "expected a number")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(path, "must be finite")
    return out


def _integer(value, path):
    num = _number(value, path)
    if num != int(num):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return int(num)


def _check_keys(doc, allowed, prefix):
    if not isinstance(doc, dict):
        raise ConfigError(prefix or "<root>", "expected a mapping")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        where = f"{prefix}.{unknown[0]}" if prefix else unknown[0]
        raise ConfigError(where, "unknown key")


def resolve(doc):
    """Validated document with every default filled in."""
    doc = copy.deepcopy(doc or {})
    _check_keys(doc, _TOP_KEYS, "")
    for key in _REQUIRED:
        if key not in doc:
            raise ConfigError(key, "required key missing")
    out = {}
    out["alpha"] = _number(doc["alpha"], "alpha")
    if not 0 < out["alpha"] <= 1:
        raise ConfigError("alpha", f"must lie in (0, 1], got {out['alpha']}")
    out["s"] = _number(doc["s"], "s")
    if not 0 < out["s"] <= 1:
        raise ConfigError("s", f"must lie in (0, 1], got {out['s']}")
    lengths = doc["lengths"]
    if not isinstance(lengths, (list, tuple)):
        lengths = [lengths]
    out["lengths"] = [_number(v, f"lengths[{i}]") for i, v in enumerate(lengths)]
    if any(v <= 0 for v in out["lengths"]):
        raise ConfigError("lengths", "must be positive")
    out["dim"] = _integer(doc.get("dim", len(out["lengths"])), "dim")
    if out["dim"] not in (1, 2):
        raise ConfigError("dim", "must be 1 or 2")
    if len(out["lengths"]) != out["dim"]:
        raise ConfigError("lengths", f"expected {out['dim']} entries")
    out["scale"] = _number(doc.get("scale", 1.0), "scale")
    if out["scale"] <= 0:
        raise ConfigError("scale", "must be positive")
    out["modes"] = _integer(doc.get("modes", 128), "modes")
    if out["modes"] < 4:
        raise ConfigError("modes", "must be >= 4")

    rdoc = doc["reaction"]
    _check_keys(rdoc, _REACTION_KEYS, "reaction")
    kind = rdoc.get("kind", "inverse_power")
    if kind not in KINDS:
        raise ConfigError("reaction.kind", f"must be one of {', '.join(KINDS)}")
    react = {"kind": kind,
             "c": _number(rdoc.get("c", 1.0), "reaction.c"),
             "p": _number(rdoc.get("p", 1.0), "reaction.p"),
             "f_max_cutoff": _number(rdoc.get("f_max_cutoff", 1e12), "reaction.f_max_cutoff")}
    if react["c"] <= 0:
        raise ConfigError("reaction.c", "must be positive")
    if kind in ("inverse_power", "exponential_singular") and react["p"] <= 0:
        raise ConfigError("reaction.p", "must be positive")
    out["reaction"] = react
    c = react["c"]

    u0 = doc.get("u0", {"kind": "zero"})
    if u0 in (None, 0, "zero"):
        u0 = {"kind": "zero"}
    _check_keys(u0, _U0_KEYS, "u0")
    ukind = u0.get("kind", "zero")
    if ukind == "zero":
        out["u0"] = {"kind": "zero"}
    elif ukind == "mode":
        amp = _number(u0.get("amplitude", 0.0), "u0.amplitude")
        mode = u0.get("mode", [1] * out["dim"])
        if not isinstance(mode, (list, tuple)):
            mode = [mode]
        mode = [_integer(m, f"u0.mode[{i}]") for i, m in enumerate(mode)]
        if len(mode) != out["dim"] or any(m < 1 or m > out["modes"] for m in mode):
            raise ConfigError("u0.mode", f"need {out['dim']} indices in 1..modes")
        if amp < 0:
            raise ConfigError("u0.amplitude", f"must be non-negative ({U0_CONSTRAINT})")
        if amp >= c:
            raise ConfigError("u0.amplitude",
                              f"amplitude {amp} must stay below c = {c} ({U0_CONSTRAINT})")
        if amp > 0 and any(m != 1 for m in mode):
            raise ConfigError("u0.mode", f"higher modes change sign ({U0_CONSTRAINT})")
        out["u0"] = {"kind": "mode", "amplitude": amp, "mode": mode}
    else:
        raise ConfigError("u0.kind", "must be zero or mode")

    out["h"] = _number(doc.get("h", 1e-3), "h")
    out["t_max"] = _number(doc.get("t_max", 1.0), "t_max")
    qe = doc.get("quench_eps")
    out["quench_eps"] = 1e-3 * c if qe is None else _number(qe, "quench_eps")
    out["h_min"] = _number(doc.get("h_min", 1e-10), "h_min")
    out["snapshot_every"] = _integer(doc.get("snapshot_every", 0), "snapshot_every")
    if not out["h"] > out["h_min"] > 0:
        raise ConfigError("h", "need h > h_min > 0")
    if out["t_max"] <= 0:
        raise ConfigError("t_max", "must be positive")
    if not 0 < out["quench_eps"] < c:
        raise ConfigError("quench_eps", "must lie in (0, c)")
    if out["snapshot_every"] < 0:
        raise ConfigError("snapshot_every", "must be >= 0")
    od = doc.get("out_dir")
    out["out_dir"] = None if od is None else str(od)

    sdoc = doc.get("steady", {}) or {}
    _check_keys(sdoc, _STEADY_KEYS, "steady")
    out["steady"] = {"tol": _number(sdoc.get("tol", 1e-9), "steady.tol"),
                     "max_iter": _integer(sdoc.get("max_iter", 100000), "steady.max_iter")}
    if out["steady"]["tol"] <= 0:
        raise ConfigError("steady.tol", "must be positive")
    return out


def _initial_field(basis, u0):
    if u0["kind"] == "zero":
        return basis.zeros()
    # amplitude * prod sin(n pi x / L), so the maximum equals the amplitude
    coeffs = np.zeros(basis.shape)
    idx = tuple(m - 1 for m in reversed(u0["mode"]))
    coeffs[idx] = u0["amplitude"] / math.prod(math.sqrt(2.0 / L) for L in basis.lengths)
    return SpectralField(coeffs, basis)


def build_config(resolved):
    """:class:`SolveConfig` from a resolved document."""
    domain = DomainSpec(resolved["dim"], tuple(resolved["lengths"]), resolved["modes"],
                        resolved["scale"])
    params = FractionalParams(resolved["alpha"], resolved["s"])
    reaction = ReactionSpec(**resolved["reaction"])
    basis = build_basis(domain, params)
    cfg = SolveConfig(domain, params, reaction, _initial_field(basis, resolved["u0"]),
                      h=resolved["h"], t_max=resolved["t_max"],
                      quench_eps=resolved["quench_eps"], h_min=resolved["h_min"],
                      snapshot_every=resolved["snapshot_every"], basis=basis)
    return cfg


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"not valid YAML: {exc}") from None


def parse_config(path):
    """Validated :class:`SolveConfig` from a YAML file."""
    return build_config(resolve(load_document(path)))


def dump_resolved(resolved):
    """YAML text of a resolved document; parsing it again is lossless."""
    return yaml.safe_dump(resolved, sort_keys=True, default_flow_style=False)
