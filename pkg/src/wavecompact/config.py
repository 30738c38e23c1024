"""Experiment configuration: JSON schema, validation, descriptor round trips.

A config file is a single JSON object:

    {
      "kind": "solve" | "converge" | "sharpness" | "oracle_check" | "stability_probe",
      "mesh": {"X": ..., "T": ..., "N": ..., "M": ...,          # M may instead
               "tau_over_h": ...,                               # be derived
               "refinements": 0, "a": 1.0, "eps0": 1.0,
               "rungs": [[N1, M1], [N2, M2], ...]},             # optional, overrides N/M
      "data": {"harmonic": {"j": 0, "k": 3}}
              | {"preset": "hat_step"}
              | {"u0": {...}, "u1": {...}, "f": {...}}
              | null,
      "variant": "v2" | "v0" | "v1" | "all",
      "v0_mode": "node_samples" | "qh_average",
      "mode": "node_sampled" | "q2h_filtered",
      "norms": ["energy", "dx", "l1"],
      "alpha": 2.0,
      "out_dir": "out",
      ...tuning keys with defaults (seed, n_random, n_pairs, fold_groups,
         fit_drop_coarsest, tail_fraction, jobs, decimate)
    }

Profile dictionaries use the forms of data.Profile; "callable" cannot appear
in a file.  Every ladder rung must satisfy the stability condition; a rung
that violates it raises UnstableMeshError (CLI exit code 2), while malformed
configuration raises ConfigurationError (exit code 3).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .data import DataSpec, Forcing, Profile, TimeProfile
from .errors import ConfigurationError
from .grid import MeshSpec, build_mesh
from .oracle import HarmonicData

KINDS = ("solve", "converge", "sharpness", "oracle_check", "stability_probe")


# --------------------------------------------------------------------------
# descriptor (de)serialization

def profile_from_dict(d: dict, X: float) -> Profile:
    if not isinstance(d, dict) or "form" not in d:
        raise ConfigurationError(f"profile must be an object with a 'form' key, got {d!r}")
    form = d["form"]
    if form == "harmonic":
        return Profile.harmonic_mode(int(d["k"]), X)
    if form == "sine_series":
        return Profile.sine_series(d.get("coeffs", ()), X,
                                   decay_exponent=d.get("decay_exponent"))
    if form == "piecewise":
        return Profile.piecewise_poly(d["breakpoints"], d["pieces"],
                                      node_convention=d.get("node_convention", "mean"),
                                      decay_exponent=d.get("decay_exponent"))
    if form == "callable":
        raise ConfigurationError("callable profiles cannot be configured from a file")
    raise ConfigurationError(f"unknown profile form {form!r}")


def profile_to_dict(p: Profile) -> dict:
    if p.form == "harmonic":
        return {"form": "harmonic", "k": p.k}
    if p.form == "sine_series":
        return {"form": "sine_series", "coeffs": list(p.coeffs),
                "decay_exponent": p.decay_exponent}
    if p.form == "piecewise":
        return {"form": "piecewise", "breakpoints": list(p.breakpoints),
                "pieces": [list(c) for c in p.pieces],
                "node_convention": p.node_convention,
                "decay_exponent": p.decay_exponent}
    raise ConfigurationError("callable profiles cannot be serialized")


def time_profile_from_dict(d: dict) -> TimeProfile:
    form = d.get("form")
    if form == "harmonic_sin":
        return TimeProfile.harmonic_sin(float(d["omega"]))
    if form == "polynomial":
        return TimeProfile.polynomial(d.get("coeffs", ()))
    raise ConfigurationError(f"unknown or unserializable time profile form {form!r}")


def time_profile_to_dict(g: TimeProfile) -> dict:
    if g.form == "harmonic_sin":
        return {"form": "harmonic_sin", "omega": g.omega}
    if g.form == "polynomial":
        return {"form": "polynomial", "coeffs": list(g.coeffs)}
    raise ConfigurationError("callable time profiles cannot be serialized")


def dataspec_from_dict(d: dict, X: float) -> DataSpec:
    try:
        u0 = profile_from_dict(d["u0"], X) if d.get("u0") else Profile.zero(X)
        u1 = profile_from_dict(d["u1"], X) if d.get("u1") else Profile.zero(X)
    except KeyError as exc:
        raise ConfigurationError(f"missing data key: {exc}") from exc
    f = None
    if d.get("f"):
        fd = d["f"]
        f = Forcing(space=profile_from_dict(fd["space"], X),
                    time=time_profile_from_dict(fd["time"]))
    return DataSpec(u0=u0, u1=u1, f=f)


def dataspec_to_dict(spec: DataSpec) -> dict:
    out = {"u0": profile_to_dict(spec.u0), "u1": profile_to_dict(spec.u1)}
    if spec.f is not None:
        out["f"] = {"space": profile_to_dict(spec.f.space),
                    "time": time_profile_to_dict(spec.f.time)}
    return out


# --------------------------------------------------------------------------
# the experiment config

@dataclass
class ExperimentConfig:
    kind: str
    rungs: list[MeshSpec]
    data: DataSpec | None = None
    harmonic: HarmonicData | None = None
    preset: str | None = None
    sharpness_j: int | None = None
    variant: str = "v2"
    v0_mode: str = "node_samples"
    mode: str = "node_sampled"
    norms: tuple[str, ...] = ("energy", "dx", "l1")
    alpha: float = 2.0
    out_dir: Path = Path("out")
    jobs: int = 1
    seed: int = 0
    n_random: int = 20
    n_pairs: int = 100
    fold_groups: int = 64
    n_modes: int | None = None
    fit_drop_coarsest: int = 1
    tail_fraction: float = 0.01
    decimate: int = 32
    echo: dict = field(default_factory=dict)

    def validated(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigurationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.rungs:
            raise ConfigurationError("the mesh ladder is empty")
        if self.kind == "converge" and len(self.rungs) < 3:
            raise ConfigurationError("convergence studies need a ladder of >= 3 rungs")
        if self.variant not in ("v0", "v1", "v2", "all"):
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        if self.mode not in ("node_sampled", "q2h_filtered"):
            raise ConfigurationError(f"unknown error mode {self.mode!r}")
        if self.v0_mode not in ("node_samples", "qh_average"):
            raise ConfigurationError(f"unknown v0 mode {self.v0_mode!r}")
        bad_norms = set(self.norms) - {"energy", "dx", "l1"}
        if bad_norms:
            raise ConfigurationError(f"unknown norms requested: {sorted(bad_norms)}")
        if self.kind == "sharpness" and self.sharpness_j is None:
            raise ConfigurationError("sharpness runs need data: {'harmonic': {'j': ...}}")
        if self.kind == "oracle_check" and self.harmonic is None:
            raise ConfigurationError("oracle checks need harmonic data")
        for mesh in self.rungs:
            from .grid import check_stable
            check_stable(mesh)
        return self


def _build_rungs(mesh_cfg: dict) -> list[MeshSpec]:
    try:
        X = float(mesh_cfg["X"])
        T = float(mesh_cfg["T"])
    except KeyError as exc:
        raise ConfigurationError(f"mesh section is missing {exc}") from exc
    a = float(mesh_cfg.get("a", 1.0))
    eps0 = float(mesh_cfg.get("eps0", 1.0))

    def one(N: int, M: int) -> MeshSpec:
        return build_mesh(X, T, N, M, a, eps0)

    if "rungs" in mesh_cfg:
        pairs = mesh_cfg["rungs"]
        if not pairs:
            raise ConfigurationError("mesh.rungs must not be empty")
        return [one(int(n), int(m)) for n, m in pairs]

    if "N" not in mesh_cfg:
        raise ConfigurationError("mesh section needs N (or explicit rungs)")
    N = int(mesh_cfg["N"])
    if "M" in mesh_cfg:
        M = int(mesh_cfg["M"])
    elif "tau_over_h" in mesh_cfg:
        ratio = float(mesh_cfg["tau_over_h"])
        m_exact = T * N / (ratio * X)
        M = round(m_exact)
        if abs(m_exact - M) > 1e-9 * max(1.0, abs(m_exact)):
            raise ConfigurationError(
                f"tau_over_h = {ratio} gives a non-integer M = {m_exact}")
    else:
        raise ConfigurationError("mesh section needs M or tau_over_h")
    refinements = int(mesh_cfg.get("refinements", 0))
    return [one(N * 2 ** r, M * 2 ** r) for r in range(refinements + 1)]


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigurationError(f"kind must be one of {KINDS}, got {kind!r}")
    mesh_cfg = raw.get("mesh")
    if not isinstance(mesh_cfg, dict):
        raise ConfigurationError("config needs a 'mesh' object")
    rungs = _build_rungs(mesh_cfg)
    X = rungs[0].X

    data_cfg = raw.get("data")
    data = harmonic = preset = None
    sharpness_j = None
    if data_cfg is None:
        data = DataSpec(u0=Profile.zero(X), u1=Profile.zero(X))
    elif not isinstance(data_cfg, dict):
        raise ConfigurationError("'data' must be an object or null")
    elif "harmonic" in data_cfg:
        hc = data_cfg["harmonic"]
        j = int(hc.get("j", 0))
        if kind == "sharpness":
            sharpness_j = j
            if j not in (0, 1, 2):
                raise ConfigurationError("harmonic j must be 0, 1 or 2")
        else:
            try:
                harmonic = HarmonicData(j=j, k=int(hc.get("k", 1)))
            except ValueError as exc:
                raise ConfigurationError(f"invalid harmonic data: {exc}") from exc
    elif "preset" in data_cfg:
        preset = str(data_cfg["preset"])
    else:
        data = dataspec_from_dict(data_cfg, X)

    cfg = ExperimentConfig(
        kind=kind,
        rungs=rungs,
        data=data,
        harmonic=harmonic,
        preset=preset,
        sharpness_j=sharpness_j,
        variant=str(raw.get("variant", "v2")),
        v0_mode=str(raw.get("v0_mode", "node_samples")),
        mode=str(raw.get("mode", "node_sampled")),
        norms=tuple(raw.get("norms", ("energy", "dx", "l1"))),
        alpha=float(raw.get("alpha", 2.0)),
        out_dir=Path(raw.get("out_dir", "out")),
        jobs=int(raw.get("jobs", 1)),
        seed=int(raw.get("seed", 0)),
        n_random=int(raw.get("n_random", 20)),
        n_pairs=int(raw.get("n_pairs", 100)),
        fold_groups=int(raw.get("fold_groups", 64)),
        n_modes=raw.get("n_modes"),
        fit_drop_coarsest=int(raw.get("fit_drop_coarsest", 1)),
        tail_fraction=float(raw.get("tail_fraction", 0.01)),
        decimate=int(raw.get("decimate", 32)),
        echo=dict(raw),
    )
    return cfg.validated()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
    return config_from_dict(raw)
