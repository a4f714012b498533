"""Experiment configuration: a flat dataclass that round-trips through JSON."""

from dataclasses import asdict, dataclass, fields, replace
import json
import math

from .numeric import ConfigurationError

ALGORITHMS = ("csi", "som", "ircsi", "irsom")


@dataclass(frozen=True)
class ExperimentConfig:
    kappa: float = 6.0
    J: int = 16
    Q: int = 16
    N_synth: int = 128
    N_inv: int = 32
    algorithm: str = "ircsi"
    beta: float = 0.0
    gamma: float | None = None  # None: beta / N_inv
    L: float | None = None  # None: N_inv
    L_alpha: int = 10
    noise_rel: float = 0.05
    seed: int = 0
    max_iters: int = 5000
    use_termination: bool = True
    eta_overrides: dict | None = None  # {"eta_s": x, "eta_d": y}
    # "bump", "digit:<d>" for a bundled raster, or a path to a binary PGM;
    # rasters are stretched over the whole region [-2, 2]^2
    phantom: str = "bump"
    phantom_scale: float = 1.0
    allow_same_grid: bool = False
    output_dir: str = "runs/default"

    @property
    def gamma_eff(self):
        return self.beta / self.N_inv if self.gamma is None else self.gamma

    @property
    def L_eff(self):
        return float(self.N_inv) if self.L is None else self.L

    @property
    def eps(self):
        return max(self.gamma_eff * self.L_eff, self.beta)

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        for name in ("J", "Q", "N_synth", "N_inv", "L_alpha"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be a positive integer")
        if self.max_iters < 0:
            raise ConfigurationError("max_iters must be nonnegative")
        for name in ("kappa",):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("beta", "noise_rel", "phantom_scale"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be finite and nonnegative")
        if not self.gamma_eff >= 0 or not self.L_eff >= 0:
            raise ConfigurationError("gamma and L must be nonnegative")
        if self.algorithm in ("som", "irsom") and self.L_alpha > min(self.Q, self.N_inv ** 2):
            raise ConfigurationError(f"L_alpha={self.L_alpha} exceeds the far-field rank bound")
        if self.eta_overrides is not None:
            extra = set(self.eta_overrides) - {"eta_s", "eta_d"}
            if extra:
                raise ConfigurationError(f"unknown weight override keys: {sorted(extra)}")
        return self

    @property
    def is_original(self):
        return self.algorithm in ("csi", "som")

    def solver_params(self):
        """``(gamma, beta, L)`` actually passed to the solver."""
        if self.is_original:
            return 0.0, 0.0, self.L_eff
        return self.gamma_eff, self.beta, self.L_eff

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def override(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def config_from_dict(d):
    names = {f.name for f in fields(ExperimentConfig)}
    unknown = set(d) - names
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**d).validate()


def load_config(path):
    with open(path) as fh:
        return config_from_dict(json.load(fh))
