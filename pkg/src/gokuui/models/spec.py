"""Architecture description shared by model construction, sizing and checkpoints."""
from dataclasses import asdict, dataclass, field

from ..errors import InvalidArgumentError
from ..sde.oscillators import n_sl_params

VARIANTS = ("goku_basic", "goku_attention", "lstm_baseline", "latent_ode_baseline", "naive")
GOKU_VARIANTS = ("goku_basic", "goku_attention")


def default_param_ranges():
    return {"growth": [-1.0, 1.0], "frequency": [0.0, 1.0], "coupling": [0.0, 0.2]}


@dataclass
class ModelSpec:
    variant: str = "goku_attention"
    input_dim: int = 784
    feature_dim: int = 128
    feature_hidden: int = 200
    latent_hidden: int = 200
    n_oscillators: int = 3
    z_dim: int = None  # baselines; chosen by match_baseline_size when None
    node_hidden_dim: int = None  # latent-ODE field width
    de_param_ranges: dict = field(default_factory=default_param_ranges)
    global_coupling: float = 0.1
    noise_intensity: float = 0.02
    rate_scale: float = 20.0
    noise_scaling: str = "sqrt"  # diffusion sqrt(rate_scale) * beta; "linear" gives rate_scale * beta
    time_step: float = 0.05  # latent time between saved points
    substeps: int = 5  # solver steps per saved point
    stochastic: bool = True
    variational: bool = False
    baseline_size_target: int = None

    def validate(self):
        if self.variant not in VARIANTS:
            raise InvalidArgumentError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        for name in ("input_dim", "feature_dim", "feature_hidden", "latent_hidden", "n_oscillators", "substeps"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgumentError(f"{name} must be positive")
        for name, box in self.de_param_ranges.items():
            if name not in ("growth", "frequency", "coupling"):
                raise InvalidArgumentError(f"unknown parameter box {name!r}")
            if box[0] > box[1]:
                raise InvalidArgumentError(f"parameter box {name}: lo {box[0]} > hi {box[1]}")
        if self.variant == "lstm_baseline" and (self.z_dim is None or self.z_dim < 1):
            raise InvalidArgumentError("lstm_baseline needs z_dim (see match_baseline_size)")
        if self.variant == "latent_ode_baseline" and (
            self.z_dim is None or self.node_hidden_dim is None or self.z_dim < 1 or self.node_hidden_dim < 1
        ):
            raise InvalidArgumentError("latent_ode_baseline needs z_dim and node_hidden_dim")
        return self

    @property
    def is_goku(self):
        return self.variant in GOKU_VARIANTS

    @property
    def de_state_dim(self):
        return 2 * self.n_oscillators if self.is_goku else self.z_dim

    @property
    def n_de_params(self):
        return n_sl_params(self.n_oscillators) if self.is_goku else 0

    @property
    def attention(self):
        return self.variant == "goku_attention"

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidArgumentError(f"unknown model keys: {sorted(unknown)}")
        return cls(**d)
