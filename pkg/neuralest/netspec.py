"""
Layer tables of the SF-CNN, SFT-CNN and SPR-CNN estimators.

Responsibilities:
- LayerSpec / NetSpec: validated, JSON-serializable description of a zero-padded CNN
- The 10-layer reference table (64 hidden maps, 3x3 filters, tanh output)
- build_net: adapt the reference table to Q subcarriers and the number of input intervals
- Multiplication counts of the network and of the full TE + CNN pipeline
"""

from dataclasses import asdict, dataclass, replace

from neuralest import neuralest_params as params
from pilotfront.front_end import flops_te
from pilotfront.pilot_config import PilotConfig
from utils.errors import InvalidArgumentError

NETSPEC_SCHEMA = "netspec/1"
KINDS = ("sf", "sft", "spr")
ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class LayerSpec:
    filter_side: int
    in_maps: int
    out_maps: int
    activation: str
    batch_norm: bool

    def __post_init__(self):
        if self.filter_side < 1 or self.filter_side % 2 == 0:
            raise InvalidArgumentError(
                f"filter_side must be a positive odd number for same-size padding, got {self.filter_side}"
            )
        if self.in_maps < 1 or self.out_maps < 1:
            raise InvalidArgumentError(f"feature map counts must be >= 1, got {self}")
        if self.activation not in ACTIVATIONS:
            raise InvalidArgumentError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")


@dataclass(frozen=True)
class NetSpec:
    """
    kind: 'sf', 'sft' or 'spr'. depth: 1 for sf, S for sft, d (interval index in the CEU) for spr.
    """

    kind: str
    q: int
    depth: int
    layers: tuple[LayerSpec, ...]
    spatial_shape: tuple[int, int]
    scale_c: float = params.SCALE_C

    def __post_init__(self):
        self.validate()

    @property
    def input_maps(self) -> int:
        return self.layers[0].in_maps

    @property
    def output_maps(self) -> int:
        return self.layers[-1].out_maps

    @property
    def input_matrices(self) -> int:
        """Complex matrices consumed per sample: Q per interval stack."""
        return self.q * self.depth

    @property
    def name(self) -> str:
        return f"spr-{self.depth}" if self.kind == "spr" else self.kind

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.q < 1 or self.depth < 1:
            raise InvalidArgumentError(f"q and depth must be >= 1, got q={self.q}, depth={self.depth}")
        if self.kind == "sf" and self.depth != 1:
            raise InvalidArgumentError(f"sf networks have depth 1, got {self.depth}")
        if not self.layers:
            raise InvalidArgumentError("NetSpec needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_maps != nxt.in_maps:
                raise InvalidArgumentError(
                    f"layer maps do not chain: {prev.out_maps} -> {nxt.in_maps}"
                )
        if self.layers[-1].activation != "tanh":
            raise InvalidArgumentError("the output layer must use tanh")
        if any(layer.activation != "relu" for layer in self.layers[:-1]):
            raise InvalidArgumentError("hidden layers must use relu")
        if self.input_maps != 2 * self.input_matrices:
            raise InvalidArgumentError(
                f"input_maps {self.input_maps} != 2 * q * depth = {2 * self.input_matrices}"
            )
        if self.output_maps != 2 * self.q:
            raise InvalidArgumentError(f"output_maps {self.output_maps} != 2 * q = {2 * self.q}")
        if len(self.spatial_shape) != 2 or min(self.spatial_shape) < 1:
            raise InvalidArgumentError(f"spatial_shape must be (N_R, N_T), got {self.spatial_shape}")
        if not (self.scale_c > 0):
            raise InvalidArgumentError(f"scale_c must be > 0, got {self.scale_c}")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["layers"] = [asdict(layer) for layer in self.layers]
        data["spatial_shape"] = list(self.spatial_shape)
        return {"schema": NETSPEC_SCHEMA, **data}

    @classmethod
    def from_dict(cls, data: dict) -> "NetSpec":
        if data.get("schema") != NETSPEC_SCHEMA:
            raise InvalidArgumentError(
                f"Unsupported netspec schema {data.get('schema')!r}, expected {NETSPEC_SCHEMA!r}"
            )
        return cls(
            kind=data["kind"],
            q=int(data["q"]),
            depth=int(data["depth"]),
            layers=tuple(LayerSpec(**layer) for layer in data["layers"]),
            spatial_shape=tuple(data["spatial_shape"]),
            scale_c=float(data["scale_c"]),
        )


def reference_spec(
    q: int = 2,
    spatial_shape: tuple[int, int] = (16, 32),
    n_layers: int = params.N_CONV_LAYERS,
    hidden_maps: int = params.HIDDEN_MAPS,
    filter_side: int = params.FILTER_SIDE,
    scale_c: float = params.SCALE_C,
) -> NetSpec:
    """
    SF-CNN layer table: n_layers zero-padded convolutions, ReLU + BN on hidden layers,
    tanh output. Defaults give 2q -> 64 -> ... -> 64 -> 2q with 3x3 filters.
    """
    if n_layers < 2:
        raise InvalidArgumentError(f"n_layers must be >= 2, got {n_layers}")
    layers = [LayerSpec(filter_side, 2 * q, hidden_maps, "relu", True)]
    layers += [LayerSpec(filter_side, hidden_maps, hidden_maps, "relu", True) for _ in range(n_layers - 2)]
    layers.append(LayerSpec(filter_side, hidden_maps, 2 * q, "tanh", False))
    return NetSpec(
        kind="sf",
        q=q,
        depth=1,
        layers=tuple(layers),
        spatial_shape=tuple(spatial_shape),
        scale_c=scale_c,
    )


def parse_kind(kind: str) -> tuple[str, int | None]:
    """'sf' -> ('sf', None); 'spr-3' -> ('spr', 3)."""
    if kind.startswith("spr-"):
        try:
            return "spr", int(kind.split("-", 1)[1])
        except ValueError as e:
            raise InvalidArgumentError(f"bad SPR network kind {kind!r}") from e
    if kind not in KINDS:
        raise InvalidArgumentError(f"network kind must be sf, sft or spr-<d>, got {kind!r}")
    return kind, None


def build_net(kind: str, q: int, s_or_d: int = 1, base: NetSpec | None = None) -> NetSpec:
    """
    Adapt a template layer table to an estimator family.
    Args:
        kind (str): 'sf', 'sft', 'spr' or 'spr-<d>'.
        q (int): Number of adjacent subcarriers Q.
        s_or_d (int): S for sft, interval index d for spr (ignored for sf or 'spr-<d>').
        base (NetSpec, optional): Template; defaults to the reference table.
    Returns:
        NetSpec: first layer takes 2*q*depth maps, last layer emits 2*q maps.
    """
    family, parsed_depth = parse_kind(kind)
    if q < 1:
        raise InvalidArgumentError(f"q must be >= 1, got {q}")
    depth = 1 if family == "sf" else (parsed_depth or s_or_d)
    base = base or reference_spec(q=q)
    layers = list(base.layers)
    layers[0] = replace(layers[0], in_maps=2 * q * depth)
    layers[-1] = replace(layers[-1], out_maps=2 * q)
    if len(layers) == 1:
        layers[0] = replace(layers[0], in_maps=2 * q * depth, out_maps=2 * q)
    return NetSpec(
        kind=family,
        q=q,
        depth=depth,
        layers=tuple(layers),
        spatial_shape=base.spatial_shape,
        scale_c=base.scale_c,
    )


def flops_layers(layers, spatial_shape) -> int:
    """
    sum over layers of M1 * M2 * F_l^2 * N_{l-1} * N_l (feature maps keep the input size).
    """
    m1, m2 = spatial_shape
    return sum(m1 * m2 * layer.filter_side**2 * layer.in_maps * layer.out_maps for layer in layers)


def flops_cnn(spec: NetSpec) -> int:
    return flops_layers(spec.layers, spec.spatial_shape)


def flops_cnn_total(spec: NetSpec, pc: PilotConfig) -> int:
    """TE lift of the current Q subcarriers plus one network pass; cached TE stacks cost nothing."""
    return flops_te(pc, q=spec.q) + flops_cnn(spec)
