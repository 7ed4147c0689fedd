"""Steering vectors, random multipath channel generation, dataset persistence.

The array is a half-wavelength uniform linear array with ``N`` elements, so
the response toward angle theta is ``exp(1j * n * pi * sin(theta))`` for
``n = 0..N-1``. Downlink channels are a sparse multipath sum: ``L`` paths per
user, i.i.d. complex-normal path gains, path angles uniform over the angular
range, scaled by ``sqrt(N / L)``. The per-user rows of the stored matrix are
the conjugated channel vectors, so ``matrix[k] @ x`` is the received symbol
of user ``k`` for a transmit vector ``x``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._io import read_container, unpack_complex, write_container

DATASET_FORMAT = "chanset-v1"


def steering_vector(theta_deg: float, n_antennas: int) -> np.ndarray:
    """Array response toward ``theta_deg`` (broadside at 0, endfire at +-90)."""
    if not -90.0 <= theta_deg <= 90.0:
        raise ValueError(f"angle must lie in [-90, 90] degrees, got {theta_deg}")
    if n_antennas < 1:
        raise ValueError("need at least one antenna")
    phase = np.pi * np.sin(np.deg2rad(theta_deg))
    return np.exp(1j * phase * np.arange(n_antennas))


@dataclass(frozen=True)
class ChannelModel:
    """Multipath stand-in: path count and the half-width of the angle range."""

    paths: int = 10
    angle_spread: float = 90.0

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError("need at least one path")
        if not 0.0 < self.angle_spread <= 90.0:
            raise ValueError("angle_spread must lie in (0, 90] degrees")


@dataclass(frozen=True)
class ChannelSet:
    """K user channels over an N-element array, rows are conjugated channels."""

    matrix: np.ndarray
    seed: int
    model: ChannelModel = field(default_factory=ChannelModel)

    @property
    def n_users(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.matrix.shape[1]


def gen_channels(n_users: int, n_antennas: int, model: ChannelModel = ChannelModel(),
                 seed: int = 0) -> ChannelSet:
    """Draw one channel realization; bit-identical for identical arguments."""
    if n_users < 1:
        raise ValueError("need at least one user")
    if n_antennas < n_users:
        raise ValueError(f"need n_antennas >= n_users, got {n_antennas} < {n_users}")
    rng = np.random.default_rng(seed)
    l = model.paths
    angles = rng.uniform(-model.angle_spread, model.angle_spread, size=(n_users, l))
    gains = (rng.standard_normal((n_users, l)) + 1j * rng.standard_normal((n_users, l)))
    gains *= np.sqrt(0.5)
    # response[k, l, :] = steering vector of path l of user k
    phases = np.pi * np.sin(np.deg2rad(angles))
    response = np.exp(1j * phases[:, :, None] * np.arange(n_antennas)[None, None, :])
    h = np.sqrt(n_antennas / l) * np.einsum("kl,kln->kn", gains, response)
    return ChannelSet(matrix=h.conj(), seed=int(seed), model=model)


def save_dataset(path, channels) -> None:
    """Write channel sets to the binary container; entries round-trip exactly."""
    header = {
        "format": DATASET_FORMAT,
        "sets": [
            {
                "n_users": cs.n_users,
                "n_antennas": cs.n_antennas,
                "seed": cs.seed,
                "paths": cs.model.paths,
                "angle_spread": cs.model.angle_spread,
            }
            for cs in channels
        ],
    }
    write_container(path, header, (cs.matrix for cs in channels))


def load_dataset(path):
    """Inverse of save_dataset."""
    header, buf = read_container(path, DATASET_FORMAT)
    out = []
    offset = 0
    for meta in header["sets"]:
        k, n = meta["n_users"], meta["n_antennas"]
        nbytes = 16 * k * n
        matrix = unpack_complex(buf[offset:offset + nbytes], (k, n))
        offset += nbytes
        model = ChannelModel(paths=meta["paths"], angle_spread=meta["angle_spread"])
        out.append(ChannelSet(matrix=matrix, seed=meta["seed"], model=model))
    return out
