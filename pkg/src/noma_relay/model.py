"""System model: parameters, path loss, channel realizations, and the
effective channels seen through the relay's receive filter.

Geometry: a source with ``m`` antennas serves two single-antenna-equivalent
links — a strong user that also acts as a wireless-powered decode-and-forward
relay (``n`` receive antennas, power-splitting harvester) and a weak user.
Transmission spans two equal-length phases: the source beamforms both data
streams in phase one; the relay retransmits the weak user's stream in phase
two using only the energy harvested in phase one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "SystemParams",
    "PathLoss",
    "ChannelRealization",
    "EffectiveChannels",
    "TxSolution",
    "gamma_threshold",
    "sample_channel",
    "demo_channel",
    "effective_channels",
]


def gamma_threshold(rate_min: float) -> float:
    """SINR threshold equivalent to a rate target under the half pre-log.

    The two-phase scheme conveys each codeword over half the channel uses, so
    a rate target of ``rate_min`` bit/s/Hz requires total SINR at least
    2**(2*rate_min) - 1.  Nonnegative, zero iff the target is zero.
    """
    if rate_min < 0:
        raise ValidationError(f"rate target must be >= 0, got {rate_min}")
    return float(2.0 ** (2.0 * rate_min) - 1.0)


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters (linear units throughout)."""

    ps: float = 1000.0          # per-phase source power budget (30 dBm)
    sigma_d2: float = 1.0       # noise variance at the weak user
    sigma_r2: float = 1.0       # relay antenna (RF front-end) noise variance
    sigma_r2_tilde: float = 1.0 # relay post-splitting conversion noise variance
    eta: float = 0.8            # energy harvesting efficiency in (0, 1]
    rd_min: float = 1.0         # weak user's rate target, bit/s/Hz
    m: int = 2                  # source antennas
    n: int = 4                  # relay antennas

    def __post_init__(self) -> None:
        if self.ps <= 0:
            raise ValidationError(f"ps must be positive, got {self.ps}")
        for label, val in (("sigma_d2", self.sigma_d2), ("sigma_r2", self.sigma_r2),
                           ("sigma_r2_tilde", self.sigma_r2_tilde)):
            if val <= 0:
                raise ValidationError(f"{label} must be positive, got {val}")
        if not 0 < self.eta <= 1:
            raise ValidationError(f"eta must lie in (0, 1], got {self.eta}")
        if self.rd_min < 0:
            raise ValidationError(f"rd_min must be >= 0, got {self.rd_min}")
        if self.m < 1 or self.n < 1:
            raise ValidationError(f"antenna counts must be >= 1, got m={self.m} n={self.n}")

    @property
    def gamma_qos(self) -> float:
        """Total SINR the weak user must accumulate across both phases."""
        return gamma_threshold(self.rd_min)

    def with_rd_min(self, rate_min: float) -> "SystemParams":
        return SystemParams(ps=self.ps, sigma_d2=self.sigma_d2, sigma_r2=self.sigma_r2,
                            sigma_r2_tilde=self.sigma_r2_tilde, eta=self.eta,
                            rd_min=rate_min, m=self.m, n=self.n)

    def with_antennas(self, *, m: int | None = None, n: int | None = None) -> "SystemParams":
        return SystemParams(ps=self.ps, sigma_d2=self.sigma_d2, sigma_r2=self.sigma_r2,
                            sigma_r2_tilde=self.sigma_r2_tilde, eta=self.eta,
                            rd_min=self.rd_min, m=self.m if m is None else m,
                            n=self.n if n is None else n)


@dataclass(frozen=True)
class PathLoss:
    """Average path loss of each link in dB (per-entry channel variance
    is 10**(-loss_db/10))."""

    sr_db: float = 10.0   # source -> relay/strong user
    sd_db: float = 30.0   # source -> weak user
    rd_db: float = 25.0   # relay -> weak user

    @property
    def var_sr(self) -> float:
        return float(10.0 ** (-self.sr_db / 10.0))

    @property
    def var_sd(self) -> float:
        return float(10.0 ** (-self.sd_db / 10.0))

    @property
    def var_rd(self) -> float:
        return float(10.0 ** (-self.rd_db / 10.0))


@dataclass(frozen=True)
class ChannelRealization:
    r"""One flat-fading channel draw.

    h_sr : (m, n) source->relay matrix; column j is the vector channel from
           the source array to relay antenna j, so a receive filter w (n,)
           sees the effective source-side vector h_sr @ w.
    h_sd : (m,) source->weak-user vector.
    h_rd : (n,) relay->weak-user vector.
    """

    h_sr: np.ndarray
    h_sd: np.ndarray
    h_rd: np.ndarray

    def __post_init__(self) -> None:
        h_sr = np.asarray(self.h_sr, dtype=np.complex128)
        h_sd = np.asarray(self.h_sd, dtype=np.complex128).reshape(-1)
        h_rd = np.asarray(self.h_rd, dtype=np.complex128).reshape(-1)
        if h_sr.ndim != 2:
            raise ValidationError(f"h_sr must be a matrix, got shape {h_sr.shape}")
        if h_sd.shape[0] != h_sr.shape[0]:
            raise ValidationError(
                f"h_sd length {h_sd.shape[0]} must match h_sr rows {h_sr.shape[0]}")
        if h_rd.shape[0] != h_sr.shape[1]:
            raise ValidationError(
                f"h_rd length {h_rd.shape[0]} must match h_sr columns {h_sr.shape[1]}")
        object.__setattr__(self, "h_sr", h_sr)
        object.__setattr__(self, "h_sd", h_sd)
        object.__setattr__(self, "h_rd", h_rd)

    @property
    def m(self) -> int:
        return int(self.h_sr.shape[0])

    @property
    def n(self) -> int:
        return int(self.h_sr.shape[1])


def sample_channel(params: SystemParams, pl: PathLoss, seed: int) -> ChannelRealization:
    """Draw one i.i.d. circularly-symmetric complex Gaussian channel realization.

    Deterministic: the same (params.m, params.n, pl, seed) always produces the
    same realization.  Draw order is fixed: h_sr entries first (row-major),
    then h_sd, then h_rd.
    """
    rng = np.random.default_rng(seed)

    def cgauss(var: float, *shape: int) -> np.ndarray:
        re = rng.standard_normal(shape)
        im = rng.standard_normal(shape)
        return np.sqrt(var / 2.0) * (re + 1j * im)

    h_sr = cgauss(pl.var_sr, params.m, params.n)
    h_sd = cgauss(pl.var_sd, params.m)
    h_rd = cgauss(pl.var_rd, params.n)
    return ChannelRealization(h_sr=h_sr, h_sd=h_sd, h_rd=h_rd)


def demo_channel() -> ChannelRealization:
    """The fixed two-antenna-source, four-antenna-relay demo channel used by
    the bundled deterministic rate-region sweep (``--fig2``)."""
    h_sr = np.array([
        [0.4035 + 0.1087j, 0.2944 + 0.2835j, -0.3285 - 0.2116j, 0.7751 + 0.0767j],
        [-0.1413 + 0.0740j, 0.3469 + 0.2438j, 0.0396 - 0.0981j, -0.0480 - 0.0131j],
    ])
    h_sd = np.array([-0.0137 + 0.0123j, 0.0054 + 0.0105j])
    h_rd = np.sqrt(0.0723 / 4.0) * np.ones(4, dtype=np.complex128)
    return ChannelRealization(h_sr=h_sr, h_sd=h_sd, h_rd=h_rd)


@dataclass(frozen=True)
class EffectiveChannels:
    r"""Channel quantities induced by a fixed unit-norm relay receive filter.

    h_eff      : (m,) effective source->relay vector h_sr @ w_r.
    outer_eff  : (m, m) rank-one h_eff h_eff^H.
    gram_sr    : (m, m) h_sr h_sr^H (receive-filter independent; drives the
                 total power captured by the relay array for harvesting).
    h_sd       : (m,) source->weak-user vector.
    outer_sd   : (m, m) rank-one h_sd h_sd^H.
    norm_rd2   : ||h_rd||^2 (relay->weak-user beamforming gain).
    """

    h_eff: np.ndarray
    outer_eff: np.ndarray
    gram_sr: np.ndarray
    h_sd: np.ndarray
    outer_sd: np.ndarray
    norm_rd2: float

    @property
    def norm_eff2(self) -> float:
        """||h_eff||^2, the relay's decoding gain at this filter."""
        return float(np.linalg.norm(self.h_eff) ** 2)

    @property
    def norm_sd2(self) -> float:
        """||h_sd||^2, the direct hop's total gain."""
        return float(np.linalg.norm(self.h_sd) ** 2)


def effective_channels(ch: ChannelRealization, w_r: np.ndarray) -> EffectiveChannels:
    """Collapse a channel realization and a unit receive filter into the
    Hermitian forms the transmit design works with."""
    w = np.asarray(w_r, dtype=np.complex128).reshape(-1)
    if w.shape[0] != ch.n:
        raise ValidationError(f"receive filter length {w.shape[0]} != relay antennas {ch.n}")
    nrm = float(np.linalg.norm(w))
    if abs(nrm - 1.0) > 1e-9:
        raise ValidationError(f"receive filter must be unit norm, got ||w||={nrm!r}")
    h_eff = ch.h_sr @ w
    return EffectiveChannels(
        h_eff=h_eff,
        outer_eff=np.outer(h_eff, h_eff.conj()),
        gram_sr=ch.h_sr @ ch.h_sr.conj().T,
        h_sd=ch.h_sd.copy(),
        outer_sd=np.outer(ch.h_sd, ch.h_sd.conj()),
        norm_rd2=float(np.linalg.norm(ch.h_rd) ** 2),
    )


@dataclass(frozen=True)
class TxSolution:
    """A complete transceiver design point.

    w1    : (m,) beamformer carrying the strong user's stream.
    w2    : (m,) beamformer carrying the weak user's stream.
    rho   : power-splitting ratio in (0, 1); fraction routed to decoding.
    w_r   : (n,) unit-norm relay receive filter.
    """

    w1: np.ndarray
    w2: np.ndarray
    rho: float
    w_r: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "w1", np.asarray(self.w1, dtype=np.complex128).reshape(-1))
        object.__setattr__(self, "w2", np.asarray(self.w2, dtype=np.complex128).reshape(-1))
        object.__setattr__(self, "w_r", np.asarray(self.w_r, dtype=np.complex128).reshape(-1))
        if not 0.0 < self.rho < 1.0:
            raise ValidationError(f"rho must lie strictly in (0, 1), got {self.rho}")
