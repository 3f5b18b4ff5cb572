"""Image transmission demo: one legitimate receiver and one or more eavesdroppers."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import PipelineError
from ..link import transmit_bits
from ..metrics import BerPoint, ber, point_rng, rows_to_csv
from ..phy import PLACEMENTS, ChannelInstance
from .config import ExperimentConfig
from .image import BitImage, bits_to_image, bundled_test_image, image_to_bits
from .io import atomic_write_text

# per-frame SNR spread of the testbed; the sweeps default to a static channel instead
DEMO_JITTER_DB = 1.5


@dataclass
class ReceiverResult:
    role: str
    snr_db: float
    point: BerPoint | None
    image: BitImage | None
    path: Path | None = None
    error: str | None = None


@dataclass
class DemoResult:
    scheme: str
    seed: int
    receivers: list[ReceiverResult] = field(default_factory=list)
    csv_path: Path | None = None

    @property
    def failed(self) -> bool:
        return any(r.error for r in self.receivers)

    def by_role(self, role: str) -> list[ReceiverResult]:
        return [r for r in self.receivers if r.role == role]


def _label(snr: float) -> str:
    return f"{snr:g}dB".replace("-", "m")


def image_demo(cfg: ExperimentConfig, write: bool = True) -> DemoResult:
    """Send the image to Bob and to every Eve SNR in ``cfg.snr_db``.

    A receiver whose pipeline fails is recorded with its error and the
    others still run.
    """
    seed = cfg.require_seed()
    scheme = cfg.scheme
    img = image_to_bits(cfg.image_path) if cfg.image_path else bundled_test_image()
    jitter = DEMO_JITTER_DB if cfg.jitter_db is None else cfg.jitter_db
    out_dir = Path(cfg.output_dir)
    result = DemoResult(scheme, seed)
    eves = cfg.snr_or(PLACEMENTS.values())
    receivers = [("bob", cfg.bob_snr_db)] + [("eve", s) for s in eves]
    rows = []
    for role, snr in receivers:
        rng = point_rng(seed, f"{scheme}/{role}", snr)
        ch = ChannelInstance.from_snr(snr, phase=rng.uniform(0, 2 * np.pi), jitter_db=jitter)
        try:
            rx_bits, _ = transmit_bits(img.bits, scheme, ch, rng, cfg.decoder)
        except PipelineError as exc:
            result.receivers.append(ReceiverResult(role, snr, None, None, error=str(exc)))
            rows.append((scheme, snr, f"{role}_ber", float("nan"), float("nan"), 0, seed))
            continue
        point = ber(img.bits, rx_bits, scheme, snr)
        rec = BitImage(img.width, img.height, rx_bits)
        path = out_dir / f"{scheme}_{role}_{_label(snr)}.pbm"
        if write:
            bits_to_image(rec, path)
        result.receivers.append(ReceiverResult(role, snr, point, rec, path if write else None))
        rows.append((scheme, snr, f"{role}_ber", point.ber, point.stderr, point.bits_counted, seed))
    if write:
        result.csv_path = out_dir / f"{scheme}_demo_ber.csv"
        atomic_write_text(result.csv_path, rows_to_csv(rows))
    return result
