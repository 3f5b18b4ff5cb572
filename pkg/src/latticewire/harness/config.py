"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment; keys may be dotted
(``channel.jitter_db``). Lists are comma separated. The environment
variable ``LATTICEWIRE_SEED`` overrides the seed from the file; a
``--seed`` flag on the command line overrides both.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from ..decode import DecoderConfig
from ..exceptions import ConfigurationError
from ..lattice import get_scheme
from ..phy import PLACEMENTS

SEED_ENV = "LATTICEWIRE_SEED"
DEFAULT_DEMO_SCHEME = "coset-z-1s2r"

KNOWN_KEYS = {
    "scheme",
    "schemes",
    "snr_db",
    "placements",
    "seed",
    "secret_bits",
    "trials",
    "bin_width",
    "entropy.noise",
    "channel.jitter_db",
    "decoder.mode",
    "decoder.concentration",
    "image.path",
    "bob.placement",
    "output.dir",
}


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def load_config_file(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def resolve_snr(item) -> float:
    """A placement name or a plain dB value."""
    if isinstance(item, (int, float)):
        return float(item)
    item = str(item).strip()
    if item in PLACEMENTS:
        return PLACEMENTS[item]
    try:
        return float(item)
    except ValueError:
        raise ConfigurationError(f"{item!r} is neither a placement preset nor a dB value") from None


def _list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _number(raw: dict, key: str, cast, default):
    if key not in raw or raw[key] == "":
        return default
    try:
        return cast(raw[key])
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {raw[key]!r}") from None


@dataclass
class ExperimentConfig:
    schemes: list[str] | None = None
    snr_db: list[float] | None = None
    seed: int | None = None
    secret_bits: int = 100_000
    trials: int = 200_000
    bin_width: float | None = None
    entropy_noise: str = "real"
    jitter_db: float | None = None
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    image_path: str | None = None
    bob_snr_db: float = PLACEMENTS["placement1"]
    output_dir: str = "."

    @property
    def scheme(self) -> str:
        return self.schemes[0] if self.schemes else DEFAULT_DEMO_SCHEME

    def schemes_or(self, default) -> list[str]:
        return list(self.schemes) if self.schemes else list(default)

    def snr_or(self, default) -> list[float]:
        return list(self.snr_db) if self.snr_db else list(default)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigurationError(f"a seed is required (config 'seed', ${SEED_ENV} or --seed)")
        return self.seed


def build_config(raw: dict[str, str] | None = None, seed_override: int | None = None, env=None) -> ExperimentConfig:
    raw = dict(raw or {})
    env = os.environ if env is None else env
    cfg = ExperimentConfig()
    if "schemes" in raw:
        cfg.schemes = _list(raw["schemes"])
    elif "scheme" in raw:
        cfg.schemes = [raw["scheme"]]
    for name in cfg.schemes or ():
        get_scheme(name)
    if "snr_db" in raw or "placements" in raw:
        items = _list(raw.get("placements", "")) + _list(raw.get("snr_db", ""))
        cfg.snr_db = [resolve_snr(i) for i in items]
    cfg.seed = _number(raw, "seed", int, None)
    if env.get(SEED_ENV):
        try:
            cfg.seed = int(env[SEED_ENV])
        except ValueError:
            raise ConfigurationError(f"${SEED_ENV} must be an integer") from None
    if seed_override is not None:
        cfg.seed = seed_override
    cfg.secret_bits = _number(raw, "secret_bits", int, cfg.secret_bits)
    cfg.trials = _number(raw, "trials", int, cfg.trials)
    cfg.bin_width = _number(raw, "bin_width", float, None)
    cfg.entropy_noise = raw.get("entropy.noise", cfg.entropy_noise)
    cfg.jitter_db = _number(raw, "channel.jitter_db", float, None)
    if cfg.jitter_db is not None and cfg.jitter_db < 0:
        raise ConfigurationError("channel.jitter_db must be non-negative")
    conc = raw.get("decoder.concentration", "noise")
    try:
        conc = float(conc)
    except ValueError:
        pass
    cfg.decoder = DecoderConfig(raw.get("decoder.mode", "ml"), conc)
    cfg.image_path = raw.get("image.path") or None
    if "bob.placement" in raw:
        cfg.bob_snr_db = resolve_snr(raw["bob.placement"])
    cfg.output_dir = raw.get("output.dir", cfg.output_dir)
    if cfg.secret_bits < 1 or cfg.trials < 1:
        raise ConfigurationError("secret_bits and trials must be positive")
    return cfg
