"""Configuration, image demo and command line front end."""

from .cli import main, run_cli
from .config import ExperimentConfig, build_config, load_config_file
from .demo import image_demo
from .image import BitImage, bits_to_image, image_to_bits, make_test_pattern

__all__ = [
    "BitImage",
    "ExperimentConfig",
    "bits_to_image",
    "build_config",
    "image_demo",
    "image_to_bits",
    "load_config_file",
    "main",
    "make_test_pattern",
    "run_cli",
]
