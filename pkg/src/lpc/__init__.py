"""Reversible data hiding in encrypted grayscale images by lossless pixel conversion."""
from .analysis import capacity_table, diff_maps, psnr, uniformity_report
from .bitprep import PrepConfig
from .cipher import KeyMaterial
from .errors import (CapacityError, ConfigError, CorruptDataError, FormatError,
                     ImageUnsupportedError, KeyMismatchError, LPCError, PGMError)
from .imageio import load_image, read_pgm, save_image, write_pgm
from .pipeline import (CapacityReport, capacity, embed, extract, protect, protect_with_report,
                       recover_full, recover_image, reserve)

__all__ = [
    "CapacityError", "CapacityReport", "ConfigError", "CorruptDataError", "FormatError",
    "ImageUnsupportedError", "KeyMaterial", "KeyMismatchError", "LPCError", "PGMError",
    "PrepConfig", "capacity", "capacity_table", "diff_maps", "embed", "extract",
    "load_image", "protect", "protect_with_report", "psnr", "read_pgm", "recover_full",
    "recover_image", "reserve", "save_image", "uniformity_report", "write_pgm",
]
