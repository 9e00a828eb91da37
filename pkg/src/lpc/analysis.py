"""Quality and security statistics and the capacity table harness."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from .bitprep import PrepConfig
from .errors import ConfigError, LPCError
from .imageio import check_image
from .pipeline import capacity


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    a, b = check_image(a), check_image(b)
    if a.shape != b.shape:
        raise ConfigError(f"image shapes differ: {a.shape} vs {b.shape}")
    sse = int(np.sum((a.astype(np.int64) - b.astype(np.int64)) ** 2))
    if sse == 0:
        return math.inf
    return 10 * math.log10(255 ** 2 * a.size / sse)


class DiffMaps(NamedTuple):
    horizontal: np.ndarray
    vertical: np.ndarray


def diff_maps(img) -> DiffMaps:
    """Adjacent-pixel differences: ``I[i, j] - I[i, j+1]`` and ``I[i, j] - I[i+1, j]``."""
    arr = check_image(img).astype(np.int16)
    if arr.shape == (1, 1):
        raise ConfigError("a 1x1 image has no adjacent pixels")
    return DiffMaps(arr[:, :-1] - arr[:, 1:], arr[:-1, :] - arr[1:, :])


def entropy(values) -> float:
    """Shannon entropy (bits) of the empirical distribution of `values`."""
    values = np.asarray(values).ravel()
    if values.size == 0:
        return 0.0
    _, counts = np.unique(values, return_counts=True)
    p = counts / values.size
    return max(0.0, float(-(p * np.log2(p)).sum()))


@dataclass
class UniformityReport:
    histogram: np.ndarray
    chi2: float
    p_value: float
    plane_ones: list[float]
    entropy_h: float
    entropy_v: float

    @property
    def uniform(self) -> bool:
        return self.p_value > 0.01


def uniformity_report(img) -> UniformityReport:
    """Histogram uniformity (chi-square, 255 dof) and difference entropies.

    ``plane_ones[k]`` is the fraction of pixels whose bit k is set.
    """
    arr = check_image(img)
    hist = np.bincount(arr.ravel(), minlength=256)
    chi2, p = stats.chisquare(hist)
    ones = [float(((arr >> k) & 1).mean()) for k in range(8)]
    if arr.shape == (1, 1):
        eh = ev = 0.0
    else:
        dh, dv = diff_maps(arr)
        eh, ev = entropy(dh), entropy(dv)
    return UniformityReport(hist, float(chi2), float(p), ones, eh, ev)


def histogram_text(img) -> str:
    """256 lines of ``bin,count``."""
    hist = np.bincount(check_image(img).ravel(), minlength=256)
    return "".join(f"{b},{c}\n" for b, c in enumerate(hist.tolist()))


CAPACITY_FIELDS = [
    "image", "tau", "lam", "theta", "unused_info_bits", "used_info_bits", "header_bits",
    "aux_total", "aux_bpp", "room_total", "room_bpp", "phi", "eta", "error",
]


def capacity_row(name, img, tau: int, lam: int = 3) -> dict:
    row = dict.fromkeys(CAPACITY_FIELDS, "")
    row.update(image=name, tau=tau, lam=lam)
    try:
        img = check_image(img)
        rep = capacity(img, PrepConfig(lam=lam, tau=tau))
    except LPCError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    npix = img.size
    row.update(
        theta=rep.theta,
        unused_info_bits=rep.unused_info_bits,
        used_info_bits=rep.used_info_bits,
        header_bits=rep.header_bits,
        aux_total=rep.aux_total,
        aux_bpp=f"{rep.aux_total / npix:.4f}",
        room_total=rep.room_total,
        room_bpp=f"{rep.room_total / npix:.4f}",
        phi=rep.phi,
        eta=f"{rep.eta:.4f}",
    )
    return row


def capacity_table(corpus, taus=(32, 16, 8), lam: int = 3) -> list[dict]:
    """One row per (image, tau). `corpus` maps names to images.

    Failures are recorded in the row's ``error`` column and the run
    continues.
    """
    items = corpus.items() if hasattr(corpus, "items") else corpus
    return [capacity_row(name, img, tau, lam) for name, img in items for tau in taus]


def write_csv(rows, fh=None, fields=CAPACITY_FIELDS) -> str | None:
    """Write `rows` as CSV to `fh`, or return the text when `fh` is None."""
    out = fh if fh is not None else io.StringIO()
    writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return None if fh is not None else out.getvalue()
