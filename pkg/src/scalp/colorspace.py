"""sRGB (8-bit) to CIELab under D65, no chromatic adaptation."""

import numpy as np

from .core import check_rgb

# IEC 61966-2-1 linear-sRGB -> XYZ (D65)
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# White point as the XYZ of sRGB (1, 1, 1), so white lands exactly on a = b = 0.
D65_WHITE = _RGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0


def srgb_to_linear(c):
    """Undo the sRGB transfer curve; ``c`` in [0, 1]."""
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _f(t):
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)


def srgb_to_lab(rgb) -> np.ndarray:
    """Convert an ``(H, W, 3)`` uint8 sRGB image to float64 CIELab.

    Pixel-wise and deterministic. L lies in [0, 100]; neutral inputs give
    a = b = 0 up to rounding.
    """
    rgb = check_rgb(rgb)
    # only 256 distinct channel values: linearize through a lookup table
    lut = srgb_to_linear(np.arange(256) / 255.0)
    linear = lut[rgb]
    xyz = linear @ _RGB_TO_XYZ.T
    f = _f(xyz / D65_WHITE)
    lab = np.empty(rgb.shape, dtype=np.float64)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    # f(0) = 4/29 gives L = 0 only up to rounding
    np.clip(lab[..., 0], 0.0, 100.0, out=lab[..., 0])
    return lab

