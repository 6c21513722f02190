"""Reading and writing images, contour maps, label maps and dataset manifests.

Pixel decoding goes through Pillow. Bit depth is read from the file header
first, because Pillow quietly narrows some 16-bit inputs to 8 bits.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .core import (
    CorruptFile,
    DimensionMismatch,
    IoError,
    LabelMap,
    RaggedCsv,
    UnsupportedFormat,
    compact_labels,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
# PNG colour types
_GRAY, _RGB, _PALETTE, _GRAY_ALPHA, _RGBA = 0, 2, 3, 4, 6


@dataclass(frozen=True)
class Header:
    kind: str  # "png" or "pnm"
    width: int
    height: int
    channels: int
    maxval: int  # 255 for 8-bit data, 65535 for 16-bit, PNM maxval otherwise


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _pnm_header(data: bytes, path) -> tuple[Header, int]:
    tokens = []
    i = 2
    n = len(data)
    while len(tokens) < 3:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        if start == i:
            raise CorruptFile(f"{path}: truncated PNM header")
        tokens.append(data[start:i])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptFile(f"{path}: malformed PNM header") from None
    if width < 1 or height < 1 or not (1 <= maxval <= 65535):
        raise CorruptFile(f"{path}: invalid PNM header values")
    channels = 3 if data[:2] == b"P6" else 1
    # a single whitespace byte separates the header from the raster
    return Header("pnm", width, height, channels, maxval), i + 1


def read_header(data: bytes, path="<bytes>") -> Header:
    if data[:8] == PNG_MAGIC:
        if len(data) < 33 or data[12:16] != b"IHDR":
            raise CorruptFile(f"{path}: truncated PNG header")
        width = int.from_bytes(data[16:20], "big")
        height = int.from_bytes(data[20:24], "big")
        depth, ctype = data[24], data[25]
        channels = {_GRAY: 1, _GRAY_ALPHA: 2, _RGB: 3, _PALETTE: 3, _RGBA: 4}.get(ctype)
        if channels is None:
            raise CorruptFile(f"{path}: unknown PNG colour type {ctype}")
        maxval = 65535 if depth == 16 else 255
        return Header("png", width, height, channels, maxval)
    if data[:2] in (b"P5", b"P6"):
        return _pnm_header(data, path)[0]
    raise UnsupportedFormat(f"{path}: not a PNG or binary PGM/PPM file")


def _decode(path) -> tuple[Header, np.ndarray]:
    data = _read_bytes(path)
    header = read_header(data, path)
    if header.kind == "pnm":
        _, offset = _pnm_header(data, path)
        bytes_per = 2 if header.maxval > 255 else 1
        need = header.width * header.height * header.channels * bytes_per
        if len(data) - offset < need:
            raise CorruptFile(f"{path}: truncated raster ({len(data) - offset} of {need} bytes)")
        dtype = ">u2" if bytes_per == 2 else np.uint8
        raw = np.frombuffer(data, dtype=dtype, count=need // bytes_per, offset=offset)
        shape = (header.height, header.width) + ((3,) if header.channels == 3 else ())
        return header, raw.reshape(shape).astype(np.uint16 if bytes_per == 2 else np.uint8)
    try:
        with Image.open(path) as im:
            im.load()
            if header.maxval == 65535:
                arr = np.array(im)
            elif header.channels in (1, 2) and im.mode in ("L", "LA", "1", "P"):
                arr = np.array(im.convert("L"))
            else:
                arr = np.array(im.convert("RGB"))
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    return header, arr


def load_image(path) -> np.ndarray:
    """Read an 8-bit PNG or binary PPM/PGM as an ``(H, W, 3)`` uint8 sRGB array.

    16-bit files raise :class:`UnsupportedFormat` instead of being truncated.
    """
    header, arr = _decode(path)
    if header.maxval > 255:
        raise UnsupportedFormat(f"{path}: 16-bit images are not supported")
    if header.kind == "pnm" and header.maxval != 255:
        arr = np.floor(arr.astype(np.float64) * 255.0 / header.maxval + 0.5).astype(np.uint8)
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    return np.ascontiguousarray(arr, dtype=np.uint8)


def load_contour_map(path, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read a grayscale PNG/PGM and scale it to [0, 1] by the format's maximum value."""
    header, arr = _decode(path)
    if header.channels != 1:
        raise UnsupportedFormat(f"{path}: contour maps must be single-channel grayscale")
    out = arr.astype(np.float64) / header.maxval
    if shape is not None and out.shape != tuple(shape):
        raise DimensionMismatch(f"{path}: contour map {out.shape} does not match image {tuple(shape)}")
    return out


def _load_csv_labels(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise CorruptFile(f"{path}: empty label CSV")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise RaggedCsv(f"{path}: rows have differing lengths {sorted(widths)}")
    try:
        return np.array([[int(c) for c in r] for r in rows], dtype=np.int64)
    except ValueError as exc:
        raise CorruptFile(f"{path}: non-integer label ({exc})") from exc


def load_label_map(path) -> LabelMap:
    """Read a label map from a grayscale PNG/PGM or an integer CSV (rows = image rows).

    Labels are renumbered to ``[0, k)`` in order of first appearance.
    """
    data_start = _read_bytes(path)[:8]
    if str(path).lower().endswith(".csv") or not (
        data_start.startswith(PNG_MAGIC) or data_start[:2] in (b"P5", b"P6")
    ):
        arr = _load_csv_labels(path)
    else:
        header, arr = _decode(path)
        if header.channels != 1:
            raise UnsupportedFormat(f"{path}: label maps must be single-channel")
    return LabelMap(*compact_labels(arr))


def save_label_map(path, labels) -> None:
    """Write labels as a 16-bit grayscale PNG (or PGM by extension)."""
    arr = labels.labels if isinstance(labels, LabelMap) else np.asarray(labels)
    if arr.min() < 0 or arr.max() > 65535:
        raise UnsupportedFormat("label ids must fit in 16 bits")
    _save(path, Image.fromarray(arr.astype(np.uint16)))


def save_gray16(path, values) -> None:
    """Write a [0, 1] map as 16-bit grayscale."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    _save(path, Image.fromarray(np.floor(v * 65535.0 + 0.5).astype(np.uint16)))


def save_image(path, rgb) -> None:
    _save(path, Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), mode="RGB"))


def _save(path, im: Image.Image) -> None:
    fmt = "PPM" if str(path).lower().endswith((".ppm", ".pgm", ".pnm")) else "PNG"
    try:
        im.save(path, format=fmt)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


@dataclass
class DatasetEntry:
    image: Path
    ground_truths: list[Path] = field(default_factory=list)
    contour: Path | None = None


def parse_manifest(path) -> list[DatasetEntry]:
    """Read ``image;gt1,gt2,...;contour`` lines; ``#`` comments and blank lines are skipped.

    Relative paths resolve against the manifest's directory. The ground-truth
    and contour fields may be empty or omitted.
    """
    base = Path(path).parent
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc

    def resolve(p: str) -> Path:
        p = p.strip()
        return Path(p) if os.path.isabs(p) else base / p

    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(";")
        if len(fields) > 3 or not fields[0].strip():
            raise CorruptFile(f"{path}:{lineno}: expected 'image;gt1,gt2,...;contour'")
        gts = [resolve(g) for g in fields[1].split(",") if g.strip()] if len(fields) > 1 else []
        contour = resolve(fields[2]) if len(fields) > 2 and fields[2].strip() else None
        entries.append(DatasetEntry(resolve(fields[0]), gts, contour))
    return entries
