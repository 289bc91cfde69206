"""Image tensors and lossless PNM (PGM/PPM) file I/O.

Images are float64 arrays in 8-bit intensity units, shape (H, W, C)
with C in {1, 3}; grayscale maps are (H, W). Values stay in [0, 255]
after any clamp; attacks work in these units end to end.
"""

import numpy as np

BT601_WEIGHTS = (0.299, 0.587, 0.114)


class PnmError(ValueError):
    """Base class for PNM parse failures."""


class PnmHeaderError(PnmError):
    """Malformed magic number, dimensions, or header layout."""


class PnmMaxvalError(PnmError):
    """Maxval other than 255."""


class PnmTruncatedError(PnmError):
    """Payload shorter than the header promises."""


def _tokens(data):
    """Yield whitespace-separated header tokens, skipping # comments."""
    i = 0
    n = len(data)
    while True:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
            continue
        if i >= n:
            return
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        yield start, data[start:i]


def load_pnm(path):
    """Decode a PGM (P2/P5) or PPM (P3/P6) file with maxval 255.

    Returns an (H, W, C) float64 array whose values equal the file's
    sample values exactly.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    toks = _tokens(data)
    try:
        _, magic = next(toks)
    except StopIteration:
        raise PnmHeaderError("empty file") from None
    formats = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}
    if magic not in formats:
        raise PnmHeaderError(f"unsupported magic {magic!r}")
    channels, binary = formats[magic]

    header = []
    last_end = 0
    for pos, tok in toks:
        if not tok.isdigit():
            raise PnmHeaderError(f"non-numeric header token {tok!r}")
        header.append(int(tok))
        last_end = pos + len(tok)
        if len(header) == 3:
            break
    if len(header) < 3:
        raise PnmHeaderError("incomplete header")
    width, height, maxval = header
    if width <= 0 or height <= 0:
        raise PnmHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PnmMaxvalError(f"maxval {maxval} unsupported, expected 255")

    count = height * width * channels
    if binary:
        # exactly one whitespace byte separates maxval from the payload
        payload = data[last_end + 1 :]
        if len(payload) < count:
            raise PnmTruncatedError(f"expected {count} bytes, found {len(payload)}")
        values = np.frombuffer(payload[:count], dtype=np.uint8)
    else:
        rest = data[last_end:]
        samples = []
        for _, tok in _tokens(rest):
            if not tok.isdigit():
                raise PnmHeaderError(f"non-numeric sample {tok!r}")
            samples.append(int(tok))
            if len(samples) == count:
                break
        if len(samples) < count:
            raise PnmTruncatedError(f"expected {count} samples, found {len(samples)}")
        if max(samples) > 255:
            raise PnmHeaderError("sample exceeds maxval")
        values = np.array(samples, dtype=np.uint8)

    return values.reshape(height, width, channels).astype(np.float64)


def round_half_away(values):
    """Round to nearest integer, halves away from zero (values are >= 0 here)."""
    return np.floor(np.asarray(values) + 0.5)


def save_pnm(img, path):
    """Write an (H, W, C) tensor as binary PGM (C=1) or PPM (C=3).

    Values are rounded half-away-from-zero to bytes, so integer-valued
    tensors round-trip exactly through load_pnm.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    h, w, c = img.shape
    if c not in (1, 3):
        raise ValueError(f"channels must be 1 or 3, got {c}")
    if img.min() < 0.0 or img.max() > 255.0:
        raise ValueError("pixel values outside [0, 255]; clamp before saving")
    magic = "P5" if c == 1 else "P6"
    payload = round_half_away(img).astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(f"{magic}\n{w} {h}\n255\n".encode("ascii"))
        fh.write(payload)


def to_grayscale(img):
    """BT.601 luma of an (H, W, C) tensor; returns an (H, W) map."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img.copy()
    if img.shape[2] == 1:
        return img[:, :, 0].copy()
    if img.shape[2] != 3:
        raise ValueError(f"channels must be 1 or 3, got {img.shape[2]}")
    r, g, b = BT601_WEIGHTS
    return r * img[:, :, 0] + g * img[:, :, 1] + b * img[:, :, 2]


def clamp(img, lo=0.0, hi=255.0):
    return np.clip(img, lo, hi)
