"""Compressed-domain gesture recognition.

Sequences of motion centers are ``(n, 2)`` float arrays with coordinates in
[0, 1]; frames are ``(height, width)`` uint8 arrays.
"""

from ._core import (
    Config,
    CsgError,
    Extractor,
    Model,
    dtw,
    dtw_open_end,
    stream,
    synth_gesture,
    train,
)

__all__ = [
    "Config",
    "CsgError",
    "Extractor",
    "Model",
    "config",
    "dtw",
    "dtw_open_end",
    "stream",
    "synth_gesture",
    "train",
]


def config(**settings):
    """Config from keyword arguments, e.g. ``config(block=10, frame_width=320)``."""
    lines = []
    for key, value in settings.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            value = ", ".join(str(v) for v in value)
        elif value is None:
            value = "auto"
        lines.append(f"{key} = {value}")
    return Config("\n".join(lines))
