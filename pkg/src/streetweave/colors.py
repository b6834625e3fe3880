"""Color parsing and perceptual ramps.

Quantitative color encodings interpolate a two-stop ramp (light tint to dark
shade of a base hue) in Oklab, which is perceptually ordered in lightness.
"""

from __future__ import annotations

import math

_NAMED = {
    "black": "#000000",
    "white": "#ffffff",
    "red": "#ff0000",
    "green": "#008000",
    "blue": "#0000ff",
    "gray": "#808080",
    "grey": "#808080",
    "purple": "#800080",
    "brown": "#a52a2a",
    "orange": "#ffa500",
    "yellow": "#ffff00",
    "teal": "#008080",
    "navy": "#000080",
    "steelblue": "#4682b4",
}


class ColorError(ValueError):
    pass


def parse_color(value: str) -> tuple[float, float, float, float]:
    """Parse '#rgb', '#rrggbb', '#rrggbbaa', or a named color to sRGB floats."""
    if not isinstance(value, str):
        raise ColorError(f"color must be a string, got {value!r}")
    s = value.strip().lower()
    if s in _NAMED:
        s = _NAMED[s]
    if not s.startswith("#"):
        raise ColorError(f"unrecognized color {value!r}")
    h = s[1:]
    if len(h) == 3:
        h = "".join(c * 2 for c in h)
    if len(h) == 6:
        h += "ff"
    if len(h) != 8 or any(c not in "0123456789abcdef" for c in h):
        raise ColorError(f"unrecognized color {value!r}")
    return tuple(int(h[i : i + 2], 16) / 255.0 for i in (0, 2, 4, 6))  # type: ignore[return-value]


def to_hex_rgba(rgba: tuple[float, float, float, float]) -> str:
    def chan(v: float) -> int:
        return max(0, min(255, int(round(v * 255.0))))

    r, g, b, a = rgba
    return f"#{chan(r):02x}{chan(g):02x}{chan(b):02x}{chan(a):02x}"


def _srgb_to_linear(c: float) -> float:
    return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4


def _linear_to_srgb(c: float) -> float:
    c = max(0.0, min(1.0, c))
    return 12.92 * c if c <= 0.0031308 else 1.055 * c ** (1 / 2.4) - 0.055


def _rgb_to_oklab(rgb: tuple[float, float, float]) -> tuple[float, float, float]:
    r, g, b = (_srgb_to_linear(c) for c in rgb)
    l = 0.4122214708 * r + 0.5363325363 * g + 0.0514459929 * b
    m = 0.2119034982 * r + 0.6806995451 * g + 0.1073969566 * b
    s = 0.0883024619 * r + 0.2817188376 * g + 0.6299787005 * b
    l, m, s = (math.copysign(abs(v) ** (1 / 3), v) for v in (l, m, s))
    return (
        0.2104542553 * l + 0.7936177850 * m - 0.0040720468 * s,
        1.9779984951 * l - 2.4285922050 * m + 0.4505937099 * s,
        0.0259040371 * l + 0.7827717662 * m - 0.8086757660 * s,
    )


def _oklab_to_rgb(lab: tuple[float, float, float]) -> tuple[float, float, float]:
    L, a, b = lab
    l = (L + 0.3963377774 * a + 0.2158037573 * b) ** 3
    m = (L - 0.1055613458 * a - 0.0638541728 * b) ** 3
    s = (L - 0.0894841775 * a - 1.2914855480 * b) ** 3
    r = 4.0767416621 * l - 3.3077115913 * m + 0.2309699292 * s
    g = -1.2684380046 * l + 2.6097574011 * m - 0.3413193965 * s
    bb = -0.0041960863 * l - 0.7034186147 * m + 1.7076147010 * s
    return (_linear_to_srgb(r), _linear_to_srgb(g), _linear_to_srgb(bb))


def oklab_mix(color_a: str, color_b: str, t: float) -> tuple[float, float, float]:
    a = _rgb_to_oklab(parse_color(color_a)[:3])
    b = _rgb_to_oklab(parse_color(color_b)[:3])
    mixed = tuple(a[i] + t * (b[i] - a[i]) for i in range(3))
    return _oklab_to_rgb(mixed)  # type: ignore[arg-type]


def lightness(color: str) -> float:
    return _rgb_to_oklab(parse_color(color)[:3])[0]


class Ramp:
    """Two-stop quantitative ramp: light tint -> dark shade of a base hue."""

    def __init__(self, base: str):
        self.base = base
        self._light = to_hex_rgba((*oklab_mix(base, "#ffffff", 0.75), 1.0))
        self._dark = to_hex_rgba((*oklab_mix(base, "#000000", 0.45), 1.0))

    def __call__(self, t: float) -> str:
        t = min(max(float(t), 0.0), 1.0)
        return to_hex_rgba((*oklab_mix(self._light, self._dark, t), 1.0))
