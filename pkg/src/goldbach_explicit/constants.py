"""Frozen numerical gates, read from a flat ``name = value`` text file."""
from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

DEFAULT_PATH = Path(str(resources.files("goldbach_explicit") / "data" / "constants.txt"))

REQUIRED = (
    "thm1_normalized_max", "thm2_normalized_max", "thm3_normalized_max", "thm4_normalized_max",
    "thm2_trivial_envelope_max", "tail_flag_fraction", "residue_gap_max", "meansq_gap_factor",
    "lp_ratio_max", "i3_ratio_max", "pointwise_ratio_max", "i2_identity_rtol", "sumint_gap_max",
)


def parse_constants(text: str, source: str = "<constants>") -> dict[str, float]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        name = name.strip()
        if not sep:
            raise ValueError(f"{source}:{lineno}: expected 'name = value', got {raw!r}")
        if not name:
            raise ValueError(f"{source}:{lineno}: empty name")
        if name in out:
            raise ValueError(f"{source}:{lineno}: duplicate constant {name!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ValueError(f"{source}:{lineno}: value {value.strip()!r} is not a number") from None
    return out


def load_constants(path=None) -> tuple[dict[str, float], str]:
    """Return ``(constants, sha256)``; ``path=None`` reads the shipped file."""
    path = DEFAULT_PATH if path is None else Path(path)
    text = path.read_text(encoding="utf-8")
    const = parse_constants(text, str(path))
    missing = [k for k in REQUIRED if k not in const]
    if missing:
        raise ValueError(f"{path}: missing constants {', '.join(missing)}")
    return const, hashlib.sha256(text.encode("utf-8")).hexdigest()
