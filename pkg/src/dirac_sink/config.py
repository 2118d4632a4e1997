"""Flat key=value configuration files.

Recognized keys: eps1, eps2, gamma1, gamma2, v_re, v_im, qx, qy, vf,
init, d, gamma_noise, t_final, dt.  Lines are `key = value`, blank lines
and #-comments are ignored.  CLI flags override file values.
"""

from __future__ import annotations

from pathlib import Path

FLOAT_KEYS = (
    "eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "qx", "qy", "vf",
    "d", "gamma_noise", "t_final", "dt",
)
STRING_KEYS = ("init",)
CONFIG_KEYS = FLOAT_KEYS + STRING_KEYS


def load_config(path: str | Path) -> dict:
    values: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(
                f"{path}:{lineno}: unknown key {key!r}; expected one of {CONFIG_KEYS}"
            )
        if key in STRING_KEYS:
            values[key] = value
        else:
            try:
                values[key] = float(value)
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: value for {key!r} is not a number: {value!r}"
                ) from None
    return values
