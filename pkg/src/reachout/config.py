"""key=value configuration files.

One setting per line, # comments and blank lines allowed, no sections.
Unknown keys are errors so typos never silently fall back to defaults.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ValidationError

CONFIG_SCHEMA: dict[str, type] = {
    "k_select": int,
    "k_train": int,
    "num_rounds": int,
    "num_samples": int,
    "runs_per_sample": int,
    "master_seed": int,
    "workers": int,
    "propagation_prob": float,
    "p_platform": float,
    "p_field": float,
    "p_both": float,
    "contact_prob": float,
    "decline_prob": float,
    "method": str,
}


def parse_config_file(path) -> dict[str, object]:
    name = Path(path).name
    out: dict[str, object] = {}
    errors: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                errors.append(f"{name}:{lineno}: expected key=value")
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            caster = CONFIG_SCHEMA.get(key)
            if caster is None:
                errors.append(f"{name}:{lineno}: unknown key {key}")
                continue
            if key in out:
                errors.append(f"{name}:{lineno}: duplicate key {key}")
                continue
            try:
                out[key] = caster(value)
            except ValueError:
                errors.append(
                    f"{name}:{lineno}: {key} expects {caster.__name__}, "
                    f"got {value!r}")
    if errors:
        raise ValidationError("; ".join(errors))
    return out
