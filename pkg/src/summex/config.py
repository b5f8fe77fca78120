"""Key-value configuration files, merged under command-line flags.

Format: one ``key = value`` per line, ``#`` comments. Repeatable keys ending
in ``[]`` accumulate into lists (``serve.datasets[] = ...``).
"""


class ConfigError(ValueError):
    pass


def parse_config(path) -> dict:
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key.endswith("[]"):
                out.setdefault(key[:-2], []).append(value)
            else:
                out[key] = value
    return out


def merged(flag_value, config: dict, key: str, default, cast=str):
    """Flags win over config values, which win over the built-in default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        raw = config[key]
        if cast is bool and isinstance(raw, str):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default
