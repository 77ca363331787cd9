"""
Utility classes and functions
"""
import os
import json
import hashlib
from typing import Dict, Any, Optional

import yaml

from .config import RunConfig, CONFIG_KEYS
from .exceptions import ConfigError

ENV_PREFIX = "RESAUG_"
CACHE_DIR_ENV = ENV_PREFIX + "CACHE_DIR"


def canonical_json(value: Any) -> str:
    """Compact JSON with sorted keys, used for hashing"""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def stable_hash(value: Any, length: int = 16) -> str:
    """Short SHA-256 digest of a JSON-serializable value"""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()[:length]


class ConfigLoader:
    """Utility for loading run configuration from files and the environment"""

    @staticmethod
    def from_cfg(filepath: str) -> Dict[str, Any]:
        """
        Load a flat key/value config file

        One 'key = value' pair per line; '#' starts a comment line; blank lines are ignored.
        A value may be wrapped in double quotes to keep leading or trailing spaces.
        """
        config = {}
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                lines = f.read().splitlines()
        except OSError as e:
            raise ConfigError(f"Cannot read config file {filepath}: {e}")

        for number, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{filepath}:{number}: expected 'key = value', got '{stripped}'")
            key, value = stripped.split("=", 1)
            key = key.strip().lower()
            value = value.strip()
            if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
                value = value[1:-1]
            if not key:
                raise ConfigError(f"{filepath}:{number}: empty key")
            if key in config:
                raise ConfigError(f"{filepath}:{number}: duplicate key '{key}'")
            config[key] = value
        return config

    @staticmethod
    def _mapping(filepath: str, document: Any) -> Dict[str, Any]:
        if document is None:
            return {}
        if not isinstance(document, dict):
            raise ConfigError(f"{filepath}: expected a mapping")
        return {str(key).strip().lower(): value for key, value in document.items()}

    @staticmethod
    def from_json(filepath: str) -> Dict[str, Any]:
        """Load config from JSON file"""
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                document = json.load(f)
        except OSError as e:
            raise ConfigError(f"Cannot read config file {filepath}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"{filepath}:{e.lineno}: invalid JSON: {e.msg}")
        return ConfigLoader._mapping(filepath, document)

    @staticmethod
    def from_yaml(filepath: str) -> Dict[str, Any]:
        """Load config from YAML file"""
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                document = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"Cannot read config file {filepath}: {e}")
        except yaml.YAMLError as e:
            raise ConfigError(f"{filepath}: invalid YAML: {e}")
        return ConfigLoader._mapping(filepath, document)

    @staticmethod
    def from_file(filepath: str) -> Dict[str, Any]:
        """Load config choosing the reader from the file extension"""
        extension = os.path.splitext(filepath)[1].lower()
        if extension == ".json":
            return ConfigLoader.from_json(filepath)
        if extension in (".yaml", ".yml"):
            return ConfigLoader.from_yaml(filepath)
        return ConfigLoader.from_cfg(filepath)

    @staticmethod
    def from_env(environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
        """Load known config keys from RESAUG_* environment variables"""
        environ = os.environ if environ is None else environ
        config = {}

        for key, value in environ.items():
            if key.startswith(ENV_PREFIX):
                config_key = key[len(ENV_PREFIX):].lower()
                if config_key in CONFIG_KEYS:
                    config[config_key] = value

        return config

    @staticmethod
    def write_cfg(filepath: str, config: RunConfig) -> None:
        """Write the flat echo of a config so that from_cfg reads it back unchanged"""
        lines = ["# residual-augment run configuration (echo)"]
        for key, value in config.to_dict().items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            text = str(value)
            if text != text.strip():
                text = f'"{text}"'
            lines.append(f"{key} = {text}")
        with open(filepath, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")

    @staticmethod
    def create_run_config(config: Dict[str, Any]) -> RunConfig:
        """Create RunConfig from config dict"""
        return RunConfig.from_dict(config)
