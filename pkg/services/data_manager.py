# services/data_manager.py
import logging
import aiofiles
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union
from collections import defaultdict
import asyncio

from core.errors import ConfigError
from core.network import Network, parse_network

FILE_LOCKS = defaultdict(asyncio.Lock)


class DataManager:
    def __init__(self, base_path: Path, networks_dir: Optional[Path] = None):
        self.base_path = base_path
        self.networks_dir = networks_dir
        self.cache: Dict[Path, Network] = {}
        self.logger = logging.getLogger(__name__)

    def resolve(self, path: Union[str, Path]) -> Path:
        """Relative paths are taken from the base path."""
        path = Path(path)
        return (path if path.is_absolute() else self.base_path / path).resolve()

    def resolve_network(self, path: Union[str, Path]) -> Path:
        """Like resolve, but a relative name missing from the base path falls back to the bundled networks."""
        file_path = self.resolve(path)
        if not file_path.exists() and not Path(path).is_absolute() and self.networks_dir is not None:
            bundled = (self.networks_dir / path).resolve()
            if bundled.exists():
                return bundled
        return file_path

    async def _read_file(self, file_path: Path) -> str:
        async with FILE_LOCKS[str(file_path)]:
            async with aiofiles.open(file_path, 'r', encoding='utf-8') as f:
                return await f.read()

    async def load_network(self, path: Union[str, Path]) -> Network:
        """Reads and parses a network file. Uses cache."""
        file_path = self.resolve_network(path)
        if file_path in self.cache:
            return self.cache[file_path]

        text = await self._read_file(file_path)
        network = parse_network(text)
        self.cache[file_path] = network
        self.logger.info(f"Loaded network {file_path.name} (n={network.node_count}, m={network.m}).")
        return network

    async def load_json(self, path: Union[str, Path]) -> Dict[str, Any]:
        file_path = self.resolve(path)
        content = await self._read_file(file_path)
        try:
            data = json.loads(content) if content else {}
        except json.JSONDecodeError as e:
            raise ConfigError(f"{file_path.name} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{file_path.name} must contain a JSON object.")
        return data

    async def write_bytes(self, path: Union[str, Path], payload: bytes):
        file_path = self.resolve(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        async with FILE_LOCKS[str(file_path)]:
            async with aiofiles.open(file_path, 'wb') as f:
                await f.write(payload)
        self.logger.info(f"Wrote {len(payload)} bytes to {file_path}.")
