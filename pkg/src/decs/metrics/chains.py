"""Per-chain settings, including the block-lag freshness bound."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import InputFormatError

ETHEREUM, BSC, ARBITRUM, POLYGON = 1, 56, 42161, 137


@dataclass(frozen=True)
class ChainConfig:
    chain_id: int
    max_block_lag: int
    native_token: str
    name: str = ""
    gas_price_unit: int = 1

    def __post_init__(self) -> None:
        if self.max_block_lag < 0:
            raise ValueError("max_block_lag must be non-negative")


def chains_from_json(entries: list[dict]) -> dict[int, ChainConfig]:
    out: dict[int, ChainConfig] = {}
    try:
        for e in entries:
            cfg = ChainConfig(
                chain_id=int(e["chain_id"]),
                max_block_lag=int(e["max_block_lag"]),
                native_token=e["native_token"].lower(),
                name=e.get("name", ""),
                gas_price_unit=int(e.get("gas_price_unit", 1)),
            )
            out[cfg.chain_id] = cfg
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad chain config entry: {exc!r}") from None
    return out


def default_chains() -> dict[int, ChainConfig]:
    text = resources.files("decs").joinpath("data/chains.json").read_text()
    return chains_from_json(json.loads(text))


def load_chains(path: str | Path | None) -> dict[int, ChainConfig]:
    """Shipped defaults, overridden entry-by-entry by ``path`` when given."""
    chains = default_chains()
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path}: {exc}") from None
        if not isinstance(data, list):
            raise InputFormatError(f"{path}: expected a JSON list")
        chains.update(chains_from_json(data))
    return chains


def check_freshness(mined_block: int, simulation_block: int, cfg: ChainConfig) -> bool:
    lag = mined_block - simulation_block
    return 0 <= lag <= cfg.max_block_lag
