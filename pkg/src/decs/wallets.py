"""Rotating pool of sender wallets for building baseline trades."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .decoder import SwapIntent
from .errors import DecsError, InputFormatError

DEFAULT_ROTATION_SECONDS = 3600.0


class WalletError(DecsError):
    reason = "wallet_error"


class EmptyBatch(WalletError):
    reason = "EmptyBatch"


class NoEligibleWallet(WalletError):
    reason = "NoEligibleWallet"


@dataclass(frozen=True)
class Wallet:
    address: str
    native_balance: int
    token_balances: dict[str, int] = field(default_factory=dict, hash=False)
    approvals: frozenset[tuple[str, str]] = frozenset()

    def balance_of(self, token: str) -> int:
        return self.token_balances.get(token.lower(), 0)

    def has_approval(self, token: str, spender: str) -> bool:
        return (token.lower(), spender.lower()) in self.approvals


@dataclass(frozen=True)
class WalletPool:
    wallets: tuple[Wallet, ...]
    refreshed_at: float
    rotation_interval: float = DEFAULT_ROTATION_SECONDS

    def __post_init__(self) -> None:
        if not self.wallets:
            raise EmptyBatch("wallet pool is empty")


class WalletIndexer(Protocol):
    def fetch(self) -> Sequence[Wallet]: ...


def _hex_int(text: str, what: str) -> int:
    if not isinstance(text, str) or not text.startswith("0x"):
        raise InputFormatError(f"{what}: expected 0x-hex, got {text!r}")
    return int(text, 16)


def wallet_from_json(obj: dict) -> Wallet:
    try:
        return Wallet(
            address=obj["address"].lower(),
            native_balance=_hex_int(obj["native_balance"], "native_balance"),
            token_balances={t.lower(): _hex_int(v, f"balance of {t}") for t, v in obj.get("token_balances", {}).items()},
            approvals=frozenset((t.lower(), s.lower()) for t, s in obj.get("approvals", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad wallet entry: {exc!r}") from None


def wallet_to_json(w: Wallet) -> dict:
    return {
        "address": w.address,
        "native_balance": hex(w.native_balance),
        "token_balances": {t: hex(v) for t, v in sorted(w.token_balances.items())},
        "approvals": [list(a) for a in sorted(w.approvals)],
    }


class SnapshotIndexer:
    """Wallet source backed by a JSON snapshot file (replay mode)."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def fetch(self) -> list[Wallet]:
        try:
            data = json.loads(self.path.read_text())
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{self.path}: {exc}") from None
        if not isinstance(data, list):
            raise InputFormatError(f"{self.path}: expected a JSON list")
        return [wallet_from_json(o) for o in data]


class StaticIndexer:
    def __init__(self, wallets: Sequence[Wallet]) -> None:
        self._wallets = list(wallets)

    def fetch(self) -> list[Wallet]:
        return list(self._wallets)


def refresh_pool(
    indexer: WalletIndexer,
    now: float,
    previous: WalletPool | None = None,
    rotation_interval: float = DEFAULT_ROTATION_SECONDS,
) -> WalletPool:
    """Return ``previous`` unchanged until the rotation interval has elapsed."""
    if previous is not None and now - previous.refreshed_at < previous.rotation_interval:
        return previous
    batch = tuple(indexer.fetch())
    if not batch:
        raise EmptyBatch("indexer returned no wallets")
    return WalletPool(batch, refreshed_at=now, rotation_interval=rotation_interval)


def is_eligible(wallet: Wallet, intent: SwapIntent, gas_reserve: int, spender: str) -> bool:
    return (
        wallet.has_approval(intent.src_token, spender)
        and wallet.balance_of(intent.src_token) >= intent.amount_in
        and wallet.native_balance >= gas_reserve
    )


def select_wallet(pool: WalletPool, intent: SwapIntent, gas_reserve: int, spender: str) -> Wallet:
    """Eligible wallet with the smallest address."""
    eligible = [w for w in pool.wallets if is_eligible(w, intent, gas_reserve, spender)]
    if not eligible:
        raise NoEligibleWallet(f"no wallet can trade {intent.amount_in} of {intent.src_token}")
    chosen = min(eligible, key=lambda w: w.address.lower())
    assert is_eligible(chosen, intent, gas_reserve, spender)
    return chosen
