from __future__ import annotations

import pytest

from decs.decoder import SelectorRegistry
from decs.metrics import load_chains, load_prices
from decs.pipeline import RunConfig, RunInputs, run_feed
from decs.simulator import load_pools
from decs.synthetic import SynthConfig, write_fixture
from decs.wallets import SnapshotIndexer, refresh_pool

ADDR_A = "0x" + "aa" * 20
ADDR_B = "0x" + "bb" * 20
ADDR_C = "0x" + "cc" * 20


def load_inputs(paths) -> RunInputs:
    return RunInputs(
        pools=load_pools(paths.pools),
        prices=load_prices(paths.prices),
        wallets=refresh_pool(SnapshotIndexer(paths.wallets), now=0.0),
        chains=load_chains(paths.chains),
        registry=SelectorRegistry.load(paths.registry),
    )


def run_fixture(paths, config: RunConfig | None = None):
    return run_feed(paths.feed, load_inputs(paths), config or RunConfig())


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory):
    return write_fixture(tmp_path_factory.mktemp("small"), SynthConfig(n_swaps=60, seed=7, noise=2))


@pytest.fixture(scope="session")
def small_run(small_fixture):
    return run_fixture(small_fixture)
