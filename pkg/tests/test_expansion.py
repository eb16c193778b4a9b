import random

from hypothesis import given, strategies as st

import oracles
from rbacspread.catalog import catalog_from_actions
from rbacspread.expansion import dead_not_actions, effective_set, expand
from rbacspread.grammar import parse
from reference_cases import AAD_EFFECTIVE


def test_expand_aad_matches_oracle(sample):
    got = expand("Microsoft.AAD/*", sample).raws
    assert got == oracles.expand("microsoft.aad/*", sample.raws)
    assert len(got) == 7
    assert set(AAD_EFFECTIVE) < set(got)


def test_expand_explicit_singleton(sample):
    got = expand("Microsoft.Compute/virtualMachines/start/action", sample)
    assert got.raws == ["microsoft.compute/virtualmachines/start/action"]


def test_expand_explicit_absent(sample):
    assert expand("Microsoft.Compute/virtualMachines/teleport/action", sample).raws == []


def test_expand_generated_pattern(sample):
    got = expand("Microsoft.Operati*s/read", sample)
    assert "microsoft.operationalinsights/clusters/operationresults/read" in got


def test_effective_aad(sample):
    got = effective_set("Microsoft.AAD/*", ["Microsoft.AAD/*/read", "Microsoft.AAD/*/delete"], sample)
    assert got.raws == AAD_EFFECTIVE


def test_effective_self_subtraction(sample):
    assert effective_set("Microsoft.AAD/*", ["Microsoft.AAD/*"], sample).raws == []


def test_effective_no_not_actions(sample):
    assert effective_set("Microsoft.Web/*", [], sample).raws == expand("Microsoft.Web/*", sample).raws


def test_dead_not_actions(sample):
    assert dead_not_actions(["Microsoft.AAD/*/read", "Microsoft.AAD/*/delete"], sample) == ["microsoft.aad/*/delete"]


def test_bare_wildcard_override(sample):
    assert len(expand("*", sample, allow_bare_wildcard=True)) == len(sample)


# --- randomized oracle equivalence ----------------------------------------

ALPHABET = "ab."


def synthetic_catalog(rng: random.Random, size: int):
    out = set()
    while len(out) < size:
        provider = "m." + "".join(rng.choice("abc") for _ in range(rng.randint(1, 3)))
        mids = ["".join(rng.choice("ab") for _ in range(rng.randint(1, 3))) for _ in range(rng.randint(0, 3))]
        out.add("/".join([provider, *mids, rng.choice(["read", "write", "delete", "action"])]))
    return sorted(out)


def random_pattern(rng: random.Random, universe):
    base = rng.choice(universe)
    n = len(base)
    for _ in range(50):
        i = rng.randrange(n)
        j = rng.randrange(i, n + 1)
        text = base[:i] + "*" + base[j:]
        if parse(text).accepted:
            return text
    return base


@given(st.integers(0, 2**32 - 1))
def test_effective_equals_bruteforce(seed):
    rng = random.Random(seed)
    universe = synthetic_catalog(rng, rng.randint(2, 60))
    catalog = catalog_from_actions(universe)
    action = random_pattern(rng, universe)
    nots = [random_pattern(rng, universe) for _ in range(rng.randint(0, 3))]
    assert expand(action, catalog).raws == oracles.expand(action, universe)
    assert effective_set(action, nots, catalog).raws == oracles.effective(action, nots, universe)


@given(st.integers(0, 2**32 - 1))
def test_not_action_laws(seed):
    rng = random.Random(seed)
    universe = synthetic_catalog(rng, 40)
    catalog = catalog_from_actions(universe)
    action = random_pattern(rng, universe)
    nots = [random_pattern(rng, universe) for _ in range(3)]
    base = effective_set(action, nots, catalog).raws
    # order independence and idempotent duplicates
    assert effective_set(action, list(reversed(nots)), catalog).raws == base
    assert effective_set(action, nots + nots[:1], catalog).raws == base
    # monotone: adding a NotAction never grows the set
    extra = effective_set(action, nots + [random_pattern(rng, universe)], catalog).raws
    assert set(extra) <= set(base)
    # every member is in the catalog and satisfies the pattern
    for raw in expand(action, catalog).raws:
        assert raw in catalog
        assert oracles.glob_match(action, raw)
