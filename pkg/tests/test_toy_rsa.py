import random

import pytest

from rescomp.errors import LedgerError
from rescomp.ledger import (
    Category,
    SecurityFlag,
    category_totals,
    interaction_events,
    modexp,
    observable_flow,
    run_toy_rsa,
    security_vector,
)


def test_roundtrip_example():
    ledger, transcript = run_toy_rsa(32, 42, seed=5)
    assert transcript.recovered == 42
    assert transcript.modulus.bit_length() == 32
    assert pow(42, transcript.public_exponent, transcript.modulus) == transcript.ciphertext
    assert [event.subprocess for event in ledger.events] == [
        "keygen",
        "send_public_key",
        "encrypt",
        "send_ciphertext",
        "decrypt",
    ]


@pytest.mark.parametrize("bits", [16, 24, 32])
def test_roundtrip_for_random_messages(bits):
    rng = random.Random(bits)
    for _ in range(100):
        message = rng.randrange(2 ** (bits - 1))
        seed = rng.randrange(2**32)
        _, transcript = run_toy_rsa(bits, message, seed)
        assert transcript.recovered == message


def test_trace_spans_categories():
    ledger, _ = run_toy_rsa(32, 42, seed=1)
    totals = category_totals(ledger)
    assert sum(1 for amount in totals.values() if amount > 0) >= 3
    assert totals[Category.PRIMITIVE] > 0


def test_encrypt_event_interacts():
    ledger, transcript = run_toy_rsa(24, 1000, seed=2)
    interacting = interaction_events(ledger)
    assert [event.subprocess for event in interacting] == ["encrypt"]
    assert interacting[0].costs[Category.INFORMATION] == round(1000 * 4.643856189774724)
    assert transcript.encryption_duration == 10
    assert transcript.side_channels[0].manufacturing_cost


def test_adversary_view():
    ledger, _ = run_toy_rsa(32, 7, seed=3)
    vector = security_vector(ledger, observable_flow)
    assert vector.totals[Category.INFORMATION] > 0
    assert vector.totals[Category.COMMUNICATION] == 32 + 17 + 32
    assert vector.flag is SecurityFlag.INTERACTING


def test_deterministic_in_seed():
    assert run_toy_rsa(16, 9, seed=11) == run_toy_rsa(16, 9, seed=11)


def test_errors():
    with pytest.raises(LedgerError, match="toy scale only"):
        run_toy_rsa(65, 1)
    with pytest.raises(LedgerError):
        run_toy_rsa(4, 1)
    with pytest.raises(LedgerError, match="message must be < modulus"):
        run_toy_rsa(16, 2**16)


def test_modexp_counts_multiplications():
    assert modexp(42, 65537, 3233) == (pow(42, 65537, 3233), 19)
    assert modexp(5, 0, 7) == (1, 0)
