import logging
import random
from typing import Tuple

from Crypto.Util.number import GCD, getPrime, inverse
from pydantic import BaseModel, ConfigDict

from rescomp.core import bit_size
from rescomp.errors import LedgerError

from .events import (
    Category,
    CostEvent,
    Ledger,
    SideChannel,
    record_event,
    timing_leak_bits,
)

logger = logging.getLogger("rescomp.ledger")

MIN_MODULUS_BITS = 8
MAX_MODULUS_BITS = 64
PUBLIC_EXPONENT = 65537
MAX_KEYGEN_ATTEMPTS = 1000
# one product p * q and one modular inverse, each charged as a multiplication
KEYGEN_MULTIPLICATIONS = 2

KEY_OWNER = 0
SENDER = 1
SEND_STEPS = frozenset({"send_public_key", "send_ciphertext"})

ENCRYPTION_TIMING = SideChannel(
    name="encryption_timing",
    description="encryption takes time proportional to the bit length of the plaintext",
    manufacturing_cost=True,
)


class Transcript(BaseModel):
    model_config = ConfigDict(frozen=True)

    modulus: int
    public_exponent: int
    ciphertext: int
    recovered: int
    encryption_duration: int
    side_channels: Tuple[SideChannel, ...] = ()


class _CountingRandfunc:
    """Seeded byte source for pycryptodome that counts its draws."""

    def __init__(self, seed: int):
        self._random = random.Random(seed)
        self.draws = 0

    def __call__(self, size: int) -> bytes:
        self.draws += 1
        return self._random.randbytes(size)


def modexp(base: int, exponent: int, modulus: int) -> Tuple[int, int]:
    """Left-to-right square-and-multiply.

    Returns:
        Tuple[int, int]: base ** exponent mod modulus, and the number of
            modular multiplications performed.
    """
    result = 1 % modulus
    multiplications = 0
    for bit in bin(exponent)[2:].lstrip("0"):
        result = result * result % modulus
        multiplications += 1
        if bit == "1":
            result = result * base % modulus
            multiplications += 1
    return result, multiplications


def _generate_key(modulus_bits: int, randfunc: _CountingRandfunc) -> Tuple[int, int]:
    for _ in range(MAX_KEYGEN_ATTEMPTS):
        p = getPrime((modulus_bits + 1) // 2, randfunc=randfunc)
        q = getPrime(modulus_bits // 2, randfunc=randfunc)
        if p == q:
            continue
        modulus = p * q
        if modulus.bit_length() != modulus_bits:
            continue
        phi = (p - 1) * (q - 1)
        if GCD(PUBLIC_EXPONENT, phi) != 1:
            continue
        return modulus, inverse(PUBLIC_EXPONENT, phi)
    raise LedgerError(f"no {modulus_bits}-bit key after {MAX_KEYGEN_ATTEMPTS} attempts")


def plaintext_duration(message: int) -> int:
    """Encryption time of the toy timing model: the bit length of the plaintext."""
    return message.bit_length()


def duration_classes(modulus: int) -> list:
    """One plaintext below the modulus per distinct encryption duration."""
    return [0] + [2**k for k in range(modulus.bit_length()) if 2**k < modulus]


def observable_flow(event: CostEvent) -> bool:
    """What a passive adversary sees: explicit messages and leaking steps."""
    return event.subprocess in SEND_STEPS or event.amount(Category.INFORMATION) > 0


def run_toy_rsa(modulus_bits: int, message: int, seed: int = 0) -> Tuple[Ledger, Transcript]:
    """Textbook RSA exchange with every step ledgered.

    Agent 0 owns the key pair, agent 1 encrypts. Encryption leaks its plaintext
    bit length through timing; the leak is ledgered as information in
    milli-bits on the encrypt event.

    Args:
        modulus_bits (int): bit length of the modulus, 8 to 64.
        message (int): plaintext, 0 <= message < modulus.
        seed (int, optional): seed of key generation. Defaults to 0.

    Raises:
        LedgerError: modulus out of toy range or message not below the modulus.

    Returns:
        Tuple[Ledger, Transcript]: the cost trace and the exchanged values.
    """
    if modulus_bits > MAX_MODULUS_BITS:
        raise LedgerError("toy scale only")
    if modulus_bits < MIN_MODULUS_BITS:
        raise LedgerError(f"modulus_bits must be >= {MIN_MODULUS_BITS}")
    if message < 0:
        raise LedgerError("message must be >= 0")

    randfunc = _CountingRandfunc(seed)
    modulus, private_exponent = _generate_key(modulus_bits, randfunc)
    if message >= modulus:
        raise LedgerError(f"message must be < modulus {modulus}")
    step_cost = bit_size(modulus) ** 2

    ledger = Ledger()
    ledger = record_event(
        ledger,
        CostEvent(
            agent=KEY_OWNER,
            subprocess="keygen",
            costs={
                Category.COMPUTATION: KEYGEN_MULTIPLICATIONS * step_cost,
                Category.PRIMITIVE: randfunc.draws,
            },
        ),
    )
    ledger = record_event(
        ledger,
        CostEvent(
            agent=KEY_OWNER,
            subprocess="send_public_key",
            costs={
                Category.COMMUNICATION: bit_size(modulus) + bit_size(PUBLIC_EXPONENT)
            },
        ),
    )

    ciphertext, encrypt_mults = modexp(message, PUBLIC_EXPONENT, modulus)
    leak = timing_leak_bits(plaintext_duration, duration_classes(modulus))
    ledger = record_event(
        ledger,
        CostEvent(
            agent=SENDER,
            subprocess="encrypt",
            costs={
                Category.COMPUTATION: encrypt_mults * step_cost,
                Category.INFORMATION: round(1000 * leak),
            },
        ),
    )
    ledger = record_event(
        ledger,
        CostEvent(
            agent=SENDER,
            subprocess="send_ciphertext",
            costs={Category.COMMUNICATION: bit_size(modulus)},
        ),
    )

    recovered, decrypt_mults = modexp(ciphertext, private_exponent, modulus)
    ledger = record_event(
        ledger,
        CostEvent(
            agent=KEY_OWNER,
            subprocess="decrypt",
            costs={Category.COMPUTATION: decrypt_mults * step_cost},
        ),
    )
    if recovered != message:
        raise LedgerError(f"decryption returned {recovered} for {message}")
    logger.debug(
        "toy rsa: %d-bit modulus, %d PRNG draws, %.4f bits leaked",
        modulus_bits,
        randfunc.draws,
        leak,
    )

    transcript = Transcript(
        modulus=modulus,
        public_exponent=PUBLIC_EXPONENT,
        ciphertext=ciphertext,
        recovered=recovered,
        encryption_duration=plaintext_duration(message),
        side_channels=(ENCRYPTION_TIMING,),
    )
    return ledger, transcript
