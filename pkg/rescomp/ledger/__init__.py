from .events import (
    UNITS,
    Category,
    CostEvent,
    Ledger,
    Observable,
    SecurityFlag,
    SecurityVector,
    SideChannel,
    agent_exposure,
    category_totals,
    concat,
    interaction_events,
    ledger_from_json,
    ledger_to_json,
    record_event,
    security_vector,
    timing_leak_bits,
)
from .toy_rsa import (
    ENCRYPTION_TIMING,
    KEY_OWNER,
    SENDER,
    Transcript,
    duration_classes,
    modexp,
    observable_flow,
    plaintext_duration,
    run_toy_rsa,
)
