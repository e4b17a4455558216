"""Desk-scale generator of imbalanced, UNSW-NB15-like flow features.

Three latent factors drive the nine selected columns: a flow-activity
factor shared by both classes, an attack axis shifted for attack flows, and
a class-neutral size factor. Activity dominates every rate, size and TTL
column, so each column alone separates the classes poorly; dload, dmeansz
and trans_depth carry activity without the attack axis and are what a
model needs to factor it out. TCP sequence numbers are zero for the
UDP-heavy majority and uniform noise otherwise.
"""

from __future__ import annotations

import numpy as np

from nbcoded.defaults import FEATURES

from .flows import Dataset

SERVICES: tuple[str, ...] = ("unknown", "ftp", "dns", "http")
SERVICE_WEIGHTS: tuple[float, ...] = (0.5, 0.1, 0.25, 0.15)
ATTACK_FAMILIES: tuple[str, ...] = (
    "Fuzzers", "Analysis", "Backdoors", "DoS", "Exploits",
    "Generic", "Reconnaissance", "Shellcode", "Worms",
)

# attack-axis shift at zero overlap
_ATTACK_SHIFT = 3.5
_ACTIVITY_LOADING = 2.0
_TCP_RATE = 0.15
_SEQ_SPACE = 2.0**32


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def synthetic_flows(
    n: int = 20_000,
    attack_rate: float = 0.13,
    overlap: float = 0.35,
    seed: int = 0,
) -> Dataset:
    """Generate n labelled flows; deterministic for a given seed."""
    if n < 4:
        raise ValueError(f"need at least 4 rows, got {n}")
    if not 0.0 < attack_rate < 1.0:
        raise ValueError(f"attack_rate must be in (0, 1), got {attack_rate}")
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must be in [0, 1], got {overlap}")

    rng = np.random.default_rng(seed)
    n_attack = min(max(2, int(round(n * attack_rate))), n - 2)
    labels = np.zeros(n, dtype=np.int8)
    labels[:n_attack] = 1
    labels = rng.permutation(labels)

    activity, attack_axis, size = rng.standard_normal((3, n))
    attack_axis[labels == 1] += (1.0 - overlap) * _ATTACK_SHIFT
    noise = 0.3 * rng.standard_normal((n, 8))

    busy = _ACTIVITY_LOADING * activity
    signal = busy + attack_axis

    sload = 1e4 * _softplus(6.0 + signal + noise[:, 0])
    dload = 1e4 * _softplus(6.0 + busy + noise[:, 1])
    dmeansz = 40.0 + 80.0 * _softplus(6.0 + busy + size + noise[:, 2])
    smeansz = 40.0 + 60.0 * _softplus(6.0 + signal - 0.5 * size + noise[:, 3])
    djit = 5.0 * _softplus(6.0 + signal + 0.5 * size + noise[:, 4])
    trans_depth = rng.poisson(_softplus(1.0 + 0.5 * busy + noise[:, 5])).astype(np.float64)

    high_ttl = signal + noise[:, 6] > 3.0
    sttl = np.where(high_ttl, 254.0, np.where(noise[:, 7] > 0.0, 62.0, 31.0))

    tcp = rng.random(n) < _TCP_RATE
    stcpb = np.where(tcp, np.floor(rng.random(n) * _SEQ_SPACE), 0.0)
    dtcpb = np.where(tcp, np.floor(rng.random(n) * _SEQ_SPACE), 0.0)

    columns = {
        "sload": sload, "dload": dload, "dmeansz": dmeansz, "smeansz": smeansz,
        "stcpb": stcpb, "dtcpb": dtcpb, "sttl": sttl, "djit": djit, "trans_depth": trans_depth,
    }
    features = np.column_stack([columns[name] for name in FEATURES])

    services = rng.choice(np.array(SERVICES, dtype=object), size=n, p=SERVICE_WEIGHTS)
    families = np.full(n, None, dtype=object)
    families[labels == 1] = rng.choice(np.array(ATTACK_FAMILIES, dtype=object), size=int(labels.sum()))

    return Dataset(
        feature_names=FEATURES,
        features=features,
        labels=labels,
        services=services,
        attack_families=families,
        row_ids=np.arange(n, dtype=np.int64),
        source_id=f"synthetic(n={n}, attack_rate={attack_rate}, overlap={overlap}, seed={seed})",
    )
