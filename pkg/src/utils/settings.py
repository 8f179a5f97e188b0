"""Runtime defaults read from the environment (and an optional .env file)."""

import os

from dotenv import load_dotenv

load_dotenv()


class Settings:
    """Centralized simulation defaults."""

    DEFAULT_SEED = int(os.environ.get("HDRG_DEFAULT_SEED", "0"))
    TARGET_FAILURES = int(os.environ.get("HDRG_TARGET_FAILURES", "1000"))
    MAX_SAMPLES = int(os.environ.get("HDRG_MAX_SAMPLES", "10000000"))
    BATCH_SIZE = int(os.environ.get("HDRG_BATCH_SIZE", "256"))
    WORKERS = int(os.environ.get("HDRG_WORKERS", "1"))
    ORACLE_MAX_QUBITS = int(os.environ.get("HDRG_ORACLE_MAX_QUBITS", "26"))
    STRATIFIED_BUDGET = int(os.environ.get("HDRG_STRATIFIED_BUDGET", "20000"))
    STRATIFIED_TAIL = float(os.environ.get("HDRG_STRATIFIED_TAIL", "1e-12"))
