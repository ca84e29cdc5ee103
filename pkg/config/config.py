"""
Konfiguration für cyclewalk

Lädt alle Konfigurationen aus .env Datei
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Lade .env Datei (NUR Projekt-Root/.env)
BASE_DIR = Path(__file__).parent.parent  # Projekt-Root
load_dotenv(BASE_DIR / ".env")


def _int_env(name: str, default: int, minimum: int = 0) -> int:
    """Liest einen Integer aus der Umgebung und prüft die Untergrenze."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name}={raw!r} ist keine ganze Zahl. Bitte .env prüfen.")
    if value < minimum:
        raise ValueError(f"{name}={value} ist zu klein (Minimum: {minimum}).")
    return value


def _float_env(name: str, default: float) -> float:
    """Liest einen positiven Float aus der Umgebung."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name}={raw!r} ist keine Zahl. Bitte .env prüfen.")
    if value <= 0:
        raise ValueError(f"{name}={value} muss positiv sein.")
    return value


# ============================================================================
# Parallelisierung
# ============================================================================
# Worker-Pool für sweep (CLI --jobs hat Vorrang)
CYCLEWALK_THREADS = _int_env("CYCLEWALK_THREADS", os.cpu_count() or 1, minimum=1)

# ============================================================================
# Exakte Gegenproben
# ============================================================================
# Budget für die Bestätigung per Matrixpotenz: L*N*T <= POWER_CHECK_BUDGET
POWER_CHECK_BUDGET = _int_env("POWER_CHECK_BUDGET", 1_000_000, minimum=0)

# Direkte Determinante det(xI - U) nur bis zu dieser Dimension L*N
DIRECT_CHECK_MAX_DIM = _int_env("DIRECT_CHECK_MAX_DIM", 60, minimum=0)

# Obergrenze für a (Anzahl der Zählerfaktoren) bei der Teilmengen-Aufzählung
MAX_SUBSET_FACTORS = _int_env("MAX_SUBSET_FACTORS", 20, minimum=1)

# ============================================================================
# Numerik (absolute Zeta-Funktionen)
# ============================================================================
DEFAULT_TOLERANCE = _float_env("DEFAULT_TOLERANCE", 1e-4)
MELLIN_SPLIT_POINT = _float_env("MELLIN_SPLIT_POINT", 0.25)
MPMATH_DPS = _int_env("MPMATH_DPS", 30, minimum=15)

# Obergrenze für den Abschneideradius der Hurwitz-Reihe (Speicher: ~8 Byte pro Gitterwert)
HURWITZ_MAX_RADIUS = _int_env("HURWITZ_MAX_RADIUS", 1 << 22, minimum=64)

# ============================================================================
# Ausgabe / Logging
# ============================================================================
LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING").upper()
TOOL_VERSION = os.getenv("TOOL_VERSION", "1.0.0")

# ============================================================================
# Pfade
# ============================================================================
CHECKS_FILE = Path(os.getenv("CHECKS_FILE", str(BASE_DIR / "checks" / "checks.json")))
