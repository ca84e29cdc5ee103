"""
Check-Manager für den verify-Befehl

Verwaltet alle Prüfungen zentral aus einer JSON-Datei.
Jede Prüfung nennt die Funktion in cyclewalk.verification und ihre Parameter.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class CheckManager:
    """
    Verwaltet den Prüfkatalog aus einer zentralen JSON-Datei.

    Features:
    - Laden aller Prüfungen beim Start
    - Zugriff auf einzelne Prüfungen über ID
    - Filter auf aktivierte Prüfungen bzw. eine Kategorie
    """

    def __init__(self, checks_file: Optional[str] = None):
        """
        Initialisiert den Check-Manager.

        Args:
            checks_file: Pfad zur checks.json Datei (optional)
        """
        if checks_file:
            self.checks_file = Path(checks_file)
        else:
            # Standard: checks.json im gleichen Verzeichnis
            self.checks_file = Path(__file__).parent / "checks.json"

        self._checks_data: Dict = {}
        self._checks_cache: Dict[str, Any] = {}  # Cache für schnellen Zugriff

        self.load_checks()

    def load_checks(self) -> bool:
        """
        Lädt alle Prüfungen aus der JSON-Datei.

        Returns:
            True wenn erfolgreich, False bei Fehler
        """
        try:
            if not self.checks_file.exists():
                logger.warning(f"⚠️  Prüfkatalog nicht gefunden: {self.checks_file}")
                return False

            with open(self.checks_file, 'r', encoding='utf-8') as f:
                self._checks_data = json.load(f)

            self._build_cache()

            logger.info(f"✅ Prüfkatalog geladen: {len(self._checks_cache)} Prüfungen aus {self.checks_file}")
            return True

        except json.JSONDecodeError as e:
            logger.error(f"❌ Fehler beim Parsen des Prüfkatalogs: {e}")
            return False

    def _build_cache(self):
        """Baut einen Cache für schnellen Zugriff auf Prüfungen über ihre ID."""
        self._checks_cache = {}

        for category in sorted(self._checks_data.get('categories', []), key=lambda c: c.get('order', 0)):
            for check in category.get('checks', []):
                check_id = check.get('id')
                if check_id:
                    self._checks_cache[check_id] = {
                        'category_id': category.get('id'),
                        'category_name': category.get('name'),
                        **check
                    }

    def get_check_data(self, check_id: str) -> Optional[Dict]:
        """
        Holt alle Daten einer Prüfung (inkl. Kategorie).

        Args:
            check_id: Die eindeutige ID der Prüfung

        Returns:
            Dict mit allen Prüfungsdaten, oder None
        """
        return self._checks_cache.get(check_id)

    def get_params(self, check_id: str) -> Dict:
        data = self._checks_cache.get(check_id) or {}
        return dict(data.get('params', {}))

    def get_categories(self) -> List[Dict]:
        return self._checks_data.get('categories', [])

    def get_all_checks(self) -> List[Dict]:
        return list(self._checks_cache.values())

    def get_enabled_checks(self, category_id: Optional[str] = None) -> List[Dict]:
        """
        Gibt die aktivierten Prüfungen in Katalogreihenfolge zurück.

        Args:
            category_id: nur diese Kategorie (optional)
        """
        return [
            check for check in self._checks_cache.values()
            if check.get('enabled', True) and (category_id is None or check['category_id'] == category_id)
        ]


# Singleton-Instanz für globalen Zugriff
_check_manager_instance: Optional[CheckManager] = None


def get_check_manager() -> CheckManager:
    """
    Gibt die globale CheckManager-Instanz zurück.
    Erstellt sie bei Bedarf (Pfad aus CHECKS_FILE).
    """
    global _check_manager_instance
    if _check_manager_instance is None:
        from config import config as cyclewalk_config
        _check_manager_instance = CheckManager(str(cyclewalk_config.CHECKS_FILE))
    return _check_manager_instance
