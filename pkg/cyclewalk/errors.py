"""
Fehlerklassen für cyclewalk

Jeder Fehler trägt einen Exit-Code (wie eine HTTPException ihren status_code),
damit die CLI Mathe-Fehler von Bedienfehlern unterscheiden kann.
"""
from typing import Optional


class CycleWalkError(Exception):
    """Basisklasse aller cyclewalk-Fehler."""

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class SpecError(CycleWalkError, ValueError):
    """Ungültige Walk-Spezifikation oder verletzte Vorbedingung (Exit 1)."""

    exit_code = 1


class ArithmeticDomainError(SpecError):
    """Vorbedingung der exakten Arithmetik verletzt (Division durch 0, Ordnungskonflikt, ...)."""


class InternalCheckError(CycleWalkError):
    """Eine exakte Selbstprüfung ist fehlgeschlagen (Exit 2) - deutet auf einen Rechenfehler hin."""

    exit_code = 2


class FormulaMismatchError(InternalCheckError):
    """Geschlossene Formel und exakte Engine stimmen nicht überein."""

    def __init__(self, detail: str, spec: Optional[str] = None,
                 sector: Optional[int] = None, degree: Optional[int] = None):
        super().__init__(detail)
        self.spec = spec
        self.sector = sector
        self.degree = degree

    def to_dict(self) -> dict:
        return {
            "detail": self.detail,
            "spec": self.spec,
            "sector": self.sector,
            "degree": self.degree,
        }


class UsageError(CycleWalkError):
    """Fehlerhafter CLI-Aufruf (Exit 64)."""

    exit_code = 64


class OutputError(UsageError):
    """Ausgabedatei konnte nicht geschrieben werden (Exit 64)."""
