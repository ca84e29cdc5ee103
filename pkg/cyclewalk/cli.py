"""
Kommandozeile für cyclewalk

Befehle: dump-u, charpoly, period, sweep, zeta, abszeta, verify
Exit-Codes: 0 Erfolg, 1 ungültige Spezifikation, 2 interne Prüfung fehlgeschlagen, 64 Bedienfehler
"""
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple
import argparse
import csv
import io
import json
import logging
import sys
import time

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

# Pfad für Imports hinzufügen
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from config import config as cyclewalk_config
from cyclewalk.errors import CycleWalkError, InternalCheckError, OutputError, UsageError
from cyclewalk.period_engine import PeriodResult, decide_period, sweep
from cyclewalk.spectral_engine import full_charpoly, sector_charpoly
from cyclewalk.verification import run_checks
from cyclewalk.walk_builder import WalkSpec, evolution_matrix
from cyclewalk.zeta_engine import (
    absolute_zeta_descriptor,
    eval_Zf_mellin,
    recognize_kurokawa,
    walk_zeta,
)

CYCLEWALK_THREADS = cyclewalk_config.CYCLEWALK_THREADS
DEFAULT_TOLERANCE = cyclewalk_config.DEFAULT_TOLERANCE
TOOL_VERSION = cyclewalk_config.TOOL_VERSION
LOG_LEVEL = cyclewalk_config.LOG_LEVEL

logger = logging.getLogger(__name__)

COMMANDS = ("dump-u", "charpoly", "period", "sweep", "zeta", "abszeta", "verify")
TABLE_COLUMNS = ("family", "L", "N", "verdict", "T", "certificate_kind", "certificate_detail")


# ============================================================================
# Modelle
# ============================================================================

class RunConfig(BaseModel):
    """Validierte Konfiguration eines CLI-Aufrufs."""

    model_config = ConfigDict(frozen=True)

    command: Literal["dump-u", "charpoly", "period", "sweep", "zeta", "abszeta", "verify"]
    family: Literal["M", "F", "both"] = "M"
    states: List[int] = Field(default_factory=lambda: [3])
    vertices: Optional[List[int]] = None
    sector: Optional[int] = None
    format: Literal["text", "json", "csv"] = "text"
    output: Optional[Path] = None
    tolerance: float = DEFAULT_TOLERANCE
    jobs: int = CYCLEWALK_THREADS
    w: float = 6.0
    s: float = 1.0
    verify_mellin: bool = False
    only: List[str] = Field(default_factory=list)

    @field_validator("states")
    @classmethod
    def _odd_states(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("Mindestens ein L angeben")
        for L in value:
            if L < 3 or L % 2 == 0:
                raise ValueError(f"L muss ungerade und >= 3 sein (L={L})")
        return value

    @field_validator("vertices")
    @classmethod
    def _enough_vertices(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is None:
            return value
        if not value:
            raise ValueError("Leerer Knotenbereich")
        for N in value:
            if N < 2:
                raise ValueError(f"N muss >= 2 sein (N={N})")
        return value

    @field_validator("tolerance")
    @classmethod
    def _positive_tolerance(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"Toleranz muss positiv sein ({value})")
        return value

    @field_validator("jobs")
    @classmethod
    def _positive_jobs(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"jobs muss >= 1 sein ({value})")
        return value

    @property
    def families(self) -> List[str]:
        return ["M", "F"] if self.family == "both" else [self.family]

    def specs(self) -> List[WalkSpec]:
        if self.vertices is None:
            raise UsageError(f"Befehl {self.command} benötigt --vertices")
        return [WalkSpec(family=f, states=L, vertices=N)
                for f in self.families for L in self.states for N in self.vertices]

    def echo(self) -> dict:
        data = self.model_dump(mode="json")
        data.pop("output", None)
        data.pop("jobs", None)
        return data


class ResultEnvelope(BaseModel):
    """Strukturierte Ausgabe (JSON): Version, Konfiguration, Ergebnisse, Laufzeiten."""

    tool: str = "cyclewalk"
    tool_version: str = TOOL_VERSION
    command: str
    config: dict
    results: List[dict]
    timings: List[float] = Field(default_factory=list)

    def render(self) -> str:
        return json.dumps(self.model_dump(), indent=2, sort_keys=True, ensure_ascii=False)


# ============================================================================
# Tabellen
# ============================================================================

def _row(result: PeriodResult) -> Tuple[str, ...]:
    return (
        result.spec.family,
        str(result.spec.states),
        str(result.spec.vertices),
        result.verdict,
        "" if result.T is None else str(result.T),
        result.certificate_kind,
        result.certificate_detail,
    )


def render_table(results: Sequence[PeriodResult], fmt: str = "text") -> str:
    """
    Stabile Spaltenfolge family, L, N, verdict, T, certificate_kind, certificate_detail.

    Raises:
        UsageError: bei leerer Ergebnisliste oder unbekanntem Format
    """
    if not results:
        raise UsageError("Keine Ergebnisse zum Darstellen")
    if fmt == "json":
        return json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True, ensure_ascii=False)
    rows = [_row(r) for r in results]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        writer.writerows(rows)
        return buffer.getvalue().rstrip("\n")
    if fmt == "text":
        widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(TABLE_COLUMNS)]
        lines = ["  ".join(c.ljust(widths[i]) for i, c in enumerate(TABLE_COLUMNS)).rstrip()]
        lines += ["  ".join(v.ljust(widths[i]) for i, v in enumerate(r)).rstrip() for r in rows]
        return "\n".join(lines)
    raise UsageError(f"Unbekanntes Format: {fmt!r}")


# ============================================================================
# Befehle
# ============================================================================

def _envelope(config: RunConfig, results: List[dict], timings: List[float]) -> str:
    return ResultEnvelope(command=config.command, config=config.echo(), results=results,
                          timings=[round(t, 6) for t in timings]).render()


def _cmd_dump_u(config: RunConfig) -> str:
    matrices = [evolution_matrix(spec) for spec in config.specs()]
    if config.format == "json":
        return _envelope(config, [u.to_json() for u in matrices], [])
    sep = "," if config.format == "csv" else " "
    blocks = []
    for u in matrices:
        rows = u.to_json()["rows"]
        header = [] if config.format == "csv" else [f"# U {u.spec.label} ({u.dimension}×{u.dimension})"]
        blocks.append("\n".join(header + [sep.join(r) for r in rows]))
    return "\n\n".join(blocks)


def _cmd_charpoly(config: RunConfig) -> str:
    results, timings, lines = [], [], []
    for spec in config.specs():
        started = time.perf_counter()
        if config.sector is not None:
            poly = sector_charpoly(spec, config.sector)
            results.append({"spec": spec.label, "k": config.sector,
                            "coeffs": [c.to_json() for c in poly.coeffs], "text": poly.render()})
            lines.append(f"f_({spec.label}; k={config.sector})(x) = {poly.render()}")
        else:
            bundle = full_charpoly(spec, jobs=config.jobs)
            results.append(bundle.to_dict())
            lines.append(f"f_({spec.label})(x) = {bundle.product.render()}")
            for k, s in enumerate(bundle.sectors):
                lines.append(f"  k={k}: {s.render()}")
        timings.append(time.perf_counter() - started)
    if config.format == "json":
        return _envelope(config, results, timings)
    return "\n".join(lines)


def _cmd_period(config: RunConfig) -> str:
    if config.command == "sweep":
        cells = sweep(config.specs(), jobs=config.jobs)
        results = [c.result for c in cells]
        timings = [c.seconds for c in cells]
    else:
        results, timings = [], []
        for spec in config.specs():
            started = time.perf_counter()
            results.append(decide_period(spec))
            timings.append(time.perf_counter() - started)
    if config.format == "json":
        return _envelope(config, [r.to_dict() for r in results], timings)
    return render_table(results, config.format)


def _cmd_zeta(config: RunConfig) -> str:
    results, timings, lines = [], [], []
    for spec in config.specs():
        started = time.perf_counter()
        zeta = walk_zeta(spec)
        form = recognize_kurokawa(zeta.as_rational_function())
        data = zeta.to_dict()
        data["kurokawa"] = form.to_dict() if form else None
        results.append(data)
        timings.append(time.perf_counter() - started)
        lines.append(f"ζ_({spec.label})(u) = {data['text']}")
        if form:
            lines.append(f"  = {form.render('u')}")
    if config.format == "json":
        return _envelope(config, results, timings)
    return "\n".join(lines)


def _cmd_abszeta(config: RunConfig) -> str:
    results, timings, lines = [], [], []
    for family in config.families:
        for L in config.states:
            spec = WalkSpec(family=family, states=L, vertices=L)
            started = time.perf_counter()
            form = recognize_kurokawa(walk_zeta(spec).as_rational_function())
            if form is None:
                results.append({"spec": spec.label, "descriptor": None})
                lines.append(f"⚠️  {spec.label}: keine Kurokawa-Form")
                timings.append(time.perf_counter() - started)
                continue
            desc = absolute_zeta_descriptor(form)
            data = {"spec": spec.label, "descriptor": desc.to_dict()}
            lines.append(f"# {spec.label}: f(x) = {form.render()}")
            lines.append(desc.render_text())
            if config.verify_mellin:
                mellin = eval_Zf_mellin(form, config.w, config.s, config.tolerance)
                series = desc.subset_series(config.w, config.s, config.tolerance)
                diff = abs(mellin - series)
                ok = diff < 2 * config.tolerance
                data["mellin"] = {"w": config.w, "s": config.s, "tol": config.tolerance,
                                  "mellin": mellin, "subset_series": series,
                                  "difference": diff, "agrees": ok}
                mark = "✅" if ok else "❌"
                lines.append(f"{mark} Mellin {mellin:.12g} vs. Reihe {series:.12g} (Differenz {diff:.2e})")
                if not ok:
                    raise InternalCheckError(f"Mellin-Identität verletzt für {spec.label}: Differenz {diff:.2e}")
            results.append(data)
            timings.append(time.perf_counter() - started)
    if config.format == "json":
        return _envelope(config, results, timings)
    return "\n".join(lines)


def _cmd_verify(config: RunConfig) -> Tuple[int, str]:
    outcomes = run_checks(only=config.only or None)
    failed = [o for o in outcomes if not o.passed]
    if config.format == "json":
        text = _envelope(config, [o.to_dict() for o in outcomes], [o.seconds for o in outcomes])
    else:
        lines = [o.render() for o in outcomes]
        lines.append("")
        if failed:
            lines.append(f"❌ {len(failed)} von {len(outcomes)} Prüfungen fehlgeschlagen")
        else:
            lines.append(f"✅ Alle {len(outcomes)} Prüfungen bestanden")
        text = "\n".join(lines)
    return (2 if failed else 0), text


def run(config: RunConfig) -> Tuple[int, str]:
    """
    Führt einen validierten Aufruf aus.

    Returns:
        (Exit-Code, serialisierte Ausgabe)
    """
    if config.command == "verify":
        return _cmd_verify(config)
    if config.command == "dump-u":
        return 0, _cmd_dump_u(config)
    if config.command == "charpoly":
        return 0, _cmd_charpoly(config)
    if config.command in ("period", "sweep"):
        return 0, _cmd_period(config)
    if config.command == "zeta":
        return 0, _cmd_zeta(config)
    if config.command == "abszeta":
        return 0, _cmd_abszeta(config)
    raise UsageError(f"Unbekannter Befehl: {config.command!r}")


# ============================================================================
# argparse
# ============================================================================

class _Parser(argparse.ArgumentParser):
    """argparse-Fehler werden zu UsageError (Exit 64) statt SystemExit(2)."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_int_list(text: str) -> List[int]:
    """
    "3,5,7" | "2..12" | "5" | "2..4,9" -> sortierte, eindeutige Liste.

    Raises:
        UsageError: bei ungültigem oder leerem Bereich
    """
    values: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"Leerer Eintrag in {text!r}")
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if lo > hi:
                    raise UsageError(f"Leerer Bereich {part!r}")
                values.extend(range(lo, hi + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise UsageError(f"Ungültiger Bereich {part!r}")
    return sorted(set(values))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--family", choices=["M", "F", "both"], default="M")
    common.add_argument("--states", default="3", help="L-Werte, z.B. 3,5,7")
    common.add_argument("--vertices", default=None, help="N-Werte, z.B. 2..12 oder 5")
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--output", default=None, help="Ausgabedatei (sonst stdout)")
    common.add_argument("--jobs", type=int, default=None, help="Worker-Prozesse (Default: CYCLEWALK_THREADS)")

    parser = _Parser(prog="cyclewalk", description="Exakte Perioden und Zeta-Funktionen von Grover-Walks auf C_N")
    parser.add_argument("--version", action="version", version=f"cyclewalk {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("dump-u", parents=[common], help="Zeitentwicklungsoperator U ausgeben")
    charpoly = sub.add_parser("charpoly", parents=[common], help="charakteristische Polynome")
    charpoly.add_argument("--sector", type=int, default=None)
    sub.add_parser("period", parents=[common], help="Periode entscheiden")
    sub.add_parser("sweep", parents=[common], help="Perioden über ein Gitter")
    sub.add_parser("zeta", parents=[common], help="Walk-Zeta-Funktion")
    abszeta = sub.add_parser("abszeta", parents=[common], help="Deskriptor der absoluten Zeta")
    abszeta.add_argument("--verify-mellin", action="store_true")
    abszeta.add_argument("--w", type=float, default=6.0)
    abszeta.add_argument("--s", type=float, default=1.0)
    abszeta.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    verify = sub.add_parser("verify", parents=[common], help="Prüfkatalog ausführen")
    verify.add_argument("--only", action="append", default=[], help="nur diese Prüf-ID (mehrfach möglich)")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    argv -> RunConfig.

    Raises:
        UsageError: bei Bedienfehlern
        ValidationError: bei ungültigen Werten (z.B. gerades L)
    """
    args = build_parser().parse_args(argv)
    data = {
        "command": args.command,
        "family": args.family,
        "states": parse_int_list(args.states),
        "vertices": parse_int_list(args.vertices) if args.vertices is not None else None,
        "format": args.format,
        "output": args.output,
        "sector": getattr(args, "sector", None),
        "verify_mellin": getattr(args, "verify_mellin", False),
        "w": getattr(args, "w", 6.0),
        "s": getattr(args, "s", 1.0),
        "tolerance": getattr(args, "tol", DEFAULT_TOLERANCE),
        "only": getattr(args, "only", []),
    }
    if args.jobs is not None:
        data["jobs"] = args.jobs
    return RunConfig(**data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = parse_args(argv)
        code, text = run(config)
        if config.output:
            _write_output(config.output, text)
        else:
            sys.stdout.write(text + "\n")
    except ValidationError as e:
        print(f"❌ Ungültige Eingabe: {e}", file=sys.stderr)
        return 1
    except CycleWalkError as e:
        print(f"❌ {type(e).__name__}: {e.detail}", file=sys.stderr)
        return e.exit_code
    return code


def _write_output(path: Path, text: str):
    try:
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Ausgabe nach {path} nicht möglich: {e.strerror or e}")
    logger.info(f"Ausgabe geschrieben: {path}")


if __name__ == "__main__":
    sys.exit(main())
