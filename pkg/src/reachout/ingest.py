"""File ingestion: roster, platform edges, field observations, surveys.

The roster is the privacy authority: every other file may only name enrolled
participants, and off-roster labels are hard errors rather than silent drops
so data-entry mistakes surface immediately.  Parsers collect every bad line
and report them itemized in one error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path

from .errors import ValidationError
from .graphs import Provenance, UncertainEdge, UncertainNetwork, build_network


@dataclass(frozen=True)
class PlatformEdgeRecord:
    u_label: str
    v_label: str


@dataclass(frozen=True)
class FieldObservationRecord:
    u_label: str
    v_label: str
    observed_on: date


@dataclass(frozen=True)
class ProvenancePriors:
    """Edge existence probability by evidence source.

    Field observation of an actual interaction is stronger evidence than a
    platform tie alone; agreement of both is stronger than either.
    """

    p_platform: float = 0.6
    p_field: float = 0.8
    p_both: float = 0.95

    def __post_init__(self):
        for name in ("p_platform", "p_field", "p_both"):
            p = getattr(self, name)
            if not 0.0 < p <= 1.0:
                raise ValidationError(f"{name}={p} outside (0, 1]")
        if self.p_both < max(self.p_platform, self.p_field):
            raise ValidationError(
                "p_both must be >= max(p_platform, p_field)")

    def for_provenance(self, prov: Provenance) -> float:
        return {Provenance.PLATFORM: self.p_platform,
                Provenance.FIELD: self.p_field,
                Provenance.BOTH: self.p_both}[prov]


class SurveyWave(Enum):
    BASELINE = "baseline"
    ONE_MONTH = "1mo"
    THREE_MONTH = "3mo"


@dataclass(frozen=True)
class SurveyRecord:
    participant: str
    wave: SurveyWave
    hiv_test_6mo: bool | None
    unprotected_sex: bool | None
    spoke_to_pca: bool | None


def _raise_itemized(errors: list[str]):
    if errors:
        raise ValidationError("; ".join(errors))


def parse_roster(path) -> list[str]:
    """One participant label per line; blank lines and # comments ignored."""
    labels: list[str] = []
    seen: set[str] = set()
    errors: list[str] = []
    name = Path(path).name
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "," in line:
                errors.append(f"{name}:{lineno}: label may not contain a comma")
                continue
            if line in seen:
                errors.append(f"{name}:{lineno}: duplicate label {line}")
                continue
            seen.add(line)
            labels.append(line)
    _raise_itemized(errors)
    if not labels:
        raise ValidationError(f"{name}: roster is empty")
    return labels


def _check_pair(u: str, v: str, roster: set[str], where: str,
                errors: list[str]) -> bool:
    ok = True
    for lab in (u, v):
        if lab not in roster:
            errors.append(f"{where}: unknown participant {lab}")
            ok = False
    if ok and u == v:
        errors.append(f"{where}: self-loop on {u}")
        ok = False
    return ok


def parse_platform_edges(path, roster) -> list[PlatformEdgeRecord]:
    """CSV u_label,v_label; both must be enrolled.  Empty file is valid."""
    roster_set = set(roster)
    records: list[PlatformEdgeRecord] = []
    errors: list[str] = []
    name = Path(path).name
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                errors.append(f"{name}:{lineno}: expected u,v got {len(row)} fields")
                continue
            u, v = row[0].strip(), row[1].strip()
            if _check_pair(u, v, roster_set, f"{name}:{lineno}", errors):
                records.append(PlatformEdgeRecord(u, v))
    _raise_itemized(errors)
    return records


def parse_field_log(path, window_start: date, window_end: date,
                    roster) -> list[FieldObservationRecord]:
    """CSV u_label,v_label,YYYY-MM-DD; dates outside the recruitment window
    are rejected with the offending date reported."""
    roster_set = set(roster)
    records: list[FieldObservationRecord] = []
    errors: list[str] = []
    name = Path(path).name
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                errors.append(
                    f"{name}:{lineno}: expected u,v,date got {len(row)} fields")
                continue
            u, v, raw_date = (c.strip() for c in row)
            try:
                seen = date.fromisoformat(raw_date)
            except ValueError:
                errors.append(f"{name}:{lineno}: malformed date {raw_date}")
                continue
            if not window_start <= seen <= window_end:
                errors.append(
                    f"{name}:{lineno}: date {seen.isoformat()} outside window "
                    f"{window_start.isoformat()}..{window_end.isoformat()}")
                continue
            if _check_pair(u, v, roster_set, f"{name}:{lineno}", errors):
                records.append(FieldObservationRecord(u, v, seen))
    _raise_itemized(errors)
    return records


def merge_sources(platform_records, field_records, priors: ProvenancePriors,
                  roster, propagation_prob: float) -> UncertainNetwork:
    """One uncertain edge per unordered pair; provenance decides the prior.

    Every roster member becomes a node, including isolated ones.
    """
    platform_pairs = {tuple(sorted((r.u_label, r.v_label)))
                      for r in platform_records}
    field_pairs = {tuple(sorted((r.u_label, r.v_label)))
                   for r in field_records}
    edges = []
    for pair in sorted(platform_pairs | field_pairs):
        if pair in platform_pairs and pair in field_pairs:
            prov = Provenance.BOTH
        elif pair in platform_pairs:
            prov = Provenance.PLATFORM
        else:
            prov = Provenance.FIELD
        edges.append(UncertainEdge(pair[0], pair[1],
                                   priors.for_provenance(prov), prov))
    return build_network(list(roster), edges, propagation_prob)


_SURVEY_HEADER = ["participant", "wave", "hiv_test_6mo", "unprotected_sex",
                  "spoke_to_pca"]
_WAVE_TOKENS = {w.value: w for w in SurveyWave}


def _parse_flag(raw: str, where: str, col: str,
                errors: list[str]) -> bool | None:
    raw = raw.strip()
    if raw == "":
        return None
    if raw == "0":
        return False
    if raw == "1":
        return True
    errors.append(f"{where}: {col} must be 0, 1 or empty, got {raw!r}")
    return None


def parse_survey(path, roster=None) -> list[SurveyRecord]:
    """CSV with header; booleans 0/1, empty cell = missing response.

    spoke_to_pca is only meaningful after peers were trained, so a baseline
    value is an error, and each participant may appear once per wave.
    """
    records: list[SurveyRecord] = []
    errors: list[str] = []
    seen: set[tuple[str, SurveyWave]] = set()
    roster_set = set(roster) if roster is not None else None
    name = Path(path).name
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _SURVEY_HEADER:
            raise ValidationError(
                f"{name}: expected header {','.join(_SURVEY_HEADER)}")
        for lineno, row in enumerate(reader, 2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            where = f"{name}:{lineno}"
            if len(row) != 5:
                errors.append(f"{where}: expected 5 fields got {len(row)}")
                continue
            participant = row[0].strip()
            if roster_set is not None and participant not in roster_set:
                errors.append(f"{where}: unknown participant {participant}")
                continue
            wave = _WAVE_TOKENS.get(row[1].strip())
            if wave is None:
                errors.append(f"{where}: unknown wave {row[1].strip()!r}")
                continue
            if (participant, wave) in seen:
                errors.append(
                    f"{where}: duplicate record for {participant} at "
                    f"{wave.value}")
                continue
            seen.add((participant, wave))
            hiv = _parse_flag(row[2], where, "hiv_test_6mo", errors)
            sex = _parse_flag(row[3], where, "unprotected_sex", errors)
            spoke = _parse_flag(row[4], where, "spoke_to_pca", errors)
            if wave is SurveyWave.BASELINE and spoke is not None:
                errors.append(f"{where}: spoke_to_pca not asked at baseline")
                continue
            records.append(SurveyRecord(participant, wave, hiv, sex, spoke))
    _raise_itemized(errors)
    return records


def _fmt(p: float) -> str:
    return repr(float(p))


def write_network_file(net: UncertainNetwork, path):
    """Canonical network file: header, one label line per node, then edge
    lines u,v,prob,provenance in canonical order.  Node lines carry no comma,
    which is what distinguishes the two record kinds; probabilities use
    shortest round-trip formatting, so the file is a bit-exact target.
    """
    lines = [f"nodes={net.num_nodes} prop={_fmt(net.propagation_prob)}"]
    lines.extend(net.labels)
    for e in net.edges:
        lines.append(f"{e.u},{e.v},{_fmt(e.existence_prob)},{e.provenance.value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_network_file(path) -> UncertainNetwork:
    name = Path(path).name
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{name}: empty network file")
    header = lines[0].split()
    if (len(header) != 2 or not header[0].startswith("nodes=")
            or not header[1].startswith("prop=")):
        raise ValidationError(f"{name}: malformed header {lines[0]!r}")
    try:
        n = int(header[0][len("nodes="):])
        prop = float(header[1][len("prop="):])
    except ValueError:
        raise ValidationError(f"{name}: malformed header {lines[0]!r}") from None
    labels: list[str] = []
    edges: list[UncertainEdge] = []
    errors: list[str] = []
    for lineno, line in enumerate(lines[1:], 2):
        if "," not in line:
            labels.append(line.strip())
            continue
        parts = [c.strip() for c in line.split(",")]
        if len(parts) != 4:
            errors.append(f"{name}:{lineno}: expected u,v,prob,provenance")
            continue
        u, v, raw_p, raw_prov = parts
        try:
            p = float(raw_p)
        except ValueError:
            errors.append(f"{name}:{lineno}: bad probability {raw_p!r}")
            continue
        try:
            prov = Provenance(raw_prov)
        except ValueError:
            errors.append(f"{name}:{lineno}: bad provenance {raw_prov!r}")
            continue
        edges.append(UncertainEdge(u, v, p, prov))
    _raise_itemized(errors)
    if len(labels) != n:
        raise ValidationError(
            f"{name}: header says {n} nodes, file lists {len(labels)}")
    return build_network(labels, edges, prop)
