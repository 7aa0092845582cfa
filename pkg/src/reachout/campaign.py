"""Live intervention workflow: rounds, recruitment statuses, belief rollover.

State changes append to a hash-chained event log; replaying the log rebuilds
the campaign bit-for-bit (verified by hash equality), which is the tamper
and corruption check for a field deployment.  Timestamps come from a logical
clock (fixed epoch advanced one second per event) so reruns are bit-identical
by construction; no wall-clock value ever enters the record.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from pathlib import Path

from .errors import StateMachineError, ValidationError
from .graphs import UncertainNetwork
from .ingest import SurveyRecord, SurveyWave, read_network_file
from .rng import BEHAVIOR_STREAM, MASK64, ROUND_STREAM, derive_seed, rand_unit
from .selector import (BeliefState, RankedCandidates, SelectionParams,
                       greedy_select, update_belief, zero_belief)


class CandidateStatus(str, Enum):
    SELECTED = "selected"
    CONTACTED = "contacted"
    UNREACHABLE = "unreachable"
    DECLINED = "declined"
    TRAINED = "trained"


LEGAL_TRANSITIONS: dict[CandidateStatus, frozenset[CandidateStatus]] = {
    CandidateStatus.SELECTED: frozenset(
        {CandidateStatus.CONTACTED, CandidateStatus.UNREACHABLE}),
    CandidateStatus.CONTACTED: frozenset(
        {CandidateStatus.DECLINED, CandidateStatus.TRAINED}),
    CandidateStatus.UNREACHABLE: frozenset(),
    CandidateStatus.DECLINED: frozenset(),
    CandidateStatus.TRAINED: frozenset(),
}

TERMINAL_STATUSES = frozenset({CandidateStatus.UNREACHABLE,
                               CandidateStatus.DECLINED,
                               CandidateStatus.TRAINED})


@dataclass(frozen=True)
class CampaignConfig:
    k_select: int = 8
    k_train: int = 4
    num_rounds: int = 3
    num_samples: int = 1000
    runs_per_sample: int = 20
    propagation_prob: float | None = None
    master_seed: int = 0
    method: str = "auto"
    workers: int = 1

    def __post_init__(self):
        for name in ("k_select", "k_train", "num_rounds", "num_samples",
                     "runs_per_sample", "workers"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.k_train > self.k_select:
            raise ValidationError(
                f"k_train={self.k_train} exceeds k_select={self.k_select}")
        if self.method not in ("auto", "exact", "sampled"):
            raise ValidationError(f"unknown method {self.method!r}")

    def to_dict(self) -> dict:
        return {
            "k_select": self.k_select, "k_train": self.k_train,
            "num_rounds": self.num_rounds, "num_samples": self.num_samples,
            "runs_per_sample": self.runs_per_sample,
            "propagation_prob": self.propagation_prob,
            "master_seed": self.master_seed, "method": self.method,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        return cls(**d)

    def selection_params(self, round_index: int) -> SelectionParams:
        """Each round draws its ensemble from a distinct derived seed."""
        return SelectionParams(
            method=self.method,
            num_samples=self.num_samples,
            runs_per_sample=self.runs_per_sample,
            master_seed=derive_seed(self.master_seed, ROUND_STREAM, round_index),
            propagation_prob=self.propagation_prob,
            workers=self.workers,
        )


@dataclass
class CandidateEntry:
    label: str
    gain: float
    status: CandidateStatus


@dataclass
class Round:
    index: int
    entries: list[CandidateEntry]
    belief_before: BeliefState
    belief_after: BeliefState | None
    opened_at: str
    closed_at: str | None

    @property
    def closed(self) -> bool:
        return self.closed_at is not None

    @property
    def trained(self) -> list[str]:
        return [e.label for e in self.entries
                if e.status is CandidateStatus.TRAINED]

    def entry(self, label: str) -> CandidateEntry | None:
        for e in self.entries:
            if e.label == label:
                return e
        return None


GENESIS_HASH = "0" * 64
_EVENT_EPOCH = 946684800  # logical clock origin; one event = one second


def _event_timestamp(seq: int) -> str:
    t = datetime.fromtimestamp(_EVENT_EPOCH + seq, tz=timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _belief_to_dict(b: BeliefState) -> dict:
    return {"per_node_prob": {k: v for k, v in sorted(b.per_node_prob.items())},
            "round_index": b.round_index,
            "trained": sorted(b.trained)}


def _belief_from_dict(d: dict) -> BeliefState:
    return BeliefState(dict(d["per_node_prob"]), d["round_index"],
                       frozenset(d["trained"]))


class EventLog:
    """Append-only, hash-chained record.

    Line format: seq,timestamp,event_type,payload,prev_hash — the payload is
    compact JSON (may itself contain commas); the three left fields and the
    trailing hash are comma-free, so split(',', 3) + rsplit(',', 1) parses a
    line unambiguously.  Each line's prev_hash is the sha256 of the entire
    previous line (genesis uses 64 zeros).
    """

    def __init__(self, lines: list[str] | None = None):
        self.lines: list[str] = []
        self.last_hash = GENESIS_HASH
        for line in lines or []:
            self.lines.append(line)
            self.last_hash = hashlib.sha256(line.encode()).hexdigest()

    def append(self, event_type: str, payload: dict) -> str:
        seq = len(self.lines)
        line = (f"{seq},{_event_timestamp(seq)},{event_type},"
                f"{_canonical_json(payload)},{self.last_hash}")
        self.lines.append(line)
        self.last_hash = hashlib.sha256(line.encode()).hexdigest()
        return line

    @staticmethod
    def parse_line(line: str) -> tuple[int, str, str, dict, str]:
        seq, timestamp, event_type, rest = line.split(",", 3)
        payload_json, prev_hash = rest.rsplit(",", 1)
        return (int(seq), timestamp, event_type, json.loads(payload_json),
                prev_hash)

    def verify_chain(self) -> None:
        """Raises with the first divergent sequence number."""
        expect = GENESIS_HASH
        for i, line in enumerate(self.lines):
            seq, _, _, _, prev_hash = self.parse_line(line)
            if seq != i:
                raise ValidationError(f"event log: sequence gap at line {i}")
            if prev_hash != expect:
                raise ValidationError(
                    f"event log: hash chain broken at seq {i}")
            expect = hashlib.sha256(line.encode()).hexdigest()


class Campaign:
    """One live intervention: network + config + rounds + belief + log."""

    def __init__(self, net: UncertainNetwork, config: CampaignConfig,
                 network_path: str = "", network_hash: str = ""):
        self.net = net
        self.config = config
        self.network_path = network_path
        self.network_hash = network_hash
        self.rounds: list[Round] = []
        self.belief: BeliefState = zero_belief()
        self.log = EventLog()

    @classmethod
    def start(cls, net: UncertainNetwork, config: CampaignConfig,
              network_path: str = "", network_hash: str = "") -> "Campaign":
        camp = cls(net, config, network_path, network_hash)
        camp.log.append("campaign_init", {
            "config": config.to_dict(),
            "network_hash": network_hash,
            "network_path": network_path,
            "num_nodes": net.num_nodes,
        })
        return camp

    # -- round workflow ----------------------------------------------------

    def open_round_index(self) -> int | None:
        if self.rounds and not self.rounds[-1].closed:
            return self.rounds[-1].index
        return None

    def _require_open(self) -> Round:
        if self.open_round_index() is None:
            raise StateMachineError("no open round")
        return self.rounds[-1]

    def exclusions(self) -> set[str]:
        """Previously trained or declined youth never re-enter the pool;
        unreachable ones do."""
        out: set[str] = set()
        for rnd in self.rounds:
            for e in rnd.entries:
                if e.status in (CandidateStatus.TRAINED,
                                CandidateStatus.DECLINED):
                    out.add(e.label)
        return out

    def open_round(self) -> RankedCandidates:
        if self.open_round_index() is not None:
            raise StateMachineError("round already open")
        if len(self.rounds) >= self.config.num_rounds:
            raise StateMachineError(
                f"campaign complete after {self.config.num_rounds} rounds")
        index = len(self.rounds)
        params = self.config.selection_params(index)
        ranked = greedy_select(self.net, self.config.k_select, self.belief,
                               self.exclusions(), params)
        line = self.log.append("round_open", {
            "index": index,
            "candidates": [{"label": lab, "gain": gain}
                           for lab, gain in ranked.entries],
        })
        opened_at = self.log.parse_line(line)[1]
        entries = [CandidateEntry(lab, gain, CandidateStatus.SELECTED)
                   for lab, gain in ranked.entries]
        self.rounds.append(Round(index, entries, self.belief, None,
                                 opened_at, None))
        return ranked

    def record_status(self, label: str, status: CandidateStatus | str) -> None:
        status = CandidateStatus(status)
        rnd = self._require_open()
        entry = rnd.entry(label)
        if entry is None:
            raise ValidationError(
                f"{label} is not a candidate in round {rnd.index}")
        if status not in LEGAL_TRANSITIONS[entry.status]:
            raise StateMachineError(
                f"illegal transition {entry.status.value} -> {status.value} "
                f"for {label}")
        if (status is CandidateStatus.TRAINED
                and len(rnd.trained) >= self.config.k_train):
            raise StateMachineError(
                f"training slots full: k_train={self.config.k_train}")
        self.log.append("status", {"round": rnd.index, "label": label,
                                   "status": status.value})
        entry.status = status

    def close_round(self) -> BeliefState:
        rnd = self._require_open()
        unresolved = [e.label for e in rnd.entries
                      if e.status not in TERMINAL_STATUSES]
        if unresolved:
            raise StateMachineError(
                f"unresolved candidate(s): {', '.join(unresolved)}")
        params = self.config.selection_params(rnd.index)
        new_belief = update_belief(self.belief, rnd.trained, self.net, params)
        line = self.log.append("round_close", {
            "index": rnd.index,
            "trained": sorted(rnd.trained),
            "belief_after": _belief_to_dict(new_belief),
        })
        rnd.closed_at = self.log.parse_line(line)[1]
        rnd.belief_after = new_belief
        self.belief = new_belief
        return new_belief

    # -- snapshots, hashing, replay ---------------------------------------

    def state_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "network_path": self.network_path,
            "network_hash": self.network_hash,
            "belief": _belief_to_dict(self.belief),
            "rounds": [{
                "index": r.index,
                "entries": [{"label": e.label, "gain": e.gain,
                             "status": e.status.value} for e in r.entries],
                "belief_before": _belief_to_dict(r.belief_before),
                "belief_after": (None if r.belief_after is None
                                 else _belief_to_dict(r.belief_after)),
                "opened_at": r.opened_at,
                "closed_at": r.closed_at,
            } for r in self.rounds],
            "num_events": len(self.log.lines),
            "last_event_hash": self.log.last_hash,
        }

    def state_hash(self) -> str:
        return hashlib.sha256(_canonical_json(self.state_dict()).encode()
                              ).hexdigest()

    @classmethod
    def from_state_dict(cls, d: dict, net: UncertainNetwork,
                        log_lines: list[str]) -> "Campaign":
        camp = cls(net, CampaignConfig.from_dict(d["config"]),
                   d["network_path"], d["network_hash"])
        camp.belief = _belief_from_dict(d["belief"])
        for rd in d["rounds"]:
            entries = [CandidateEntry(e["label"], e["gain"],
                                      CandidateStatus(e["status"]))
                       for e in rd["entries"]]
            camp.rounds.append(Round(
                rd["index"], entries,
                _belief_from_dict(rd["belief_before"]),
                (None if rd["belief_after"] is None
                 else _belief_from_dict(rd["belief_after"])),
                rd["opened_at"], rd["closed_at"]))
        camp.log = EventLog(log_lines)
        return camp

    @classmethod
    def replay(cls, net: UncertainNetwork, log_lines: list[str]) -> "Campaign":
        """Rebuild state purely from the event log.

        Selection and belief values are taken from the recorded payloads, so
        replay is cheap and exact; the chain is verified first.
        """
        log = EventLog(log_lines)
        log.verify_chain()
        camp: Campaign | None = None
        for line in log_lines:
            seq, ts, etype, payload, _ = EventLog.parse_line(line)
            if etype == "campaign_init":
                if camp is not None:
                    raise ValidationError(
                        f"event log: second campaign_init at seq {seq}")
                camp = cls(net, CampaignConfig.from_dict(payload["config"]),
                           payload["network_path"], payload["network_hash"])
            elif camp is None:
                raise ValidationError(
                    f"event log: {etype} before campaign_init at seq {seq}")
            elif etype == "round_open":
                entries = [CandidateEntry(c["label"], c["gain"],
                                          CandidateStatus.SELECTED)
                           for c in payload["candidates"]]
                camp.rounds.append(Round(payload["index"], entries,
                                         camp.belief, None, ts, None))
            elif etype == "status":
                rnd = camp.rounds[-1]
                entry = rnd.entry(payload["label"])
                if entry is None or rnd.index != payload["round"]:
                    raise ValidationError(
                        f"event log: stray status event at seq {seq}")
                entry.status = CandidateStatus(payload["status"])
            elif etype == "round_close":
                rnd = camp.rounds[-1]
                rnd.closed_at = ts
                rnd.belief_after = _belief_from_dict(payload["belief_after"])
                camp.belief = rnd.belief_after
            else:
                raise ValidationError(
                    f"event log: unknown event type {etype!r} at seq {seq}")
        if camp is None:
            raise ValidationError("event log: empty")
        camp.log = log
        return camp


# -- persistence -----------------------------------------------------------

STATE_FILENAME = "state.json"
EVENTS_FILENAME = "events.log"
NETWORK_FILENAME = "network.txt"


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def campaign_exists(directory) -> bool:
    return (Path(directory) / STATE_FILENAME).exists()


def _atomic_write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def save_campaign(camp: Campaign, directory) -> None:
    """State snapshot + full event log, both written atomically."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    state = json.dumps(camp.state_dict(), sort_keys=True, indent=2) + "\n"
    _atomic_write(directory / STATE_FILENAME, state)
    log_text = "".join(line + "\n" for line in camp.log.lines)
    _atomic_write(directory / EVENTS_FILENAME, log_text)


def load_campaign(directory) -> Campaign:
    """Load and verify: network content hash, event chain, and the state
    snapshot's recorded chain head must all agree."""
    directory = Path(directory)
    state_path = directory / STATE_FILENAME
    if not state_path.exists():
        raise FileNotFoundError(f"no campaign at {directory}")
    state = json.loads(state_path.read_text(encoding="utf-8"))
    net_path = directory / state["network_path"]
    net = read_network_file(net_path)
    actual = file_sha256(net_path)
    if state["network_hash"] and actual != state["network_hash"]:
        raise ValidationError(
            f"network file hash mismatch: expected {state['network_hash']}, "
            f"found {actual}")
    lines = (directory / EVENTS_FILENAME).read_text(
        encoding="utf-8").splitlines()
    camp = Campaign.from_state_dict(state, net, lines)
    camp.log.verify_chain()
    if camp.log.last_hash != state["last_event_hash"]:
        raise ValidationError(
            "state snapshot does not match the event log head")
    return camp


# -- outcome tabulation ----------------------------------------------------

WAVE_ORDER = (SurveyWave.BASELINE, SurveyWave.ONE_MONTH, SurveyWave.THREE_MONTH)


def percent(numerator: int, denominator: int) -> float:
    """One decimal, half away from zero, computed on the exact ratio."""
    q = (Decimal(numerator * 100) / Decimal(denominator)).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP)
    return float(q)


@dataclass(frozen=True)
class Cell:
    """One outcome at one wave: affirmative count over non-missing count."""
    numerator: int
    denominator: int

    @property
    def pct(self) -> float | None:
        if self.denominator == 0:
            return None
        return percent(self.numerator, self.denominator)

    def to_dict(self) -> dict:
        return {"numerator": self.numerator, "denominator": self.denominator,
                "pct": self.pct}


@dataclass(frozen=True)
class WaveRow:
    wave: SurveyWave
    n: int
    hiv_test_6mo: Cell
    unprotected_sex: Cell
    spoke_to_pca: Cell | None  # not asked at baseline

    def to_dict(self) -> dict:
        return {"wave": self.wave.value, "n": self.n,
                "hiv_test_6mo": self.hiv_test_6mo.to_dict(),
                "unprotected_sex": self.unprotected_sex.to_dict(),
                "spoke_to_pca": (None if self.spoke_to_pca is None
                                 else self.spoke_to_pca.to_dict())}


@dataclass(frozen=True)
class SurveyWaveTable:
    rows: tuple[WaveRow, ...]
    retention: tuple[tuple[str, int, float | None], ...]  # wave, n, pct of baseline
    complete_case: bool
    complete_case_n: int

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows],
                "retention": [{"wave": w, "n": n, "pct": p}
                              for w, n, p in self.retention],
                "complete_case": self.complete_case,
                "complete_case_n": self.complete_case_n}

    def to_text(self) -> str:
        def cell(c: Cell | None) -> str:
            if c is None:
                return "--"
            if c.pct is None:
                return "n/a"
            return f"{c.pct:.1f}% ({c.numerator}/{c.denominator})"

        mode = ("complete case" if self.complete_case else "all assessed")
        out = [f"outcomes by wave ({mode}, descriptive proportions)"]
        out.append(f"{'wave':<10}{'n':>4}  {'hiv_test_6mo':<18}"
                   f"{'unprotected_sex':<18}{'spoke_to_pca':<18}")
        for r in self.rows:
            out.append(f"{r.wave.value:<10}{r.n:>4}  "
                       f"{cell(r.hiv_test_6mo):<18}"
                       f"{cell(r.unprotected_sex):<18}"
                       f"{cell(r.spoke_to_pca):<18}")
        ret = []
        for w, n, p in self.retention:
            ret.append(f"{n}" if p is None else f"{n} ({p:.1f}%)")
        out.append("retention: " + " / ".join(ret))
        return "\n".join(out)


def tabulate_outcomes(records: list[SurveyRecord],
                      complete_case: bool) -> SurveyWaveTable:
    """Per-wave proportions over non-missing responses.

    Complete-case mode restricts every wave to participants assessed at all
    three waves; retention counts always describe the full record set.
    """
    if not records:
        raise ValidationError("no survey records")
    by_wave: dict[SurveyWave, set[str]] = {w: set() for w in WAVE_ORDER}
    for r in records:
        by_wave[r.wave].add(r.participant)
    complete = set.intersection(*(by_wave[w] for w in WAVE_ORDER))
    kept = records
    if complete_case:
        kept = [r for r in records if r.participant in complete]

    rows = []
    for wave in WAVE_ORDER:
        recs = [r for r in kept if r.wave is wave]

        def cell(getter) -> Cell:
            vals = [getter(r) for r in recs]
            present = [v for v in vals if v is not None]
            return Cell(sum(1 for v in present if v), len(present))

        rows.append(WaveRow(
            wave=wave, n=len(recs),
            hiv_test_6mo=cell(lambda r: r.hiv_test_6mo),
            unprotected_sex=cell(lambda r: r.unprotected_sex),
            spoke_to_pca=(None if wave is SurveyWave.BASELINE
                          else cell(lambda r: r.spoke_to_pca)),
        ))

    base_n = len(by_wave[SurveyWave.BASELINE])
    retention = []
    for wave in WAVE_ORDER:
        n = len(by_wave[wave])
        if wave is SurveyWave.BASELINE or base_n == 0:
            retention.append((wave.value, n, None))
        else:
            retention.append((wave.value, n, percent(n, base_n)))
    return SurveyWaveTable(tuple(rows), tuple(retention), complete_case,
                           len(complete))


# -- closed-loop simulation ------------------------------------------------

@dataclass(frozen=True)
class RecruitBehavior:
    """Stochastic field response: can staff reach a candidate, and does a
    reached candidate decline."""
    contact_prob: float = 2.0 / 3.0
    decline_prob: float = 0.1

    def __post_init__(self):
        for name in ("contact_prob", "decline_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"{name}={p} outside [0, 1]")


@dataclass
class RoundOutcome:
    index: int
    selected: list[str]
    statuses: dict[str, str]
    trained: list[str]


@dataclass
class CampaignTrajectory:
    campaign: Campaign
    rounds: list[RoundOutcome]
    belief_trace: list[BeliefState]
    total_trained: int
    final_coverage: float


def simulate_campaign(net: UncertainNetwork, config: CampaignConfig,
                      behavior: RecruitBehavior, seed: int,
                      network_path: str = "",
                      network_hash: str = "") -> CampaignTrajectory:
    """Run every round with stochastic candidate responses.

    Candidates are attempted in rank order; once the round's training slots
    fill, the rest are recorded unreachable (they stay eligible later).
    Deterministic given seed: one counter-based draw stream, separate from
    every cascade stream.
    """
    camp = Campaign.start(net, config, network_path, network_hash)
    key = (seed ^ BEHAVIOR_STREAM) & MASK64
    counter = 0
    outcomes: list[RoundOutcome] = []
    trace: list[BeliefState] = [camp.belief]
    for _ in range(config.num_rounds):
        ranked = camp.open_round()
        slots = config.k_train
        for label in ranked.labels:
            if slots == 0:
                camp.record_status(label, CandidateStatus.UNREACHABLE)
                continue
            reached = rand_unit(key, counter) < behavior.contact_prob
            counter += 1
            if not reached:
                camp.record_status(label, CandidateStatus.UNREACHABLE)
                continue
            camp.record_status(label, CandidateStatus.CONTACTED)
            declined = rand_unit(key, counter) < behavior.decline_prob
            counter += 1
            if declined:
                camp.record_status(label, CandidateStatus.DECLINED)
            else:
                camp.record_status(label, CandidateStatus.TRAINED)
                slots -= 1
        rnd = camp.rounds[-1]
        outcomes.append(RoundOutcome(
            rnd.index, [e.label for e in rnd.entries],
            {e.label: e.status.value for e in rnd.entries},
            list(rnd.trained)))
        trace.append(camp.close_round())
    total = sum(len(o.trained) for o in outcomes)
    coverage = float(sum(camp.belief.per_node_prob.values()))
    return CampaignTrajectory(camp, outcomes, trace, total, coverage)
