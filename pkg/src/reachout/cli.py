"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 state-machine
violation.  Every failure prints exactly one machine-parsable line to stderr
of the form `reachout: <category>: <message>`.  All floats are printed with
shortest round-trip formatting so reruns are bit-identical.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from datetime import date
from pathlib import Path

from .baselines import baseline_comparison
from .campaign import (Campaign, CampaignConfig, NETWORK_FILENAME,
                       RecruitBehavior, campaign_exists, file_sha256,
                       load_campaign, save_campaign, simulate_campaign,
                       tabulate_outcomes)
from .errors import StateMachineError, ValidationError
from .ingest import (ProvenancePriors, merge_sources, parse_field_log,
                     parse_platform_edges, parse_roster, parse_survey,
                     read_network_file, write_network_file)
from .selector import SelectionParams, greedy_select

CONFIG_DEFAULTS = {
    "k_select": 8, "k_train": 4, "num_rounds": 3,
    "num_samples": 1000, "runs_per_sample": 20,
    "master_seed": 0, "method": "auto", "workers": 1,
    "propagation_prob": None,
    "p_platform": 0.6, "p_field": 0.8, "p_both": 0.95,
    "contact_prob": 2.0 / 3.0, "decline_prob": 0.1,
}


def _settings(args) -> dict:
    """defaults < config file < explicit flags."""
    merged = dict(CONFIG_DEFAULTS)
    if getattr(args, "config", None):
        from .config import parse_config_file
        merged.update(parse_config_file(args.config))
    for key in CONFIG_DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _campaign_config(settings: dict) -> CampaignConfig:
    return CampaignConfig(
        k_select=settings["k_select"], k_train=settings["k_train"],
        num_rounds=settings["num_rounds"],
        num_samples=settings["num_samples"],
        runs_per_sample=settings["runs_per_sample"],
        propagation_prob=settings["propagation_prob"],
        master_seed=settings["master_seed"], method=settings["method"],
        workers=settings["workers"])


def _print_ranked(entries) -> None:
    for rank, (label, gain) in enumerate(entries, 1):
        print(f"{rank} {label} {gain!r}")


def cmd_ingest(args) -> int:
    settings = _settings(args)
    roster = parse_roster(args.roster)
    platform = parse_platform_edges(args.platform, roster)
    field_obs = parse_field_log(args.field, args.window_start,
                                args.window_end, roster)
    priors = ProvenancePriors(settings["p_platform"], settings["p_field"],
                              settings["p_both"])
    prop = settings["propagation_prob"]
    net = merge_sources(platform, field_obs, priors, roster,
                        0.5 if prop is None else prop)
    write_network_file(net, args.out)
    print(f"wrote {args.out}: {net.num_nodes} nodes, {net.num_edges} edges")
    return 0


def cmd_init(args) -> int:
    settings = _settings(args)
    directory = Path(args.dir)
    if campaign_exists(directory) and not args.force:
        raise ValidationError(
            f"campaign already exists at {directory} (use --force to replace)")
    net = read_network_file(args.network)
    config = _campaign_config(settings)
    directory.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(args.network, directory / NETWORK_FILENAME)
    camp = Campaign.start(net, config, NETWORK_FILENAME,
                          file_sha256(directory / NETWORK_FILENAME))
    save_campaign(camp, directory)
    print(f"initialized campaign in {directory}: {net.num_nodes} nodes, "
          f"k_select={config.k_select} k_train={config.k_train} "
          f"rounds={config.num_rounds} seed={config.master_seed}")
    return 0


def cmd_open(args) -> int:
    camp = load_campaign(args.dir)
    ranked = camp.open_round()
    save_campaign(camp, args.dir)
    print(f"round {camp.rounds[-1].index} open, "
          f"{len(ranked.entries)} candidates ({ranked.method})")
    _print_ranked(ranked.entries)
    return 0


def cmd_record(args) -> int:
    camp = load_campaign(args.dir)
    camp.record_status(args.node, args.status)
    save_campaign(camp, args.dir)
    print(f"round {camp.rounds[-1].index}: {args.node} -> {args.status}")
    return 0


def cmd_close(args) -> int:
    camp = load_campaign(args.dir)
    rnd = camp.rounds[-1] if camp.rounds else None
    belief = camp.close_round()
    save_campaign(camp, args.dir)
    trained = ", ".join(sorted(rnd.trained)) or "none"
    covered = float(sum(belief.per_node_prob.values()))
    print(f"round {rnd.index} closed; trained: {trained}")
    print(f"expected influenced so far: {covered!r}")
    return 0


def cmd_status(args) -> int:
    camp = load_campaign(args.dir)
    if args.json:
        out = camp.state_dict()
        out["state_hash"] = camp.state_hash()
        print(json.dumps(out, sort_keys=True, indent=2))
        return 0
    cfg = camp.config
    print(f"campaign: {camp.net.num_nodes} nodes, k_select={cfg.k_select} "
          f"k_train={cfg.k_train} rounds={cfg.num_rounds} "
          f"seed={cfg.master_seed}")
    for rnd in camp.rounds:
        state = "closed" if rnd.closed else "open"
        print(f"round {rnd.index} ({state}):")
        for e in rnd.entries:
            print(f"  {e.label} {e.status.value}")
    done = sum(1 for r in camp.rounds if r.closed)
    covered = float(sum(camp.belief.per_node_prob.values()))
    print(f"rounds closed: {done}/{cfg.num_rounds}")
    print(f"trained overall: {', '.join(sorted(camp.belief.trained)) or 'none'}")
    print(f"expected influenced so far: {covered!r}")
    print(f"state hash: {camp.state_hash()}")
    return 0


def cmd_select(args) -> int:
    """Preview a selection against the current belief without mutating."""
    camp = load_campaign(args.dir)
    k = args.k if args.k is not None else camp.config.k_select
    exclusions = camp.exclusions() | set(args.exclude or [])
    next_index = len(camp.rounds)
    params = camp.config.selection_params(next_index)
    ranked = greedy_select(camp.net, k, camp.belief, exclusions, params)
    if args.json:
        print(json.dumps({
            "candidates": [{"label": lab, "gain": g}
                           for lab, g in ranked.entries],
            "method": ranked.method,
            "exclusions": sorted(exclusions),
        }, sort_keys=True))
        return 0
    print(f"what-if selection of {k} ({ranked.method}), "
          f"excluding: {', '.join(sorted(exclusions)) or 'none'}")
    _print_ranked(ranked.entries)
    return 0


def cmd_report(args) -> int:
    records = parse_survey(args.survey)
    table = tabulate_outcomes(records, args.complete_case)
    payload = {"outcomes": table.to_dict()}
    lines = [table.to_text()]
    if args.dir:
        camp = load_campaign(args.dir)
        k = args.k if args.k is not None else camp.config.k_select
        params = camp.config.selection_params(len(camp.rounds))
        rows = baseline_comparison(camp.net, k, camp.belief,
                                   camp.exclusions(), params)
        payload["baselines"] = rows
        lines.append("")
        lines.append("selection baselines (coverage objective, higher is better)")
        for row in rows:
            seeds = ", ".join(row["seeds"])
            lines.append(f"{row['method']:<26}{row['objective']!r:<22}{seeds}")
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))
    return 0


def cmd_simulate(args) -> int:
    settings = _settings(args)
    net = read_network_file(args.network)
    config = _campaign_config(settings)
    behavior = RecruitBehavior(settings["contact_prob"],
                               settings["decline_prob"])
    traj = simulate_campaign(net, config, behavior, args.seed)
    if args.out_dir:
        directory = Path(args.out_dir)
        if campaign_exists(directory) and not args.force:
            raise ValidationError(
                f"campaign already exists at {directory} "
                f"(use --force to replace)")
        directory.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(args.network, directory / NETWORK_FILENAME)
        traj.campaign.network_path = NETWORK_FILENAME
        traj.campaign.network_hash = file_sha256(directory / NETWORK_FILENAME)
        save_campaign(traj.campaign, directory)
    if args.json:
        print(json.dumps({
            "rounds": [{"index": o.index, "selected": o.selected,
                        "statuses": o.statuses, "trained": o.trained}
                       for o in traj.rounds],
            "total_trained": traj.total_trained,
            "final_coverage": traj.final_coverage,
            "state_hash": traj.campaign.state_hash(),
        }, sort_keys=True))
        return 0
    for o in traj.rounds:
        print(f"round {o.index}: selected {', '.join(o.selected)}")
        print(f"round {o.index}: trained {', '.join(o.trained) or 'none'}")
    print(f"total trained: {traj.total_trained}")
    print(f"final expected coverage: {traj.final_coverage!r}")
    print(f"state hash: {traj.campaign.state_hash()}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve
    serve(args.dir, args.host, args.port, survey_path=args.survey,
          ui_dir=args.ui)
    return 0


def _add_config_flags(p: argparse.ArgumentParser, *keys: str):
    p.add_argument("--config", help="key=value settings file")
    typed = {int: ("k_select", "k_train", "num_rounds", "num_samples",
                   "runs_per_sample", "master_seed", "workers"),
             float: ("propagation_prob", "p_platform", "p_field", "p_both",
                     "contact_prob", "decline_prob"),
             str: ("method",)}
    for caster, names in typed.items():
        for name in names:
            if name in keys:
                flag = "--" + name.replace("_", "-")
                kwargs = {"type": caster, "default": None, "dest": name}
                if name == "method":
                    kwargs["choices"] = ["auto", "exact", "sampled"]
                    del kwargs["type"]
                p.add_argument(flag, **kwargs)


_CAMPAIGN_KEYS = ("k_select", "k_train", "num_rounds", "num_samples",
                  "runs_per_sample", "master_seed", "method", "workers",
                  "propagation_prob")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reachout",
        description="Peer-led outreach planning over uncertain social "
                    "networks: sampled-cascade seed selection and a "
                    "multi-round recruitment workflow.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="merge observation files into a "
                                      "canonical network file")
    p.add_argument("--roster", required=True)
    p.add_argument("--platform", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window-start", type=date.fromisoformat,
                   default=date.min)
    p.add_argument("--window-end", type=date.fromisoformat, default=date.max)
    _add_config_flags(p, "p_platform", "p_field", "p_both",
                      "propagation_prob")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("init", help="start a campaign directory")
    p.add_argument("--network", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--force", action="store_true")
    _add_config_flags(p, *_CAMPAIGN_KEYS)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("open", help="open the next round")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=cmd_open)

    p = sub.add_parser("record", help="record a candidate status")
    p.add_argument("--dir", required=True)
    p.add_argument("--node", required=True)
    p.add_argument("--status", required=True,
                   choices=["contacted", "unreachable", "declined", "trained"])
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("close", help="close the open round")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=cmd_close)

    p = sub.add_parser("status", help="show campaign state")
    p.add_argument("--dir", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("select", help="preview a selection (no mutation)")
    p.add_argument("--dir", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--exclude", action="append", metavar="NODE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("report", help="tabulate survey outcomes by wave")
    p.add_argument("--survey", required=True)
    p.add_argument("--complete-case", action="store_true")
    p.add_argument("--dir", help="campaign dir for baseline comparison")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="closed-loop campaign simulation")
    p.add_argument("--network", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=None,
                   help="persist the simulated campaign here")
    p.add_argument("--force", action="store_true")
    p.add_argument("--json", action="store_true")
    _add_config_flags(p, *_CAMPAIGN_KEYS, "contact_prob", "decline_prob")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve the campaign over local HTTP")
    p.add_argument("--dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--survey", default=None)
    p.add_argument("--ui", default=None, help="static dashboard directory")
    p.set_defaults(func=cmd_serve)

    return parser


def _fail(category: str, exc: BaseException) -> None:
    message = " ".join(str(exc).split())
    print(f"reachout: {category}: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _fail("validation", exc)
        return 1
    except StateMachineError as exc:
        _fail("state", exc)
        return 3
    except json.JSONDecodeError as exc:
        _fail("validation", exc)
        return 1
    except OSError as exc:
        _fail("io", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
