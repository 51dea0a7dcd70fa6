"""Command-line front end: experiment orchestration and report emission.

Subcommands: nets, approx-discrete, approx-zerodim, ball, closure-probe,
problem3.  Exit codes: 0 all certificates pass, 1 certificate failure
(witness in the report), 2 config error, 3 resource/output error.
Reports are byte-identical across runs of the same config; wall-clock
timings live only in manifest.json.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

import sepcont
from sepcont.cantor import CantorPoint
from sepcont.config import Experiment, load_experiment, parse_eps, parse_function
from sepcont.discrete import DiscreteApproximator
from sepcont.errors import ConfigError, RefinementExhaustedError, SepcontError
from sepcont.functions import Constant, SepFunction
from sepcont.groups import ball_net
from sepcont.reports import (
    build_manifest,
    dyadic_str,
    write_csv,
    write_json,
    write_jsonl,
)
from sepcont.uniform import BallQuery, ball_membership, closure_probe, problem3_check
from sepcont.zerodim import ZerodimPipeline


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def stage(self, name: str):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.timings[name] = timer.timings.get(name, 0.0) + time.perf_counter() - self.t0

        return _Ctx()


def _finish(exp: Experiment, timer: _Timer, reports: list[Path], summary: dict) -> None:
    manifest = build_manifest(
        config_text=exp.text,
        version=sepcont.__version__,
        report_paths=reports,
        timings=timer.timings,
        summary=summary,
    )
    write_json(exp.out / "manifest.json", manifest)


def cmd_nets(exp: Experiment) -> int:
    timer = _Timer()
    rows = []
    ok = True
    with timer.stage("nets"):
        for k in range(exp.n_max + 1):
            depth = exp.group.net_enumeration_depth(k, ())
            net = ball_net(exp.group, k, depth)
            checks = (
                net.check_ball_containment(),
                net.check_pairwise_separation(),
                net.check_maximality(),
            )
            ok = ok and all(checks)
            rows.append(
                {
                    "k": k,
                    "radius": dyadic_str(net.radius),
                    "separation": dyadic_str(net.separation),
                    "size": len(net.elements),
                    "enumeration_depth": depth,
                    "ball_ok": int(checks[0]),
                    "separation_ok": int(checks[1]),
                    "maximality_ok": int(checks[2]),
                }
            )
    report = exp.out / "nets.csv"
    write_csv(report, list(rows[0].keys()), rows)
    _finish(exp, timer, [report], {"passed": ok})
    return 0 if ok else 1


def cmd_approx_discrete(exp: Experiment) -> int:
    timer = _Timer()
    engine = DiscreteApproximator(exp.function)
    rows = []
    stage_of_probe = {}
    ok = True
    with timer.stage("certificates"):
        for probe in exp.probes:
            cert = engine.certificate(probe, exp.n_max, exp.grid_depth)
            stage_of_probe[probe.probe_id] = cert.m
            ok = ok and cert.passed
            for n, member, witness in cert.checks:
                rows.append(
                    {
                        "n": n,
                        "probe_id": probe.probe_id,
                        "in_nbhd": int(member),
                        "violation_witness": witness,
                    }
                )
    report = exp.out / "certificate.csv"
    write_csv(report, ["n", "probe_id", "in_nbhd", "violation_witness"], rows)
    _finish(exp, timer, [report], {"passed": ok, "stage_of_probe": stage_of_probe})
    return 0 if ok else 1


def cmd_approx_zerodim(exp: Experiment) -> int:
    timer = _Timer()
    with timer.stage("tower"):
        pipe = ZerodimPipeline(exp.function, exp.n_max, exp.grid_depth)
        cond = pipe.condition_rows()
    with timer.stage("rates"):
        rate_ok = {
            n: pipe.uniform_rate(n).value <= Fraction(1, 2**n) for n in range(exp.n_max + 1)
        }
        factor_ok = {n: pipe.factor_discreteness(n) for n in range(exp.n_max + 1)}
    with timer.stage("diagonal"):
        rep = pipe.diagonal(exp.probes, exp.levels) if exp.probes else None
    rows = []
    all_ok = True
    for n in range(exp.n_max + 1):
        c = cond[n]
        diag_sup = ""
        budget_txt = ""
        row_ok = c.cond1 and c.cond2_ok and c.cond3 and rate_ok[n] and factor_ok[n]
        if rep is not None:
            diag_sup = dyadic_str(dict(rep.stage_sups)[n])
            budgets = [
                Fraction(4, 2**l)
                for l in exp.levels
                if rep.stage_of_level.get(l) is not None and n >= rep.stage_of_level[l]
            ]
            if budgets:
                budget = min(budgets)
                budget_txt = dyadic_str(budget)
                row_ok = row_ok and dict(rep.stage_sups)[n] < budget
        rows.append(
            {
                "level": n,
                "cond1": int(c.cond1),
                "cond2_sup": dyadic_str(c.cond2_sup),
                "cond3": int(c.cond3),
                "diag_dist_sup": diag_sup,
                "budget": budget_txt,
                "pass": int(row_ok),
            }
        )
        all_ok = all_ok and row_ok
    if rep is not None:
        all_ok = all_ok and rep.passed
    report = exp.out / "zerodim.csv"
    write_csv(
        report,
        ["level", "cond1", "cond2_sup", "cond3", "diag_dist_sup", "budget", "pass"],
        rows,
    )
    summary = {
        "passed": all_ok,
        "sample": [str(z) for z in pipe.sample],
        "sample_source": pipe.sample_source,
        "sample_complete": pipe.sample_complete,
    }
    if rep is not None:
        summary["stage_of_level"] = {str(k): v for k, v in rep.stage_of_level.items()}
    _finish(exp, timer, [report], summary)
    return 0 if all_ok else 1


def cmd_ball(exp: Experiment) -> int:
    timer = _Timer()
    records = []
    with timer.stage("ball"):
        for name, value in sorted(exp.section("ball").items()):
            fields = dict(
                item.split("=", 1) for item in (p.strip() for p in value.split(";")) if "=" in item
            )
            if "side" not in fields or "eps" not in fields or "candidate" not in fields:
                raise ConfigError(f"ball query {name!r} needs side=, eps=, candidate=")
            eps = parse_eps(fields["eps"].strip())
            candidate = parse_function(fields["candidate"].strip(), exp.group, exp.base_dir)
            try:
                q = BallQuery(
                    exp.function, candidate, fields["side"].strip(), eps, exp.grid_depth, name
                )
            except ValueError as exc:
                raise ConfigError(f"ball query {name!r}: {exc}") from exc
            res = ball_membership(q)
            records.append(
                {
                    "probe_id": name,
                    "side": q.side,
                    "eps_num": eps.numerator,
                    "eps_log2_den": eps.denominator.bit_length() - 1,
                    "member": res.member,
                    "witness_x": str(res.witness[0]) if res.witness else "",
                    "witness_y": str(res.witness[1]) if res.witness else "",
                }
            )
    report = exp.out / "ball.jsonl"
    write_jsonl(report, records)
    _finish(exp, timer, [report], {"passed": True, "queries": len(records)})
    return 0


def _fault_constant(exp: Experiment) -> SepFunction:
    group = exp.group
    origin = CantorPoint("", "0")
    base = exp.function.eval(origin, origin)
    shift = max(
        group.dense_enumeration(2),
        key=lambda u: (group.dist(group.identity(), u), group.canonical_key(u)),
    )
    return Constant(group.mul(base, shift))


def cmd_closure_probe(exp: Experiment) -> int:
    timer = _Timer()
    section = exp.section("closure")
    fault_at = int(section["inject_fault_at"]) if "inject_fault_at" in section else None
    if fault_at is not None and not 0 <= fault_at <= exp.n_max:
        raise ConfigError(f"inject_fault_at must be a stage in [0, {exp.n_max}]")
    with timer.stage("stages"):
        pipe = ZerodimPipeline(exp.function, exp.n_max, exp.grid_depth)
        stages: list[SepFunction] = [pipe.quantized(n) for n in range(exp.n_max + 1)]
        schedule = [Fraction(1, 2**n) for n in range(exp.n_max + 1)]
        if fault_at is not None:
            stages[fault_at] = _fault_constant(exp)
    with timer.stage("closure"):
        rep = closure_probe(
            exp.function, stages, schedule, exp.probes, exp.levels, exp.grid_depth
        )
    rows = [
        {
            "stage": r.stage,
            "eps": dyadic_str(r.eps),
            "dist_l": dyadic_str(r.dist_l),
            "dist_r": dyadic_str(r.dist_r),
            "within": int(r.within),
            "certified": int(r.certified_stage),
        }
        for r in rep.stages
    ]
    report = exp.out / "closure.csv"
    write_csv(report, ["stage", "eps", "dist_l", "dist_r", "within", "certified"], rows)
    _finish(
        exp,
        timer,
        [report],
        {
            "passed": rep.passed,
            "failed_stage": rep.failed_stage,
            "diagonal_passed": rep.diagonal_passed,
        },
    )
    return 0 if rep.passed else 1


def cmd_problem3(exp: Experiment) -> int:
    timer = _Timer()
    section = exp.section("problem3")
    if "candidate" not in section:
        raise ConfigError("[problem3] needs a candidate function")
    candidate = parse_function(section["candidate"], exp.group, exp.base_dir)
    bound = parse_eps(section["bound"]) if "bound" in section else Fraction(1)
    with timer.stage("problem3"):
        rep = problem3_check(exp.function, candidate, exp.grid_depth, bound)
    payload = {
        "sup_raw": dyadic_str(rep.sup_raw),
        "bound": dyadic_str(rep.bound),
        "within": rep.within,
        "sup_group_metric": dyadic_str(rep.sup_group_metric),
        "image_size": rep.image_size,
        "image_zero_dim": rep.image_zero_dim,
        "min_gap": dyadic_str(rep.min_gap) if rep.min_gap is not None else None,
        "witness_x": str(rep.witness[0]) if rep.witness else "",
        "witness_y": str(rep.witness[1]) if rep.witness else "",
    }
    report = exp.out / "problem3.json"
    write_json(report, payload)
    _finish(exp, timer, [report], {"passed": rep.within})
    return 0 if rep.within else 1


_HANDLERS = {
    "nets": cmd_nets,
    "approx-discrete": cmd_approx_discrete,
    "approx-zerodim": cmd_approx_zerodim,
    "ball": cmd_ball,
    "closure-probe": cmd_closure_probe,
    "problem3": cmd_problem3,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sepcont",
        description="Finite-resolution approximation of separately continuous functions "
        "on Cantor-space products, with exact certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", help="report directory (default: config's out)")
        p.add_argument("--grid-depth", type=int, help="override grid depth")
        p.add_argument("--seed", type=int, default=0, help="seed for random probe generation")
    args = parser.parse_args(argv)
    try:
        exp = load_experiment(args.config, args.out, args.grid_depth, args.seed)
        exp.out.mkdir(parents=True, exist_ok=True)
        return _HANDLERS[args.command](exp)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RefinementExhaustedError, OSError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except SepcontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
