"""Command line front end.

Each subcommand reads a CSV dataset, runs one method and writes a JSON or
CSV report. Reports contain no timestamps or other ambient state, so
identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import cluster as cl
from . import decomposable as dm
from . import em as em_mod
from . import evaluation as ev
from . import gibbs as gb
from . import naive_bayes as nb
from .errors import DataError, InvalidK, LearnerFailure, SenseLearnError
from .io import load_dataset

EXIT_OK = 0
EXIT_USAGE = 2

SUPERVISED = ("naive-bayes", "majority", "select", "naive-mix")


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser, seed_required=False):
    p.add_argument("data", help="CSV file with a header row")
    p.add_argument("--class-col", help="name of the class column ('?' marks unknown values)")
    p.add_argument("--gold-col", help="column of gold senses, kept out of learning")
    p.add_argument("--seed", type=int, help="random seed" + (" (required)" if seed_required else ""))
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _unsupervised(p):
    p.add_argument("--k", type=int, help="number of sense groups (default: number of gold senses)")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--init-file", help=argparse.SUPPRESS)


def _search(p):
    p.add_argument("--direction", choices=(dm.FORWARD, dm.BACKWARD), default=dm.FORWARD)
    p.add_argument("--criterion", choices=(dm.AIC, dm.BIC, dm.CHI2), default=dm.AIC)
    p.add_argument("--alpha", type=float, default=0.0001, help="significance cutoff for chi2")
    p.add_argument("--dof", choices=dm.DOF_KINDS, default="adjusted",
                   help="degrees-of-freedom measure used for the change in complexity")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="senselearn",
                                     description="Learn and evaluate word sense classifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("em", help="EM for a latent-class Naive Bayes model")
    _common(p, True)
    _unsupervised(p)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--soft", action="store_true", help="expected counts instead of argmax imputation")

    p = sub.add_parser("gibbs", help="Gibbs sampling for a latent-class Naive Bayes model")
    _common(p, True)
    _unsupervised(p)
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--monitor", type=int, default=1000)
    p.add_argument("--increment", type=int, default=500)
    p.add_argument("--max-total", type=int, default=5000)
    p.add_argument("--prior-alpha", type=float, default=1.0)

    p = sub.add_parser("cluster", help="agglomerative clustering")
    _common(p, True)
    _unsupervised(p)
    p.add_argument("--linkage", choices=(cl.WARD, cl.MCQUITTY), required=True)

    p = sub.add_parser("select", help="sequential model selection")
    _common(p)
    _search(p)

    p = sub.add_parser("naive-mix", help="Naive Mix of a model search sequence")
    _common(p)
    _search(p)

    p = sub.add_parser("naive-bayes", help="fit Naive Bayes to labeled data")
    _common(p)
    p.add_argument("--smoothing", type=float, default=0.0)

    p = sub.add_parser("majority", help="majority-sense baseline")
    _common(p)

    p = sub.add_parser("evaluate", help="score a column of sense groups against gold senses")
    _common(p)
    p.add_argument("--groups-col", required=True)
    p.add_argument("--k", type=int)

    for name, help_ in (("cv", "k-fold cross validation"), ("learning-curve", "accuracy by training size")):
        p = sub.add_parser(name, help=help_)
        _common(p, True)
        _search(p)
        p.add_argument("--method", choices=SUPERVISED, required=True)
        p.add_argument("--folds", type=int, default=10)
        p.add_argument("--smoothing", type=float, default=0.0)
        if name == "learning-curve":
            p.add_argument("--sizes", help="comma-separated training sizes (default 10,50,100,200,...)")
    return parser


def _one_based(a) -> list[int]:
    return [int(v) + 1 for v in a]


def _partition(groups) -> list[list[int]]:
    groups = np.asarray(groups)
    parts = [sorted(_one_based(np.flatnonzero(groups == g))) for g in np.unique(groups)]
    return sorted(parts)


def _read_init(path, n, k) -> tuple[int, ...]:
    try:
        with open(path, encoding="utf-8") as fh:
            vals = [int(line) for line in fh if line.strip()]
    except ValueError as exc:
        raise DataError(f"{path}: initial assignments must be integers") from exc
    if len(vals) != n or min(vals) < 1 or max(vals) > k:
        raise DataError(f"{path}: need {n} values in 1..{k}")
    return tuple(v - 1 for v in vals)


def _load(args, need_class=False):
    ds = load_dataset(args.data, args.class_col, args.gold_col, getattr(args, "k", None))
    if need_class and ds.data.schema.class_index is None:
        raise UsageError("--class-col is required for this command")
    return ds


def _config_echo(args) -> dict:
    skip = {"data", "output", "format", "init_file"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _unsupervised_run(args, learner):
    ds = _load(args)
    data = ds.data
    k = args.k
    if k is None:
        if ds.gold is None:
            raise UsageError("--k is required when no --gold-col is given")
        k = len(ds.gold_levels)
    if k < 1:
        raise InvalidK(f"k must be positive, got {k}")
    init = None
    trials = args.trials
    if args.init_file:
        init = _read_init(args.init_file, data.n_rows, k)
        trials = 1
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    features = data.without_class()

    rows = []
    trial_reports = []
    groups_all = []
    for t in range(trials):
        seed = args.seed + t
        groups, extra = learner(features, k, seed, init)
        groups_all.append(groups)
        entry = {"trial": t, "seed": seed, "assignments": _one_based(groups),
                 "partition": _partition(groups), **extra}
        trial_reports.append(entry)
    report = {"method": args.command, "config": _config_echo(args), "k": k, "n_rows": data.n_rows,
              "trials": trial_reports}
    if ds.gold is not None:
        kk = max(k, len(ds.gold_levels))
        accs = []
        for entry, groups in zip(trial_reports, groups_all):
            acc, mapping = ev.best_mapping_accuracy(groups, ds.gold, kk)
            entry["accuracy"] = acc
            entry["mapping"] = [ds.gold_levels[m] if m < len(ds.gold_levels) else None for m in mapping]
            accs.append(acc)
        mean, std = ev.mean_std(accs)
        best = int(np.argmax(accs))
        _, best_map = ev.best_mapping_accuracy(groups_all[best], ds.gold, kk)
        report.update({
            "mean_accuracy": mean,
            "std_accuracy": std,
            "single_trial": trials == 1,
            "majority_baseline": ev.majority_baseline(ds.gold),
            "gold_senses": list(ds.gold_levels),
            "best_trial": best,
            "confusion": ev.confusion(groups_all[best], ds.gold, best_map, kk).tolist(),
        })
    for entry in trial_reports:
        rows.append({key: entry[key] for key in entry if key not in ("partition", "mapping")})
    return report, rows


def cmd_em(args):
    mode = em_mod.SOFT if args.soft else em_mod.HARD

    def learner(data, k, seed, init):
        res = em_mod.run_em(data, em_mod.EmConfig(k, args.epsilon, args.max_iterations, seed, mode, init))
        extra = {"iterations": res.iterations, "converged": res.converged,
                 "empty_groups": [s + 1 for s in res.empty_classes]}
        return res.assignments, extra
    return _unsupervised_run(args, learner)


def cmd_gibbs(args):
    def learner(data, k, seed, init):
        cfg = gb.GibbsConfig(k, seed, args.burn_in, args.monitor, args.increment, args.max_total,
                             prior_alpha=args.prior_alpha, init_assignments=init)
        res = gb.run_gibbs(data, cfg)
        extra = {"converged": res.converged, "iterations": res.iterations,
                 "chain_length": res.chains.length, "checks": res.checks}
        return res.assignments, extra
    return _unsupervised_run(args, learner)


def cmd_cluster(args):
    if args.init_file:
        raise UsageError("--init-file does not apply to clustering")

    def learner(data, k, seed, init):
        D = cl.dissimilarity_matrix(data)
        if not 1 <= k <= data.n_rows:
            raise InvalidK(f"k must lie in [1, {data.n_rows}]")
        return cl.agglomerate(D, args.linkage, k, seed), {}
    return _unsupervised_run(args, learner)


def _step_rows(result: dm.SelectionResult):
    rows = []
    for i, step in enumerate(result.steps, start=1):
        for s in step:
            rows.append({"step": i, "current": str(result.sequence[i - 1]), "candidate": str(s.candidate),
                         "g_squared": s.g_squared, "delta_g2": s.delta_g2, "delta_dof": s.delta_dof,
                         "score": s.score, "acceptable": s.acceptable})
    return rows


def cmd_select(args):
    data = _load(args, need_class=True).data
    res = dm.sequential_select(data, args.direction, args.criterion, args.alpha, args.dof)
    rows = _step_rows(res)
    fit = dm.fit(res.selected, data, args.dof)
    report = {"method": "select", "config": _config_echo(args), "n_rows": data.n_rows,
              "selected": str(res.selected), "sequence": res.sequence_strings,
              "selected_g_squared": fit.g_squared, "selected_dof": fit.adjusted_dof, "steps": rows}
    return report, rows


def cmd_naive_mix(args):
    data = _load(args, need_class=True).data
    res = dm.sequential_select(data, args.direction, args.criterion, args.alpha, args.dof)
    ci = data.schema.class_index
    mixed = [str(dm.class_cliques(m, ci)) for m in res.sequence]
    learner = dm.selection_learner(args.direction, args.criterion, args.alpha, args.dof, mix=True)
    pred = learner(data)(data.features)
    rows = [{"index": i + 1, "model": m, "mixed_model": x}
            for i, (m, x) in enumerate(zip(res.sequence_strings, mixed))]
    report = {"method": "naive-mix", "config": _config_echo(args), "n_rows": data.n_rows,
              "sequence": res.sequence_strings, "mixed_models": mixed, "selected": str(res.selected),
              "training_accuracy": float(np.mean(pred == data.classes))}
    return report, rows


def cmd_naive_bayes(args):
    data = _load(args, need_class=True).data
    params = nb.fit(data, args.smoothing)
    pred = ev.naive_bayes_learner(args.smoothing)(data)(data.features)
    sch = data.schema
    report = {"method": "naive-bayes", "config": _config_echo(args), "n_rows": data.n_rows,
              "class_prior": params.class_prior.tolist(),
              "conditionals": {sch.names[i]: c.tolist() for i, c in zip(sch.feature_indices, params.conditionals)},
              "training_accuracy": float(np.mean(pred == data.classes))}
    rows = [{"class": s + 1, "prior": float(p)} for s, p in enumerate(params.class_prior)]
    return report, rows


def cmd_majority(args):
    ds = _load(args)
    if ds.gold is not None:
        labels = ds.gold
    elif ds.data.schema.class_index is not None and ds.data.is_fully_labeled:
        labels = ds.data.classes
    else:
        raise UsageError("majority needs --gold-col or a fully labeled --class-col")
    counts = np.bincount(labels)
    acc = ev.majority_baseline(labels)
    report = {"method": "majority", "config": _config_echo(args), "n_rows": int(labels.size),
              "accuracy": acc, "counts": counts.tolist()}
    return report, [{"accuracy": acc}]


def cmd_evaluate(args):
    if args.gold_col is None:
        raise UsageError("evaluate needs --gold-col")
    ds = load_dataset(args.data, args.groups_col, args.gold_col)
    groups = ds.data.classes
    if not ds.data.is_fully_labeled:
        raise DataError("the groups column has missing values")
    k = max(args.k or 0, ds.data.schema.class_cardinality, len(ds.gold_levels))
    acc, mapping = ev.best_mapping_accuracy(groups, ds.gold, k)
    levels = ds.data.schema.levels[ds.data.schema.class_index]
    report = {"method": "evaluate", "config": _config_echo(args), "n_rows": ds.data.n_rows,
              "accuracy": acc, "majority_baseline": ev.majority_baseline(ds.gold),
              "mapping": {levels[g]: (ds.gold_levels[m] if m < len(ds.gold_levels) else None)
                          for g, m in enumerate(mapping) if g < len(levels)},
              "confusion": ev.confusion(groups, ds.gold, mapping, k).tolist(),
              "gold_senses": list(ds.gold_levels)}
    return report, [{"accuracy": acc}]


def _supervised_learner(args):
    if args.method == "naive-bayes":
        return ev.naive_bayes_learner(args.smoothing)
    if args.method == "majority":
        return ev.majority_learner
    return dm.selection_learner(args.direction, args.criterion, args.alpha, args.dof,
                                mix=args.method == "naive-mix")


def cmd_cv(args):
    data = _load(args, need_class=True).data
    if not data.is_fully_labeled:
        raise DataError("cross validation needs every class value observed")
    rep = ev.k_fold_cv(data, _supervised_learner(args), args.folds, args.seed)
    rows = [{"fold": i, "accuracy": a} for i, a in enumerate(rep.per_fold)]
    report = {"method": "cv", "config": _config_echo(args), "n_rows": data.n_rows,
              "mean_accuracy": rep.mean, "std_accuracy": rep.std, "folds": rows}
    return report, rows


def cmd_learning_curve(args):
    data = _load(args, need_class=True).data
    if not data.is_fully_labeled:
        raise DataError("learning curves need every class value observed")
    if args.sizes:
        try:
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError:
            raise UsageError("--sizes must be comma-separated integers") from None
    else:
        pool = data.n_rows - -(-data.n_rows // args.folds)
        sizes = ev.learning_curve_sizes(pool)
    curve = ev.learning_curve(data, sizes, _supervised_learner(args), args.folds, args.seed)
    rows = [{"size": p.size, "mean_accuracy": p.mean, "std_accuracy": p.std} for p in curve]
    report = {"method": "learning-curve", "config": _config_echo(args), "n_rows": data.n_rows,
              "curve": [dict(r, per_fold=p.per_fold) for r, p in zip(rows, curve)]}
    return report, rows


COMMANDS = {
    "em": cmd_em, "gibbs": cmd_gibbs, "cluster": cmd_cluster, "select": cmd_select,
    "naive-mix": cmd_naive_mix, "naive-bayes": cmd_naive_bayes, "majority": cmd_majority,
    "evaluate": cmd_evaluate, "cv": cmd_cv, "learning-curve": cmd_learning_curve,
}
STOCHASTIC = {"em", "gibbs", "cluster", "cv", "learning-curve"}


def _csv_text(rows) -> str:
    buf = io.StringIO()
    if rows:
        cols = []
        for r in rows:
            cols += [c for c in r if c not in cols]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: (" ".join(map(str, v)) if isinstance(v, list) else v) for c, v in r.items()})
    return buf.getvalue()


def render(report, rows, fmt: str) -> str:
    if fmt == "csv":
        return _csv_text(rows)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in STOCHASTIC and args.seed is None:
            raise UsageError(f"{args.command} is stochastic; pass --seed")
        report, rows = COMMANDS[args.command](args)
        text = render(report, rows, args.format)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except UsageError as exc:
        print(f"senselearn {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LearnerFailure as exc:
        cause = exc.__cause__
        print(f"senselearn: {exc}", file=sys.stderr)
        return cause.exit_code if isinstance(cause, SenseLearnError) else exc.exit_code
    except SenseLearnError as exc:
        print(f"senselearn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"senselearn: {exc}", file=sys.stderr)
        return DataError.exit_code
    except ValueError as exc:
        print(f"senselearn: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
