"""Command-line front end.

    manhattan-emf analytic --config exp.ini --out results/
    manhattan-emf compare --config exp.ini --strict

Exit status: 0 ok, 2 configuration error, 3 numerical failure, 4 validation
threshold breached (``compare --strict``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__, analytic, config as cfgmod, fitting, montecarlo, raytrace
from .io import (
    from_db,
    read_columns,
    to_db,
    write_columns,
    write_csv,
    write_json,
)
from .quadrature import NumericalFailure

log = logging.getLogger("manhattan_emf")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_STRICT = 0, 2, 3, 4


class StrictBreach(RuntimeError):
    pass


def _metrics(exp):
    return [m.strip().lower() for m in exp.get("experiment", "metrics").split(",") if m.strip()]


def _workers(exp, args):
    if args.workers is not None:
        return args.workers
    w = exp.get("experiment", "workers")
    return None if w is None else int(w)


class Output:
    """Collects result tables, writes CSV files and one JSON summary."""

    def __init__(self, out_dir, exp, engine):
        self.dir = out_dir
        self.exp = exp
        self.engine = engine
        self.tables = {}
        self.extra = {}
        os.makedirs(out_dir, exist_ok=True)

    def table(self, name, header, rows, stderr_col=None):
        rows = [list(r) for r in rows]
        self.tables[name] = {"columns": list(header), "rows": rows}
        write_csv(os.path.join(self.dir, f"{name}.csv"), header, rows)

    def finish(self):
        payload = {
            "engine": self.engine,
            "version": __version__,
            "seed": self.exp.get("experiment", "seed"),
            "config": self.exp.snapshot(),
            "results": self.tables,
        }
        payload.update(self.extra)
        write_json(os.path.join(self.dir, f"{self.engine}.json"), payload)


# ---------------------------------------------------------------------------
# engines


def run_analytic(exp, out, args):
    q, p, b, n, quad = exp.user, exp.params, exp.blockage, exp.network, exp.quad
    ms = _metrics(exp)
    tc_db = exp.get("experiment", "theta_c_db")
    te_dbm = exp.get("experiment", "theta_e_dbm")
    tp_dbm = exp.get("experiment", "theta_p_dbm")
    if "coverage" in ms:
        pc = np.atleast_1d(analytic.coverage_probability(from_db(tc_db), q, p, b, n, quad)) if tc_db.size else []
        out.table("coverage", ["theta_c_dB", "P_c"], zip(tc_db, pc))
    if "exposure" in ms:
        pe = np.atleast_1d(analytic.exposure_cdf(exp.theta_e, q, p, b, n, quad)) if te_dbm.size else []
        out.table("exposure", ["theta_e_dBm", "P_e"], zip(te_dbm, pe))
    if "joint" in ms:
        jb = analytic.joint_lower_bound(from_db(tc_db), exp.theta_e, q, p, b, n, quad)
        rows = [(c, e, jb[i, j], 0.0) for i, c in enumerate(tc_db) for j, e in enumerate(te_dbm)]
        out.table("joint", ["theta_c_dB", "theta_e_dBm", "value", "stderr"], rows)
    if "capacity" in ms:
        out.table("capacity", ["mean_capacity_bps"], [[analytic.average_capacity(q, p, b, n, quad)]])
    if "mean_exposure" in ms:
        me = _mean_exposure(q, p, b, n)
        out.table("mean_exposure", ["component", "watts"], [(k, v) for k, v in me.items()])
    if "useful" in ms:
        s = analytic.useful_power_ccdf(from_db(tp_dbm - 30), q, p, b, n, quad)
        out.table("useful", ["theta_p_dBm", "P_S_gt"], zip(tp_dbm, np.atleast_1d(s)))
    if "interference" in ms:
        s = analytic.interference_ccdf(from_db(tp_dbm - 30), q, p, b, n, quad)
        out.table("interference", ["theta_p_dBm", "P_I_gt"], zip(tp_dbm, np.atleast_1d(s)))


def _mean_exposure(q, p, b, n):
    if q == "arbitrary":
        s = analytic.mean_exposure(1, p, b, n)
        c = analytic.mean_exposure(2, p, b, n)
        eta = n.crossroad_probability
        vals = {k: (1 - eta) * getattr(s, k) + eta * getattr(c, k) for k in ("L", "N", "D")}
    else:
        m = analytic.mean_exposure(q, p, b, n)
        vals = {"L": m.L, "N": m.N, "D": m.D}
    vals["total"] = vals["L"] + vals["N"] + vals["D"]
    return vals


def _mc_eta(exp):
    u = exp.user
    if u == "arbitrary":
        return exp.network.crossroad_probability
    return 1.0 if u == "CROSSROAD" else 0.0


def run_montecarlo(exp, out, args, dump=None):
    nreal = exp.get("experiment", "realizations")
    seed = exp.get("experiment", "seed")
    net = exp.mc_network
    rec = montecarlo.simulate_records(
        nreal, net, exp.params, exp.blockage, _mc_eta(exp), seed, _workers(exp, args)
    )
    res = montecarlo.estimates_from_records(rec, exp.theta_c, exp.theta_e, exp.params, seed)
    ms = _metrics(exp)
    tc_db = exp.get("experiment", "theta_c_db")
    te_dbm = exp.get("experiment", "theta_e_dbm")
    if "coverage" in ms:
        out.table("coverage", ["theta_c_dB", "P_c", "stderr"], zip(tc_db, res.coverage.value, res.coverage.stderr))
    if "exposure" in ms:
        out.table(
            "exposure", ["theta_e_dBm", "P_e", "stderr"], zip(te_dbm, res.exposure_cdf.value, res.exposure_cdf.stderr)
        )
    if "joint" in ms:
        rows = [
            (c, e, res.joint.value[i, j], res.joint.stderr[i, j])
            for i, c in enumerate(tc_db)
            for j, e in enumerate(te_dbm)
        ]
        out.table("joint", ["theta_c_dB", "theta_e_dBm", "value", "stderr"], rows)
    if "capacity" in ms:
        out.table("capacity", ["mean_capacity_bps", "stderr"], [[res.mean_capacity.value, res.mean_capacity.stderr]])
    if "mean_exposure" in ms:
        out.table(
            "mean_exposure",
            ["component", "watts", "stderr"],
            [(k, v.value, v.stderr) for k, v in res.mean_exposure.items()],
        )
    out.extra["trim_extent_m"] = rec["_trim_extent"]
    out.extra["realizations"] = nreal
    if dump:
        cols = {k: rec[k] for k in montecarlo.RECORD_FIELDS}
        write_columns(dump, cols, {"engine": "montecarlo", "seed": seed, "version": __version__})
    return res


def run_raytrace(exp, out, args):
    nreal = exp.get("experiment", "realizations")
    seed = exp.get("experiment", "seed")
    cols, flags = raytrace.simulate_rt(nreal, exp.rt, exp.params, seed, _workers(exp, args))
    write_columns(
        os.path.join(out.dir, "links.tsv"), cols, {"engine": "raytrace", "seed": seed, "version": __version__}
    )
    m = raytrace.realization_metrics(cols, nreal, exp.params.noise)
    with np.errstate(divide="ignore"):
        rows = [
            (i, int(flags[i]) + 1, m["S"][i], m["I"][i], m["exposure"][i], to_db(m["sinr"][i]))
            for i in range(nreal)
        ]
    out.table("realizations", ["realization", "user_type", "S_W", "I_W", "exposure_W", "sinr_dB"], rows)
    out.extra["crossroad_fraction"] = float(flags.mean())
    return cols, flags


def _eta_from_links(cols):
    r = np.asarray(cols["realization"])
    ut = np.asarray(cols["user_type"])
    _, first = np.unique(r, return_index=True)
    return ut[first] == 2


def run_fit(exp, out, args, cols=None, flags=None):
    if cols is None:
        path = args.records or exp.get("experiment", "records")
        if not path:
            raise cfgmod.ConfigError("fit needs a records file: --records PATH or [experiment] records")
        cols, _ = read_columns(path)
    if flags is None:
        flags = _eta_from_links(cols)
    fp = fitting.fit_all(
        cols,
        flags,
        exp.network.delta_h,
        exp.params,
        n_bins=exp.get("fit", "distance_bins"),
        method=exp.get("fit", "method"),
    )
    with open(os.path.join(out.dir, "fitted.ini"), "w", encoding="utf-8") as fh:
        fh.write(fp.to_text())
    out.table(
        "fitted",
        ["parameter", "value"],
        [
            ("beta", fp.beta),
            ("gamma", fp.gamma),
            ("alpha_L", fp.alpha_L),
            ("alpha_N", fp.alpha_N),
            ("rate_L", fp.fading_L.rate),
            ("rate_N", fp.fading_N.rate),
            ("eta", fp.eta),
        ],
    )
    out.extra["fit_notes"] = fp.notes
    return fp


def ks_distance(cdf_values, thresholds, samples):
    """Sup distance between a model CDF on ``thresholds`` and an empirical CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    hi = np.searchsorted(s, thresholds, side="right") / s.size
    lo = np.searchsorted(s, thresholds, side="left") / s.size
    return float(max(np.max(np.abs(cdf_values - hi)), np.max(np.abs(cdf_values - lo))))


def run_compare(exp, out, args):
    tol = exp.get("experiment", "strict_tolerance")
    q = exp.user
    tc_db = exp.get("experiment", "theta_c_db")
    te_dbm = exp.get("experiment", "theta_e_dbm")
    pc = np.atleast_1d(analytic.coverage_probability(exp.theta_c, q, exp.params, exp.blockage, exp.network, exp.quad))
    pe = np.atleast_1d(analytic.exposure_cdf(exp.theta_e, q, exp.params, exp.blockage, exp.network, exp.quad))
    mc = run_montecarlo(exp, Output(os.path.join(out.dir, "montecarlo"), exp, "montecarlo"), args)
    rows = [("coverage", c, a, m, s, a - m) for c, a, m, s in zip(tc_db, pc, mc.coverage.value, mc.coverage.stderr)]
    rows += [
        ("exposure", e, a, m, s, a - m) for e, a, m, s in zip(te_dbm, pe, mc.exposure_cdf.value, mc.exposure_cdf.stderr)
    ]
    out.table("compare", ["metric", "threshold", "analytic", "montecarlo", "mc_stderr", "deviation"], rows)
    worst = max((abs(r[-1]) for r in rows), default=0.0)
    out.extra["max_abs_deviation"] = worst
    out.extra["strict_tolerance"] = tol
    if args.with_raytrace:
        rt_out = Output(os.path.join(out.dir, "raytrace"), exp, "raytrace")
        cols, flags = run_raytrace(exp, rt_out, args)
        rt_out.finish()
        fp = run_fit(exp, out, args, cols, flags)
        p, b, n = fp.apply(exp.params, exp.rt.network)
        m = raytrace.realization_metrics(cols, flags.size, exp.params.noise)
        qs = np.linspace(0.005, 0.995, 60)
        th_c = np.quantile(m["sinr"], qs)
        th_c = th_c[th_c > 0]
        ks_c = ks_distance(1 - np.atleast_1d(analytic.coverage_probability(th_c, "arbitrary", p, b, n)), th_c, m["sinr"])
        th_e = np.quantile(m["exposure"], qs)
        ks_e = ks_distance(np.atleast_1d(analytic.exposure_cdf(th_e, "arbitrary", p, b, n)), th_e, m["exposure"])
        out.table("raytrace_ks", ["metric", "ks_distance"], [("coverage", ks_c), ("exposure", ks_e)])
    print(f"max |analytic - montecarlo| = {worst:.4g} (tolerance {tol:g})")
    if args.strict and worst > tol:
        raise StrictBreach(f"deviation {worst:.4g} exceeds {tol:g}")


def run_sensitivity(exp, out, args):
    tp_dbm = exp.get("experiment", "theta_p_dbm")
    th = from_db(tp_dbm - 30)
    res = fitting.sensitivity_sweep(
        exp.params,
        exp.blockage,
        exp.network,
        th,
        th,
        tuple(exp.get("sensitivity", "perturbations")),
        exp.user,
        exp.quad,
    )
    out.table(
        "sensitivity",
        ["delta", "max_dev_useful", "max_dev_interference"],
        [(r.delta, r.useful_deviation, r.interference_deviation) for r in res],
    )
    rows = []
    for r in res:
        rows += [(r.delta, "useful", t, v) for t, v in zip(tp_dbm, r.useful_ccdf)]
        rows += [(r.delta, "interference", t, v) for t, v in zip(tp_dbm, r.interference_ccdf)]
    out.table("sensitivity_curves", ["delta", "quantity", "theta_p_dBm", "ccdf"], rows)


def run_optimize(exp, out, args):
    o = exp.values["optimize"]
    res = analytic.optimal_bs_density(
        exp.params,
        exp.blockage,
        exp.network,
        (o["bs_density_min_per_km"] * 1e-3, o["bs_density_max_per_km"] * 1e-3),
        exp.quad,
        exp.user,
        o["points"],
    )
    out.table("capacity_sweep", ["bs_density_per_km", "mean_capacity_bps"], zip(res.grid * 1e3, res.values))
    out.table(
        "optimum",
        ["bs_density_per_km", "mean_capacity_bps", "at_boundary"],
        [(res.bs_density * 1e3, res.capacity, int(res.at_boundary))],
    )


RUNNERS = {
    "analytic": run_analytic,
    "montecarlo": run_montecarlo,
    "raytrace": run_raytrace,
    "fit": run_fit,
    "compare": run_compare,
    "sensitivity": run_sensitivity,
    "optimize": run_optimize,
}


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="manhattan-emf", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="engine", required=True)
    for name in cfgmod.ENGINES:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="INI file (or a JSON result to re-run)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--realizations", type=int)
        sp.add_argument("--out", default="results")
        sp.add_argument("--strict", action="store_true")
        sp.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
        sp.add_argument("--workers", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
        if name == "fit":
            sp.add_argument("--records", help="columnar link-record file")
        else:
            sp.set_defaults(records=None)
        if name == "montecarlo":
            sp.add_argument("--dump", help="write per-realisation records to this file")
        if name == "compare":
            sp.add_argument("--with-raytrace", action="store_true", help="also run ray tracing and fitting")
        else:
            sp.set_defaults(with_raytrace=False)
    return ap


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = list(args.override)
    if args.seed is not None:
        overrides.append(f"experiment.seed={args.seed}")
    if args.realizations is not None:
        overrides.append(f"experiment.realizations={args.realizations}")
    try:
        exp = cfgmod.load(args.config, overrides, engine=args.engine)
    except cfgmod.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Output(args.out, exp, args.engine)
    try:
        if args.engine == "montecarlo":
            run_montecarlo(exp, out, args, dump=getattr(args, "dump", None))
        else:
            RUNNERS[args.engine](exp, out, args)
    except cfgmod.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StrictBreach as exc:
        out.finish()
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_STRICT
    except (NumericalFailure, analytic.DomainError, fitting.FitError, FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.finish()
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
