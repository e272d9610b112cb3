use enr_design::exhibits::{
    curve, table_k, table_mde, table_n, Axis, CurveMeasure, CurveRequest, SweepGrid,
};
use enr_design::model::{EffectSizes, ModelCoefficients};
use enr_design::power::{
    mde, optimal_p, optimal_p_numeric, power_at, required_k_bounded, solve_network_size,
    FixedEffect, TestKind,
};
use enr_design::simulate::{empirical_power, IccMode, SimulationConfig};
use enr_design::Error;

use crate::args::{AxisArg, Command, Layout, Measure, Mode};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Output, Table};

pub fn run(command: &Command, cfg: RunConfig, warnings: Vec<String>) -> Result<Output, CliError> {
    let mut out = Output {
        config: cfg.clone(),
        table: Table::default(),
        json: None,
        warnings,
        unsolved: Vec::new(),
    };
    match command {
        Command::Power(_) => power(&cfg, &mut out)?,
        Command::Samplesize(_) => samplesize(&cfg, &mut out)?,
        Command::Mde(_) => mde_cmd(&cfg, &mut out)?,
        Command::Netsize(_) => netsize(&cfg, &mut out)?,
        Command::OptimalP(_) => optimal(&cfg, &mut out)?,
        Command::Table(_) => table(&cfg, &mut out)?,
        Command::Curve(_) => curve_cmd(&cfg, &mut out)?,
        Command::Simulate(_) => simulate(&cfg, &mut out)?,
    }
    Ok(out)
}

/// Per-test outcome: a value, a marker for "no answer" (with its reason), or
/// a hard error.
fn per_test<T>(kind: TestKind, r: Result<T, Error>, out: &mut Output) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotFoundWithinBound { bound }) => {
            out.unsolved.push(format!(
                "{kind}: no K up to {bound} reaches power {} (raise --kmax)",
                out.config.power
            ));
            Ok(None)
        }
        Err(Error::NoSolution(m) | Error::Infeasible(m)) => {
            out.unsolved.push(format!("{kind}: {m}"));
            Ok(None)
        }
        Err(e @ Error::ZeroEffect(_)) if out.config.tests.len() > 1 => {
            out.warnings.push(format!("{kind} skipped: {e}"));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn power(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let (d, s, e) = (cfg.design()?, cfg.spec()?, cfg.effects());
    let mut t = Table::new(["test", "K", "power"]);
    for &kind in &cfg.tests {
        let p = power_at(kind, &d, &e, &s, cfg.k() as f64)?;
        t.push(vec![Cell::Text(kind.to_string()), Cell::Int(cfg.k()), Cell::Num(p)]);
    }
    out.table = t;
    Ok(())
}

fn samplesize(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let (d, s, e) = (cfg.design()?, cfg.spec()?, cfg.effects());
    let mut t = Table::new(["test", "K", "k_continuous", "power"]);
    for &kind in &cfg.tests {
        let r = per_test(kind, required_k_bounded(kind, &d, &e, &s, cfg.kmax), out)?;
        t.push(vec![
            Cell::Text(kind.to_string()),
            Cell::opt_int(r.map(|r| r.k_required), "NA"),
            Cell::opt_num(r.map(|r| r.k_continuous), "NA"),
            Cell::opt_num(r.map(|r| r.achieved_power), "NA"),
        ]);
    }
    out.table = t;
    Ok(())
}

fn mde_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let fixed = match (cfg.fix_dtau, cfg.fix_ddelta) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give at most one of --fix-dtau, --fix-ddelta".into()))
        }
        (Some(v), None) => Some(FixedEffect::Tau(v)),
        (None, Some(v)) => Some(FixedEffect::Delta(v)),
        (None, None) => None,
    };
    let (d, s) = (cfg.design()?, cfg.spec()?);
    let mut t = Table::new(["test", "K", "mde"]);
    for &kind in &cfg.tests {
        let m = per_test(kind, mde(kind, &d, &s, cfg.k(), fixed), out)?;
        t.push(vec![Cell::Text(kind.to_string()), Cell::Int(cfg.k()), Cell::opt_num(m, "ND")]);
    }
    out.table = t;
    Ok(())
}

fn netsize(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let (d, s, e) = (cfg.design()?, cfg.spec()?, cfg.effects());
    let mut t = Table::new(["test", "K", "n"]);
    for &kind in &cfg.tests {
        let n = per_test(kind, solve_network_size(kind, &d, &e, &s, cfg.k(), &cfg.search()), out)?;
        t.push(vec![Cell::Text(kind.to_string()), Cell::Int(cfg.k()), Cell::opt_num(n, "ND")]);
    }
    out.table = t;
    Ok(())
}

fn optimal(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let d = cfg.design()?;
    let mut t = Table::new(["test", "p", "method"]);
    for &kind in &cfg.tests {
        let (p, method) = if cfg.numeric || kind == TestKind::Hispc {
            (optimal_p_numeric(kind, &d, &cfg.effects(), &cfg.spec()?)?, "numeric")
        } else {
            (optimal_p(kind, d.n, d.rho_y)?, "analytic")
        };
        t.push(vec![Cell::Text(kind.to_string()), Cell::Num(p), Cell::Text(method.into())]);
    }
    out.table = t;
    Ok(())
}

fn table(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let tc = cfg.table.as_ref().expect("table config");
    let spec = cfg.spec()?;
    let mut effects = Vec::new();
    for &dt in &tc.grid_dtau {
        for &dd in &tc.grid_ddelta {
            effects.push(EffectSizes::new(dt, dd));
        }
    }
    let grid = SweepGrid {
        n: tc.grid_n.clone(),
        rho: tc.grid_icc.clone(),
        p: tc.grid_p.clone(),
        effects,
    };
    let mut missing = 0;
    let mut count = |c: &Cell| {
        if matches!(c, Cell::Missing(_)) {
            missing += 1;
        }
    };
    out.table = match tc.layout {
        Layout::K => {
            let mut t = Table::new(["n", "icc", "p", "dtau", "ddelta", "K_delta", "K_tau", "K_J", "K_C", "K_o"]);
            for r in table_k(&grid, cfg.var, &spec, cfg.kmax)? {
                let pt = r.point;
                let mut row = vec![
                    Cell::Num(pt.n),
                    Cell::Num(pt.rho),
                    Cell::Num(pt.p),
                    Cell::Num(pt.effects.delta_tau),
                    Cell::Num(pt.effects.delta_delta),
                ];
                row.extend(r.values().map(|v| Cell::opt_int(v, "NA")));
                row.iter().for_each(&mut count);
                t.push(row);
            }
            t
        }
        Layout::Mde => {
            let mut t = Table::new(["n", "icc", "p", "K", "mde_tau", "mde_delta", "mde_J", "mde_C", "mde_o"]);
            for r in table_mde(&grid, cfg.var, &spec, cfg.k())? {
                let pt = r.point;
                let row = vec![
                    Cell::Num(pt.n),
                    Cell::Num(pt.rho),
                    Cell::Num(pt.p),
                    Cell::Int(cfg.k()),
                    Cell::Num(r.mde_tau),
                    Cell::Num(r.mde_delta),
                    Cell::opt_num(r.mde_joint, "ND"),
                    Cell::opt_num(r.mde_conj, "ND"),
                    Cell::Num(r.mde_overall),
                ];
                row.iter().for_each(&mut count);
                t.push(row);
            }
            t
        }
        Layout::N => {
            let mut t = Table::new(["icc", "p", "dtau", "ddelta", "K", "n_tau", "n_delta", "n_J", "n_C", "n_o"]);
            for r in table_n(&grid, cfg.var, &spec, cfg.k(), &cfg.search())? {
                let pt = r.point;
                let row = vec![
                    Cell::Num(pt.rho),
                    Cell::Num(pt.p),
                    Cell::Num(pt.effects.delta_tau),
                    Cell::Num(pt.effects.delta_delta),
                    Cell::Int(cfg.k()),
                    Cell::opt_num(r.n_tau, "ND"),
                    Cell::opt_num(r.n_delta, "ND"),
                    Cell::opt_num(r.n_joint, "ND"),
                    Cell::opt_num(r.n_conj, "ND"),
                    Cell::opt_num(r.n_overall, "ND"),
                ];
                row.iter().for_each(&mut count);
                t.push(row);
            }
            t
        }
    };
    if missing > 0 {
        out.warnings.push(format!("{missing} cell(s) have no solution within the search bounds"));
    }
    Ok(())
}

fn curve_cmd(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let c = cfg.curve.as_ref().expect("curve config");
    let xs = cfg.curve_xs();
    let (axis, x_name) = match c.axis {
        AxisArg::Icc => (Axis::Rho, "icc"),
        AxisArg::P => (Axis::P, "p"),
        AxisArg::N => (Axis::N, "n"),
        AxisArg::Effect => (Axis::Effect, "scale"),
    };
    let (measure, prefix) = match c.measure {
        Measure::K => (CurveMeasure::K, "K"),
        Measure::N => (CurveMeasure::N { k: cfg.k() }, "n"),
    };
    let req = CurveRequest {
        kinds: &cfg.tests,
        design: cfg.design()?,
        effects: cfg.effects(),
        spec: cfg.spec()?,
        axis,
        xs: &xs,
        measure,
        k_max: cfg.kmax,
        search: cfg.search(),
    };
    let mut columns = vec![x_name.to_string()];
    columns.extend(cfg.tests.iter().map(|k| format!("{prefix}_{k}")));
    let mut t = Table::new(columns);
    for pt in curve(&req)? {
        let mut row = vec![Cell::Num(pt.x)];
        row.extend(pt.values.into_iter().map(|v| match c.measure {
            Measure::K => Cell::opt_int(v.map(|k| k as u64), "NA"),
            Measure::N => Cell::opt_num(v, "ND"),
        }));
        t.push(row);
    }
    out.table = t;
    Ok(())
}

fn simulate(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let sc = cfg.simulation.as_ref().expect("simulation config");
    let truth = if sc.null {
        ModelCoefficients::new(sc.gamma, 0.0, 0.0)
    } else {
        ModelCoefficients::new(sc.gamma, cfg.dtau.unwrap_or(0.0), cfg.ddelta.unwrap_or(0.0))
    };
    let k = usize::try_from(cfg.k()).map_err(|_| CliError::Usage("--K is too large".into()))?;
    let mut sim = SimulationConfig::new(cfg.design()?, truth, k, sc.reps, sc.seed);
    sim.kinds = cfg.tests.clone();
    sim.spec = cfg.spec()?;
    sim.mode = match sc.mode {
        Mode::Known => IccMode::KnownIcc,
        Mode::Estimated => IccMode::EstimatedIcc,
    };
    sim.threads = cfg.threads;
    let report = empirical_power(&sim)?;
    if report.degenerate > 0 {
        out.warnings.push(format!(
            "{} of {} replicates were degenerate and excluded from every rate",
            report.degenerate, report.replicates
        ));
    }

    let mut t = Table::new(["quantity", "empirical", "mc_se", "analytic"]);
    for r in &report.tests {
        t.push(vec![
            Cell::Text(format!("reject_{}", r.kind)),
            Cell::Num(r.rate),
            Cell::Num(r.mc_se),
            Cell::Num(r.analytic_power),
        ]);
    }
    let e = &report.estimates;
    let mut summaries = vec![("tau", &e.tau), ("delta", &e.delta), ("overall", &e.overall)];
    if let Some(a) = &e.tau_alt {
        summaries.push(("tau_alt", a));
    }
    if let Some(a) = &e.delta_alt {
        summaries.push(("delta_alt", a));
    }
    for (name, s) in summaries {
        t.push(vec![Cell::Text(format!("mean_{name}")), Cell::Num(s.mean), Cell::Num(s.mc_se), Cell::Num(s.truth)]);
        t.push(vec![
            Cell::Text(format!("var_{name}")),
            Cell::Num(s.variance),
            Cell::Missing("NA"),
            Cell::Num(s.analytic_variance),
        ]);
        t.push(vec![
            Cell::Text(format!("coverage_{name}")),
            Cell::Num(s.coverage),
            Cell::Missing("NA"),
            Cell::Num(1.0 - cfg.alpha),
        ]);
    }
    out.table = t;
    out.json = Some(serde_json::to_value(&report).map_err(Error::from)?);
    Ok(())
}
