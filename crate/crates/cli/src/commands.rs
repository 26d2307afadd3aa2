use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qys_core::classifier::{
    classify, regime_table, sweep_regimes, Classification, DEFAULT_EPS,
};
use qys_core::exact::{exact_constant_psi, exact_exponential, ExactSolution};
use qys_core::export::{export_trajectory, write_csv};
use qys_core::integrator::{integrate, integrate_two_sided, EventKind, IntegratorConfig, Trajectory};
use qys_core::soliton::{Formulation, SolitonParams, SolitonState};
use qys_core::tip::{shoot_tip_series, tip_series};

use crate::config::{F0Values, Family, LineSection, Mode, ParamsSection, RunConfig, TipSection};
use crate::{Cli, CliError, Command, ParamArgs};

/// Oracle runs pass when every state component is this close.
const ORACLE_TOL: f64 = 1e-6;

struct Globals {
    out: Option<PathBuf>,
    seed: Option<u64>,
    integrator: IntegratorConfig,
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut integrator = cfg.integrator;
    if let Some(rtol) = cli.rtol {
        integrator.rtol = rtol;
    }
    if let Some(atol) = cli.atol {
        integrator.atol = atol;
    }
    integrator.validate()?;
    let globals = Globals {
        out: cli.out.clone().or_else(|| cfg.out.clone()),
        seed: cli.seed.or(cfg.seed),
        integrator,
    };

    match cli.command {
        Command::Run {
            params,
            psi,
            dpsi,
            potential,
        } => {
            cfg.check_mode(Mode::Line)?;
            let p = merge_params(cfg.params, &params)?;
            let mut line = cfg.line.clone().unwrap_or_default();
            line.psi = psi.or(line.psi);
            line.dpsi = dpsi.or(line.dpsi);
            line.potential = potential.unwrap_or(line.potential);
            run_line(&globals, &p, &line)
        }
        Command::Shoot { params, f0, r_end } => {
            cfg.check_mode(Mode::Tip)?;
            let p = merge_params(cfg.params, &params)?;
            let mut tip = cfg.tip.clone().unwrap_or_default();
            if let Some(f0) = f0 {
                tip.f0 = F0Values::One(f0);
            }
            if let Some(r_end) = r_end {
                tip.r_end = r_end;
            }
            run_tip(&globals, &p, &tip)
        }
        Command::Sweep => {
            cfg.check_mode(Mode::Sweep)?;
            let grid = cfg
                .sweep
                .clone()
                .ok_or_else(|| CliError::Config("sweep needs a [sweep] table in --config".into()))?;
            run_sweep(&globals, grid)
        }
        Command::Oracle {
            family,
            n,
            c,
            m,
            a,
            c1,
            span,
        } => {
            cfg.check_mode(Mode::Oracle)?;
            let sec = cfg.oracle.clone().unwrap_or_default();
            let family = family
                .or(sec.family)
                .ok_or_else(|| CliError::Config("oracle needs --family".into()))?;
            let n = n.or(sec.n).unwrap_or(3);
            let solution = match family {
                Family::Exponential => exact_exponential(
                    m.or(sec.m).unwrap_or(1.0),
                    n,
                    c.or(sec.c).unwrap_or(1.0 / 6.0),
                )?,
                Family::ConstantPsi => exact_constant_psi(
                    a.or(sec.a).unwrap_or(1.0),
                    c.or(sec.c).unwrap_or(1.0),
                    c1.or(sec.c1).unwrap_or(-1.0),
                )?
                .with_background(n, 0.0)?,
            };
            let span = span.or(sec.span);
            run_oracle(&globals, &solution, span)
        }
        Command::Table => {
            print!("{}", table_text());
            Ok(())
        }
    }
}

fn merge_params(file: Option<ParamsSection>, flags: &ParamArgs) -> Result<SolitonParams, CliError> {
    let missing = |name: &str| CliError::Config(format!("missing parameter {name} (set [params] or --{name})"));
    let p = ParamsSection {
        n: flags.n.or(file.map(|p| p.n)).ok_or_else(|| missing("n"))?,
        lambda: flags.lambda.or(file.map(|p| p.lambda)).ok_or_else(|| missing("lambda"))?,
        c: flags.c.or(file.map(|p| p.c)).ok_or_else(|| missing("c"))?,
        rbar: flags.rbar.or(file.map(|p| p.rbar)).ok_or_else(|| missing("rbar"))?,
    };
    p.build()
}

fn out_path(globals: &Globals, name: &str) -> Result<Option<PathBuf>, CliError> {
    match &globals.out {
        None => Ok(None),
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
            Ok(Some(dir.join(name)))
        }
    }
}

fn summarize(label: &str, traj: &Trajectory, class: &Classification) {
    let (lo, hi) = traj.span();
    println!("{label}");
    println!("  span         [{lo}, {hi}] in {} steps", traj.steps());
    println!("  termination  {}", traj.termination.name());
    for ev in &traj.events {
        match ev.alpha {
            Some(alpha) => println!("  event        {} at r = {} (alpha = {alpha})", ev.kind.name(), ev.r),
            None => println!("  event        {} at r = {}", ev.kind.name(), ev.r),
        }
    }
    println!("  verdict      {}", class.verdict.label());
    match &class.cell {
        Some(cell) => println!(
            "  regime       {} {} {} -> {}",
            cell.r_condition.label(),
            cell.c_sign.label(),
            cell.soliton_type.name(),
            cell.expectation.label()
        ),
        None => println!("  regime       mixed"),
    }
    println!("  consistent   {}", class.consistent);
    for note in &class.notes {
        println!("  note         {note}");
    }
}

fn run_line(globals: &Globals, p: &SolitonParams, line: &LineSection) -> Result<(), CliError> {
    let (Some(psi), Some(dpsi)) = (line.psi, line.dpsi) else {
        return Err(CliError::Config(
            "run needs initial psi and dpsi ([line] or --psi/--dpsi)".into(),
        ));
    };
    let init = SolitonState::new(line.r0, psi, dpsi, line.potential);
    let [lo, hi] = line.span;
    let formulation = Formulation::from(line.formulation);
    if !(lo <= line.r0 && line.r0 <= hi) {
        return Err(CliError::Config(format!(
            "r0 = {} lies outside span [{lo}, {hi}]",
            line.r0
        )));
    }
    let traj = if line.r0 == hi {
        integrate(formulation, &init, p, (hi, lo), &globals.integrator, &line.events)?
    } else if line.r0 == lo {
        integrate(formulation, &init, p, (lo, hi), &globals.integrator, &line.events)?
    } else {
        integrate_two_sided(formulation, &init, p, line.r0, (lo, hi), &globals.integrator, &line.events)?
    };
    let class = classify(&traj);
    summarize("run", &traj, &class);
    if let Some(path) = out_path(globals, "trajectory.csv")? {
        export_trajectory(&traj, &path, line.stride)?;
        println!("  wrote        {}", path.display());
    }
    Ok(())
}

fn run_tip(globals: &Globals, p: &SolitonParams, tip: &TipSection) -> Result<(), CliError> {
    let values = tip.f0.values();
    for (i, f0) in values.iter().enumerate() {
        let series = tip_series(p, *f0, tip.order)?.with_r_start(tip.r_start);
        let traj = shoot_tip_series(
            &series,
            tip.r_end,
            &globals.integrator,
            Formulation::Constraint,
            &[EventKind::PsiZero, EventKind::Asymptote],
        )?;
        let class = classify(&traj);
        let conical = if series.is_conical() { " (conical tip)" } else { "" };
        summarize(
            &format!("shoot F0 = {f0}: a1 = {}, a3 = {}{conical}", series.a1, series.a3),
            &traj,
            &class,
        );
        let name = if values.len() == 1 {
            "shoot.csv".to_string()
        } else {
            format!("shoot-{i}.csv")
        };
        if let Some(path) = out_path(globals, &name)? {
            export_trajectory(&traj, &path, tip.stride)?;
            println!("  wrote        {}", path.display());
        }
    }
    Ok(())
}

fn run_sweep(globals: &Globals, mut grid: qys_core::classifier::GridSpec) -> Result<(), CliError> {
    if let Some(seed) = globals.seed {
        grid.seed = seed;
    }
    let runs = grid.expand()?;
    let rows = sweep_regimes(&runs, &globals.integrator);
    let mut lines = Vec::with_capacity(rows.len());
    for row in &rows {
        lines.push(serde_json::to_string(row).map_err(|e| CliError::Numerical(e.to_string()))?);
    }
    match out_path(globals, "sweep.jsonl")? {
        Some(path) => {
            write_lines(&path, &lines)?;
            let errors = rows.iter().filter(|r| r.error.is_some()).count();
            let inconsistent = rows.iter().filter(|r| !r.consistent).count();
            println!(
                "sweep: {} runs, {} inconsistent, {} failed; wrote {}",
                rows.len(),
                inconsistent,
                errors,
                path.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for line in &lines {
                writeln!(w, "{line}").map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn write_lines(path: &Path, lines: &[String]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Config(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for line in lines {
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn run_oracle(globals: &Globals, solution: &ExactSolution, span: Option<f64>) -> Result<(), CliError> {
    let p = solution.params();
    let (lo, r0, hi) = match solution.pole() {
        None => {
            let half = span.unwrap_or(10.0);
            (-half, 0.0, half)
        }
        Some(pole) => {
            let end = span.map(|s| s * pole.signum()).unwrap_or(0.9 * pole);
            if !solution.contains(end) {
                return Err(CliError::Config(format!(
                    "oracle span reaches past the pole at r = {pole}"
                )));
            }
            (end.min(0.0), 0.0, end.max(0.0))
        }
    };
    let init = solution.state_at(r0)?;
    let traj = integrate_two_sided(Formulation::Constraint, &init, &p, r0, (lo, hi), &globals.integrator, &[])?;
    let (mut psi_err, mut state_err) = (0.0f64, 0.0f64);
    for s in &traj.samples {
        let exact = solution.state_at(s.r)?;
        let e_psi = (s.psi - exact.psi).abs();
        psi_err = psi_err.max(e_psi);
        state_err = state_err
            .max(e_psi)
            .max((s.dpsi - exact.dpsi).abs())
            .max((s.potential - exact.potential).abs());
    }
    println!("oracle {:?}", solution.family);
    println!("  lambda          {}", p.lambda);
    println!("  rbar            {}", p.rbar);
    println!("  R               {}", solution.curvature());
    println!("  span            [{}, {}] in {} steps", traj.span().0, traj.span().1, traj.steps());
    println!("  termination     {}", traj.termination.name());
    println!("  max psi error   {psi_err:e}");
    println!("  max state error {state_err:e}");
    if let Some(path) = out_path(globals, "oracle.csv")? {
        let file = File::create(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        write_csv(&traj, 1, BufWriter::new(file))?;
        println!("  wrote           {}", path.display());
    }
    if traj.span() != (lo, hi) || !(state_err < ORACLE_TOL) {
        return Err(CliError::Numerical(format!(
            "oracle mismatch: max state error {state_err:e} over {:?} (tolerance {ORACLE_TOL:e})",
            traj.span()
        )));
    }
    Ok(())
}

pub fn table_text() -> String {
    let mut out = format!(
        "# regime table, eps = {DEFAULT_EPS}\n{:<14} {:<6} {:<10} {:<27} {}\n",
        "r-condition", "c", "type", "expectation", "citation"
    );
    for cell in regime_table() {
        out.push_str(&format!(
            "{:<14} {:<6} {:<10} {:<27} {}\n",
            cell.r_condition.label(),
            cell.c_sign.label(),
            cell.soliton_type.name(),
            cell.expectation.label(),
            cell.citation.unwrap_or("-")
        ));
    }
    out
}
