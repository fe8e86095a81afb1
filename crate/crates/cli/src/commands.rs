use blockade_core::dynamics::{
    detect_revival, evolve_expectation, fit_sqrt_scaling, full_spectrum, revival_scan, EvolveOptions,
    RevivalOptions, ScanOptions, SpecFamily, TimeSeries,
};
use blockade_core::oracle::{build_full_hamiltonian, oracle_evolve, oracle_spectrum, TensorBasis, EVOLVE_CAP};
use blockade_core::spin_model::{envelope, evolve_sm0, SpinModelConfig};
use blockade_core::state_prep::{
    apply_schedule, physical_schedule, synthesize_sequence, SymmetricTarget, SynthesisOptions,
};
use blockade_core::Error as CoreError;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::config::{frequency_unit, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_f64, write_csv, write_json, write_series, write_sidecar};

/// Default simulated time for quenches, matching the long-time plots.
const QUENCH_T_MAX: f64 = 150.0;

fn scaled(times: &[f64], unit: f64) -> Vec<f64> {
    times.iter().map(|t| t / unit).collect()
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let drive = cfg.drive()?;
    let out = cfg.output()?;
    let unit = frequency_unit(&drive);
    let entries = full_spectrum(n, &drive)?;
    write_csv(
        out,
        &["eigenvalue", "multiplicity", "p", "q"],
        entries.iter().map(|e| {
            vec![
                fmt_f64(e.eigenvalue / unit),
                e.multiplicity.to_string(),
                e.partition.p().to_string(),
                e.partition.q().to_string(),
            ]
        }),
    )?;
    write_sidecar(out, "spectrum", cfg, unit, json!({ "drive": drive, "rows": entries.len() }))
}

pub fn quench(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let drive = cfg.drive()?;
    let spec = cfg.initial(n)?;
    let observable = cfg.observable()?;
    let out = cfg.output()?;
    let unit = frequency_unit(&drive);
    let grid = cfg.grid(n, QUENCH_T_MAX)?;
    let series = evolve_expectation(&spec, &drive, observable, &scaled(&grid, unit), &EvolveOptions::default())?;
    write_series(out, &grid, &series.values)?;
    let mut results = json!({ "drive": drive, "samples": grid.len() });
    if cfg.revival.unwrap_or(false) {
        let in_units = TimeSeries { times: grid.clone(), values: series.values };
        results["revival"] = serde_json::to_value(detect_revival(&in_units, &RevivalOptions::default()))?;
    }
    write_sidecar(out, "quench", cfg, unit, results)
}

fn parse_amplitudes(value: &Value) -> Result<Vec<C64>, CliError> {
    let bad = || CliError::Config("target file must hold a list of numbers or [re, im] pairs".into());
    let items = value.as_array().ok_or_else(bad)?;
    items
        .iter()
        .map(|v| match v {
            Value::Number(x) => x.as_f64().map(|re| C64::new(re, 0.0)).ok_or_else(bad),
            Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        })
        .collect()
}

fn load_target(name: &str, n: Option<usize>) -> Result<SymmetricTarget, CliError> {
    let need_n = || n.ok_or_else(|| CliError::Config("named targets need the atom number n".into()));
    let target = match name {
        "ghz" => SymmetricTarget::ghz(need_n()?)?,
        "w" => SymmetricTarget::w(need_n()?)?,
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read target {path}: {e}")))?;
            let target = SymmetricTarget::new(parse_amplitudes(&serde_json::from_str(&text)?)?)?;
            if let Some(n) = n {
                if target.n() != n {
                    return Err(CliError::Config(format!("target has n = {}, but n = {n} was requested", target.n())));
                }
            }
            target
        }
    };
    Ok(target)
}

pub fn prepare(cfg: &RunConfig) -> Result<(), CliError> {
    let name = cfg.prepare.target.as_deref().ok_or_else(|| CliError::Config("missing preparation target".into()))?;
    let target = load_target(name, cfg.n)?;
    let n = target.n();
    let options = SynthesisOptions { shorten: cfg.prepare.shorten.unwrap_or(false) };
    let effective = synthesize_sequence(&target, &options)?;
    let physical = physical_schedule(&effective);
    let outcome = apply_schedule(&effective, n)?;
    let outcome_physical = apply_schedule(&physical, n)?;
    let fidelity = target.fidelity(&outcome.amplitudes);
    let fidelity_physical = target.fidelity(&outcome_physical.amplitudes);

    print!("{}", effective.pruned().table());
    println!("fidelity {fidelity:.12}  physical pulses {}  physical fidelity {fidelity_physical:.12}", physical.len());
    if outcome.leakage_warning() || outcome_physical.leakage_warning() {
        eprintln!("warning: population left outside the top row ({:e})", outcome.leakage.max(outcome_physical.leakage));
    }
    if let Some(out) = cfg.output.as_deref() {
        let report = json!({
            "n": n,
            "target": target.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
            "effective": effective.to_json(),
            "physical": physical.to_json(),
            "fidelity": fidelity,
            "fidelity_physical": fidelity_physical,
            "leakage": outcome.leakage,
            "leakage_warning": outcome.leakage_warning(),
        });
        write_json(out, &report)?;
    }
    Ok(())
}

pub fn spinmodel(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let drive = cfg.drive()?;
    let out = cfg.output()?;
    let unit = frequency_unit(&drive);
    let grid = cfg.grid(n, QUENCH_T_MAX)?;
    let model = SpinModelConfig { n, drive, times: scaled(&grid, unit) };
    match cfg.variant.as_deref().unwrap_or("pm") {
        "pm" => {
            let env = envelope(&model)?;
            write_csv(
                out,
                &["t", "lower", "upper", "overlap_abs"],
                (0..grid.len()).map(|i| {
                    vec![fmt_f64(grid[i]), fmt_f64(env.lower[i]), fmt_f64(env.upper[i]), fmt_f64(env.overlap_abs[i])]
                }),
            )?;
        }
        "zero" => write_series(out, &grid, &evolve_sm0(&model)?.values)?,
        other => return Err(CliError::Config(format!("unknown spin-model variant {other:?}; expected pm or zero"))),
    }
    write_sidecar(out, "spinmodel", cfg, unit, json!({ "drive": drive }))
}

pub fn oracle(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let drive = cfg.drive()?;
    let out = cfg.output()?;
    let unit = frequency_unit(&drive);
    if n > EVOLVE_CAP {
        return Err(CoreError::Capacity { n, cap: EVOLVE_CAP, what: "oracle runs" }.into());
    }
    let basis = TensorBasis::new(n)?;
    match cfg.mode.as_deref().unwrap_or("quench") {
        "spectrum" => {
            let values = oracle_spectrum(&basis, &drive)?;
            write_csv(
                out,
                &["eigenvalue", "multiplicity"],
                values.iter().map(|e| vec![fmt_f64(e / unit), "1".to_string()]),
            )?;
        }
        "quench" => {
            let spec = cfg.initial(n)?;
            let grid = cfg.grid(n, QUENCH_T_MAX)?;
            let psi = basis.zeros_then_ones(spec.n0)?;
            let series = oracle_evolve(&basis, &psi, &drive, cfg.observable()?, &scaled(&grid, unit))?;
            write_series(out, &grid, &series.values)?;
        }
        "hamiltonian" => {
            let h = build_full_hamiltonian(&basis, &drive)?.to_dense();
            let dump = json!({
                "basis": (0..basis.dim()).map(|i| basis.label(i)).collect::<Vec<_>>(),
                "matrix": h.rows().into_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            write_json(out, &dump)?;
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown oracle mode {other:?}; expected spectrum, quench or hamiltonian"
            )))
        }
    }
    write_sidecar(out, "oracle", cfg, unit, json!({ "drive": drive, "dimension": basis.dim() }))
}

pub fn revival_scan_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let drive = cfg.drive()?;
    let out = cfg.output()?;
    let unit = frequency_unit(&drive);
    let family: SpecFamily = cfg.scan.family.as_deref().unwrap_or("all-one").parse()?;
    let n_list = cfg.scan.n_list.clone().ok_or_else(|| CliError::Config("missing n_list".into()))?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(CliError::Config("n_list must hold positive atom numbers".into()));
    }
    let defaults = ScanOptions::default();
    let options = ScanOptions {
        t_max_per_sqrt_n: cfg.scan.t_max_per_sqrt_n.unwrap_or(defaults.t_max_per_sqrt_n),
        revival: RevivalOptions {
            jump_factor: cfg.scan.jump_factor.unwrap_or(defaults.revival.jump_factor),
            exclusion_time: cfg.scan.exclusion_time.unwrap_or(defaults.revival.exclusion_time),
        },
        ..defaults
    };
    let points = revival_scan(&n_list, family, &drive, &options)?;
    write_csv(
        out,
        &["n", "t_rev", "strength"],
        points.iter().map(|p| match p.revival {
            Some(r) => vec![p.n.to_string(), fmt_f64(r.time * unit), fmt_f64(r.strength)],
            None => vec![p.n.to_string(), String::new(), String::new()],
        }),
    )?;
    let found: Vec<(usize, f64)> = points.iter().filter_map(|p| p.revival.map(|r| (p.n, r.time * unit))).collect();
    let fit = if found.len() == points.len() && found.len() >= 2 { fit_sqrt_scaling(&found).ok() } else { None };
    write_sidecar(out, "revival-scan", cfg, unit, json!({ "drive": drive, "fit": fit }))
}
