//! Executes parsed scenarios and writes their CSV series.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{
    ClassicalParams, DemonParams, GibbsParams, OttoParams, PovmKind, ProcessParams, RunSpec, Scenario,
    ScenarioConfig,
};
use super::CliError;
use crate::channels::sample_relaxation;
use crate::engines::{classical_endoreversible, cycle_transient, run_otto};
use crate::feedback::{demon_forces, feedback_bound_check, measure, qc_mutual_information, shannon_entropy, Povm};
use crate::operator::HermitianOperator;
use crate::process::{cumulative_ledger, minimal_work_check};
use crate::state::{
    effective_temperature, equilibrium_free_energy, gibbs_state, von_neumann_entropy, QuantumState, ThermalContext,
};
use crate::Result;

/// Tolerance below which a cumulative entropy production counts as negative.
const SECOND_LAW_TOLERANCE: f64 = 1e-9;

pub const PROCESS_COLUMNS: [&str; 10] = [
    "t",
    "energy",
    "entropy_vn",
    "rel_entropy_to_gibbs",
    "heat_cum",
    "work_cum",
    "entropy_production_cum",
    "w_rev_cum",
    "w_irr_cum",
    "t_eff",
];

pub const OTTO_COLUMNS: [&str; 10] = [
    "cycle_index",
    "Qh",
    "Qc",
    "W_total",
    "eta",
    "eta_carnot",
    "dIS_h",
    "dIS_c",
    "T1",
    "T3",
];

const GIBBS_COLUMNS: [&str; 7] = [
    "temperature",
    "beta",
    "excited_population",
    "energy",
    "entropy_vn",
    "free_energy",
    "t_eff",
];

const CLASSICAL_COLUMNS: [&str; 8] = ["Th", "Tc", "T1", "T3", "Qh", "Qc", "eta_e", "eta_carnot"];

const DEMON_COLUMNS: [&str; 8] = [
    "t",
    "info",
    "outcome_entropy",
    "entropy_vn",
    "rate_system",
    "rate_outcomes",
    "rate_post_measurement",
    "rate_total",
];

/// CSV table built in memory, written in one piece.
struct Table {
    text: String,
    rows: usize,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            text: format!("{}\n", columns.join(",")),
            rows: 0,
        }
    }

    fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
        self.rows += 1;
    }
}

enum Cell {
    Num(f64),
    Int(usize),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// 17 significant digits, `inf`/`-inf`/`nan` for non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Shortest representation of `x` rounded to 12 significant digits.
fn short(x: f64) -> String {
    if !x.is_finite() {
        return format_number(x);
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

fn pass(ok: bool) -> &'static str {
    if ok { "PASS" } else { "FAIL" }
}

/// Output of one run: the CSV text and its summary line.
pub struct RunOutput {
    pub csv: String,
    pub rows: usize,
    pub summary: String,
}

pub fn execute(run: &RunSpec) -> Result<RunOutput> {
    let (table, summary) = match &run.scenario {
        Scenario::Gibbs(p) => gibbs(p)?,
        Scenario::Process(p) => process(p)?,
        Scenario::Otto(p) => otto(p)?,
        Scenario::Classical(p) => classical(p)?,
        Scenario::Demon(p) => demon(p)?,
    };
    Ok(RunOutput {
        csv: table.text,
        rows: table.rows,
        summary: format!("{}: {summary}", run.label),
    })
}

/// Runs every configured run (concurrently for sweeps), writes each CSV
/// atomically under `out_dir` and returns the summary lines in config order.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> std::result::Result<Vec<String>, CliError> {
    let outputs: Vec<_> = config.runs.par_iter().map(execute).collect();
    let mut summaries = Vec::with_capacity(outputs.len());
    for (run, output) in config.runs.iter().zip(outputs) {
        let output = output.map_err(|e| CliError::Compute {
            label: run.label.clone(),
            source: e,
        })?;
        write_atomic(&out_dir.join(&run.output), &output.csv)?;
        summaries.push(output.summary);
    }
    Ok(summaries)
}

fn write_atomic(path: &Path, contents: &str) -> std::result::Result<(), CliError> {
    let io = |source: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn t_eff_cell(rho: &QuantumState, omega: f64) -> Cell {
    match effective_temperature(rho, omega) {
        Ok(t) => Cell::Num(t.temperature),
        Err(_) => Cell::Num(f64::NAN),
    }
}

fn gibbs(p: &GibbsParams) -> Result<(Table, String)> {
    let h = HermitianOperator::qubit_hamiltonian(p.omega);
    let mut table = Table::new(&GIBBS_COLUMNS);
    let mut free_energies = Vec::with_capacity(p.steps);
    for i in 0..p.steps {
        let t = p.t_min + (p.t_max - p.t_min) * i as f64 / (p.steps - 1) as f64;
        let ctx = ThermalContext::from_temperature(t)?;
        let g = gibbs_state(&h, &ctx);
        let f = equilibrium_free_energy(&h, &ctx);
        free_energies.push(f);
        table.row(&[
            Cell::Num(t),
            Cell::Num(ctx.beta()),
            Cell::Num(g.excited_population()),
            Cell::Num(crate::operator::trace_product(g.density(), &h)?),
            Cell::Num(von_neumann_entropy(&g)),
            Cell::Num(f),
            t_eff_cell(&g, p.omega),
        ]);
    }
    let summary = format!(
        "omega={} F(t_min)={} F(t_max)={}",
        short(p.omega),
        short(free_energies[0]),
        short(free_energies[p.steps - 1])
    );
    Ok((table, summary))
}

fn process(p: &ProcessParams) -> Result<(Table, String)> {
    let h = HermitianOperator::qubit_hamiltonian(p.omega);
    let ctx = ThermalContext::from_temperature(p.temperature)?;
    let rho0 = QuantumState::qubit(p.n0)?;
    let traj = sample_relaxation(&rho0, &h, &ctx, &p.params, p.duration, p.steps)?;
    let ledger = cumulative_ledger(&traj)?;
    let mut table = Table::new(&PROCESS_COLUMNS);
    for (row, state) in ledger.iter().zip(traj.states()) {
        table.row(&[
            Cell::Num(row.time),
            Cell::Num(row.energy),
            Cell::Num(row.entropy),
            Cell::Num(row.information),
            Cell::Num(row.heat),
            Cell::Num(row.work),
            Cell::Num(row.entropy_production),
            Cell::Num(row.reversible_work),
            Cell::Num(row.irreversible_work),
            t_eff_cell(state, p.omega),
        ]);
    }

    // most negative production over any sub-interval [j, k]: cum[k] - max_{j<k} cum[j]
    let mut worst = (f64::INFINITY, 0, 0);
    let mut best_start = 0;
    for k in 1..ledger.len() {
        if ledger[k - 1].entropy_production > ledger[best_start].entropy_production {
            best_start = k - 1;
        }
        let window = ledger[k].entropy_production - ledger[best_start].entropy_production;
        if window < worst.0 {
            worst = (window, best_start, k);
        }
    }
    let (min_window, start, end) = worst;
    let bound = minimal_work_check(&traj.window(start..=end)?)?;
    let last = ledger.last().expect("trajectory has at least two samples");
    let summary = format!(
        "dIS={} dES={} heat={} W_irr={} min_window_dIS={} window=[{},{}] markov_second_law={} minimal_work_bound={}",
        short(last.entropy_production),
        short(ctx.beta() * last.heat),
        short(last.heat),
        short(last.irreversible_work),
        short(min_window),
        short(traj.times()[start]),
        short(traj.times()[end]),
        pass(min_window >= -SECOND_LAW_TOLERANCE),
        pass(!bound.violated),
    );
    Ok((table, summary))
}

fn otto(p: &OttoParams) -> Result<(Table, String)> {
    let seed = match p.seed_population {
        Some(n) => QuantumState::qubit(n)?,
        None => p.config.default_seed()?,
    };
    let transient = cycle_transient(&p.config, &seed, p.cycles)?;
    let mut table = Table::new(&OTTO_COLUMNS);
    for (i, r) in transient.iter().enumerate() {
        table.row(&[
            Cell::Int(i),
            Cell::Num(r.qh),
            Cell::Num(r.qc),
            Cell::Num(r.w_total),
            r.eta.map_or(Cell::Empty, Cell::Num),
            Cell::Num(r.eta_carnot),
            Cell::Num(r.dis_h),
            Cell::Num(r.dis_c),
            Cell::Num(r.t1),
            Cell::Num(r.t3),
        ]);
    }
    let r = run_otto(&p.config)?;
    let second_law = r.dis_h >= -SECOND_LAW_TOLERANCE
        && r.dis_c >= -SECOND_LAW_TOLERANCE
        && r.eta.is_none_or(|eta| eta <= r.eta_carnot + SECOND_LAW_TOLERANCE);
    let mut summary = String::new();
    write!(
        summary,
        "Qh={} Qc={} W_total={} eta={} eta_carnot={} dIS_h={} dIS_c={} W_irr={} T1={} T3={} is_engine={} reversed_gradient={} markov_second_law={}",
        short(r.qh),
        short(r.qc),
        short(r.w_total),
        r.eta.map_or_else(|| "none".to_string(), short),
        short(r.eta_carnot),
        short(r.dis_h),
        short(r.dis_c),
        short(r.w_irr),
        short(r.t1),
        short(r.t3),
        r.is_engine,
        r.reversed_gradient,
        pass(second_law),
    )
    .expect("writing to a String cannot fail");
    Ok((table, summary))
}

fn classical(p: &ClassicalParams) -> Result<(Table, String)> {
    let r = classical_endoreversible(p.th, p.tc, p.t1, p.t3, p.qh)?;
    let mut table = Table::new(&CLASSICAL_COLUMNS);
    table.row(&[
        Cell::Num(p.th),
        Cell::Num(p.tc),
        Cell::Num(p.t1),
        Cell::Num(p.t3),
        Cell::Num(p.qh),
        Cell::Num(r.qc),
        Cell::Num(r.eta_e),
        Cell::Num(r.eta_carnot),
    ]);
    let summary = format!(
        "Qc={} eta={} eta_carnot={} dIS={} identity_residual={} physical={} markov_second_law={}",
        short(r.qc),
        short(r.eta_e),
        short(r.eta_carnot),
        short(r.dis),
        short(r.identity_residual),
        r.physical,
        pass(r.dis >= -SECOND_LAW_TOLERANCE),
    );
    Ok((table, summary))
}

fn demon_povm(kind: PovmKind, dim: usize) -> Result<Povm> {
    match kind {
        PovmKind::Identity => Povm::uninformative(1, dim),
        PovmKind::Uninformative(n) => Povm::uninformative(n, dim),
        PovmKind::Computational => Ok(Povm::computational_basis(dim)),
    }
}

fn demon(p: &DemonParams) -> Result<(Table, String)> {
    let dim = p.populations.len();
    let povm = demon_povm(p.povm, dim)?;
    let ctx = ThermalContext::from_temperature(p.temperature)?;
    let h = HermitianOperator::zeros(dim);
    let rho_dot = HermitianOperator::from_real_diagonal(&p.flow)?;
    let mut table = Table::new(&DEMON_COLUMNS);
    let mut first_info = 0.0;
    let mut first_outcome_entropy = 0.0;
    for i in 0..p.steps {
        let t = p.duration * i as f64 / (p.steps - 1) as f64;
        let pops: Vec<f64> = p.populations.iter().zip(&p.flow).map(|(n, v)| n + t * v).collect();
        let rho = QuantumState::from_populations(&pops)?;
        let info = qc_mutual_information(&rho, &povm)?;
        let outcome_entropy = shannon_entropy(&measure(&rho, &povm)?.probabilities)?;
        let rates = demon_forces(&rho, &rho_dot, &povm, &ctx, &h)?;
        if i == 0 {
            first_info = info;
            first_outcome_entropy = outcome_entropy;
        }
        table.row(&[
            Cell::Num(t),
            Cell::Num(info),
            Cell::Num(outcome_entropy),
            Cell::Num(von_neumann_entropy(&rho)),
            Cell::Num(rates.system),
            Cell::Num(rates.outcomes),
            Cell::Num(rates.post_measurement),
            Cell::Num(rates.total()),
        ]);
    }
    let mut summary = format!("info={} outcome_entropy={}", short(first_info), short(first_outcome_entropy));
    if let (Some(dw), Some(df)) = (p.delta_w, p.delta_f) {
        let b = feedback_bound_check(dw, df, ctx.beta(), first_info)?;
        write!(summary, " feedback_margin={} feedback_bound={}", short(b.margin), pass(b.satisfied))
            .expect("writing to a String cannot fail");
    }
    Ok((table, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(short(0.49999999999999994), "0.5");
        assert_eq!(short(0.75), "0.75");
        assert_eq!(short(f64::NEG_INFINITY), "-inf");
    }
}
